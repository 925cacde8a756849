"""Partitioning of the frequency-time resource grid into access channels.

The grid is F frequency resource blocks by S time slots. Each channel is one
contiguous rectangle of blocks dedicated to a single use mode. URLLC channels
are always one slot long (latency rule); mMTC channels are shaped as
numerology boxes: doubling the subcarrier spacing doubles the box width in
frequency and roughly halves its length in time, at constant symbol capacity.

Packing uses the maximal-rectangles bottom-left heuristic: keep the set of all
maximal free rectangles, place each box at the lowest-frequency (then earliest
slot) feasible corner, split and prune the free set afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

URLLC = "urllc"
MMTC = "mmtc"

FIXED_CHANNEL_WIDTH = 16  # frequency RBs of one baseline (no-slicing) channel

# mMTC box ladder tried at each candidate corner, narrowest first. Widths are
# k * 2^mu with mu capped at 2; the final step doubles the mu=2 width (k=2),
# which keeps the width a multiple of 2^mu while reaching a two-slot footprint.
_MMTC_WIDTH_LADDER = ((1, 0), (2, 1), (4, 2), (8, 2))


@dataclass(frozen=True)
class GridConfig:
    """Grid geometry, packet formats and objective weights."""

    f: int = 50             # frequency RBs per frame
    s: int = 10             # time slots per frame
    nu: int = 14            # OFDM symbols per RB
    p_u: int = 32           # URLLC packet size, bytes
    p_m: int = 200          # mMTC packet size, bytes
    m_u: int = 4            # URLLC modulation order
    m_m: int = 256          # mMTC modulation order
    xi: int = 5             # protocol overhead, symbols
    omega_u: float = 0.9    # objective weights: URLLC, mMTC, unmet-demand penalty
    omega_m: float = 0.05
    omega_p: float = 0.05
    z_fractional: bool = False  # use fractional RB demand in the capacity bound

    def validate(self):
        if min(self.f, self.s, self.nu) < 1:
            raise ValueError("f, s and nu must be >= 1")
        for name, m in (("m_u", self.m_u), ("m_m", self.m_m)):
            if m < 2 or m & (m - 1):
                raise ValueError(f"{name} must be a power of 2 and >= 2")
        if self.p_u <= 0 or self.p_m <= 0 or self.xi < 0:
            raise ValueError("packet sizes must be positive and xi >= 0")
        if not (self.omega_u > self.omega_m >= self.omega_p >= 0):
            raise ValueError("weights must satisfy omega_u > omega_m >= omega_p >= 0")
        if abs(self.omega_u + self.omega_m + self.omega_p - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        return self


@dataclass(frozen=True)
class ChannelAssignment:
    """One channel: a rectangle of RBs with a use mode and numerology factor."""

    id: int
    use_mode: str
    mu: int
    f_start: int
    f_len: int
    s_start: int
    s_len: int

    @property
    def area(self) -> int:
        return self.f_len * self.s_len

    def overlaps(self, other: "ChannelAssignment") -> bool:
        return (
            self.f_start < other.f_start + other.f_len
            and other.f_start < self.f_start + self.f_len
            and self.s_start < other.s_start + other.s_len
            and other.s_start < self.s_start + self.s_len
        )


@dataclass(frozen=True)
class SlicingPlan:
    """Channel set for one frame plus the grid it was drawn on."""

    channels: tuple[ChannelAssignment, ...]
    f_size: int
    s_size: int
    synthetic: bool = False  # count-only plan, geometry is nominal

    @property
    def l_u(self) -> int:
        return sum(1 for c in self.channels if c.use_mode == URLLC)

    @property
    def l_m(self) -> int:
        return sum(1 for c in self.channels if c.use_mode == MMTC)

    @property
    def l_total(self) -> int:
        return len(self.channels)

    def by_mode(self, mode: str) -> list[ChannelAssignment]:
        return [c for c in self.channels if c.use_mode == mode]


@dataclass
class Violation:
    constraint: str          # well-formed | single-slot | numerology | overlap | capacity
    channel_ids: tuple
    detail: str


def numerology_symbols(mu: int, nu: int) -> int:
    """Symbols carried per millisecond at numerology factor mu (2^mu * nu)."""
    if not 0 <= mu <= 4:
        raise ValueError("numerology factor must be in 0..4")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    return (1 << mu) * nu


def tti_ms(n_symbols: float, mu: int, nu: int) -> float:
    """Transmission time for n_symbols at numerology mu, in milliseconds."""
    return n_symbols / numerology_symbols(mu, nu)


def packet_size_rbs(p_bytes: int, m_order: int, xi: int, nu: int) -> tuple[float, int]:
    """Resource demand of one packet: (symbols, whole RBs).

    Symbols = 8*bytes / bits-per-symbol + overhead; the RB count is ceiled so a
    packed channel always covers the full symbol demand.
    """
    if p_bytes <= 0 or m_order < 2 or xi < 0 or nu < 1:
        raise ValueError("invalid packet parameters")
    symbols = 8.0 * p_bytes / math.log2(m_order) + xi
    return symbols, math.ceil(symbols / nu)


def _iota_rbs(cfg: GridConfig) -> tuple[int, int]:
    _, iota_u = packet_size_rbs(cfg.p_u, cfg.m_u, cfg.xi, cfg.nu)
    _, iota_m = packet_size_rbs(cfg.p_m, cfg.m_m, cfg.xi, cfg.nu)
    return iota_u, iota_m


def max_mmtc_channels(cfg: GridConfig, k_u: int) -> int:
    """Upper bound on mMTC channels once k_u URLLC packets are provisioned."""
    if k_u < 0:
        raise ValueError("k_u must be non-negative")
    if cfg.z_fractional:
        sym_u, _ = packet_size_rbs(cfg.p_u, cfg.m_u, cfg.xi, cfg.nu)
        sym_m, _ = packet_size_rbs(cfg.p_m, cfg.m_m, cfg.xi, cfg.nu)
        iota_u, iota_m = sym_u / cfg.nu, sym_m / cfg.nu
    else:
        iota_u, iota_m = _iota_rbs(cfg)
    spare = cfg.f * cfg.s - iota_u * k_u
    return max(0, math.floor(spare / iota_m))


class FreeRectSet:
    """All maximal free rectangles of a partially packed grid.

    Rectangles are (f_start, f_len, s_start, s_len) tuples. After each
    placement every intersecting free rectangle is split into up to four
    maximal remainders and contained rectangles are pruned, so the set stays
    exactly the maximal rectangles of the free region. ``free_cells`` tracks
    the exact uncovered area.
    """

    def __init__(self, f_size: int, s_size: int):
        self.f_size = f_size
        self.s_size = s_size
        self.rects: list[tuple[int, int, int, int]] = (
            [(0, f_size, 0, s_size)] if f_size > 0 and s_size > 0 else []
        )
        self.free_cells = f_size * s_size

    def place(self, bf: int, bw: int, bs: int, bh: int):
        """Carve the box (bf, bw, bs, bh) out of the free region."""
        bf2, bs2 = bf + bw, bs + bh
        out = []
        for (rf, rw, rs, rh) in self.rects:
            rf2, rs2 = rf + rw, rs + rh
            if bf >= rf2 or bf2 <= rf or bs >= rs2 or bs2 <= rs:
                out.append((rf, rw, rs, rh))
                continue
            if bf > rf:
                out.append((rf, bf - rf, rs, rh))
            if bf2 < rf2:
                out.append((bf2, rf2 - bf2, rs, rh))
            if bs > rs:
                out.append((rf, rw, rs, bs - rs))
            if bs2 < rs2:
                out.append((rf, rw, bs2, rs2 - bs2))
        self.rects = _prune_contained(out)
        self.free_cells -= bw * bh

    def bottom_left_fit(self, shapes) -> tuple[int, int, int, int, int] | None:
        """First (box, corner) along the bottom-left order that hosts a shape.

        Corners are visited lowest frequency first, then earliest slot; at each
        corner the shapes are tried in ladder order. Returns
        (f, width, s, length, mu) or None when nothing fits anywhere.
        """
        for (rf, rw, rs, rh) in sorted(self.rects, key=lambda r: (r[0], r[2], r[1], r[3])):
            for (w, h, mu) in shapes:
                if w <= rw and h <= rh:
                    return rf, w, rs, h, mu
        return None


def _prune_contained(rects):
    rects = sorted(set(rects), key=lambda r: (-r[1] * r[3], r))
    kept: list[tuple[int, int, int, int]] = []
    for r in rects:
        rf, rw, rs, rh = r
        contained = any(
            kf <= rf and kf + kw >= rf + rw and ks <= rs and ks + kh >= rs + rh
            for (kf, kw, ks, kh) in kept
        )
        if not contained:
            kept.append(r)
    return kept


def mmtc_box_ladder(iota_rbs: int) -> tuple[tuple[int, int, int], ...]:
    """Candidate mMTC box shapes (width, length, mu), narrowest first."""
    return tuple(
        (w, math.ceil(iota_rbs / w), mu) for (w, mu) in _MMTC_WIDTH_LADDER
    )


def maxrect_slice(cfg: GridConfig, k_hat_u: int, k_hat_m: int) -> SlicingPlan:
    """Pack up to k_hat_u URLLC and k_hat_m mMTC channels into the grid.

    URLLC channels go first as single-slot strips of the full packet width.
    mMTC channels then walk the bottom-left corners, escalating through the
    numerology box ladder whenever the current shape does not fit, and stop
    once the demand is met, the free area drops below one packet, or no shape
    fits anywhere. Returns fewer channels than requested when space runs out.
    """
    cfg.validate()
    if k_hat_u < 0 or k_hat_m < 0:
        raise ValueError("channel demands must be non-negative")
    iota_u, iota_m = _iota_rbs(cfg)
    free = FreeRectSet(cfg.f, cfg.s)
    channels: list[ChannelAssignment] = []

    urllc_shape = ((iota_u, 1, 0),)
    for _ in range(k_hat_u):
        spot = free.bottom_left_fit(urllc_shape)
        if spot is None:
            break
        f, w, s, h, mu = spot
        free.place(f, w, s, h)
        channels.append(ChannelAssignment(len(channels), URLLC, mu, f, w, s, h))

    ladder = mmtc_box_ladder(iota_m)
    placed = 0
    while placed < k_hat_m and free.free_cells >= iota_m:
        spot = free.bottom_left_fit(ladder)
        if spot is None:
            break
        f, w, s, h, mu = spot
        free.place(f, w, s, h)
        channels.append(ChannelAssignment(len(channels), MMTC, mu, f, w, s, h))
        placed += 1

    return SlicingPlan(tuple(channels), cfg.f, cfg.s)


def fixed_grid_slice(cfg: GridConfig, l_u: int = 5) -> SlicingPlan:
    """Baseline without slicing: tile identical 16-RB x 1-slot channels.

    The first l_u channels in bottom-left order are labelled URLLC, the rest
    mMTC. A grid narrower than one channel yields an empty plan, which signals
    the infeasible tiling.
    """
    cfg.validate()
    per_slot = cfg.f // FIXED_CHANNEL_WIDTH
    channels = []
    for f_idx in range(per_slot):
        for s in range(cfg.s):
            cid = len(channels)
            channels.append(
                ChannelAssignment(
                    cid,
                    URLLC if cid < l_u else MMTC,
                    0,
                    f_idx * FIXED_CHANNEL_WIDTH,
                    FIXED_CHANNEL_WIDTH,
                    s,
                    1,
                )
            )
    return SlicingPlan(tuple(channels), cfg.f, cfg.s)


def plan_from_counts(l_u: int, l_m: int) -> SlicingPlan:
    """Count-only channel pool for experiments with a fixed channel topology.

    Geometry is nominal (one RB per channel on a synthetic grid); contention
    dynamics depend only on the per-mode channel counts.
    """
    if l_u < 0 or l_m < 0:
        raise ValueError("channel counts must be non-negative")
    channels = tuple(
        ChannelAssignment(i, URLLC if i < l_u else MMTC, 0, i, 1, 0, 1)
        for i in range(l_u + l_m)
    )
    return SlicingPlan(channels, max(1, l_u + l_m), 1, synthetic=True)


def validate_constraints(plan: SlicingPlan, cfg: GridConfig) -> list[Violation]:
    """Check a plan against the assignment rules; empty list means valid.

    Covers rectangle well-formedness (binary, contiguous, in-bounds), the
    URLLC single-slot rule, numerology width multiplicity, pairwise
    disjointness, and per-packet capacity.
    """
    iota_u, iota_m = _iota_rbs(cfg)
    out: list[Violation] = []
    for c in plan.channels:
        if (
            c.f_len < 1
            or c.s_len < 1
            or c.f_start < 0
            or c.s_start < 0
            or c.f_start + c.f_len > plan.f_size
            or c.s_start + c.s_len > plan.s_size
        ):
            out.append(Violation("well-formed", (c.id,), "rectangle empty or out of grid"))
        if c.use_mode == URLLC and c.s_len != 1:
            out.append(Violation("single-slot", (c.id,), f"URLLC channel spans {c.s_len} slots"))
        if c.mu not in (0, 1, 2) or c.f_len % (1 << c.mu):
            out.append(
                Violation("numerology", (c.id,), f"width {c.f_len} not a multiple of 2^{c.mu}")
            )
        iota = iota_u if c.use_mode == URLLC else iota_m
        if c.area < iota:
            out.append(
                Violation("capacity", (c.id,), f"area {c.area} below packet demand {iota}")
            )
    chans = plan.channels
    for i in range(len(chans)):
        for j in range(i + 1, len(chans)):
            if chans[i].overlaps(chans[j]):
                out.append(
                    Violation("overlap", (chans[i].id, chans[j].id), "rectangles intersect")
                )
    return out


def evaluate_objective(plan: SlicingPlan, cfg: GridConfig, backlog_total: int, k_u: int) -> float:
    """Weighted channel score minus the unmet-demand penalty.

    score = omega_u * L_u + omega_m * L_m
            - omega_p * max(0, backlog - min(L, capacity bound))
    """
    z = max_mmtc_channels(cfg, k_u)
    unmet = max(0, backlog_total - min(plan.l_total, z))
    return cfg.omega_u * plan.l_u + cfg.omega_m * plan.l_m - cfg.omega_p * unmet


_ID_CHARS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def plan_dump_lines(plan: SlicingPlan) -> list[str]:
    """One CSV-ish line per channel: id,mode,mu,f_start,f_len,s_start,s_len."""
    return [
        f"{c.id},{c.use_mode},{c.mu},{c.f_start},{c.f_len},{c.s_start},{c.s_len}"
        for c in plan.channels
    ]


def render_plan_grid(plan: SlicingPlan) -> str:
    """ASCII view of the grid, one row per time slot, one char per RB.

    Channels print as their id mod 62 in 0-9a-zA-Z, free blocks as '.'.
    """
    rows = [["."] * plan.f_size for _ in range(plan.s_size)]
    for c in plan.channels:
        ch = _ID_CHARS[c.id % 62]
        for s in range(c.s_start, c.s_start + c.s_len):
            for f in range(c.f_start, c.f_start + c.f_len):
                rows[s][f] = ch
    return "\n".join("".join(r) for r in rows)
