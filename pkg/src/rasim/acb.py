"""Access class barring: per-channel pass probabilities and the barring draw.

After preamble selection the base station knows how many UEs landed on each
channel and broadcasts a barring factor; every colliding UE draws a uniform
number and proceeds only if it does not exceed the factor. A UE alone on its
channel always proceeds.

Two "optimal" flavours are shipped: ``opt-inv`` passes each of n colliders
with probability 1/n (maximizes the chance that exactly one survives) and
``opt-lit`` with probability 1 - 1/n (the literal collision-thinning rule).
They disagree for n >= 3; both are kept so the difference can be measured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GRANT_FREE = "gf"
STATIC = "static"
OPT_INVERSE = "opt-inv"
OPT_LITERAL = "opt-lit"


@dataclass(frozen=True)
class AcbPolicy:
    kind: str
    p: float = 1.0  # used by the static policy only

    def __post_init__(self):
        if self.kind not in (GRANT_FREE, STATIC, OPT_INVERSE, OPT_LITERAL):
            raise ValueError(f"unknown barring policy {self.kind!r}")
        if self.kind == STATIC and not 0.0 <= self.p <= 1.0:
            raise ValueError("static barring factor must lie in [0, 1]")

    @property
    def label(self) -> str:
        return f"static:{self.p:g}" if self.kind == STATIC else self.kind


def parse_policy(text: str) -> AcbPolicy:
    """Parse 'gf' | 'static:<p>' | 'opt-inv' | 'opt-lit'."""
    if text.startswith("static:"):
        return AcbPolicy(STATIC, float(text.split(":", 1)[1]))
    return AcbPolicy(text)


def acb_factor(policy: AcbPolicy, n: int) -> float:
    """Pass probability broadcast for a channel with n contenders.

    Idle and singleton channels always get 1 regardless of policy.
    """
    if n < 0:
        raise ValueError("contender count must be non-negative")
    if n <= 1 or policy.kind == GRANT_FREE:
        return 1.0
    if policy.kind == STATIC:
        return policy.p
    if policy.kind == OPT_INVERSE:
        return 1.0 / n
    return 1.0 - 1.0 / n  # opt-lit


def acb_round(n: int, pass_prob: float, rng: np.random.Generator) -> int:
    """Number of the n contenders whose uniform draw passes the factor."""
    if n < 0:
        raise ValueError("contender count must be non-negative")
    if not 0.0 <= pass_prob <= 1.0:
        raise ValueError("pass probability must lie in [0, 1]")
    if n == 0 or pass_prob == 1.0:
        return n
    return int(rng.binomial(n, pass_prob))
