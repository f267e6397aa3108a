"""Min/max entropies, their duality closed forms, and the n-path guessing-game quantities.

All logarithms are base 2; every entropy is in bits.  The binary identities
this module is built around (c = |2p - 1| for a normalized pair (p, 1 - p)):

    h_min((p, 1-p))  =  -log2((1 + c) / 2)
    h_max((p, 1-p))  =  log2(1 + sqrt(1 - c^2))

are exact, which is what makes the entropy-definition route and the
visibility/distinguishability closed-form route interchangeable for binary
data.  The closed-form helpers accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .states import ProbDist
from .tolerances import ATOL_ALGEBRAIC, INEQ_SLACK


def h_min(dist: ProbDist) -> float:
    """Unconditional min-entropy -log2(max_j p_j) of a normalized distribution."""
    if not dist.normalized:
        raise ContractViolation("min-entropy requires a normalized distribution")
    return float(-np.log2(np.max(dist.probs)) + 0.0)


def h_max(dist: ProbDist) -> float:
    """Unconditional max-entropy 2 log2(sum_j sqrt(p_j)); zero outcomes contribute 0."""
    if not dist.normalized:
        raise ContractViolation("max-entropy requires a normalized distribution")
    return float(2.0 * np.log2(np.sum(np.sqrt(dist.probs))))


def h_min_binary(p):
    """Min-entropy of the binary pair (p, 1-p); vectorized."""
    p = np.asarray(p, dtype=np.float64)
    _check_unit_range("p", p)
    out = -np.log2(np.maximum(p, 1.0 - p)) + 0.0
    return float(out) if out.ndim == 0 else out


def h_max_binary(p):
    """Max-entropy of the binary pair (p, 1-p); vectorized."""
    p = np.asarray(p, dtype=np.float64)
    _check_unit_range("p", p)
    out = 2.0 * np.log2(np.sqrt(p) + np.sqrt(1.0 - p))
    return float(out) if out.ndim == 0 else out


def h_min_from_distinguishability(d):
    """Particle-side closed form -log2((1 + D)/2); strictly decreasing on [0, 1]."""
    d = np.asarray(d, dtype=np.float64)
    _check_unit_range("distinguishability", d)
    out = -np.log2(0.5 * (1.0 + d)) + 0.0
    return float(out) if out.ndim == 0 else out


def h_max_from_visibility(v):
    """Wave-side closed form log2(1 + sqrt(1 - V^2)), the phase-optimized max-entropy.

    The radicand is evaluated as (1 - V)(1 + V) to stay accurate near V = 1.
    """
    v = np.asarray(v, dtype=np.float64)
    _check_unit_range("visibility", v)
    radicand = np.maximum((1.0 - v) * (1.0 + v), 0.0)
    out = np.log2(1.0 + np.sqrt(radicand))
    return float(out) if out.ndim == 0 else out


def eur_check(h_min_z: float, h_max_w: float, n: int = 2, slack: float = INEQ_SLACK):
    """Entropic uncertainty bound: returns (sum, sum >= log2(n) - slack).

    The sum of ignorance about the path variable and the optimal fringe
    variable is at least log2(n) bits for any physical n-path input; a False
    flag on physically generated numbers signals a bug upstream.
    """
    bound = math.log2(n)
    for name, h in (("h_min_z", h_min_z), ("h_max_w", h_max_w)):
        if not (-ATOL_ALGEBRAIC <= h <= bound + INEQ_SLACK):
            raise ContractViolation(f"{name} = {h} outside [0, log2 n]")
    total = h_min_z + h_max_w
    return total, bool(total >= bound - slack)


def wpdr_check(d: float, v: float, slack: float = INEQ_SLACK):
    """Duality trade-off: returns (D^2 + V^2, value <= 1 + slack)."""
    _check_unit_range("distinguishability", np.asarray(d, dtype=np.float64))
    _check_unit_range("visibility", np.asarray(v, dtype=np.float64))
    value = d * d + v * v
    return value, bool(value <= 1.0 + slack)


@dataclass(frozen=True)
class GuessingInput:
    """Success probability of an n-outcome guessing game."""

    p_guess: float
    n: int = 2

    def __post_init__(self):
        if self.n < 2:
            raise ContractViolation(f"path count must be >= 2, got {self.n}")
        if not (1.0 / self.n - ATOL_ALGEBRAIC <= self.p_guess <= 1.0 + ATOL_ALGEBRAIC):
            raise ContractViolation(
                f"p_guess = {self.p_guess} outside [1/{self.n}, 1]"
            )


def _affine_guessing_score(g: GuessingInput) -> float:
    # (n p - 1)/(n - 1): 0 at uniform guessing, 1 at certainty.
    return (g.n * g.p_guess - 1.0) / (g.n - 1.0)


def visibility_from_guessing(g: GuessingInput) -> float:
    """Generalized n-path fringe visibility from the phase-guessing game.

    At n = 2 this reduces to 2 p_guess - 1.
    """
    return _affine_guessing_score(g)


def distinguishability_from_guessing(g: GuessingInput) -> float:
    """Generalized n-path distinguishability from the which-path guessing game.

    Same affine map as :func:`visibility_from_guessing`; kept as a distinct
    operation because it consumes a different game.
    """
    return _affine_guessing_score(g)


def h_max_guessing_bound(g: GuessingInput) -> float:
    """Upper bound log2(1 + sqrt((n-1)^2 - (n p_guess - 1)^2)) on the max-entropy.

    Factored as n(1-p) * (n(1+p) - 2) before the square root; at n = 2 this
    equals h_max_from_visibility(2 p_guess - 1).
    """
    radicand = g.n * (1.0 - g.p_guess) * (g.n * (1.0 + g.p_guess) - 2.0)
    if radicand < -ATOL_ALGEBRAIC:
        raise ContractViolation(f"negative radicand {radicand} for {g}")
    return math.log2(1.0 + math.sqrt(max(radicand, 0.0)))


@dataclass(frozen=True)
class DualityQuantities:
    """One setting's duality scorecard: V, D, entropies, bound sums."""

    v: float
    d: float
    h_min_z: float
    h_max_w: float
    eur_sum: float
    wpdr_value: float
    eur_satisfied: bool
    wpdr_satisfied: bool
    n: int = 2

    def __post_init__(self):
        for name, x in (("v", self.v), ("d", self.d)):
            if not (-ATOL_ALGEBRAIC <= x <= 1.0 + ATOL_ALGEBRAIC):
                raise ContractViolation(f"{name} = {x} outside [0, 1]")
        if abs(self.eur_sum - (self.h_min_z + self.h_max_w)) > ATOL_ALGEBRAIC:
            raise ContractViolation("eur_sum must equal h_min_z + h_max_w")


def duality_from_v_d(v: float, d: float, n: int = 2, slack: float = INEQ_SLACK) -> DualityQuantities:
    """Evaluate both closed forms and both bound predicates for measured (V, D)."""
    hz = h_min_from_distinguishability(d)
    hw = h_max_from_visibility(v)
    eur_sum, eur_ok = eur_check(hz, hw, n=n, slack=slack)
    wpdr_value, wpdr_ok = wpdr_check(d, v, slack=slack)
    return DualityQuantities(
        v=float(v), d=float(d), h_min_z=hz, h_max_w=hw,
        eur_sum=eur_sum, wpdr_value=wpdr_value,
        eur_satisfied=eur_ok, wpdr_satisfied=wpdr_ok, n=n,
    )


def _check_unit_range(name: str, x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ContractViolation(f"{name} must be finite")
    if np.any(x < -ATOL_ALGEBRAIC) or np.any(x > 1.0 + ATOL_ALGEBRAIC):
        raise ContractViolation(f"{name} outside [0, 1]")
