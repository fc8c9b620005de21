"""Critical-exponent algebra for u_t = Δu - V u + a u^p.

The potential behaves like ``omega / r**2`` at infinity and the reaction
coefficient like ``r**m``.  Everything here is closed form.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field

BORDERLINE_MARGIN = 0.02


class Verdict(str, enum.Enum):
    NO_GLOBAL = "NoGlobal"
    GLOBAL_POSSIBLE = "GlobalPossible"
    HARDY_SUPERCRITICAL = "HardySupercritical"
    BORDERLINE = "Borderline"

    def __str__(self) -> str:
        return self.value


def hardy_threshold(n: float) -> float:
    """Most negative 1/r^2 coefficient for which -Δ + ω/r^2 stays nonnegative."""
    return -((n - 2.0) ** 2) / 4.0


def _positive_part(x: float) -> float:
    return x if x > 0.0 else 0.0


@dataclass(frozen=True)
class PotentialSpec:
    """Potential with 1/r^2 tail ``omega``, regularized as ω/(r² + ε²)."""

    omega: float
    n: float
    regularization_eps: float = 1e-3

    def __post_init__(self):
        if not self.n >= 2:
            raise ValueError(f"dimension n must be >= 2, got {self.n}")
        if not self.regularization_eps > 0:
            raise ValueError("regularization_eps must be positive")

    @property
    def subcritical_hardy(self) -> bool:
        return self.omega >= hardy_threshold(self.n)

    def __call__(self, r):
        return self.omega / (r * r + self.regularization_eps**2)


@dataclass(frozen=True)
class ReactionSpec:
    """Growth exponent ``m`` and the two-sided bounds c1 r^m <= a(r) <= c2 r^m."""

    m: float = 0.0
    c1: float = 1.0
    c2: float | None = None

    def __post_init__(self):
        c2 = self.c1 if self.c2 is None else self.c2
        object.__setattr__(self, "c2", c2)
        if not (self.c1 > 0 and c2 > 0):
            raise ValueError("reaction bounds c1, c2 must be positive")
        if self.c1 > c2:
            raise ValueError(f"need c1 <= c2, got c1={self.c1}, c2={c2}")

    def __call__(self, r):
        # Default concrete coefficient.  For r >= 1 it sits between
        # c1*min(1, 2**(m/2)) r^m and c1*max(1, 2**(m/2)) r^m.
        return self.c1 * (1.0 + r * r) ** (0.5 * self.m)


@dataclass(frozen=True)
class RegimeReport:
    omega: float
    n: float
    m: float
    alpha: float
    p_star: float
    N: float
    M: float
    verdict: Verdict | None = None
    p: float | None = None
    margin: float = math.nan
    borderline: bool = False
    consistent: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "n": self.n,
            "m": self.m,
            "p": self.p,
            "alpha": self.alpha,
            "p_star": self.p_star,
            "N": self.N,
            "M": self.M,
            "verdict": None if self.verdict is None else self.verdict.value,
            "margin": self.margin,
            "borderline": self.borderline,
            "consistent": self.consistent,
        }


def alpha_root(omega: float, n: float) -> float:
    """Larger root of α(α + n - 2) = ω."""
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    disc = (n - 2.0) ** 2 + 4.0 * omega
    if disc < 0:
        raise ValueError(
            f"omega={omega} is below the Hardy threshold {hardy_threshold(n)} for n={n}: "
            "the root is complex"
        )
    sq = math.sqrt(disc)
    # Cancellation-free form of (2 - n + sq)/2 when n > 2 and omega is small.
    if n > 2 and sq > 0:
        return 2.0 * omega / (n - 2.0 + sq)
    return 0.5 * (2.0 - n + sq)


def fujita_flat(n: float, m: float) -> float:
    """Critical exponent 1 + (2+m)^+/n for V = 0."""
    if n < 2:
        raise ValueError(f"dimension n must be >= 2, got {n}")
    return 1.0 + _positive_part(2.0 + m) / n


def effective_dimension(omega: float, n: float) -> float:
    return n + 2.0 * alpha_root(omega, n)


def effective_exponent(omega: float, n: float, m: float, p: float) -> float:
    return alpha_root(omega, n) * (p - 1.0) + m


def fujita_exponent(pot: PotentialSpec, reac: ReactionSpec) -> RegimeReport:
    """p*(ω, m) with the derived N, M.

    M is reported at p = p*, where 1 + (2+M)^+/N reproduces p*.
    Below the Hardy threshold p* is infinite.
    """
    n, omega, m = pot.n, pot.omega, reac.m
    if not pot.subcritical_hardy:
        return RegimeReport(
            omega=omega,
            n=n,
            m=m,
            alpha=math.nan,
            p_star=math.inf,
            N=math.nan,
            M=math.nan,
            verdict=Verdict.HARDY_SUPERCRITICAL,
            notes=("omega below Hardy threshold: no global solutions for any p > 1",),
        )
    alpha = alpha_root(omega, n)
    p_star = 1.0 + _positive_part(2.0 + m) / (n + alpha)
    return RegimeReport(
        omega=omega,
        n=n,
        m=m,
        alpha=alpha,
        p_star=p_star,
        N=n + 2.0 * alpha,
        M=alpha * (p_star - 1.0) + m,
    )


def classify(
    pot: PotentialSpec,
    reac: ReactionSpec,
    p: float,
    margin: float = BORDERLINE_MARGIN,
) -> RegimeReport:
    """Theory verdict for exponent ``p``.

    ``NoGlobal`` iff 1 < p <= p*, ``GlobalPossible`` iff p > p*.  The
    reduced-problem form p <= 1 + (2+M)^+/N is evaluated as well and
    ``consistent`` records whether the two agree.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    base = fujita_exponent(pot, reac)
    if base.verdict is Verdict.HARDY_SUPERCRITICAL:
        return RegimeReport(
            **{**base.__dict__, "p": p, "margin": math.inf},
        )
    alpha, N = base.alpha, base.N
    M = alpha * (p - 1.0) + reac.m
    # p = p* belongs to the blow-up side; 1 + 2/3 and 5/3 differ in the last bit
    no_global = p <= base.p_star + 4.0 * sys.float_info.epsilon * p
    reduced_bound = 1.0 + _positive_part(2.0 + M) / N
    # The equivalence is exact algebra; allow roundoff only at p == p*.
    tol = 1e-12 * max(1.0, abs(p))
    reduced = p <= reduced_bound + tol if no_global else p > reduced_bound - tol
    gap = abs(p - base.p_star)
    return RegimeReport(
        omega=base.omega,
        n=base.n,
        m=base.m,
        alpha=alpha,
        p_star=base.p_star,
        N=N,
        M=M,
        verdict=Verdict.NO_GLOBAL if no_global else Verdict.GLOBAL_POSSIBLE,
        p=p,
        margin=gap,
        borderline=gap < margin,
        consistent=reduced,
    )


def reduced_inequality_holds(omega: float, n: float, m: float, p: float) -> bool:
    """Whether 1 < p <= 1 + (2+M)^+/N with M, N from the change of variables."""
    alpha = alpha_root(omega, n)
    M = alpha * (p - 1.0) + m
    N = n + 2.0 * alpha
    return 1.0 < p <= 1.0 + _positive_part(2.0 + M) / N
