"""Problem description, solver configuration and outcome types."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..exponents import PotentialSpec, ReactionSpec


@dataclass(frozen=True)
class WholeSpace:
    """R^n with the symmetry condition at r = 0."""

    kind: str = field(default="whole", init=False)


@dataclass(frozen=True)
class Exterior:
    """{|x| > r0} with homogeneous Dirichlet data on |x| = r0."""

    r0: float = 1.0
    kind: str = field(default="exterior", init=False)

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError(f"exterior radius must be positive, got {self.r0}")


Geometry = Union[WholeSpace, Exterior]


@dataclass(frozen=True)
class InitialData:
    """Gaussian bump amplitude * exp(-(r - center)² / width²)."""

    amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if self.center < 0:
            raise ValueError("center must be >= 0")
        if not self.width > 0:
            raise ValueError("width must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.amplitude * np.exp(-((r - self.center) ** 2) / self.width**2)


@dataclass(frozen=True)
class ProblemSpec:
    """u_t = u_rr + (d-1)/r u_r - V(r) u + a(r) r^kappa u^p.

    d is ``pot.n``.  ``kappa`` is zero for the original equation and
    α(p-1) for the equation satisfied by v = r^{-α} u.  ``linear`` drops the
    reaction (a ≡ 0).
    """

    pot: PotentialSpec
    reac: ReactionSpec
    p: float
    geometry: Geometry = field(default_factory=WholeSpace)
    initial: InitialData = field(default_factory=InitialData)
    linear: bool = False
    kappa: float = 0.0

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")

    @property
    def dimension(self) -> float:
        return self.pot.n

    @property
    def exterior(self) -> bool:
        return isinstance(self.geometry, Exterior)

    @property
    def r_lo(self) -> float:
        return self.geometry.r0 if self.exterior else 0.0

    def reaction(self, r):
        """Concrete coefficient multiplying u^p."""
        r = np.asarray(r, dtype=float)
        if self.linear:
            return np.zeros_like(r)
        out = self.reac(r)
        if self.kappa != 0.0:
            out = out * r**self.kappa
        return out


FRAMES = ("auto", "physical", "similarity")


@dataclass(frozen=True)
class SolverConfig:
    """Numerical controls.

    ``decay_window`` is the trailing fraction of [0, t_max] over which a
    global run must decay.  The similarity frame (ξ = r/√(1+t),
    τ = log(1+t)) uses ``xi_max`` and ``xi_points``; it is the default for
    whole-space runs longer than ``similarity_after``.
    """

    r_max: float = 60.0
    grid_points: int = 1201
    dt_init: float = 1e-3
    dt_max: float = math.inf
    dt_min: float = 1e-20
    blowup_threshold: float = 1e8
    decay_window: float = 0.2
    t_max: float = 100.0
    frame: str = "auto"
    xi_max: float = 20.0
    xi_points: int = 801
    similarity_after: float = 10.0
    positivity_cap: bool = True
    reaction_tol: float = 0.1
    max_steps: int = 20_000_000

    def __post_init__(self):
        if self.grid_points < 5 or self.xi_points < 5:
            raise ValueError("need at least 5 grid points")
        if not (0 < self.dt_min <= self.dt_init):
            raise ValueError("need 0 < dt_min <= dt_init")
        if not 0 < self.decay_window < 1:
            raise ValueError("decay_window is a fraction in (0, 1)")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}")
        if not self.blowup_threshold > 0:
            raise ValueError("blowup_threshold must be positive")


class Verdict(str, enum.Enum):
    BLOWUP = "BlowUp"
    GLOBAL = "Global"
    UNDETERMINED = "Undetermined"

    def __str__(self) -> str:
        return self.value


class SolverError(RuntimeError):
    """Configuration problem detected while marching (e.g. dt underflow)."""


@dataclass(frozen=True)
class Snapshot:
    t: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SolveOutcome:
    verdict: Verdict
    blowup_time: float | None
    t: np.ndarray = field(repr=False)
    sup_norm: np.ndarray = field(repr=False)
    dt: np.ndarray = field(repr=False)
    snapshots: tuple[Snapshot, ...] = field(default=(), repr=False)
    evidence: dict = field(default_factory=dict)
    frame: str = "physical"
    policy_undetermined: bool = False
    raw_verdict: Verdict | None = None
    warnings: tuple[str, ...] = ()

    def snapshot(self, t: float) -> Snapshot:
        for s in self.snapshots:
            if math.isclose(s.t, t, rel_tol=1e-9, abs_tol=1e-12):
                return s
        raise KeyError(f"no snapshot at t={t}")
