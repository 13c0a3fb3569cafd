"""The logarithmic free-energy density and its scalar companions.

The density is

    Phi(s) = (a0/2) * ((1+s) ln(1+s) + (1-s) ln(1-s)) - (a/2) s^2,  |s| <= 1,

with entropy coefficient a0 and well depth a, 0 < a0 < a.  Its derivative

    phi(s) = (a0/2) ln((1+s)/(1-s)) - a s,
    phi'(s) = a0/(1 - s^2) - a >= -a,

blows up at s = +-1.  The shifted variants phi_tilde(s) = phi(s) + a s
(strictly increasing) and Phi_tilde = Phi + (a/2) s^2 >= 0 isolate the
convex entropy part.  Also provided: the Young pair A(s) = e^s - s - 1,
Atilde(s) = (1+s) ln(1+s) - s with p q <= A(p) + Atilde(q).

Field evaluation near the endpoints clamps to |s| <= 1 - clamp_margin and
records the event; a run that finishes with zero clamp events never came
within clamp_margin of the singularity.  The scalar API distinguishes a
clamp (inside (-1, 1), recorded) from a singularity error (|s| >= 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularityError


@dataclass
class ClampTally:
    """Order-independent count of clamped evaluations."""

    events: int = 0

    def record(self, count: int = 1):
        self.events += int(count)


@dataclass(frozen=True)
class PotentialParams:
    """Coefficients (a0, a) of the logarithmic density plus the clamp margin."""

    alpha0: float
    alpha: float
    clamp_margin: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.alpha0 < self.alpha):
            raise ValueError(
                f"potential requires 0 < alpha0 < alpha, got alpha0={self.alpha0}, alpha={self.alpha}"
            )
        if not (0.0 < self.clamp_margin < 1e-3):
            raise ValueError(f"clamp_margin must lie in (0, 1e-3), got {self.clamp_margin}")


def _clamp_scalar(s: float, p: PotentialParams, tally: ClampTally | None) -> float:
    if abs(s) >= 1.0:
        raise SingularityError(f"phi evaluated at s={s!r}, singular at |s| >= 1")
    limit = 1.0 - p.clamp_margin
    if abs(s) > limit:
        if tally is not None:
            tally.record()
        return math.copysign(limit, s)
    return s


def Phi(s: float, p: PotentialParams) -> float:
    """Free-energy density; finite on [-1, 1] with 0*ln(0) = 0 at the ends."""
    if abs(s) > 1.0:
        raise DomainError(f"Phi is +infinity outside [-1, 1], got s={s!r}")
    sp = 1.0 + s
    sm = 1.0 - s
    ent = (sp * math.log(sp) if sp > 0.0 else 0.0) + (sm * math.log(sm) if sm > 0.0 else 0.0)
    return 0.5 * p.alpha0 * ent - 0.5 * p.alpha * s * s


def phi(s: float, p: PotentialParams, tally: ClampTally | None = None) -> float:
    """Phi'(s) = (a0/2) ln((1+s)/(1-s)) - a s on (-1, 1)."""
    s = _clamp_scalar(float(s), p, tally)
    return 0.5 * p.alpha0 * math.log((1.0 + s) / (1.0 - s)) - p.alpha * s


def phi_prime(s: float, p: PotentialParams, tally: ClampTally | None = None) -> float:
    """Phi''(s) = a0/(1-s^2) - a, bounded below by -a."""
    s = _clamp_scalar(float(s), p, tally)
    return p.alpha0 / (1.0 - s * s) - p.alpha


def phi_tilde(s: float, p: PotentialParams, tally: ClampTally | None = None) -> float:
    """phi(s) - phi(0) + a s = (a0/2) ln((1+s)/(1-s)); strictly increasing."""
    s = _clamp_scalar(float(s), p, tally)
    return 0.5 * p.alpha0 * math.log((1.0 + s) / (1.0 - s))


def Phi_tilde(s: float, p: PotentialParams) -> float:
    """integral_0^s phi_tilde = Phi(s) + (a/2) s^2; nonnegative, zero at 0."""
    return Phi(s, p) + 0.5 * p.alpha * s * s


# ---------------------------------------------------------------------------
# vectorized field evaluation with clamping

def _clamp_values(values: np.ndarray, p: PotentialParams,
                  tally: ClampTally | None, clamp: bool) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    limit = 1.0 - p.clamp_margin
    if clamp:
        over = np.abs(values) > limit
        k = int(np.count_nonzero(over))
        if k and tally is not None:
            tally.record(k)
        return np.clip(values, -limit, limit) if k else values
    if np.any(np.abs(values) >= 1.0):
        worst = float(np.abs(values).max())
        raise SingularityError(f"field reaches |s| = {worst:.6e} >= 1 with clamping disabled")
    return values


def phi_values(values, p: PotentialParams, tally: ClampTally | None = None,
               clamp: bool = True) -> np.ndarray:
    s = _clamp_values(values, p, tally, clamp)
    return 0.5 * p.alpha0 * np.log((1.0 + s) / (1.0 - s)) - p.alpha * s


def phi_prime_values(values, p: PotentialParams, tally: ClampTally | None = None,
                     clamp: bool = True) -> np.ndarray:
    s = _clamp_values(values, p, tally, clamp)
    return p.alpha0 / (1.0 - s * s) - p.alpha


def Phi_values(values, p: PotentialParams, tally: ClampTally | None = None,
               clamp: bool = True) -> np.ndarray:
    # Phi is finite on [-1, 1]; clamping still certifies separation margins.
    s = _clamp_values(values, p, tally, clamp)
    sp = 1.0 + s
    sm = 1.0 - s
    ent = np.where(sp > 0, sp * np.log(np.where(sp > 0, sp, 1.0)), 0.0)
    ent += np.where(sm > 0, sm * np.log(np.where(sm > 0, sm, 1.0)), 0.0)
    return 0.5 * p.alpha0 * ent - 0.5 * p.alpha * s * s


# ---------------------------------------------------------------------------
# Young pair

def young_A(s: float) -> float:
    """A(s) = e^s - s - 1 for s >= 0."""
    if s < 0:
        raise DomainError(f"young_A requires s >= 0, got {s!r}")
    return math.expm1(s) - s


def young_Atilde(s: float) -> float:
    """Atilde(s) = (1+s) ln(1+s) - s for s >= 0."""
    if s < 0:
        raise DomainError(f"young_Atilde requires s >= 0, got {s!r}")
    return (1.0 + s) * math.log1p(s) - s


# ---------------------------------------------------------------------------
# growth-assumption verification

@dataclass
class AssumptionReport:
    passed: bool
    n_samples: int
    worst_growth_margin: float   # min over samples of bound(s) - |phi'(s)|
    worst_growth_s: float
    worst_lower_margin: float    # min over samples of phi'(s) + alpha
    worst_lower_s: float

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"assumption check {status}: {self.n_samples} samples, "
                f"growth margin {self.worst_growth_margin:.6e} at s={self.worst_growth_s:.12f}, "
                f"lower margin {self.worst_lower_margin:.6e} at s={self.worst_lower_s:.12f}")


def assumption_samples(n_samples: int) -> np.ndarray:
    """Sample points in (-1, 1) with logarithmic refinement toward +-1.

    Half the budget is uniform; the rest places s = +-(1 - 10^-u) with u
    spread over [0.31, 9] so the closest samples sit at 1 - |s| = 1e-9.
    """
    n_uniform = n_samples // 2
    n_edge = (n_samples - n_uniform) // 2
    uniform = np.linspace(-0.999, 0.999, max(n_uniform, 3))
    u = np.linspace(0.31, 9.0, max(n_edge, 3))
    edge = 1.0 - 10.0 ** (-u)
    return np.unique(np.concatenate([uniform, edge, -edge]))


def assumption_check(p: PotentialParams, n_samples: int = 10**6) -> AssumptionReport:
    """Verify |phi'| <= exp((2/a0)|phi| + 2a/a0 + ln a0) + a and phi' >= -a.

    Both bounds hold for every valid parameter pair; a failure indicates a
    broken implementation and is reported with the witness sample.
    """
    s = assumption_samples(n_samples)
    ph = phi_values(s, p, clamp=False)
    dph = phi_prime_values(s, p, clamp=False)

    log_bound = (2.0 / p.alpha0) * np.abs(ph) + 2.0 * p.alpha / p.alpha0 + math.log(p.alpha0)
    # compare in log space: exp() overflows near the endpoints, the bound only grows
    with np.errstate(over="ignore"):
        growth_margin = np.where(
            log_bound > 700.0,
            np.inf,
            np.exp(np.minimum(log_bound, 700.0)) + p.alpha - np.abs(dph),
        )
    lower_margin = dph + p.alpha

    ig = int(np.argmin(growth_margin))
    il = int(np.argmin(lower_margin))
    passed = bool(growth_margin[ig] >= 0.0 and lower_margin[il] > 0.0)
    return AssumptionReport(
        passed=passed,
        n_samples=len(s),
        worst_growth_margin=float(growth_margin[ig]),
        worst_growth_s=float(s[ig]),
        worst_lower_margin=float(lower_margin[il]),
        worst_lower_s=float(s[il]),
    )
