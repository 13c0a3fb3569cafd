"""Scalar observables, energy identities, and empirical inequality monitors.

The Lyapunov functional of the flow is

    E(theta) = int (kappa/2 |grad theta|^2 + kappa^-1 Phi(theta)) dx,

and the discrete energy law couples its decrement to the dissipation
D = m ||grad mu||^2 + int 2 nu(theta) |Du|^2 dx.  Integrals of compositions
with the logarithmic density (Phi, phi, phi') are evaluated by collocation
quadrature on an oversampled grid (default 4x), since those integrands are
not band-limited; gradient norms come from Parseval directly.

Inequalities whose constants are existential (exponential-integrability and
the L-infinity interpolation bound) are monitored as empirical ratios over
declared sample families and checked only for boundedness and stability,
never against an invented constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from . import spectral as sp
from .dynamics import SchemeConfig, SimState, chemical_potential
from .errors import PreconditionError
from .potential import (ClampTally, Phi_values, PotentialParams,
                        phi_prime_values, phi_values)
from .spectral import ScalarField, VectorField

TWO_PI = 2.0 * np.pi


@dataclass
class DiagnosticsRecord:
    """Per-sample scalars; field order fixes the CSV column order."""

    t: float
    mass: float
    e_kin: float
    e_free: float
    e_total: float
    dissipation: float
    theta_min: float
    theta_max: float
    delta: float
    grad_mu_l2: float
    mean_phi: float
    sobolev_h1_theta: float
    sobolev_h1_u: float
    d0eps_norm: float
    clamp_events: int
    energy_residual: float


RECORD_FIELDS = tuple(f.name for f in fields(DiagnosticsRecord))


def _quad_mean(values: np.ndarray) -> float:
    """Collocation average; integral = (2pi)^2 * average."""
    return float(np.mean(values))


def free_energy(theta: ScalarField, cfg: SchemeConfig, tally: ClampTally | None = None,
                oversample: int = 4) -> float:
    """(kappa/2) ||grad theta||_L2^2 + kappa^-1 int Phi(theta) dx."""
    grad_sq = sp.l2_norm(sp.derivative(theta, 1))**2 + sp.l2_norm(sp.derivative(theta, 2))**2
    vals = sp.values_oversampled(theta, oversample)
    phi_part = TWO_PI**2 * _quad_mean(Phi_values(vals, cfg.potential, tally, clamp=cfg.clamp))
    return 0.5 * cfg.kappa * grad_sq + phi_part / cfg.kappa


def kinetic_energy(u: VectorField) -> float:
    return 0.5 * (sp.l2_norm(u.u1)**2 + sp.l2_norm(u.u2)**2)


def dissipation(theta: ScalarField, u: VectorField, cfg: SchemeConfig,
                tally: ClampTally | None = None, oversample: int = 4) -> tuple[float, float]:
    """(D, ||grad mu||_L2) with D = m ||grad mu||^2 + int 2 nu(theta)|Du|^2."""
    mu = chemical_potential(theta, cfg, tally)
    grad_mu = math.sqrt(sp.l2_norm(sp.derivative(mu, 1))**2 + sp.l2_norm(sp.derivative(mu, 2))**2)
    d11 = sp.values_oversampled(sp.derivative(u.u1, 1), oversample)
    d22 = sp.values_oversampled(sp.derivative(u.u2, 2), oversample)
    d12 = 0.5 * (sp.values_oversampled(sp.derivative(u.u1, 2), oversample)
                 + sp.values_oversampled(sp.derivative(u.u2, 1), oversample))
    du_sq = d11**2 + d22**2 + 2.0 * d12**2
    nu = cfg.viscosity.evaluate(sp.values_oversampled(theta, oversample))
    visc = TWO_PI**2 * _quad_mean(2.0 * nu * du_sq)
    return cfg.mobility * grad_mu**2 + visc, grad_mu


def energy_law_residual(state_n: SimState, state_np1: SimState, cfg: SchemeConfig,
                        tally: ClampTally | None = None, oversample: int = 4) -> float:
    """|(E_total(n+1) - E_total(n))/dt + D(n+1)| for consecutive states."""
    if abs((state_np1.t - state_n.t) - cfg.dt) > 1e-9 * max(1.0, abs(state_np1.t)):
        raise PreconditionError(
            f"states are {state_np1.t - state_n.t} apart, expected dt = {cfg.dt}"
        )
    e_n = free_energy(state_n.theta, cfg, tally, oversample) + kinetic_energy(state_n.u)
    e_np1 = free_energy(state_np1.theta, cfg, tally, oversample) + kinetic_energy(state_np1.u)
    d_np1, _ = dissipation(state_np1.theta, state_np1.u, cfg, tally, oversample)
    return abs((e_np1 - e_n) / cfg.dt + d_np1)


# ---------------------------------------------------------------------------
# composite norm for the regularized equation

def d0_eps_components(theta: ScalarField, eps: float, cfg: SchemeConfig,
                      tally: ClampTally | None = None) -> tuple[float, float, float, float]:
    """The four nonnegative summands of the composite norm squared:

    ||f||_H2^2, ||phi(f)||_L2^2, eps ||psi||_L2^2, ||psi||_Hdot-1^2,
    with psi = (eps + (-Lap)^-1)^-1 [Lap f - phi(f) + m(phi(f))].

    Everything is evaluated spectrally from the collocation values of
    phi(f); the operator acts as the multiplier (eps + 1/|n|^2)^-1 on the
    mean-zero bracket.
    """
    if eps < 0.0:
        raise PreconditionError(f"eps must be nonnegative, got {eps}")
    g = theta.grid
    m = abs(complex(theta.coeffs[0, 0]))
    if m > 1e-10 * max(1.0, sp.l2_norm(theta)):
        raise PreconditionError(f"d0_eps_norm requires mean-zero input, mean = {m:.3e}")

    phi_hat = np.fft.fft2(phi_values(theta.values(), cfg.potential, tally, clamp=cfg.clamp)) / g.n**2
    h2_sq = sp.sobolev_norm(theta, 2.0)**2
    phi_l2_sq = TWO_PI**2 * float(np.sum(np.abs(phi_hat)**2))

    bracket = -g.k_sq * theta.coeffs - phi_hat
    bracket = bracket.copy()
    bracket[0, 0] = 0.0  # m(phi(f)) cancels the zero mode exactly
    inv_ksq = np.where(g.k_sq > 0, g.inv_k_sq, 1.0)
    multiplier = np.where(g.k_sq > 0, 1.0 / (eps + inv_ksq), 0.0)
    psi = bracket * multiplier
    psi_l2_sq = TWO_PI**2 * float(np.sum(np.abs(psi)**2))
    psi_hm1_sq = TWO_PI**2 * float(np.sum(g.inv_k_sq * np.abs(psi)**2))
    return h2_sq, phi_l2_sq, eps * psi_l2_sq, psi_hm1_sq


def d0_eps_norm(theta: ScalarField, eps: float, cfg: SchemeConfig,
                tally: ClampTally | None = None) -> float:
    return math.sqrt(sum(d0_eps_components(theta, eps, cfg, tally)))


# ---------------------------------------------------------------------------
# identity and integrability checks

@dataclass
class MeanPhiReport:
    identity_residual: float   # |int phi(theta) theta - int f theta|
    ratio: float               # |m(phi(theta))| / (||f||_L1 + 1)
    mean_phi: float
    f_l1: float


def mean_phi_check(theta: ScalarField, p: PotentialParams, oversample: int = 4,
                   tally: ClampTally | None = None) -> MeanPhiReport:
    """Check int phi(theta) theta dx = int f theta dx with f = phi(theta) - m(phi(theta)).

    The identity is forced by int theta = 0; the residual measures only
    quadrature round-off.  The ratio against ||f||_L1 + 1 is reported as an
    empirical constant, never asserted.
    """
    m = abs(complex(theta.coeffs[0, 0]))
    if m > 1e-10 * max(1.0, sp.l2_norm(theta)):
        raise PreconditionError(f"mean_phi_check requires mean-zero input, mean = {m:.3e}")
    vals = sp.values_oversampled(theta, oversample)
    if np.abs(vals).max() > 1.0 + 1e-12:
        raise PreconditionError("mean_phi_check requires |theta|_inf <= 1")
    ph = phi_values(vals, p, tally)
    area_el = TWO_PI**2 / vals.size
    mean_phi = float(np.mean(ph))
    f = ph - mean_phi
    lhs = float(np.sum(ph * vals) * area_el)
    rhs = float(np.sum(f * vals) * area_el)
    f_l1 = float(np.sum(np.abs(f)) * area_el)
    return MeanPhiReport(
        identity_residual=abs(lhs - rhs),
        ratio=abs(mean_phi) / (f_l1 + 1.0),
        mean_phi=mean_phi,
        f_l1=f_l1,
    )


def phi_prime_lp(thetas, times, p_exponent: float, params: PotentialParams,
                 oversample: int = 4, tally: ClampTally | None = None) -> float:
    """Trapezoidal-in-time, collocation-in-space int_0^T int |phi'(theta)|^p dx dt."""
    if not (1.0 <= p_exponent < math.inf):
        raise ValueError(f"exponent must lie in [1, inf), got {p_exponent}")
    times = np.asarray(times, dtype=float)
    if len(thetas) != len(times) or len(times) < 2:
        raise ValueError("need matching theta samples and times, at least two")
    space = []
    for th in thetas:
        vals = sp.values_oversampled(th, oversample)
        integrand = np.abs(phi_prime_values(vals, params, tally)) ** p_exponent
        space.append(TWO_PI**2 * _quad_mean(integrand))
    return float(np.trapezoid(np.asarray(space), times))


# ---------------------------------------------------------------------------
# empirical inequality monitors

def orlicz_ratio(v: ScalarField, beta: float, oversample: int = 4) -> float:
    """log(int e^{beta |v|} dx) / (1 + ||v||_H1^2), overflow-guarded."""
    vals = beta * np.abs(sp.values_oversampled(v, oversample))
    peak = float(vals.max())
    # log-sum-exp: log sum e^x = peak + log sum e^(x - peak)
    log_integral = peak + math.log(float(np.sum(np.exp(vals - peak)))) \
        + 2.0 * math.log(TWO_PI / vals.shape[0])
    return log_integral / (1.0 + sp.sobolev_norm(v, 1.0)**2)


def log_sobolev_ratio(f: ScalarField, s: float, oversample: int = 1) -> float:
    """||f||_inf / ((1 + ||f||_H1) log^(1/2)(e + ||f||_Hs)); requires s > 1."""
    if s <= 1.0:
        raise ValueError(f"log_sobolev_ratio requires s > 1, got {s}")
    linf = sp.linf_norm(f, oversample)
    h1 = sp.sobolev_norm(f, 1.0)
    hs = sp.sobolev_norm(f, s)
    return linf / ((1.0 + h1) * math.sqrt(math.log(math.e + hs)))


# ---------------------------------------------------------------------------
# per-sample record assembly

def diagnostics_record(state: SimState, prev_state: SimState | None, cfg: SchemeConfig,
                       linf_oversample: int = 1, quad_oversample: int = 4) -> DiagnosticsRecord:
    theta, u = state.theta, state.u
    tally = state.clamp_tally
    vals = sp.values_oversampled(theta, linf_oversample)
    theta_min = float(vals.min())
    theta_max = float(vals.max())
    e_kin = kinetic_energy(u)
    e_free = free_energy(theta, cfg, tally, quad_oversample)
    d_total, grad_mu = dissipation(theta, u, cfg, tally, quad_oversample)
    mean_phi = float(np.mean(phi_values(sp.values_oversampled(theta, quad_oversample),
                                        cfg.potential, tally, clamp=cfg.clamp)))
    if prev_state is not None:
        residual = energy_law_residual(prev_state, state, cfg, tally, quad_oversample)
    else:
        residual = 0.0
    return DiagnosticsRecord(
        t=state.t,
        mass=sp.mean(theta),
        e_kin=e_kin,
        e_free=e_free,
        e_total=e_kin + e_free,
        dissipation=d_total,
        theta_min=theta_min,
        theta_max=theta_max,
        delta=1.0 - max(abs(theta_min), abs(theta_max)),
        grad_mu_l2=grad_mu,
        mean_phi=mean_phi,
        sobolev_h1_theta=sp.sobolev_norm(theta, 1.0),
        sobolev_h1_u=math.sqrt(sp.sobolev_norm(u.u1, 1.0)**2 + sp.sobolev_norm(u.u2, 1.0)**2),
        d0eps_norm=d0_eps_norm(theta, cfg.epsilon, cfg, tally),
        clamp_events=tally.events,
        energy_residual=residual,
    )
