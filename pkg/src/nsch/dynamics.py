"""Time integration of the coupled velocity / order-parameter system.

The order parameter theta follows a convective Cahn-Hilliard equation with
chemical potential mu = kappa^-1 phi(theta) - kappa Lap(theta); adding the
optional term -eps d/dt Lap(theta) (eps > 0) turns it into the second-order
regularization used by the comparison-principle diagnostics.  The velocity
follows incompressible Navier-Stokes with variable viscosity nu(theta) and
the capillary (Korteweg) force mu grad(theta); pressure is never formed,
the Leray projection removes it.

Both sub-steps are diagonal in Fourier space:

* theta-step: stiff linear terms (bilaplacian, eps-term) implicit, phi(theta)
  explicit with the stabilization S Lap(theta^{n+1} - theta^n).  S defaults
  to 2 alpha, which dominates the concave part of the density since
  phi' >= -alpha.
* u-step: constant-coefficient viscosity nu_min implicit, the remaining
  div(2 (nu(theta) - nu_min) Du), convection and force explicit.

Coupling is lagged (theta first, then u from the old fields), so each
implicit operator stays a Fourier multiplier.  Zero modes of theta and u
are copied across each step exactly: the mass of theta and the mean
momentum are conserved to the bit.

Nonlinear terms are evaluated pointwise and dealiased with the 2/3-rule
mask; ``run`` masks the initial data so the whole trajectory stays in the
alias-free subspace.  The optional spherical cutoff ``galerkin_n`` further
truncates states and right-hand sides to the ball |n| <= galerkin_n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral as sp
from .errors import PreconditionError, StabilityWarning
from .potential import ClampTally, PotentialParams, phi_values
from .spectral import Grid, ScalarField, VectorField


@dataclass(frozen=True)
class ViscosityModel:
    """nu(theta), either constant or affine nu_a + nu_b * theta.

    Positivity on the physical range [-1, 1] requires nu_a - |nu_b| > 0.
    """

    kind: str = "constant"
    nu_a: float = 1.0
    nu_b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "affine"):
            raise ValueError(f"viscosity kind must be 'constant' or 'affine', got {self.kind!r}")
        if self.kind == "constant" and self.nu_b != 0.0:
            raise ValueError("constant viscosity must have nu_b = 0")
        if self.nu_min() <= 0.0:
            raise ValueError(
                f"viscosity must be positive on [-1, 1]: nu_a - |nu_b| = {self.nu_min()} <= 0"
            )

    def nu_min(self) -> float:
        return self.nu_a - abs(self.nu_b)

    def evaluate(self, theta_values: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full_like(theta_values, self.nu_a)
        return self.nu_a + self.nu_b * theta_values


@dataclass(frozen=True)
class SchemeConfig:
    """Everything the stepper needs besides the state itself."""

    dt: float
    potential: PotentialParams
    viscosity: ViscosityModel = ViscosityModel()
    S: float | None = None          # stabilization constant, default 2*alpha
    epsilon: float = 0.0            # eps of the second-order regularization
    galerkin_n: int | None = None   # spherical mode cutoff, None = off
    kappa: float = 1.0
    mobility: float = 1.0
    clamp: bool = True
    couple_force: bool = True   # False switches the capillary force off

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.kappa <= 0.0 or self.mobility <= 0.0:
            raise ValueError("kappa and mobility must be positive")
        if self.galerkin_n is not None and self.galerkin_n < 1:
            raise ValueError(f"galerkin_n must be a positive integer, got {self.galerkin_n}")
        if self.S is None:
            object.__setattr__(self, "S", 2.0 * self.potential.alpha)
        elif self.S < self.potential.alpha:
            warnings.warn(
                f"stabilization S={self.S} below alpha={self.potential.alpha}; "
                "energy monotonicity is not expected",
                StabilityWarning,
                stacklevel=2,
            )
        if self.S < 0.0:
            raise ValueError(f"S must be nonnegative, got {self.S}")


@dataclass
class SimState:
    """Evolving solution: time, order parameter, velocity, step bookkeeping.

    ``prev_theta`` holds the previous step's order parameter for backward
    time differences.  Event counters accumulate over a stepping sequence.
    """

    t: float
    theta: ScalarField
    u: VectorField
    step: int = 0
    prev_theta: ScalarField | None = None
    clamp_tally: ClampTally = field(default_factory=ClampTally)
    linf_violations: int = 0
    cfl_warnings: int = 0

    def __post_init__(self):
        if self.prev_theta is None:
            self.prev_theta = self.theta

    @property
    def grid(self) -> Grid:
        return self.theta.grid


def _phi_spectrum(theta: ScalarField, cfg: SchemeConfig, tally: ClampTally | None) -> ScalarField:
    """Dealiased transform of phi(theta) evaluated on the collocation grid."""
    vals = phi_values(theta.values(), cfg.potential, tally, clamp=cfg.clamp)
    f = sp.dealias(ScalarField(theta.grid, np.fft.fft2(vals) / theta.grid.n**2))
    if cfg.galerkin_n is not None:
        f = sp.cutoff(f, cfg.galerkin_n)
    return f


def chemical_potential(theta: ScalarField, cfg: SchemeConfig,
                       tally: ClampTally | None = None) -> ScalarField:
    """mu = kappa^-1 * dealias(phi(theta)) - kappa * Lap(theta)."""
    phi_f = _phi_spectrum(theta, cfg, tally)
    return (1.0 / cfg.kappa) * phi_f - cfg.kappa * sp.laplacian(theta)


def korteweg_force(theta: ScalarField, mu: ScalarField, oversample: int = 1) -> VectorField:
    """Leray projection of mu grad(theta)."""
    if oversample == 1:
        f1 = sp.dealias_product(mu, sp.derivative(theta, 1))
        f2 = sp.dealias_product(mu, sp.derivative(theta, 2))
    else:
        f1 = sp.padded_product(mu, sp.derivative(theta, 1), oversample)
        f2 = sp.padded_product(mu, sp.derivative(theta, 2), oversample)
    return sp.leray_project(VectorField(f1, f2))


def korteweg_force_divergence_form(theta: ScalarField, kappa: float = 1.0,
                                   oversample: int = 1) -> VectorField:
    """Leray projection of -kappa div(grad(theta) x grad(theta)).

    Agrees with ``korteweg_force`` up to dealiasing error: the two forms
    differ by a gradient, which the projection removes.
    """
    g1 = sp.derivative(theta, 1)
    g2 = sp.derivative(theta, 2)
    if oversample == 1:
        t11 = sp.dealias_product(g1, g1)
        t12 = sp.dealias_product(g1, g2)
        t22 = sp.dealias_product(g2, g2)
    else:
        t11 = sp.padded_product(g1, g1, oversample)
        t12 = sp.padded_product(g1, g2, oversample)
        t22 = sp.padded_product(g2, g2, oversample)
    f1 = (sp.derivative(t11, 1) + sp.derivative(t12, 2)) * (-kappa)
    f2 = (sp.derivative(t12, 1) + sp.derivative(t22, 2)) * (-kappa)
    return sp.leray_project(VectorField(f1, f2))


def korteweg_identity_error(theta: ScalarField, p: PotentialParams, kappa: float = 1.0,
                            oversample: int = 4) -> float:
    """L2 distance between the two projected force forms at fine resolution.

    Embeds theta into an (oversample*N)^2 grid, assembles P(mu grad theta)
    and P(-kappa div(grad theta x grad theta)) there with unmasked products,
    and measures the difference.  The continuum forms differ by a gradient,
    so the residual is pure aliasing of the smooth-composition tail.
    """
    g = theta.grid
    m = oversample * g.n
    fine = Grid(m, dealias_cut=m // 2)
    theta_f = ScalarField(fine, sp._embed_spectrum(theta.coeffs, g.n, m))
    phi_f = sp.transform(phi_values(theta_f.values(), p), fine)
    mu_f = (1.0 / kappa) * phi_f - kappa * sp.laplacian(theta_f)
    g1 = sp.derivative(theta_f, 1)
    g2 = sp.derivative(theta_f, 2)

    def product(a, b):
        return sp.transform(a.values() * b.values(), fine)

    form_grad = sp.leray_project(VectorField(product(mu_f, g1), product(mu_f, g2)))
    t11, t12, t22 = product(g1, g1), product(g1, g2), product(g2, g2)
    form_div = sp.leray_project(VectorField(
        (sp.derivative(t11, 1) + sp.derivative(t12, 2)) * (-kappa),
        (sp.derivative(t12, 1) + sp.derivative(t22, 2)) * (-kappa),
    ))
    diff = form_grad - form_div
    return math.sqrt(sp.l2_norm(diff.u1)**2 + sp.l2_norm(diff.u2)**2)


def _convection_spectrum(theta: ScalarField, u: VectorField, cfg: SchemeConfig) -> ScalarField:
    """div(u theta) in spectral form (conservative convection, div u = 0)."""
    conv = sp.derivative(sp.dealias_product(u.u1, theta), 1) \
        + sp.derivative(sp.dealias_product(u.u2, theta), 2)
    if cfg.galerkin_n is not None:
        conv = sp.cutoff(conv, cfg.galerkin_n)
    return conv


def _ch_update(theta: ScalarField, u: VectorField, phi_f: ScalarField,
               cfg: SchemeConfig) -> ScalarField:
    g = theta.grid
    k2 = g.k_sq
    dt, m, kap = cfg.dt, cfg.mobility, cfg.kappa
    conv = _convection_spectrum(theta, u, cfg)
    denom = 1.0 + cfg.epsilon * k2 + dt * m * (kap * k2**2 + cfg.S * k2)
    numer = (1.0 + cfg.epsilon * k2) * theta.coeffs \
        + dt * m * (cfg.S * k2 * theta.coeffs - k2 * phi_f.coeffs / kap) \
        - dt * conv.coeffs
    new = numer / denom
    new[0, 0] = theta.coeffs[0, 0]  # exact mass conservation
    out = ScalarField(g, new)
    if cfg.galerkin_n is not None:
        out = sp.cutoff(out, cfg.galerkin_n)
    return out


def ch_step(state: SimState, cfg: SchemeConfig) -> ScalarField:
    """One semi-implicit step of the order-parameter equation (theta^{n+1})."""
    theta, u = _maybe_truncate(state.theta, state.u, cfg)
    phi_f = _phi_spectrum(theta, cfg, state.clamp_tally)
    return _ch_update(theta, u, phi_f, cfg)


def _ns_force(theta: ScalarField, u: VectorField, mu: ScalarField,
              cfg: SchemeConfig) -> VectorField:
    g = theta.grid
    d11 = sp.derivative(u.u1, 1)
    d21 = sp.derivative(u.u1, 2)
    d12 = sp.derivative(u.u2, 1)
    d22 = sp.derivative(u.u2, 2)

    conv1 = sp.dealias_product(u.u1, d11) + sp.dealias_product(u.u2, d21)
    conv2 = sp.dealias_product(u.u1, d12) + sp.dealias_product(u.u2, d22)

    f1 = -1.0 * conv1
    f2 = -1.0 * conv2

    if cfg.viscosity.kind != "constant":
        # div(2 (nu(theta) - nu_min) Du), symmetric Du = (grad u + grad u^T)/2
        nu_excess = cfg.viscosity.evaluate(theta.values()) - cfg.viscosity.nu_min()
        du11 = d11.values()
        du22 = d22.values()
        du12 = 0.5 * (d21.values() + d12.values())
        t11 = sp.dealias(sp.transform(2.0 * nu_excess * du11, g))
        t12 = sp.dealias(sp.transform(2.0 * nu_excess * du12, g))
        t22 = sp.dealias(sp.transform(2.0 * nu_excess * du22, g))
        f1 = f1 + sp.derivative(t11, 1) + sp.derivative(t12, 2)
        f2 = f2 + sp.derivative(t12, 1) + sp.derivative(t22, 2)

    if cfg.couple_force:
        f1 = f1 + sp.dealias_product(mu, sp.derivative(theta, 1))
        f2 = f2 + sp.dealias_product(mu, sp.derivative(theta, 2))

    force = sp.leray_project(VectorField(f1, f2))
    if cfg.galerkin_n is not None:
        force = sp.cutoff_vector(force, cfg.galerkin_n)
    return force


def _ns_update(theta: ScalarField, u: VectorField, mu: ScalarField,
               cfg: SchemeConfig, state: SimState | None = None) -> VectorField:
    g = theta.grid
    u_linf = max(float(np.abs(u.u1.values()).max()), float(np.abs(u.u2.values()).max()))
    if cfg.dt * u_linf * g.n > 1.0:
        warnings.warn(
            f"advective CFL exceeded: dt*|u|_inf*N = {cfg.dt * u_linf * g.n:.3f} > 1",
            StabilityWarning,
            stacklevel=2,
        )
        if state is not None:
            state.cfl_warnings += 1

    force = _ns_force(theta, u, mu, cfg)
    denom = 1.0 + cfg.dt * cfg.viscosity.nu_min() * g.k_sq
    new1 = (u.u1.coeffs + cfg.dt * force.u1.coeffs) / denom
    new2 = (u.u2.coeffs + cfg.dt * force.u2.coeffs) / denom
    # the projected force is mean-free in the continuum; keep the zero
    # momentum mode constant to the bit
    new1[0, 0] = u.u1.coeffs[0, 0]
    new2[0, 0] = u.u2.coeffs[0, 0]
    out = sp.leray_project(VectorField(ScalarField(g, new1), ScalarField(g, new2)))
    if cfg.galerkin_n is not None:
        out = sp.cutoff_vector(out, cfg.galerkin_n)
    return out


def ns_step(state: SimState, cfg: SchemeConfig,
            theta_new: ScalarField | None = None) -> VectorField:
    """One semi-implicit step of the velocity equation (u^{n+1}).

    The explicit coupling uses the current theta and mu; ``theta_new`` is
    accepted so step orchestration can hand over the already-advanced order
    parameter, but the lagged scheme does not use it.
    """
    del theta_new
    theta, u = _maybe_truncate(state.theta, state.u, cfg)
    mu = chemical_potential(theta, cfg, state.clamp_tally)
    return _ns_update(theta, u, mu, cfg, state)


def _maybe_truncate(theta, u, cfg):
    if cfg.galerkin_n is not None:
        return sp.cutoff(theta, cfg.galerkin_n), sp.cutoff_vector(u, cfg.galerkin_n)
    return theta, u


def coupled_step(state: SimState, cfg: SchemeConfig) -> SimState:
    """Advance (theta, u) by one dt: theta first, then u from the old fields."""
    theta, u = _maybe_truncate(state.theta, state.u, cfg)
    phi_f = _phi_spectrum(theta, cfg, state.clamp_tally)
    mu = (1.0 / cfg.kappa) * phi_f - cfg.kappa * sp.laplacian(theta)
    theta_new = _ch_update(theta, u, phi_f, cfg)
    u_new = _ns_update(theta, u, mu, cfg, state)
    return replace(
        state,
        t=state.t + cfg.dt,
        step=state.step + 1,
        theta=theta_new,
        u=u_new,
        prev_theta=theta,
    )


# ---------------------------------------------------------------------------
# run orchestration

@dataclass
class RunResult:
    state: SimState
    records: list
    clamp_events: int
    linf_violations: int
    cfl_warnings: int


def fork_state(state: SimState) -> SimState:
    """Copy of a state for an independent run: fresh event counters."""
    return replace(state, clamp_tally=ClampTally(), linf_violations=0, cfl_warnings=0)


def validate_initial_state(state: SimState, delta0: float, linf_oversample: int = 1):
    """Reject initial data violating the run preconditions."""
    if not (0.0 < delta0 < 1.0):
        raise PreconditionError(f"delta0 must lie in (0, 1), got {delta0}")
    linf = sp.linf_norm(state.theta, linf_oversample)
    if linf > 1.0 - delta0 + 1e-12:
        raise PreconditionError(
            f"initial order parameter has |theta|_inf = {linf:.12f} > 1 - delta0 = {1 - delta0}"
        )
    m = abs(sp.mean(state.theta))
    if m > 1e-12:
        raise PreconditionError(f"initial order parameter has nonzero mean {m:.3e}")
    div = state.u.divergence_error()
    if div > 1e-10:
        raise PreconditionError(f"initial velocity is not divergence-free: {div:.3e}")


def run(state0: SimState, cfg: SchemeConfig, t_end: float, *,
        delta0: float = 0.1, sample_every: int = 1,
        linf_oversample: int = 1, quad_oversample: int = 4,
        on_sample=None, on_step=None) -> RunResult:
    """Integrate to t_end, emitting one diagnostics record per sample.

    ``on_step(state, prev_state)`` fires after every step; ``on_sample(state,
    record)`` at the sampling cadence (and always for the first and last
    states).  The initial data is dealias-masked so products stay alias-free.
    """
    from .diagnostics import diagnostics_record

    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    state = replace(
        state0,
        theta=sp.dealias(state0.theta),
        u=VectorField(sp.dealias(state0.u.u1), sp.dealias(state0.u.u2)),
    )
    state.prev_theta = state.theta
    if cfg.galerkin_n is not None:
        state.theta = sp.cutoff(state.theta, cfg.galerkin_n)
        state.u = sp.cutoff_vector(state.u, cfg.galerkin_n)
        state.prev_theta = state.theta
    validate_initial_state(state, delta0, linf_oversample)

    records = []

    def emit(cur, prev):
        rec = diagnostics_record(cur, prev, cfg,
                                 linf_oversample=linf_oversample,
                                 quad_oversample=quad_oversample)
        records.append(rec)
        if on_sample is not None:
            on_sample(cur, rec)

    emit(state, None)
    n_steps = int(math.floor((t_end - state.t) / cfg.dt + 1e-9))
    for k in range(n_steps):
        prev = state
        state = coupled_step(state, cfg)
        if float(np.abs(state.theta.values()).max()) > 1.0:
            state.linf_violations += 1
            warnings.warn("collocation values of theta exceeded 1", StabilityWarning,
                          stacklevel=2)
        if on_step is not None:
            on_step(state, prev)
        if (k + 1) % sample_every == 0 or k == n_steps - 1:
            emit(state, prev)

    return RunResult(
        state=state,
        records=records,
        clamp_events=state.clamp_tally.events,
        linf_violations=state.linf_violations,
        cfl_warnings=state.cfl_warnings,
    )


# ---------------------------------------------------------------------------
# initial-condition presets (all rescaled into |theta|_inf <= 1 - delta0)

_IC_OVERSAMPLE = 4  # presets bound the interpolant's sup, not just grid values


def _rescale_to(field_: ScalarField, target: float) -> ScalarField:
    linf = sp.linf_norm(field_, _IC_OVERSAMPLE)
    if linf == 0.0:
        return field_
    return field_ * (target / linf)


def _cap(field_: ScalarField, delta0: float) -> ScalarField:
    linf = sp.linf_norm(field_, _IC_OVERSAMPLE)
    cap = 1.0 - delta0
    if linf > cap:
        return field_ * (cap / linf)
    return field_


def ic_modes(grid: Grid, modes, delta0: float) -> ScalarField:
    """Explicit cosine mode list, |theta|_inf capped at 1 - delta0."""
    return _cap(sp.dealias(ScalarField.from_cos_modes(grid, modes)), delta0)


def ic_random_band(grid: Grid, band: int, target_linf: float, seed: int,
                   delta0: float) -> ScalarField:
    """Random mean-zero field band-limited to |n| <= band, rescaled to
    min(target_linf, 1 - delta0).  Generator: numpy PCG64 (seeded)."""
    rng = np.random.default_rng(seed)
    f = sp.transform(rng.standard_normal((grid.n, grid.n)), grid)
    f = sp.cutoff(sp.dealias(f), band)
    coeffs = f.coeffs.copy()
    coeffs[0, 0] = 0.0
    f = ScalarField(grid, coeffs)
    return _rescale_to(f, min(target_linf, 1.0 - delta0))


def ic_two_bubble(grid: Grid, width: float, delta0: float,
                  target_linf: float | None = None) -> ScalarField:
    """Two disjoint tanh bubbles projected to mean zero."""
    def torus_dist(x1, x2, c):
        d1 = np.abs(x1 - c[0])
        d2 = np.abs(x2 - c[1])
        d1 = np.minimum(d1, 2 * np.pi - d1)
        d2 = np.minimum(d2, 2 * np.pi - d2)
        return np.hypot(d1, d2)

    x1, x2 = grid.x1, grid.x2
    b1 = np.tanh((np.pi / 4 - torus_dist(x1, x2, (np.pi / 2, np.pi))) / width)
    b2 = np.tanh((np.pi / 3 - torus_dist(x1, x2, (3 * np.pi / 2, np.pi))) / width)
    f = sp.dealias(sp.transform(b1 + b2 + 1.0, grid))
    coeffs = f.coeffs.copy()
    coeffs[0, 0] = 0.0
    f = ScalarField(grid, coeffs)
    if target_linf is not None:
        return _rescale_to(f, min(target_linf, 1.0 - delta0))
    return _cap(f, delta0)


def ic_taylor_green(grid: Grid, amplitude: float = 1.0) -> VectorField:
    """u = A (sin x1 cos x2, -cos x1 sin x2); divergence-free."""
    u1 = sp.transform(amplitude * np.sin(grid.x1) * np.cos(grid.x2), grid)
    u2 = sp.transform(-amplitude * np.cos(grid.x1) * np.sin(grid.x2), grid)
    return VectorField(u1, u2)
