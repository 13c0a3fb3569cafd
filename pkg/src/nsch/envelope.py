"""Scalar comparison envelopes bounding the order parameter pointwise.

Rewriting the regularized equation as a second-order parabolic problem

    eps dtheta/dt - Lap(theta) + phi(theta) = h~,
    h~ = m(phi(theta)) - (-Lap)^-1(dtheta/dt) - (-Lap)^-1(div(u theta)),

comparison with the stiff scalar ODEs

    eps y' + phi(y) = h,   y_+(0) = +|theta_0|_inf,  y_-(0) = -|theta_0|_inf,

forced by h_+ = +|h~|_inf and h_- = -|h~|_inf yields the pointwise bounds
y_-(t) <= theta(t, x) <= y_+(t).  Both envelopes stay strictly inside
(-1, 1) because phi blows up at the ends, which is the mechanism keeping
theta separated from the singular values.

The ODEs advance by backward Euler; z -> eps z / dt + phi(z) is strictly
increasing once eps/dt > alpha, so the root is unique and found by a
safeguarded Newton iteration with a bisection fallback, bracketed inside
(-1, 1).  If the PDE time step is too large for that margin, the advance
sub-steps the ODE.

The time derivative entering h~ is the backward difference of the stepping
sequence, making the envelope a first-order-accurate diagnostic; the check
carries a matching slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import PreconditionError, SingularForcingError
from .potential import PotentialParams, phi_values
from .spectral import ScalarField


@dataclass
class EnvelopeState:
    """Scalar bounds y- <= theta <= y+ with forcing history.

    History rows are (t, h_plus, h_minus, y_minus, y_plus).
    """

    y_minus: float
    y_plus: float
    epsilon: float
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError(f"envelope epsilon must be positive, got {self.epsilon}")
        if not (-1.0 < self.y_minus <= self.y_plus < 1.0):
            raise ValueError(
                f"envelope bounds must satisfy -1 < y- <= y+ < 1, got ({self.y_minus}, {self.y_plus})"
            )


def init_envelope(theta0: ScalarField, epsilon: float, t0: float = 0.0) -> EnvelopeState:
    """Start the envelope at +-|theta0|_inf."""
    linf = sp.linf_norm(theta0)
    env = EnvelopeState(y_minus=-linf, y_plus=linf, epsilon=epsilon)
    env.history.append((t0, 0.0, 0.0, env.y_minus, env.y_plus))
    return env


def compute_h_tilde(state, dtheta_dt: ScalarField, p: PotentialParams) -> ScalarField:
    """Forcing field h~ = m(phi(theta)) - (-Lap)^-1(dtheta/dt + div(u theta)).

    Both inverse-Laplacian arguments must be mean-zero; a violation means a
    solver invariant broke upstream (mass conservation or div u = 0).
    """
    theta, u = state.theta, state.u
    grid = theta.grid
    conv = sp.derivative(sp.dealias_product(u.u1, theta), 1) \
        + sp.derivative(sp.dealias_product(u.u2, theta), 2)

    for name, f in (("dtheta_dt", dtheta_dt), ("div(u theta)", conv)):
        m = abs(complex(f.coeffs[0, 0]))
        if m > 1e-10 * max(1.0, sp.l2_norm(f)):
            raise PreconditionError(
                f"{name} is not mean-zero (mean {m:.3e}); solver invariant broken upstream"
            )

    m_phi = float(np.mean(phi_values(theta.values(), p, state.clamp_tally)))
    coeffs = -(sp.inverse_laplacian(dtheta_dt).coeffs + sp.inverse_laplacian(conv).coeffs)
    coeffs = coeffs.copy()
    coeffs[0, 0] += m_phi
    return ScalarField(grid, coeffs)


def _phi_raw(z: float, p: PotentialParams) -> float:
    return 0.5 * p.alpha0 * math.log((1.0 + z) / (1.0 - z)) - p.alpha * z


def _phi_prime_raw(z: float, p: PotentialParams) -> float:
    return p.alpha0 / (1.0 - z * z) - p.alpha


_BRACKET = 1.0 - 1e-15


def ode_step(y: float, h: float, eps: float, dt: float, p: PotentialParams,
             tol: float = 1e-12, max_iter: int = 200) -> float:
    """Backward-Euler step of eps y' + phi(y) = h.

    Solves eps (z - y)/dt + phi(z) = h for z in (-1, 1).  Requires
    eps/dt > alpha so the map z -> eps z/dt + phi(z) is strictly increasing
    and the root unique; the caller sub-steps if necessary.
    """
    if not (abs(y) < 1.0):
        raise PreconditionError(f"ode_step requires |y| < 1, got {y}")
    if eps <= 0.0 or dt <= 0.0:
        raise PreconditionError("ode_step requires eps > 0 and dt > 0")
    c = eps / dt
    if c <= p.alpha:
        raise PreconditionError(
            f"ode_step requires eps/dt > alpha for a monotone solve "
            f"(eps/dt = {c:.6g}, alpha = {p.alpha}); sub-step the ODE"
        )
    rhs = h + c * y

    def g(z):
        return c * z + _phi_raw(z, p) - rhs

    lo, hi = -_BRACKET, _BRACKET
    g_lo, g_hi = g(lo), g(hi)
    if g_lo > 0.0 or g_hi < 0.0:
        raise SingularForcingError(
            f"no root in (-1, 1): forcing h = {h:.6g} out of range for eps/dt = {c:.6g}"
        )

    z = min(max(y, lo), hi)
    best_z, best_g = z, g(z)
    for _ in range(max_iter):
        gz = g(z)
        if abs(gz) < abs(best_g):
            best_z, best_g = z, gz
        if abs(gz) <= tol:
            return z
        if gz > 0.0:
            hi = z
        else:
            lo = z
        dg = c + _phi_prime_raw(z, p)
        z_newton = z - gz / dg
        if lo < z_newton < hi:
            z = z_newton
        else:
            z = 0.5 * (lo + hi)
        if hi - lo <= 4.0 * np.finfo(float).eps * max(1.0, abs(z)):
            break
    return best_z


def advance(env: EnvelopeState, h_tilde_linf: float, dt: float, p: PotentialParams,
            t_new: float | None = None) -> EnvelopeState:
    """Advance both envelopes across one PDE step of size dt.

    Forcing is held at h_+ = +|h~|_inf, h_- = -|h~|_inf over the step; the
    ODE itself sub-steps so that eps/dt_sub > alpha always holds.
    """
    h_plus = abs(h_tilde_linf)
    h_minus = -h_plus
    n_sub = int(math.floor(p.alpha * dt / env.epsilon)) + 1
    dt_sub = dt / n_sub
    y_p, y_m = env.y_plus, env.y_minus
    for _ in range(n_sub):
        y_p = ode_step(y_p, h_plus, env.epsilon, dt_sub, p)
        y_m = ode_step(y_m, h_minus, env.epsilon, dt_sub, p)
    env.y_plus, env.y_minus = y_p, y_m
    if t_new is None:
        t_new = env.history[-1][0] + dt if env.history else dt
    env.history.append((t_new, h_plus, h_minus, y_m, y_p))
    return env


@dataclass
class EnvelopeCheck:
    theta_min: float
    theta_max: float
    y_minus: float
    y_plus: float
    passed: bool

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return (f"envelope {verdict}: y- = {self.y_minus:+.9f} <= theta in "
                f"[{self.theta_min:+.9f}, {self.theta_max:+.9f}] <= y+ = {self.y_plus:+.9f}")


def envelope_check(theta: ScalarField, env: EnvelopeState, slack: float = 1e-6,
                   oversample: int = 1) -> EnvelopeCheck:
    """Check y- - slack <= min(theta) and max(theta) <= y+ + slack."""
    vals = sp.values_oversampled(theta, oversample)
    tmin = float(vals.min())
    tmax = float(vals.max())
    passed = (env.y_minus - slack <= tmin) and (tmax <= env.y_plus + slack)
    return EnvelopeCheck(tmin, tmax, env.y_minus, env.y_plus, passed)


def ode_energy_identity_residual(y: np.ndarray, h: np.ndarray, dt: float,
                                 eps: float, p: PotentialParams) -> float:
    """Residual of eps Phi(y(T)) + int |phi(y)|^2 = eps Phi(y(0)) + int h phi(y).

    Trapezoidal quadrature in time; O(dt) for backward-Euler trajectories.
    """
    from .potential import Phi

    y = np.asarray(y, dtype=float)
    h = np.asarray(h, dtype=float)
    if y.shape != h.shape or y.ndim != 1 or len(y) < 2:
        raise ValueError("trajectory and forcing must be equal-length 1-D arrays")
    ph = phi_values(y, p, clamp=False)
    lhs = eps * Phi(float(y[-1]), p) + float(np.trapezoid(ph**2, dx=dt))
    rhs = eps * Phi(float(y[0]), p) + float(np.trapezoid(h * ph, dx=dt))
    return abs(lhs - rhs)


def phi_square_time_integrals(env: EnvelopeState, p: PotentialParams) -> tuple[float, float]:
    """Reported int_0^T |phi(y_-)|^2 dt and int_0^T |phi(y_+)|^2 dt."""
    hist = np.asarray(env.history, dtype=float)
    t = hist[:, 0]
    ym = phi_values(hist[:, 3], p, clamp=False)
    yp = phi_values(hist[:, 4], p, clamp=False)
    return float(np.trapezoid(ym**2, t)), float(np.trapezoid(yp**2, t))
