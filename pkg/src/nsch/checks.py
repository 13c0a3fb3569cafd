"""Self-contained verification checks used by the command-line interface.

Each check returns a ``Check`` with a stable name, a pass flag, and the
measured numbers, so reports can be rendered both human-readable and as
JSON lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import envelope as env_mod
from . import oracle as orc
from . import spectral as sp
from .dynamics import SchemeConfig, korteweg_identity_error
from .potential import (Phi, PotentialParams, assumption_check, phi,
                        phi_prime, young_A, young_Atilde)
from .spectral import Grid, ScalarField, VectorField


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = ", ".join(f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in self.detail.items())
        return f"[{status}] {self.name}" + (f" ({extras})" if extras else "")


# ---------------------------------------------------------------------------
# spectral core vs. dense oracle

def spectral_oracle_checks(n: int = 8, n_fields: int = 100, tol: float = 1e-10,
                           seed: int = 2024) -> list[Check]:
    grid = Grid(n)
    oracle = orc.DenseSpectralOracle(n)
    rng = np.random.default_rng(seed)
    worst = {"transform": 0.0, "derivative": 0.0, "laplacian": 0.0,
             "bilaplacian": 0.0, "inverse_laplacian": 0.0, "leray": 0.0}
    for _ in range(n_fields):
        vals = rng.standard_normal((n, n))
        f = sp.transform(vals, grid)
        worst["transform"] = max(worst["transform"],
                                 float(np.abs(f.coeffs - oracle.transform(vals)).max()))
        for axis in (1, 2):
            d = sp.derivative(f, axis).values()
            worst["derivative"] = max(worst["derivative"],
                                      float(np.abs(d - oracle.derivative(vals, axis)).max()))
        worst["laplacian"] = max(worst["laplacian"],
                                 float(np.abs(sp.laplacian(f).values() - oracle.laplacian(vals)).max()))
        worst["bilaplacian"] = max(worst["bilaplacian"],
                                   float(np.abs(sp.bilaplacian(f).values() - oracle.bilaplacian(vals)).max()))
        mz = vals - vals.mean()
        fz = sp.transform(mz, grid)
        worst["inverse_laplacian"] = max(
            worst["inverse_laplacian"],
            float(np.abs(sp.inverse_laplacian(fz).values() - oracle.inverse_laplacian(mz)).max()))
        v1 = rng.standard_normal((n, n))
        v2 = rng.standard_normal((n, n))
        proj = sp.leray_project(VectorField(sp.transform(v1, grid), sp.transform(v2, grid)))
        o1, o2 = oracle.leray_project(v1, v2)
        worst["leray"] = max(worst["leray"],
                             float(np.abs(proj.u1.values() - o1).max()),
                             float(np.abs(proj.u2.values() - o2).max()))
    return [Check(f"spectral_oracle.{op}", err <= tol, {"max_abs_err": err, "tol": tol})
            for op, err in worst.items()]


# ---------------------------------------------------------------------------
# potential property suite

def potential_checks(p: PotentialParams, n_samples: int = 10**6,
                     n_young: int = 10**5, seed: int = 7) -> list[Check]:
    checks = []
    report = assumption_check(p, n_samples)
    checks.append(Check("potential.growth_bound", report.passed and report.worst_growth_margin >= 0.0,
                        {"worst_margin": report.worst_growth_margin,
                         "witness_s": report.worst_growth_s, "samples": report.n_samples}))
    checks.append(Check("potential.lower_bound", report.worst_lower_margin > 0.0,
                        {"worst_margin": report.worst_lower_margin,
                         "witness_s": report.worst_lower_s}))

    rng = np.random.default_rng(seed)
    pq = rng.uniform(0.0, 50.0, size=(n_young, 2))
    lhs = pq[:, 0] * pq[:, 1]
    rhs = (np.exp(pq[:, 0]) - pq[:, 0] - 1.0) + ((1.0 + pq[:, 1]) * np.log1p(pq[:, 1]) - pq[:, 1])
    margin = float((rhs - lhs).min())
    checks.append(Check("potential.young_inequality", margin >= -1e-9,
                        {"worst_margin": margin, "pairs": n_young}))

    qs = rng.uniform(1e-6, 50.0, size=1000)
    eq_err = max(abs(math.log1p(q) * q - (young_A(math.log1p(q)) + young_Atilde(q))) for q in qs)
    checks.append(Check("potential.young_equality_case", eq_err <= 1e-12 * 50.0,
                        {"max_abs_err": eq_err}))

    atilde_margin = float(np.min(qs * np.log1p(qs)
                                 - ((1.0 + qs) * np.log1p(qs) - qs)))
    checks.append(Check("potential.atilde_upper_bound", atilde_margin >= -1e-12,
                        {"worst_margin": atilde_margin}))

    s = np.linspace(-0.999, 0.999, 4001)
    h = 1e-6
    fd_phi = np.array([(Phi(x + h, p) - Phi(x - h, p)) / (2 * h) for x in s])
    fd_phip = np.array([(phi(x + h, p) - phi(x - h, p)) / (2 * h) for x in s])
    exact_phi = np.array([phi(x, p) for x in s])
    exact_phip = np.array([phi_prime(x, p) for x in s])
    scale_p = np.maximum(1.0, np.abs(exact_phi))
    scale_pp = np.maximum(1.0, np.abs(exact_phip))
    err_phi = float((np.abs(fd_phi - exact_phi) / scale_p).max())
    err_phip = float((np.abs(fd_phip - exact_phip) / scale_pp).max())
    checks.append(Check("potential.derivative_consistency",
                        err_phi <= 1e-6 and err_phip <= 1e-6,
                        {"phi_vs_fd": err_phi, "phi_prime_vs_fd": err_phip, "tol": 1e-6}))
    return checks


# ---------------------------------------------------------------------------
# Korteweg force identity

def korteweg_check(n: int = 128, max_mode: int | None = None, amp: float = 0.15,
                   oversample: int = 4, tol: float = 1e-8, seed: int = 11,
                   p: PotentialParams | None = None) -> Check:
    """||P(mu grad theta) - P(-div(grad theta x grad theta))||_L2 for
    band-limited theta, both forms assembled on the oversampled grid."""
    if p is None:
        p = PotentialParams(1.0, 2.0)
    grid = Grid(n)
    if max_mode is None:
        max_mode = n // 4
    rng = np.random.default_rng(seed)
    raw = sp.transform(rng.standard_normal((n, n)), grid)
    theta = sp.cutoff(raw, max_mode)
    coeffs = theta.coeffs.copy()
    coeffs[0, 0] = 0.0
    theta = ScalarField(grid, coeffs)
    theta = theta * (amp / sp.linf_norm(theta))

    diff = korteweg_identity_error(theta, p, oversample=oversample)
    return Check("korteweg.identity", diff <= tol,
                 {"l2_diff": diff, "tol": tol, "n": n, "max_mode": max_mode})


# ---------------------------------------------------------------------------
# comparison-ODE energy identity

def ode_identity_checks(p: PotentialParams | None = None) -> list[Check]:
    if p is None:
        p = PotentialParams(1.0, 2.0)
    checks = []
    n = 101
    y = np.full(n, 0.3)
    h = np.full(n, phi(0.3, p))
    res = env_mod.ode_energy_identity_residual(y, h, dt=1e-3, eps=0.01, p=p)
    checks.append(Check("ode_identity.stationary", res <= 1e-12, {"residual": res}))

    # forced trajectory: residual should drop by about half per dt halving
    residuals = []
    eps = 0.05
    for dt in (1e-3, 5e-4, 2.5e-4):
        steps = int(round(0.2 / dt))
        ys = [0.0]
        hs = [0.0]
        for k in range(steps):
            t = (k + 1) * dt
            hk = 0.8 * math.sin(3.0 * t)
            ys.append(env_mod.ode_step(ys[-1], hk, eps, dt, p))
            hs.append(hk)
        residuals.append(env_mod.ode_energy_identity_residual(
            np.asarray(ys), np.asarray(hs), dt=dt, eps=eps, p=p))
    r1 = residuals[1] / residuals[0]
    r2 = residuals[2] / residuals[1]
    ok = 0.3 <= r1 <= 0.7 and 0.3 <= r2 <= 0.7
    checks.append(Check("ode_identity.first_order", ok,
                        {"ratio_1": r1, "ratio_2": r2, "residual_dt": residuals[0]}))
    return checks


# ---------------------------------------------------------------------------
# bi-harmonic semigroup

def semigroup_checks(n: int = 32, seed: int = 3) -> list[Check]:
    grid = Grid(n)
    checks = []
    f = ScalarField.from_cos_modes(grid, [(1, 0, 1.0)])
    err1 = sp.l2_norm(sp.biharmonic_semigroup(f, 0.3) - math.exp(-0.3) * f)
    g = ScalarField.from_cos_modes(grid, [(2, 0, 1.0)])
    err2 = sp.l2_norm(sp.biharmonic_semigroup(g, 0.1) - math.exp(-1.6) * g)
    checks.append(Check("semigroup.single_mode", max(err1, err2) <= 1e-12,
                        {"max_err": max(err1, err2)}))

    rng = np.random.default_rng(seed)
    h = sp.dealias(sp.transform(rng.standard_normal((n, n)), grid))
    comp = sp.biharmonic_semigroup(sp.biharmonic_semigroup(h, 0.02), 0.05)
    direct = sp.biharmonic_semigroup(h, 0.07)
    err3 = float(np.abs(comp.coeffs - direct.coeffs).max())
    checks.append(Check("semigroup.composition", err3 <= 1e-12, {"max_err": err3}))

    theta0 = h * (0.9 / sp.linf_norm(h))
    t1 = sp.semigroup_linf_hold_time(theta0, delta0=0.1)
    checks.append(Check("semigroup.linf_hold_time", t1 > 0.0, {"t1": t1}))
    return checks
