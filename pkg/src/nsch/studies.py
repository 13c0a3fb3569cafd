"""Refinement studies: time-step and regularization sweeps.

Used by the command-line ``convergence`` command and by the acceptance
suite.  Each study runs short simulations from a shared initial state and
reports ratio tables; first-order behaviour shows up as ratios near 1/2
under halving.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import spectral as sp
from .dynamics import RunResult, SchemeConfig, SimState, fork_state, run


@dataclass
class DtStudy:
    dts: list
    residuals: list        # energy-law residual at the final step of each run
    residual_ratios: list  # residual(dt/2) / residual(dt)
    state_diffs: list      # ||theta_dt(T) - theta_{dt/2}(T)||_L2
    diff_ratios: list


def dt_refinement(state0: SimState, cfg: SchemeConfig, t_end: float,
                  halvings: int = 3, delta0: float = 0.1) -> DtStudy:
    """Run at dt, dt/2, ..., compare energy residuals and final states."""
    dts = [cfg.dt / 2**k for k in range(halvings + 1)]
    finals = []
    residuals = []
    for dt in dts:
        cfg_k = replace(cfg, dt=dt)
        result = run(fork_state(state0), cfg_k, t_end, delta0=delta0,
                     sample_every=max(1, int(round(t_end / dt))))
        finals.append(result.state.theta)
        residuals.append(result.records[-1].energy_residual)
    diffs = [sp.l2_norm(finals[k] - finals[k + 1]) for k in range(halvings)]
    residual_ratios = [residuals[k + 1] / residuals[k] for k in range(halvings)]
    diff_ratios = [diffs[k + 1] / diffs[k] for k in range(len(diffs) - 1)]
    return DtStudy(dts, residuals, residual_ratios, diffs, diff_ratios)


@dataclass
class EpsilonStudy:
    epsilons: list
    errors: list     # ||theta_eps(T) - theta_0(T)||_L2
    ratios: list     # e(eps/2) / e(eps)


def epsilon_refinement(state0: SimState, cfg: SchemeConfig, t_end: float,
                       epsilons=(1e-2, 5e-3, 2.5e-3), delta0: float = 0.1) -> EpsilonStudy:
    """Compare regularized runs against the eps = 0 run at fixed dt."""
    sample = max(1, int(round(t_end / cfg.dt)))
    base = run(fork_state(state0), replace(cfg, epsilon=0.0), t_end,
               delta0=delta0, sample_every=sample).state.theta
    errors = []
    for eps in epsilons:
        final = run(fork_state(state0), replace(cfg, epsilon=eps), t_end,
                    delta0=delta0, sample_every=sample).state.theta
        errors.append(sp.l2_norm(final - base))
    ratios = [errors[k + 1] / errors[k] for k in range(len(errors) - 1)]
    return EpsilonStudy(list(epsilons), errors, ratios)


@dataclass
class MonotoneDtReport:
    dt0: float | None      # largest ladder dt with monotone total energy
    table: list            # (dt, monotone: bool, worst increase)


def _energy_monotone(result: RunResult) -> tuple[bool, float]:
    e = np.asarray([rec.e_total for rec in result.records])
    increases = np.diff(e)
    worst = float(increases.max()) if len(increases) else 0.0
    return bool(np.all(increases <= 1e-12 * np.maximum(1.0, np.abs(e[:-1])))), worst


def find_monotone_dt(state0: SimState, cfg: SchemeConfig, t_end: float,
                     ladder=(2e-3, 1e-3, 5e-4, 2.5e-4), delta0: float = 0.1,
                     sample_every: int = 1) -> MonotoneDtReport:
    """Largest dt in the ladder for which E_total never increases."""
    table = []
    dt0 = None
    for dt in ladder:
        result = run(fork_state(state0), replace(cfg, dt=dt), t_end,
                     delta0=delta0, sample_every=sample_every)
        ok, worst = _energy_monotone(result)
        table.append((dt, ok, worst))
        if ok and dt0 is None:
            dt0 = dt
    return MonotoneDtReport(dt0, table)
