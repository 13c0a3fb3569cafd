"""Command-line interface.

Commands::

    nsch run <config>                  execute a simulation
    nsch convergence <config> [-k N]   dt- and eps-refinement ratio tables
    nsch envelope <config>             run with comparison-envelope tracking
    nsch verify <config>               property suite (potential, Korteweg,
                                       spectral oracle, ODE identity, semigroup)
    nsch oracle-check                  spectral core vs dense oracle at N = 8

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
runtime error.  Every command prints a human-readable report and writes a
machine-readable JSON-lines report (one object per check) next to the other
outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import checks as chk
from . import envelope as env_mod
from . import fileio, spectral as sp, studies
from .config import initial_state, parse_config
from .dynamics import run
from .errors import NschError


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text)
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return cfg


def _native(value):
    return value.item() if isinstance(value, np.generic) else value


class Report:
    """Collects check results, prints them, and writes the JSONL file."""

    def __init__(self, path):
        self.path = path
        self.entries = []

    def add(self, name, passed, **detail):
        detail = {k: _native(v) for k, v in detail.items()}
        self.entries.append({"check": name, "passed": bool(passed), **detail})
        status = "PASS" if passed else "FAIL"
        extras = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in detail.items())
        print(f"[{status}] {name}" + (f" ({extras})" if extras else ""))

    def add_check(self, check):
        detail = {k: _native(v) for k, v in check.detail.items()}
        self.entries.append({"check": check.name, "passed": bool(check.passed), **detail})
        print(check.line())

    def write(self):
        if self.path is None:
            return
        os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as fh:
            for entry in self.entries:
                fh.write(json.dumps(entry) + "\n")

    @property
    def all_passed(self):
        return all(e["passed"] for e in self.entries)


def _report_path(args, cfg=None):
    if args.report is not None:
        return args.report
    if cfg is not None:
        return os.path.join(cfg.output_dir, "report.jsonl")
    return "report.jsonl"


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    state0 = initial_state(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = Report(_report_path(args, cfg))

    emit_snapshots = "snapshots" in cfg.emit
    emit_heatmaps = "heatmaps" in cfg.emit

    def on_sample(state, rec):
        if emit_snapshots:
            fileio.write_snapshot(
                os.path.join(cfg.output_dir, f"snapshot_{state.step:08d}.nsch"),
                state.t, state.theta, state.u)
        if emit_heatmaps:
            fileio.emit_heatmap(
                state.theta, os.path.join(cfg.output_dir, f"heatmap_{state.step:08d}.pgm"))

    result = run(state0, cfg.scheme, cfg.t_end,
                 delta0=cfg.ic_delta0,
                 sample_every=cfg.sample_every,
                 linf_oversample=cfg.linf_oversample,
                 quad_oversample=cfg.quad_oversample,
                 on_sample=on_sample)

    if "csv" in cfg.emit:
        fileio.emit_csv(result.records, os.path.join(cfg.output_dir, "diagnostics.csv"))

    first, last = result.records[0], result.records[-1]
    mass_drift = abs(last.mass - first.mass)
    report.add("run.completed", True, t_end=result.state.t, steps=result.state.step,
               samples=len(result.records))
    report.add("run.mass_conserved", mass_drift <= 1e-13, mass_drift=mass_drift)
    report.add("run.no_linf_violation", result.linf_violations == 0,
               violations=result.linf_violations)
    report.add("run.clamp_events", True, events=result.clamp_events)
    report.add("run.separation_positive", last.delta > 0.0, delta_final=last.delta)
    report.write()
    return 0 if report.all_passed else 1


def cmd_convergence(args) -> int:
    cfg = _load_config(args.config)
    state0 = initial_state(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = Report(_report_path(args, cfg))

    dt_study = studies.dt_refinement(state0, cfg.scheme, cfg.t_end, halvings=args.halvings,
                                     delta0=cfg.ic_delta0)
    print("dt-refinement study:")
    print(f"  {'dt':>12}  {'energy residual':>16}")
    for dt, res in zip(dt_study.dts, dt_study.residuals):
        print(f"  {dt:12.3e}  {res:16.6e}")
    for k, ratio in enumerate(dt_study.residual_ratios):
        report.add(f"convergence.residual_ratio_{k}", 0.4 <= ratio <= 0.6, ratio=ratio)
    print(f"  {'dt':>12}  {'|theta_dt - theta_dt/2|':>24}")
    for dt, diff in zip(dt_study.dts, dt_study.state_diffs):
        print(f"  {dt:12.3e}  {diff:24.6e}")
    for k, ratio in enumerate(dt_study.diff_ratios):
        report.add(f"convergence.state_diff_ratio_{k}", 0.35 <= ratio <= 0.65, ratio=ratio)

    eps_study = studies.epsilon_refinement(state0, cfg.scheme, cfg.t_end,
                                           delta0=cfg.ic_delta0)
    print("eps-refinement study (vs eps = 0):")
    print(f"  {'eps':>12}  {'L2 error':>16}")
    for eps, err in zip(eps_study.epsilons, eps_study.errors):
        print(f"  {eps:12.3e}  {err:16.6e}")
    for k, ratio in enumerate(eps_study.ratios):
        report.add(f"convergence.eps_ratio_{k}", 0.35 <= ratio <= 0.65, ratio=ratio)

    report.write()
    return 0 if report.all_passed else 1


def cmd_envelope(args) -> int:
    cfg = _load_config(args.config)
    state0 = initial_state(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = Report(_report_path(args, cfg))

    # the theory backs the envelope for the regularized equation; for
    # eps = 0 runs the check is reported but does not gate the exit code
    eps_ode = cfg.scheme.epsilon if cfg.scheme.epsilon > 0 else cfg.envelope_epsilon_ode
    asserted = cfg.scheme.epsilon > 0
    env = env_mod.init_envelope(state0.theta, eps_ode)
    params = cfg.scheme.potential
    dt = cfg.scheme.dt

    def on_step(state, prev):
        dtheta = (state.theta - prev.theta) * (1.0 / dt)
        h = env_mod.compute_h_tilde(state, dtheta, params)
        env_mod.advance(env, sp.linf_norm(h), dt, params, t_new=state.t)

    failures = []

    def on_sample(state, rec):
        check = env_mod.envelope_check(state.theta, env, oversample=cfg.linf_oversample)
        if not check.passed:
            failures.append(state.t)
        report.add(f"envelope.sample_t={state.t:.6f}", check.passed,
                   theta_min=check.theta_min, theta_max=check.theta_max,
                   y_minus=check.y_minus, y_plus=check.y_plus)

    run(state0, cfg.scheme, cfg.t_end, delta0=cfg.ic_delta0,
        sample_every=cfg.sample_every, linf_oversample=cfg.linf_oversample,
        quad_oversample=cfg.quad_oversample, on_step=on_step, on_sample=on_sample)

    i_minus, i_plus = env_mod.phi_square_time_integrals(env, params)
    report.add("envelope.phi_square_integrals", True, int_minus=i_minus, int_plus=i_plus)
    report.write()
    if asserted and failures:
        return 1
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    os.makedirs(cfg.output_dir, exist_ok=True)
    report = Report(_report_path(args, cfg))
    for check in chk.potential_checks(cfg.scheme.potential):
        report.add_check(check)
    report.add_check(chk.korteweg_check(n=cfg.grid.n, p=cfg.scheme.potential))
    for check in chk.spectral_oracle_checks():
        report.add_check(check)
    for check in chk.ode_identity_checks(cfg.scheme.potential):
        report.add_check(check)
    for check in chk.semigroup_checks():
        report.add_check(check)
    report.write()
    return 0 if report.all_passed else 1


def cmd_oracle_check(args) -> int:
    report = Report(_report_path(args))
    for check in chk.spectral_oracle_checks():
        report.add_check(check)
    report.write()
    return 0 if report.all_passed else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nsch", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a simulation")
    p_run.add_argument("config")
    p_run.add_argument("--report", default=None, help="JSONL report path")
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("convergence", help="dt and eps refinement studies")
    p_conv.add_argument("config")
    p_conv.add_argument("--halvings", "-k", type=int, default=3)
    p_conv.add_argument("--report", default=None)
    p_conv.set_defaults(func=cmd_convergence)

    p_env = sub.add_parser("envelope", help="run with envelope tracking")
    p_env.add_argument("config")
    p_env.add_argument("--report", default=None)
    p_env.set_defaults(func=cmd_envelope)

    p_ver = sub.add_parser("verify", help="run the property suite")
    p_ver.add_argument("config")
    p_ver.add_argument("--report", default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_orc = sub.add_parser("oracle-check", help="spectral core vs dense oracle")
    p_orc.add_argument("--report", default=None)
    p_orc.set_defaults(func=cmd_oracle_check)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NschError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
