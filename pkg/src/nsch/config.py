"""Flat key = value run configuration.

One ``key = value`` assignment per line, ``#`` starts a comment, keys are
dotted paths (``grid.N``, ``scheme.dt``, ...).  Unknown keys are rejected,
duplicates keep the last value with a warning, and every violation is
reported with its line number in one deterministic error.  Random initial
data uses the named generator ``pcg64`` (numpy's seeded PCG64) so alternate
implementations can reproduce the stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dynamics import (SchemeConfig, SimState, ViscosityModel, ic_modes,
                       ic_random_band, ic_taylor_green, ic_two_bubble)
from .errors import ConfigError
from .potential import PotentialParams
from .spectral import Grid, VectorField

_IC_KINDS = ("modes", "random_band", "two_bubble")
_U_KINDS = ("zero", "taylor_green")
_EMIT_KINDS = ("snapshots", "csv", "heatmaps")
_OVERSAMPLE_CHOICES = (1, 2, 4, 8)


def _parse_bool(raw: str) -> bool:
    if raw.lower() == "true":
        return True
    if raw.lower() == "false":
        return False
    raise ValueError(f"expected 'true' or 'false', got {raw!r}")


def _parse_modes(raw: str):
    """Cosine mode list 'n1:n2:amp, n1:n2:amp, ...'."""
    modes = []
    for item in raw.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ValueError(f"mode entry {item.strip()!r} is not 'n1:n2:amplitude'")
        modes.append((int(parts[0]), int(parts[1]), float(parts[2])))
    if not modes:
        raise ValueError("empty mode list")
    return modes


def _parse_emit(raw: str):
    items = tuple(s.strip() for s in raw.split(",") if s.strip())
    for item in items:
        if item not in _EMIT_KINDS:
            raise ValueError(f"unknown output kind {item!r}; choose from {_EMIT_KINDS}")
    return items


# key -> (parser, default); _REQUIRED marks keys without defaults
_REQUIRED = object()

_SCHEMA = {
    "grid.N": (int, _REQUIRED),
    "grid.dealias_cut": (int, None),
    "potential.alpha0": (float, _REQUIRED),
    "potential.alpha": (float, _REQUIRED),
    "potential.clamp_margin": (float, 1e-12),
    "scheme.dt": (float, 1e-4),
    "scheme.S": (float, None),
    "scheme.epsilon": (float, 0.0),
    "scheme.galerkin_n": (int, None),
    "scheme.kappa": (float, 1.0),
    "scheme.mobility": (float, 1.0),
    "scheme.clamp": (_parse_bool, True),
    "scheme.couple_force": (_parse_bool, True),
    "scheme.viscosity.kind": (str, "constant"),
    "scheme.viscosity.nu_a": (float, 1.0),
    "scheme.viscosity.nu_b": (float, 0.0),
    "ic.kind": (str, "random_band"),
    "ic.seed": (int, 0),
    "ic.band": (int, 4),
    "ic.target_linf": (float, 0.9),
    "ic.delta0": (float, 0.1),
    "ic.modes": (_parse_modes, None),
    "ic.width": (float, 0.3),
    "ic.rng": (str, "pcg64"),
    "ic.u_kind": (str, "zero"),
    "ic.u_amplitude": (float, 1.0),
    "run.t_end": (float, _REQUIRED),
    "run.sample_every": (int, 100),
    "run.linf_oversample": (int, 1),
    "run.quad_oversample": (int, 4),
    "output.dir": (str, "out"),
    "output.emit": (_parse_emit, ("csv",)),
    "envelope.enabled": (_parse_bool, False),
    "envelope.epsilon_ode": (float, 1e-2),
}


@dataclass
class RunConfig:
    """Fully validated run description."""

    grid: Grid
    scheme: SchemeConfig
    ic_kind: str
    ic_seed: int
    ic_band: int
    ic_target_linf: float
    ic_delta0: float
    ic_modes: list | None
    ic_width: float
    ic_rng: str
    ic_u_kind: str
    ic_u_amplitude: float
    t_end: float
    sample_every: int
    linf_oversample: int
    quad_oversample: int
    output_dir: str
    emit: tuple
    envelope_enabled: bool
    envelope_epsilon_ode: float
    warnings: list = field(default_factory=list)


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError listing every violation."""
    problems = []
    warnings_ = []
    raw = {}
    lines_of = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            problems.append((lineno, f"expected 'key = value', got {body!r}"))
            continue
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            problems.append((lineno, f"unknown key {key!r}"))
            continue
        if key in raw:
            warnings_.append(f"line {lineno}: duplicate key {key!r}, last value wins")
        raw[key] = value
        lines_of[key] = lineno

    values = {}
    for key, (parser, default) in _SCHEMA.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except (ValueError, TypeError) as exc:
                problems.append((lines_of[key], f"{key}: {exc}"))
        elif default is _REQUIRED:
            problems.append((0, f"missing required key {key!r}"))
        else:
            values[key] = default

    if problems:
        raise ConfigError(problems)

    def line(key):
        return lines_of.get(key, 0)

    # construct the validated component objects, collecting violations
    grid = potential = viscosity = scheme = None
    try:
        grid = Grid(values["grid.N"], values["grid.dealias_cut"])
    except ValueError as exc:
        problems.append((line("grid.N"), f"grid: {exc}"))
    try:
        potential = PotentialParams(values["potential.alpha0"], values["potential.alpha"],
                                    values["potential.clamp_margin"])
    except ValueError as exc:
        problems.append((line("potential.alpha0"), f"potential: {exc}"))
    try:
        viscosity = ViscosityModel(values["scheme.viscosity.kind"],
                                   values["scheme.viscosity.nu_a"],
                                   values["scheme.viscosity.nu_b"])
    except ValueError as exc:
        problems.append((line("scheme.viscosity.kind"), f"viscosity: {exc}"))
    if potential is not None and viscosity is not None:
        try:
            scheme = SchemeConfig(
                dt=values["scheme.dt"],
                potential=potential,
                viscosity=viscosity,
                S=values["scheme.S"],
                epsilon=values["scheme.epsilon"],
                galerkin_n=values["scheme.galerkin_n"],
                kappa=values["scheme.kappa"],
                mobility=values["scheme.mobility"],
                clamp=values["scheme.clamp"],
                couple_force=values["scheme.couple_force"],
            )
        except ValueError as exc:
            problems.append((line("scheme.dt"), f"scheme: {exc}"))

    delta0 = values["ic.delta0"]
    if not (0.0 < delta0 < 1.0):
        problems.append((line("ic.delta0"), f"ic.delta0 must lie in (0, 1), got {delta0}"))
    target = values["ic.target_linf"]
    if not (0.0 < target <= 1.0):
        problems.append((line("ic.target_linf"), f"ic.target_linf must lie in (0, 1], got {target}"))
    elif 0.0 < delta0 < 1.0 and target > 1.0 - delta0:
        problems.append((line("ic.target_linf"),
                         f"ic.target_linf = {target} exceeds 1 - delta0 = {1.0 - delta0}"))
    if values["ic.kind"] not in _IC_KINDS:
        problems.append((line("ic.kind"), f"ic.kind must be one of {_IC_KINDS}, got {values['ic.kind']!r}"))
    elif values["ic.kind"] == "modes" and values["ic.modes"] is None:
        problems.append((0, "ic.kind = modes requires ic.modes"))
    if values["ic.rng"] != "pcg64":
        problems.append((line("ic.rng"), f"unsupported generator {values['ic.rng']!r}; only 'pcg64'"))
    if values["ic.u_kind"] not in _U_KINDS:
        problems.append((line("ic.u_kind"), f"ic.u_kind must be one of {_U_KINDS}"))
    if values["ic.band"] < 1:
        problems.append((line("ic.band"), "ic.band must be >= 1"))
    if values["ic.width"] <= 0:
        problems.append((line("ic.width"), "ic.width must be positive"))
    if values["run.t_end"] < 0:
        problems.append((line("run.t_end"), "run.t_end must be nonnegative"))
    if values["run.sample_every"] < 1:
        problems.append((line("run.sample_every"), "run.sample_every must be >= 1"))
    for key in ("run.linf_oversample", "run.quad_oversample"):
        if values[key] not in _OVERSAMPLE_CHOICES:
            problems.append((line(key), f"{key} must be one of {_OVERSAMPLE_CHOICES}"))
    if values["envelope.epsilon_ode"] <= 0:
        problems.append((line("envelope.epsilon_ode"), "envelope.epsilon_ode must be positive"))

    if problems:
        raise ConfigError(problems)

    return RunConfig(
        grid=grid,
        scheme=scheme,
        ic_kind=values["ic.kind"],
        ic_seed=values["ic.seed"],
        ic_band=values["ic.band"],
        ic_target_linf=values["ic.target_linf"],
        ic_delta0=values["ic.delta0"],
        ic_modes=values["ic.modes"],
        ic_width=values["ic.width"],
        ic_rng=values["ic.rng"],
        ic_u_kind=values["ic.u_kind"],
        ic_u_amplitude=values["ic.u_amplitude"],
        t_end=values["run.t_end"],
        sample_every=values["run.sample_every"],
        linf_oversample=values["run.linf_oversample"],
        quad_oversample=values["run.quad_oversample"],
        output_dir=values["output.dir"],
        emit=values["output.emit"],
        envelope_enabled=values["envelope.enabled"],
        envelope_epsilon_ode=values["envelope.epsilon_ode"],
        warnings=warnings_,
    )


def initial_state(cfg: RunConfig) -> SimState:
    """Build the initial (theta, u) pair described by the configuration."""
    if cfg.ic_kind == "modes":
        theta = ic_modes(cfg.grid, cfg.ic_modes, cfg.ic_delta0)
    elif cfg.ic_kind == "random_band":
        theta = ic_random_band(cfg.grid, cfg.ic_band, cfg.ic_target_linf,
                               cfg.ic_seed, cfg.ic_delta0)
    else:
        theta = ic_two_bubble(cfg.grid, cfg.ic_width, cfg.ic_delta0, cfg.ic_target_linf)

    if cfg.ic_u_kind == "taylor_green":
        u = ic_taylor_green(cfg.grid, cfg.ic_u_amplitude)
    else:
        u = VectorField.zero(cfg.grid)
    return SimState(t=0.0, theta=theta, u=u)
