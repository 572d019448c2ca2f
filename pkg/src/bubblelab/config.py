"""Run configuration: flat `key = value` text with dotted sections.

Example:

    params.gamma = 1.4
    params.c_v = 1.0
    params.kappa_g = 1.0
    params.sigma = 0.1
    params.mu_l = 0.0
    params.rho_l = 1.0
    params.T_inf = 2.5
    params.p_inf_star = 1.0
    run.mass = 5.0265482457436690
    run.solver = galerkin
    run.J = 16
    run.N = 256
    run.T = 30.0
    run.tol = 1e-8
    run.dt_out = 0.02
    run.seed = 1234
    forcing.kind = constant
    init.R0_rel = 1.003
    init.R0_dot = 0.004
    init.rho_offset = 0.004
    init.mode_amps = 0.005, -0.002

R_g may be omitted (derived from gamma and c_v); if given it must satisfy
gamma = 1 + R_g/c_v.  Values are parsed as int, float, bool, comma list,
or bare string, in that order of preference.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IoError
from .model import ForcingKind, ModelParams, PressureForcing

__all__ = ["RunConfig", "parse_kv_text", "load_config", "DEFAULT_CONFIG_TEXT"]

DEFAULT_CONFIG_TEXT = """\
params.gamma = 1.4
params.c_v = 1.0
params.kappa_g = 1.0
params.sigma = 0.1
params.mu_l = 0.0
params.rho_l = 1.0
params.T_inf = 2.5
params.p_inf_star = 1.0
run.mass = 5.0265482457436690
run.solver = galerkin
run.J = 16
run.N = 256
run.T = 30.0
run.tol = 1e-8
run.dt_out = 0.02
run.seed = 1234
forcing.kind = constant
forcing.amplitude = 0.0
forcing.rate = 1.0
init.R0_rel = 1.003
init.R0_dot = 0.004
init.rho_offset = 0.004
init.mode_amps = 0.005, -0.002
"""


def _parse_value(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [_parse_value(tok) for tok in raw.split(",") if tok.strip()]
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_kv_text(text: str) -> dict:
    """Flat dotted-key dictionary from `key = value` lines."""
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        out[key.strip()] = _parse_value(raw)
    return out


@dataclass
class RunConfig:
    params: ModelParams
    forcing: PressureForcing
    mass: float
    solver: str = "galerkin"
    J: int = 16
    N: int = 256
    T: float = 30.0
    tol: float = 1e-8
    dt_out: float = 0.02
    seed: int = 1234
    R0_rel: float = 1.003
    R0_dot: float = 0.004
    rho_offset: float = 0.004
    mode_amps: tuple = (0.005, -0.002)
    out_dir: str = "."
    raw: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.solver not in ("galerkin", "fd", "both"):
            raise ConfigError(f"solver must be galerkin|fd|both, got {self.solver!r}")
        for name in ("J", "N"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.T <= 0 or self.tol <= 0 or self.dt_out <= 0:
            raise ConfigError("T, tol, dt_out must be positive")
        if self.mass <= 0:
            raise ConfigError("run.mass must be positive")
        n_out = self.T / self.dt_out
        if abs(n_out - round(n_out)) > 1e-9:
            raise ConfigError("run.T must be a multiple of run.dt_out")

    def initial_data(self, eq):
        """(rho0 callable, R0, R0_dot) for this run."""
        R0 = self.R0_rel * eq.R_star
        offset, amps = self.rho_offset, tuple(self.mode_amps)
        from .basis import phi

        def profile(r):
            y = np.asarray(r, dtype=float) / R0
            out = np.full_like(y, eq.rho_star + offset, dtype=float)
            for k, a in enumerate(amps, start=1):
                out = out + a * phi(k, y)
            return out

        return profile, R0, self.R0_dot


def config_from_dict(kv: dict) -> RunConfig:
    """Build a RunConfig from a flat dotted-key dict over defaults."""
    merged = parse_kv_text(DEFAULT_CONFIG_TEXT)
    merged.update(kv)

    def want(key, default=None):
        return merged.get(key, default)

    gamma = float(want("params.gamma"))
    c_v = float(want("params.c_v"))
    r_g = want("params.R_g")
    pkw = dict(
        kappa_g=float(want("params.kappa_g")),
        gamma=gamma,
        c_v=c_v,
        sigma=float(want("params.sigma")),
        mu_l=float(want("params.mu_l")),
        rho_l=float(want("params.rho_l")),
        T_inf=float(want("params.T_inf")),
        p_inf_star=float(want("params.p_inf_star")),
    )
    if r_g is None:
        params = ModelParams.from_gamma(**pkw)
    else:
        params = ModelParams(R_g=float(r_g), **pkw)

    kind_raw = str(want("forcing.kind", "constant")).lower()
    if kind_raw in ("constant", "const"):
        forcing = PressureForcing(ForcingKind.CONSTANT)
    elif kind_raw in ("decaying", "decaying_perturbation"):
        forcing = PressureForcing(ForcingKind.DECAYING_PERTURBATION,
                                  amplitude=float(want("forcing.amplitude", 0.0)),
                                  rate=float(want("forcing.rate", 1.0)))
    else:
        raise ConfigError(f"unknown forcing.kind {kind_raw!r}")

    amps = want("init.mode_amps", [0.005, -0.002])
    if not isinstance(amps, list):
        amps = [amps]
    return RunConfig(
        params=params,
        forcing=forcing,
        mass=float(want("run.mass")),
        solver=str(want("run.solver")),
        J=int(want("run.J")),
        N=int(want("run.N")),
        T=float(want("run.T")),
        tol=float(want("run.tol")),
        dt_out=float(want("run.dt_out")),
        seed=int(want("run.seed")),
        R0_rel=float(want("init.R0_rel")),
        R0_dot=float(want("init.R0_dot")),
        rho_offset=float(want("init.rho_offset")),
        mode_amps=tuple(float(a) for a in amps),
        out_dir=str(want("run.out_dir", ".")),
        raw=merged,
    )


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Config from file (optional) plus override pairs."""
    kv: dict = {}
    if path is not None:
        if not os.path.exists(path):
            raise IoError(f"config file not found: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            kv.update(parse_kv_text(fh.read()))
    if overrides:
        kv.update(overrides)
    return config_from_dict(kv)
