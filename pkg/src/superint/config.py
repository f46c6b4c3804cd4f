"""Experiment configuration: a small INI schema, strictly validated.

Sections and keys (see README for the full reference):

    [run]           seed
    [system]        family, space, n, mass, kappa, omega, delta, deltas,
                    k, charge, b_tilde (or b for variable_mass),
                    potential / vector / mass_profile (ascending polynomial
                    coefficients), extra_integrals (1-based axes)
    [verification]  sample_points, bracket_tol, rank_tol
    [simulation]    x0 (2N floats), t_final, step, method, monitors,
                    output_stride, closure_tol, fixed_point_tol

Unknown sections or keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .catalog import FAMILIES, SPACES, EUCLIDEAN, SystemDescriptor
from .errors import ConfigError

_SECTIONS = {"run", "system", "verification", "simulation"}
_RUN_KEYS = {"seed"}
_SYSTEM_KEYS = {
    "family", "space", "n", "mass", "kappa", "omega", "delta", "deltas", "k",
    "charge", "b_tilde", "b", "potential", "vector", "mass_profile",
    "extra_integrals",
}
_VERIFICATION_KEYS = {"sample_points", "bracket_tol", "rank_tol"}
_SIMULATION_KEYS = {
    "x0", "t_final", "step", "method", "monitors", "output_stride",
    "closure_tol", "fixed_point_tol",
}
_MONITOR_TOKENS = {"energy", "universal", "extras"}


@dataclass(frozen=True)
class VerificationSettings:
    sample_points: int = 20
    bracket_tol: float = 1e-9
    rank_tol: float = 1e-8


@dataclass(frozen=True)
class SimulationSettings:
    x0: np.ndarray
    t_final: float
    step: float
    method: str = "gl2"
    monitors: tuple[str, ...] = ("energy", "universal")
    output_stride: int = 1
    closure_tol: Optional[float] = None
    fixed_point_tol: float = 1e-13


@dataclass(frozen=True)
class ExperimentConfig:
    descriptor: SystemDescriptor
    seed: int = 0
    extra_axes: tuple[int, ...] = ()
    verification: VerificationSettings = field(default_factory=VerificationSettings)
    simulation: Optional[SimulationSettings] = None

    @property
    def n(self) -> int:
        return self.descriptor.n


def _floats(raw: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{key}: expected floats, got {raw!r}") from exc


def _one_float(raw: str, key: str) -> float:
    vals = _floats(raw, key)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single number, got {raw!r}")
    return vals[0]


def _one_int(raw: str, key: str) -> int:
    val = _one_float(raw, key)
    if val != int(val):
        raise ConfigError(f"{key}: expected an integer, got {raw!r}")
    return int(val)


def load_config(path) -> ExperimentConfig:
    """Parse and validate an experiment configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    unknown = set(parser.sections()) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown sections {sorted(unknown)}; allowed {sorted(_SECTIONS)}")
    if "system" not in parser:
        raise ConfigError("a [system] section is required")

    for section, allowed in (
        ("run", _RUN_KEYS),
        ("system", _SYSTEM_KEYS),
        ("verification", _VERIFICATION_KEYS),
        ("simulation", _SIMULATION_KEYS),
    ):
        if section in parser:
            bad = set(parser[section]) - allowed
            if bad:
                raise ConfigError(f"unknown [{section}] keys {sorted(bad)}")

    seed = 0
    if "run" in parser and "seed" in parser["run"]:
        seed = _one_int(parser["run"]["seed"], "seed")

    descriptor, extra_axes = _system(parser["system"])
    verification = _verification(parser["verification"]) if "verification" in parser \
        else VerificationSettings()
    simulation = _simulation(parser["simulation"], descriptor.n) \
        if "simulation" in parser else None
    return ExperimentConfig(descriptor, seed, extra_axes, verification, simulation)


def _system(sec) -> tuple[SystemDescriptor, tuple[int, ...]]:
    family = sec.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    space = sec.get("space", EUCLIDEAN)
    if space not in SPACES:
        raise ConfigError(f"space must be one of {SPACES}, got {space!r}")
    if space not in FAMILIES[family]["spaces"]:
        raise ConfigError(f"family {family!r} is not defined on space {space!r}")

    if "n" not in sec:
        raise ConfigError("[system] n is required")
    n = _one_int(sec["n"], "n")
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")

    barrier_key = "b" if family == "variable_mass" else "b_tilde"
    wrong_key = "b_tilde" if family == "variable_mass" else "b"
    if wrong_key in sec:
        raise ConfigError(f"family {family!r} takes {barrier_key!r}, not {wrong_key!r}")
    bt = np.array(_floats(sec[barrier_key], barrier_key)) if barrier_key in sec \
        else np.zeros(n)
    if bt.size != n:
        raise ConfigError(f"{barrier_key} must list n = {n} values, got {bt.size}")

    kappa = _one_float(sec["kappa"], "kappa") if "kappa" in sec else 0.0
    if space == EUCLIDEAN and kappa != 0.0:
        raise ConfigError("euclidean space has kappa = 0")

    params: dict[str, float] = {"kappa": kappa}
    profiles: dict[str, tuple[float, ...]] = {}
    needed = FAMILIES[family]["params"]
    if "mass" in needed:
        params["mass"] = _one_float(sec["mass"], "mass") if "mass" in sec else 1.0
        if params["mass"] <= 0.0:
            raise ConfigError(f"mass must be positive, got {params['mass']}")
    if "omega" in needed:
        params["omega"] = _one_float(sec["omega"], "omega") if "omega" in sec else 1.0
    if "delta" in needed:
        params["delta"] = _one_float(sec["delta"], "delta") if "delta" in sec else 0.0
    if "k" in needed:
        params["k"] = _one_float(sec["k"], "k") if "k" in sec else 1.0
    if "charge" in needed:
        params["charge"] = _one_float(sec["charge"], "charge") if "charge" in sec else 1.0
    for key in FAMILIES[family]["profiles"]:
        if key == "deltas":
            profiles["deltas"] = _floats(sec["deltas"], "deltas") if "deltas" in sec else ()
            continue
        if key not in sec:
            raise ConfigError(f"family {family!r} needs polynomial coefficients {key!r}")
        profiles[key] = _floats(sec[key], key)

    ms_axes: tuple[int, ...] = ()
    if family == "sw":
        ms_axes = tuple(range(n))
    elif family == "kepler_coulomb":
        ms_axes = tuple(int(i) for i in np.flatnonzero(bt == 0.0))

    extra_axes: tuple[int, ...] = ()
    if "extra_integrals" in sec:
        sites = [_one_int(tok, "extra_integrals") for tok in sec["extra_integrals"].split()]
        if any(not 1 <= s <= n for s in sites):
            raise ConfigError(f"extra_integrals sites must be in [1, {n}], got {sites}")
        extra_axes = tuple(s - 1 for s in sites)
        if family not in ("sw", "kepler_coulomb"):
            raise ConfigError(f"family {family!r} has no extra integrals")
        invalid = [a + 1 for a in extra_axes if a not in ms_axes]
        if invalid:
            raise ConfigError(
                f"extra integrals requested on axes {invalid} where the validity "
                f"condition fails (kepler_coulomb needs b_tilde = 0 on the axis)"
            )

    descriptor = SystemDescriptor(family, space, params, bt, ms_axes, profiles)
    return descriptor, extra_axes


def _verification(sec) -> VerificationSettings:
    sample_points = _one_int(sec["sample_points"], "sample_points") \
        if "sample_points" in sec else 20
    bracket_tol = _one_float(sec["bracket_tol"], "bracket_tol") \
        if "bracket_tol" in sec else 1e-9
    rank_tol = _one_float(sec["rank_tol"], "rank_tol") if "rank_tol" in sec else 1e-8
    if sample_points < 1 or bracket_tol <= 0.0 or rank_tol <= 0.0:
        raise ConfigError("verification settings must be positive")
    return VerificationSettings(sample_points, bracket_tol, rank_tol)


def _simulation(sec, n: int) -> SimulationSettings:
    for key in ("x0", "t_final", "step"):
        if key not in sec:
            raise ConfigError(f"[simulation] {key} is required")
    x0 = np.array(_floats(sec["x0"], "x0"))
    if x0.size != 2 * n:
        raise ConfigError(f"x0 must list 2n = {2 * n} values (q then p), got {x0.size}")
    t_final = _one_float(sec["t_final"], "t_final")
    if t_final < 0.0:
        raise ConfigError("t_final must be nonnegative")
    step = _one_float(sec["step"], "step")
    if step <= 0.0:
        raise ConfigError("step must be positive")
    method = sec.get("method", "gl2")
    if method not in ("gl2", "rk4"):
        raise ConfigError(f"method must be gl2 or rk4, got {method!r}")
    monitors = tuple(sec.get("monitors", "energy universal").split())
    bad = set(monitors) - _MONITOR_TOKENS
    if bad:
        raise ConfigError(f"unknown monitors {sorted(bad)}; allowed {sorted(_MONITOR_TOKENS)}")
    stride = _one_int(sec["output_stride"], "output_stride") \
        if "output_stride" in sec else 1
    if stride < 1:
        raise ConfigError("output_stride must be >= 1")
    closure_tol = _one_float(sec["closure_tol"], "closure_tol") \
        if "closure_tol" in sec else None
    if closure_tol is not None and closure_tol <= 0.0:
        raise ConfigError("closure_tol must be positive")
    fp_tol = _one_float(sec["fixed_point_tol"], "fixed_point_tol") \
        if "fixed_point_tol" in sec else 1e-13
    if fp_tol <= 0.0:
        raise ConfigError("fixed_point_tol must be positive")
    return SimulationSettings(
        x0, t_final, step, method, monitors, stride, closure_tol, fp_tol
    )
