"""Run configuration: a single JSON document with schema validation.

Top-level keys: kernel, grid, quadrature, sigma_file, w_file, checks,
stopping, sweep.  Unknown keys are rejected at every level.  Kernel
parameters are validated against the full admissibility bound
alpha <= min(1, n(lambda - 2)/2), which the equivalence theory requires.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import DomainError, GoodBadParams, ShiftedGrid
from .kernels import KernelParams
from .measures import WeightPair, load_measure_csv
from .quadrature import QuadratureSpec

__all__ = ["ConfigError", "RunConfig", "CheckSpec", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration; maps to CLI exit code 2."""


_KERNEL_KEYS = {"n", "lambda", "alpha"}
_GRID_KEYS = {"n", "scale_min_exp", "scale_max_exp", "seed", "r", "gamma"}
_QUAD_KEYS = {"tol", "t_ratio", "min_slabs", "max_slabs", "y_radius_factor",
              "max_depth", "base_cells", "ladder_lo"}
_CHECK_KEYS = {"id", "instances", "seed", "cap"}
_STOP_KEYS = {"c0", "max_generations"}
_SWEEP_KEYS = {"lambda", "alpha", "w_scale"}
_TOP_KEYS = {"kernel", "grid", "quadrature", "sigma_file", "w_file",
             "checks", "stopping", "sweep"}


def _require_keys(d: dict, allowed: set, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {where}: {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}")


@dataclass(frozen=True)
class CheckSpec:
    id: str
    instances: int | None = None
    seed: int | None = None
    cap: float | None = None


@dataclass
class RunConfig:
    kernel: KernelParams
    grid_params: dict
    quadrature: QuadratureSpec
    sigma_file: str | None = None
    w_file: str | None = None
    checks: list[CheckSpec] = field(default_factory=list)
    stopping: dict = field(default_factory=lambda: {"c0": 4.0})
    sweep: dict = field(default_factory=dict)
    path: str | None = None

    def grid(self) -> ShiftedGrid:
        g = self.grid_params
        return ShiftedGrid(g["n"], g["scale_min_exp"], g["scale_max_exp"],
                           seed=g["seed"])

    def goodbad(self) -> GoodBadParams:
        g = self.grid_params
        gamma = g["gamma"]
        if gamma is None:
            gamma = GoodBadParams.default_gamma(self.kernel.n, self.kernel.alpha)
        return GoodBadParams(r=g["r"], gamma=gamma)

    def load_pair(self) -> WeightPair:
        if not self.sigma_file or not self.w_file:
            raise ConfigError("sigma_file and w_file are required for this command")
        base = Path(self.path).parent if self.path else Path(".")
        out = []
        for name in (self.sigma_file, self.w_file):
            p = Path(name)
            if not p.is_absolute():
                p = base / p
            if not p.exists():
                raise ConfigError(f"measure file not found: {p}")
            try:
                out.append(load_measure_csv(p))
            except DomainError as exc:
                raise ConfigError(f"bad measure file {p}: {exc}") from exc
        sigma, w = out
        try:
            return WeightPair(sigma, w)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc


def _kernel_from(d: dict) -> KernelParams:
    _require_keys(d, _KERNEL_KEYS, "kernel")
    try:
        p = KernelParams(int(d.get("n", 1)), float(d.get("lambda", 3.0)),
                         float(d.get("alpha", 0.5)))
    except DomainError as exc:
        raise ConfigError(f"kernel: {exc}") from exc
    violation = p.theorem_bound_violation()
    if violation is not None:
        raise ConfigError(f"kernel: {violation}")
    return p


def _grid_from(d: dict, n: int) -> dict:
    _require_keys(d, _GRID_KEYS, "grid")
    out = {"n": int(d.get("n", n)), "scale_min_exp": int(d.get("scale_min_exp", -4)),
           "scale_max_exp": int(d.get("scale_max_exp", 3)),
           "seed": int(d.get("seed", 0)), "r": int(d.get("r", 2)),
           "gamma": None if d.get("gamma") is None else float(d["gamma"])}
    if out["scale_min_exp"] > out["scale_max_exp"]:
        raise ConfigError("grid: scale_min_exp must not exceed scale_max_exp")
    return out


def _quad_from(d: dict) -> QuadratureSpec:
    _require_keys(d, _QUAD_KEYS, "quadrature")
    try:
        return QuadratureSpec(**{k: v for k, v in d.items()})
    except (DomainError, TypeError) as exc:
        raise ConfigError(f"quadrature: {exc}") from exc


def _checks_from(lst) -> list[CheckSpec]:
    if not isinstance(lst, list):
        raise ConfigError("checks must be a JSON array")
    out = []
    for i, entry in enumerate(lst):
        _require_keys(entry, _CHECK_KEYS, f"checks[{i}]")
        if "id" not in entry:
            raise ConfigError(f"checks[{i}]: missing id")
        out.append(CheckSpec(
            id=str(entry["id"]),
            instances=None if entry.get("instances") is None else int(entry["instances"]),
            seed=None if entry.get("seed") is None else int(entry["seed"]),
            cap=None if entry.get("cap") is None else float(entry["cap"]),
        ))
    return out


def _sweep_from(d: dict) -> dict:
    _require_keys(d, _SWEEP_KEYS, "sweep")
    out = {}
    for key in _SWEEP_KEYS:
        if key in d:
            vals = d[key]
            if not isinstance(vals, list) or not vals:
                raise ConfigError(f"sweep.{key} must be a nonempty array")
            out[key] = [float(v) for v in vals]
    return out


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    _require_keys(doc, _TOP_KEYS, "config")
    kernel = _kernel_from(doc.get("kernel", {}))
    grid = _grid_from(doc.get("grid", {}), kernel.n)
    quad = _quad_from(doc.get("quadrature", {}))
    stopping = dict(doc.get("stopping", {}))
    _require_keys(stopping, _STOP_KEYS, "stopping")
    stopping.setdefault("c0", 4.0)
    stopping["c0"] = float(stopping["c0"])
    stopping["max_generations"] = int(stopping.get("max_generations", 64))
    return RunConfig(
        kernel=kernel,
        grid_params=grid,
        quadrature=quad,
        sigma_file=doc.get("sigma_file"),
        w_file=doc.get("w_file"),
        checks=_checks_from(doc.get("checks", [])),
        stopping=stopping,
        sweep=_sweep_from(doc.get("sweep", {})),
        path=str(path),
    )
