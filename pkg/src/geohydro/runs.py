"""Simulation runs: config validation, the time loop, and the run manifest."""

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .conventions import CONVENTIONS
from .densities import (
    AffineEnergy,
    Barotropic,
    Classical,
    IntegralF,
    PolynomialNonlinearity,
    PotentialSpec,
    PowerEnergy,
    Quantum,
    normalize_density,
)
from .errors import ConfigError, GeohydroError
from .expr import eval_expression, evaluate_at
from .filament import FilamentCurve, step_filament
from .grid import check_size, integrate
from .io import write_rows
from .madelung import CotangentPoint, l2_norm, normalize
from .solvers import (
    BarotropicState,
    HydroState,
    NeumannState,
    TwoHSState,
    evaluate_hamiltonian,
    step_2hs,
    step_barotropic,
    step_hydro,
    step_much,
    step_neumann,
    step_schrodinger,
)

# initial-data expressions each equation expects, in CSV output order
INITIAL_FIELDS = {
    "schrodinger": ("psi_re", "psi_im"),
    "hydro": ("rho", "theta"),
    "barotropic": ("rho", "u"),
    "neumann": ("f", "f_dot"),
    "much": ("u",),
    "twohs": ("u", "sigma"),
    "filament": ("x", "y", "z"),
}

OUTPUT_FIELDS = {
    "schrodinger": ("psi",),
    "hydro": ("rho", "theta"),
    "barotropic": ("rho", "u"),
    "neumann": ("f", "f_dot"),
    "much": ("u",),
    "twohs": ("u", "sigma"),
    "filament": ("gamma_x", "gamma_y", "gamma_z"),
}


@dataclass(frozen=True)
class RunConfig:
    equation: str
    initial: dict
    n: int = 64
    dt: float = 1e-3
    t_final: float = 1.0
    save_every: int = 10
    V: str = "0"
    quantum: float = 0.0
    nonlinearity: tuple = ()
    energy: dict = None
    seed: int = 0
    out_dir: str = None

    def __post_init__(self):
        if self.equation not in INITIAL_FIELDS:
            raise ConfigError(f"unknown equation {self.equation!r}; choose from {sorted(INITIAL_FIELDS)}")
        try:
            check_size(self.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ConfigError("dt must be positive")
        if not (isinstance(self.t_final, (int, float)) and self.t_final >= 0):
            raise ConfigError("t_final must be nonnegative")
        if not (isinstance(self.save_every, int) and self.save_every >= 1):
            raise ConfigError("save_every must be a positive integer")
        if not isinstance(self.initial, dict):
            raise ConfigError("initial must map field names to expressions")
        expected = set(INITIAL_FIELDS[self.equation])
        if set(self.initial) != expected:
            raise ConfigError(f"{self.equation} needs initial fields {sorted(expected)}, got {sorted(self.initial)}")
        object.__setattr__(self, "nonlinearity", tuple(float(c) for c in self.nonlinearity))

    @classmethod
    def from_mapping(cls, mapping):
        if not isinstance(mapping, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in fields(cls)}
        unknown = set(mapping) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"equation", "initial"} - set(mapping)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**mapping)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        out = asdict(self)
        out["nonlinearity"] = list(self.nonlinearity)
        out.pop("out_dir")
        return out

    @property
    def steps(self):
        return int(math.floor(self.t_final / self.dt + 1e-9))

    @property
    def snapshot_count(self):
        return self.steps // self.save_every + 1


def energy_law(spec):
    if spec is None:
        return None
    spec = dict(spec)
    kind = spec.pop("kind", "affine")
    try:
        if kind == "affine":
            return AffineEnergy(**spec)
        if kind == "power":
            return PowerEnergy(**spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad energy law: {exc}") from exc
    raise ConfigError(f"unknown energy law {kind!r}")


def potential_spec(cfg, V):
    terms = []
    if np.any(V != 0):
        terms.append(Classical(V))
    if cfg.quantum:
        terms.append(Quantum(cfg.quantum))
    law = energy_law(cfg.energy)
    if law is not None:
        terms.append(Barotropic(law))
    nonlin = PolynomialNonlinearity(cfg.nonlinearity)
    if not nonlin.is_zero:
        terms.append(IntegralF(nonlin))
    return PotentialSpec(tuple(terms))


@dataclass
class RunManifest:
    config: dict
    snapshots: list = field(default_factory=list)
    files: dict = field(default_factory=dict)
    version: str = __version__
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def to_dict(self):
        return {
            "config": self.config,
            "conventions": self.conventions,
            "files": self.files,
            "snapshot_count": len(self.snapshots),
            "snapshots": self.snapshots,
            "version": self.version,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data):
        return cls(
            config=data["config"],
            snapshots=data.get("snapshots", []),
            files=data.get("files", {}),
            version=data.get("version", ""),
            conventions=data.get("conventions", {}),
        )


class _Run:
    """Per-equation state, step function, diagnostics and output fields."""

    def __init__(self, cfg):
        self.cfg = cfg
        n = cfg.n
        ini = {k: eval_expression(v, n) for k, v in cfg.initial.items() if cfg.equation != "filament"}
        eq = cfg.equation
        V = eval_expression(cfg.V, n)
        self.nonlin = PolynomialNonlinearity(cfg.nonlinearity)
        if eq == "schrodinger":
            self.V = V
            self.state = normalize(ini["psi_re"] + 1j * ini["psi_im"])
        elif eq == "hydro":
            self.spec = potential_spec(cfg, V)
            p = CotangentPoint.gauged(normalize_density(ini["rho"]), ini["theta"])
            self.state = HydroState(p.rho, p.theta)
        elif eq == "barotropic":
            self.law = energy_law(cfg.energy) or AffineEnergy()
            self.state = BarotropicState(normalize_density(ini["rho"]), ini["u"])
        elif eq == "neumann":
            f = ini["f"] / math.sqrt(integrate(ini["f"] ** 2))
            self.state = NeumannState(f, ini["f_dot"] - integrate(f * ini["f_dot"]) * f)
        elif eq == "much":
            self.state = ini["u"]
        elif eq == "twohs":
            self.state = TwoHSState(ini["u"] - ini["u"][0], ini["sigma"])
        else:
            exprs = [cfg.initial[k] for k in INITIAL_FIELDS["filament"]]

            def func(x):
                return np.stack([np.broadcast_to(evaluate_at(e, x), np.shape(x)) for e in exprs], axis=1)

            self.state = FilamentCurve.from_parametric(func, n)

    def step(self):
        cfg, s = self.cfg, self.state
        eq = cfg.equation
        if eq == "schrodinger":
            self.state = step_schrodinger(s, self.V, self.nonlin, cfg.dt)
        elif eq == "hydro":
            self.state = step_hydro(s, self.spec, cfg.dt)
        elif eq == "barotropic":
            self.state = step_barotropic(s, self.law, cfg.dt)
        elif eq == "neumann":
            self.state = step_neumann(s, cfg.dt)
        elif eq == "much":
            self.state = step_much(s, cfg.dt)
        elif eq == "twohs":
            self.state = step_2hs(s, cfg.dt)
        else:
            self.state = step_filament(s, cfg.dt)

    def diagnostics(self):
        eq, s = self.cfg.equation, self.state
        if eq == "schrodinger":
            return {"norm": l2_norm(s), "hamiltonian": evaluate_hamiltonian(eq, s, (self.V, self.nonlin))}
        if eq == "hydro":
            return {"mass": float(integrate(s.rho)), "hamiltonian": evaluate_hamiltonian(eq, s, self.spec)}
        if eq == "barotropic":
            return {"mass": float(integrate(s.rho)), "hamiltonian": evaluate_hamiltonian(eq, s, self.law)}
        if eq == "neumann":
            return {"norm": math.sqrt(integrate(s.f**2)), "hamiltonian": evaluate_hamiltonian(eq, s)}
        if eq == "much":
            return {"momentum_mean": float(integrate(s)), "hamiltonian": evaluate_hamiltonian(eq, s)}
        if eq == "twohs":
            return {"sigma_mean": float(integrate(s.sigma)), "hamiltonian": evaluate_hamiltonian(eq, s)}
        # the binormal flow is Hamiltonian with the curve length as energy
        return {"hamiltonian": s.length}

    def fields(self):
        eq, s = self.cfg.equation, self.state
        if eq in ("schrodinger", "much"):
            return [s]
        if eq == "filament":
            return list(s.gamma.T)
        return list(s)


def simulate(cfg, out_dir=None):
    """Run ``cfg`` and return the manifest; with ``out_dir`` also write CSVs and manifest.json.

    Errors raised while stepping (vacuum, arclength drift) propagate.
    """
    if isinstance(cfg, dict):
        cfg = RunConfig.from_mapping(cfg)
    try:
        run = _Run(cfg)
    except GeohydroError:
        raise
    except (ValueError, TypeError) as exc:
        # constructor validation of initial data (e.g. curve not closed)
        raise ConfigError(str(exc)) from exc
    names = OUTPUT_FIELDS[cfg.equation]
    series = {name: [] for name in names}
    times, snaps = [], []

    def record(i):
        t = i * cfg.dt
        times.append(t)
        snaps.append({"index": len(snaps), "step": i, "t": t, **run.diagnostics()})
        for name, values in zip(names, run.fields()):
            series[name].append(np.array(values))

    record(0)
    for i in range(1, cfg.steps + 1):
        run.step()
        if i % cfg.save_every == 0:
            record(i)
    files = {name: f"{name}.csv" for name in names}
    manifest = RunManifest(cfg.to_dict(), snaps, files)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for name in names:
            write_rows(os.path.join(out_dir, files[name]), times, np.array(series[name]))
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(manifest.to_json())
    manifest.series = series
    manifest.times = times
    return manifest
