"""Executable checks of the geometric correspondences.

Each ``check_*`` function runs transforms or integrators, measures residuals
and discrepancies, and returns a :class:`CheckReport`. A report passes iff
every metric is at or below its tolerance. Reports are deterministic given the
config; wall-clock runtime is kept on the object but left out of the
serialized form.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import __version__
from .conventions import CONVENTIONS, schrodinger_potential
from .densities import (
    AffineEnergy,
    Classical,
    PolynomialNonlinearity,
    PotentialSpec,
    Quantum,
    bhattacharyya_angle,
    fisher_rao_geodesic,
    fisher_rao_geodesic_derivatives,
    fr_newton_accel,
    normalize_density,
)
from .errors import ConfigError, GeohydroError, MissingSnapshots
from .expr import eval_expression
from .filament import FilamentCurve, curvature_torsion, hasimoto_transform, step_filament
from .grid import antiderivative, evaluate, inner, integrate, nodes, spectral_derivative
from .madelung import (
    CotangentPoint,
    CotangentTangent,
    canonical_symplectic,
    fs_geodesic,
    fs_geodesic_velocity,
    fubini_study_metric,
    gauge_fix,
    l2_norm,
    lenells_map,
    madelung_differential,
    madelung_forward,
    normalize,
    projective_distance,
    projective_symplectic,
    sasaki_fr_metric,
    unwrapped_phase,
)
from .solvers import (
    BarotropicState,
    HydroState,
    NeumannState,
    TwoHSState,
    evaluate_hamiltonian,
    inertia,
    neumann_multiplier,
    step_2hs,
    step_barotropic,
    step_hydro,
    step_neumann,
    step_schrodinger,
)

ROUNDOFF_FLOOR = 1e-13


# --- reports ---------------------------------------------------------------


@dataclass
class Metric:
    label: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.value <= self.tolerance)


@dataclass
class CheckReport:
    name: str
    metrics: list
    config: dict
    info: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def passed(self):
        return all(m.passed for m in self.metrics)

    def metric(self, label):
        for m in self.metrics:
            if m.label == label:
                return m
        raise KeyError(label)

    def to_dict(self, include_runtime=False):
        out = {
            "name": self.name,
            "passed": self.passed,
            "metrics": [
                {"label": m.label, "value": _num(m.value), "tolerance": _num(m.tolerance), "passed": m.passed}
                for m in self.metrics
            ],
            "config": self.config,
            "info": self.info,
            "version": __version__,
        }
        if include_runtime:
            out["runtime_seconds"] = self.runtime
        return out

    def to_json(self, include_runtime=False):
        return json.dumps(self.to_dict(include_runtime), sort_keys=True, indent=2, default=_num)

    def summary_lines(self):
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for m in self.metrics:
            flag = "ok " if m.passed else "BAD"
            lines.append(f"  [{flag}] {m.label} = {m.value:.3e} (tol {m.tolerance:.1e})")
        return lines


def _num(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _config_dict(cfg):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()}


def config_from_mapping(cls, mapping):
    """Build a config dataclass from a JSON-style mapping, rejecting unknown keys."""
    names = {f.name for f in fields(cls)}
    unknown = set(mapping) - names
    if unknown:
        raise ConfigError(f"unknown config keys for {cls.__name__}: {sorted(unknown)}")
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in mapping.items()}
    try:
        return replace(cls(), **values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _timed(name, cfg, body):
    start = time.perf_counter()
    try:
        metrics, info = body()
    except GeohydroError as exc:
        metrics = [Metric("aborted", math.inf, 0.0)]
        info = {"error": f"{type(exc).__name__}: {exc}"}
    return CheckReport(name, metrics, _config_dict(cfg), info, time.perf_counter() - start)


def _norms(label, residuals, tol):
    """Sup and L2(mu) norms of a stack of residual fields, both against ``tol``."""
    r = np.asarray(residuals)
    sup = float(np.max(np.abs(r))) if r.size else 0.0
    l2 = float(np.max(np.sqrt(np.mean(np.abs(r) ** 2, axis=-1)))) if r.size else 0.0
    return [Metric(f"{label}_sup", sup, tol), Metric(f"{label}_l2", l2, tol)]


def _ratios(errors):
    out = []
    for coarse, fine in zip(errors, errors[1:]):
        out.append(coarse / fine if fine > 0 else math.inf)
    return out


def _orders(errors):
    return [math.log2(r) if r > 0 and math.isfinite(r) else math.inf for r in _ratios(errors)]


def _central_first(samples, h):
    s = np.asarray(samples)
    return (s[..., 0, :] - 8 * s[..., 1, :] + 8 * s[..., 3, :] - s[..., 4, :]) / (12 * h)


def _central_second(samples, h):
    s = np.asarray(samples)
    return (-s[..., 0, :] + 16 * s[..., 1, :] - 30 * s[..., 2, :] + 16 * s[..., 3, :] - s[..., 4, :]) / (
        12 * h * h
    )


def _stencil(series, i):
    return np.asarray(series[i - 2 : i + 3])


def _random_field(rng, n, modes=6, amplitude=0.5):
    x = nodes(n)
    k = np.arange(1, modes + 1)
    a = rng.normal(size=modes) * amplitude / k
    b = rng.normal(size=modes) * amplitude / k
    return np.cos(np.outer(x, k)) @ a + np.sin(np.outer(x, k)) @ b


def _invert_lift(periodic, shift, targets, iterations=50):
    """Solve ``x + periodic(x) + shift = y`` for each target ``y``."""
    slope = spectral_derivative(periodic)
    x = np.asarray(targets, dtype=float) - shift
    for _ in range(iterations):
        step = (x + evaluate(periodic, x) + shift - targets) / (1.0 + evaluate(slope, x))
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return x


# --- Kahler structure ------------------------------------------------------


@dataclass(frozen=True)
class KahlerConfig:
    seed: int = 1
    samples: int = 100
    n: int = 64
    modes: int = 6
    tol: float = 1e-11
    # multiplicative fault injection on the Fubini-Study / projective side
    perturb: float = 1.0
    zero_tangents: bool = False


def random_cotangent_sample(rng, n, modes=6):
    """Random smooth gauge-valid point with two tangent vectors."""
    rho = normalize_density(np.exp(_random_field(rng, n, modes)))
    p = CotangentPoint.gauged(rho, _random_field(rng, n, modes, 2.0))

    def tangent():
        rho_dot = _random_field(rng, n, modes) * rho
        rho_dot = rho_dot - integrate(rho_dot) * rho
        return CotangentTangent(rho_dot, gauge_fix(rho, _random_field(rng, n, modes)))

    return p, tangent(), tangent()


def check_kahler(cfg=KahlerConfig()):
    def body():
        rng = np.random.default_rng(cfg.seed)
        factor = CONVENTIONS["symplectic_factor"]
        metric_err, sympl_err = [], []
        for _ in range(cfg.samples):
            p, v, w = random_cotangent_sample(rng, cfg.n, cfg.modes)
            if cfg.zero_tangents:
                zero = np.zeros(cfg.n)
                v = w = CotangentTangent(zero, zero)
            psi = madelung_forward(p)
            a, b = madelung_differential(p, v), madelung_differential(p, w)
            scale = math.sqrt(sasaki_fr_metric(p, v, v) * sasaki_fr_metric(p, w, w))
            for pair_a, pair_b, tv, tw in ((a, b, v, w), (a, a, v, v)):
                sfr = sasaki_fr_metric(p, tv, tw)
                fs = cfg.perturb * fubini_study_metric(psi, pair_a, pair_b)
                om = cfg.perturb * projective_symplectic(psi, pair_a, pair_b)
                can = factor * canonical_symplectic(tv, tw)
                metric_err.append(abs(fs - sfr) / scale if scale > 0 else abs(fs - sfr))
                sympl_err.append(abs(om - can) / scale if scale > 0 else abs(om - can))
        metrics = [
            Metric("isometry_rel_err_sup", max(metric_err), cfg.tol),
            Metric("isometry_rel_err_l2", float(np.sqrt(np.mean(np.square(metric_err)))), cfg.tol),
            Metric("symplectic_rel_err_sup", max(sympl_err), cfg.tol),
            Metric("symplectic_rel_err_l2", float(np.sqrt(np.mean(np.square(sympl_err)))), cfg.tol),
        ]
        return metrics, {"symplectic_factor": factor, "pairs": len(metric_err)}

    return _timed("kahler", cfg, body)


# --- Madelung conjugacy ----------------------------------------------------


@dataclass(frozen=True)
class ConjugacyConfig:
    n: int = 128
    V: str = "cos(x)"
    rho0: str = "1 + 0.5*cos(x)"
    theta0: str = "0.5*sin(x)"
    # polynomial coefficients of f(a); (0, 1) is the cubic NLS
    nonlinearity: tuple = ()
    t_final: float = 0.25
    dts: tuple = (4e-4, 2e-4, 1e-4)
    save_interval: float = 0.01
    tol: float = 5e-6
    ratio_target: float = 4.0
    ratio_halfwidth: float = 0.5
    # scales the V coupling on the hydrodynamic side
    perturb: float = 1.0


def conjugacy_difference(cfg, dt):
    """Sup over saved times of the aligned gap between both evolutions."""
    V = eval_expression(cfg.V, cfg.n)
    nonlin = PolynomialNonlinearity(tuple(cfg.nonlinearity))
    spec = schrodinger_potential(V, nonlin)
    if cfg.perturb != 1.0:
        spec = spec + PotentialSpec.of(Classical(V, CONVENTIONS["coupling_V"] * (cfg.perturb - 1.0)))
    p = CotangentPoint.gauged(normalize_density(eval_expression(cfg.rho0, cfg.n)), eval_expression(cfg.theta0, cfg.n))
    psi = madelung_forward(p)
    state = HydroState(p.rho, p.theta)
    steps = int(round(cfg.t_final / dt))
    save = max(1, int(round(cfg.save_interval / dt)))
    worst_sup = worst_l2 = 0.0
    for i in range(1, steps + 1):
        psi = step_schrodinger(psi, V, nonlin, dt)
        state = step_hydro(state, spec, dt)
        if i % save == 0 or i == steps:
            lifted = madelung_forward(CotangentPoint(*state))
            worst_sup = max(worst_sup, projective_distance(psi, lifted))
            gap = lifted - psi * (inner(psi, lifted) / abs(inner(psi, lifted)))
            worst_l2 = max(worst_l2, l2_norm(gap))
    return worst_sup, worst_l2


def check_conjugacy(cfg=ConjugacyConfig()):
    def body():
        sups, l2s = zip(*(conjugacy_difference(cfg, dt) for dt in cfg.dts))
        metrics = [Metric("difference_sup", sups[-1], cfg.tol), Metric("difference_l2", l2s[-1], cfg.tol)]
        ratios = _ratios(sups)
        info = {"differences_sup": list(sups), "differences_l2": list(l2s), "ratios": ratios}
        if sups[-1] > ROUNDOFF_FLOOR:
            dev = max(abs(r - cfg.ratio_target) for r in ratios)
            metrics.append(Metric("halving_ratio_deviation", dev, cfg.ratio_halfwidth))
        else:
            info["ratio_note"] = "differences at round-off; convergence ratio undefined"
        return metrics, info

    return _timed("conjugacy", cfg, body)


# --- correspondences -------------------------------------------------------


@dataclass(frozen=True)
class NeumannFisherConfig:
    n: int = 64
    eigen_mode: int = 3
    eigen_step: float = 0.05
    eigen_steps: int = 20
    f0: str = "1 + 0.3*cos(x) + 0.2*sin(2*x)"
    f_dot0: str = "0.2*sin(x) + 0.1*cos(2*x)"
    t_final: float = 0.5
    dts: tuple = (0.04, 0.02, 0.01)
    tol_lambda: float = 1e-12
    tol_stationary: float = 1e-10
    tol: float = 1e-6
    order: float = 4.0
    order_slack: float = 0.5
    # scales the quantum coefficient on the density side
    perturb: float = 1.0


def _fisher_newton_residual_from_roots(fs, h, c):
    """Residual of the Fisher-Rao Newton equation for rho = f^2 and U = Quantum(c).

    Works with signed roots: the force term ``(dU/drho) rho`` equals
    ``-(c/2) f f''``, which stays smooth through zeros of f.
    """
    out = []
    for i in range(2, len(fs) - 2):
        window = _stencil(fs, i)
        rho_w = window**2
        rho = rho_w[2]
        rho_ddot = _central_second(rho_w, h)
        f = window[2]
        force = -0.5 * c * f * spectral_derivative(f, 2)
        # rho_dot^2 / (2 rho) = 2 f_dot^2 for rho = f^2
        kinetic = 2 * _central_first(window, h) ** 2
        lam = (integrate(force) - integrate(kinetic)) / integrate(rho)
        out.append(rho_ddot - (kinetic - force + lam * rho))
    return np.array(out)


def _fisher_newton_residual(rhos, h, spec, perturb=1.0):
    out = []
    for i in range(2, len(rhos) - 2):
        window = _stencil(rhos, i)
        accel, _ = fr_newton_accel(window[2], _central_first(window, h), spec)
        out.append(_central_second(window, h) - perturb * accel)
    return np.array(out)


def _neumann_fisher(cfg):
    n = cfg.n
    x = nodes(n)
    # the Neumann Lagrangian has potential I(rho) in the Fisher-Rao metric
    c = CONVENTIONS["fisher_newton_scale"] * cfg.perturb
    metrics = []
    f = math.sqrt(2) * np.cos(cfg.eigen_mode * x)
    state = NeumannState(f, np.zeros(n))
    lam = neumann_multiplier(*state)
    roots = [state.f]
    for _ in range(cfg.eigen_steps):
        state = step_neumann(state, cfg.eigen_step)
        roots.append(state.f)
    metrics.append(Metric("eigen_lambda_error", abs(lam + cfg.eigen_mode**2), cfg.tol_lambda))
    metrics += _norms(
        "eigen_newton_residual", _fisher_newton_residual_from_roots(roots, cfg.eigen_step, c), cfg.tol_stationary
    )

    f0 = eval_expression(cfg.f0, n)
    f0 = f0 / math.sqrt(integrate(f0 * f0))
    fd0 = eval_expression(cfg.f_dot0, n)
    fd0 = fd0 - integrate(f0 * fd0) * f0
    spec = PotentialSpec.of(Quantum(c))
    sups, residuals = [], None
    for dt in cfg.dts:
        state = NeumannState(f0, fd0)
        rhos = [f0**2]
        for _ in range(int(round(cfg.t_final / dt))):
            state = step_neumann(state, dt)
            rhos.append(state.f**2)
        residuals = _fisher_newton_residual(rhos, dt, spec)
        sups.append(float(np.max(np.abs(residuals))))
    metrics += _norms("newton_residual", residuals, cfg.tol)
    orders = _orders(sups)
    metrics.append(Metric("order_deficit", max(abs(cfg.order - p) for p in orders), cfg.order_slack))
    return metrics, {"eigen_lambda": lam, "residuals_sup": sups, "orders": orders}


@dataclass(frozen=True)
class HasimotoConfig:
    n: int = 64
    circle_t_final: float = 1.0
    circle_dt: float = 1e-3
    amplitude: float = 0.1
    t_final: float = 0.2
    dts: tuple = (2e-3, 1e-3, 5e-4)
    tol_modulus: float = 1e-8
    tol_rate: float = 1e-6
    tol: float = 1e-6
    min_order: float = 2.0
    # scales the cubic term of the NLS phase equation
    perturb: float = 1.0


def _nls_residuals(ks, taus, speed, h, perturb=1.0):
    """Gauge-invariant NLS residuals for psi = k exp(i int tau) (Da Rios form)."""

    def D(f, order=1):
        return spectral_derivative(f, order) / speed**order

    r_mod, r_phase, rates = [], [], []
    for i in range(2, len(ks) - 2):
        k, tau = ks[i], taus[i]
        k_dot = _central_first(_stencil(ks, i), h)
        tau_dot = _central_first(_stencil(taus, i), h)
        rate = D(k, 2) / k - tau**2 + 0.5 * perturb * k**2
        r_mod.append(k_dot + 2 * D(k) * tau + k * D(tau))
        r_phase.append(tau_dot - D(rate))
        rates.append(integrate(rate))
    return np.array(r_mod), np.array(r_phase), np.array(rates)


def _evolve_curve(curve, dt, t_final):
    ks, taus, psis = [], [], []
    steps = int(round(t_final / dt))
    for i in range(steps + 1):
        k, tau = curvature_torsion(curve)
        ks.append(k)
        taus.append(tau)
        psis.append(hasimoto_transform(curve))
        if i < steps:
            curve = step_filament(curve, dt)
    return ks, taus, psis, curve


def saddle_curve(n, amplitude):
    """Closed saddle-shaped curve of length 2pi with zero total torsion."""

    def func(x):
        return np.stack([np.cos(x), np.sin(x), amplitude * np.cos(2 * x)], axis=1)

    curve = FilamentCurve.from_parametric(func, n)
    return FilamentCurve(curve.gamma / curve.speed)


def _hasimoto_nls(cfg):
    metrics = []
    circle = FilamentCurve.circle(cfg.n)
    ks, taus, psis, _ = _evolve_curve(circle, cfg.circle_dt, cfg.circle_t_final)
    moduli = np.abs(np.array(psis))
    metrics.append(Metric("circle_modulus_variation", float(np.max(np.abs(moduli - moduli[0, 0]))), cfg.tol_modulus))
    r_mod, r_phase, rates = _nls_residuals(ks, taus, circle.speed, cfg.circle_dt, cfg.perturb)
    metrics.append(Metric("circle_phase_rate_error", float(np.max(np.abs(rates - 0.5))), cfg.tol_rate))
    metrics += _norms("circle_nls_residual", np.concatenate([r_mod, r_phase]), cfg.tol)

    start = saddle_curve(cfg.n, cfg.amplitude)
    sups, last = [], None
    for dt in cfg.dts:
        ks, taus, _, _ = _evolve_curve(start, dt, cfg.t_final)
        r_mod, r_phase, _ = _nls_residuals(ks, taus, start.speed, dt, cfg.perturb)
        last = np.concatenate([r_mod, r_phase])
        sups.append(float(np.max(np.abs(last))))
    metrics += _norms("nls_residual", last, cfg.tol)
    orders = _orders(sups)
    metrics.append(Metric("order_deficit", max(cfg.min_order - p for p in orders), 0.0))
    return metrics, {"phase_rate": float(np.mean(rates)), "residuals_sup": sups, "orders": orders}


@dataclass(frozen=True)
class TwoHSConfig:
    n: int = 128
    psi0_modulus: str = "1 + 0.15*cos(x)"
    psi0_phase: str = "0.3*sin(x)"
    v0_real: str = "0.2*sin(2*x) + 0.1*cos(x)"
    v0_imag: str = "0.3*cos(2*x) - 0.2*sin(x)"
    t_final: float = 0.5
    samples: int = 11
    fd_step: float = 1e-3
    hs_steps: int = 50
    hs_dt: float = 1e-3
    tol: float = 1e-6
    tol_sigma: float = 1e-10
    tol_roundtrip: float = 1e-12
    # scales the sigma coupling of the 2HS momentum equation
    perturb: float = 1.0


def _fs_initial(cfg):
    n = cfg.n
    psi0 = normalize(eval_expression(cfg.psi0_modulus, n) * np.exp(1j * eval_expression(cfg.psi0_phase, n)))
    v0 = eval_expression(cfg.v0_real, n) + 1j * eval_expression(cfg.v0_imag, n)
    v0 = v0 - inner(psi0, v0) * psi0
    return psi0, v0


def lenells_inverse(psi):
    """``psi -> (phi_x, alpha)`` with ``alpha = 2 arg psi`` unwrapped."""
    return np.abs(psi) ** 2, 2 * unwrapped_phase(psi)


def twohs_fields(psi, psi_dot):
    """Eulerian ``(u, sigma)`` of the group curve whose Lenells image is psi."""
    n = len(psi)
    x = nodes(n)
    phi_x = np.abs(psi) ** 2
    phi_x_dot = 2 * np.real(np.conj(psi) * psi_dot)
    alpha_dot = 2 * np.imag(psi_dot / psi)
    A = antiderivative(phi_x - 1.0)
    A_dot = antiderivative(phi_x_dot)
    # Diff_0 gauge: phi(t, 0) = 0
    phi_dot = A_dot - A_dot[0]
    xi = _invert_lift(A, -A[0], x)
    return evaluate(phi_dot, xi), evaluate(alpha_dot, xi)


def _twohs_sasaki(cfg):
    psi0, v0 = _fs_initial(cfg)
    h = cfg.fd_step
    times = np.linspace(0.0, cfg.t_final, cfg.samples)
    residuals, sigma_means, roundtrip = [], [], 0.0
    for t in times:
        us, sigmas = [], []
        for j in range(-2, 3):
            s = t + j * h
            psi = fs_geodesic(psi0, v0, s)
            u, sigma = twohs_fields(psi, fs_geodesic_velocity(psi0, v0, s))
            us.append(u)
            sigmas.append(sigma)
            if j == 0:
                phi_x, alpha = lenells_inverse(psi)
                back = lenells_map(phi_x, alpha)
                roundtrip = max(roundtrip, projective_distance(psi, back))
                sigma_means.append(abs(integrate(sigma)))
        u, sigma = us[2], sigmas[2]
        u_dot = _central_first(np.array(us)[None], h)[0]
        sigma_dot = _central_first(np.array(sigmas)[None], h)[0]
        ux, uxx, uxxx = (spectral_derivative(u, k) for k in (1, 2, 3))
        residuals.append(spectral_derivative(u_dot, 2) + 2 * ux * uxx + u * uxxx - cfg.perturb * sigma * spectral_derivative(sigma))
        residuals.append(sigma_dot + spectral_derivative(sigma * u))
    metrics = _norms("twohs_residual", residuals, cfg.tol)
    metrics.append(Metric("lenells_roundtrip", roundtrip, cfg.tol_roundtrip))
    metrics.append(Metric("sigma_mean", max(sigma_means), cfg.tol_sigma))

    # sigma = 0 stays zero under the 2HS flow
    x = nodes(cfg.n)
    u = 0.3 * np.sin(x) + 0.1 * np.sin(2 * x)
    state = TwoHSState(u - u[0], np.zeros(cfg.n))
    for _ in range(cfg.hs_steps):
        state = step_2hs(state, cfg.hs_dt)
    metrics.append(Metric("sigma_zero_invariance", float(np.max(np.abs(state.sigma))), cfg.tol_sigma))
    return metrics, {"fs_speed": l2_norm(v0)}


@dataclass(frozen=True)
class MuchConfig:
    n: int = 128
    rho0: str = "1 + 0.3*cos(x)"
    rho1: str = "1 + 0.3*sin(2*x)"
    times: tuple = (0.1, 0.3, 0.5, 0.7, 0.9)
    fd_step: float = 1e-3
    quadrature_nodes: int = 40
    tol: float = 1e-6
    tol_mean: float = 1e-10
    transport_sign: int = CONVENTIONS["transport_sign"]
    # scales the stretching term 2 u' m
    perturb: float = 1.0


def much_lift(rho0, rho1, t, quadrature_nodes=40, transport_sign=1):
    """Horizontal Eulerian velocity of the lift of the Fisher-Rao great circle.

    With ``transport_sign = +1`` the density is the pullback ``rho = phi_x`` and
    the rotation ambiguity of ``phi`` is removed by requiring mean-zero ``u``.
    ``-1`` is the pushforward alternative, kept for the convention oracle.
    """
    n = len(rho0)

    def phase_velocity(s):
        rho, rho_dot, _ = fisher_rao_geodesic_derivatives(rho0, rho1, s)
        A_dot = antiderivative(rho_dot)
        return rho, A_dot, -integrate(A_dot * rho)

    rho, A_dot, c_dot = phase_velocity(t)
    if transport_sign < 0:
        return -(A_dot + c_dot) / rho
    # phi(t) = x + A(t) + c(t), c(0) = 0, c' = -integrate(A_dot rho)
    g, w = np.polynomial.legendre.leggauss(quadrature_nodes)
    c = 0.5 * t * sum(wi * phase_velocity(0.5 * t * (gi + 1))[2] for gi, wi in zip(g, w)) if t > 0 else 0.0
    A = antiderivative(rho - 1.0)
    xi = _invert_lift(A, c, nodes(n))
    return evaluate(A_dot + c_dot, xi)


def much_residual(rho0, rho1, t, h, quadrature_nodes=40, transport_sign=1, perturb=1.0):
    us = [much_lift(rho0, rho1, t + j * h, quadrature_nodes, transport_sign) for j in range(-2, 3)]
    ms = np.array([inertia(u) for u in us])
    m_dot = _central_first(ms[None], h)[0]
    u, m = us[2], ms[2]
    return m_dot + u * spectral_derivative(m) + 2 * perturb * spectral_derivative(u) * m, u


def _much_horizontal(cfg):
    rho0 = normalize_density(eval_expression(cfg.rho0, cfg.n))
    rho1 = normalize_density(eval_expression(cfg.rho1, cfg.n))
    residuals, means = [], []
    for t in cfg.times:
        r, u = much_residual(rho0, rho1, t, cfg.fd_step, cfg.quadrature_nodes, cfg.transport_sign, cfg.perturb)
        residuals.append(r)
        means.append(abs(integrate(u)))
    metrics = _norms("much_residual", residuals, cfg.tol)
    metrics.append(Metric("velocity_mean", max(means), cfg.tol_mean))
    return metrics, {"distance": bhattacharyya_angle(rho0, rho1)}


@dataclass(frozen=True)
class HamiltonJacobiConfig:
    n: int = 64
    V: str = "cos(x)"
    rho0: str = "1"
    theta0: str = "0.2*sin(x)"
    t_final: float = 1.0
    dts: tuple = (0.04, 0.02, 0.01)
    particles: int = 16
    tol: float = 1e-5
    min_order: float = 2.0
    # scales the force V' in the characteristic equation
    perturb: float = 1.0


def characteristics(cfg, dt):
    """Trace ``x' = theta_x(t, x)`` along the hydro run; returns (times, paths, V')."""
    n = cfg.n
    V = eval_expression(cfg.V, n)
    p = CotangentPoint.gauged(normalize_density(eval_expression(cfg.rho0, n)), eval_expression(cfg.theta0, n))
    spec = PotentialSpec.of(Classical(V))
    state = HydroState(p.rho, p.theta)
    steps = int(round(cfg.t_final / dt))
    steps -= steps % 2
    velocities = [spectral_derivative(state.theta)]
    for _ in range(steps):
        state = step_hydro(state, spec, dt)
        velocities.append(spectral_derivative(state.theta))
    x = nodes(n)[:: n // cfg.particles].copy()
    paths = [x.copy()]
    H = 2 * dt
    for i in range(0, steps, 2):
        v0, vm, v1 = velocities[i], velocities[i + 1], velocities[i + 2]
        k1 = evaluate(v0, x)
        k2 = evaluate(vm, x + H / 2 * k1)
        k3 = evaluate(vm, x + H / 2 * k2)
        k4 = evaluate(v1, x + H * k3)
        x = x + H / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        paths.append(x.copy())
    return np.array(paths), H, spectral_derivative(V)


def _hamilton_jacobi(cfg):
    sups, last = [], None
    for dt in cfg.dts:
        paths, H, dV = characteristics(cfg, dt)
        res = []
        for i in range(2, len(paths) - 2):
            acc = _central_second(_stencil(paths, i), H)
            res.append(acc + cfg.perturb * evaluate(dV, paths[i]))
        last = np.array(res)
        sups.append(float(np.max(np.abs(last))))
    metrics = _norms("newton_residual", last, cfg.tol)
    orders = _orders(sups)
    metrics.append(Metric("order_deficit", max(cfg.min_order - p for p in orders), 0.0))
    return metrics, {"residuals_sup": sups, "orders": orders}


@dataclass(frozen=True)
class FRGeodesicConfig:
    n: int = 64
    rho0: str = "1"
    rho1: str = "1 + 0.5*sin(x)"
    times: tuple = (0.1, 0.25, 0.5, 0.75, 0.9)
    fd_step: float = 1e-3
    quadrature_nodes: int = 20
    tol_distance: float = 1e-12
    tol: float = 1e-8
    # scales the reported distance and the Newton acceleration
    perturb: float = 1.0


def _fr_geodesic(cfg):
    from .densities import fisher_rao_metric

    rho0 = normalize_density(eval_expression(cfg.rho0, cfg.n))
    rho1 = normalize_density(eval_expression(cfg.rho1, cfg.n))
    _, d = fisher_rao_geodesic(rho0, rho1, 0.0)
    d *= cfg.perturb
    # length of the curve measured with the Fisher-Rao metric itself
    g, w = np.polynomial.legendre.leggauss(cfg.quadrature_nodes)
    length = 0.0
    for gi, wi in zip(g, w):
        rho, rho_dot, _ = fisher_rao_geodesic_derivatives(rho0, rho1, 0.5 * (gi + 1))
        length += 0.5 * wi * math.sqrt(fisher_rao_metric(rho, rho_dot, rho_dot))
    # Bhattacharyya overlap recomputed on a refined grid, independent of the geodesic code
    fine = [normalize_density(eval_expression(e, 4 * cfg.n)) for e in (cfg.rho0, cfg.rho1)]
    overlap = integrate(np.sqrt(fine[0] * fine[1]))
    metrics = [
        Metric("distance_vs_arccos", abs(d - math.acos(min(overlap, 1.0))), cfg.tol_distance),
        Metric("length_vs_distance", abs(length - d), cfg.tol_distance),
    ]
    empty = PotentialSpec()
    residuals = []
    h = cfg.fd_step
    for t in cfg.times:
        rhos = [fisher_rao_geodesic(rho0, rho1, t + j * h)[0] for j in range(-2, 3)]
        residuals.append(_fisher_newton_residual(rhos, h, empty, cfg.perturb)[0])
    metrics += _norms("newton_residual", residuals, cfg.tol)
    return metrics, {"distance": d, "length": length}


CORRESPONDENCES = {
    "neumann_fisher": (NeumannFisherConfig, _neumann_fisher),
    "hasimoto_nls": (HasimotoConfig, _hasimoto_nls),
    "twohs_sasaki": (TwoHSConfig, _twohs_sasaki),
    "much_horizontal": (MuchConfig, _much_horizontal),
    "hamilton_jacobi": (HamiltonJacobiConfig, _hamilton_jacobi),
    "fr_geodesic": (FRGeodesicConfig, _fr_geodesic),
}


def check_correspondence(kind, cfg=None):
    if kind not in CORRESPONDENCES:
        raise ConfigError(f"unknown correspondence {kind!r}")
    cls, body = CORRESPONDENCES[kind]
    cfg = cfg if cfg is not None else cls()
    return _timed(kind, cfg, lambda: body(cfg))


# --- conservation ----------------------------------------------------------


@dataclass(frozen=True)
class ConservationConfig:
    mass_tol: float = 1e-12
    norm_tol: float = 1e-12
    hamiltonian_tol: float = 1e-8


def conservation_report(run, cfg=ConservationConfig()):
    """Drift audit of the conserved quantities recorded in a run manifest.

    ``run`` is a RunManifest or its dict form. Hamiltonian drift is relative
    to the initial value when that is nonzero.
    """
    data = run.to_dict() if hasattr(run, "to_dict") else run
    snaps = data.get("snapshots") or []
    if not snaps:
        raise MissingSnapshots("run manifest holds no snapshots")

    def body():
        metrics, info = [], {"snapshots": len(snaps)}
        bounds = {
            "mass": cfg.mass_tol,
            "norm": cfg.norm_tol,
            "momentum_mean": cfg.mass_tol,
            "sigma_mean": cfg.mass_tol,
            "hamiltonian": cfg.hamiltonian_tol,
        }
        for key, tol in bounds.items():
            series = [s[key] for s in snaps if key in s]
            if not series:
                continue
            ref = series[0]
            drift = max(abs(v - ref) for v in series)
            if key == "hamiltonian" and ref != 0:
                drift /= abs(ref)
            info[f"{key}_series"] = series
            metrics.append(Metric(f"{key}_drift", drift, tol))
        return metrics, info

    report = _timed("conservation_report", cfg, body)
    report.config["equation"] = data.get("config", {}).get("equation")
    return report


@dataclass(frozen=True)
class ConservationSuiteConfig:
    n: int = 64
    schrodinger_steps: int = 10_000
    schrodinger_dt: float = 1e-3
    hydro_steps: int = 1000
    hydro_dt: float = 1e-3
    drift_dts: tuple = (0.02, 0.01)
    drift_t_final: float = 0.5
    tol: float = 1e-12
    ratio_low: float = 12.0
    ratio_high: float = 20.0


def _initial_hydro(n):
    x = nodes(n)
    return CotangentPoint.gauged(1 + 0.2 * np.cos(x), 0.1 * np.sin(x))


def _hydro_drift(n, dt, t_final):
    """Largest relative Hamiltonian deviation along an RK4 hydro run with V = cos."""
    spec = PotentialSpec.of(Classical(np.cos(nodes(n))))
    p = _initial_hydro(n)
    state = HydroState(p.rho, p.theta)
    h0 = evaluate_hamiltonian("hydro", state, spec)
    worst = 0.0
    for _ in range(int(round(t_final / dt))):
        state = step_hydro(state, spec, dt)
        worst = max(worst, abs(evaluate_hamiltonian("hydro", state, spec) - h0))
    return worst / abs(h0)


def check_conservation(cfg=ConservationSuiteConfig()):
    def body():
        n = cfg.n
        x = nodes(n)
        psi = normalize(np.exp(1j * np.sin(x)) * (1 + 0.3 * np.cos(x)))
        V = np.cos(x)
        nonlin = PolynomialNonlinearity((0.0, 1.0))
        norm0 = l2_norm(psi)
        for _ in range(cfg.schrodinger_steps):
            psi = step_schrodinger(psi, V, nonlin, cfg.schrodinger_dt)
        norm_drift = abs(l2_norm(psi) - norm0)

        p = _initial_hydro(n)
        spec = PotentialSpec.of(Classical(V))
        hydro = HydroState(p.rho, p.theta)
        baro = BarotropicState(p.rho, spectral_derivative(p.theta))
        law = AffineEnergy(0.5)
        for _ in range(cfg.hydro_steps):
            hydro = step_hydro(hydro, spec, cfg.hydro_dt)
            baro = step_barotropic(baro, law, cfg.hydro_dt)
        hydro_mass = abs(integrate(hydro.rho) - 1.0)
        baro_mass = abs(integrate(baro.rho) - 1.0)

        drifts = [_hydro_drift(n, dt, cfg.drift_t_final) for dt in cfg.drift_dts]
        ratios = _ratios(drifts)
        mid = 0.5 * (cfg.ratio_low + cfg.ratio_high)
        half = 0.5 * (cfg.ratio_high - cfg.ratio_low)
        metrics = [
            Metric("schrodinger_norm_drift", norm_drift, cfg.tol),
            Metric("hydro_mass_drift", hydro_mass, cfg.tol),
            Metric("barotropic_mass_drift", baro_mass, cfg.tol),
            Metric("rk4_drift_ratio_deviation", max(abs(r - mid) for r in ratios), half),
        ]
        return metrics, {"hamiltonian_drifts": drifts, "drift_ratios": ratios}

    return _timed("conservation", cfg, body)


CHECKS = {
    "kahler": (KahlerConfig, check_kahler),
    "conjugacy": (ConjugacyConfig, check_conjugacy),
    "conservation": (ConservationSuiteConfig, check_conservation),
}
for _kind, (_cls, _) in CORRESPONDENCES.items():
    CHECKS[_kind] = (_cls, lambda cfg, _k=_kind: check_correspondence(_k, cfg))


def run_check(name, mapping=None, tol=None):
    """Run a named check from a JSON-style config mapping; ``tol`` overrides the primary tolerance."""
    key = name.replace("-", "_")
    if key not in CHECKS:
        raise ConfigError(f"unknown check {name!r}; choose from {sorted(CHECKS)}")
    cls, fn = CHECKS[key]
    cfg = config_from_mapping(cls, mapping or {})
    if tol is not None:
        cfg = replace(cfg, tol=float(tol))
    return fn(cfg)
