"""Command-line front end: observable sweeps, oracle cross-checks,
Mittag-Leffler evaluation, and the self-check suite.

Wire format: CSV with first line ``# frac-rabi v1``, then a column
header row, then data rows with 12 significant digits, LF endings, and
deterministic byte output for a fixed configuration.  The time column
is always the dimensionless product omega*t.  ``--format json`` mirrors
the rows as an array of objects.

Configuration is resolved in three layers: built-in defaults (matching
the published sweep parameters: lambda=0.1, omega_drive=omega,
theta=pi/2, t in [0, 20] on 801 points), then a flat key=value config
file (``--config`` or the FRAC_RABI_CONFIG environment variable), then
command-line flags.

Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, FracRabiError
from .mlf import beta_integral, log_gamma, ml_one, ml_two, ml_two_info
from .tls import (RabiParams, SpinState, autocorrelation, bloch,
                  exact_rabi_state, state_from_angle)
from .static import StaticEvolution, static_polarization, static_state
from .driven import (driven_observables, driven_state, fidelity,
                     fidelity_resonant, p_alpha_quadrature, p_alpha_series,
                     _adaptive_gk, _ray_cache)
from .volterra import (OracleConfig, SCHEMES, driven_hamiltonian,
                       oracle_observables, solve_ftse, static_hamiltonian)

BANNER = "# frac-rabi v1"
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2

_STATIC_ALPHAS = tuple(round(0.2 + 0.1 * k, 1) for k in range(9))
_DRIVEN_ALPHAS = (0.6, 0.8, 0.9, 1.0)
_OUTPUT_ORDER = ("sx", "sy", "sz", "A", "F", "F_res")


@dataclass
class RunConfig:
    """Resolved sweep parameters for one invocation."""
    mode: str
    alpha_list: tuple[float, ...]
    theta: float = math.pi / 2.0
    lam: float = 0.1
    omega_drive_over_omega: float = 1.0
    t_max_in_omega_t: float = 20.0
    n_points: int = 801
    outputs: tuple[str, ...] = ()
    fmt: str = "csv"
    out: str = "-"
    check: bool = False
    # oracle-only knobs
    n_steps: int = 1024
    scheme: str = "trapezoidal_product"
    hamiltonian: str = "static"
    picard_order: int = 0

    def validate(self) -> None:
        if not self.alpha_list:
            raise DomainError("alpha list must be nonempty")
        for a in self.alpha_list:
            if not (0.0 < a <= 1.0):
                raise DomainError(f"alpha={a} outside (0, 1]")
        if not (0.0 <= self.theta < math.pi):
            raise DomainError(f"theta={self.theta} outside [0, pi)")
        if self.lam < 0.0:
            raise DomainError(f"lambda={self.lam} must be >= 0")
        if self.omega_drive_over_omega < 0.0:
            raise DomainError("omega-drive ratio must be >= 0")
        if not self.t_max_in_omega_t > 0.0:
            raise DomainError(f"t-max={self.t_max_in_omega_t} must be > 0")
        if self.n_points < 2:
            raise DomainError(f"n-points={self.n_points} must be >= 2")
        for name in self.outputs:
            if name not in _OUTPUT_ORDER:
                raise DomainError(f"unknown output column {name!r}")
        if "F_res" in self.outputs and \
                abs(self.omega_drive_over_omega - 2.0) > 1e-12:
            raise DomainError("F_res requires the resonant drive "
                              "--omega-drive 2")
        if self.fmt not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {self.fmt}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}")
        if self.hamiltonian not in ("static", "driven"):
            raise DomainError("hamiltonian must be static or driven")
        if self.n_steps < 16:
            raise DomainError(f"n-steps={self.n_steps} must be >= 16")
        if self.picard_order < 0:
            raise DomainError(f"picard-order={self.picard_order} must be >= 0")

    def params(self) -> RabiParams:
        # natural units: delta = hbar = 1, so omega = 1 and t is omega*t
        return RabiParams(delta=1.0, xi=self.lam,
                          omega_drive=self.omega_drive_over_omega, hbar=1.0)

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max_in_omega_t, self.n_points)


# ----------------------------------------------------------- config layers

_FILE_KEYS = ("alpha", "theta", "lambda", "omega_drive", "t_max", "n_points",
              "outputs", "format", "out", "n_steps", "scheme", "hamiltonian",
              "picard_order")


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise DomainError(
                        f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in _FILE_KEYS:
                    raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = val.strip()
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}") from exc
    return values


def _parse_alpha_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise DomainError(f"bad alpha list {text!r}") from exc


def _parse_outputs(text: str) -> tuple[str, ...]:
    names = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    known = tuple(n for n in _OUTPUT_ORDER if n in names)
    # unknown tokens ride along so validate() can reject them by name
    return known + tuple(n for n in names if n not in _OUTPUT_ORDER)


def _build_config(mode: str, args: argparse.Namespace) -> RunConfig:
    if mode == "static":
        cfg = RunConfig(mode=mode, alpha_list=_STATIC_ALPHAS,
                        outputs=("sx", "sy", "sz"))
    elif mode == "driven":
        cfg = RunConfig(mode=mode, alpha_list=_DRIVEN_ALPHAS,
                        outputs=("sx", "sy", "sz", "A", "F"))
    else:
        cfg = RunConfig(mode=mode, alpha_list=(0.8,), t_max_in_omega_t=10.0,
                        outputs=("sx", "sy", "sz", "A"))

    path = getattr(args, "config", None) or os.environ.get("FRAC_RABI_CONFIG")
    file_vals = _read_config_file(path) if path else {}

    def pick(flag_name: str, file_key: str):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        return file_vals.get(file_key)

    try:
        v = pick("alpha", "alpha")
        if v is not None:
            cfg.alpha_list = _parse_alpha_list(v) if isinstance(v, str) else v
        v = pick("theta", "theta")
        if v is not None:
            cfg.theta = float(v)
        v = pick("lam", "lambda")
        if v is not None:
            cfg.lam = float(v)
        v = pick("omega_drive", "omega_drive")
        if v is not None:
            cfg.omega_drive_over_omega = float(v)
        v = pick("t_max", "t_max")
        if v is not None:
            cfg.t_max_in_omega_t = float(v)
        v = pick("n_points", "n_points")
        if v is not None:
            cfg.n_points = int(v)
        v = pick("outputs", "outputs")
        if v is not None:
            cfg.outputs = _parse_outputs(v) if isinstance(v, str) else v
        v = pick("fmt", "format")
        if v is not None:
            cfg.fmt = str(v)
        v = pick("out", "out")
        if v is not None:
            cfg.out = str(v)
        v = pick("n_steps", "n_steps")
        if v is not None:
            cfg.n_steps = int(v)
        v = pick("scheme", "scheme")
        if v is not None:
            cfg.scheme = str(v)
        v = pick("hamiltonian", "hamiltonian")
        if v is not None:
            cfg.hamiltonian = str(v)
        v = pick("picard_order", "picard_order")
        if v is not None:
            cfg.picard_order = int(v)
    except ValueError as exc:
        raise DomainError(f"bad configuration value: {exc}") from exc

    cfg.check = bool(getattr(args, "check", False))
    cfg.validate()
    return cfg


# ------------------------------------------------------------- emission

def _fmt(value: float) -> str:
    if value == 0.0:
        value = 0.0          # canonicalize -0.0
    return f"{value:.12g}"


def _emit(cfg: RunConfig, columns: list[str], rows: list[tuple],
          summary: list[str] | None = None) -> None:
    if cfg.fmt == "json":
        payload = {"version": "frac-rabi v1",
                   "mode": cfg.mode,
                   "rows": [dict(zip(columns, row)) for row in rows]}
        if summary:
            payload["summary"] = summary
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        lines = [BANNER, ",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        if summary:
            lines += [f"# {s}" for s in summary]
        text = "\n".join(lines) + "\n"
    if cfg.out in ("-", "stdout"):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _sweep(cells, worker) -> dict:
    """Evaluate worker over grid cells concurrently; results keyed by
    cell so emission order is deterministic regardless of completion
    order.  Failures are re-raised naming the offending cell."""

    def run(cell):
        try:
            return worker(*cell)
        except FracRabiError as exc:
            raise type(exc)(
                f"cell alpha={cell[0]}, omega*t={cell[1]}: {exc}") from exc

    results = {}
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        for key, value in zip(cells, pool.map(run, cells)):
            results[key] = value
    return results


# ----------------------------------------------------------- subcommands

def cmd_static(cfg: RunConfig) -> int:
    params = cfg.params()
    ts = cfg.t_grid()
    cells = [(a, float(t)) for a in cfg.alpha_list for t in ts]

    def worker(a: float, t: float):
        ev = StaticEvolution(a, params, state_from_angle(cfg.theta))
        return static_polarization(ev, t)

    try:
        values = _sweep(cells, worker)
    except FracRabiError as exc:
        print(f"static sweep failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    columns = ["alpha", "t"] + [c for c in cfg.outputs if c in ("sx", "sy", "sz")]
    rows = []
    for a, t in cells:
        bv = values[(a, t)]
        named = {"sx": bv.sx, "sy": bv.sy, "sz": bv.sz}
        rows.append((a, t) + tuple(named[c] for c in columns[2:]))

    if cfg.check:
        bad = _check_static_rows(cfg, params)
        if bad:
            print(f"static --check failed: {bad}", file=sys.stderr)
            return EXIT_NUMERICAL
    _emit(cfg, columns, rows)
    return EXIT_OK


def _check_static_rows(cfg: RunConfig, params: RabiParams) -> str | None:
    """Closed-form polarization against the normalized state route."""
    init = state_from_angle(cfg.theta)
    for a in cfg.alpha_list:
        ev = StaticEvolution(a, params, init)
        for t in (0.0, 0.5 * cfg.t_max_in_omega_t, cfg.t_max_in_omega_t):
            direct = static_polarization(ev, t)
            via_state = bloch(static_state(ev, t))
            dev = max(abs(direct.sx - via_state.sx),
                      abs(direct.sy - via_state.sy),
                      abs(direct.sz - via_state.sz))
            if dev > 1e-10:
                return f"two-path polarization deviation {dev:.2e} at " \
                       f"alpha={a}, t={t}"
    return None


def cmd_driven(cfg: RunConfig) -> int:
    params = cfg.params()
    ts = cfg.t_grid()
    cells = [(a, float(t)) for a in cfg.alpha_list for t in ts]
    want_res = "F_res" in cfg.outputs

    def worker(a: float, t: float):
        sample = driven_observables(a, params, cfg.theta, t)
        f_res = fidelity_resonant(a, params, cfg.theta, t) if want_res else None
        return sample, f_res

    try:
        values = _sweep(cells, worker)
    except FracRabiError as exc:
        print(f"driven sweep failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    columns = ["alpha", "t"] + list(cfg.outputs)
    rows = []
    for a, t in cells:
        sample, f_res = values[(a, t)]
        named = {"sx": sample.sx, "sy": sample.sy, "sz": sample.sz,
                 "A": sample.A, "F": sample.F, "F_res": f_res}
        rows.append((a, t) + tuple(named[c] for c in cfg.outputs))

    if cfg.check:
        bad = _check_driven_rows(cells, values)
        if bad:
            print(f"driven --check failed: {bad}", file=sys.stderr)
            return EXIT_NUMERICAL
    _emit(cfg, columns, rows)
    return EXIT_OK


def _check_driven_rows(cells, values) -> str | None:
    for (a, t), (sample, _) in values.items():
        norm = sample.sx ** 2 + sample.sy ** 2 + sample.sz ** 2
        if norm > 1.0 + 1e-9:
            return f"Bloch norm {norm} > 1 at alpha={a}, t={t}"
        for name in ("A", "F"):
            v = getattr(sample, name)
            if not -1e-9 <= v <= 1.0 + 1e-9:
                return f"{name}={v} outside [0, 1] at alpha={a}, t={t}"
        if t == 0.0 and (abs(sample.A - 1.0) > 1e-12
                         or abs(sample.F - 1.0) > 1e-12):
            return f"A(0)/F(0) != 1 at alpha={a}"
    return None


def cmd_oracle(cfg: RunConfig) -> int:
    params = cfg.params()
    init = state_from_angle(cfg.theta)
    columns = ["alpha", "t", "sx", "sy", "sz", "A"]
    rows: list[tuple] = []
    summary: list[str] = []
    try:
        for a in cfg.alpha_list:
            ocfg = OracleConfig(n_steps=cfg.n_steps,
                                t_max=cfg.t_max_in_omega_t,
                                scheme=cfg.scheme,
                                picard_order=cfg.picard_order)
            if cfg.hamiltonian == "static":
                h = static_hamiltonian(a, params)
            else:
                h = driven_hamiltonian(a, params)
            sol = solve_ftse(a, h, init, ocfg)
            stride = max(1, cfg.n_steps // (cfg.n_points - 1))
            samples = oracle_observables(sol, stride=stride)
            rows += [(a, s.t, s.sx, s.sy, s.sz, s.A) for s in samples]
            max_dev = _oracle_deviation(a, cfg, params, init, sol, stride)
            order = sol.est_order
            if cfg.check and math.isfinite(order) and order < 0.9:
                print(f"oracle --check failed: est_order={order:.3f} < 0.9 "
                      f"at alpha={a}", file=sys.stderr)
                return EXIT_NUMERICAL
            summary.append(
                f"summary alpha={_fmt(a)} scheme={cfg.scheme} "
                f"hamiltonian={cfg.hamiltonian} max_dev={max_dev:.6e} "
                f"est_order={order:.3f}")
        summary.append(f"summary lambda_sq_ratio={_lambda_sq_ratio(cfg):.3f}")
    except FracRabiError as exc:
        print(f"oracle run failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(cfg, columns, rows, summary)
    return EXIT_OK


def _oracle_deviation(a: float, cfg: RunConfig, params: RabiParams,
                      init: SpinState, sol, stride: int) -> float:
    """Max amplitude deviation from the analytic reference: the static
    Mittag-Leffler solution, the exact alpha=1 evolution, or (alpha < 1,
    driven) the normalized leading-order state."""
    arr = sol.as_array()
    worst = 0.0
    for k in range(0, len(sol.times), stride):
        t = float(sol.times[k])
        if cfg.hamiltonian == "static":
            ref = static_state(StaticEvolution(a, params, init), t)
            ref_vec = np.array([ref.c_plus, ref.c_minus])
            num_vec = arr[k]
        elif a == 1.0:
            ref = exact_rabi_state(params, init, t)
            ref_vec = np.array([ref.c_plus, ref.c_minus])
            num_vec = arr[k]
        else:
            ds = driven_state(a, params, init, t)
            ref_vec = np.array([ds.g_plus, ds.g_minus])
            nrm = math.sqrt(float(np.sum(np.abs(arr[k]) ** 2)))
            num_vec = arr[k] / nrm
        worst = max(worst, float(np.max(np.abs(num_vec - ref_vec))))
    return worst


def _lambda_sq_ratio(cfg: RunConfig) -> float:
    """Leading-order validation: deviation from the normalized oracle
    should scale as lambda^2 (ratio ~ 4 between lambda and lambda/2),
    measured at the integer-order anchor."""
    lam = cfg.lam if cfg.lam > 0.0 else 0.1
    init = state_from_angle(cfg.theta)
    t_max = min(cfg.t_max_in_omega_t, 10.0)
    devs = []
    for factor in (1.0, 0.5):
        params = RabiParams(delta=1.0, xi=lam * factor,
                            omega_drive=cfg.omega_drive_over_omega, hbar=1.0)
        ocfg = OracleConfig(n_steps=2048, t_max=t_max,
                            scheme="trapezoidal_product")
        sol = solve_ftse(1.0, driven_hamiltonian(1.0, params), init, ocfg)
        arr = sol.as_array()
        worst = 0.0
        for k in range(64, 2049, 64):
            t = float(sol.times[k])
            ds = driven_state(1.0, params, init, t)
            nrm = math.sqrt(float(np.sum(np.abs(arr[k]) ** 2)))
            dev = np.abs(arr[k] / nrm - np.array([ds.g_plus, ds.g_minus]))
            worst = max(worst, float(np.max(dev)))
        devs.append(worst)
    return devs[0] / devs[1] if devs[1] > 0 else float("nan")


def cmd_ml_eval(args: argparse.Namespace) -> int:
    z = complex(args.z_re, args.z_im)
    try:
        value, regime, count, est = ml_two_info(args.ml_alpha, args.ml_beta, z)
        if getattr(args, "check", False):
            # recurrence identity E_{a,b}(z) = z E_{a,a+b}(z) + 1/Gamma(b)
            shifted = ml_two(args.ml_alpha, args.ml_alpha + args.ml_beta, z)
            recon = z * shifted + math.exp(-log_gamma(args.ml_beta))
            if abs(value - recon) > 1e-8 * max(1.0, abs(value)):
                print(f"ml --check failed: recurrence deviation "
                      f"{abs(value - recon):.2e}", file=sys.stderr)
                return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"invalid ML arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"ML evaluation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if getattr(args, "fmt", None) == "json":
        print(json.dumps({"re": value.real, "im": value.imag,
                          "regime": regime, "terms": count,
                          "est_rel_error": est}, sort_keys=True))
    else:
        print(f"E_({_fmt(args.ml_alpha)},{_fmt(args.ml_beta)})"
              f"({_fmt(z.real)}{z.imag:+.12g}j) = "
              f"{_fmt(value.real)}{value.imag:+.12g}j")
        print(f"regime = {regime}")
        print(f"terms = {count}")
        print(f"est_rel_error = {est:.3e}")
    return EXIT_OK


# ------------------------------------------------------------- check mode

def _check_ml_identities() -> str | None:
    rng = np.random.default_rng(202)
    for _ in range(20):
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if abs(ml_one(1.0, z) - cmath.exp(z)) > 1e-10 * abs(cmath.exp(z)):
            return f"E_1 != exp at z={z}"
    for _ in range(40):
        a = rng.uniform(0.2, 1.0)
        b = rng.uniform(0.3, 2.0)
        z = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        lhs = ml_two(a, b, z)
        rhs = z * ml_two(a, a + b, z) + math.exp(-log_gamma(b))
        if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs)):
            return f"recurrence broken at a={a:.3f}, b={b:.3f}, z={z}"
    for x in (0.3, 2.0, 11.0):
        if abs(ml_two(2.0, 1.0, -x * x) - math.cos(x)) > 1e-10:
            return f"E_2(-x^2) != cos(x) at x={x}"
    return None


def _check_beta_integral() -> str | None:
    for a in (0.25, 0.5, 0.7):
        lhs = beta_integral(a, 1.0 - a, 2.0, 1.0)
        rhs = math.exp(log_gamma(a) + log_gamma(1.0 - a))
        if abs(lhs - rhs) > 1e-10 * rhs:
            return f"I_(a,1-a) != Gamma(a)Gamma(1-a) at a={a}"
    return None


def _check_static_dual() -> str | None:
    params = RabiParams(1.0, 0.0, 1.0, 1.0)
    init = state_from_angle(1.1)
    for a in (0.3, 0.7, 1.0):
        ev = StaticEvolution(a, params, init)
        for t in (0.5, 3.0, 12.0):
            d = static_polarization(ev, t)
            s = bloch(static_state(ev, t))
            if max(abs(d.sx - s.sx), abs(d.sy - s.sy), abs(d.sz - s.sz)) > 1e-10:
                return f"static two-path deviation at alpha={a}, t={t}"
    return None


def _check_p_dual() -> str | None:
    for a in (0.4, 0.8):
        for om in (1.0, 2.0):
            params = RabiParams(1.0, 0.1, om, 1.0)
            for t in (2.5, 8.0):
                s = p_alpha_series(a, params, t)
                q = p_alpha_quadrature(a, params, t)
                if abs(s.value - q.value) > 1e-7:
                    return f"series/quadrature split {abs(s.value - q.value):.2e} " \
                           f"at alpha={a}, omega_drive={om}, t={t}"
    return None


def _check_fidelity_dual() -> str | None:
    rng = np.random.default_rng(77)
    for _ in range(20):
        a = rng.uniform(0.3, 1.0)
        th = rng.uniform(0.0, math.pi * 0.999)
        om = rng.uniform(0.3, 2.5)
        t = rng.uniform(0.0, 9.0)
        params = RabiParams(1.0, 0.1, om, 1.0)
        init = state_from_angle(th)
        f1 = fidelity(a, params, th, float(t))
        ds = driven_state(a, params, init, float(t))
        f2 = autocorrelation(exact_rabi_state(params, init, float(t)),
                             SpinState(ds.g_plus, ds.g_minus))
        if abs(f1 - f2) > 1e-9:
            return f"fidelity closed form vs overlap {abs(f1 - f2):.2e} " \
                   f"at alpha={a:.3f}, theta={th:.3f}, t={t:.3f}"
    return None


def _check_oracle_static() -> str | None:
    params = RabiParams(1.0, 0.0, 1.0, 1.0)
    init = state_from_angle(math.pi / 2)
    cfg = OracleConfig(n_steps=1024, t_max=10.0, scheme="trapezoidal_product")
    sol = solve_ftse(0.8, static_hamiltonian(0.8, params), init, cfg)
    arr = sol.as_array()
    worst = 0.0
    for k in range(0, 1025, 16):
        ref = static_state(StaticEvolution(0.8, params, init),
                           float(sol.times[k]))
        worst = max(worst, abs(arr[k, 0] - ref.c_plus),
                    abs(arr[k, 1] - ref.c_minus))
    if worst > 1e-4:
        return f"static oracle deviation {worst:.2e} > 1e-4"
    return None


def _check_oracle_rabi() -> str | None:
    params = RabiParams(1.0, 0.1, 1.0, 1.0)
    init = state_from_angle(math.pi / 2)
    cfg = OracleConfig(n_steps=2048, t_max=5.0, scheme="trapezoidal_product")
    sol = solve_ftse(1.0, driven_hamiltonian(1.0, params), init, cfg)
    arr = sol.as_array()
    worst = 0.0
    for k in range(0, 2049, 16):
        ref = exact_rabi_state(params, init, float(sol.times[k]))
        worst = max(worst, abs(arr[k, 0] - ref.c_plus),
                    abs(arr[k, 1] - ref.c_minus))
    if worst > 1e-5:
        return f"integer-order oracle deviation {worst:.2e} > 1e-5"
    return None


def _check_greens_laplace() -> str | None:
    for a in (0.5, 0.8):
        cache = _ray_cache(a)
        for s in (1.0, 1.0 + 1.0j):
            for sigma in (1, -1):
                u_max = (30.0 / complex(s).real) ** a

                def f(u, _sig=sigma):
                    u = np.maximum(u, 1e-300)
                    e = cache.two_plus(u) if _sig == -1 else \
                        np.conj(cache.two_plus(u))
                    return np.exp(-s * u ** (1.0 / a)) * e / (1j * a)

                val, _err, _n = _adaptive_gk(f, 0.0, u_max, 1e-9)
                s_c = complex(s)
                expected = 1.0 / (1j * (s_c ** a + 1j * sigma))
                if abs(val - expected) > 1e-6:
                    return f"Laplace identity off by {abs(val - expected):.2e} " \
                           f"at alpha={a}, s={s}, sigma={sigma}"
    return None


_CHECKS = (
    ("ml-identities", _check_ml_identities),
    ("beta-integral", _check_beta_integral),
    ("static-dual-path", _check_static_dual),
    ("p-series-vs-quadrature", _check_p_dual),
    ("fidelity-dual-path", _check_fidelity_dual),
    ("oracle-vs-static-analytic", _check_oracle_static),
    ("oracle-vs-exact-rabi", _check_oracle_rabi),
    ("greens-laplace", _check_greens_laplace),
)


def cmd_check(_args: argparse.Namespace) -> int:
    failures = 0
    for name, fn in _CHECKS:
        try:
            problem = fn()
        except FracRabiError as exc:
            problem = str(exc)
        if problem is None:
            print(f"ok   {name}")
        else:
            print(f"FAIL {name}: {problem}")
            failures += 1
    if failures:
        print(f"{failures} of {len(_CHECKS)} check groups failed",
              file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"all {len(_CHECKS)} check groups passed")
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the wire contract
    reserves 2 for numerical failures, so remap to 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_sweep_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha", help="comma-separated fractional orders")
    sub.add_argument("--theta", type=float, help="initial polar angle [0, pi)")
    sub.add_argument("--lambda", dest="lam", type=float,
                     help="dimensionless coupling xi/delta")
    sub.add_argument("--omega-drive", dest="omega_drive", type=float,
                     help="drive frequency in units of omega")
    sub.add_argument("--t-max", dest="t_max", type=float,
                     help="sweep end in units of omega*t")
    sub.add_argument("--n-points", dest="n_points", type=int,
                     help="number of time samples")
    sub.add_argument("--outputs", help="comma-separated columns "
                     "(sx,sy,sz,A,F,F_res)")
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--format", dest="fmt", choices=("csv", "json"))
    sub.add_argument("--out", help="output path, or - for stdout")
    sub.add_argument("--check", action="store_true",
                     help="validate internal invariants before emitting")


def build_parser() -> _Parser:
    parser = _Parser(prog="frac-rabi",
                     description="Fractional-order driven two-level "
                                 "dynamics: sweeps, oracles, checks.")
    subs = parser.add_subparsers(dest="mode", required=True,
                                 parser_class=_Parser)

    p_static = subs.add_parser("static",
                               help="static-splitting polarization sweep")
    _add_sweep_flags(p_static)

    p_driven = subs.add_parser("driven",
                               help="driven observables sweep (Bloch, "
                                    "autocorrelation, fidelity)")
    _add_sweep_flags(p_driven)

    p_oracle = subs.add_parser("oracle",
                               help="Volterra oracle run with summary block")
    _add_sweep_flags(p_oracle)
    p_oracle.add_argument("--n-steps", dest="n_steps", type=int,
                          help="oracle grid steps (>= 16)")
    p_oracle.add_argument("--scheme", choices=SCHEMES)
    p_oracle.add_argument("--hamiltonian", choices=("static", "driven"))
    p_oracle.add_argument("--picard-order", dest="picard_order", type=int)

    p_ml = subs.add_parser("ml",
                           help="evaluate E_{alpha,beta}(z)")
    p_ml.add_argument("ml_alpha", type=float)
    p_ml.add_argument("ml_beta", type=float)
    p_ml.add_argument("z_re", type=float)
    p_ml.add_argument("z_im", type=float)
    p_ml.add_argument("--format", dest="fmt", choices=("csv", "json"))
    p_ml.add_argument("--check", action="store_true")

    subs.add_parser("check",
                    help="run every dual-path assertion; nonzero exit on "
                         "any violation")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode == "ml":
        return cmd_ml_eval(args)
    if args.mode == "check":
        return cmd_check(args)
    try:
        cfg = _build_config(args.mode, args)
    except DomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.mode == "static":
        return cmd_static(cfg)
    if cfg.mode == "driven":
        return cmd_driven(cfg)
    return cmd_oracle(cfg)


if __name__ == "__main__":
    sys.exit(main())
