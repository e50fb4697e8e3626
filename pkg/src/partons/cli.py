"""Command-line driver: verification suites, table generators and reports.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
or configuration errors.  Exploratory rows never fail a run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analytic, coeffs, dirichlet, parton, pmellin, wavelets
from ._arith import primes_below, require_prime

SUITES = ("wavelets", "mellin", "hecke", "parton", "chebyshev", "theta", "bessel",
          "maass", "time-average")
TABLE_KINDS = ("tau", "convolution", "ltable", "maass")


class UsageError(ValueError):
    """Bad flags, grids or config files (exit code 2)."""


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    suite: str = "all"
    primes: str = "2,3,5"
    truncation: int = 10
    precision: int = 12  # significant digits of floats in reports
    modulus: int = 5
    char_index: int = 1
    weight: int = 12
    stream: str = "tau"
    prime: int = 2
    n_max: int = 1000
    s_grid: str = "2,2.5,3"
    t_grid: str = "10,20,40"
    y_grid: str = "0.5,1,2"
    out: str = ""
    format: str = "csv"

    def prime_list(self) -> list[int]:
        try:
            out = [require_prime(int(t)) for t in self.primes.split(",") if t.strip()]
        except ValueError as exc:
            raise UsageError(f"bad prime list {self.primes!r}: {exc}") from None
        if not out:
            raise UsageError("empty prime list")
        return out

    def character(self) -> dirichlet.DirichletCharacter:
        try:
            return dirichlet.character(self.modulus, self.char_index)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def validate(self) -> "RunConfig":
        if self.suite not in SUITES + ("all",):
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}, all")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.truncation < 1 or self.n_max < 0 or self.modulus < 1 or self.precision < 1:
            raise UsageError("truncation, n_max, modulus and precision must be positive")
        self.prime_list()
        for name in ("s_grid", "t_grid", "y_grid"):
            parse_grid(getattr(self, name))
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive linspace)."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            count = int(n)
            if count < 1:
                raise ValueError("count must be positive")
            return [float(v) for v in np.linspace(float(a), float(b), count)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid grid {text!r}: {exc}") from None


def dump_config(config: RunConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in asdict(config).items())


def load_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(value) if _FIELD_TYPES[key] in (int, "int") else value
        except ValueError:
            raise UsageError(f"config line {lineno}: {key} needs an integer") from None
    return replace(base or RunConfig(), **values)


# --------------------------------------------------------------------------
# checks and reports


@dataclass(frozen=True)
class Check:
    name: str
    params: dict
    residual: float
    tolerance: float | None
    exploratory: bool = False

    @property
    def status(self) -> str:
        if self.exploratory:
            return "exploratory"
        ok = math.isfinite(self.residual) and self.residual <= self.tolerance
        return "pass" if ok else "fail"


def _fmt(x, digits: int) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{digits}g}"


def render_report(checks: list[Check], fmt: str, digits: int) -> str:
    checks = sorted(checks, key=lambda c: c.name)
    if fmt == "json":
        rows = [
            {"name": c.name, "params": c.params, "residual": _fmt(c.residual, digits),
             "tolerance": _fmt(c.tolerance, digits), "status": c.status}
            for c in checks
        ]
        summary = {s: sum(c.status == s for c in checks) for s in ("pass", "fail", "exploratory")}
        return json.dumps({"checks": rows, "summary": summary}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "parameters", "residual", "tolerance", "status"])
    for c in checks:
        w.writerow([c.name, json.dumps(c.params, sort_keys=True), _fmt(c.residual, digits),
                    _fmt(c.tolerance, digits), c.status])
    return buf.getvalue()


def _emit(text: str, out: str) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out!r}: {exc}") from None
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# suites


def _suite_wavelets(cfg: RunConfig) -> list[Check]:
    out = []
    for p in cfg.prime_list():
        idx = wavelets.wavelet_window(p, range(-2, 3))
        G = wavelets.gram_matrix([wavelets.kozyrev_wavelet(p, i) for i in idx])
        out.append(Check(f"wavelets/gram/p={p}", {"p": p, "n": "-2..2", "count": len(idx)},
                         float(np.max(np.abs(G - np.eye(len(idx))))), 1e-12))
        for alpha in (0.5, 1.0, 2.0):
            res = max(wavelets.vladimirov_eigencheck(p, n, alpha) for n in range(-2, 3))
            out.append(Check(f"wavelets/vladimirov/p={p}/alpha={alpha}", {"p": p, "alpha": alpha},
                             res, 1e-8))
    return out


def _suite_mellin(cfg: RunConfig) -> list[Check]:
    out = []
    for p in cfg.prime_list():
        for variant in pmellin.VARIANTS:
            sigma = 1.0 if variant == "kozyrev" else 0.0
            worst = 0.0
            for n in (-1, 0, 2):
                psi = pmellin.wavelet_for_variant(p, n, variant)
                for ell in range(p):
                    for t in (0.3, 1.7):
                        s = complex(sigma, t)
                        worst = max(worst, abs(pmellin.mellin_transform(psi, s, ell)
                                               - pmellin.wavelet_mellin_closed_form(p, n, s, ell, variant)))
            out.append(Check(f"mellin/closed-form/{variant}/p={p}", {"p": p, "variant": variant}, worst, 1e-12))
            pts = [Fraction(1, p), Fraction(1), Fraction(p + 1), Fraction(1, p * p)]
            rt = pmellin.wavelet_round_trip_residual(p, 0, pts, variant)
            out.append(Check(f"mellin/round-trip/{variant}/p={p}", {"p": p, "variant": variant}, rt, 1e-8))
        uni = max(abs(pmellin.cp_unitarity_sum(p, t) - 1) for t in np.linspace(0.1, 5.0, 20))
        out.append(Check(f"mellin/unitarity/p={p}", {"p": p, "t_values": 20}, uni, 1e-12))
    return out


def _streams_for(cfg: RunConfig) -> list[coeffs.CoefficientStream]:
    text = cfg.stream
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        main = coeffs.stream_from_descriptor(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad stream {cfg.stream!r}: {exc}") from None
    return [main]


def _suite_hecke(cfg: RunConfig) -> list[Check]:
    out = []
    primes = sorted(set(cfg.prime_list()) | {cfg.prime})
    streams = _streams_for(cfg)
    if cfg.modulus > 1:
        streams += [coeffs.product_dirichlet_stream(nu) for nu in dirichlet.characters_mod(cfg.modulus)[1:]]
    for st in streams:
        for p in primes:
            M = cfg.truncation
            _, r1 = parton.hecke_apply(parton.decompose(st, p, M), "I")
            _, r2 = parton.hecke_apply(parton.decompose(st, p, M, rescaled=True), "II")
            scale = max(1.0, max(abs(complex(c)) for c in parton.decompose(st, p, M).coeffs))
            out.append(Check(f"hecke/eigen-I/{st.name}/p={p}", {"stream": st.name, "p": p, "M": M},
                             r1 / scale, 1e-10))
            out.append(Check(f"hecke/eigen-II/{st.name}/p={p}", {"stream": st.name, "p": p, "M": M},
                             r2, 1e-10))
            q = parton.hecke_qseries_residual(st, p, max(cfg.n_max, p))
            out.append(Check(f"hecke/q-series/{st.name}/p={p}", {"stream": st.name, "p": p,
                                                                 "n_max": cfg.n_max}, q, 1e-10))
    return out


def _suite_parton(cfg: RunConfig) -> list[Check]:
    out = []
    st = _streams_for(cfg)[0]
    states = parton.local_states(st, max(cfg.n_max, 2))
    worst = 0.0
    for n in range(1, cfg.n_max + 1):
        worst = max(worst, abs(complex(parton.reconstruct(states, n) - st(n))))
    out.append(Check(f"parton/reconstruct/{st.name}", {"stream": st.name, "n_max": cfg.n_max}, worst, 0.0))
    for p in cfg.prime_list():
        M = cfg.truncation
        f = parton.decompose(st, p, M)
        paths = parton.inner_product_I_paths(f, f, st.weight)
        out.append(Check(f"parton/inner-product-paths/{st.name}/p={p}", {"p": p, "M": M},
                         paths.path_mismatch, 1e-10))
        for variant, state in (("I", f), ("II", parton.decompose(st, p, M, rescaled=True))):
            res = parton.parseval_check(state, state, variant)["residual"]
            out.append(Check(f"parton/parseval-{variant}/{st.name}/p={p}", {"p": p, "M": M}, res, 1e-8))
    if cfg.modulus > 1:
        nu = cfg.character()
        if not nu.is_principal:
            ps = coeffs.product_dirichlet_stream(nu)
            for p in cfg.prime_list():
                b = parton.decompose(ps, p, 40, rescaled=True)
                res = parton.parseval_check(b, b, "II")["residual"]
                out.append(Check(f"parton/parseval-II/{ps.name}/p={p}", {"p": p, "M": 40}, res, 1e-8))
    return out


def _suite_chebyshev(cfg: RunConfig) -> list[Check]:
    out = []
    n_max = max(cfg.n_max, 1)
    for nu in dirichlet.characters_mod(cfg.modulus)[1:]:
        conv = coeffs.convolution_coeffs(nu, n_max)
        cheb = np.array([0.0] + [coeffs.chebyshev_product_coeff(nu, n) for n in range(1, n_max + 1)])
        out.append(Check(f"chebyshev/convolution/{nu}", {"character": str(nu), "n_max": n_max},
                         float(np.max(np.abs(conv[1:] - cheb[1:]))), 1e-10))
        worst = 0.0
        for p in primes_below(30):
            theta = dirichlet.argument_at(nu, p)
            if theta is None:
                continue
            x = p ** -2.0
            lhs = 1 / (1 - 2 * math.cos(theta) * x + x * x)
            worst = max(worst, abs(lhs - analytic.local_chebyshev_factor_series(theta, p, 2)))
        out.append(Check(f"chebyshev/generating-function/{nu}", {"character": str(nu), "s": 2}, worst, 1e-12))
    return out


def _primitive_chars(N: int):
    return [nu for nu in dirichlet.characters_mod(N)[1:] if dirichlet.is_primitive(nu)]


def _suite_theta(cfg: RunConfig) -> list[Check]:
    out = []
    ys = parse_grid(cfg.y_grid)
    for nu in _primitive_chars(cfg.modulus):
        eps = dirichlet.parity_epsilon(nu)
        res = max(analytic.theta_s_transform_residual(y, nu) for y in ys)
        out.append(Check(f"theta/s-transform/{nu}", {"character": str(nu), "eps": eps, "y": cfg.y_grid},
                         res, 1e-10))
        g = dirichlet.gauss_sum(nu) * dirichlet.gauss_sum(nu.conjugate()) - nu(-1) * nu.modulus
        out.append(Check(f"theta/gauss-product/{nu}", {"character": str(nu)}, abs(g), 1e-12))
        s = 2.0 + eps
        m = abs(analytic.l_from_theta_mellin(s, nu) - analytic.dirichlet_l(s, nu))
        out.append(Check(f"theta/l-from-mellin/{nu}", {"character": str(nu), "s": s}, m, 1e-8))
        conv = analytic.theta_convolution_weight_residual(1.5, nu)
        out.append(Check(f"theta/convolution-weight/{nu}", {"character": str(nu), "y": 1.5},
                         max(conv["residual"], conv["pointwise"]), 1e-6))
    return out


def _suite_bessel(cfg: RunConfig) -> list[Check]:
    out = []
    small = max(abs(analytic.bessel_k0(x) - analytic.bessel_k0_series(x)) / analytic.bessel_k0(x)
                for x in (1e-3, 0.1, 0.5, 1.0, 2.0))
    out.append(Check("bessel/k0-vs-series", {"x": "0.001..2"}, small, 1e-12))
    big = abs(analytic.bessel_k0(20.0) - analytic.bessel_k0_asymptotic(20.0)) / analytic.bessel_k0(20.0)
    out.append(Check("bessel/k0-vs-asymptotic", {"x": 20}, big, 1e-6))
    two = abs(analytic.two_sided_exponential_integral(1.0, 1.0) - 2 * analytic.bessel_k0(2.0))
    out.append(Check("bessel/two-sided", {"a": 1, "b": 1}, two, 1e-10))
    N = cfg.modulus
    nu = cfg.character()
    if not nu.is_principal:
        mu = 2.0 + dirichlet.parity_epsilon(nu)
        worst = max(abs(analytic.k0_mellin_quadrature(2 * math.pi * n / N, mu)
                        - analytic.k0_mellin_closed_form(2 * math.pi * n / N, mu).real) for n in range(1, 11))
        out.append(Check(f"bessel/k0-mellin-terms/{nu}", {"n": "1..10", "mu": mu}, worst, 1e-8))
        for s in parse_grid(cfg.s_grid):
            res = analytic.product_l_bessel_check(s, nu)
            out.append(Check(f"bessel/product-l-k0/{nu}/s={s:g}", {"character": str(nu), "s": s}, res, 1e-6))
            d = analytic.product_l(s, nu, "direct")
            worst = max(abs(analytic.product_l(s, nu, m) - d) for m in ("series", "euler"))
            out.append(Check(f"bessel/product-l-three-way/{nu}/s={s:g}", {"character": str(nu), "s": s},
                             worst, 1e-8))
    return out


def _suite_maass(cfg: RunConfig) -> list[Check]:
    out = []
    nu = cfg.character()
    if nu.is_principal:
        return out
    allow = dirichlet.parity_epsilon(nu) == 1
    N = nu.modulus
    _, tail = analytic.maass_waveform(0.0, 1.0, nu, 50, allow_odd=allow, with_tail=True)
    out.append(Check(f"maass/tail/{nu}", {"y": 1, "n_terms": 50}, tail, 1e-12))
    per = abs(analytic.maass_waveform(0.3, 1.0, nu, 50, allow) - analytic.maass_waveform(0.3 + N, 1.0, nu, 50, allow))
    out.append(Check(f"maass/periodicity/{nu}", {"x": 0.3, "period": N}, per, 1e-12))
    amps = analytic.maass_terms(1.0, nu, 50, allow)
    worst = max(abs(analytic.maass_fourier_mode(n, 1.0, nu, 50, allow_odd=allow) - amps[n - 1]) for n in range(1, 11))
    out.append(Check(f"maass/fourier-modes/{nu}", {"modes": "1..10", "y": 1}, worst, 1e-10))
    probe = analytic.maass_norm_divergence_probe(1, 1, [2.0**-k for k in (8, 12, 16, 20)], N)
    out.append(Check("maass/norm-divergence/m=1,n=1", {"increments": [round(v, 6) for v in probe.increments]},
                     probe.remainder_drift[-1], None, exploratory=True))
    return out


def _suite_time_average(cfg: RunConfig) -> list[Check]:
    out = []
    chars = list(dirichlet.characters_mod(cfg.modulus)[1:])
    for f in chars:
        for g in chars:
            ta = analytic.time_average_inner_product(f, g, 50.0, 4001, 100)
            out.append(Check(f"time-average/odd-part/{f}/{g}", {"T": 50, "n_terms": 100},
                             ta.odd_part_residual, 1e-10))
            out.append(Check(f"time-average/value/{f}/{g}", {"T": 50, "re": round(ta.value.real, 8) + 0.0,
                                                              "im": round(ta.value.imag, 8) + 0.0},
                             abs(ta.value), None, exploratory=True))
    return out


_SUITE_FUNCS: dict[str, Callable[[RunConfig], list[Check]]] = {
    "wavelets": _suite_wavelets, "mellin": _suite_mellin, "hecke": _suite_hecke,
    "parton": _suite_parton, "chebyshev": _suite_chebyshev, "theta": _suite_theta,
    "bessel": _suite_bessel, "maass": _suite_maass, "time-average": _suite_time_average,
}


def run_suite(config: RunConfig) -> list[Check]:
    """Run one suite (or all) in a thread pool; rows come back sorted by name."""
    config.validate()
    names = SUITES if config.suite == "all" else (config.suite,)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda n: _SUITE_FUNCS[n](config), names))
    return sorted((c for batch in results for c in batch), key=lambda c: c.name)


# --------------------------------------------------------------------------
# tables


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_table(kind: str, cfg: RunConfig) -> str:
    d = cfg.precision
    if kind == "tau":
        vals = coeffs.ramanujan_tau_table(cfg.n_max) if cfg.n_max else []
        return _csv(["n", "tau(n) from the eta-product expansion"], ((n, v) for n, v in enumerate(vals, 1)))
    nu = cfg.character()
    if kind == "convolution":
        if nu.is_principal:
            raise UsageError("convolution table needs a nonprincipal character")
        conv = coeffs.convolution_coeffs(nu, cfg.n_max) if cfg.n_max else []
        rows = ((n, _fmt(conv[n].real, d), _fmt(coeffs.chebyshev_product_coeff(nu, n), d))
                for n in range(1, cfg.n_max + 1))
        return _csv(["n", "divisor sum of nu(d) conj(nu)(n/d)", "product of U_(v_p(n))(cos arg nu(p))"], rows)
    if kind == "ltable":
        if nu.is_principal:
            raise UsageError("ltable needs a nonprincipal character")
        rows = []
        for s in parse_grid(cfg.s_grid):
            try:
                L = analytic.dirichlet_l(s, nu)
                P = analytic.product_l(s, nu, "direct")
            except analytic.AbscissaError as exc:
                raise UsageError(str(exc)) from None
            rows.append((_fmt(s, d), _fmt(L.real, d), _fmt(L.imag, d), _fmt(P.real, d), _fmt(P.imag, d)))
        return _csv(["s", "Re L(s,nu)", "Im L(s,nu)", "Re L(s,nu) L(s,conj nu)", "Im L(s,nu) L(s,conj nu)"], rows)
    if kind == "maass":
        if nu.is_principal:
            raise UsageError("maass table needs a nonprincipal character")
        y = parse_grid(cfg.y_grid)[0]
        allow = dirichlet.parity_epsilon(nu) == 1
        amps = analytic.maass_terms(y, nu, cfg.n_max, allow) if cfg.n_max else []
        conv = coeffs.convolution_coeffs(nu, cfg.n_max) if cfg.n_max else []
        rows = ((n, _fmt(conv[n].real, d), _fmt(y, d), _fmt(amps[n - 1].real, d)) for n in range(1, cfg.n_max + 1))
        return _csv(["n", "a(n)", "y", "a(n) (n y)^eps sqrt(y) K_0(2 pi n y / N)"], rows)
    raise UsageError(f"unknown table kind {kind!r}; choose from {', '.join(TABLE_KINDS)}")


# --------------------------------------------------------------------------
# JSON reports


def _cjson(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def theta_report(cfg: RunConfig) -> dict:
    nu = cfg.character()
    if not dirichlet.is_primitive(nu) or nu.is_principal:
        raise UsageError(f"character {nu} is not primitive and nonprincipal")
    ys = parse_grid(cfg.y_grid)
    values = {f"{y:g}": _cjson(analytic.theta_series(y, nu)) for y in ys}
    residuals = {f"{y:g}": analytic.theta_s_transform_residual(y, nu) for y in ys}
    trend = {f"{y:g}": analytic.theta_convolution_weight_residual(y, nu)["residual"] for y in ys}
    return {"params": {"character": str(nu), "eps": dirichlet.parity_epsilon(nu), "y_grid": cfg.y_grid},
            "values": values, "residuals": residuals, "trend": trend}


def time_average_report(cfg: RunConfig, other_index: int | None = None) -> dict:
    f = cfg.character()
    g = dirichlet.character(cfg.modulus, cfg.char_index if other_index is None else other_index)
    Ts = parse_grid(cfg.t_grid)
    if any(T <= 0 for T in Ts):
        raise UsageError("time-average needs positive T values")
    rows = analytic.time_average_trend(f, g, Ts, n_terms=cfg.truncation * 10)
    return {
        "params": {"f": str(f), "g": str(g), "T": Ts, "n_terms": cfg.truncation * 10, "status": "exploratory"},
        "values": {f"{r.T:g}": _cjson(r.value) for r in rows},
        "residuals": {f"{r.T:g}": r.odd_part_residual for r in rows},
        "trend": [abs(b.value - a.value) for a, b in zip(rows, rows[1:])],
    }


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# argument parsing


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    for name in ("primes", "s-grid", "t-grid", "y-grid", "out", "format", "stream"):
        common.add_argument(f"--{name}", default=argparse.SUPPRESS)
    for name in ("truncation", "precision", "modulus", "char-index", "weight", "prime", "n-max"):
        common.add_argument(f"--{name}", type=int, default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="partons", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    p = sub.add_parser("parton", parents=[common], help="local parton states")
    p.add_argument("action", choices=("decompose",))
    sub.add_parser("ltable", parents=[common], help="L(s, nu) and the product L-function on an s-grid")
    sub.add_parser("maass-coeffs", parents=[common], help="Maass-like Fourier amplitudes")
    sub.add_parser("theta-check", parents=[common], help="theta series S-transform report")
    t = sub.add_parser("time-average", parents=[common], help="time-average trend report")
    t.add_argument("--other-index", type=int, default=None, help="character index of g (default: same as f)")
    e = sub.add_parser("emit-table", parents=[common], help="deterministic CSV tables")
    e.add_argument("kind", choices=TABLE_KINDS)
    sub.add_parser("dump-config", parents=[common], help="print the effective config")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = load_config(fh.read(), cfg)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
    overrides = {k: v for k, v in vars(args).items() if k in _FIELD_TYPES and k != "suite"}
    if getattr(args, "suite", None):
        overrides["suite"] = args.suite
    return replace(cfg, **overrides).validate()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        cmd = args.command
        if cmd == "verify":
            checks = run_suite(cfg)
            _emit(render_report(checks, cfg.format, cfg.precision), cfg.out)
            return 1 if any(c.status == "fail" for c in checks) else 0
        if cmd == "parton":
            stream = _streams_for(cfg)[0]
            state = parton.decompose(stream, require_prime(cfg.prime), cfg.truncation)
            if cfg.format == "json":
                _emit(state.to_json() + "\n", cfg.out)
            else:
                rows = ((m, _fmt(complex(c).real, cfg.precision) if not isinstance(c, int) else c,
                         _fmt(complex(c).imag, cfg.precision)) for m, c in enumerate(state.coeffs))
                _emit(_csv(["m", "Re a(p^m)", "Im a(p^m)"], rows), cfg.out)
            return 0
        if cmd == "ltable":
            _emit(emit_table("ltable", cfg), cfg.out)
            return 0
        if cmd == "maass-coeffs":
            _emit(emit_table("maass", cfg), cfg.out)
            return 0
        if cmd == "emit-table":
            _emit(emit_table(args.kind, cfg), cfg.out)
            return 0
        if cmd == "theta-check":
            report = theta_report(cfg)
            _emit(_dumps(report), cfg.out)
            return 0 if max(report["residuals"].values()) < 1e-10 else 1
        if cmd == "time-average":
            _emit(_dumps(time_average_report(cfg, args.other_index)), cfg.out)
            return 0
        if cmd == "dump-config":
            _emit(dump_config(cfg), cfg.out)
            return 0
    except UsageError as exc:
        print(f"partons: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"partons: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
