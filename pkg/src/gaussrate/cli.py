"""Command-line front end.

Subcommands: rate, finite, converge, estimate, selfcheck.  Outputs are
deterministic: floats are rendered with 17 significant digits (so JSON
round-trips to identical bytes) and every random element is seeded.

Exit codes: 0 success, 1 selfcheck failure, 2 bad input, 3 singular or
degenerate process, 4 numerical failure, 5 size cap exceeded.  Domain
errors emit a machine-readable JSON object on standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import blocktoeplitz, estimate, matfun, szego
from .errors import (
    BadAlpha,
    BelowFloor,
    DomainError,
    GaussrateError,
    InvalidInput,
    InvalidSpec,
    LagOutOfRange,
    NoConvergence,
    NotPositiveDefinite,
    SingularDensity,
    SizeLimit,
)
from .process import VAR1, VMA, ProcessSpec, White

DEFAULT_SEED = 12345

EXIT_BY_ERROR = {
    InvalidSpec: 2,
    InvalidInput: 2,
    BadAlpha: 2,
    LagOutOfRange: 2,
    SingularDensity: 3,
    NotPositiveDefinite: 3,
    DomainError: 4,
    BelowFloor: 4,
    NoConvergence: 4,
    SizeLimit: 5,
}


# -- deterministic rendering --------------------------------------------------

def format_float(value: float) -> str:
    """17-significant-digit decimal; enough to round-trip any double."""
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value in output: {value!r}")
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return format(value, ".17g")


def render_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(key))}: {render_json(val, indent + 1)}"
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{render_json(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(obj).__name__}")


def render_csv(header: list[str], rows: list[list]) -> str:
    def cell(value):
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return format_float(value)
        return str(value)

    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# -- option parsing helpers ----------------------------------------------------

def parse_float_list(text: str, what: str) -> list[float]:
    if not text.strip():
        return []
    out = []
    for token in text.split(","):
        try:
            out.append(float(token))
        except ValueError as exc:
            raise InvalidInput(f"bad {what} value {token!r}") from exc
    return out


def parse_n_list(text: str) -> list[int]:
    out = []
    for token in text.split(","):
        try:
            value = int(token)
        except ValueError as exc:
            raise InvalidInput(f"bad n value {token!r}") from exc
        if value < 1:
            raise InvalidInput(f"n values must be positive, got {value}")
        out.append(value)
    if not out:
        raise InvalidInput("empty n list")
    return out


def load_spec(args) -> ProcessSpec:
    if (args.spec is None) == (args.spec_json is None):
        raise InvalidInput("give exactly one process source: --spec or --spec-json")
    if args.spec is not None:
        try:
            with open(args.spec, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise InvalidInput(f"cannot read spec file {args.spec}: {exc}") from exc
    else:
        text = args.spec_json
    return ProcessSpec.from_json(text)


def check_grid(grid: int) -> int:
    if grid < szego.GRID_MIN:
        raise InvalidInput(f"--grid must be at least {szego.GRID_MIN}")
    return grid


def check_floor(floor: float) -> float:
    if not math.isfinite(floor) or floor < 0.0:
        raise InvalidInput("--floor must be a non-negative real")
    return floor


def alpha_key(alpha: float) -> str:
    return str(float(alpha))


def report_payload(report: szego.EntropyReport) -> dict:
    return {
        "m": report.m,
        "shannon_rate": report.shannon_rate,
        "renyi": {
            alpha_key(alpha): report.renyi_rates[alpha]
            for alpha in sorted(report.renyi_rates)
        },
        "spectral_integral": report.spectral_integral,
        "method": report.method,
        "grid_size": report.grid_size,
        "diagnostics": dict(report.diagnostics),
    }


def report_csv(payload: dict, extra: dict | None = None) -> str:
    header = ["m", "shannon_rate", "spectral_integral", "grid_size"]
    row = [payload["m"], payload["shannon_rate"], payload["spectral_integral"],
           payload["grid_size"]]
    for key, value in payload["renyi"].items():
        header.append(f"renyi_{key}")
        row.append(value)
    for key, value in (extra or {}).items():
        header.append(key)
        row.append(value)
    return render_csv(header, [row])


# -- subcommands ----------------------------------------------------------------

def cmd_rate(args) -> tuple[str, int]:
    spec = load_spec(args)
    alphas = parse_float_list(args.alpha, "alpha")
    report = szego.entropy_rate(
        spec,
        alphas=alphas,
        grid_size=check_grid(args.grid),
        floor=check_floor(args.floor),
    )
    payload = report_payload(report)
    if args.format == "csv":
        return report_csv(payload), 0
    return render_json(payload) + "\n", 0


def cmd_finite(args) -> tuple[str, int]:
    spec = load_spec(args)
    alphas = sorted(blocktoeplitz.validate_alphas(parse_float_list(args.alpha, "alpha")))
    n_list = parse_n_list(args.n)
    results = [blocktoeplitz.finite_entropy(spec, n, alphas=alphas) for n in n_list]
    if args.format == "csv":
        header = ["n", "shannon"] + [f"renyi_{alpha_key(a)}" for a in alphas]
        rows = [
            [fe.n, fe.shannon_per_block] + [fe.renyi_per_block[a] for a in alphas]
            for fe in results
        ]
        return render_csv(header, rows), 0
    payload = {
        "m": spec.m,
        "rows": [
            {
                "n": fe.n,
                "shannon": fe.shannon_per_block,
                "renyi": {alpha_key(a): fe.renyi_per_block[a] for a in alphas},
                "logdet": fe.logdet,
            }
            for fe in results
        ],
    }
    return render_json(payload) + "\n", 0


def cmd_converge(args) -> tuple[str, int]:
    spec = load_spec(args)
    n_list = parse_n_list(args.n)
    table = szego.convergence_study(
        spec, np.log, n_list, grid_size=check_grid(args.grid)
    )
    rows = [
        {"n": r.n, "finite_rate": r.finite_rate, "limit_rate": r.limit_rate,
         "gap": r.gap}
        for r in table.rows
    ]
    if args.format == "csv":
        return render_csv(
            ["n", "finite_rate", "limit_rate", "gap"],
            [[r["n"], r["finite_rate"], r["limit_rate"], r["gap"]] for r in rows],
        ), 0
    payload = {"descriptor": table.descriptor, "f": "log", "rows": rows}
    return render_json(payload) + "\n", 0


def cmd_estimate(args) -> tuple[str, int]:
    series = estimate.read_timeseries(args.data)
    max_lag = args.max_lag
    if max_lag is None:
        window = estimate.default_window(series.length)
        window = estimate.LagWindow(kind=args.window, max_lag=window.max_lag)
    else:
        if max_lag < 1:
            raise InvalidInput("--max-lag must be >= 1")
        window = estimate.LagWindow(kind=args.window, max_lag=max_lag)
    spec = estimate.estimated_spec(series, window)
    alphas = parse_float_list(args.alpha, "alpha")
    report = szego.entropy_rate(
        spec,
        alphas=alphas,
        grid_size=check_grid(args.grid),
        floor=check_floor(args.floor),
    )
    payload = report_payload(report)
    payload["window"] = {"kind": window.kind, "max_lag": window.max_lag}
    payload["n_samples"] = series.length
    if args.format == "csv":
        extra = {
            "window_kind": window.kind,
            "window_max_lag": window.max_lag,
            "n_samples": series.length,
        }
        inner = report_payload(report)
        return report_csv(inner, extra), 0
    return render_json(payload) + "\n", 0


def _selfcheck_fixtures() -> list[ProcessSpec]:
    return [
        White(1, [[1.0]]),
        VAR1(1, [[0.5]], [[0.75]]),
        VMA(1, [[[0.5]]], [[1.0]]),
        VAR1(2, [[0.5, 0.1], [0.0, 0.3]], [[1.0, 0.0], [0.0, 1.0]]),
    ]


def cmd_selfcheck(args) -> tuple[str, int]:
    seed = args.seed
    floor = check_floor(args.floor)
    rng = np.random.default_rng(seed)
    checks = []

    # Gaussian normalization integral against the closed form.
    for index, dim in enumerate([1, 2, 3, 2, 3]):
        basis, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        eigenvalues = rng.uniform(0.5, 3.0, dim)
        spd = (basis * eigenvalues) @ basis.T
        spd = 0.5 * (spd + spd.T)
        result = matfun.gaussian_integral_check(spd, seed=seed + index)
        exact = math.sqrt((2.0 * math.pi) ** dim / np.linalg.det(spd))
        error = abs(result.value / exact - 1.0)
        checks.append(
            {
                "name": f"gaussian_integral_{index}",
                "passed": bool(error <= result.rtol),
                "dim": dim,
                "value": result.value,
                "exact": exact,
                "rtol": result.rtol,
                "relative_error": error,
            }
        )

    # Quadratic-form expectation E[x'Bx] = Tr(B K_n), 20 seeded triples.
    fixtures = _selfcheck_fixtures()
    n_values = [2, 3, 4, 6, 8]
    for index in range(20):
        spec = fixtures[index % len(fixtures)]
        n = n_values[index % len(n_values)]
        dim = n * spec.m
        weight = rng.standard_normal((dim, dim))
        weight = 0.5 * (weight + weight.T)
        check = blocktoeplitz.quadratic_form_expectation_check(
            spec, n, weight, samples=20_000, seed=seed + 1000 + index
        )
        checks.append(
            {
                "name": f"quadratic_form_{index}",
                "passed": bool(check.passes()),
                "spec": spec.describe(),
                "n": n,
                "estimate": check.estimate,
                "exact": check.exact,
                "stderr": check.stderr,
            }
        )

    # Spectral densities must clear the PSD floor on a coarse grid.
    for spec in fixtures:
        thetas = -np.pi + 2.0 * np.pi * np.arange(64) / 64
        eigenvalues = np.linalg.eigvalsh(spec.spectral_density().sample(thetas))
        smallest = float(np.min(eigenvalues))
        largest = float(np.max(eigenvalues))
        passed = smallest > 0.0 and smallest >= floor * largest
        checks.append(
            {
                "name": f"psd_floor_{spec.describe()}",
                "passed": bool(passed),
                "min_eigenvalue": smallest,
                "max_eigenvalue": largest,
                "floor": floor,
            }
        )

    passed = all(check["passed"] for check in checks)
    payload = {"seed": seed, "floor": floor, "passed": passed, "checks": checks}
    return render_json(payload) + "\n", 0 if passed else 1


# -- wiring ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussrate",
        description=(
            "Shannon and Renyi entropy rates of stationary vector Gaussian "
            "processes (nats; frequencies in radians)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_source(p):
        p.add_argument("--spec", help="path to a process spec JSON file")
        p.add_argument("--spec-json", dest="spec_json", help="inline process spec JSON")

    def add_common(p):
        p.add_argument("--alpha", default="", help="comma-separated Renyi orders")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", help="write output to this path instead of stdout")

    rate = sub.add_parser("rate", help="asymptotic entropy rate via quadrature")
    add_spec_source(rate)
    add_common(rate)
    rate.add_argument("--grid", type=int, default=szego.GRID_DEFAULT)
    rate.add_argument("--floor", type=float, default=matfun.DEFAULT_FLOOR)
    rate.set_defaults(handler=cmd_rate)

    finite = sub.add_parser("finite", help="exact finite-n entropies per block")
    add_spec_source(finite)
    add_common(finite)
    finite.add_argument("--n", required=True, help="comma-separated n values")
    finite.set_defaults(handler=cmd_finite)

    converge = sub.add_parser(
        "converge", help="finite-n trace functional vs spectral integral (f = log)"
    )
    add_spec_source(converge)
    add_common(converge)
    converge.add_argument("--n", required=True, help="comma-separated n values")
    converge.add_argument("--grid", type=int, default=szego.GRID_DEFAULT)
    converge.set_defaults(handler=cmd_converge)

    est = sub.add_parser("estimate", help="entropy rate estimated from data")
    est.add_argument("--data", required=True, help="CSV or GRTS binary time series")
    est.add_argument("--window", choices=["bartlett", "truncation"], default="bartlett")
    est.add_argument("--max-lag", dest="max_lag", type=int, default=None)
    add_common(est)
    est.add_argument("--grid", type=int, default=szego.GRID_DEFAULT)
    est.add_argument("--floor", type=float, default=matfun.DEFAULT_FLOOR)
    est.set_defaults(handler=cmd_estimate)

    selfcheck = sub.add_parser(
        "selfcheck", help="seeded Gaussian-identity and PSD-floor checks"
    )
    selfcheck.add_argument("--seed", type=int, default=DEFAULT_SEED)
    selfcheck.add_argument("--floor", type=float, default=matfun.DEFAULT_FLOOR)
    selfcheck.add_argument("--out", help="write output to this path instead of stdout")
    selfcheck.set_defaults(handler=cmd_selfcheck)

    return parser


def error_payload(err: GaussrateError) -> dict:
    payload = {"error": type(err).__name__, "message": str(err)}
    for attr in ("pivot", "theta", "eigenvalue", "floor"):
        if hasattr(err, attr):
            payload[attr] = getattr(err, attr)
    return payload


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.handler(args)
    except GaussrateError as err:
        sys.stderr.write(render_json(error_payload(err)) + "\n")
        return EXIT_BY_ERROR.get(type(err), 4)
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return code


def entry_point() -> None:
    sys.exit(main())
