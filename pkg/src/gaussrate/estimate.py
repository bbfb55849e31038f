"""Time-series ingestion, windowed autocovariance estimation, simulation.

Connects the library to data: a multivariate series becomes an
``estimated`` process spec through mean-centered biased sample
autocovariances weighted by a lag window.  The biased (1/N) normalization
is deliberate: together with Bartlett weights it keeps the truncated
spectral estimate positive semidefinite, which the downstream log
computations require.  Mean-centering is always applied, even though the
process model is zero-mean: real data are not centered.

Input formats: CSV (one row per time step, m numeric columns, optional
header) and a little-endian binary container with a 16-byte header
{magic "GRTS", u32 m, u64 N} followed by column-major float64 samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matfun
from .blocktoeplitz import SIZE_LIMIT, assemble
from .errors import InvalidInput, InvalidSpec, LagOutOfRange, SizeLimit
from .process import VAR1, VMA, Estimated, ProcessSpec, White

BINARY_MAGIC = b"GRTS"
BINARY_HEADER = 16  # magic + u32 m + u64 N, little-endian


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """N x m array of observations, one row per time step."""

    samples: np.ndarray
    source: str = "memory"

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, np.newaxis]
        if samples.ndim != 2:
            raise InvalidInput(f"time series must be 2-D, got shape {samples.shape}")
        if samples.shape[0] < 2:
            raise InvalidInput("time series needs at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise InvalidInput("time series contains non-finite values")
        object.__setattr__(self, "samples", samples)

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def m(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class LagWindow:
    """Lag weights for autocovariance truncation.

    bartlett: w(j) = 1 - |j|/(L+1), guarantees a PSD truncated spectrum;
    truncation: w(j) = 1.
    """

    kind: str = "bartlett"
    max_lag: int = 1

    def __post_init__(self):
        if self.kind not in ("bartlett", "truncation"):
            raise InvalidInput(f"unknown window kind {self.kind!r}")
        if int(self.max_lag) < 1:
            raise InvalidInput("window max_lag must be >= 1")
        object.__setattr__(self, "max_lag", int(self.max_lag))

    def weight(self, lag: int) -> float:
        if self.kind == "bartlett":
            return 1.0 - abs(lag) / (self.max_lag + 1.0)
        return 1.0


def default_window(n_samples: int) -> LagWindow:
    """Bartlett window at the standard consistency-preserving L = floor(sqrt(N))."""
    return LagWindow(kind="bartlett", max_lag=max(1, int(math.isqrt(int(n_samples)))))


def sample_autocovariance(ts: TimeSeries, lag: int) -> np.ndarray:
    """Mean-centered biased estimator K(j) = (1/N) sum (x_{t+j}-xbar)(x_t-xbar)'."""
    lag = int(lag)
    n = ts.length
    if abs(lag) >= n:
        raise LagOutOfRange(f"|lag| = {abs(lag)} must be below N = {n}")
    centered = ts.samples - ts.samples.mean(axis=0)
    j = abs(lag)
    block = centered[j:].T @ centered[: n - j] / n
    if lag == 0:
        return 0.5 * (block + block.T)
    return block if lag > 0 else block.T


def estimated_spec(ts: TimeSeries, window: LagWindow | None = None) -> Estimated:
    """Windowed lag table {w(j) K(j) : |j| <= L} as an estimated process spec."""
    if window is None:
        window = default_window(ts.length)
    if window.max_lag >= ts.length:
        raise LagOutOfRange(
            f"window max_lag {window.max_lag} must be below N = {ts.length}"
        )
    table = {
        lag: window.weight(lag) * sample_autocovariance(ts, lag)
        for lag in range(window.max_lag + 1)
    }
    return Estimated(
        m=ts.m, lags=table, window_kind=window.kind, window_max_lag=window.max_lag
    )


def simulate(
    spec: ProcessSpec,
    n_steps: int,
    seed: int,
    method: str = "auto",
    size_limit: int = SIZE_LIMIT,
) -> TimeSeries:
    """Draw one stationary path of length n_steps; deterministic per seed.

    exact: z ~ N(0, I) pushed through the triangular factor of the full
    block-Toeplitz covariance (needs n_steps * m within the size cap).
    recursive: runs the white/vma/var1 recursion from a warm start drawn
    from the stationary law (VAR1 initial state ~ N(0, K(0))).
    """
    n_steps = int(n_steps)
    if n_steps < 2:
        raise InvalidInput("n_steps must be at least 2")
    if method not in ("auto", "exact", "recursive"):
        raise InvalidInput(f"unknown simulation method {method!r}")
    recursive_kinds = (White, VMA, VAR1)
    if method == "auto":
        if n_steps * spec.m <= size_limit:
            method = "exact"
        elif isinstance(spec, recursive_kinds):
            method = "recursive"
        else:
            raise SizeLimit(
                f"n_steps*m = {n_steps * spec.m} exceeds the cap {size_limit} and "
                f"kind {spec.kind!r} has no recursive sampler"
            )
    rng = np.random.default_rng(seed)
    if method == "exact":
        covariance = assemble(spec, n_steps, size_limit=size_limit)
        factor = matfun.cholesky_spd(covariance.dense)
        path = (factor @ rng.standard_normal(covariance.dim)).reshape(
            n_steps, spec.m
        )
    else:
        if not isinstance(spec, recursive_kinds):
            raise InvalidSpec(
                f"recursive simulation requires white/vma/var1, got {spec.kind!r}"
            )
        path = _simulate_recursive(spec, n_steps, rng)
    return TimeSeries(
        samples=path, source=f"simulated:{spec.describe()}:seed={seed}"
    )


def _simulate_recursive(spec, n_steps: int, rng) -> np.ndarray:
    noise_factor = matfun.cholesky_spd(spec.sigma)
    if isinstance(spec, White):
        return rng.standard_normal((n_steps, spec.m)) @ noise_factor.T
    if isinstance(spec, VMA):
        order = spec.order
        shocks = rng.standard_normal((n_steps + order, spec.m)) @ noise_factor.T
        path = shocks[order:].copy()
        for k in range(1, order + 1):
            path += shocks[order - k : order - k + n_steps] @ spec.coeffs[k - 1].T
        return path
    # VAR1: stationarity-respecting warm start, then the recursion.
    state_factor = matfun.cholesky_spd(spec.state_covariance)
    shocks = rng.standard_normal((n_steps, spec.m)) @ noise_factor.T
    path = np.empty((n_steps, spec.m))
    path[0] = state_factor @ rng.standard_normal(spec.m)
    for t in range(1, n_steps):
        path[t] = spec.A @ path[t - 1] + shocks[t]
    return path


# -- on-disk formats ---------------------------------------------------------

def read_csv_timeseries(path: str) -> TimeSeries:
    """One row per time step, comma-separated numeric columns, optional header."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.strip() for line in handle]
    lines = [line for line in lines if line]
    if not lines:
        raise InvalidInput(f"{path}: empty file")

    def parse_row(line: str):
        return [float(tok) for tok in line.split(",")]

    start = 0
    try:
        parse_row(lines[0])
    except ValueError:
        start = 1  # header line
    rows = []
    for index, line in enumerate(lines[start:], start=start):
        try:
            rows.append(parse_row(line))
        except ValueError as exc:
            raise InvalidInput(f"{path}: non-numeric value on line {index + 1}") from exc
    if not rows:
        raise InvalidInput(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise InvalidInput(f"{path}: inconsistent column counts")
    return TimeSeries(samples=np.asarray(rows, dtype=float), source=path)


def write_csv_timeseries(path: str, ts: TimeSeries) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in ts.samples:
            handle.write(",".join(format(x, ".17g") for x in row) + "\n")


def read_binary_timeseries(path: str) -> TimeSeries:
    """GRTS container: 16-byte header then column-major float64 samples."""
    with open(path, "rb") as handle:
        header = handle.read(BINARY_HEADER)
        if len(header) != BINARY_HEADER or header[:4] != BINARY_MAGIC:
            raise InvalidInput(f"{path}: not a GRTS binary time series")
        m = int.from_bytes(header[4:8], "little")
        n = int.from_bytes(header[8:16], "little")
        payload = handle.read()
    expected = 8 * m * n
    if m < 1 or n < 2:
        raise InvalidInput(f"{path}: bad GRTS header (m={m}, N={n})")
    if len(payload) != expected:
        raise InvalidInput(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    data = np.frombuffer(payload, dtype="<f8").reshape((n, m), order="F")
    return TimeSeries(samples=np.ascontiguousarray(data), source=path)


def write_binary_timeseries(path: str, ts: TimeSeries) -> None:
    with open(path, "wb") as handle:
        handle.write(BINARY_MAGIC)
        handle.write(int(ts.m).to_bytes(4, "little"))
        handle.write(int(ts.length).to_bytes(8, "little"))
        handle.write(np.asarray(ts.samples, dtype="<f8").flatten(order="F").tobytes())


def read_timeseries(path: str) -> TimeSeries:
    """Dispatch on the GRTS magic; anything else is treated as CSV."""
    try:
        with open(path, "rb") as handle:
            magic = handle.read(4)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    if magic == BINARY_MAGIC:
        return read_binary_timeseries(path)
    return read_csv_timeseries(path)
