"""Stationary vector Gaussian process models.

A process is specified by its matrix autocovariance sequence K(j)
(Cov(X_{t+j}, X_t), with K(-j) = K(j)' for real processes).  Five model
families are supported, each chosen because it admits an independent
analytic oracle for its entropy rate:

* white      -- iid blocks with covariance sigma,
* vma        -- vector moving average of finite order q,
* var1       -- first-order vector autoregression X_t = A X_{t-1} + eps_t,
* explicit   -- a finite lag table given directly,
* estimated  -- a lag table produced from data by a windowed estimator.

Each spec evaluates its matrix spectral density
S(theta) = sum_j K(j) exp(-i j theta), using a closed form where one
exists and the truncated Fourier sum of the lag table otherwise.

Blocks are stored for j >= 0 only; negative lags are derived by
transposition, which enforces stationarity structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
import json

import numpy as np

from .errors import InvalidSpec, NoConvergence

# A VAR(1) transition matrix is rejected when its spectral radius reaches
# 1 - 1e-8: beyond that the stationary covariance is numerically meaningless.
SPECTRAL_RADIUS_MAX = 1.0 - 1e-8

# Indefiniteness tolerance when accepting noise covariances: eigenvalues
# above -PSD_ATOL * max(1, lambda_max) count as rounding noise.  Singular
# PSD matrices are accepted; degeneracy is reported downstream when the
# entropy computation actually encounters it.
PSD_ATOL = 1e-10


def _as_square_matrix(obj, m: int | None, name: str) -> np.ndarray:
    try:
        mat = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(f"{name}: not a numeric matrix") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidSpec(f"{name}: expected a square matrix, got shape {mat.shape}")
    if m is not None and mat.shape[0] != m:
        raise InvalidSpec(f"{name}: expected {m}x{m}, got {mat.shape[0]}x{mat.shape[0]}")
    if not np.all(np.isfinite(mat)):
        raise InvalidSpec(f"{name}: contains non-finite entries")
    return mat


def _as_noise_covariance(obj, m: int | None, name: str = "sigma") -> np.ndarray:
    """Validate and exactly symmetrize a noise covariance.

    Rejects asymmetric or indefinite input; accepts PSD-singular input so
    that degenerate processes surface as SingularDensity/NotPositiveDefinite
    outcomes at computation time rather than as parse errors.
    """
    mat = _as_square_matrix(obj, m, name)
    scale = max(1.0, float(np.max(np.abs(mat)))) if mat.size else 1.0
    if np.max(np.abs(mat - mat.T)) > 1e-8 * scale:
        raise InvalidSpec(f"{name}: not symmetric")
    mat = 0.5 * (mat + mat.T)
    eigenvalues = np.linalg.eigvalsh(mat)
    top = max(float(eigenvalues[-1]), 0.0)
    if float(eigenvalues[0]) < -PSD_ATOL * max(1.0, top):
        raise InvalidSpec(
            f"{name}: not positive semidefinite (eigenvalue {eigenvalues[0]!r})"
        )
    return mat


def _symmetrized(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def spectral_radius(mat: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


def lyapunov_solve(transition, noise_cov, rtol: float = 1e-10) -> np.ndarray:
    """Solve X = A X A' + S for the stationary covariance of a VAR(1).

    Uses the vectorized linear solve (Kronecker form) behind
    scipy.linalg.solve_discrete_lyapunov, then verifies the fixed-point
    residual ||X - A X A' - S||_F <= rtol * ||S||_F, refining by the
    doubling iteration if needed.
    """
    transition = _as_square_matrix(transition, None, "transition")
    noise_cov = _as_noise_covariance(noise_cov, transition.shape[0], "noise_cov")
    radius = spectral_radius(transition)
    if radius >= 1.0:
        raise InvalidSpec(f"transition spectral radius {radius} >= 1")

    from scipy.linalg import solve_discrete_lyapunov  # deferred import

    solution = _symmetrized(solve_discrete_lyapunov(transition, noise_cov))
    target = max(float(np.linalg.norm(noise_cov)), np.finfo(float).tiny)
    residual = np.linalg.norm(
        solution - transition @ solution @ transition.T - noise_cov
    )
    if residual <= rtol * target:
        return solution

    # Doubling iteration: X <- X + A X A', A <- A A, converges geometrically.
    powered = transition.copy()
    for _ in range(200):
        solution = _symmetrized(solution + powered @ solution @ powered.T)
        powered = powered @ powered
        residual = np.linalg.norm(
            solution - transition @ solution @ transition.T - noise_cov
        )
        if residual <= rtol * target:
            return solution
    raise NoConvergence(
        f"Lyapunov iteration stalled at residual {residual!r} (target {rtol * target!r})"
    )


@dataclass(frozen=True, eq=False)
class MatrixAutocovariance:
    """Finite table of autocovariance blocks, stored for j >= 0 only."""

    m: int
    blocks: dict[int, np.ndarray]
    kind: str

    def __post_init__(self):
        if self.m < 1:
            raise InvalidSpec("block dimension must be positive")
        cleaned: dict[int, np.ndarray] = {}
        for lag, block in self.blocks.items():
            lag = int(lag)
            if lag < 0:
                raise InvalidSpec("lag table stores non-negative lags only")
            cleaned[lag] = _as_square_matrix(block, self.m, f"K({lag})")
        if 0 not in cleaned:
            raise InvalidSpec("lag table must contain the lag-0 block")
        cleaned[0] = _as_noise_covariance(cleaned[0], self.m, "K(0)")
        object.__setattr__(self, "blocks", cleaned)

    @property
    def max_lag(self) -> int:
        nonzero = [lag for lag, block in self.blocks.items() if np.any(block)]
        return max(nonzero) if nonzero else 0

    def block(self, lag: int) -> np.ndarray:
        if lag >= 0:
            found = self.blocks.get(lag)
            return found.copy() if found is not None else np.zeros((self.m, self.m))
        found = self.blocks.get(-lag)
        return found.T.copy() if found is not None else np.zeros((self.m, self.m))


class SpectralDensity:
    """Matrix spectral density: a Hermitian-matrix-valued function on [-pi, pi].

    ``provenance`` is "closed_form" for white/vma/var1 models and
    "fourier_truncation" for lag-table models, in which case ``max_lag``
    is the truncation support.
    """

    def __init__(self, m, evaluator, provenance, max_lag=None, table=None):
        self.m = int(m)
        self.provenance = provenance
        self.max_lag = max_lag
        self._evaluator = evaluator
        self._table = table  # (L+1, m, m) stacked blocks for vectorized sampling

    def __call__(self, theta: float) -> np.ndarray:
        return self._evaluator(float(theta))

    def sample(self, thetas) -> np.ndarray:
        """Evaluate on a frequency grid; returns (Q, m, m)."""
        thetas = np.asarray(thetas, dtype=float)
        if self._table is not None:
            lags = np.arange(1, self._table.shape[0])
            phases = np.exp(-1j * np.outer(thetas, lags))
            partial = np.einsum("ql,lab->qab", phases, self._table[1:])
            values = self._table[0] + partial + partial.conj().transpose(0, 2, 1)
            return values
        return np.stack([self._evaluator(float(t)) for t in thetas])


class ProcessSpec:
    """Base class for stationary vector Gaussian process models."""

    kind: str = "abstract"

    def __init__(self, m: int):
        if int(m) < 1:
            raise InvalidSpec("block dimension m must be a positive integer")
        self.m = int(m)

    # -- contract -----------------------------------------------------------
    def autocovariance(self, lag: int) -> np.ndarray:
        """Block K(lag) = Cov(X_{t+lag}, X_t); K(-j) = K(j)' exactly."""
        raise NotImplementedError

    def spectral_density(self) -> SpectralDensity:
        raise NotImplementedError

    def autocovariance_sequence(self, max_lag: int) -> list[np.ndarray]:
        """[K(0), ..., K(max_lag)]; overridden where a recursion is cheaper."""
        return [self.autocovariance(lag) for lag in range(max_lag + 1)]

    def describe(self) -> str:
        return f"{self.kind}(m={self.m})"

    # -- serialization ------------------------------------------------------
    def to_json_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(doc: dict) -> "ProcessSpec":
        if not isinstance(doc, dict):
            raise InvalidSpec("process spec must be a JSON object")
        kind = doc.get("kind")
        builders = {
            "white": White.from_json_dict,
            "vma": VMA.from_json_dict,
            "var1": VAR1.from_json_dict,
            "explicit": Explicit.from_json_dict,
            "estimated": Estimated.from_json_dict,
        }
        if kind not in builders:
            raise InvalidSpec(f"unknown process kind {kind!r}")
        return builders[kind](doc)

    @staticmethod
    def from_json(text: str) -> "ProcessSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"process spec is not valid JSON: {exc}") from exc
        return ProcessSpec.from_json_dict(doc)


def _require_m(doc: dict) -> int:
    m = doc.get("m")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InvalidSpec("field 'm' must be a positive integer")
    return m


class White(ProcessSpec):
    """Independent blocks: K(0) = sigma, K(j) = 0 otherwise."""

    kind = "white"

    def __init__(self, m: int, sigma):
        super().__init__(m)
        self.sigma = _as_noise_covariance(sigma, self.m)

    def autocovariance(self, lag: int) -> np.ndarray:
        if lag == 0:
            return self.sigma.copy()
        return np.zeros((self.m, self.m))

    def spectral_density(self) -> SpectralDensity:
        constant = self.sigma.copy()
        return SpectralDensity(
            self.m, lambda theta: constant.copy(), "closed_form",
            max_lag=0, table=constant[np.newaxis].astype(complex),
        )

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "m": self.m, "sigma": self.sigma.tolist()}

    @staticmethod
    def from_json_dict(doc: dict) -> "White":
        m = _require_m(doc)
        if "sigma" not in doc:
            raise InvalidSpec("white spec requires 'sigma'")
        return White(m, doc["sigma"])


class VMA(ProcessSpec):
    """Vector moving average X_t = eps_t + sum_k B_k eps_{t-k}, order q."""

    kind = "vma"

    def __init__(self, m: int, coeffs, sigma):
        super().__init__(m)
        self.coeffs = [
            _as_square_matrix(block, self.m, f"coeffs[{k}]")
            for k, block in enumerate(coeffs)
        ]
        self.sigma = _as_noise_covariance(sigma, self.m)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def _phi(self, k: int) -> np.ndarray:
        # B_0 = I by convention; coefficients are B_1..B_q.
        if k == 0:
            return np.eye(self.m)
        return self.coeffs[k - 1]

    def autocovariance(self, lag: int) -> np.ndarray:
        j = abs(int(lag))
        if j > self.order:
            return np.zeros((self.m, self.m))
        total = np.zeros((self.m, self.m))
        for k in range(self.order - j + 1):
            total += self._phi(k + j) @ self.sigma @ self._phi(k).T
        if lag == 0:
            return _symmetrized(total)
        return total if lag > 0 else total.T

    def spectral_density(self) -> SpectralDensity:
        coeffs = [np.eye(self.m)] + [c.copy() for c in self.coeffs]
        sigma = self.sigma.copy()

        def evaluate(theta: float) -> np.ndarray:
            transfer = np.zeros((self.m, self.m), dtype=complex)
            for k, block in enumerate(coeffs):
                transfer += block * np.exp(-1j * k * theta)
            value = transfer @ sigma @ transfer.conj().T
            return 0.5 * (value + value.conj().T)

        return SpectralDensity(self.m, evaluate, "closed_form", max_lag=self.order)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "coeffs": [c.tolist() for c in self.coeffs],
            "sigma": self.sigma.tolist(),
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "VMA":
        m = _require_m(doc)
        coeffs = doc.get("coeffs")
        if not isinstance(coeffs, list) or not coeffs:
            raise InvalidSpec("vma spec requires a non-empty 'coeffs' list")
        if "sigma" not in doc:
            raise InvalidSpec("vma spec requires 'sigma'")
        return VMA(m, coeffs, doc["sigma"])


class VAR1(ProcessSpec):
    """First-order vector autoregression X_t = A X_{t-1} + eps_t.

    Requires spectral radius of A strictly below 1; the stationary
    covariance K(0) solves the discrete Lyapunov equation, and
    K(j) = A^j K(0) for j > 0.
    """

    kind = "var1"

    def __init__(self, m: int, A, sigma):
        super().__init__(m)
        self.A = _as_square_matrix(A, self.m, "A")
        radius = spectral_radius(self.A)
        if radius >= SPECTRAL_RADIUS_MAX:
            raise InvalidSpec(
                f"VAR(1) spectral radius {radius} is not strictly below 1"
            )
        self.sigma = _as_noise_covariance(sigma, self.m)
        self._state_cov = lyapunov_solve(self.A, self.sigma)

    @property
    def state_covariance(self) -> np.ndarray:
        """Stationary covariance K(0)."""
        return self._state_cov.copy()

    def autocovariance(self, lag: int) -> np.ndarray:
        j = abs(int(lag))
        block = self._state_cov.copy()
        for _ in range(j):
            block = self.A @ block
        if lag == 0:
            return block
        return block if lag > 0 else block.T

    def autocovariance_sequence(self, max_lag: int) -> list[np.ndarray]:
        blocks = [self._state_cov.copy()]
        for _ in range(max_lag):
            blocks.append(self.A @ blocks[-1])
        return blocks

    def spectral_density(self) -> SpectralDensity:
        identity = np.eye(self.m)
        A = self.A
        sigma = self.sigma

        def evaluate(theta: float) -> np.ndarray:
            inverse_arg = identity - A * np.exp(-1j * theta)
            half = np.linalg.solve(inverse_arg, sigma.astype(complex))
            value = np.linalg.solve(inverse_arg, half.conj().T).conj().T
            return 0.5 * (value + value.conj().T)

        return SpectralDensity(self.m, evaluate, "closed_form")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "A": self.A.tolist(),
            "sigma": self.sigma.tolist(),
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "VAR1":
        m = _require_m(doc)
        if "A" not in doc or "sigma" not in doc:
            raise InvalidSpec("var1 spec requires 'A' and 'sigma'")
        return VAR1(m, doc["A"], doc["sigma"])


class _TableSpec(ProcessSpec):
    """Shared behavior of lag-table-backed specs (explicit, estimated)."""

    def __init__(self, m: int, lags, kind: str):
        super().__init__(m)
        if isinstance(lags, MatrixAutocovariance):
            table = MatrixAutocovariance(m=self.m, blocks=lags.blocks, kind=kind)
        else:
            table = MatrixAutocovariance(m=self.m, blocks=dict(lags), kind=kind)
        self.table = table

    @property
    def max_lag(self) -> int:
        return self.table.max_lag

    def autocovariance(self, lag: int) -> np.ndarray:
        return self.table.block(int(lag))

    def spectral_density(self) -> SpectralDensity:
        support = self.table.max_lag
        stacked = np.stack(
            [self.table.block(lag).astype(complex) for lag in range(support + 1)]
        )

        def evaluate(theta: float) -> np.ndarray:
            partial = np.zeros((self.m, self.m), dtype=complex)
            for lag in range(1, support + 1):
                partial += stacked[lag] * np.exp(-1j * lag * theta)
            return stacked[0] + partial + partial.conj().T

        return SpectralDensity(
            self.m, evaluate, "fourier_truncation", max_lag=support, table=stacked
        )

    def _lags_json(self) -> dict:
        return {
            str(lag): block.tolist()
            for lag, block in sorted(self.table.blocks.items())
        }

    @staticmethod
    def _lags_from_json(doc: dict) -> dict[int, list]:
        lags = doc.get("lags")
        if not isinstance(lags, dict) or not lags:
            raise InvalidSpec("lag-table spec requires a non-empty 'lags' object")
        parsed: dict[int, list] = {}
        for key, block in lags.items():
            try:
                lag = int(key)
            except (TypeError, ValueError) as exc:
                raise InvalidSpec(f"lag key {key!r} is not an integer") from exc
            parsed[lag] = block
        return parsed


class Explicit(_TableSpec):
    """Process given directly by a finite autocovariance lag table."""

    kind = "explicit"

    def __init__(self, m: int, lags):
        super().__init__(m, lags, "explicit")

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "m": self.m, "lags": self._lags_json()}

    @staticmethod
    def from_json_dict(doc: dict) -> "Explicit":
        return Explicit(_require_m(doc), Explicit._lags_from_json(doc))


class Estimated(_TableSpec):
    """Lag table estimated from data through a lag window."""

    kind = "estimated"

    def __init__(self, m: int, lags, window_kind: str, window_max_lag: int):
        super().__init__(m, lags, "estimated")
        self.window_kind = str(window_kind)
        self.window_max_lag = int(window_max_lag)

    def describe(self) -> str:
        return (
            f"estimated(m={self.m},window={self.window_kind},"
            f"L={self.window_max_lag})"
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "lags": self._lags_json(),
            "window": {"kind": self.window_kind, "max_lag": self.window_max_lag},
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "Estimated":
        window = doc.get("window")
        if not isinstance(window, dict):
            raise InvalidSpec("estimated spec requires a 'window' object")
        kind = window.get("kind")
        max_lag = window.get("max_lag")
        if kind not in ("bartlett", "truncation"):
            raise InvalidSpec(f"unknown window kind {kind!r}")
        if not isinstance(max_lag, int) or isinstance(max_lag, bool) or max_lag < 1:
            raise InvalidSpec("window max_lag must be a positive integer")
        return Estimated(
            _require_m(doc), Estimated._lags_from_json(doc), kind, max_lag
        )
