import numpy as np
import pytest

from gaussrate import VAR1, VMA, White


def make_ar1(phi: float = 0.5, var: float = 1.0) -> VAR1:
    """Scalar AR(1) as the m=1 specialization of VAR(1)."""
    return VAR1(1, [[phi]], [[var]])


def make_ma1(b: float = 0.5, var: float = 1.0) -> VMA:
    return VMA(1, [[[b]]], [[var]])


def make_var1_2x2() -> VAR1:
    return VAR1(2, [[0.5, 0.1], [0.0, 0.3]], np.eye(2))


def random_spd(rng, dim: int, lo: float = 0.5, hi: float = 3.0) -> np.ndarray:
    """Well-conditioned random SPD matrix with eigenvalues in [lo, hi]."""
    basis, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eigenvalues = rng.uniform(lo, hi, dim)
    mat = (basis * eigenvalues) @ basis.T
    return 0.5 * (mat + mat.T)


@pytest.fixture
def ar1():
    return make_ar1()


@pytest.fixture
def ma1():
    return make_ma1()


@pytest.fixture
def var1_2x2():
    return make_var1_2x2()


@pytest.fixture
def white_m1():
    return White(1, [[1.0]])
