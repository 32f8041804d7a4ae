import numpy as np
import pytest

from pdmeans import _kernels
from pdmeans.matfun import SpdMatrix, validate_spd


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # JIT-compile every kernel once so timed tests measure math, not numba.
    _kernels.warm_up()


def random_orthogonal(rng, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_spd_matrix(rng, d: int, lo: float = 0.5, hi: float = 4.0) -> SpdMatrix:
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), d))
    q = random_orthogonal(rng, d)
    a = (q * lam) @ q.T
    return validate_spd(0.5 * (a + a.T))


def random_diagonal_spd(rng, d: int, lo: float = 0.5, hi: float = 4.0):
    diag = np.exp(rng.uniform(np.log(lo), np.log(hi), d))
    return diag, validate_spd(np.diag(diag))
