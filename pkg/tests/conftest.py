import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from posforms import exact as ex  # noqa: E402
from posforms.exterior import Form, multi_indices  # noqa: E402


def random_form(rng, n, p, q, exact=False, scale=3):
    shape = (len(multi_indices(n, p)), len(multi_indices(n, q)))
    if exact:
        re = rng.integers(-scale, scale + 1, shape)
        im = rng.integers(-scale, scale + 1, shape)
        den = rng.integers(1, 4, shape)
        c = np.empty(shape, dtype=object)
        for idx in np.ndindex(shape):
            c[idx] = ex.GaussianRational(Fraction(int(re[idx]), int(den[idx])), int(im[idx]))
        return Form(n, p, q, c)
    return Form(n, p, q, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_hermitian(rng, N=6):
    X = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return (X + X.conj().T) / 2


def random_real_form(rng, n, p, exact=False):
    f = random_form(rng, n, p, p, exact)
    return f + f.conjugate()


def random_unitary(rng, n):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(X)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
