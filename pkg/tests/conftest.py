import mpmath
import numpy as np
import pytest


def series_expm(a, dps=40, max_terms=2000):
    """High-precision Taylor series for exp(A); stops when terms drop below 10^-dps."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    with mpmath.workdps(dps):
        m = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                m[i, j] = mpmath.mpc(a[i, j].real, a[i, j].imag)
        total = mpmath.eye(n)
        term = mpmath.eye(n)
        eps = mpmath.mpf(10) ** (-dps)
        for k in range(1, max_terms):
            term = term * m / k
            total += term
            if mpmath.mnorm(term, 1) < eps * max(1, mpmath.mnorm(total, 1)):
                break
        return np.array([[complex(total[i, j]) for j in range(n)] for i in range(n)])


def brute_vec(x):
    """Row-major superket built entry by entry."""
    d = x.shape[0]
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        for j in range(d):
            v[i * d + j] = x[i, j]
    return v


def rand_c(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def rand_herm(rng, d):
    x = rand_c(rng, (d, d))
    return 0.5 * (x + x.conj().T)


def rand_rho(rng, d):
    x = rand_c(rng, (d, d))
    r = x @ x.conj().T
    return r / np.trace(r)


def rand_unitary(rng, d):
    q, r = np.linalg.qr(rand_c(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
