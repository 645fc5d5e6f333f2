"""Index-permutation kernels with an optional numba path.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorised numpy version.  The loop versions are used when numba imports and
``LIOUVILLE_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy versions
are used.  Both are importable directly so tests and the benchmark can compare
them regardless of the active backend.
"""
import os

import numpy as np

_flag = os.environ.get("LIOUVILLE_DISABLE_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _disabled


def _jit(fn):
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# loop kernels (numba)
# ---------------------------------------------------------------------------

@_jit
def kron_loops(x, y):
    m, n = x.shape
    p, q = y.shape
    out = np.empty((m * p, n * q), dtype=np.complex128)
    for i in range(m):
        for j in range(n):
            xij = x[i, j]
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = xij * y[k, l]
    return out


@_jit
def reshuffle_loops(s, d):
    # R[(a,b),(c,e)] = S[(a,c),(b,e)]
    out = np.empty((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            for c in range(d):
                for e in range(d):
                    out[a * d + b, c * d + e] = s[a * d + c, b * d + e]
    return out


@_jit
def dissipator_loops(rates, jumps):
    # sum_k g_k (A (x) A* - 1/2 (A^dag A (x) I + I (x) (A^dag A)^T))
    nj, d, _ = jumps.shape
    n = d * d
    out = np.zeros((n, n), dtype=np.complex128)
    for k in range(nj):
        g = rates[k]
        if g == 0.0:
            continue
        a = jumps[k]
        m = np.zeros((d, d), dtype=np.complex128)
        for i in range(d):
            for j in range(d):
                acc = 0j
                for r in range(d):
                    acc += np.conj(a[r, i]) * a[r, j]
                m[i, j] = acc
        for i in range(d):
            for j in range(d):
                row = i * d + j
                for p in range(d):
                    for q in range(d):
                        val = a[i, p] * np.conj(a[j, q])
                        if j == q:
                            val -= 0.5 * m[i, p]
                        if i == p:
                            val -= 0.5 * m[q, j]
                        out[row, p * d + q] += g * val
    return out


@_jit
def unitary_generator_loops(h):
    # -i (H (x) I - I (x) H^T)
    d = h.shape[0]
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            row = i * d + j
            for p in range(d):
                out[row, p * d + j] += -1j * h[i, p]
                out[row, i * d + p] += 1j * h[p, j]
    return out


# ---------------------------------------------------------------------------
# numpy kernels
# ---------------------------------------------------------------------------

def kron_numpy(x, y):
    return np.kron(x, y)


def reshuffle_numpy(s, d):
    return s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def dissipator_numpy(rates, jumps):
    nj, d, _ = jumps.shape
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for g, a in zip(rates, jumps):
        if g == 0.0:
            continue
        m = a.conj().T @ a
        out += g * (np.kron(a, a.conj()) - 0.5 * (np.kron(m, eye) + np.kron(eye, m.T)))
    return out


def unitary_generator_numpy(h):
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


def _c128(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def kron(x, y):
    if USE_NUMBA:
        return kron_loops(_c128(x), _c128(y))
    return kron_numpy(_c128(x), _c128(y))


def reshuffle(s, d):
    if USE_NUMBA:
        return reshuffle_loops(_c128(s), int(d))
    return reshuffle_numpy(_c128(s), int(d))


def dissipator(rates, jumps):
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    jumps = _c128(jumps)
    if USE_NUMBA:
        return dissipator_loops(rates, jumps)
    return dissipator_numpy(rates, jumps)


def unitary_generator(h):
    if USE_NUMBA:
        return unitary_generator_loops(_c128(h))
    return unitary_generator_numpy(_c128(h))
