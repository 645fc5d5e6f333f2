"""Eigen-analysis and time propagation of ``exp(t L)``.

Three expansion regimes are supported:

* skew-Hermitian generators (isolated systems) use an orthonormal eigenbasis;
* diagonalizable generators use right eigenvectors (columns of ``A``) and left
  eigenvectors taken as rows of ``A^{-1}``, which makes the pair biorthonormal
  by construction;
* defective generators use Jordan chains ``(L - lam) z(m) = z(m-1)`` built from
  numerical nullspaces of powers of ``L - lam``, with left chains again taken
  as rows of the inverse of the chain matrix.

Jordan structure is not continuous under perturbation, so chain construction
is restricted by default to ``d*d <= 16`` and every system carries a residual
and a condition number so callers can judge the result.
"""
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .core import DensityMatrix, as_density, as_operator, expm, max_abs, purity
from .errors import (
    ChainConstructionFailed,
    DimensionMismatch,
    NonFiniteInput,
    NonUniqueSteadyState,
    NonUnitaryGenerator,
    Unstable,
)
from .generators import Liouvillian, as_superop
from .vectorization import SuperKet, mho, mho_inv

KINDS = ("skew_hermitian", "diagonalizable", "defective")
MAX_DEFECTIVE_SIZE = 16


@dataclass(frozen=True, eq=False)
class JordanChain:
    """Ranked right/left generalized eigenvectors for one Jordan block.

    ``right[:, m-1]`` is the rank-``m`` right vector and ``left[m-1]`` the
    matching left (dual) row vector.
    """

    eigenvalue: complex
    right: np.ndarray
    left: np.ndarray

    @property
    def length(self):
        return self.right.shape[1]


@dataclass(frozen=True)
class Cluster:
    """Eigenvalues grouped as numerically equal."""

    eigenvalue: complex
    algebraic: int
    geometric: int
    chain_lengths: tuple


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    kind: str
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    chains: tuple
    clusters: tuple
    generator: np.ndarray
    condition: float
    residual: float
    tol_cluster: float

    @property
    def size(self):
        return self.generator.shape[0]

    @property
    def dim(self):
        d = int(round(np.sqrt(self.size)))
        return d if d * d == self.size else None

    @property
    def norm(self):
        return float(np.linalg.norm(self.generator, 2))

    def biorthonormality_defect(self):
        return max_abs(self.left @ self.right - np.eye(self.size))

    def completeness_defect(self):
        return max_abs(self.right @ self.left - np.eye(self.size))

    def chain_defect(self):
        """Largest ``|(L - lam) z(m) - z(m-1)|`` over all chains."""
        worst = 0.0
        for ch in self.chains:
            m = self.generator - ch.eigenvalue * np.eye(self.size)
            prev = np.zeros(self.size, dtype=complex)
            for k in range(ch.length):
                worst = max(worst, max_abs(m @ ch.right[:, k] - prev))
                prev = ch.right[:, k]
        return worst

    def evolution(self, t, method="auto"):
        """The superoperator ``exp(t L)`` assembled from the expansion."""
        cols = [self.propagate_vector(e, t, method) for e in np.eye(self.size)]
        return np.stack(cols, axis=1)

    def propagate_vector(self, v0, t, method="auto"):
        """``exp(t L) v0`` by one of the expansion formulas.

        ``method`` is ``"orthonormal"``, ``"biorthonormal"``, ``"generalized"``
        or ``"auto"`` (the natural one for :attr:`kind`).
        """
        v0 = np.asarray(v0, dtype=complex).reshape(-1)
        if v0.size != self.size:
            raise DimensionMismatch(f"vector of length {v0.size} for generator of size {self.size}")
        t = float(t)
        if method == "auto":
            method = {"skew_hermitian": "orthonormal",
                      "diagonalizable": "biorthonormal",
                      "defective": "generalized"}[self.kind]
        if method == "orthonormal":
            if self.kind != "skew_hermitian":
                raise ValueError("orthonormal expansion needs a skew-Hermitian generator")
            coeff = self.right.conj().T @ v0
            return self.right @ (np.exp(t * self.eigenvalues) * coeff)
        if method == "biorthonormal":
            if self.kind == "defective":
                raise ValueError("biorthonormal expansion needs a diagonalizable generator")
            coeff = self.left @ v0
            return self.right @ (np.exp(t * self.eigenvalues) * coeff)
        if method == "generalized":
            out = np.zeros(self.size, dtype=complex)
            for ch in self.chains:
                coeff = ch.left @ v0
                acc = np.zeros(self.size, dtype=complex)
                for m in range(1, ch.length + 1):
                    for n in range(m):
                        acc += (t**n / factorial(n)) * ch.right[:, m - n - 1] * coeff[m - 1]
                out += np.exp(ch.eigenvalue * t) * acc
            return out
        raise ValueError(f"unknown method {method!r}")


def _default_tol_cluster(norm):
    return max(1e-10, 1e-8 * norm)


def _cluster(values, tol):
    """Group indices of ``values`` whose members lie within ``tol`` of a neighbour."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = list(groups.values())
    out.sort(key=lambda g: (-np.mean(values[g].real), np.mean(values[g].imag)))
    return out


def _sort_order(values):
    return np.lexsort((values.imag, -values.real))


def _nullspace(m, tol):
    _, s, vh = np.linalg.svd(m)
    k = int(np.sum(s <= tol))
    return vh[len(s) - k:].conj().T, s


def _orth(cols, tol=1e-12):
    if cols.shape[1] == 0:
        return cols
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0])]


def _chains_for_cluster(op, lam, p, tol_rank):
    n = op.shape[0]
    m = op - lam * np.eye(n)
    powers = [np.eye(n, dtype=complex)]
    kernels = [np.zeros((n, 0), dtype=complex)]
    dims = [0]
    for k in range(1, p + 1):
        powers.append(powers[-1] @ m)
        scale = max(1.0, np.linalg.norm(powers[-1], 2))
        ker, _ = _nullspace(powers[-1], tol_rank * scale)
        kernels.append(ker)
        dims.append(ker.shape[1])
        if dims[-1] >= p:
            break
    if dims[-1] != p:
        raise ChainConstructionFailed(
            f"nullspace of (L - lam)^k reached dimension {dims[-1]}, "
            f"expected algebraic multiplicity {p} at lam={lam:.6g}"
        )
    q = len(dims) - 1
    dims.append(p)
    heads = []  # (length, vector)
    for k in range(q, 0, -1):
        count = (dims[k] - dims[k - 1]) - (dims[k + 1] - dims[k])
        if count < 0:
            raise ChainConstructionFailed(f"inconsistent kernel dimensions {dims[1:-1]}")
        if count == 0:
            continue
        existing = [np.linalg.matrix_power(m, length - k) @ v for length, v in heads]
        span = np.column_stack([kernels[k - 1]] + existing) if existing else kernels[k - 1]
        q_basis = _orth(span)
        resid = kernels[k] - q_basis @ (q_basis.conj().T @ kernels[k])
        u, s, _ = np.linalg.svd(resid, full_matrices=False)
        if len(s) < count or s[count - 1] < 1e-6:
            raise ChainConstructionFailed(f"could not find {count} chain heads of length {k}")
        for j in range(count):
            heads.append((k, u[:, j]))
    chains = []
    for length, v in heads:
        cols = [np.linalg.matrix_power(m, length - r) @ v for r in range(1, length + 1)]
        chains.append(np.column_stack(cols))
    return chains


def analyze(L, tol_cluster=None, tol_diag=None, tol_skew=None,
            max_defective_size=MAX_DEFECTIVE_SIZE):
    """Classify ``L`` and build its (generalized) eigen-system.

    ``L`` may be a :class:`Liouvillian` or any square array.
    """
    op = np.array(as_superop(L), dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatch(f"generator must be square, got {op.shape}")
    if not np.all(np.isfinite(op)):
        raise NonFiniteInput("generator has non-finite entries")
    n = op.shape[0]
    norm = float(np.linalg.norm(op, 2))
    tol_cluster = _default_tol_cluster(norm) if tol_cluster is None else float(tol_cluster)
    tol_skew = 1e-10 * max(1.0, norm) if tol_skew is None else float(tol_skew)
    op.setflags(write=False)

    if max_abs(op + op.conj().T) <= tol_skew:
        w, v = np.linalg.eigh(1j * op)
        lam = -1j * w
        order = _sort_order(lam)
        lam, v = lam[order], v[:, order]
        return _diagonal_system("skew_hermitian", op, lam, v, v.conj().T, tol_cluster)

    lam, v = np.linalg.eig(op)
    order = _sort_order(lam)
    lam, v = lam[order], v[:, order]
    sv = np.linalg.svd(v, compute_uv=False)
    tol_diag = n * np.finfo(float).eps if tol_diag is None else float(tol_diag)
    diagonalizable = sv[-1] > tol_diag * sv[0]
    groups = _cluster(lam, tol_cluster)
    tol_rank = 10.0 * tol_cluster
    if diagonalizable:
        for g in groups:
            if len(g) > 1:
                lam_bar = np.mean(lam[g])
                ker, _ = _nullspace(op - lam_bar * np.eye(n), tol_rank * max(1.0, norm))
                if ker.shape[1] < len(g):
                    diagonalizable = False
                    break
    if diagonalizable:
        return _diagonal_system("diagonalizable", op, lam, v, np.linalg.inv(v), tol_cluster)

    if n > max_defective_size:
        raise ChainConstructionFailed(
            f"generator of size {n} is defective; automatic Jordan chains are limited to "
            f"size {max_defective_size} (pass max_defective_size or build chains yourself)"
        )
    blocks = []
    for g in groups:
        lam_bar = complex(np.mean(lam[g]))
        for c in _chains_for_cluster(op, lam_bar, len(g), tol_rank):
            blocks.append((lam_bar, c))
    right = np.column_stack([c for _, c in blocks])
    left = np.linalg.inv(right)
    chains, eigenvalues, clusters = [], [], []
    col = 0
    for lam_bar, c in blocks:
        k = c.shape[1]
        chains.append(JordanChain(lam_bar, c, left[col:col + k]))
        eigenvalues.extend([lam_bar] * k)
        col += k
    for g in groups:
        lam_bar = complex(np.mean(lam[g]))
        lengths = tuple(sorted((ch.length for ch in chains if ch.eigenvalue == lam_bar), reverse=True))
        clusters.append(Cluster(lam_bar, len(g), len(lengths), lengths))
    residual = max(max_abs((op - ch.eigenvalue * np.eye(n)) @ ch.right[:, 0]) for ch in chains)
    return SpectralSystem(
        kind="defective",
        eigenvalues=np.array(eigenvalues),
        right=right,
        left=left,
        chains=tuple(chains),
        clusters=tuple(clusters),
        generator=op,
        condition=float(np.linalg.cond(right)),
        residual=float(residual),
        tol_cluster=tol_cluster,
    )


def _diagonal_system(kind, op, lam, right, left, tol_cluster):
    n = op.shape[0]
    chains = tuple(
        JordanChain(complex(lam[k]), right[:, k:k + 1], left[k:k + 1]) for k in range(n)
    )
    clusters = tuple(
        Cluster(complex(np.mean(lam[g])), len(g), len(g), (1,) * len(g))
        for g in _cluster(lam, tol_cluster)
    )
    residual = max_abs(op @ right - right * lam[None, :])
    return SpectralSystem(
        kind=kind,
        eigenvalues=lam,
        right=right,
        left=left,
        chains=chains,
        clusters=clusters,
        generator=op,
        condition=float(np.linalg.cond(right)),
        residual=float(residual),
        tol_cluster=tol_cluster,
    )


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __len__(self):
        return len(self.times)

    def traces(self):
        return np.array([np.trace(np.asarray(r)).real for r in self.states])

    def purities(self):
        return np.array([purity(r) for r in self.states])

    def expectations(self, b):
        b = as_operator(b)
        return np.array([np.trace(b @ np.asarray(r)) for r in self.states])


def _system_for(L, system):
    if system is not None:
        return system
    if isinstance(L, SpectralSystem):
        return L
    return analyze(L)


def propagate(L, rho0, times, system=None, method="auto", validate=True):
    """Evolve ``rho0`` under ``L`` and return a :class:`Trajectory`.

    States are Hermitized before validation.  With ``validate=False`` the raw
    (Hermitized) arrays are returned instead of :class:`DensityMatrix` objects,
    which is what non-physical test generators need.
    """
    sys = _system_for(L, system)
    rho0 = as_density(rho0) if validate else np.asarray(rho0, dtype=complex)
    r0 = np.asarray(rho0)
    d = r0.shape[0]
    if d * d != sys.size:
        raise DimensionMismatch(f"state of dim {d} for generator of size {sys.size}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.all(np.isfinite(times)):
        raise NonFiniteInput("times must be finite")
    v0 = r0.reshape(-1)
    states = []
    for t in times:
        if t == 0.0:
            r = r0.copy()
        else:
            r = mho_inv(sys.propagate_vector(v0, t, method), d)
        r = 0.5 * (r + r.conj().T)
        states.append(DensityMatrix(r) if validate else r)
    return Trajectory(times, tuple(states))


def propagate_expm_oracle(L, rho0, t):
    """Independent path: ``mho_inv(expm(t L) mho(rho0))``."""
    op = as_superop(L)
    r0 = np.asarray(as_density(rho0))
    d = r0.shape[0]
    if d * d != op.shape[0]:
        raise DimensionMismatch(f"state of dim {d} for generator of size {op.shape[0]}")
    r = mho_inv(expm(float(t) * op) @ r0.reshape(-1), d)
    return DensityMatrix.hermitized(r)


@dataclass(frozen=True)
class StabilityReport:
    max_real: float
    stable: bool
    zero_modes: tuple
    flags: tuple

    @property
    def flagged(self):
        return bool(self.flags)


def _tol_zero(sys, tol):
    return max(1e-10, 1e-9 * sys.norm) if tol is None else float(tol)


def stability_report(sys, tol_zero=None, tol_stab=None):
    """Summarise ``Re(lambda) <= 0`` and the structure of the zero-real modes."""
    tz = _tol_zero(sys, tol_zero)
    ts = tz if tol_stab is None else float(tol_stab)
    max_real = float(np.max(sys.eigenvalues.real))
    zero = tuple(c for c in sys.clusters if abs(c.eigenvalue.real) <= tz)
    flags = []
    for c in zero:
        if c.geometric > 1:
            flags.append(f"eigenvalue {c.eigenvalue:.6g} with zero real part has geometric "
                         f"multiplicity {c.geometric}")
        if max(c.chain_lengths) > 1:
            flags.append(f"eigenvalue {c.eigenvalue:.6g} with zero real part is defective "
                         f"(chain length {max(c.chain_lengths)}): polynomial growth in t")
    return StabilityReport(max_real, max_real <= ts, zero, tuple(flags))


def steady_state(sys, tol_zero=None, tol_stab=None):
    """Unique stationary state spanned by the zero-real-part right eigenvector."""
    if not isinstance(sys, SpectralSystem):
        sys = analyze(sys)
    report = stability_report(sys, tol_zero, tol_stab)
    if not report.stable:
        raise Unstable(f"max Re(lambda) = {report.max_real:.3e} > 0")
    tz = _tol_zero(sys, tol_zero)
    idx = np.flatnonzero(np.abs(sys.eigenvalues.real) <= tz)
    if len(idx) != 1:
        raise NonUniqueSteadyState(
            f"{len(idx)} eigenvalues with zero real part; steady state is not unique",
            basis=sys.right[:, idx].copy(),
            eigenvalues=sys.eigenvalues[idx].copy(),
        )
    d = sys.dim
    if d is None:
        raise DimensionMismatch("generator size is not a perfect square")
    r = mho_inv(sys.right[:, idx[0]], d)
    tr = np.trace(r)
    if abs(tr) < 1e-12 * max(1.0, max_abs(r)):
        raise NonUniqueSteadyState("zero mode is traceless; no normalisable steady state",
                                   basis=sys.right[:, idx].copy())
    return DensityMatrix.hermitized(r / tr)


def heisenberg_superket(L, a, t):
    """Heisenberg-picture superket ``U(t)^dag |A>>`` with ``U = exp(t L)``."""
    if not isinstance(L, Liouvillian) or L.kind != "unitary":
        raise NonUnitaryGenerator("Heisenberg picture requires a unitary-kind Liouvillian")
    u = expm(float(t) * L.op)
    ket = mho(a)
    if ket.data.size != L.size:
        raise DimensionMismatch(f"operator of dim {ket.dim} for generator of size {L.size}")
    return SuperKet(u.conj().T @ ket.data, ket.dim)


def interaction_generator(L0, Lprime, s):
    """``U0(s)^{-1} L'(s) U0(s)`` with ``U0(s) = exp(s L0)``.

    For a skew-Hermitian ``L0`` the inverse equals ``U0^dag``.
    """
    op0 = as_superop(L0)
    lp = Lprime(s) if callable(Lprime) else as_superop(Lprime)
    return expm(-s * op0) @ np.asarray(lp, dtype=complex) @ expm(s * op0)


@dataclass(frozen=True, eq=False)
class DysonInfo:
    terms: tuple
    residual_estimate: float
    steps: int
    order: int


def dyson_propagator(L0, Lprime, t, order=2, steps=64, return_info=False):
    """Truncated Dyson series ``U0(t) U_I(t)`` on a uniform time grid.

    The nested time-ordered integrals are evaluated as cumulative trapezoid
    sums, ``I_k(s_j) = I_k(s_{j-1}) + h/2 (F_j I_{k-1}(s_j) + F_{j-1} I_{k-1}(s_{j-1}))``
    with ``F = L'_I`` and ``I_0 = 1``, which is second order in the step.
    ``residual_estimate`` is the size of the first omitted term estimated as
    ``(t max|L'_I|)^(order+1) / (order+1)!``.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    t = float(t)
    op0 = as_superop(L0)
    n = op0.shape[0]
    ident = np.eye(n, dtype=complex)
    if t == 0.0:
        out = ident.copy()
        info = DysonInfo((), 0.0, steps, order)
        return (out, info) if return_info else out
    grid = np.linspace(0.0, t, steps + 1)
    h = t / steps
    if callable(Lprime):
        samples = [np.asarray(Lprime(s), dtype=complex) for s in grid]
    else:
        samples = [np.asarray(as_superop(Lprime), dtype=complex)] * len(grid)
    if any(x.shape != (n, n) for x in samples):
        raise DimensionMismatch("perturbation size does not match L0")
    f = [expm(-s * op0) @ x @ expm(s * op0) for s, x in zip(grid, samples)]
    prev = [ident] * (steps + 1)
    total = ident.copy()
    terms = []
    for _ in range(order):
        cur = [np.zeros((n, n), dtype=complex)]
        for j in range(1, steps + 1):
            cur.append(cur[-1] + 0.5 * h * (f[j] @ prev[j] + f[j - 1] @ prev[j - 1]))
        terms.append(cur[-1])
        total = total + cur[-1]
        prev = cur
    fmax = max(np.linalg.norm(fj, 2) for fj in f)
    resid = (abs(t) * fmax) ** (order + 1) / factorial(order + 1)
    out = expm(t * op0) @ total
    if return_info:
        return out, DysonInfo(tuple(terms), float(resid), steps, order)
    return out
