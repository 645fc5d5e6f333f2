"""Dense operator algebra on a d-dimensional state space.

Operators are plain ``(d, d)`` complex numpy arrays.  Density matrices and
measurement sets get thin validating wrappers because they carry invariants
(unit trace, positivity, completeness) that the rest of the package relies on.

Basis convention for two-level examples: index 0 is the excited state ``|e>``
and index 1 the ground state ``|g>``, so ``sigma_+ = |e><g|`` is
``[[0, 1], [0, 0]]`` and ``sigma_3 = diag(1, -1)``.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import _accel
from .errors import (
    DimensionMismatch,
    IncompleteMeasurementSet,
    InvalidDensityMatrix,
    NonFiniteInput,
)

TOL_TRACE = 1e-10
TOL_HERMITIAN = 1e-10
TOL_PSD = 1e-8
TOL_COMPLETE = 1e-8
PROB_WINDOW = 1e-12

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
KET_E = np.array([1, 0], dtype=complex)
KET_G = np.array([0, 1], dtype=complex)


def as_operator(x, name="operator"):
    """Coerce to a square complex array, rejecting non-finite entries."""
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{name} has non-finite entries")
    return a


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def dagger(x):
    return np.conj(np.asarray(x)).T


def ketbra(ket, bra):
    """Outer product ``|ket><bra|``."""
    return np.outer(np.asarray(ket, dtype=complex), np.conj(np.asarray(bra, dtype=complex)))


def max_abs(x):
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def hermiticity_defect(x):
    x = np.asarray(x)
    return max_abs(x - dagger(x))


def is_hermitian(x, tol=TOL_HERMITIAN):
    return hermiticity_defect(x) <= tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state: unit trace, Hermitian, positive semidefinite.

    Positivity is judged on the Hermitized matrix ``(rho + rho^dag)/2`` so that
    antisymmetric roundoff cannot produce spurious complex eigenvalues.
    """

    op: np.ndarray
    tol_trace: float = field(default=TOL_TRACE, repr=False, compare=False)
    tol_hermitian: float = field(default=TOL_HERMITIAN, repr=False, compare=False)
    tol_psd: float = field(default=TOL_PSD, repr=False, compare=False)

    def __post_init__(self):
        op = as_operator(self.op, "density matrix").copy()
        op.setflags(write=False)
        object.__setattr__(self, "op", op)
        tr = np.trace(op)
        if abs(tr - 1.0) > self.tol_trace:
            raise InvalidDensityMatrix(f"trace is {tr}, expected 1")
        herm = hermiticity_defect(op)
        if herm > self.tol_hermitian:
            raise InvalidDensityMatrix(f"not Hermitian (defect {herm:.3e})")
        lo = self.min_eigenvalue
        if lo < -self.tol_psd:
            raise InvalidDensityMatrix(f"not positive semidefinite (min eigenvalue {lo:.3e})")

    @property
    def dim(self):
        return self.op.shape[0]

    @property
    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.op + dagger(self.op)))[0])

    def __array__(self, dtype=None, copy=None):
        return self.op if dtype is None else self.op.astype(dtype)

    @classmethod
    def hermitized(cls, x, **tols):
        """Build from ``(x + x^dag)/2``; used on numerically propagated states."""
        x = np.asarray(x, dtype=complex)
        return cls(0.5 * (x + dagger(x)), **tols)

    @classmethod
    def pure(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


def as_density(rho):
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def completeness_matrix(ops):
    """``sum_m M_m^dag M_m`` for a list of square operators."""
    ops = [as_operator(m) for m in ops]
    total = np.zeros_like(ops[0])
    for m in ops:
        _same_dim(m, ops[0])
        total = total + dagger(m) @ m
    return total


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """Generalized measurement ``{M_m}`` with optional real outcome labels."""

    ops: Sequence[np.ndarray]
    labels: Optional[Sequence[float]] = None
    tol: float = field(default=TOL_COMPLETE, repr=False, compare=False)

    def __post_init__(self):
        ops = tuple(as_operator(m, "measurement operator") for m in self.ops)
        if not ops:
            raise IncompleteMeasurementSet("empty measurement set")
        object.__setattr__(self, "ops", ops)
        if self.labels is not None:
            if len(self.labels) != len(ops):
                raise DimensionMismatch("labels and operators differ in length")
            object.__setattr__(self, "labels", tuple(float(x) for x in self.labels))
        defect = self.completeness_defect
        if defect > self.tol:
            raise IncompleteMeasurementSet(f"sum M^dag M differs from identity by {defect:.3e}")

    @property
    def dim(self):
        return self.ops[0].shape[0]

    @property
    def completeness_defect(self):
        total = completeness_matrix(self.ops)
        return max_abs(total - np.eye(total.shape[0]))


def hs_inner(a, b):
    """Hilbert-Schmidt inner product ``<A, B> = Tr[B A^dag]``."""
    a = as_operator(a)
    b = as_operator(b)
    _same_dim(a, b)
    return complex(np.trace(b @ dagger(a)))


def purity(rho):
    """``Tr[rho^2]``; equals 1 exactly for pure states."""
    r = as_density(rho).op
    return float(np.real(np.trace(r @ r)))


def expectation(rho, b):
    """``<B> = Tr[B rho]``."""
    r = as_density(rho).op
    b = as_operator(b)
    _same_dim(r, b)
    return complex(np.trace(b @ r))


def measure_prob(rho, m):
    """Outcome probability ``p(m) = Tr[M^dag M rho]``, clamped to [0, 1]."""
    r = as_density(rho).op
    m = as_operator(m)
    _same_dim(r, m)
    p = float(np.real(np.trace(dagger(m) @ m @ r)))
    if p < -PROB_WINDOW or p > 1.0 + PROB_WINDOW:
        raise ValueError(f"probability {p} outside [0, 1]; is M a contraction?")
    return min(max(p, 0.0), 1.0)


def nonselective_update(rho, mset):
    """State after measuring without reading the outcome: ``sum_m M rho M^dag``."""
    if not isinstance(mset, MeasurementSet):
        mset = MeasurementSet(list(mset))
    r = as_density(rho).op
    _same_dim(r, mset.ops[0])
    out = sum(m @ r @ dagger(m) for m in mset.ops)
    return DensityMatrix.hermitized(out)


def kron(x, y):
    """Kronecker product of two matrices (any shapes)."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    y = np.atleast_2d(np.asarray(y, dtype=complex))
    return _accel.kron(x, y)


def expm(a):
    """Matrix exponential (scaling and squaring, Pade core via scipy).

    Works for operators and superoperators alike; rejects non-finite input.
    """
    a = as_operator(a, "expm argument")
    return scipy.linalg.expm(a)
