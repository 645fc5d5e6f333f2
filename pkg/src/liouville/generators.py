"""Liouvillian superoperators for unitary and Lindblad (GKSL) dynamics.

Convention: ``d/dt vec(rho) = L vec(rho)`` with hbar = 1, so Hamiltonians are
angular frequencies and

    L = -i (H (x) I - I (x) H^T)
        + sum_k g_k (A_k (x) A_k* - 1/2 [[A_k^dag A_k, I]]_+).
"""
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from . import _accel
from .core import TOL_HERMITIAN, as_operator, hermiticity_defect, max_abs
from .errors import DimensionMismatch, NonHermitianHamiltonian

KINDS = ("unitary", "dissipative", "combined")


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian plus a list of ``(rate, jump operator)`` pairs."""

    H: np.ndarray
    jumps: Sequence[Tuple[float, np.ndarray]] = ()
    tol_hermitian: float = field(default=TOL_HERMITIAN, repr=False)

    def __post_init__(self):
        h = as_operator(self.H, "hamiltonian")
        defect = hermiticity_defect(h)
        if defect > self.tol_hermitian:
            raise NonHermitianHamiltonian(f"hamiltonian not Hermitian (defect {defect:.3e})")
        jumps = []
        for k, (rate, op) in enumerate(self.jumps):
            rate = float(rate)
            if not np.isfinite(rate) or rate < 0:
                raise ValueError(f"jumps[{k}].rate must be a finite nonnegative number, got {rate}")
            op = as_operator(op, f"jumps[{k}].operator")
            if op.shape != h.shape:
                raise DimensionMismatch(f"jumps[{k}].operator has shape {op.shape}, expected {h.shape}")
            jumps.append((rate, op))
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dim(self):
        return self.H.shape[0]


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """A generator superoperator with its structural tag."""

    op: np.ndarray
    kind: str = "combined"
    hbar: float = field(default=1.0, init=False)

    def __post_init__(self):
        op = np.array(self.op, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionMismatch(f"Liouvillian must be square, got {op.shape}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        op.setflags(write=False)
        object.__setattr__(self, "op", op)

    @property
    def size(self):
        return self.op.shape[0]

    @property
    def dim(self):
        """State-space dimension ``d`` (``size == d*d``)."""
        d = int(round(np.sqrt(self.size)))
        if d * d != self.size:
            raise DimensionMismatch(f"size {self.size} is not a perfect square")
        return d

    def __array__(self, dtype=None, copy=None):
        return self.op if dtype is None else self.op.astype(dtype)

    def __add__(self, other):
        if not isinstance(other, Liouvillian):
            return NotImplemented
        kind = self.kind if self.kind == other.kind else "combined"
        return Liouvillian(self.op + other.op, kind)

    def scaled(self, c):
        return Liouvillian(c * self.op, self.kind)


def as_superop(x):
    return x.op if isinstance(x, Liouvillian) else np.asarray(x, dtype=complex)


def unitary_liouvillian(H, tol=TOL_HERMITIAN):
    """``-i [[H, I]] = -i (H (x) I - I (x) H^T)``; skew-Hermitian and traceless."""
    h = as_operator(H, "hamiltonian")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise NonHermitianHamiltonian(f"hamiltonian not Hermitian (defect {defect:.3e})")
    return Liouvillian(_accel.unitary_generator(h), "unitary")


def dissipator(jumps, dim=None):
    """Dissipative part ``sum_k g_k (A (x) A* - 1/2 [[A^dag A, I]]_+)``.

    Zero-rate terms are skipped.
    """
    terms = [(float(g), as_operator(a)) for g, a in jumps if float(g) != 0.0]
    if not terms:
        if dim is None:
            raise ValueError("dim is required when there are no nonzero jump terms")
        return np.zeros((dim * dim, dim * dim), dtype=complex)
    rates = np.array([g for g, _ in terms])
    ops = np.stack([a for _, a in terms])
    return _accel.dissipator(rates, ops)


def lindblad_liouvillian(model):
    """Full GKSL generator for a :class:`LindbladModel`."""
    unitary = unitary_liouvillian(model.H, tol=model.tol_hermitian)
    if not any(g != 0.0 for g, _ in model.jumps):
        return unitary
    diss = dissipator(model.jumps, model.dim)
    if max_abs(model.H) == 0.0:
        return Liouvillian(diss, "dissipative")
    return Liouvillian(unitary.op + diss, "combined")


def matrix_element(L, nu, nu1, nu2, nu3):
    """Entry ``L_{(nu nu1), (nu2 nu3)}`` by direct lookup."""
    op = as_superop(L)
    d = int(round(np.sqrt(op.shape[0])))
    for i in (nu, nu1, nu2, nu3):
        if not 0 <= i < d:
            raise IndexError(f"index {i} out of range for d={d}")
    return complex(op[nu * d + nu1, nu2 * d + nu3])


def unitary_matrix_element(H, nu, nu1, nu2, nu3):
    """Closed form ``-i (H_{nu nu2} delta_{nu1 nu3} - delta_{nu nu2} H*_{nu1 nu3})``."""
    h = as_operator(H)
    d = h.shape[0]
    for i in (nu, nu1, nu2, nu3):
        if not 0 <= i < d:
            raise IndexError(f"index {i} out of range for d={d}")
    val = 0j
    if nu1 == nu3:
        val += h[nu, nu2]
    if nu == nu2:
        val -= np.conj(h[nu1, nu3])
    return complex(-1j * val)


def trace_preservation_defect(L):
    """``max |<<I| L|``; zero for trace-preserving generators."""
    op = as_superop(L)
    d = int(round(np.sqrt(op.shape[0])))
    ident = np.eye(d, dtype=complex).reshape(-1)
    return max_abs(ident.conj() @ op)


def skew_hermiticity_defect(L):
    op = as_superop(L)
    return max_abs(op + op.conj().T)
