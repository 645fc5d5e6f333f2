"""Vectorization of operators into Liouville space.

The layout is row-major: the operator ``|a><b|`` maps to ``|a> (x) |b>*``,
so entry ``X[v, w]`` lands at flat index ``v*d + w``.  Under this layout
``vec(A B C) = (A (x) C^T) vec(B)``.  The column-stacking layout used by some
other libraries is only reachable through the explicit ``*_column_*``
converters at the bottom of this module.

Superoperators are plain ``(d*d, d*d)`` complex arrays.
"""
from dataclasses import dataclass

import numpy as np

from .core import _same_dim, as_operator, kron
from .errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class SuperKet:
    """A vectorized operator: ``data`` has length ``dim**2``."""

    data: np.ndarray
    dim: int

    def __post_init__(self):
        data = np.array(self.data, dtype=complex).reshape(-1)
        dim = int(self.dim)
        if dim < 1 or data.size != dim * dim:
            raise DimensionMismatch(f"superket of length {data.size} does not match dim {dim}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dim", dim)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __len__(self):
        return self.data.size

    def bra(self):
        """The dual ``<<A|`` as a conjugated row vector."""
        return np.conj(self.data)

    def inner(self, other):
        """``<<self|other>>``."""
        other = other.data if isinstance(other, SuperKet) else np.asarray(other).reshape(-1)
        return complex(np.vdot(self.data, other))


def _infer_dim(n):
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatch(f"length {n} is not a perfect square")
    return d


def mho(x):
    """Bra-flipper: operator -> superket (row-major stacking)."""
    x = as_operator(x)
    return SuperKet(x.reshape(-1), x.shape[0])


def mho_inv(v, dim=None):
    """Inverse bra-flipper: superket (or flat array) -> ``(d, d)`` operator."""
    if isinstance(v, SuperKet):
        if dim is not None and int(dim) != v.dim:
            raise DimensionMismatch(f"superket has dim {v.dim}, not {dim}")
        return np.array(v.data).reshape(v.dim, v.dim)
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = _infer_dim(v.size) if dim is None else int(dim)
    if d * d != v.size:
        raise DimensionMismatch(f"length {v.size} is not {d}**2")
    return v.copy().reshape(d, d)


def superket_basis(nu, nu_p, d):
    """Standard basis superket ``|nu, nu'>> = |nu> (x) |nu'>*``."""
    d = int(d)
    if not (0 <= nu < d and 0 <= nu_p < d):
        raise IndexError(f"basis indices ({nu}, {nu_p}) out of range for d={d}")
    e = np.zeros(d * d, dtype=complex)
    e[nu * d + nu_p] = 1.0
    return SuperKet(e, d)


def liouville_inner(a, b):
    """``<<A|B>> = Tr[B A^dag]`` computed in Liouville space."""
    return mho(a).inner(mho(b))


def apply(s, ket):
    """Apply a superoperator to a superket."""
    s = np.asarray(s, dtype=complex)
    if not isinstance(ket, SuperKet):
        ket = SuperKet(ket, _infer_dim(np.size(ket)))
    if s.shape != (len(ket), len(ket)):
        raise DimensionMismatch(f"superoperator {s.shape} cannot act on length {len(ket)}")
    return SuperKet(s @ ket.data, ket.dim)


def triple_superop(a, c):
    """``A (x) C^T``, the superoperator with ``vec(A B C) = (A (x) C^T) vec(B)``."""
    a = as_operator(a)
    c = as_operator(c)
    _same_dim(a, c)
    return kron(a, c.T)


def super_comm(x, y):
    """Super-commutator ``[[X, Y]] = X (x) Y^T - Y (x) X^T``."""
    x = as_operator(x)
    y = as_operator(y)
    _same_dim(x, y)
    return kron(x, y.T) - kron(y, x.T)


def super_acomm(x, y):
    """Super-anticommutator ``[[X, Y]]_+ = X (x) Y^T + Y (x) X^T``."""
    x = as_operator(x)
    y = as_operator(y)
    _same_dim(x, y)
    return kron(x, y.T) + kron(y, x.T)


def vectorize_product(a, b):
    """Superket of ``A (x) B`` on the composite space of dimension ``d1*d2``."""
    return mho(kron(a, b))


def composite_index(nu, mu, d2):
    """Flat composite-system index of the product basis state ``|nu>|mu>``."""
    return nu * d2 + mu


# ---------------------------------------------------------------------------
# column-stacking interop
# ---------------------------------------------------------------------------

def _swap_permutation(d):
    idx = np.arange(d * d).reshape(d, d)
    return idx.T.reshape(-1)


def superket_to_column(v, dim=None):
    """Reorder a row-major superket into column-stacking order."""
    x = mho_inv(v, dim)
    return x.T.reshape(-1)


def superket_from_column(v, dim=None):
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = _infer_dim(v.size) if dim is None else int(dim)
    return SuperKet(v.reshape(d, d).T.reshape(-1), d)


def superop_to_column(s):
    """Conjugate a row-major superoperator into the column-stacking layout."""
    s = np.asarray(s, dtype=complex)
    p = _swap_permutation(_infer_dim(s.shape[0]))
    return s[np.ix_(p, p)]


def superop_from_column(s):
    # the swap permutation is an involution
    return superop_to_column(s)
