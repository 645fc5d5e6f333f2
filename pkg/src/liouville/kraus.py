"""Kraus operator-sum representations of channel superoperators.

A channel ``S = sum_a K_a (x) conj(K_a)`` (row-major vectorization) is turned
into its Choi-type matrix by the index reshuffle
``R[(a, b), (c, e)] = S[(a, c), (b, e)]``, which equals
``sum_a vec(K_a) vec(K_a)^dag`` and is therefore Hermitian positive
semidefinite exactly when the map is completely positive.  Kraus operators are
read off from its eigendecomposition.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _accel
from .core import DensityMatrix, TOL_COMPLETE, as_density, as_operator, completeness_matrix, dagger, max_abs
from .errors import DimensionMismatch, NotCompletelyPositive, NotHermitianChoi
from .generators import as_superop

TOL_CHOI_HERMITIAN = 1e-8


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Operators ``K_a`` of one channel, optionally tagged with a time.

    ``complete`` records whether the set is trace preserving to within
    ``tol``; incomplete sets are allowed but flagged.
    """

    ops: tuple
    t: Optional[float] = None
    tol: float = field(default=TOL_COMPLETE, repr=False)

    def __post_init__(self):
        ops = tuple(np.array(as_operator(k, f"ops[{i}]")) for i, k in enumerate(self.ops))
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        for i, k in enumerate(ops):
            if k.shape != ops[0].shape:
                raise DimensionMismatch(f"ops[{i}] has shape {k.shape}, expected {ops[0].shape}")
            k.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    @property
    def dim(self):
        return self.ops[0].shape[0]

    @property
    def complete(self):
        return completeness_defect(self) <= self.tol


def _as_kraus(x):
    return x if isinstance(x, KrausSet) else KrausSet(tuple(x))


def choi_reshuffle(s):
    """Reshuffle a ``(d*d, d*d)`` superoperator; applying it twice is the identity."""
    s = np.asarray(as_superop(s), dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch(f"superoperator must be square, got {s.shape}")
    d = int(round(np.sqrt(s.shape[0])))
    if d * d != s.shape[0]:
        raise DimensionMismatch(f"size {s.shape[0]} is not a perfect square")
    return _accel.reshuffle(s, d)


def _fix_phase(k):
    flat = k.reshape(-1)
    j = int(np.argmax(np.abs(flat)))
    if flat[j] == 0:
        return k
    out = k * (abs(flat[j]) / flat[j])
    out.reshape(-1)[j] = abs(flat[j])
    return out


def kraus_from_superop(s, tol=None, t=None):
    """Extract a minimal Kraus set from a channel superoperator.

    Parameters
    ----------
    s : array_like
        Channel superoperator, e.g. ``expm(t L)``.
    tol : float, optional
        Eigenvalue cutoff; defaults to ``1e-10`` times the largest Choi
        eigenvalue.  Eigenvalues below ``-100 * tol`` mean the map is not
        completely positive.
    t : float, optional
        Time tag copied onto the result.

    Returns
    -------
    KrausSet
        At most ``d*d`` operators, each with its largest-magnitude entry made
        real and positive.
    """
    r = choi_reshuffle(s)
    d = int(round(np.sqrt(r.shape[0])))
    defect = max_abs(r - dagger(r))
    if defect > TOL_CHOI_HERMITIAN * max(1.0, max_abs(r)):
        raise NotHermitianChoi(f"reshuffled superoperator is not Hermitian (defect {defect:.3e})")
    w, v = np.linalg.eigh(0.5 * (r + dagger(r)))
    top = float(max(w[-1], 0.0))
    cut = 1e-10 * max(top, np.finfo(float).tiny) if tol is None else float(tol)
    if w[0] < -100.0 * cut:
        raise NotCompletelyPositive(f"Choi eigenvalue {w[0]:.3e} is negative")
    ops = []
    for j in range(len(w) - 1, -1, -1):
        if w[j] > cut:
            ops.append(_fix_phase(np.sqrt(w[j]) * v[:, j].reshape(d, d)))
    if not ops:
        ops.append(np.zeros((d, d), dtype=complex))
    return KrausSet(tuple(ops), t=t)


def apply_kraus(kset, rho):
    """``sum_a K_a rho K_a^dag`` as a validated state."""
    kset = _as_kraus(kset)
    r = as_density(rho).op
    if r.shape[0] != kset.dim:
        raise DimensionMismatch(f"state of dim {r.shape[0]} for Kraus set of dim {kset.dim}")
    out = sum(k @ r @ dagger(k) for k in kset.ops)
    return DensityMatrix.hermitized(out)


def completeness_defect(kset):
    kset = _as_kraus(kset)
    total = completeness_matrix(kset.ops)
    return max_abs(total - np.eye(kset.dim))


def channel_superop(kset):
    """``sum_a K_a (x) conj(K_a)``."""
    kset = _as_kraus(kset)
    return sum(_accel.kron(k, np.conj(k)) for k in kset.ops)


def channels_equal(s1, s2, tol=1e-8):
    """Gauge-invariant comparison: max-abs distance of the superoperators."""
    a = np.asarray(as_superop(s1), dtype=complex)
    b = np.asarray(as_superop(s2), dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"superoperators of shapes {a.shape} and {b.shape}")
    return max_abs(a - b) <= tol
