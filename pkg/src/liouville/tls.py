"""Two-level atom coupled to a thermal radiation bath.

Basis order is (e, g), so superkets are ordered (ee, eg, ge, gg).  Rates:
``G1 = g0 (1 + n)`` for emission, ``G2 = g0 n`` for absorption and
``G = G1 + G2``.  The Lamb shift ``Omega`` is a free input (default 0) and
``Delta = omega0 - Omega``.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import IDENTITY_2, SIGMA_3, SIGMA_MINUS, SIGMA_PLUS, DensityMatrix, as_density
from .generators import Liouvillian, dissipator, unitary_liouvillian
from .kraus import KrausSet


def planck_nbar(omega0, beta):
    """Mean thermal photon number ``1 / (exp(beta omega0) - 1)`` (hbar = 1)."""
    x = float(beta) * float(omega0)
    if not np.isfinite(x) or x <= 0:
        raise ValueError(f"beta * omega0 must be positive, got {x}")
    return float(1.0 / np.expm1(x))


@dataclass(frozen=True)
class TLSParams:
    omega0: float
    gamma0: float
    nbar: Optional[float] = None
    beta: Optional[float] = None
    Omega: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "gamma0"):
            val = float(getattr(self, name))
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be positive and finite, got {val}")
            object.__setattr__(self, name, val)
        omega = float(self.Omega)
        if not np.isfinite(omega):
            raise ValueError("Omega must be finite")
        object.__setattr__(self, "Omega", omega)
        if self.nbar is None:
            if self.beta is None:
                raise ValueError("give nbar or beta")
            object.__setattr__(self, "nbar", planck_nbar(self.omega0, self.beta))
        nbar = float(self.nbar)
        if not np.isfinite(nbar) or nbar < 0:
            raise ValueError(f"nbar must be nonnegative, got {nbar}")
        object.__setattr__(self, "nbar", nbar)
        if self.beta is not None:
            object.__setattr__(self, "beta", float(self.beta))

    @property
    def Delta(self):
        return self.omega0 - self.Omega

    @property
    def gamma1(self):
        return self.gamma0 * (1.0 + self.nbar)

    @property
    def gamma2(self):
        return self.gamma0 * self.nbar

    @property
    def gamma(self):
        return self.gamma1 + self.gamma2


def build_generators(p):
    """Return ``(La, Lb)``: the shifted free evolution and the dissipator."""
    la = unitary_liouvillian(0.5 * p.Delta * SIGMA_3)
    lb = Liouvillian(dissipator([(p.gamma1, SIGMA_MINUS), (p.gamma2, SIGMA_PLUS)]), "dissipative")
    return la, lb


def full_generator(p):
    la, lb = build_generators(p)
    return la + lb


def closed_form_rho(p, rho0, t):
    """Analytic state at time ``t``.

    The excited population relaxes as ``G2/G + exp(-G t) (P_ee(0) - G2/G)``
    and the ``|e><g|`` coherence as ``exp(-G t / 2 - i Delta t) P_eg(0)``.
    """
    r0 = as_density(rho0).op
    if r0.shape != (2, 2):
        raise ValueError("closed form is for a two-level state")
    t = float(t)
    g = p.gamma
    pe_inf = p.gamma2 / g
    pe = pe_inf + np.exp(-g * t) * (r0[0, 0].real - pe_inf)
    coh = np.exp(-0.5 * g * t - 1j * p.Delta * t) * r0[0, 1]
    rho = np.array([[pe, coh], [np.conj(coh), 1.0 - pe]], dtype=complex)
    return DensityMatrix(rho)


def closed_form_kraus(p, t, include_unitary=False):
    """The four analytic Kraus operators of ``exp(t Lb)``.

    With ``include_unitary`` each operator is left-multiplied by
    ``exp(-i Delta t sigma_3 / 2)`` so the set represents ``exp(t (La + Lb))``.
    """
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    g = p.gamma
    w1, w2 = p.gamma1 / g, p.gamma2 / g
    s = np.exp(-0.5 * g * t)
    decay = -np.expm1(-g * t)
    a, b = 0.5 * (1 + s), 0.5 * (1 - s)
    ops = [
        np.sqrt(w1) * (a * IDENTITY_2 - b * SIGMA_3),
        np.sqrt(w2) * (a * IDENTITY_2 + b * SIGMA_3),
        np.sqrt(w1 * decay) * SIGMA_MINUS,
        np.sqrt(w2 * decay) * SIGMA_PLUS,
    ]
    if include_unitary:
        phase = np.exp(-0.5j * p.Delta * t)
        u = np.diag([phase, np.conj(phase)])
        ops = [u @ k for k in ops]
    return KrausSet(tuple(ops), t=t)


def gibbs_populations(omega0, beta):
    """Thermal weights of ``H = (omega0/2) sigma_3`` as ``(ground, excited)``."""
    x = 0.5 * float(beta) * float(omega0)
    z = np.exp(x) + np.exp(-x)
    return float(np.exp(x) / z), float(np.exp(-x) / z)


def equilibrium_populations(p, check_gibbs=False, tol=1e-12):
    """``(ground, excited) = (G1/G, G2/G)``.

    With ``check_gibbs`` (requires ``p.beta``) the pair is compared to the
    Boltzmann weights and a ``ValueError`` raised on disagreement.
    """
    ground, excited = p.gamma1 / p.gamma, p.gamma2 / p.gamma
    if check_gibbs:
        if p.beta is None:
            raise ValueError("Gibbs cross-check needs beta")
        gg, ge = gibbs_populations(p.omega0, p.beta)
        if abs(gg - ground) > tol or abs(ge - excited) > tol:
            raise ValueError(f"rates give ({ground}, {excited}) but Gibbs gives ({gg}, {ge})")
    return ground, excited
