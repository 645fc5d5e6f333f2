"""Liouville-space dynamics of open quantum systems.

Density matrices are vectorized row-major, generators are ``d*d x d*d``
superoperators, and ``exp(t L)`` is evaluated by orthonormal, biorthonormal or
Jordan-chain expansions with a Pade exponential as an independent reference.
"""
from . import _accel
from .core import (
    DensityMatrix,
    MeasurementSet,
    expectation,
    expm,
    hs_inner,
    kron,
    measure_prob,
    nonselective_update,
    purity,
)
from .errors import *  # noqa: F401,F403
from .generators import (
    LindbladModel,
    Liouvillian,
    dissipator,
    lindblad_liouvillian,
    unitary_liouvillian,
)
from .kraus import (
    KrausSet,
    apply_kraus,
    channel_superop,
    channels_equal,
    choi_reshuffle,
    completeness_defect,
    kraus_from_superop,
)
from .spectral import (
    SpectralSystem,
    Trajectory,
    analyze,
    dyson_propagator,
    heisenberg_superket,
    propagate,
    propagate_expm_oracle,
    stability_report,
    steady_state,
)
from .tls import (
    TLSParams,
    build_generators,
    closed_form_kraus,
    closed_form_rho,
    equilibrium_populations,
    planck_nbar,
)
from .vectorization import SuperKet, liouville_inner, mho, mho_inv, super_acomm, super_comm, triple_superop

backend = _accel.backend
__version__ = "0.1.0"
