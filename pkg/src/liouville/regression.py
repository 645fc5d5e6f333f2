"""Self-contained regression suite for the two-level model and core identities.

Each check returns a :class:`CheckResult`.  ``run_all`` is what the
``demo-tls`` command prints.  Reference values come from independent routes:
literal matrices, finite nilpotent series, the Pade exponential and direct
operator arithmetic.
"""
import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    SIGMA_1,
    SIGMA_3,
    SIGMA_MINUS,
    expm,
    hermiticity_defect,
    hs_inner,
    purity,
)
from .generators import LindbladModel, Liouvillian, dissipator, lindblad_liouvillian, unitary_liouvillian
from .kraus import channel_superop, completeness_defect, kraus_from_superop
from .spectral import (
    analyze,
    dyson_propagator,
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
    full_generator,
    gibbs_populations,
)
from .vectorization import liouville_inner, mho, mho_inv


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: float
    tolerance: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: measured {self.measured:.3e} (tol {self.tolerance:.1e})"


def multiset_distance(a, b):
    """Largest pairing error under the optimal one-to-one matching."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return math.inf
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def random_hermitian(rng, d, scale=1.0):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * scale * (x + x.conj().T)


def random_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = x @ x.conj().T
    return r / np.trace(r)


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _res(n, name, measured, tol, extra_ok=True):
    return CheckResult(n, name, bool(measured <= tol and extra_ok), float(measured), tol)


DEMO = TLSParams(omega0=1.0, gamma0=1.0, nbar=0.5, Omega=1.0)          # Delta = 0
SHIFTED = TLSParams(omega0=0.7, gamma0=1.0, nbar=0.5)                  # Delta = 0.7


def check_eigenvalues(rng=None):
    _, lb = build_generators(DEMO)
    e1 = multiset_distance(analyze(lb).eigenvalues, [0, -1, -1, -2])
    e2 = multiset_distance(analyze(full_generator(SHIFTED)).eigenvalues,
                           [0, -1 - 0.7j, -1 + 0.7j, -2])
    return _res(1, "TLS eigenvalues", max(e1, e2), 1e-10)


def _tls_states():
    excited = np.array([[1, 0], [0, 0]], dtype=complex)
    coherent = np.array([[0.5, 0.3 + 0.2j], [0.3 - 0.2j, 0.5]])
    return excited, coherent


def check_closed_form(rng=None):
    worst = 0.0
    for p in (DEMO, SHIFTED):
        gen = full_generator(p)
        system = analyze(gen)
        for rho0 in _tls_states():
            for t in (0.0, 0.1, 1.0, 10.0):
                a = np.asarray(closed_form_rho(p, rho0, t))
                b = np.asarray(propagate(gen, rho0, [t], system=system).states[0])
                c = np.asarray(propagate_expm_oracle(gen, rho0, t))
                worst = max(worst, np.abs(a - b).max(), np.abs(a - c).max(), np.abs(b - c).max())
    return _res(2, "closed form vs spectral vs expm", worst, 1e-9)


def check_steady_state(rng=None):
    _, lb = build_generators(DEMO)
    g1, g2, g = DEMO.gamma1, DEMO.gamma2, DEMO.gamma
    target = np.diag([g2 / g, g1 / g])
    ss = np.asarray(steady_state(analyze(lb)))
    e1 = np.abs(ss - target).max()
    late = np.asarray(propagate(lb, np.diag([1.0, 0.0]), [50.0 / g]).states[0])
    e2 = np.abs(late - ss).max()
    beta = math.log(3.0)          # omega0 = 1 gives nbar = 1/2
    ground, excited = gibbs_populations(1.0, beta)
    e3 = max(abs(ground - ss[1, 1].real), abs(excited - ss[0, 0].real))
    ok = e1 <= 1e-10 and e2 <= 1e-8 and e3 <= 1e-12
    return CheckResult(3, "steady state / long time / Gibbs", ok, max(e1, e2, e3), 1e-8)


def check_kraus_completeness(rng=None):
    worst = max(completeness_defect(closed_form_kraus(DEMO, t)) for t in (0, 0.1, 1, 5, 50))
    return _res(4, "closed-form Kraus completeness", worst, 1e-12)


def check_kraus_channels(rng=None):
    _, lb = build_generators(DEMO)
    gen = full_generator(SHIFTED)
    worst = 0.0
    for t in (0.1, 1.0, 5.0):
        extracted = kraus_from_superop(expm(t * lb.op))
        worst = max(worst, np.abs(channel_superop(extracted)
                                  - channel_superop(closed_form_kraus(DEMO, t))).max())
        dressed = kraus_from_superop(expm(t * gen.op))
        worst = max(worst, np.abs(channel_superop(dressed)
                                  - channel_superop(closed_form_kraus(SHIFTED, t, True))).max())
    return _res(5, "Choi-extracted vs closed-form channels", worst, 1e-8)


def check_triple_product(rng):
    worst = 0.0
    for d in (2, 3, 4):
        for _ in range(1000):
            a, b, c = (random_complex(rng, (d, d)) for _ in range(3))
            lhs = mho(a @ b @ c).data
            rhs = np.kron(a, c.T) @ mho(b).data
            scale = max(1.0, np.linalg.norm(a, 2) * np.linalg.norm(b, 2) * np.linalg.norm(c, 2))
            worst = max(worst, np.abs(lhs - rhs).max() / scale)
    return _res(6, "triple-product identity", worst, 1e-12)


def random_lindblad(rng, d):
    h = random_hermitian(rng, d)
    jumps = [(float(rng.uniform(0.05, 1.0)), random_complex(rng, (d, d)) / d)
             for _ in range(int(rng.integers(1, 4)))]
    return LindbladModel(h, jumps)


def check_physicality(rng):
    tr = herm = 0.0
    lo = math.inf
    for k in range(200):
        d = 2 + k % 2
        gen = lindblad_liouvillian(random_lindblad(rng, d))
        system = analyze(gen)
        v0 = random_density(rng, d).reshape(-1)
        for t in (0.1, 1.0, 5.0):
            r = mho_inv(system.propagate_vector(v0, t), d)
            tr = max(tr, abs(np.trace(r) - 1))
            herm = max(herm, hermiticity_defect(r))
            lo = min(lo, float(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0]))
    ok = tr <= 1e-10 and herm <= 1e-10 and lo >= -1e-8
    return CheckResult(7, "physicality of random trajectories", ok, max(tr, herm, max(0.0, -lo)), 1e-10)


def check_isolated(rng):
    pop = mag = phase = 0.0
    times = np.linspace(0.0, 10.0, 21)
    for d in (2, 3, 4):
        for _ in range(5):
            h = random_hermitian(rng, d)
            eps, v = np.linalg.eigh(h)
            rho0 = random_density(rng, d)
            traj = propagate(unitary_liouvillian(h), rho0, times)
            r0 = v.conj().T @ rho0 @ v
            for t, r in zip(times, traj.states):
                rt = v.conj().T @ np.asarray(r) @ v
                pop = max(pop, np.abs(np.diag(rt) - np.diag(r0)).max())
                mag = max(mag, np.abs(np.abs(rt) - np.abs(r0)).max())
                for i in range(d):
                    for j in range(d):
                        if i != j and abs(r0[i, j]) > 1e-3:
                            want = np.exp(-1j * (eps[i] - eps[j]) * t)
                            phase = max(phase, abs(rt[i, j] / r0[i, j] / abs(rt[i, j] / r0[i, j]) - want))
    ok = pop <= 1e-12 and mag <= 1e-11 and phase <= 1e-10
    return CheckResult(8, "isolated-system conservation", ok, max(pop, mag, phase), 1e-10)


def jordan_generator(lam, block, n=4):
    nil = np.zeros((n, n), dtype=complex)
    for k in range(block - 1):
        nil[k, k + 1] = 1.0
    return lam * np.eye(n) + nil, nil


def nilpotent_exp(lam, nil, t):
    """``exp(t (lam I + N))`` as the finite series ``e^{lam t} sum (t N)^k / k!``."""
    n = nil.shape[0]
    out = np.zeros((n, n), dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(n):
        out += term
        term = term @ nil * t / (k + 1)
    return np.exp(lam * t) * out


def check_jordan(rng=None):
    worst = 0.0
    flags_ok = True
    for lam in (0.0, -0.5):
        for block in (2, 3):
            gen, nil = jordan_generator(lam, block)
            system = analyze(gen)
            if system.kind != "defective":
                flags_ok = False
            for t in (0.5, 1.0, 2.5, 5.0):
                worst = max(worst, np.abs(system.evolution(t) - nilpotent_exp(lam, nil, t)).max())
            flagged = stability_report(system).flagged
            flags_ok &= flagged if lam == 0.0 else not flagged
    return _res(9, "Jordan-chain propagation and flags", worst, 1e-8, flags_ok)


def dyson_setup(delta=20.0, gamma=0.2, strength=0.2, t=1.0):
    l0 = unitary_liouvillian(0.5 * delta * SIGMA_3).op + dissipator([(gamma, SIGMA_MINUS)])
    lp = unitary_liouvillian(SIGMA_1).op
    lp = lp * strength / (np.linalg.norm(lp, 2) * t)
    return l0, lp, t


def dyson_errors(steps=(16, 32, 64), order=2, **kw):
    l0, lp, t = dyson_setup(**kw)
    exact = expm(t * (l0 + lp))
    return [float(np.abs(dyson_propagator(l0, lp, t, order, n) - exact).max()) for n in steps]


def check_dyson(rng=None):
    e16, e32, e64 = dyson_errors()
    ok = e16 / e32 >= 3.5 and e32 / e64 >= 3.5 and e64 <= 1e-4
    return CheckResult(10, "Dyson order-2 convergence", ok, e64, 1e-4)


def rho_pure_family(theta):
    return 0.5 * np.array([[1, -np.exp(1j * theta)], [-np.exp(-1j * theta), 1]])


def rho_mixed_family(theta):
    c = math.sqrt(2) / 3 * math.sin(theta)
    return np.array([[0.5, -1j * c], [1j * c, 0.5]])


def check_purity(rng=None):
    err = max(abs(purity(rho_pure_family(th)) - 1.0) for th in (0.0, math.pi / 4, math.pi / 3))
    err = max(err, abs(purity(rho_mixed_family(math.pi / 3)) - 5.0 / 6.0))
    return _res(11, "purity regression", err, 1e-12)


def check_isomorphism(rng):
    worst = 0.0
    for k in range(1000):
        d = 2 + k % 3
        a, b = random_complex(rng, (d, d)), random_complex(rng, (d, d))
        rho = random_density(rng, d)
        scale = np.linalg.norm(a) * np.linalg.norm(b)
        worst = max(worst, abs(liouville_inner(a, b) - np.trace(b @ a.conj().T)) / scale)
        worst = max(worst, abs(liouville_inner(np.eye(d), b) - np.trace(b)) / (math.sqrt(d) * np.linalg.norm(b)))
        worst = max(worst, abs(liouville_inner(rho, b) - np.trace(b @ rho))
                    / (np.linalg.norm(rho) * np.linalg.norm(b)))
        worst = max(worst, abs(hs_inner(a, b) - liouville_inner(a, b)) / scale)
    return _res(12, "isomorphism identities", worst, 1e-12)


CHECKS: List[Callable] = [
    check_eigenvalues,
    check_closed_form,
    check_steady_state,
    check_kraus_completeness,
    check_kraus_channels,
    check_triple_product,
    check_physicality,
    check_isolated,
    check_jordan,
    check_dyson,
    check_purity,
    check_isomorphism,
]


def run_all(seed=0):
    rng = np.random.default_rng(seed)
    return [check(rng) for check in CHECKS]
