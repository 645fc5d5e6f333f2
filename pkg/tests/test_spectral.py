import numpy as np
import pytest
import scipy.linalg

from liouville.core import SIGMA_1, SIGMA_3, SIGMA_MINUS, SIGMA_PLUS, expm
from liouville.errors import (
    ChainConstructionFailed,
    DimensionMismatch,
    NonUniqueSteadyState,
    NonUnitaryGenerator,
    Unstable,
)
from liouville.generators import LindbladModel, Liouvillian, dissipator, lindblad_liouvillian, unitary_liouvillian
from liouville.spectral import (
    analyze,
    dyson_propagator,
    heisenberg_superket,
    interaction_generator,
    propagate,
    propagate_expm_oracle,
    stability_report,
    steady_state,
)
from liouville.vectorization import mho

from conftest import rand_c, rand_herm, rand_rho, rand_unitary, series_expm

G1, G2 = 1.5, 0.5
G = G1 + G2
LB = np.array([[-G1, 0, 0, G2], [0, -G / 2, 0, 0], [0, 0, -G / 2, 0], [G1, 0, 0, -G2]], dtype=complex)


def random_model(rng, d):
    jumps = [(float(rng.uniform(0.1, 1)), rand_c(rng, (d, d)) / d) for _ in range(2)]
    return lindblad_liouvillian(LindbladModel(rand_herm(rng, d), jumps))


class TestAnalyze:
    def test_tls_dissipator(self):
        sys = analyze(LB)
        assert sys.kind == "diagonalizable"
        assert np.allclose(np.sort_complex(sys.eigenvalues), [-2, -1, -1, 0], atol=1e-12)
        assert sys.biorthonormality_defect() <= 1e-12
        assert sys.completeness_defect() <= 1e-12

    def test_tls_projectors_match_closed_form(self):
        # columns of A and rows of A^{-1} for the dissipator, in (ee, eg, ge, gg) order
        a = np.array([[G2 / G1, 0, 0, -1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]], dtype=complex)
        a_inv = np.linalg.inv(a)
        assert np.allclose(a_inv[0], [G1 / G, 0, 0, G1 / G])
        assert np.allclose(a_inv[3], [-G1 / G, 0, 0, G2 / G])
        sys = analyze(LB)
        for lam in (0.0, -2.0):
            k = int(np.argmin(np.abs(sys.eigenvalues - lam)))
            j = {0.0: 0, -2.0: 3}[lam]
            got = np.outer(sys.right[:, k], sys.left[k])
            want = np.outer(a[:, j], a_inv[j])
            assert np.abs(got - want).max() <= 1e-9
        # the degenerate pair: only the summed projector is basis independent
        idx = np.flatnonzero(np.abs(sys.eigenvalues + 1) < 1e-9)
        got = sum(np.outer(sys.right[:, k], sys.left[k]) for k in idx)
        want = sum(np.outer(a[:, j], a_inv[j]) for j in (1, 2))
        assert np.abs(got - want).max() <= 1e-9

    def test_skew_route(self, rng):
        sys = analyze(unitary_liouvillian(rand_herm(rng, 3)))
        assert sys.kind == "skew_hermitian"
        assert np.abs(sys.eigenvalues.real).max() <= 1e-12
        assert np.allclose(sys.left, sys.right.conj().T)

    def test_nilpotent_block(self):
        sys = analyze(np.array([[0, 1], [0, 0]]))
        assert sys.kind == "defective"
        assert len(sys.chains) == 1 and sys.chains[0].length == 2
        assert abs(sys.chains[0].eigenvalue) <= 1e-12
        assert sys.chain_defect() <= 1e-7

    @pytest.mark.parametrize("d", [2, 3])
    def test_random_invariants(self, rng, d):
        sys = analyze(random_model(rng, d))
        assert sys.kind == "diagonalizable"
        assert sys.biorthonormality_defect() <= 1e-8
        assert sys.completeness_defect() <= 1e-8

    def test_mixed_jordan_structure(self, rng):
        # blocks of sizes 3, 1 at lambda = -0.5 and a single block at 0.2i, scrambled by a unitary
        j = np.zeros((6, 6), dtype=complex)
        j[:4, :4] = -0.5 * np.eye(4)
        j[0, 1] = j[1, 2] = 1.0
        j[4:, 4:] = [[0.2j, 1.0], [0, 0.2j]]
        u = rand_unitary(rng, 6)
        gen = u @ j @ u.conj().T
        sys = analyze(gen, tol_cluster=1e-3)
        assert sys.kind == "defective"
        lengths = sorted(c.length for c in sys.chains)
        assert lengths == [1, 2, 3]
        assert sys.chain_defect() <= 1e-7
        for t in (0.3, 2.0, 5.0):
            ref = series_expm(t * gen)
            assert np.abs(sys.evolution(t) - ref).max() <= 1e-8

    def test_defective_size_limit(self):
        gen = np.eye(25, k=1)
        with pytest.raises(ChainConstructionFailed, match="limited"):
            analyze(gen)
        sys = analyze(gen, max_defective_size=25)
        assert sys.chains[0].length == 25

    def test_chain_failure_on_too_tight_cluster(self, rng):
        # a perturbed 3-block splits by ~eps^(1/3); with the default cluster
        # tolerance the split is seen as distinct eigenvalues and eig's vectors
        # are nearly parallel, while a cluster tolerance that merges only two of
        # the three cannot complete the chains.
        j = np.eye(4, k=1)
        j[2, 3] = 0
        gen = j + 1e-10 * rand_c(rng, (4, 4))
        with pytest.raises(ChainConstructionFailed):
            analyze(gen, tol_cluster=1e-4, tol_diag=1e-2)

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            analyze(np.zeros((3, 4)))


class TestPropagate:
    def test_time_zero_exact(self, rng):
        gen = random_model(rng, 3)
        rho0 = rand_rho(rng, 3)
        assert np.abs(np.asarray(propagate(gen, rho0, [0.0]).states[0]) - rho0).max() <= 1e-13

    def test_isolated_precession(self):
        w0 = 1.3
        c = 0.3 - 0.1j
        rho0 = np.array([[0.6, c], [np.conj(c), 0.4]])
        times = np.linspace(0, 6, 13)
        traj = propagate(unitary_liouvillian(0.5 * w0 * SIGMA_3), rho0, times)
        for t, r in zip(times, traj.states):
            r = np.asarray(r)
            assert np.allclose(np.diag(r), [0.6, 0.4], atol=1e-13)
            assert abs(r[0, 1] - c * np.exp(-1j * w0 * t)) <= 1e-12
        assert np.allclose(traj.purities(), traj.purities()[0], atol=1e-10)

    def test_relaxes_to_equilibrium(self):
        traj = propagate(LB, np.diag([1.0, 0.0]), [40.0])
        assert np.allclose(np.asarray(traj.states[0]), np.diag([G2 / G, G1 / G]), atol=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_dual_path_agreement(self, rng, d):
        for _ in range(10):
            gen = random_model(rng, d)
            rho0 = rand_rho(rng, d)
            sys = analyze(gen)
            for t in (0.1, 1.0, 5.0):
                a = np.asarray(propagate(gen, rho0, [t], system=sys).states[0])
                b = np.asarray(propagate_expm_oracle(gen, rho0, t))
                assert np.abs(a - b).max() <= 1e-8

    def test_oracle_unitary_case(self, rng):
        h = rand_herm(rng, 3)
        rho0 = rand_rho(rng, 3)
        u = scipy.linalg.expm(-1j * 0.7 * h)
        got = np.asarray(propagate_expm_oracle(unitary_liouvillian(h), rho0, 0.7))
        assert np.abs(got - u @ rho0 @ u.conj().T).max() <= 1e-11
        assert np.abs(np.asarray(propagate_expm_oracle(unitary_liouvillian(h), rho0, 0.0)) - rho0).max() <= 1e-15

    def test_semigroup(self, rng):
        gen = random_model(rng, 3)
        rho0 = rand_rho(rng, 3)
        sys = analyze(gen)
        mid = propagate(gen, rho0, [0.8], system=sys).states[0]
        two_step = np.asarray(propagate(gen, mid, [1.7], system=sys).states[0])
        direct = np.asarray(propagate(gen, rho0, [2.5], system=sys).states[0])
        assert np.abs(two_step - direct).max() <= 1e-9

    def test_formula_reduction(self, rng):
        gen = random_model(rng, 2)
        sys = analyze(gen)
        v0 = mho(rand_rho(rng, 2)).data
        for t in (0.3, 2.0):
            a = sys.propagate_vector(v0, t, "biorthonormal")
            b = sys.propagate_vector(v0, t, "generalized")
            assert np.abs(a - b).max() <= 1e-9
        skew = analyze(unitary_liouvillian(rand_herm(rng, 3)))
        v0 = mho(rand_rho(rng, 3)).data
        outs = [skew.propagate_vector(v0, 1.3, m) for m in ("orthonormal", "biorthonormal", "generalized")]
        assert max(np.abs(o - outs[0]).max() for o in outs) <= 1e-9
        with pytest.raises(ValueError):
            sys.propagate_vector(v0[:4], 1.0, "orthonormal")

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            propagate(LB, rand_rho(rng, 3), [1.0])

    def test_trajectory_scalars(self):
        traj = propagate(LB, np.diag([1.0, 0.0]), [0.0, 1.0, 2.0])
        assert len(traj) == 3
        assert np.allclose(traj.traces(), 1.0, atol=1e-12)
        assert traj.expectations(SIGMA_3)[0] == pytest.approx(1.0)


class TestSteadyState:
    def test_tls(self):
        ss = steady_state(analyze(LB))
        assert np.abs(ss.op - np.diag([0.25, 0.75])).max() <= 1e-10
        scaled = steady_state(analyze(7.5 * LB))
        assert np.abs(scaled.op - ss.op).max() <= 1e-12

    def test_non_unique(self):
        h = np.diag([0.0, 1.0, 2.5])
        with pytest.raises(NonUniqueSteadyState) as info:
            steady_state(analyze(unitary_liouvillian(h)))
        # every mode of a unitary generator has zero real part; d of them are exactly stationary
        assert info.value.basis.shape == (9, 9)
        assert np.sum(np.abs(info.value.eigenvalues) <= 1e-12) == 3

    def test_unstable(self):
        with pytest.raises(Unstable):
            steady_state(analyze(np.eye(4)))

    def test_accepts_raw_generator(self):
        assert np.allclose(steady_state(LB).op, np.diag([0.25, 0.75]))


class TestStability:
    def test_tls(self):
        rep = stability_report(analyze(LB))
        assert rep.stable and not rep.flagged
        assert len(rep.zero_modes) == 1

    def test_growing(self):
        assert not stability_report(analyze(np.eye(4))).stable

    def test_defective_zero_mode(self):
        rep = stability_report(analyze(np.array([[0, 1], [0, 0]])))
        assert rep.flagged and "chain length 2" in rep.flags[0]

    def test_degenerate_zero_mode(self, rng):
        rep = stability_report(analyze(unitary_liouvillian(np.diag([0.0, 1.0]))))
        assert rep.flagged and "geometric multiplicity 2" in rep.flags[0]


class TestHeisenberg:
    def test_pairing(self, rng):
        h = rand_herm(rng, 3)
        gen = unitary_liouvillian(h)
        a = rand_c(rng, (3, 3))
        rho0 = rand_rho(rng, 3)
        t = 1.4
        ah = heisenberg_superket(gen, a, t)
        rho_t = propagate_expm_oracle(gen, rho0, t)
        assert abs(mho(rho_t).inner(mho(a)) - mho(rho0).inner(ah)) <= 1e-11

    def test_examples(self, rng):
        w0 = 0.9
        gen = unitary_liouvillian(0.5 * w0 * SIGMA_3)
        a = rand_c(rng, (2, 2))
        assert np.allclose(heisenberg_superket(gen, a, 0.0).data, mho(a).data)
        assert np.allclose(heisenberg_superket(gen, np.eye(2), 3.0).data, mho(np.eye(2)).data)
        t = 2.2
        u = np.diag(np.exp(-0.5j * w0 * t * np.array([1, -1])))
        want = u.conj().T @ SIGMA_PLUS @ u
        got = heisenberg_superket(gen, SIGMA_PLUS, t).data
        assert np.allclose(got, mho(want).data, atol=1e-13)
        assert np.allclose(want, np.exp(1j * w0 * t) * SIGMA_PLUS)

    def test_rejects_dissipative(self):
        with pytest.raises(NonUnitaryGenerator):
            heisenberg_superket(Liouvillian(LB, "dissipative"), SIGMA_3, 1.0)
        with pytest.raises(NonUnitaryGenerator):
            heisenberg_superket(LB, SIGMA_3, 1.0)


class TestDyson:
    def setup_method(self):
        self.l0 = unitary_liouvillian(10.0 * SIGMA_3).op + dissipator([(0.2, SIGMA_MINUS)])
        lp = unitary_liouvillian(SIGMA_1).op
        self.lp = 0.2 * lp / np.linalg.norm(lp, 2)

    def test_trivial_cases(self):
        assert np.allclose(dyson_propagator(self.l0, np.zeros((4, 4)), 1.0, 2, 8), expm(self.l0))
        assert np.array_equal(dyson_propagator(self.l0, self.lp, 0.0), np.eye(4))

    def test_order_one_is_trapezoid_of_first_term(self):
        t, n = 1.0, 200
        u = dyson_propagator(self.l0, self.lp, t, 1, n)
        s = np.linspace(0, t, n + 1)
        f = np.array([interaction_generator(self.l0, self.lp, x) for x in s])
        first = np.trapezoid(f, s, axis=0) if hasattr(np, "trapezoid") else np.trapz(f, s, axis=0)
        assert np.allclose(u, expm(t * self.l0) @ (np.eye(4) + first), atol=1e-14)

    def test_quadrature_converges_to_exact_truncation(self):
        # exact order-2 truncation via the block upper-triangular exponential
        t = 1.0
        z = np.zeros((4, 4))
        big = np.block([[self.l0, self.lp, z], [z, self.l0, self.lp], [z, z, self.l0]])
        e = expm(t * big)
        exact = e[:4, :4] + e[:4, 4:8] + e[:4, 8:]
        errs = [np.abs(dyson_propagator(self.l0, self.lp, t, 2, n) - exact).max() for n in (16, 32, 64)]
        assert errs[0] / errs[1] > 3.8 and errs[1] / errs[2] > 3.8

    def test_higher_order_is_closer(self):
        t = 1.0
        exact = expm(t * (self.l0 + self.lp))
        errs = [np.abs(dyson_propagator(self.l0, self.lp, t, k, 512) - exact).max() for k in (1, 2, 3)]
        assert errs[0] > errs[1] > errs[2]

    def test_time_dependent_perturbation(self):
        # with L' commuting with L0 the time-ordered terms are phi^k / k!,
        # phi = integral of L', so the order-3 truncation is known exactly
        l0 = dissipator([(0.5, SIGMA_3)])
        base = unitary_liouvillian(SIGMA_3).op
        lp = lambda s: 0.1 * np.cos(s) * base
        t = 1.2
        phi = 0.1 * np.sin(t) * base
        series = np.eye(4) + phi + phi @ phi / 2 + phi @ phi @ phi / 6
        truncated = expm(t * l0) @ series
        u, info = dyson_propagator(l0, lp, t, 3, 256, return_info=True)
        assert np.abs(u - truncated).max() <= 1e-6
        truncation = np.abs(u - expm(t * l0 + phi)).max()
        assert truncation <= info.residual_estimate
        assert len(info.terms) == 3

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            dyson_propagator(self.l0, self.lp, 1.0, order=4)
        with pytest.raises(ValueError):
            dyson_propagator(self.l0, self.lp, 1.0, steps=0)
        with pytest.raises(DimensionMismatch):
            dyson_propagator(self.l0, np.zeros((9, 9)), 1.0)
