import math

import numpy as np
import pytest

from sectorbound.errors import ValidationError
from sectorbound.fock import (DensityOperator, FockSpace,
                              TruncationLeakWarning, build_q, build_z,
                              commutator_identity_report, cost_operator,
                              coupling_ops, func_of_hermitian, func_of_q,
                              interior_projector, lindblad_step,
                              mode_annihilator, quadratic_hamiltonian,
                              simulate, top_level_mask, xi_quadratic)
from sectorbound.model import (CostSpec, NonlinearitySpec, validate_plant)
from sectorbound import reference

VACUUM_W_ORACLE = 2.0 - 0.5 * (1.0 - math.exp(-1.0))  # Gaussian moments


@pytest.fixture(scope="module")
def josephson_plant():
    return reference.josephson_config().plant


class TestSpace:
    def test_dimensions(self):
        space = FockSpace(2, 8)
        assert space.mode_dim == 9
        assert space.dim == 81
        assert space.interior_cutoff == 6

    def test_cutoff_interior_gap_enforced(self):
        with pytest.raises(ValidationError):
            FockSpace(1, 4, interior_cutoff=3)

    def test_dim_cap(self):
        with pytest.raises(ValidationError):
            FockSpace(2, 63, interior_cutoff=2)  # 64^2 = 4096 passes, 65^2 no
            FockSpace(2, 64, interior_cutoff=2)

    def test_density_operator_vacuum(self):
        space = FockSpace(1, 4)
        rho = DensityOperator.vacuum(space).validate()
        assert rho.matrix[0, 0] == 1.0

    def test_density_operator_rejects_bad(self):
        bad = DensityOperator(np.diag([0.5, 0.6]).astype(complex))
        with pytest.raises(ValidationError):
            bad.validate()


class TestLadderOperators:
    def test_single_mode_matrix(self):
        space = FockSpace(1, 2, interior_cutoff=0)
        a = mode_annihilator(space, 0)
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        expected[1, 2] = math.sqrt(2.0)
        assert np.array_equal(a, expected.astype(complex))

    def test_ccr_on_interior(self):
        space = FockSpace(1, 10, interior_cutoff=8)
        a = mode_annihilator(space, 0)
        proj = interior_projector(space)
        defect = proj @ (a @ a.conj().T - a.conj().T @ a - np.eye(11)) @ proj
        assert np.abs(defect).max() <= 1e-12

    def test_multimode_ccr_on_interior(self):
        space = FockSpace(2, 6, interior_cutoff=4)
        proj = interior_projector(space)
        eye = np.eye(space.dim)
        ops = [mode_annihilator(space, k) for k in range(2)]
        for i in range(2):
            for j in range(2):
                comm = ops[i] @ ops[j].conj().T - ops[j].conj().T @ ops[i]
                expected = eye if i == j else 0.0 * eye
                assert np.abs(proj @ (comm - expected) @ proj).max() <= 1e-12

    def test_modes_commute_exactly(self):
        space = FockSpace(2, 4)
        a1 = mode_annihilator(space, 0)
        a2 = mode_annihilator(space, 1)
        assert np.abs(a1 @ a2 - a2 @ a1).max() == 0.0

    def test_index_out_of_range(self):
        with pytest.raises(ValidationError):
            mode_annihilator(FockSpace(2, 4), 2)


class TestOperatorBuilders:
    def test_josephson_z_is_scaled_mode_two(self, josephson_plant):
        space = FockSpace(2, 5)
        z = build_z(space, josephson_plant.E1, josephson_plant.E2)
        assert np.allclose(z, mode_annihilator(space, 1) / math.sqrt(2.0),
                           atol=1e-15)

    def test_zero_coefficients(self):
        space = FockSpace(1, 4)
        assert np.abs(build_z(space, [0.0], [0.0])).max() == 0.0

    def test_q_hermitian_random(self):
        rng = np.random.default_rng(41)
        space = FockSpace(2, 4)
        for _ in range(5):
            e1 = rng.normal(size=2) + 1j * rng.normal(size=2)
            e2 = rng.normal(size=2) + 1j * rng.normal(size=2)
            q = build_q(space, e1, e2)
            assert np.abs(q - q.conj().T).max() <= 1e-12

    def test_number_operator_normal_ordering(self):
        # M1 = 1 (single mode): H = (a'a + a a')/2 = a'a + 1/2 on interior
        space = FockSpace(1, 8, interior_cutoff=5)
        m = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
        h = quadratic_hamiltonian(space, m)
        a = mode_annihilator(space, 0)
        proj = interior_projector(space)
        expected = a.conj().T @ a + 0.5 * np.eye(space.dim)
        assert np.abs(proj @ (h - expected) @ proj).max() <= 1e-12

    def test_zero_hamiltonian(self):
        space = FockSpace(1, 4)
        assert np.abs(quadratic_hamiltonian(space, np.zeros((2, 2)))).max() == 0.0

    def test_josephson_quadratic_hermitian(self, josephson_plant):
        from sectorbound.model import doubled_matrices

        space = FockSpace(2, 6)
        m, _, _ = doubled_matrices(josephson_plant)
        h = quadratic_hamiltonian(space, m)
        assert np.abs(h - h.conj().T).max() <= 1e-12

    def test_displayed_matrix_equivalent_up_to_constant(self, josephson_plant):
        # the structured plant reproduces the verbatim reference matrix's
        # dynamics exactly: the two Hamiltonians differ by -1/4 * identity
        from sectorbound.model import doubled_matrices

        space = FockSpace(2, 8, interior_cutoff=5)
        m_canon, _, _ = doubled_matrices(josephson_plant)
        h_canon = quadratic_hamiltonian(space, m_canon)
        h_disp = quadratic_hamiltonian(space, reference.DISPLAYED_M)
        proj = interior_projector(space)
        delta = proj @ (h_disp - h_canon) @ proj
        diag = np.diag(delta)[np.diag(proj).real > 0]
        assert np.abs(delta - np.diag(np.diag(delta))).max() <= 1e-13
        assert np.allclose(diag, -0.25, atol=1e-13)

    def test_func_identity_returns_argument(self, josephson_plant):
        space = FockSpace(2, 6)
        q = build_q(space, josephson_plant.E1, josephson_plant.E2)
        assert np.abs(func_of_hermitian(lambda x: x, q) - q).max() <= 1e-10

    def test_cos_of_zero_operator(self):
        space = FockSpace(1, 4)
        out = func_of_hermitian(np.cos, np.zeros((5, 5)))
        assert np.allclose(out, np.eye(5), atol=1e-14)

    def test_pythagorean_identity(self, josephson_plant):
        space = FockSpace(2, 6)
        s = func_of_q(space, np.sin, josephson_plant.E1, josephson_plant.E2)
        c = func_of_q(space, np.cos, josephson_plant.E1, josephson_plant.E2)
        assert np.abs(s @ s + c @ c - np.eye(space.dim)).max() <= 1e-10

    def test_josephson_couplings(self, josephson_plant):
        space = FockSpace(2, 5)
        ls = coupling_ops(space, josephson_plant.N1, josephson_plant.N2)
        assert len(ls) == 2
        assert np.allclose(ls[0], 4.0 * mode_annihilator(space, 0), atol=1e-15)
        assert np.allclose(ls[1], 4.0 * mode_annihilator(space, 1), atol=1e-15)

    def test_zero_couplings(self):
        space = FockSpace(1, 3)
        ls = coupling_ops(space, np.zeros((2, 1)), np.zeros((2, 1)))
        assert len(ls) == 2 and all(np.abs(L).max() == 0.0 for L in ls)

    def test_couplings_match_entrywise_loop(self):
        rng = np.random.default_rng(42)
        space = FockSpace(2, 3)
        n1 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        n2 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        ls = coupling_ops(space, n1, n2)
        lowering = [mode_annihilator(space, i) for i in range(2)]
        for j in range(2):
            brute = np.zeros((space.dim, space.dim), dtype=complex)
            for i in range(2):
                brute = brute + n1[j, i] * lowering[i]
                brute = brute + n2[j, i] * lowering[i].conj().T
            assert np.abs(ls[j] - brute).max() == 0.0


class TestLindbladStep:
    def test_amplitude_damping_decays_to_vacuum(self):
        space = FockSpace(1, 5)
        a = mode_annihilator(space, 0)
        rho = np.zeros((space.dim, space.dim), dtype=complex)
        rho[1, 1] = 1.0
        h = np.zeros_like(rho)
        n_op = a.conj().T @ a
        last = 1.0
        for step in range(200):
            rho = lindblad_step(h, [a], rho, 0.01, time=step * 0.01)
            assert abs(np.trace(rho).real - 1.0) <= 1e-10
            occ = np.trace(rho @ n_op).real
            assert occ <= last + 1e-12
            last = occ
        assert last <= 0.2  # e^{-2} of the initial excitation

    def test_unitary_evolution_preserves_purity(self):
        rng = np.random.default_rng(43)
        space = FockSpace(1, 6)
        g = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        h = 0.5 * (g + g.conj().T)
        psi = rng.normal(size=7) + 1j * rng.normal(size=7)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        for step in range(100):
            rho = lindblad_step(h, [], rho, 1e-3, time=step * 1e-3)
        purity = np.trace(rho @ rho).real
        assert abs(purity - 1.0) <= 1e-8

    def test_vacuum_cost_expectation_matches_gaussian_oracle(
            self, josephson_plant):
        space = FockSpace(2, 8)
        cost = CostSpec.from_kind("josephson_cost")
        w_op = cost_operator(space, josephson_plant, cost)
        rho = DensityOperator.vacuum(space).matrix
        value = np.trace(rho @ w_op).real
        assert value == pytest.approx(VACUUM_W_ORACLE, abs=1e-6)

    def test_ordering_toggle_shifts_by_commutator(self, josephson_plant):
        space = FockSpace(2, 8)
        cost = CostSpec.from_kind("josephson_cost")
        w_written = cost_operator(space, josephson_plant, cost, "as_written")
        w_sym = cost_operator(space, josephson_plant, cost, "symmetrized")
        proj = interior_projector(space)
        delta = proj @ (w_written - w_sym) @ proj
        # [z, z*] = 1/2 for z = a_2 / sqrt(2); shift = c_w * (1/2) * (1/2)
        diag = np.diag(delta)[np.diag(proj).real > 0]
        assert np.allclose(diag, 1.0, atol=1e-12)


class TestSimulate:
    def test_static_cost_for_driftless_plant(self):
        plant = validate_plant(np.zeros((2, 2)), np.zeros((2, 2)),
                               np.zeros((1, 2)), np.zeros((1, 2)),
                               [0.0, 2.0 ** -0.5], [0.0, 0.0])
        space = FockSpace(2, 4)
        cost = CostSpec.from_parts(4.0, "zero")
        nl = NonlinearitySpec.from_kind("zero")
        result = simulate(space, plant, nl, cost, t_final=0.5, dt=1e-3)
        # <z z*> = 1/2 in vacuum for z = a_2/sqrt(2), so W = 4 * 1/2 = 2
        assert np.abs(result.exp_w - 2.0).max() <= 1e-9
        assert result.final_average == pytest.approx(2.0, abs=1e-9)

    def test_josephson_short_run_diagnostics(self, josephson_plant):
        space = FockSpace(2, 6)
        cost = CostSpec.from_kind("josephson_cost")
        nl = NonlinearitySpec.from_kind("neg_cos_q")
        result = simulate(space, josephson_plant, nl, cost, t_final=0.5,
                          dt=1e-3, probe_interval=100)
        assert result.exp_w[0] == pytest.approx(VACUUM_W_ORACLE, abs=1e-4)
        assert result.max_trace_drift <= 1e-10
        assert result.probe_min_eigs.min() >= -1e-8
        assert not result.truncation_leak
        assert len(result.times) == 501

    def test_dt_halving_changes_average_below_one_percent(
            self, josephson_plant):
        space = FockSpace(2, 6)
        cost = CostSpec.from_kind("josephson_cost")
        nl = NonlinearitySpec.from_kind("neg_cos_q")
        coarse = simulate(space, josephson_plant, nl, cost, t_final=1.0,
                          dt=2e-3)
        fine = simulate(space, josephson_plant, nl, cost, t_final=1.0,
                        dt=1e-3)
        rel = abs(coarse.final_average - fine.final_average) / abs(
            fine.final_average)
        assert rel < 0.01

    def test_tiny_cutoff_leaks(self, josephson_plant):
        space = FockSpace(2, 2, interior_cutoff=0)
        cost = CostSpec.from_kind("josephson_cost")
        nl = NonlinearitySpec.from_kind("neg_cos_q")
        with pytest.warns(TruncationLeakWarning):
            result = simulate(space, josephson_plant, nl, cost, t_final=1.0,
                              dt=1e-3)
        assert result.truncation_leak
        assert result.top_population.max() > 1e-6

    def test_top_level_mask(self):
        space = FockSpace(2, 2, interior_cutoff=0)
        mask = top_level_mask(space)
        occ = space.occupations()
        assert np.array_equal(mask, (occ == 2).any(axis=1))


class TestCommutatorIdentities:
    def test_single_mode_identity_p(self):
        plant = validate_plant([[1.0]], [[0.0]], [[1.0]], [[0.0]],
                               [1.0], [0.0])
        space = FockSpace(1, 10, interior_cutoff=6)
        report = commutator_identity_report(space, np.eye(2, dtype=complex),
                                            plant)
        assert report["double_commutator"] <= 1e-10
        assert max(report.values()) <= 1e-10

    def test_josephson_reference_p(self, josephson_plant):
        space = FockSpace(2, 8, interior_cutoff=4)
        report = commutator_identity_report(space, reference.REFERENCE_P,
                                            josephson_plant)
        assert max(report.values()) <= 1e-8

    def test_zero_p_all_residuals_vanish(self, josephson_plant):
        space = FockSpace(2, 6)
        report = commutator_identity_report(
            space, np.zeros((4, 4), dtype=complex), josephson_plant)
        assert all(v == 0.0 for v in report.values())

    def test_quadratic_form_dimension_check(self):
        space = FockSpace(1, 4)
        with pytest.raises(ValidationError):
            xi_quadratic(space, np.eye(3))
