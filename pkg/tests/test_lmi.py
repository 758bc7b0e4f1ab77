import numpy as np
import pytest

from sectorbound.errors import ValidationError
from sectorbound.linalg import (block_swap, hermitian_lambda_max,
                                hermiticity_defect)
from sectorbound.lmi import (assemble_lmi, assemble_lmi_doubled, assemble_qmi,
                             assemble_qmi_doubled, build_conic_program,
                             coords_from_matrix, matrix_from_coords, p_basis)
from sectorbound.model import doubled_matrices, validate_plant
from sectorbound import reference


def random_structured(rng, n, definite=False):
    basis = p_basis(n)
    p = matrix_from_coords(basis, rng.normal(size=basis.dim))
    if definite:
        w = np.linalg.eigvalsh(p)
        p = p + (abs(w.min()) + 0.1) * np.eye(2 * n)
    return p


class TestPBasis:
    def test_n1_matches_enumeration(self):
        basis = p_basis(1)
        assert basis.dim == 3
        expected = [
            np.eye(2),
            np.array([[0.0, 1.0], [1.0, 0.0]]),
            np.array([[0.0, 1j], [-1j, 0.0]]),
        ]
        for b, e in zip(basis.matrices, expected):
            assert np.array_equal(b, e.astype(complex))

    @pytest.mark.parametrize("n,d", [(1, 3), (2, 10), (3, 21)])
    def test_dimension_formula(self, n, d):
        assert p_basis(n).dim == d == n * n + n * (n + 1)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_elements_hermitian_and_structured(self, n):
        s = block_swap(n)
        for b in p_basis(n).matrices:
            assert hermiticity_defect(b) == 0.0
            assert np.array_equal(s @ b.conj() @ s, b)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_linear_independence(self, n):
        basis = p_basis(n)
        stack = np.stack([
            np.concatenate([b.real.ravel(), b.imag.ravel()])
            for b in basis.matrices
        ])
        assert np.linalg.matrix_rank(stack) == basis.dim

    def test_coords_round_trip(self):
        rng = np.random.default_rng(21)
        basis = p_basis(2)
        x = rng.normal(size=basis.dim)
        p = matrix_from_coords(basis, x)
        assert np.abs(coords_from_matrix(basis, p) - x).max() <= 1e-12
        s = block_swap(2)
        assert np.abs(s @ p.conj() @ s - p).max() <= 1e-14

    def test_unstructured_matrix_rejected(self):
        basis = p_basis(2)
        bad = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)  # breaks P1# block
        with pytest.raises(ValidationError, match="structured"):
            coords_from_matrix(basis, bad)


class TestAssembleLmi:
    def test_reference_instance_hermitian_and_frozen_eig(self, josephson_config):
        from sectorbound.analysis import kappa

        kap = kappa(reference.REFERENCE_TAU1, 0.5, 0.5, 0.5, "literal")
        x = assemble_lmi(reference.REFERENCE_P, reference.REFERENCE_TAU1, kap,
                         josephson_config.plant)
        assert x.shape == (5, 5)
        assert hermiticity_defect(x) <= 1e-14
        assert hermitian_lambda_max(x) == pytest.approx(-0.18786060942270316,
                                                        abs=1e-9)

    def test_zero_plant_reduces_to_corner(self):
        p = np.eye(2, dtype=complex)
        x = assemble_lmi_doubled(p, 0.5, 3.0, np.zeros((2, 2)),
                                 np.zeros((2, 2)), np.zeros(2))
        expected = np.zeros((3, 3), dtype=complex)
        expected[2, 2] = -4.0
        assert np.allclose(x, expected, atol=1e-15)

    def test_hermitian_for_random_structured(self):
        rng = np.random.default_rng(22)
        plant = validate_plant(np.eye(2), np.zeros((2, 2)), np.eye(2),
                               np.zeros((2, 2)), [1.0, 0.0], [0.0, 0.5])
        for _ in range(10):
            p = random_structured(rng, 2)
            x = assemble_lmi(p, 0.7, 2.0, plant)
            assert hermiticity_defect(x) <= 1e-14

    def test_rejects_nonpositive_tau(self, josephson_config):
        with pytest.raises(ValidationError):
            assemble_lmi(reference.REFERENCE_P, 0.0, 1.0,
                         josephson_config.plant)

    def test_affine_in_p(self, josephson_config):
        rng = np.random.default_rng(23)
        m, n, e = doubled_matrices(josephson_config.plant)
        p1 = random_structured(rng, 2)
        p2 = random_structured(rng, 2)
        alpha, beta = 0.7, -1.3
        lhs = assemble_lmi_doubled(alpha * p1 + beta * p2, 0.9, 2.5, m, n, e)
        zero_part = assemble_lmi_doubled(np.zeros((4, 4)), 0.9, 2.5, m, n, e)
        rhs = (alpha * assemble_lmi_doubled(p1, 0.9, 2.5, m, n, e)
               + beta * assemble_lmi_doubled(p2, 0.9, 2.5, m, n, e)
               + (1.0 - alpha - beta) * zero_part)
        assert np.abs(lhs - rhs).max() <= 1e-12


class TestAssembleQmi:
    def test_degenerate_e_gives_lyapunov_form(self):
        rng = np.random.default_rng(24)
        m1 = np.eye(2)
        plantless_m = np.block([[m1, np.zeros((2, 2))],
                                [np.zeros((2, 2)), m1]]).astype(complex)
        big_n = np.eye(4, dtype=complex)
        p = random_structured(rng, 2)
        q = assemble_qmi_doubled(p, 0.8, 2.0, plantless_m, big_n, np.zeros(4))
        from sectorbound.linalg import drift_matrix

        f = drift_matrix(plantless_m, big_n)
        assert np.abs(q - (f.conj().T @ p + p @ f)).max() <= 1e-13

    def test_schur_equivalence_random(self):
        rng = np.random.default_rng(25)
        for trial in range(30):
            n = int(rng.integers(1, 4))
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            m1 = 0.5 * (g + g.conj().T)
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            m2 = 0.5 * (g + g.T)
            n1 = rng.normal(size=(1, n)) + 1j * rng.normal(size=(1, n))
            plant = validate_plant(m1, m2, n1, np.zeros((1, n)),
                                   rng.normal(size=n), rng.normal(size=n))
            m, nn, e = doubled_matrices(plant)
            p = random_structured(rng, n, definite=True)
            tau1 = (0.3, 1.0, 3.0)[trial % 3]
            kap = float(rng.uniform(0.5, 5.0))
            lam_l = hermitian_lambda_max(assemble_lmi_doubled(p, tau1, kap, m, nn, e))
            lam_q = hermitian_lambda_max(assemble_qmi_doubled(p, tau1, kap, m, nn, e))
            if abs(lam_l) > 1e-8 and abs(lam_q) > 1e-8:
                assert (lam_l > 0) == (lam_q > 0)

    def test_reference_sign_agreement(self, josephson_config):
        from sectorbound.analysis import kappa

        kap = kappa(reference.REFERENCE_TAU1, 0.5, 0.5, 0.5, "literal")
        lam_l = hermitian_lambda_max(
            assemble_lmi(reference.REFERENCE_P, reference.REFERENCE_TAU1, kap,
                         josephson_config.plant))
        lam_q = hermitian_lambda_max(
            assemble_qmi(reference.REFERENCE_P, reference.REFERENCE_TAU1, kap,
                         josephson_config.plant))
        assert lam_l < 0 and lam_q < 0


class TestConicProgram:
    def test_josephson_shape(self, josephson_config):
        problem = build_conic_program(josephson_config.plant,
                                      josephson_config.sector,
                                      reference.REFERENCE_TAU1, "literal")
        assert problem.num_vars == 11
        assert problem.basis.dim == 10
        assert tuple(b.size for b in problem.blocks) == (10, 8, 4)
        for block in problem.blocks:
            assert len(block.coeffs) == 11
            assert np.abs(block.constant - block.constant.T).max() <= 1e-14

    def test_zero_delta3_keeps_slack_block(self, josephson_config):
        from sectorbound.model import SectorConstants

        sector = SectorConstants(0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0)
        problem = build_conic_program(josephson_config.plant, sector,
                                      reference.REFERENCE_TAU1, "literal")
        assert problem.c[-1] == 0.0
        assert problem.blocks[2].size == 4
        # slack block still well-posed: coefficient of t is the identity
        assert np.array_equal(problem.blocks[2].coeffs[-1], np.eye(4))

    def test_blocks_affine_in_x(self, josephson_config):
        problem = build_conic_program(josephson_config.plant,
                                      josephson_config.sector,
                                      reference.REFERENCE_TAU1, "literal")
        rng = np.random.default_rng(26)
        x = rng.normal(size=problem.num_vars)
        h = 0.37
        for i in (0, 4, 10):
            e_i = np.zeros(problem.num_vars)
            e_i[i] = 1.0
            for block in problem.blocks:
                diff = (block.evaluate(x + h * e_i) - block.evaluate(x)) / h
                assert np.abs(diff - block.coeffs[i]).max() <= 1e-10

    def test_objective_constant_is_zeta(self, josephson_config):
        from sectorbound.analysis import zeta
        from sectorbound.model import SectorConstants

        sector = SectorConstants(0.5, 0.5, 0.5, 0.25, 1.0, 2.0, 1.0)
        problem = build_conic_program(josephson_config.plant, sector, 0.5,
                                      "literal")
        assert problem.offset == zeta(0.5, 0.25, 1.0, 2.0)

    def test_eps_must_be_positive(self, josephson_config):
        with pytest.raises(ValidationError):
            build_conic_program(josephson_config.plant,
                                josephson_config.sector, 1.0, "literal",
                                eps=0.0)
