import math

import numpy as np
import pytest
from numpy.polynomial.polynomial import Polynomial

import blockgd.blockcalc as bc
from blockgd.blockcalc import AuditLog, BlockEncoding, ResourceCounter
from blockgd.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidScale,
    MixedAlpha,
    NormBoundViolated,
    NormTooLarge,
    NotDiagonal,
    NotHermitian,
    NotNormalized,
    PolyBoundViolated,
)
from _dilation import corner_of


def random_contraction(rng, dim, max_norm=0.9):
    mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return mat / np.linalg.norm(mat, 2) * max_norm * rng.uniform(0.2, 1.0)


class TestBlockEncodingType:
    def test_norm_invariant_enforced(self):
        with pytest.raises(NormTooLarge):
            BlockEncoding(np.diag([1.2, 0.0]))

    def test_padding_to_power_of_two(self):
        enc = BlockEncoding(np.diag([0.5, 0.5, 0.5]))
        assert enc.dim == 4
        assert enc.corner[3, 3] == 0.0

    def test_immutable_corner(self):
        enc = BlockEncoding(np.diag([0.5, 0.5]))
        with pytest.raises(ValueError):
            enc.corner[0, 0] = 1.0

    def test_alpha_below_one_rejected(self):
        with pytest.raises(ValueError):
            BlockEncoding(np.diag([0.5, 0.5]), alpha=0.5)


class TestDiagEncode:
    def test_basis_state(self):
        enc = bc.diag_encode([1.0, 0.0, 0.0, 0.0])
        assert np.allclose(enc.corner, np.diag([1, 0, 0, 0]))
        assert enc.ancillas == 5  # log2(4) + 3
        assert enc.eps == 0.0
        assert enc.resources.depth_units == 2

    def test_uniform_state(self):
        enc = bc.diag_encode([0.5] * 4)
        assert np.allclose(np.diag(enc.corner), 0.5)

    def test_norm_too_large(self):
        with pytest.raises(NormTooLarge):
            bc.diag_encode([0.8, 0.8, 0.4, 0.4])

    def test_exactness_random(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            dim = int(rng.choice([2, 4, 8]))
            psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            psi /= np.linalg.norm(psi) * rng.uniform(1.0, 2.0)
            enc = bc.diag_encode(psi)
            assert np.max(np.abs(enc.corner - np.diag(psi))) <= 1e-12


class TestEntryProject:
    def test_keep_first_entry(self):
        x = bc.diag_encode([0.1, 0.2, 0.3, 0.4])
        out = bc.entry_project(x, 0, 0)
        assert np.allclose(out.corner, np.diag([0.1, 0, 0, 0]))

    def test_move_entry(self):
        x = bc.diag_encode([0.1, 0.2, 0.3, 0.4])
        out = bc.entry_project(x, 1, 3)
        assert np.allclose(out.corner, np.diag([0, 0, 0, 0.2]))
        assert out.resources.queries == x.resources.queries + 2
        assert out.ancillas == x.ancillas + 2 + 3

    def test_zero_entry(self):
        x = bc.diag_encode([0.0, 0.2])
        out = bc.entry_project(x, 0, 0)
        assert np.allclose(out.corner, 0.0)

    def test_requires_diagonal(self):
        enc = BlockEncoding(np.full((2, 2), 0.3))
        with pytest.raises(NotDiagonal):
            bc.entry_project(enc, 0, 0)

    def test_index_checked(self):
        x = bc.diag_encode([0.1, 0.2])
        with pytest.raises(IndexOutOfRange):
            bc.entry_project(x, 2, 0)


class TestProduct:
    def test_diagonal_product(self):
        a = bc.diag_encode([0.5, 0.4])
        b = bc.diag_encode([0.2, 0.1])
        out = bc.product(a, b)
        assert np.allclose(np.diag(out.corner), [0.1, 0.04])

    def test_identity_left_factor(self):
        eye = bc.identity_encoding(2)
        b = bc.diag_encode([0.3, -0.2])
        out = bc.product(eye, b)
        assert np.allclose(out.corner, b.corner)

    def test_error_propagation_rule(self):
        a = BlockEncoding(np.diag([0.5, 0.5]), alpha=1.0, eps=1e-3)
        b = BlockEncoding(np.diag([0.4, 0.4]), alpha=2.0, eps=0.0)
        out = bc.product(a, b)
        assert out.eps == pytest.approx(2e-3)
        assert out.alpha == 2.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            bc.product(bc.diag_encode([0.5, 0.5]), bc.diag_encode([0.5] * 4))


class TestLcu:
    def test_signed_difference(self):
        x = bc.diag_encode([0.4, 0.2])
        g = bc.diag_encode([0.1, 0.3])
        out = bc.lcu([x, g], [1, -1])
        assert np.allclose(np.diag(out.corner), [0.15, -0.05])

    def test_single_input_is_identity_on_corner(self):
        x = bc.diag_encode([0.4, 0.2])
        out = bc.lcu([x], [1])
        assert np.allclose(out.corner, x.corner)
        assert out.ancillas == x.ancillas

    def test_single_input_sign_flip(self):
        x = bc.diag_encode([0.4, 0.2])
        out = bc.lcu([x], [-1])
        assert np.allclose(np.diag(out.corner), [-0.4, -0.2])

    def test_three_equal_inputs(self):
        e = bc.diag_encode([0.3, 0.1])
        out = bc.lcu([e, e, e], [1, 1, 1])
        assert np.allclose(out.corner, e.corner)

    def test_eps_averaged_and_queries_counted(self):
        a = BlockEncoding(np.diag([0.5, 0.5]), eps=3e-4)
        b = BlockEncoding(np.diag([0.2, 0.2]), eps=1e-4)
        out = bc.lcu([a, b], [1, 1])
        assert out.eps == pytest.approx(2e-4)
        assert out.resources.queries == 2
        assert out.ancillas == 1  # ceil(log2 2)

    def test_mixed_alpha_rejected(self):
        a = BlockEncoding(np.diag([0.5, 0.5]), alpha=1.0)
        b = BlockEncoding(np.diag([0.5, 0.5]), alpha=2.0)
        with pytest.raises(MixedAlpha):
            bc.lcu([a, b], [1, 1])


class TestScaleDown:
    def test_elementwise_division(self):
        enc = bc.diag_encode([0.4, -0.2])
        out = bc.scale_down(enc, 4.0)
        assert np.allclose(np.diag(out.corner), [0.1, -0.05])
        assert out.ancillas == enc.ancillas + 1
        assert out.resources.depth_units == enc.resources.depth_units + 1

    def test_rotation_angle_recorded(self):
        audit = AuditLog()
        bc.scale_down(bc.diag_encode([0.4, 0.2]), 2.0, audit=audit)
        record = audit.records[-1]
        assert record["op"] == "scale_down"
        assert record["params"]["theta"] == pytest.approx(2 * math.pi / 3)

    def test_p_at_most_one_rejected(self):
        enc = bc.diag_encode([0.4, 0.2])
        with pytest.raises(InvalidScale):
            bc.scale_down(enc, 1.0)


class TestTensor:
    def test_identity_times_block(self):
        eye = bc.identity_encoding(2)
        b = bc.diag_encode([0.3, 0.1])
        out = bc.tensor([eye, b])
        assert np.allclose(out.corner, np.kron(np.eye(2), b.corner))

    def test_diag_outer_product(self):
        a = bc.diag_encode([0.5, 0.2])
        b = bc.diag_encode([0.4, 0.1])
        out = bc.tensor([a, b])
        assert np.allclose(np.diag(out.corner), [0.2, 0.05, 0.08, 0.02])

    def test_single_input(self):
        a = bc.diag_encode([0.5, 0.2])
        out = bc.tensor([a])
        assert np.allclose(out.corner, a.corner)

    def test_parallel_depth_is_max(self):
        a = bc.diag_encode([0.5, 0.2])       # depth 1
        b = bc.diag_encode([0.3] * 8)        # depth 3
        out = bc.tensor([a, b])
        assert out.resources.depth_units == 3


class TestAmplify:
    def test_exact_rescale(self):
        enc = bc.diag_encode([0.2, -0.1])
        out = bc.amplify(enc, 2.0, 0.5, 1e-6)
        assert np.allclose(np.diag(out.corner), [0.4, -0.2])
        assert out.ancillas == enc.ancillas + 1

    def test_repetition_count_formula(self):
        enc = bc.diag_encode([0.05, 0.02])
        out = bc.amplify(enc, 3.0, 0.5, 1e-6)
        added = out.resources.depth_units - enc.resources.depth_units
        assert added == 196  # ceil(12 * ln(1.2e7))

    def test_norm_bound_strict(self):
        enc = bc.diag_encode([0.3, 0.0])
        with pytest.raises(NormBoundViolated):
            bc.amplify(enc, 2.0, 0.5, 1e-6)  # 0.6 > 1/2

    def test_gamma_must_exceed_one(self):
        enc = bc.diag_encode([0.3, 0.0])
        with pytest.raises(InvalidScale):
            bc.amplify(enc, 1.0, 0.5, 1e-6)

    def test_then_scale_down_roundtrip(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            diag = rng.uniform(-0.2, 0.2, size=4)
            enc = bc.diag_encode(diag)
            gamma = rng.uniform(1.2, 2.0)
            out = bc.scale_down(bc.amplify(enc, gamma, 0.5, 1e-8), gamma)
            assert np.max(np.abs(out.corner - enc.corner)) <= 1e-8 + 1e-10


class TestQsvtTransform:
    def test_half_identity_polynomial(self):
        # The steepest admissible linear transform: P(x) = x/2.
        enc = bc.diag_encode([0.3, -0.2])
        out = bc.qsvt_transform(enc, Polynomial([0.0, 0.5]))
        assert np.allclose(out.corner, enc.corner / 2)
        assert out.alpha == 1.0
        assert out.ancillas == enc.ancillas + 2

    def test_full_identity_violates_cap(self):
        # |x| reaches 1 on [-1, 1], above the 1/2 cap the transform requires.
        enc = bc.diag_encode([0.3, -0.2])
        with pytest.raises(PolyBoundViolated):
            bc.qsvt_transform(enc, Polynomial([0.0, 1.0]))

    def test_half_square(self):
        enc = bc.diag_encode([0.4, 0.2])
        out = bc.qsvt_transform(enc, Polynomial([0.0, 0.0, 0.5]))
        assert np.allclose(np.diag(out.corner), [0.08, 0.02])

    def test_eps_formula(self):
        enc = BlockEncoding(np.diag([0.3, 0.3]), alpha=1.0, eps=1e-4)
        out = bc.qsvt_transform(enc, Polynomial([0.0, 0.5]))
        assert out.eps == pytest.approx(4 * 1 * math.sqrt(1e-4))

    def test_poly_bound_violated(self):
        enc = bc.diag_encode([0.3, 0.0])
        with pytest.raises(PolyBoundViolated):
            bc.qsvt_transform(enc, Polynomial([0.7]))

    def test_requires_hermitian(self):
        mat = np.array([[0.0, 0.5], [0.0, 0.0]])
        with pytest.raises(NotHermitian):
            bc.qsvt_transform(BlockEncoding(mat), Polynomial([0.0, 0.5]))

    def test_dense_hermitian_eigen_transform(self):
        rng = np.random.default_rng(8)
        mat = rng.normal(size=(4, 4))
        mat = (mat + mat.T) / 2
        mat /= np.linalg.norm(mat, 2) * 1.5
        enc = BlockEncoding(mat)
        poly = Polynomial([0.0, 0.0, 0.4])
        out = bc.qsvt_transform(enc, poly)
        w, v = np.linalg.eigh(mat)
        expected = (v * poly(w)) @ v.T
        assert np.max(np.abs(out.corner - expected)) <= 1e-10

    def test_exact_polynomials_elementwise(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            diag = rng.uniform(-0.9, 0.9, size=8)
            enc = BlockEncoding(np.diag(diag))
            coeffs = rng.uniform(-1, 1, size=int(rng.integers(1, 6)))
            poly = Polynomial(coeffs)
            sup = np.max(np.abs(poly(np.linspace(-1, 1, 2001))))
            poly = Polynomial(coeffs * (0.45 / max(sup, 1e-9)))
            out = bc.qsvt_transform(enc, poly)
            assert np.max(np.abs(np.diag(out.corner) - poly(diag))) <= 1e-10


class TestRealizeDilation:
    def test_zero_block(self):
        u = bc.realize_dilation(BlockEncoding(np.zeros((2, 2))))
        expected = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
        assert np.allclose(u, expected)

    def test_identity_block(self):
        u = bc.realize_dilation(bc.identity_encoding(2))
        expected = np.block(
            [[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), -np.eye(2)]]
        )
        assert np.allclose(u, expected)

    def test_unitarity_random(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            dim = int(rng.choice([2, 4, 8, 16]))
            enc = BlockEncoding(random_contraction(rng, dim, max_norm=1.0))
            u = bc.realize_dilation(enc)
            defect = np.linalg.norm(u.conj().T @ u - np.eye(2 * dim), 2)
            assert defect <= 1e-10
            assert np.array_equal(u[:dim, :dim], enc.corner)


class TestApplyPostselect:
    def test_probability_in_unit_interval_and_state_normalized(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            enc = BlockEncoding(random_contraction(rng, 4))
            phi = rng.normal(size=4) + 1j * rng.normal(size=4)
            phi /= np.linalg.norm(phi)
            out = bc.apply_postselect(enc, phi)
            assert 0.0 <= out.prob <= 1.0
            if out.prob > 0:
                assert np.linalg.norm(out.state) == pytest.approx(1.0, abs=1e-12)

    def test_uniform_probability(self):
        diag = np.array([0.3, -0.1, 0.2, 0.4])
        enc = bc.diag_encode(diag)
        phi = np.full(4, 0.5)
        out = bc.apply_postselect(enc, phi)
        assert out.prob == pytest.approx(np.sum(diag**2) / 4)
        assert np.linalg.norm(out.state) == pytest.approx(1.0)

    def test_identity_keeps_state(self):
        enc = bc.identity_encoding(4)
        phi = np.zeros(4)
        phi[2] = 1.0
        out = bc.apply_postselect(enc, phi)
        assert out.prob == pytest.approx(1.0)
        assert np.allclose(out.state, phi)

    def test_zero_corner_undefined_state(self):
        enc = BlockEncoding(np.zeros((2, 2)))
        out = bc.apply_postselect(enc, np.array([1.0, 0.0]))
        assert out.prob == 0.0
        assert out.state is None

    def test_requires_unit_state(self):
        enc = bc.identity_encoding(2)
        with pytest.raises(NotNormalized):
            bc.apply_postselect(enc, np.array([0.5, 0.5]))


class TestClosureAndCounters:
    def test_random_pipelines_preserve_invariants(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            a = BlockEncoding(random_contraction(rng, 4))
            b = BlockEncoding(random_contraction(rng, 4))
            outs = [
                bc.product(a, b),
                bc.lcu([a, b], [1, -1]),
                bc.scale_down(a, float(rng.uniform(1.1, 3.0))),
                bc.tensor([a, b]),
            ]
            for out in outs:
                assert out.norm <= 1.0 + bc.NORM_TOL
                assert out.dim & (out.dim - 1) == 0
                assert math.isfinite(out.eps) and out.eps >= 0
                assert out.alpha >= 1.0
                for field in ("depth_units", "queries", "ancilla_high_water"):
                    assert getattr(out.resources, field) >= max(
                        getattr(a.resources, field), 0
                    )

    def test_counters_monotone_under_composition(self):
        x = bc.diag_encode([0.2, 0.1, 0.3, 0.05])
        y = bc.entry_project(x, 0, 0)
        z = bc.product(y, y)
        w = bc.lcu([z, z], [1, -1])
        chain = [x, y, z, w]
        for before, after in zip(chain, chain[1:]):
            assert after.resources.depth_units >= before.resources.depth_units
            assert after.resources.queries >= before.resources.queries
            assert after.ancillas >= before.ancillas


class TestErrorBudgetSoundness:
    def test_perturbation_never_exceeds_propagated_eps(self):
        rng = np.random.default_rng(13)
        eps0 = 1e-4
        for _ in range(20):
            a_mat = random_contraction(rng, 4, max_norm=0.7)
            b_mat = random_contraction(rng, 4, max_norm=0.7)
            noise = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            noise *= eps0 / np.linalg.norm(noise, 2)
            clean_a = BlockEncoding(a_mat)
            dirty_a = BlockEncoding(a_mat + noise, eps=eps0)
            b = BlockEncoding(b_mat)
            for op in (
                lambda u, v: bc.product(u, v),
                lambda u, v: bc.lcu([u, v], [1, 1]),
                lambda u, v: bc.lcu([u, v], [1, -1]),
            ):
                clean = op(clean_a, b)
                dirty = op(dirty_a, b)
                deviation = clean.alpha * np.linalg.norm(clean.corner - dirty.corner, 2)
                assert deviation <= dirty.eps + 1e-12


class TestDilationComposition:
    def test_product_pair(self):
        rng = np.random.default_rng(21)
        a_mat = random_contraction(rng, 4)
        b_mat = random_contraction(rng, 4)
        calculus = bc.product(BlockEncoding(a_mat), BlockEncoding(b_mat))
        oracle = corner_of(("product", ("leaf", a_mat), ("leaf", b_mat)), 4)
        assert np.max(np.abs(calculus.corner - oracle)) <= 1e-9

    def test_lcu_triple(self):
        rng = np.random.default_rng(22)
        mats = [random_contraction(rng, 4) for _ in range(3)]
        signs = [1, -1, 1]
        calculus = bc.lcu([BlockEncoding(m) for m in mats], signs)
        oracle = corner_of(("lcu", [("leaf", m) for m in mats], signs), 4)
        assert np.max(np.abs(calculus.corner - oracle)) <= 1e-9

    def test_scale_node(self):
        rng = np.random.default_rng(23)
        mat = random_contraction(rng, 4)
        calculus = bc.scale_down(BlockEncoding(mat), 2.5)
        oracle = corner_of(("scale", ("leaf", mat), 2.5), 4)
        assert np.max(np.abs(calculus.corner - oracle)) <= 1e-9


class TestAuditLog:
    def test_records_before_and_after(self):
        audit = AuditLog()
        x = bc.diag_encode([0.2, 0.1], audit=audit)
        bc.entry_project(x, 0, 1, audit=audit)
        assert [r["op"] for r in audit.records] == ["diag_encode", "entry_project"]
        rec = audit.records[1]
        assert rec["in"][0]["id"] == audit.records[0]["out"]["id"]
        assert rec["out"]["queries"] == rec["in"][0]["queries"] + 2
        assert rec["seq"] == 1

    def test_jsonl_deterministic(self):
        def build():
            audit = AuditLog()
            x = bc.diag_encode([0.2, 0.1], audit=audit)
            g = bc.entry_project(x, 0, 0, audit=audit)
            bc.lcu([x, g], [1, -1], audit=audit)
            return audit.to_jsonl()

        assert build() == build()
