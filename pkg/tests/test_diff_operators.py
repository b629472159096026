"""Right-acting operators: algebra, conjugation, bispectral construction."""

import numpy as np
import pytest

import mvop.scalar_families as sf
from mvop.diff_operators import (MatrixDiffOperator, build_bispectral_operator,
                                 conjugate_by_T, eigencheck, op_apply,
                                 op_compose)
from mvop.errors import ConditionFailed, Unsupported
from mvop.matrix_poly import MatrixPolynomial
from mvop.mvop_core import MVOPSequence
from mvop.weight_model import weight_spec


def rand_op(rng, size=2, order=2, deg=2):
    return MatrixDiffOperator(
        [MatrixPolynomial([rng.standard_normal((size, size))
                           for _ in range(deg + 1)])
         for _ in range(order + 1)])


def rand_poly(rng, size=2, deg=3):
    return MatrixPolynomial([rng.standard_normal((size, size))
                             for _ in range(deg + 1)])


@pytest.fixture
def rng():
    return np.random.default_rng(17)


class TestOperatorAlgebra:
    def test_identity_op(self, rng):
        P = rand_poly(rng)
        assert ((P - op_apply(P, MatrixDiffOperator.identity(2)))
                .max_coeff_norm()) == 0

    def test_apply_is_right_linear(self, rng):
        P, Q = rand_poly(rng), rand_poly(rng)
        D = rand_op(rng)
        lhs = op_apply(P + Q, D)
        rhs = op_apply(P, D) + op_apply(Q, D)
        assert (lhs - rhs).max_coeff_norm() <= 1e-12 * lhs.max_coeff_norm()

    def test_compose_matches_sequential_apply(self, rng):
        # P . (D1 o D2) = (P . D1) . D2 for random data
        P = rand_poly(rng, deg=4)
        D1, D2 = rand_op(rng), rand_op(rng)
        lhs = op_apply(P, op_compose(D1, D2))
        rhs = op_apply(op_apply(P, D1), D2)
        assert (lhs - rhs).max_coeff_norm() <= 1e-11 * lhs.max_coeff_norm()

    def test_compose_associative(self, rng):
        D1, D2, D3 = (rand_op(rng, order=1) for _ in range(3))
        lhs = op_compose(op_compose(D1, D2), D3)
        rhs = op_compose(D1, op_compose(D2, D3))
        for j in range(max(lhs.order, rhs.order) + 1):
            d = lhs.coeff(j) - rhs.coeff(j)
            assert d.max_coeff_norm() <= 1e-11 * (lhs.coeff(j).max_coeff_norm()
                                                  or 1.0)

    def test_multiplication_operator(self, rng):
        P = rand_poly(rng)
        M = rand_poly(rng, deg=1)
        got = op_apply(P, MatrixDiffOperator.multiplication(M))
        assert (got - P * M).max_coeff_norm() == 0

    def test_json_round_trip(self, rng):
        D = rand_op(rng)
        D2 = MatrixDiffOperator.from_json(D.to_json())
        for j in range(D.order + 1):
            assert (D.coeff(j) - D2.coeff(j)).max_coeff_norm() < 1e-14


class TestConjugation:
    def test_laguerre_2x2_display(self):
        # conjugated operator for 2x2 Laguerre(alpha), Laguerre(beta):
        # F2 = xI, F1 = [[alpha+1-x, ax(2+beta-alpha)], [0, beta+1-x]],
        # F0 = [[0, a(beta+1)], [0, 1]]
        alpha, beta, a = 0.3, 0.7, 1.3
        spec = weight_spec([a], [sf.laguerre(alpha), sf.laguerre(beta)])
        D, _ = build_bispectral_operator(spec)
        assert D.order == 2
        f2, f1, f0 = D.coeff(2), D.coeff(1), D.coeff(0)
        assert np.allclose(f2.coeff(0), 0, atol=1e-12)
        assert np.allclose(f2.coeff(1), np.eye(2), atol=1e-12)
        assert np.allclose(f1.coeff(0), [[alpha + 1, 0], [0, beta + 1]],
                           atol=1e-12)
        assert np.allclose(f1.coeff(1),
                           [[-1, a * (2 + beta - alpha)], [0, -1]],
                           atol=1e-12)
        assert np.allclose(f0.coeff(0), [[0, a * (beta + 1)], [0, 1]],
                           atol=1e-12)

    def test_hermite_2x2_display(self):
        # F2 = I, F1 = [[-2x+2b, 2ax(c-b)+2a], [0, -2x+2c]],
        # F0 = [[-2, 2ac], [0, 0]]
        b, c, a = 1.0, 0.0, 1.0
        spec = weight_spec([a], [sf.hermite(b), sf.hermite(c)])
        D, _ = build_bispectral_operator(spec)
        f2, f1, f0 = D.coeff(2), D.coeff(1), D.coeff(0)
        assert np.allclose(f2.coeff(0), np.eye(2), atol=1e-12)
        assert f2.degree == 0
        assert np.allclose(f1.coeff(0), [[2 * b, 2 * a], [0, 2 * c]],
                           atol=1e-12)
        assert np.allclose(f1.coeff(1),
                           [[-2, 2 * a * (c - b)], [0, -2]], atol=1e-12)
        assert np.allclose(f0.coeff(0), [[-2, 2 * a * c], [0, 0]], atol=1e-12)

    def test_mixed_2x2_display(self):
        # F2 = [[1, 2ax^2 - ax], [0, 2x]],
        # F1 = [[-2x, 2ax(alpha+3)], [0, 2(alpha+1-x)]],
        # F0 = [[-2, 2a(alpha+1)], [0, 0]]
        alpha, a = 0.5, 1.0
        spec = weight_spec([a], [sf.hermite(0.0), sf.laguerre(alpha)])
        D, _ = build_bispectral_operator(spec)
        f2, f1, f0 = D.coeff(2), D.coeff(1), D.coeff(0)
        assert np.allclose(f2.coeff(0), [[1, 0], [0, 0]], atol=1e-12)
        assert np.allclose(f2.coeff(1), [[0, -a], [0, 2]], atol=1e-12)
        assert np.allclose(f2.coeff(2), [[0, 2 * a], [0, 0]], atol=1e-12)
        assert np.allclose(f1.coeff(0), [[0, 0], [0, 2 * (alpha + 1)]],
                           atol=1e-12)
        assert np.allclose(f1.coeff(1),
                           [[-2, 2 * a * (alpha + 3)], [0, -2]], atol=1e-12)
        assert np.allclose(f0.coeff(0),
                           [[-2, 2 * a * (alpha + 1)], [0, 0]], atol=1e-12)

    def test_conjugation_preserves_action(self, rng):
        spec = weight_spec([1.5], [sf.laguerre(0.0), sf.laguerre(1.0)])
        from mvop.weight_model import build_T
        T, T_inv = build_T(spec)
        D = rand_op(rng, order=1, deg=1)
        C = conjugate_by_T(D, spec)
        P = rand_poly(rng, deg=3)
        lhs = op_apply(P, C)
        rhs = op_apply(P * T, D) * T_inv
        assert (lhs - rhs).max_coeff_norm() <= 1e-11 * lhs.max_coeff_norm()


class TestBispectral:
    def test_condition_violation(self):
        # Jacobi parameters breaking the matching condition
        spec = weight_spec([1.0], [sf.jacobi(0.5, 2.5), sf.jacobi(1.5, 1.5)])
        with pytest.raises(ConditionFailed):
            build_bispectral_operator(spec)

    def test_custom_unsupported(self):
        spec = weight_spec([1.0], [sf.custom([2, 0, 2 / 3, 0, 2 / 5, 0],
                                             (-1, 1)),
                                   sf.jacobi(0.0, 0.0)])
        with pytest.raises(Unsupported):
            build_bispectral_operator(spec)

    def test_mixed_order_unsupported(self):
        spec = weight_spec([1.0], [sf.laguerre(0.5), sf.hermite(0.0)])
        with pytest.raises(Unsupported):
            build_bispectral_operator(spec)

    @pytest.mark.parametrize("spec,lam0,lam1", [
        (weight_spec([2.0], [sf.laguerre(0.0), sf.laguerre(0.5)]),
         [0, 1], [-1, 0]),
        (weight_spec([1.0], [sf.hermite(1.0), sf.hermite(0.0)]),
         [-2, 0], [-4, -2]),
        (weight_spec([1.0], [sf.jacobi(1.5, 1.5), sf.jacobi(0.5, 0.5)]),
         [0, 3], [-5, 0]),
        (weight_spec([1.0], [sf.hermite(0.0), sf.laguerre(0.5)]),
         [-2, 0], [-4, -2]),
    ])
    def test_eigenvalues_and_residuals(self, spec, lam0, lam1):
        seq = MVOPSequence(spec, 13)
        D, lam = build_bispectral_operator(spec)
        assert np.allclose(np.diag(lam(0)).real, lam0)
        assert np.allclose(np.diag(lam(1)).real, lam1)
        rep = eigencheck(seq, D, lam, 12)
        assert rep["max_scaled_residual"] < 1e-11

    def test_eigenvalue_commutation(self):
        # the matching condition in matrix form: A Lambda_{n+1} = Lambda_n A
        specs = [
            weight_spec([1.0, 2.0], [sf.laguerre(0.5)] * 2
                        + [sf.laguerre(1.5)]),
            weight_spec([1.0], [sf.hermite(1.0), sf.hermite(0.0)]),
            weight_spec([1.0], [sf.jacobi(1.5, 1.5), sf.jacobi(0.5, 0.5)]),
            weight_spec([1.0], [sf.hermite(0.0), sf.laguerre(0.5)]),
        ]
        from mvop.weight_model import build_nilpotent
        for spec in specs:
            A = build_nilpotent(spec)
            _, lam = build_bispectral_operator(spec)
            for n in range(16):
                assert np.allclose(A @ lam(n + 1), lam(n) @ A, atol=1e-9)

    def test_five_by_five_chain(self):
        spec = weight_spec([1.0] * 4,
                           [sf.laguerre(0.5), sf.laguerre(0.5),
                            sf.laguerre(1.5), sf.laguerre(1.5),
                            sf.laguerre(2.5)])
        seq = MVOPSequence(spec, 11)
        D, lam = build_bispectral_operator(spec)
        rep = eigencheck(seq, D, lam, 10)
        assert rep["max_scaled_residual"] < 1e-11
        assert np.allclose(np.diag(lam(2)).real, [-2, -1, -2, -1, -2])
