import math

import numpy as np
import pytest

from mopd.problem import (
    LinearConstraint,
    Objective,
    Problem,
    check_gradients,
    eval_jacobian,
    eval_objectives,
    load_problem_json,
    min_positive_singular,
    operator_norm,
)


def quadratic_dict():
    # f1 = x'x + (1,-1)'x + 3, f2 = x'x (both via Q = 2I)
    return {
        "name": "toy",
        "n": 2,
        "m": 2,
        "r": 1,
        "objectives": [
            {"Q": [[2.0, 0.0], [0.0, 2.0]], "c": [1.0, -1.0], "d": 3.0, "mu": 2.0, "lip": 2.0},
            {"Q": [[2.0, 0.0], [0.0, 2.0]], "c": [0.0, 0.0], "d": 0.0, "mu": 2.0, "lip": 2.0},
        ],
        "A": [[1.0, 1.0]],
        "b": [1.0],
    }


class TestObjective:
    def test_rejects_bad_curvature(self):
        with pytest.raises(ValueError):
            Objective(eval=lambda x: 0.0, grad=lambda x: x, mu=2.0, lip=1.0)
        with pytest.raises(ValueError):
            Objective(eval=lambda x: 0.0, grad=lambda x: x, mu=-1.0, lip=1.0)

    def test_three_point_inequality_quadratics(self):
        """-<grad f(y), x-z> <= f(z)-f(x) - mu/2|y-z|^2 + L/2|y-x|^2"""
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            B = rng.normal(size=(n, n))
            Q = B.T @ B + 0.3 * np.eye(n)
            eigs = np.linalg.eigvalsh(Q)
            mu, lip = float(eigs[0]), float(eigs[-1])
            c = rng.normal(size=n)

            def f(x, Q=Q, c=c):
                return 0.5 * float(x @ Q @ x) + float(c @ x)

            def g(x, Q=Q, c=c):
                return Q @ x + c

            x, y, z = rng.normal(size=(3, n), scale=3.0)
            lhs = -float(g(y) @ (x - z))
            rhs = (
                f(z)
                - f(x)
                - 0.5 * mu * float(np.dot(y - z, y - z))
                + 0.5 * lip * float(np.dot(y - x, y - x))
            )
            assert lhs <= rhs + 1e-9 * (1.0 + abs(rhs))


class TestEval:
    def test_values_and_jacobian(self):
        p = load_problem_json(quadratic_dict())
        x = np.array([2.0, 1.0])
        # f1 = (4+1) + (2-1) + 3 = 9, f2 = 5
        np.testing.assert_allclose(eval_objectives(p, x), [9.0, 5.0], rtol=0, atol=1e-13)
        np.testing.assert_allclose(
            eval_jacobian(p, x), [[5.0, 1.0], [4.0, 2.0]], rtol=0, atol=1e-13
        )

    def test_shape_mismatch_rejected(self):
        p = load_problem_json(quadratic_dict())
        with pytest.raises(ValueError):
            eval_objectives(p, np.zeros(3))
        with pytest.raises(ValueError):
            eval_jacobian(p, np.zeros((2, 1)))


class TestCheckGradients:
    def test_quadratic_is_clean(self):
        p = load_problem_json(quadratic_dict())
        assert check_gradients(p, np.array([0.3, -1.2])) <= 1e-6

    def test_detects_wrong_gradient(self):
        bad = Objective(eval=lambda x: float(x @ x), grad=lambda x: 3.0 * x, mu=0.0, lip=2.0)
        p = Problem(objectives=[bad], constraint=LinearConstraint(A=np.zeros((1, 2)), b=[0.0]))
        assert check_gradients(p, np.array([1.0, 2.0])) > 1e-2

    def test_nonfinite_probe_raises(self):
        spiky = Objective(
            eval=lambda x: math.sqrt(x[0]), grad=lambda x: np.array([0.5 / math.sqrt(x[0])]),
            mu=0.0, lip=1.0,
        )
        p = Problem(objectives=[spiky], constraint=LinearConstraint(A=np.zeros((1, 1)), b=[0.0]))
        with pytest.raises(ValueError):
            check_gradients(p, np.array([1e-9]), h=1e-6)


class TestOperatorNorm:
    def test_identity_and_zero(self):
        assert operator_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-12)
        assert operator_norm(np.zeros((2, 4))) == 0.0

    def test_diagonal(self):
        assert operator_norm(np.diag([3.0, 4.0])) == pytest.approx(4.0, rel=1e-10)

    def test_ones_start_in_nullspace(self):
        # A'A annihilates the all-ones start here; the deterministic
        # basis-vector restart must still find ||A|| = sqrt(2)
        assert operator_norm(np.array([[1.0, -1.0]])) == pytest.approx(math.sqrt(2.0), rel=1e-10)

    def test_matches_svd_oracle(self):
        rng = np.random.default_rng(7)
        A = rng.normal(size=(5, 8))
        expect = np.linalg.svd(A, compute_uv=False)[0]
        assert operator_norm(A) == pytest.approx(expect, rel=1e-8)

    def test_bracketed_by_column_and_frobenius_norms(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            A = rng.normal(size=(int(rng.integers(1, 7)), int(rng.integers(1, 7))))
            nrm = operator_norm(A)
            col = float(np.max(np.linalg.norm(A, axis=0)))
            assert nrm >= col / math.sqrt(A.shape[1]) - 1e-12
            assert nrm <= float(np.linalg.norm(A)) + 1e-12


class TestMinPositiveSingular:
    def test_identity(self):
        assert min_positive_singular(np.eye(4)) == pytest.approx(1.0, rel=1e-12)

    def test_single_row(self):
        assert min_positive_singular(np.array([[1.0, -1.0]])) == pytest.approx(
            math.sqrt(2.0), rel=1e-12
        )

    def test_rank_deficient_skips_null_directions(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(4, 2)) @ rng.normal(size=(2, 6))  # rank 2 by construction
        s = np.linalg.svd(A, compute_uv=False)
        assert min_positive_singular(A) == pytest.approx(float(s[1]), rel=1e-10)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            min_positive_singular(np.zeros((3, 3)))


class TestConstraint:
    def test_caches_spectral_data(self):
        c = LinearConstraint(A=[[1.0, -1.0]], b=[1.0])
        assert c.norm_A == pytest.approx(math.sqrt(2.0), rel=1e-10)
        assert c.sigma_min_plus == pytest.approx(math.sqrt(2.0), rel=1e-10)
        np.testing.assert_allclose(c.residual(np.array([3.0, 2.0])), [0.0], atol=1e-14)

    def test_zero_matrix_constraint(self):
        c = LinearConstraint(A=np.zeros((2, 3)), b=[0.0, 0.0])
        assert c.norm_A == 0.0
        assert c.sigma_min_plus == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            LinearConstraint(A=np.eye(2), b=[1.0, 2.0, 3.0])


class TestJsonLoader:
    def test_roundtrip_through_file(self, tmp_path):
        import json

        path = tmp_path / "toy.json"
        path.write_text(json.dumps(quadratic_dict()))
        p = load_problem_json(str(path))
        assert p.name == "toy"
        assert (p.n, p.m, p.r) == (2, 2, 1)
        assert p.mu == 2.0 and p.lip == 2.0
        assert check_gradients(p, np.array([1.0, 1.0])) <= 1e-6

    def test_flat_row_major_matrices(self):
        d = quadratic_dict()
        d["objectives"][0]["Q"] = [2.0, 0.0, 0.0, 2.0]
        d["A"] = [1.0, 1.0]
        p = load_problem_json(d)
        np.testing.assert_allclose(eval_jacobian(p, np.zeros(2))[0], [1.0, -1.0], atol=1e-14)

    def test_asymmetric_q_rejected(self):
        d = quadratic_dict()
        d["objectives"][1]["Q"] = [[2.0, 1e-6], [0.0, 2.0]]
        with pytest.raises(ValueError, match="symmetric"):
            load_problem_json(d)

    def test_wrong_counts_rejected(self):
        d = quadratic_dict()
        d["m"] = 3
        with pytest.raises(ValueError):
            load_problem_json(d)
