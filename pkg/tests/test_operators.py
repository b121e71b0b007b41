"""Operator layer: apply/adjoint, norms, projections, polynomials, JSON."""

import math

import numpy as np
import pytest

from numindex.operators import (
    HomogeneousPolynomial,
    Operator,
    adjoint,
    apply,
    compose_with_projection,
    coordinate_projection,
    identity,
    op_norm,
    operator_from_json,
    operator_to_json,
    poly_apply,
    poly_from_operator,
    rank_one,
    rank_r_sample,
)
from numindex.spaces import (
    DegenerateInput,
    DescriptorMismatch,
    dual_descriptor,
    lp,
    norm,
    psum,
    scalar,
    unit_sphere_sample,
)


def _sphere_grid_norm(T, n=4000):
    """Independent oracle: max ||Tx|| over a dense direction grid (dim 2)."""
    th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    xs = np.column_stack([np.cos(th), np.sin(th)])
    desc = T.descriptor
    best = 0.0
    for row in xs:
        best = max(best, norm(desc, T.matrix @ row) / norm(desc, row))
    return best


# ---------------------------------------------------------------------------
# construction / apply / adjoint
# ---------------------------------------------------------------------------

def test_apply_examples():
    d = lp(2, 2)
    v = np.array([1.0, 0.0])
    np.testing.assert_allclose(apply(identity(d), [3.0, 4.0]), [3.0, 4.0])
    rot = Operator([[0.0, -1.0], [1.0, 0.0]], d)
    np.testing.assert_allclose(apply(rot, v), [0.0, 1.0])
    np.testing.assert_allclose(apply(Operator(np.zeros((2, 2)), d), v), [0.0, 0.0])


def test_operator_shape_and_field_checks():
    with pytest.raises(DescriptorMismatch):
        Operator(np.eye(3), lp(2, 2))
    with pytest.raises(DescriptorMismatch):
        Operator(np.eye(2) * 1j, lp(2, 2))


def test_adjoint_examples():
    d = lp(3, 2)
    I = identity(d)
    assert adjoint(I).descriptor == dual_descriptor(d)
    np.testing.assert_allclose(adjoint(I).matrix, np.eye(2))
    T = Operator([[1.0, 2.0], [3.0, 4.0]], d)
    np.testing.assert_allclose(adjoint(T).matrix, [[1.0, 3.0], [2.0, 4.0]])
    back = adjoint(adjoint(T))
    assert back.descriptor == d
    np.testing.assert_allclose(back.matrix, T.matrix)


def test_adjoint_complex_conjugates():
    d = lp(2, 2, "complex")
    T = Operator([[1j, 0], [0, -1j]], d)
    np.testing.assert_allclose(adjoint(T).matrix, [[-1j, 0], [0, 1j]])


# ---------------------------------------------------------------------------
# operator norm
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("desc", [lp(1, 3), lp(2, 2), lp(3, 2), lp(math.inf, 3),
                                  psum(1.5, [lp(2, 2), scalar()])])
def test_op_norm_identity(desc):
    est = op_norm(identity(desc), rng=0)
    assert est.value == pytest.approx(1.0, abs=1e-9)


def test_op_norm_diag_on_l3():
    est = op_norm(Operator(np.diag([2.0, 1.0]), lp(3, 2)), rng=0)
    assert est.value == pytest.approx(2.0, abs=1e-9)


def test_op_norm_l2_matches_svd():
    rng = np.random.default_rng(0)
    d = lp(2, 3)
    for _ in range(25):
        m = rng.standard_normal((3, 3))
        est = op_norm(Operator(m, d), budget=8, rng=rng)
        assert est.value == pytest.approx(np.linalg.norm(m, 2), abs=1e-7)


def test_op_norm_flat_l1_linf_exact():
    m = np.array([[1.0, -4.0], [2.0, 3.0]])
    est1 = op_norm(Operator(m, lp(1, 2)))
    assert est1.method == "exact"
    assert est1.value == pytest.approx(7.0)       # max column abs-sum
    estinf = op_norm(Operator(m, lp(math.inf, 2)))
    assert estinf.method == "exact"
    assert estinf.value == pytest.approx(5.0)     # max row abs-sum
    # witnesses attain the value
    for est, p in [(est1, 1.0), (estinf, math.inf)]:
        desc = lp(p, 2)
        assert norm(desc, m @ est.witness) == pytest.approx(est.value, abs=1e-12)


def test_op_norm_vs_grid_oracle_l3():
    rng = np.random.default_rng(7)
    d = lp(3, 2)
    for _ in range(20):
        T = Operator(rng.standard_normal((2, 2)), d)
        est = op_norm(T, budget=8, rng=rng)
        assert est.value == pytest.approx(_sphere_grid_norm(T), abs=2e-3)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
@pytest.mark.parametrize("dim", [2, 3])
def test_adjoint_norm_equality(p, dim):
    rng = np.random.default_rng(13)
    d = lp(p, dim)
    for _ in range(10):
        T = Operator(rng.standard_normal((dim, dim)), d)
        a = op_norm(T, budget=8, rng=np.random.default_rng(1)).value
        b = op_norm(adjoint(T), budget=8, rng=np.random.default_rng(2)).value
        assert a == pytest.approx(b, abs=1e-4)


def test_op_norm_witness_certificate():
    rng = np.random.default_rng(3)
    for desc in [lp(1.5, 2), lp(3, 3), psum(2, [lp(3, 2), scalar()])]:
        T = Operator(rng.standard_normal((desc.total_dim,) * 2), desc)
        est = op_norm(T, budget=8, rng=rng)
        w = est.witness
        assert norm(desc, w) == pytest.approx(1.0, abs=1e-9)
        assert norm(desc, T.matrix @ w) == pytest.approx(est.value, abs=1e-9)


# ---------------------------------------------------------------------------
# rank-one / rank-r
# ---------------------------------------------------------------------------

def test_rank_one_examples():
    d = lp(2, 3)
    e1 = np.array([1.0, 0.0, 0.0])
    T = rank_one(d, e1, e1)
    np.testing.assert_allclose(T.matrix, np.diag([1.0, 0.0, 0.0]))
    assert np.allclose(rank_one(d, np.zeros(3), e1).matrix, 0.0)


def test_rank_one_unit_norm():
    rng = np.random.default_rng(21)
    for desc in [lp(2, 2), lp(3, 3), lp(1.5, 2)]:
        f = unit_sphere_sample(dual_descriptor(desc), rng)
        y = unit_sphere_sample(desc, rng)
        est = op_norm(rank_one(desc, f, y), budget=8, rng=rng)
        assert est.value == pytest.approx(1.0, abs=1e-6)


def test_rank_r_sample():
    desc = lp(3, 4)
    T = rank_r_sample(desc, 2, rng=5)
    assert np.linalg.matrix_rank(T.matrix, tol=1e-10) <= 2
    again = rank_r_sample(desc, 2, rng=5)
    np.testing.assert_array_equal(T.matrix, again.matrix)
    assert op_norm(T, budget=8, rng=0).value == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DegenerateInput):
        rank_r_sample(desc, 5, rng=0)


# ---------------------------------------------------------------------------
# projections and composition
# ---------------------------------------------------------------------------

def test_compose_with_projection_examples():
    desc = lp(2, 3)
    Q = coordinate_projection(desc, (0, 1))
    L_id = identity(Q.sub_descriptor)
    np.testing.assert_allclose(compose_with_projection(L_id, Q).matrix,
                               Q.operator.matrix)
    L0 = Operator(np.zeros((2, 2)), Q.sub_descriptor)
    assert np.allclose(compose_with_projection(L0, Q).matrix, 0.0)
    L = Operator([[1.0, 2.0], [3.0, 4.0]], Q.sub_descriptor)
    full = compose_with_projection(L, Q).matrix
    np.testing.assert_allclose(full[:2, :2], L.matrix)
    assert np.allclose(full[2, :], 0.0) and np.allclose(full[:, 2], 0.0)


def test_compose_descriptor_mismatch():
    Q = coordinate_projection(lp(2, 3), (0, 1))
    with pytest.raises(DescriptorMismatch):
        compose_with_projection(Operator(np.eye(3), lp(2, 3)), Q)


def test_projection_never_increases_norm():
    desc = psum(1.5, [lp(2, 2), lp(3, 2)])
    Q = coordinate_projection(desc, (0,))
    rng = np.random.default_rng(17)
    for _ in range(20):
        L = Operator(rng.standard_normal((2, 2)), Q.sub_descriptor)
        a = op_norm(compose_with_projection(L, Q), budget=8, rng=np.random.default_rng(0)).value
        b = op_norm(L, budget=8, rng=np.random.default_rng(0)).value
        assert a <= b + 1e-6


def test_op_norm_submultiplicative_exact_backends():
    rng = np.random.default_rng(23)
    for p in (1.0, math.inf):
        d = lp(p, 3)
        for _ in range(100):
            A = Operator(rng.standard_normal((3, 3)), d)
            B = Operator(rng.standard_normal((3, 3)), d)
            AB = Operator(A.matrix @ B.matrix, d)
            assert op_norm(AB).value <= op_norm(A).value * op_norm(B).value + 1e-6


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def test_poly_apply_examples():
    d = lp(2, 2)
    T = Operator([[1.0, 2.0], [3.0, 4.0]], d)
    P1 = poly_from_operator(T)
    v = np.array([0.5, -1.5])
    np.testing.assert_allclose(poly_apply(P1, v), T.matrix @ v)
    # P(x) = (x1^2, 0)
    t = np.zeros((2, 2, 2))
    t[0, 0, 0] = 1.0
    P2 = HomogeneousPolynomial(2, t, d)
    np.testing.assert_allclose(poly_apply(P2, [2.0, 5.0]), [4.0, 0.0])
    np.testing.assert_allclose(poly_apply(P2, [0.0, 0.0]), [0.0, 0.0])


def test_poly_homogeneity():
    d = lp(3, 2)
    rng = np.random.default_rng(4)
    P = HomogeneousPolynomial(3, rng.standard_normal((2, 2, 2, 2)), d)
    v = rng.standard_normal(2)
    for a in (0.5, -2.0, 3.0):
        np.testing.assert_allclose(poly_apply(P, a * v),
                                   a ** 3 * poly_apply(P, v), atol=1e-12)


def test_poly_tensor_symmetrized():
    d = lp(2, 2)
    t = np.zeros((2, 2, 2))
    t[0, 0, 1] = 2.0
    P = HomogeneousPolynomial(2, t, d)
    np.testing.assert_allclose(P.tensor[0, 0, 1], 1.0)
    np.testing.assert_allclose(P.tensor[0, 1, 0], 1.0)


def test_poly_cap_and_shape_errors():
    with pytest.raises(DegenerateInput):
        HomogeneousPolynomial(10, np.zeros((4,) * 11), lp(2, 4))
    with pytest.raises(DescriptorMismatch):
        HomogeneousPolynomial(2, np.zeros((2, 2)), lp(2, 2))


# ---------------------------------------------------------------------------
# JSON exchange
# ---------------------------------------------------------------------------

def test_json_round_trip_real():
    T = Operator([[1.0, -2.0], [0.5, 4.0]], lp(3, 2))
    back = operator_from_json(operator_to_json(T))
    assert back.descriptor == T.descriptor
    np.testing.assert_array_equal(back.matrix, T.matrix)


def test_json_round_trip_complex():
    T = Operator([[1 + 2j, 0], [0, -1j]], lp(2, 2, "complex"))
    back = operator_from_json(operator_to_json(T))
    assert back.descriptor.field == "complex"
    np.testing.assert_array_equal(back.matrix, T.matrix)


def test_json_entry_count_mismatch():
    T = Operator(np.eye(2), lp(2, 2))
    with pytest.raises(DescriptorMismatch):
        operator_from_json(operator_to_json(T), descriptor=lp(2, 3))
