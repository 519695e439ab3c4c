"""Operator algebra and vectorization identities against dense arithmetic."""

import numpy as np
import pytest

from mollowscan.hilbert import (
    AlgebraError,
    DimensionError,
    HilbertSpace,
    SparseOperator,
    annihilation,
    embed,
    identity,
    lowering_two_level,
    unvec,
    vec,
    vectorize_left,
    vectorize_right,
)

rng = np.random.default_rng(20240811)


def random_op(space: HilbertSpace) -> SparseOperator:
    d = space.total_dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return SparseOperator(m, space)


def test_annihilation_matrix_elements():
    a = annihilation(5).to_dense()
    for n in range(1, 5):
        assert a[n - 1, n] == pytest.approx(np.sqrt(n))
    assert np.count_nonzero(a) == 4


def test_annihilation_degenerate_and_invalid():
    assert annihilation(1).nnz == 0
    with pytest.raises(DimensionError):
        annihilation(0)


def test_lowering_two_level_is_sigma_minus():
    sm = lowering_two_level().to_dense()
    expected = np.zeros((2, 2))
    expected[0, 1] = 1.0
    assert np.array_equal(sm, expected)


def test_space_validation():
    with pytest.raises(DimensionError):
        HilbertSpace((2, 0))
    space = HilbertSpace((2, 3))
    assert space.total_dim == 6
    assert space.n_subsystems == 2
    with pytest.raises(DimensionError):
        SparseOperator(np.eye(5), space)  # wrong shape for the space


def test_embed_matches_explicit_kron():
    space = HilbertSpace((2, 3, 4))
    a = annihilation(3)
    got = embed(a, space, 1).to_dense()
    expected = np.kron(np.kron(np.eye(2), a.to_dense()), np.eye(4))
    assert np.allclose(got, expected, atol=1e-15)
    with pytest.raises(DimensionError):
        embed(a, space, 2)  # dim 3 operator into a dim 4 slot
    with pytest.raises(DimensionError):
        embed(a, space, 5)


def test_algebra_space_checks():
    sa = random_op(HilbertSpace((2, 2)))
    sb = random_op(HilbertSpace((4,)))
    # same total dimension, different factorization: still incompatible
    with pytest.raises(AlgebraError):
        _ = sa + sb
    with pytest.raises(AlgebraError):
        _ = sa @ sb


def test_dagger_and_linear_ops_dense_oracle():
    space = HilbertSpace((3, 2))
    x, y = random_op(space), random_op(space)
    assert np.allclose(x.dagger().to_dense(), x.to_dense().conj().T)
    assert np.allclose((x + y).to_dense(), x.to_dense() + y.to_dense())
    assert np.allclose((x - y).to_dense(), x.to_dense() - y.to_dense())
    assert np.allclose((x @ y).to_dense(), x.to_dense() @ y.to_dense())
    assert np.allclose((2.5j * x).to_dense(), 2.5j * x.to_dense())
    assert np.allclose((-x).to_dense(), -x.to_dense())
    assert np.allclose(identity(space).to_dense(), np.eye(6))


def test_vec_unvec_column_stacking():
    rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    v = vec(rho)
    # column stacking: first dim entries are the first column
    assert np.allclose(v[:4], rho[:, 0])
    assert np.allclose(unvec(v, 4), rho)


@pytest.mark.parametrize("dims", [(3,), (2, 3)])
def test_vectorization_identity(dims):
    """vec(A rho B) must equal left(A) right(B) vec(rho) for random draws."""
    space = HilbertSpace(dims)
    d = space.total_dim
    for _ in range(10):
        a, b = random_op(space), random_op(space)
        rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        direct = vec(a.to_dense() @ rho @ b.to_dense())
        via_super = (vectorize_left(a) @ vectorize_right(b)).matrix @ vec(rho)
        assert np.allclose(via_super, direct, atol=1e-12)


def test_left_right_superoperators_commute():
    space = HilbertSpace((4,))
    a, b = random_op(space), random_op(space)
    left = vectorize_left(a).matrix.toarray()
    right = vectorize_right(b).matrix.toarray()
    assert np.allclose(left @ right, right @ left, atol=1e-12)


def test_operator_immutability():
    op = annihilation(3)
    with pytest.raises(AttributeError):
        op.matrix = None
