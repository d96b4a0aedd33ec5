import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from src.quantum.algebra import (
    AlgebraSpec,
    Element,
    inner,
    random_state,
    trace,
    validate_state,
)
from src.quantum.errors import (
    InvalidAlgebra,
    NotHermitian,
    NotNormalized,
    NotPositive,
    ShapeMismatch,
    ZeroTrace,
)
from src.quantum.tolerances import DEFAULT_TOLERANCES

from .helpers import WEIGHTED, make_state, random_element

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def test_algebra_spec_rejects_bad_blocks():
    with pytest.raises(InvalidAlgebra):
        AlgebraSpec.from_pairs([])
    with pytest.raises(InvalidAlgebra):
        AlgebraSpec.from_pairs([(2, 0.0)])
    with pytest.raises(InvalidAlgebra):
        AlgebraSpec.from_pairs([(0, 1.0)])


def test_trace_examples():
    spec = AlgebraSpec.from_pairs([(2, 1.0)])
    assert trace(spec, Element((np.eye(2),))) == pytest.approx(2.0)

    weighted = AlgebraSpec.from_pairs([(1, 2.0), (1, 3.0)])
    x = Element((np.array([[1.0]]), np.array([[1.0]])))
    assert trace(weighted, x) == pytest.approx(5.0)


def test_trace_rejects_wrong_shape():
    spec = AlgebraSpec.from_pairs([(2, 1.0)])
    with pytest.raises(ShapeMismatch):
        trace(spec, Element((np.eye(3),)))
    with pytest.raises(ShapeMismatch):
        trace(spec, Element((np.eye(2), np.eye(2))))


def test_inner_examples():
    spec = AlgebraSpec.from_pairs([(2, 1.0)])
    one = Element.identity(spec)
    assert inner(spec, one, one) == pytest.approx(2.0)
    x = Element((np.array([[0, 1j], [0, 0]]),))
    assert inner(spec, x, x) == pytest.approx(1.0)
    # conjugate-linear in the first slot
    assert inner(spec, one.scale(1j), one) == pytest.approx(-2j)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_trace_is_cyclic_and_inner_is_hermitian(seed):
    weighted = WEIGHTED
    rng = np.random.default_rng(seed)
    x, y = random_element(rng, weighted), random_element(rng, weighted)
    assert_allclose(trace(weighted, x @ y), trace(weighted, y @ x), atol=1e-9)
    assert_allclose(inner(weighted, x, y), np.conj(inner(weighted, y, x)), atol=1e-9)
    assert inner(weighted, x, x).real > DEFAULT_TOLERANCES.faith


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_trace_positive_and_holder_bound(seed):
    weighted = WEIGHTED
    rng = np.random.default_rng(seed)
    x = random_element(rng, weighted)
    a = random_element(rng, weighted)
    pos = a.adjoint() @ a
    assert trace(weighted, pos).real >= 0
    op_norm = max(np.linalg.norm(b, 2) for b in x.blocks)
    assert abs(trace(weighted, x @ pos)) <= op_norm * trace(weighted, pos).real + 1e-9


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_trace_of_product_bounded_by_two_norms(seed):
    rng = np.random.default_rng(seed)
    a, b = random_element(rng, WEIGHTED), random_element(rng, WEIGHTED)
    bound = np.sqrt(inner(WEIGHTED, a, a).real) * np.sqrt(inner(WEIGHTED, b, b).real)
    assert abs(trace(WEIGHTED, a @ b)) <= bound * (1 + 1e-12) + 1e-12
    # equality when b = a*
    assert abs(trace(WEIGHTED, a @ a.adjoint())) == pytest.approx(inner(WEIGHTED, a, a).real, rel=1e-12)


def test_validate_state_examples(qubit):
    s = make_state(qubit, np.diag([0.5, 0.5]))
    assert_allclose(s.xi.blocks[0], np.diag([np.sqrt(0.5)] * 2), atol=1e-12)

    s = make_state(qubit, np.diag([0.6, 0.6]), renormalize=True)
    assert_allclose(s.h.blocks[0], np.diag([0.5, 0.5]), atol=1e-12)


def test_validate_state_failures(qubit):
    with pytest.raises(NotPositive):
        make_state(qubit, np.diag([1.0, -0.01]))
    with pytest.raises(NotNormalized):
        make_state(qubit, np.diag([0.6, 0.6]))
    with pytest.raises(ZeroTrace):
        make_state(qubit, np.zeros((2, 2)), renormalize=True)
    with pytest.raises(ZeroTrace):
        make_state(qubit, np.zeros((2, 2)))


def test_not_hermitian_names_block():
    spec = AlgebraSpec.from_pairs([(1, 0.5), (2, 0.5)])
    with pytest.raises(NotHermitian) as info:
        make_state(spec, [[1.0]], [[0.5, 0.3], [0.0, 0.5]])
    assert info.value.block == 1


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_xi_squares_to_h(seed):
    weighted = WEIGHTED
    s = random_state(weighted, seed, [1, 2, 0])
    for xi, h in zip(s.xi.blocks, s.h.blocks):
        assert_allclose(xi @ xi, h, atol=1e-12)
        assert_allclose(xi, xi.conj().T, atol=1e-14)
    assert trace(weighted, s.h) == pytest.approx(1.0, abs=1e-12)


def test_random_state_rank_profile():
    spec = AlgebraSpec.from_pairs([(3, 1.0)])
    s = random_state(spec, 7, [1])
    lam = np.linalg.eigvalsh(s.h.blocks[0])
    assert np.sum(np.abs(lam) <= 1e-12 * lam.max()) >= 2


def test_random_state_is_deterministic(weighted):
    a = random_state(weighted, 42, "full")
    b = random_state(weighted, 42, "full")
    for x, y in zip(a.h.blocks, b.h.blocks):
        assert np.array_equal(x, y)


def test_random_state_all_zero_ranks(weighted):
    with pytest.raises(ZeroTrace):
        random_state(weighted, 0, [0, 0, 0])


def test_validate_state_is_faithful_on_positive_elements(weighted):
    # a nonzero positive element has positive trace, so it renormalizes
    s = validate_state(weighted, Element((np.eye(2), np.zeros((3, 3)), np.zeros((1, 1)))), renormalize=True)
    assert trace(weighted, s.h).real == pytest.approx(1.0)
