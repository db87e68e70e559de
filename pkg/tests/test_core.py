import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigqubo.core import QuboInstance, apply_flip, evaluate, init_gains
from tests.conftest import random_instance, random_x


def brute_gains(instance, x):
    base = evaluate(instance, x)
    out = []
    for j in range(instance.n):
        y = np.array(x).copy()
        y[j] ^= 1
        out.append(evaluate(instance, y) - base)
    return np.array(out)


@pytest.mark.parametrize(
    "x, expected",
    [([0, 0, 0], 0.0), ([1, 0, 0], -7.0), ([1, 1, 1], 14.0), ([0, 1, 1], 13.0)],
)
def test_evaluate_example(example, x, expected):
    assert evaluate(example, x) == expected


def test_evaluate_rejects_bad_input(example):
    with pytest.raises(ValueError):
        evaluate(example, [1, 0])
    with pytest.raises(ValueError):
        evaluate(example, [1, 0, 2])


def test_instance_rejects_asymmetric_and_nonfinite():
    with pytest.raises(ValueError):
        QuboInstance([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        QuboInstance([[np.inf]])
    with pytest.raises(ValueError):
        QuboInstance(np.zeros((0, 0)))


def test_from_matrix_symmetrizes_preserving_objective():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    inst = QuboInstance.from_matrix(a)
    assert np.array_equal(inst.q, inst.q.T)
    for _ in range(20):
        x = random_x(rng, 6)
        assert evaluate(inst, x) == pytest.approx(float(x @ a @ x), rel=1e-12)


def test_instance_is_immutable(example):
    with pytest.raises(ValueError):
        example.q[0, 0] = 1.0


def test_init_gains_examples(example):
    assert np.array_equal(init_gains(example, [0, 0, 0]).gains, [-7, 4, 5])
    assert np.array_equal(init_gains(example, [1, 1, 1]).gains, [-1, -12, -13])
    assert np.array_equal(init_gains(example, [1, 1, 1]).gains, brute_gains(example, [1, 1, 1]))


def test_apply_flip_examples(example):
    s = init_gains(example, [0, 0, 0])
    delta = s.flip(0)
    assert delta == -7 and s.x.tolist() == [1, 0, 0] and s.gains[0] == 7
    s = init_gains(example, [0, 0, 0])
    apply_flip(apply_flip(s, 1), 2)
    assert s.value == 13 == evaluate(example, [0, 1, 1])


def test_apply_flip_out_of_range(example):
    with pytest.raises(ValueError):
        init_gains(example, [0, 0, 0]).flip(3)


def test_flip_then_reinit_matches(example):
    rng = np.random.default_rng(0)
    inst = random_instance(rng, 12)
    x = random_x(rng, 12)
    s = init_gains(inst, x)
    s.flip(5)
    fresh = init_gains(inst, s.x)
    np.testing.assert_allclose(s.gains, fresh.gains, rtol=1e-12, atol=1e-9)


def test_long_flip_chain_matches_recompute():
    rng = np.random.default_rng(1)
    inst = random_instance(rng, 15)
    s = init_gains(inst, random_x(rng, 15))
    for j in rng.integers(0, 15, size=1000):
        s.flip(int(j))
        assert s.value == pytest.approx(evaluate(inst, s.x), rel=1e-9, abs=1e-9)


@st.composite
def instance_and_x(draw, max_n=50):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    q = rng.uniform(-100, 100, size=(n, n))
    return QuboInstance.from_matrix(q, offset=draw(st.floats(-1e3, 1e3))), rng.integers(0, 2, size=n), rng


@settings(max_examples=100, deadline=None)
@given(instance_and_x())
def test_gain_matches_brute_force(data):
    inst, x, rng = data
    s = init_gains(inst, x)
    np.testing.assert_allclose(s.gains, brute_gains(inst, x), rtol=1e-9, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(instance_and_x(), st.data())
def test_flip_is_an_involution(data, draw):
    inst, x, _ = data
    j = draw.draw(st.integers(0, inst.n - 1))
    s = init_gains(inst, x)
    before = s.copy()
    s.flip(j)
    s.flip(j)
    assert np.array_equal(s.x, before.x)
    np.testing.assert_allclose(s.gains, before.gains, rtol=1e-9, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(instance_and_x(), st.floats(-1e6, 1e6))
def test_offset_is_additive(data, offset):
    inst, x, _ = data
    shifted = QuboInstance(inst.q, offset)
    zero = QuboInstance(inst.q, 0.0)
    assert evaluate(shifted, x) == evaluate(zero, x) + offset
