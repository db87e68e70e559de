import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigqubo.core import QuboInstance, evaluate
from eigqubo.instances import (
    GeneratorSpec,
    MdpInstance,
    ParseError,
    generate,
    generate_mdp,
    mdp_to_qubo,
    parse_mdplib,
    parse_orlib,
    write_mdplib,
    write_orlib,
)
from eigqubo.solver import brute_force
from eigqubo.spectral import full_spectrum


def test_parse_orlib_example():
    (inst,) = parse_orlib("1\n3 3\n1 1 -7\n1 2 2\n2 3 2\n")
    expected = np.array([[-7, 2, 0], [2, 0, 2], [0, 2, 0]], dtype=float)
    assert np.array_equal(inst.q, expected)


def test_parse_orlib_empty():
    assert parse_orlib("0\n") == []


def test_parse_orlib_from_stream_and_names():
    insts = parse_orlib(io.StringIO("2\n1 1\n1 1 3\n2 0\n"), name="bqp")
    assert [i.name for i in insts] == ["bqp_1", "bqp_2"]
    assert insts[1].q.tolist() == [[0, 0], [0, 0]]


@pytest.mark.parametrize(
    "text, line",
    [
        ("1\n3 2\n1 1 -7\n1 x 2\n", 4),
        ("1\n3 1\n1 4 2\n", 3),
        ("1\n3 2\n1 2 5\n2 1 5\n", 4),
        ("1\n3\n", 2),
        ("1 2\n", 1),
        ("1\n2 1\n1 1 1\n1 1 1\n", 4),
    ],
)
def test_parse_orlib_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_orlib(text)
    assert info.value.lineno == line


def test_parse_orlib_truncated():
    with pytest.raises(ParseError):
        parse_orlib("1\n3 3\n1 1 -7\n")


def test_offset_header_roundtrip():
    inst = QuboInstance([[1.0, 2.5], [2.5, -3.0]], offset=-40.0, name="x")
    text = write_orlib([inst])
    assert text.splitlines()[1] == "2 3 -40"
    (back,) = parse_orlib(text)
    assert back.offset == -40.0 and np.array_equal(back.q, inst.q)


def orlib_suite(count=100):
    families = ["orlib-like", "palubeckis-like", "dominant-eig"]
    return [
        generate(GeneratorSpec(5 + i % 23, density=0.1 + 0.9 * (i % 4) / 3, seed=i, family=families[i % 3]))
        for i in range(count)
    ]


def test_orlib_roundtrip_suite():
    suite = orlib_suite()
    back = parse_orlib(write_orlib(suite))
    assert len(back) == len(suite)
    for a, b in zip(suite, back):
        assert np.array_equal(a.q, b.q) and a.offset == b.offset


def test_generator_reproducible_and_symmetric():
    spec = GeneratorSpec(50, density=0.3, seed=12)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.q, b.q) and np.array_equal(a.q, a.q.T)
    assert not np.array_equal(a.q, generate(GeneratorSpec(50, density=0.3, seed=13)).q)


def test_generator_density_binomial():
    n, p = 100, 0.1
    cells = n * (n + 1) // 2
    count = np.count_nonzero(np.triu(generate(GeneratorSpec(n, density=p, seed=4)).q))
    # a drawn value of 0 also leaves a cell empty
    p_eff = p * (1 - 1 / 201)
    assert abs(count - cells * p_eff) <= 3 * np.sqrt(cells * p_eff * (1 - p_eff))


def test_full_density_only_drawn_zeros():
    q = generate(GeneratorSpec(30, density=1.0, coeff_low=1, coeff_high=5, seed=0)).q
    assert np.all(q[np.triu_indices(30)] != 0)
    assert q.min() >= 1 and q.max() <= 5


def test_dominant_eig_family():
    hits = 0
    for seed in range(50):
        w = np.sort(np.abs(full_spectrum(generate(GeneratorSpec(100, seed=seed, family="dominant-eig")))))[::-1]
        hits += w[0] >= 3 * w[1]
    assert hits >= 45


def test_generator_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec(10, density=0.0)
    with pytest.raises(ValueError):
        GeneratorSpec(10, coeff_low=5, coeff_high=1)
    with pytest.raises(ValueError):
        GeneratorSpec(10, family="nope")


def test_mdp_reduction_small_example():
    q = mdp_to_qubo(MdpInstance(np.zeros((3, 3)), 1), P=10)
    assert np.all(np.diagonal(q.q) == 10)
    assert np.all(q.q[~np.eye(3, dtype=bool)] == -10)
    assert q.offset == -10
    best = brute_force(q)
    assert best.value == 0 and best.x.sum() == 1
    for x in ([1, 0, 0], [0, 1, 0], [0, 0, 1]):
        assert evaluate(q, x) == 0


def test_mdp_validation():
    with pytest.raises(ValueError):
        MdpInstance([[0, 1], [2, 0]], 1)
    with pytest.raises(ValueError):
        MdpInstance([[1, 0], [0, 0]], 1)
    with pytest.raises(ValueError):
        MdpInstance(np.zeros((2, 2)), 3)
    with pytest.raises(ValueError):
        mdp_to_qubo(MdpInstance(np.zeros((2, 2)), 1), P=-1)


def penalized(mdp, P, x):
    x = np.asarray(x, dtype=float)
    total = sum(mdp.d[i, j] * x[i] * x[j] for i in range(mdp.n) for j in range(mdp.n) if i != j)
    return total - P * (x.sum() - mdp.m) ** 2


def test_mdp_identity_direct():
    rng = np.random.default_rng(0)
    mdp = generate_mdp(10, 4, seed=1)
    q = mdp_to_qubo(mdp, 7)
    for _ in range(100):
        x = rng.integers(0, 2, 10)
        assert evaluate(q, x) == pytest.approx(penalized(mdp, 7, x), rel=1e-9, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 15), st.data())
def test_mdp_identity_property(n, data):
    m = data.draw(st.integers(1, n))
    P = data.draw(st.floats(0, 1e3))
    seed = data.draw(st.integers(0, 2**31))
    mdp = generate_mdp(n, m, seed=seed)
    q = mdp_to_qubo(mdp, P)
    rng = np.random.default_rng(seed)
    for _ in range(50):
        x = rng.integers(0, 2, n)
        expected = mdp.objective(x) - P * (x.sum() - m) ** 2
        assert evaluate(q, x) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_large_penalty_enforces_cardinality(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    m = int(rng.integers(1, n + 1))
    mdp = generate_mdp(n, m, seed=seed)
    P = mdp.d.sum() + 1
    assert brute_force(mdp_to_qubo(mdp, P)).x.sum() == m


def test_upper_triangle_penalty_bound_is_not_enough():
    # objective counts d_01 twice: picking both scores 2*5 - P = 4 > 0 at P = 6
    mdp = MdpInstance([[0.0, 5.0], [5.0, 0.0]], 1)
    assert brute_force(mdp_to_qubo(mdp, 6.0)).x.tolist() == [1, 1]
    assert brute_force(mdp_to_qubo(mdp, 11.0)).x.sum() == 1


def test_parse_mdplib_triplets():
    mdp = parse_mdplib("3 1\n0 1 2.5\n0 2 1.0\n1 2 4.0\n")
    assert mdp.m == 1
    assert mdp.d.tolist() == [[0, 2.5, 1], [2.5, 0, 4], [1, 4, 0]]


def test_parse_mdplib_one_based_and_dense():
    a = parse_mdplib("3 2\n1 2 2.5\n1 3 1.0\n2 3 4.0\n")
    b = parse_mdplib("3 2\n2.5 1.0\n4.0\n")
    assert np.array_equal(a.d, b.d)


def test_parse_mdplib_degenerate():
    mdp = parse_mdplib("1 1\n")
    assert mdp.n == 1 and mdp.m == 1 and mdp.d.tolist() == [[0.0]]


@pytest.mark.parametrize(
    "text",
    [
        "3 1\n0 1 2.5\n0 2 1.0\n",
        "3 1\n0 1 2.5\n1 0 3.0\n0 2 1.0\n1 2 4.0\n",
        "3 1\n0 1 2.5\n0 2 1.0\n1 2\n",
        "3 4\n",
        "",
    ],
)
def test_parse_mdplib_errors(text):
    with pytest.raises(ParseError):
        parse_mdplib(text)


def test_mdplib_roundtrip_suite():
    for seed in range(100):
        n = 1 + seed % 17
        mdp = generate_mdp(n, 1 + seed % n, high=9 if seed % 2 else 100, seed=seed)
        back = parse_mdplib(write_mdplib(mdp))
        assert np.array_equal(back.d, mdp.d) and back.m == mdp.m


def test_mdplib_roundtrip_real_distances():
    rng = np.random.default_rng(0)
    d = rng.uniform(0, 10, size=(6, 6))
    d = np.triu(d, 1) + np.triu(d, 1).T
    mdp = MdpInstance(d, 3)
    assert np.array_equal(parse_mdplib(write_mdplib(mdp)).d, d)


def test_som_like_spectrum_has_dominant_negative_eigenvalue():
    q = mdp_to_qubo(generate_mdp(100, 10, seed=21), P=10)
    w = full_spectrum(q)
    # one large negative outlier, far below a tight positive bulk
    assert w[-1] < -300 and w[-2] > 0 and w[0] - w[-2] < 0.5 * (w[-2] - w[-1])
    # the bulk sits near P(2m - 1) + P = 200
    assert 150 < np.median(w) < 250


def test_enumeration_helper_agrees():
    mdp = generate_mdp(7, 3, seed=2)
    best = max(mdp.objective(np.isin(np.arange(7), c)) for c in itertools.combinations(range(7), 3))
    P = mdp.d.sum() + 1
    assert brute_force(mdp_to_qubo(mdp, P)).value == best
