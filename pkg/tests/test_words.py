import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_unimodular
from cpm import words as W

letters = st.tuples(st.sampled_from(["a", "b", "P0.g1"]), st.sampled_from([1, -1]))
raw_words = st.lists(letters, max_size=12)


@given(raw_words)
def test_reduce_is_idempotent_and_reduced(w):
    r = W.reduce(w)
    assert W.reduce(r) == r
    assert all(not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(r, r[1:]))


@given(raw_words)
def test_string_round_trip(w):
    r = W.reduce(w)
    assert W.parse(W.to_str(r)) == r


@given(raw_words, raw_words)
def test_inverse_of_product(u, v):
    u, v = W.reduce(u), W.reduce(v)
    assert W.inverse(W.mul(u, v)) == W.mul(W.inverse(v), W.inverse(u))
    assert W.mul(u, W.inverse(u)) == ()


def test_commutator_and_identity_spelling():
    a, b = W.gen("a"), W.gen("b")
    assert W.to_str(W.commutator(a, b)) == "a b a^-1 b^-1"
    assert W.to_str(()) == "1" and W.parse("1") == ()


def test_reduced_word_counts():
    # 2k generators: 2k (2k - 1)^(n - 1) reduced words of length n
    counts = [0] * 4
    for w in W.reduced_words(["a", "b"], 4):
        counts[len(w) - 1] += 1
    assert counts == [4, 12, 36, 108]


def test_evaluate_and_trace_table(rng):
    mats = {"a": random_unimodular(rng), "b": random_unimodular(rng)}
    ev = W.Evaluator(mats)
    w = W.parse("a b^-1 a b")
    assert np.allclose(ev(w), mats["a"] @ np.linalg.inv(mats["b"]) @ mats["a"] @ mats["b"], atol=1e-12)
    table = W.trace_table(mats, 3)
    assert set(table) == set(W.reduced_words(["a", "b"], 3))
    assert abs(table[w[:3]] - np.trace(ev(w[:3]))) < 1e-12


def test_inv3_exact_on_integer_unimodular():
    m = np.array([[1.0, 5, 1], [0, 3, 1], [0, -4, -1]])
    assert np.array_equal(W.inv3(m) @ m, np.eye(3))
