import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from pytest import approx, mark, raises

from greedcert import linalg
from greedcert.adversarial import build_dictionary
from greedcert.errors import DimensionMismatch, InvalidDimensions, InvalidIndex, RankDeficientActiveSet, ZeroColumn

from .conftest import random_dictionary


def test_identity_has_zero_coherence():
    d = linalg.normalize_columns(np.eye(2))
    assert d.coherence == 0.0
    assert linalg.mutual_coherence(d) == 0.0


def test_coherence_of_two_columns_by_hand():
    d = linalg.normalize_columns(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert d.coherence == approx(1 / np.sqrt(2))


def test_duplicated_column_has_unit_coherence():
    d = linalg.normalize_columns(np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 1.0]]))
    assert d.coherence == approx(1.0)


def test_single_atom_coherence_is_zero():
    assert linalg.normalize_columns(np.array([[3.0], [4.0]])).coherence == 0.0


def test_columns_are_scaled_to_unit_norm(rng):
    d = linalg.normalize_columns(5 * rng.standard_normal((6, 9)))
    assert_allclose(np.linalg.norm(d.atoms, axis=0), 1.0, atol=1e-12)
    assert_allclose(d.gram, d.gram.T, atol=0)
    assert_allclose(np.diag(d.gram), 1.0, atol=0)


def test_zero_column_reports_its_index():
    with raises(ZeroColumn) as info:
        linalg.normalize_columns(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert info.value.index == 1


@mark.parametrize("raw", [np.zeros((0, 3)), np.ones(3), np.array([[np.nan, 1.0]])])
def test_invalid_matrices(raw):
    with raises(InvalidDimensions):
        linalg.normalize_columns(raw)


def test_column_with_overflowing_norm_is_rejected():
    with np.errstate(over="ignore"):
        with raises(InvalidDimensions, match="column 0"):
            linalg.normalize_columns(np.array([[1e308, 1.0], [1e308, 0.0]]))


def test_dictionary_is_read_only(rng):
    d = random_dictionary(rng, 3, 4)
    with raises(ValueError):
        d.atoms[0, 0] = 2.0


def test_adversarial_coherence():
    assert build_dictionary(3, 0.2).dictionary.coherence == approx(0.2, abs=1e-10)


def test_projection_with_empty_active_set_is_identity(rng):
    d = random_dictionary(rng, 5, 7)
    v = rng.standard_normal(5)
    assert_allclose(linalg.project_complement(d, [], v), v)


def test_projection_of_span_member_vanishes(rng):
    d = random_dictionary(rng, 6, 8)
    v = d.atoms[:, [1, 4]] @ np.array([0.3, -2.0])
    assert_allclose(linalg.project_complement(d, [1, 4], v), 0.0, atol=1e-10)


def test_projection_is_orthogonal_to_active_atoms(rng):
    d = random_dictionary(rng, 6, 8)
    r = linalg.project_complement(d, [0, 2, 5], rng.standard_normal(6))
    assert_allclose(d.atoms[:, [0, 2, 5]].T @ r, 0.0, atol=1e-10)


def test_adversarial_projected_norm():
    d = build_dictionary(2, 0.3).dictionary
    projected = linalg.project_complement(d, [0], d.atom(1))
    assert float(projected @ projected) == approx(0.91, abs=1e-10)


def test_adversarial_projected_cross_correlation():
    d = build_dictionary(2, 0.3).dictionary
    state = linalg.projected_atoms(d, [0])
    assert float(state.projected_atoms[1] @ state.projected_atoms[2]) == approx(-0.39, abs=1e-10)


def test_empty_active_set_leaves_atoms_unchanged(rng):
    d = random_dictionary(rng, 4, 6)
    state = linalg.projected_atoms(d, [], y=np.ones(4))
    for i in range(6):
        assert_allclose(state.projected_atoms[i], d.atom(i))
        assert_allclose(state.normalized_projected_atoms[i], d.atom(i))
    assert_allclose(state.residual, np.ones(4))


def test_atom_in_span_has_zero_normalized_projection():
    d = linalg.normalize_columns(np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]))
    state = linalg.projected_atoms(d, [0])
    assert state.projected_norms[1] == 0.0
    assert not state.normalized_projected_atoms[1].any()


def test_dependent_active_set_is_rejected():
    d = linalg.normalize_columns(np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0]]))
    with raises(RankDeficientActiveSet) as info:
        linalg.project_complement(d, [0, 1], np.ones(2))
    assert info.value.index == 1


def test_bad_indices_and_lengths(rng):
    d = random_dictionary(rng, 3, 4)
    with raises(InvalidIndex):
        linalg.project_complement(d, [4], np.ones(3))
    with raises(InvalidIndex):
        linalg.project_complement(d, [1, 1], np.ones(3))
    with raises(DimensionMismatch):
        linalg.project_complement(d, [0], np.ones(4))


@mark.parametrize("m, n, expected", [(4, 4, 0.0), (2, 3, 0.5), (3, 9, 0.5)])
def test_welch_bound(m, n, expected):
    assert linalg.welch_bound(m, n) == approx(expected)


@mark.parametrize("seed", range(10))
def test_lemma1_bounds_on_random_dictionaries(seed):
    rng = np.random.default_rng(seed)
    d = random_dictionary(rng, 30, 8)
    for g in range(4):
        bounds = linalg.lemma1_bounds(d, range(g))
        if not bounds["applicable"]:
            continue
        assert bounds["min_sq_norm"] >= bounds["sq_norm_bound"] - 1e-9
        assert bounds["max_cross"] <= bounds["cross_bound"] + 1e-9


@mark.parametrize("k, mu", [(3, 0.2), (4, 0.25), (5, 0.1)])
def test_lemma1_bounds_are_attained_on_adversarial_instances(k, mu):
    d = build_dictionary(k, mu).dictionary
    for g in range(k):
        bounds = linalg.lemma1_bounds(d, range(g))
        assert bounds["min_sq_norm"] == approx(bounds["sq_norm_bound"], abs=1e-9)
        assert bounds["max_cross"] == approx(bounds["cross_bound"], abs=1e-9)


@st.composite
def dictionary_and_active_set(draw):
    m = draw(st.integers(min_value=2, max_value=8))
    n = draw(st.integers(min_value=2, max_value=12))
    rng = np.random.default_rng(draw(st.integers(min_value=0, max_value=2**32 - 1)))
    d = random_dictionary(rng, m, n)
    size = draw(st.integers(min_value=0, max_value=min(m - 1, n - 1)))
    active = [int(i) for i in rng.permutation(n)[:size]]
    return d, active, rng


@given(dictionary_and_active_set())
@settings(max_examples=500, deadline=None)
def test_complement_projection_is_idempotent_and_symmetric(case):
    d, active, rng = case
    u, v = rng.standard_normal((2, d.m))
    pv = linalg.project_complement(d, active, v)
    pu = linalg.project_complement(d, active, u)
    assert np.linalg.norm(linalg.project_complement(d, active, pv) - pv) <= 1e-10 * np.linalg.norm(v)
    assert float(pu @ v) == approx(float(u @ pv), abs=1e-10 * np.linalg.norm(u) * np.linalg.norm(v))
    basis = linalg.orthonormal_basis(d, active)
    assert_allclose(basis.T @ basis, np.eye(len(active)), atol=1e-10)


@given(dictionary_and_active_set())
@settings(max_examples=500, deadline=None)
def test_projected_atoms_never_grow(case):
    d, active, _ = case
    state = linalg.projected_atoms(d, active)
    assert set(state.candidates()) == set(range(d.n)) - set(active)
    for i, a in state.projected_atoms.items():
        assert np.linalg.norm(a) <= 1.0 + 1e-12
        assert state.projected_norms[i] <= 1.0 + 1e-12
