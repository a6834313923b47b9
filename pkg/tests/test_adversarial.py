import numpy as np
from numpy.testing import assert_allclose
from pytest import approx, mark, raises

from greedcert import adversarial
from greedcert.certificates import SignalProfile, alpha_g
from greedcert.errors import InvalidCoherence, InvalidParameters
from greedcert.solvers import Variant


@mark.parametrize("k, mu", [(1, 0.5), (3, 0.2), (5, 0.1), (4, 0.25)])
def test_gram_spectrum(k, mu):
    gram = adversarial.build_gram(k, mu)
    expected = np.sort(np.r_[1 - k * mu, np.full(k, 1 + mu)])
    assert_allclose(np.linalg.eigvalsh(gram), expected, atol=1e-12)
    assert_allclose(np.diag(gram), 1.0)


@mark.parametrize("k, mu", [(3, 0.0), (3, -0.1), (3, 0.34), (0, 0.1)])
def test_gram_rejects_out_of_range_coherence(k, mu):
    with raises((InvalidCoherence, InvalidParameters)):
        adversarial.build_gram(k, mu)


@mark.parametrize("k", range(1, 9))
def test_dictionary_realizes_the_target_gram(k):
    for mu in (1 / (2 * k), 1 / (k + 1), 1 / k):
        instance = adversarial.build_dictionary(k, mu)
        assert instance.dictionary.n == k + 1
        assert_allclose(instance.dictionary.gram, instance.gram_target, atol=1e-10)
        assert instance.support == tuple(range(k))


def test_worst_case_vector_example():
    x = adversarial.worst_case_vector(3, 2, 0.25, slack=1.1)
    assert_allclose(x, [1.1 * 4 / 3, 1.0, 1.0, 0.0])


@mark.parametrize("j, slack", [(0, 1.5), (3, 1.5), (1, 1.0)])
def test_worst_case_vector_rejects_bad_parameters(j, slack):
    with raises(InvalidParameters):
        adversarial.worst_case_vector(3, j, 0.2, slack=slack)


def test_worst_case_vector_rejects_large_coherence():
    with raises(InvalidParameters):
        adversarial.worst_case_vector(3, 2, 0.6)


@mark.parametrize("variant", list(Variant))
@mark.parametrize("k", range(1, 9))
def test_lemma5_holds_with_equality(k, variant):
    for mu in (1 / (2 * k), 1 / (k + 1), 1 / k):
        instance = adversarial.build_dictionary(k, mu)
        for g in range(k):
            result = adversarial.verify_lemma5(instance, range(g), variant)
            assert result["passed"], result
            assert result["g"] == g


def test_lemma5_is_symmetric_in_the_active_set():
    instance = adversarial.build_dictionary(5, 0.15)
    result = adversarial.verify_lemma5(instance, [5, 2, 0], Variant.OLS)
    assert result["passed"]


def test_lemma5_rejects_oversized_active_set():
    instance = adversarial.build_dictionary(2, 0.3)
    with raises(InvalidParameters):
        adversarial.verify_lemma5(instance, [0, 1])


@mark.parametrize("variant", list(Variant))
@mark.parametrize("k", range(1, 9))
def test_converse_at_one_over_k(k, variant):
    rng = np.random.default_rng(k)
    profiles = [None, np.ones(k), rng.uniform(0.5, 4.0, k) * rng.choice([-1.0, 1.0], k)]
    for coefficients in profiles:
        report = adversarial.demonstrate_converse_k(k, coefficients, variant)
        assert report.verdict == adversarial.VERDICT_CONFIRMED
        assert len(report.steps) == k
        assert report.max_lemma5_deviation <= 1e-9


def test_converse_at_one_over_k_rejects_bad_coefficients():
    with raises(InvalidParameters):
        adversarial.demonstrate_converse_k(3, [1.0, 2.0])
    with raises(InvalidParameters):
        adversarial.demonstrate_converse_k(3, [1.0, 0.0, 2.0])


@mark.parametrize("variant", list(Variant))
@mark.parametrize("slack", [1.1, 1.5, 3.0])
@mark.parametrize("k", range(2, 7))
def test_converse_at_position_j(k, slack, variant):
    for j in range(1, k):
        report = adversarial.demonstrate_converse_j(k, j, slack, variant)
        assert report.boundary_index == j
        assert report.strict_positions == [i for i in range(1, k) if i != j]
        assert report.mu == approx(1 / (2 * k - j))
        last = report.steps[-1]
        assert {j - 1, k} <= set(last["tie_set"])
        assert last["signs"][str(j - 1)] == -last["signs"][str(k)]
        for g, step in enumerate(report.steps[:-1]):
            assert step["tie_set"] == [g]


@mark.parametrize("head, expected", [((2.0, 1.0, 0.5), [1, 2]), ((2.0, 1.0, 1.0), [1]), ((4 / 3, 1.0, 0.5), [2])])
def test_strict_decay_positions(head, expected):
    assert adversarial.strict_decay_positions(SignalProfile(head, 3), 0.25) == expected


def test_converse_at_position_j_parameter_checks():
    with raises(InvalidParameters):
        adversarial.demonstrate_converse_j(1, 1)
    with raises(InvalidParameters):
        adversarial.demonstrate_converse_j(4, 4)


def test_converse_report_serializes():
    payload = adversarial.demonstrate_converse_j(3, 1, 1.5).to_dict()
    assert payload["verdict"] == "tie_confirmed"
    assert payload["variant"] == "omp"
    assert payload["trace"]["steps"][0]["selected"] == 0


@mark.parametrize("k, mu", [(3, 0.2), (4, 0.25), (6, 0.1)])
def test_ols_to_omp_score_ratio(k, mu):
    instance = adversarial.build_dictionary(k, mu).with_worst_vector(1, 2.0)
    y = instance.dictionary.atoms @ instance.worst_vector
    for g in range(k):
        ratios = adversarial.score_ratio(instance, range(g), y)
        expected = 1 / np.sqrt(alpha_g(g, mu))
        assert ratios
        for value in ratios.values():
            assert value == approx(expected, rel=1e-9)
