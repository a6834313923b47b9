import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from pytest import approx, mark, raises

from greedcert import experiments
from greedcert.errors import InfeasibleGeneration, InvalidCoherence, InvalidParameters, NotApplicable
from greedcert.experiments import DistributionSpec, ExperimentResult, ExperimentRow, Family
from greedcert.solvers import Variant


# ----------------------
# Coefficient families
# ----------------------

def test_distribution_spec_defaults_and_checks():
    spec = DistributionSpec(Family.LOGLOGISTIC, {"shape": 2})
    assert spec.parameters == {"shape": 2.0, "scale": 1.0}
    assert DistributionSpec("normal").family is Family.NORMAL
    with raises(InvalidParameters):
        DistributionSpec(Family.NORMAL, {"shape": 1.0})
    with raises(InvalidParameters):
        DistributionSpec(Family.UNIFORM, {"half_width": 0.0})


@mark.parametrize("family", list(Family))
def test_samples_are_nonzero(family):
    values = experiments.sample_coefficients(DistributionSpec(family), 7, np.random.default_rng(3))
    assert values.shape == (7,)
    assert np.all(values != 0)


def test_bernoulli_samples_are_signs():
    values = experiments.sample_coefficients(DistributionSpec(Family.BERNOULLI), 50, np.random.default_rng(0))
    assert set(np.abs(values)) == {1.0}


def test_streams_are_keyed_by_family_and_grid_point():
    a = experiments.stream_for(7, 1, 2).standard_normal(4)
    assert_allclose(a, experiments.stream_for(7, 1, 2).standard_normal(4))
    assert not np.allclose(a, experiments.stream_for(7, 2, 1).standard_normal(4))


# ----------------------
# Decay condition
# ----------------------

def test_satisfies_decay_sorts_magnitudes():
    assert experiments.satisfies_decay([1.0, -9.0, 3.0], 0.2)
    assert not experiments.satisfies_decay([1.0, 1.0, 1.0], 0.2)
    assert experiments.satisfies_decay([[5.0]], 0.9).tolist() == [True]


@given(st.lists(st.floats(min_value=0.01, max_value=100.0), min_size=2, max_size=8),
       st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=10_000, deadline=None)
def test_satisfies_decay_is_monotone_in_coherence(values, a, b):
    k = len(values)
    low, high = sorted((a / k * 0.999, b / k * 0.999))
    if experiments.satisfies_decay(values, high):
        assert experiments.satisfies_decay(values, low)


def test_decay_curve_values():
    curve = experiments.decay_constraint_curve(5, [0.1, 0.2])
    assert list(curve.columns) == ["mu", "i", "factor"]
    assert len(curve) == 8
    first = curve[(curve["mu"] == 0.1) & (curve["i"] == 1)]["factor"].iloc[0]
    assert first == approx(0.8 / 0.9)
    last = curve[(curve["mu"] == 0.2) & (curve["i"] == 4)]["factor"].iloc[0]
    assert last == approx(0.4 / 0.2)
    with raises(InvalidCoherence):
        experiments.decay_constraint_curve(5, [0.3])


@mark.parametrize("k", [2, 5, 6, 7, 13, 64])
def test_landmark_coherences_parse_into_a_valid_curve(k):
    text = experiments.landmark_coherences(k)
    mus = [float(v) for v in text.split(",")]
    assert mus[-1] == 1.0 / k
    curve = experiments.decay_constraint_curve(k, mus)
    assert len(curve) == 4 * (k - 1)


def test_default_grid():
    assert experiments.default_grid(4) == [0.25, 0.5, 0.75, 1.0]
    with raises(InvalidParameters):
        experiments.default_grid(0)


# ----------------------
# Probability runs
# ----------------------

def test_bernoulli_threshold_at_five_ninths():
    result = experiments.prob_satisfy_decay(DistributionSpec(Family.BERNOULLI), 5, [0.5, 0.55, 0.56, 0.6], 200, seed=0)
    assert [row.probability for row in result.rows] == [1.0, 1.0, 0.0, 0.0]


@mark.parametrize("seed", [0, 1])
@mark.parametrize("family", [f for f in Family if f is not Family.BERNOULLI])
def test_continuous_families_beat_bernoulli_past_threshold(family, seed):
    grid = [0.2, 0.5, 0.6, 0.8]
    result = experiments.prob_satisfy_decay(DistributionSpec(family), 5, grid, 2000, seed=seed)
    bernoulli = experiments.prob_satisfy_decay(DistributionSpec(Family.BERNOULLI), 5, grid, 2000, seed=seed)
    for row, floor in zip(result.rows, bernoulli.rows):
        assert row.probability >= floor.probability
    at_threshold = result.rows[2]
    assert at_threshold.k_mu == 0.6
    assert 5 <= at_threshold.successes < 2000


def test_runs_are_reproducible_across_worker_counts():
    specs = [DistributionSpec(Family.NORMAL), DistributionSpec(Family.LAPLACIAN)]
    grid = [0.2, 0.4, 0.6, 0.8]
    serial = experiments.run_experiment(4, grid, 300, seed=11, specs=specs, max_workers=1)
    threaded = experiments.run_experiment(4, grid, 300, seed=11, specs=specs, max_workers=4)
    again = experiments.run_experiment(4, grid, 300, seed=11, specs=specs, max_workers=4)
    assert serial.rows == threaded.rows == again.rows
    other = experiments.run_experiment(4, grid, 300, seed=12, specs=specs, max_workers=1)
    assert other.rows != serial.rows


def test_probability_lookup():
    result = experiments.prob_satisfy_decay(DistributionSpec(Family.UNIFORM), 3, [0.5], 100, seed=4)
    assert result.probability("uniform", 0.5) == result.rows[0].successes / 100
    with raises(KeyError):
        result.probability("normal", 0.5)


@mark.parametrize("kwargs", [dict(k=0), dict(trials=0), dict(k_mu_grid=[0.0]), dict(k_mu_grid=[1.5])])
def test_probability_run_parameter_checks(kwargs):
    args = dict(spec=DistributionSpec(Family.NORMAL), k=3, k_mu_grid=[0.5], trials=10, seed=0)
    args.update(kwargs)
    with raises(InvalidParameters):
        experiments.prob_satisfy_decay(**args)


# ----------------------
# Result files
# ----------------------

def test_empty_result_writes_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    experiments.emit_csv(ExperimentResult(k=5), path)
    assert path.read_text() == "k_mu,distribution,probability,trials,seed\n"


def test_csv_rows_are_ordered_and_formatted(tmp_path):
    result = ExperimentResult(k=5, rows=[
        ExperimentRow(0.4, "uniform", 1, 3, 0),
        ExperimentRow(0.2, "uniform", 3, 3, 0),
        ExperimentRow(0.4, "normal", 2, 3, 0),
    ])
    path = tmp_path / "rows.csv"
    experiments.emit_csv(result, path)
    assert path.read_text().splitlines() == [
        "k_mu,distribution,probability,trials,seed",
        "0.4,normal,0.666667,3,0",
        "0.2,uniform,1.000000,3,0",
        "0.4,uniform,0.333333,3,0",
    ]


def test_csv_output_is_byte_identical_across_runs(tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        result = experiments.run_experiment(3, [0.3, 0.9], 200, seed=5)
        experiments.emit_csv(result, tmp_path / name)
        paths.append(tmp_path / name)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_manifest_contents(tmp_path):
    specs = [DistributionSpec(Family.NORMAL, {"scale": 2.0})]
    manifest = experiments.build_manifest(5, [0.5, 1.0], 100, 9, specs)
    path = tmp_path / "run.json"
    experiments.write_manifest(manifest, path)
    loaded = json.loads(path.read_text())
    assert set(loaded) == {"k", "grid", "trials", "seed", "families", "parameters", "tool_version"}
    assert loaded["parameters"] == {"normal": {"scale": 2.0}}
    assert loaded["grid"] == [0.5, 1.0]


# ----------------------
# Guarantee validation
# ----------------------

def test_theorem2_guarantee_on_adversarial_dictionary():
    report = experiments.validate_guarantee("thm2", 4, 0.2, 30, seed=1, ratio_range=(3.0, 3.0))
    assert report.passed
    assert report.generated == 30 and report.failures == 0
    assert report.max_measured_coherence == approx(0.2, abs=1e-10)


GUARANTEE_CASES = {
    "thm1": dict(k=3, mu=0.18),
    "thm2": dict(k=3, mu=0.25),
    "thm3": dict(k=4, mu=0.2, p=2),
    "thm4": dict(k=2, mu=0.2, noise_budget=0.02, tail_l1=0.05),
    "thm5": dict(k=3, mu=0.25, noise_budget=0.05),
    "donoho": dict(k=3, mu=0.18, noise_budget=0.02),
}


@mark.parametrize("dictionary", ["adversarial", "random"])
@mark.parametrize("variant", list(Variant))
@mark.parametrize("theorem_id", list(GUARANTEE_CASES))
def test_certified_instances_never_fail(theorem_id, variant, dictionary):
    case = GUARANTEE_CASES[theorem_id]
    report = experiments.validate_guarantee(theorem_id, trials=500, seed=17, variant=variant,
                                            dictionary=dictionary, **case)
    assert report.failures == 0, report.failure_examples
    assert report.generated == 500
    assert report.max_measured_coherence <= case["mu"] + 1e-10
    assert report.to_dict()["dictionary"] == dictionary


@mark.parametrize("variant", list(Variant))
def test_partial_recovery_above_one_over_k(variant):
    # 1/k <= mu < 1/(g+r) with r = k-1; ratios above the constant factor 6
    report = experiments.validate_guarantee("thm3", 4, 0.3, 500, seed=8, variant=variant,
                                            dictionary="random", ratio_range=(7.0, 40.0))
    assert report.failures == 0, report.failure_examples
    assert report.generated == 500
    assert report.max_measured_coherence >= 0.25


def test_guarantee_argument_checks():
    with raises(InvalidParameters):
        experiments.validate_guarantee("lemma9", 3, 0.1, 5, seed=0)
    with raises(InvalidParameters):
        experiments.validate_guarantee("thm2", 3, 0.1, 5, seed=0, dictionary="fixed")
    with raises(NotApplicable):
        experiments.validate_guarantee("thm2", 3, 0.1, 5, seed=0, noise_budget=0.1)


def test_random_dictionary_respects_the_welch_bound():
    rng = np.random.default_rng(0)
    with raises(InfeasibleGeneration):
        experiments.random_dictionary(2, 3, 0.1, rng)
    d = experiments.random_dictionary(16, 6, 0.5, rng)
    assert d.coherence <= 0.5
