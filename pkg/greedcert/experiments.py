"""
Monte-Carlo and sweep harness.

Provides:
- decay_constraint_curve(k, mu_list): decay factors per (mu, i), as a DataFrame
- prob_satisfy_decay(spec, k, grid, trials, seed): empirical probability that
  random coefficients meet the noiseless decay condition, per grid point
- run_experiment(...): the same over several coefficient families
- validate_guarantee(theorem_id, k, mu, trials, seed, variant): certified random
  instances replayed through OMP/OLS; every failure is counted
- emit_csv / build_manifest / write_manifest for result files

Random streams: grid point q of family f draws every trial from one
Generator seeded with SeedSequence(seed, spawn_key=(f, q)); trial t is row
t of that block. Grid points run on a thread pool and are reduced in grid
order, so results never depend on scheduling.

Usage:
    from greedcert.experiments import DistributionSpec, Family, prob_satisfy_decay
    result = prob_satisfy_decay(DistributionSpec(Family.NORMAL), 5, [0.5], 2000, seed=7)
    result.to_frame()
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from greedcert import config
from greedcert.adversarial import build_dictionary
from greedcert.certificates import (
    SignalProfile,
    Verdict,
    certify_donoho_baseline,
    certify_theorem1,
    certify_theorem2,
    certify_theorem3,
    certify_theorem4,
    certify_theorem5,
    decay_factor,
)
from greedcert.errors import (
    InfeasibleGeneration,
    InvalidCoherence,
    InvalidParameters,
    NotApplicable,
    ResultIOError,
)
from greedcert.fileio import write_json
from greedcert.linalg import Dictionary, normalize_columns, welch_bound
from greedcert.solvers import SolverConfig, Variant, k_step_success, partial_success, run_oxx

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["k_mu", "distribution", "probability", "trials", "seed"]


class Family(str, Enum):
    BERNOULLI = "bernoulli"
    UNIFORM = "uniform"
    NORMAL = "normal"
    LAPLACIAN = "laplacian"
    LOGLOGISTIC = "loglogistic"


FAMILY_ORDER = tuple(Family)

DEFAULT_PARAMETERS: Dict[Family, Dict[str, float]] = {
    Family.BERNOULLI: {},
    Family.UNIFORM: {"half_width": 1.0},
    Family.NORMAL: {"scale": 1.0},
    Family.LAPLACIAN: {"scale": 1.0},
    Family.LOGLOGISTIC: {"shape": 1.0, "scale": 1.0},
}


@dataclass(frozen=True)
class DistributionSpec:
    """Coefficient family plus its parameters; missing ones take unit defaults."""

    family: Family
    parameters: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        family = Family(self.family)
        merged = dict(DEFAULT_PARAMETERS[family])
        unknown = set(self.parameters) - set(merged)
        if unknown:
            raise InvalidParameters(f"unknown parameters {sorted(unknown)} for {family.value}")
        merged.update({name: float(v) for name, v in self.parameters.items()})
        if any(not v > 0 for v in merged.values()):
            raise InvalidParameters(f"{family.value} parameters must be strictly positive: {merged}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "parameters", merged)

    @property
    def index(self) -> int:
        return FAMILY_ORDER.index(self.family)


@dataclass(frozen=True)
class ExperimentRow:
    k_mu: float
    distribution: str
    successes: int
    trials: int
    seed: int

    @property
    def probability(self) -> float:
        return self.successes / self.trials


@dataclass
class ExperimentResult:
    k: int
    rows: List[ExperimentRow] = field(default_factory=list)

    def extend(self, other: "ExperimentResult") -> None:
        self.rows.extend(other.rows)

    def to_frame(self) -> pd.DataFrame:
        records = [
            {"k_mu": r.k_mu, "distribution": r.distribution, "probability": r.probability,
             "trials": r.trials, "seed": r.seed}
            for r in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)

    def probability(self, distribution: str, k_mu: float) -> float:
        for row in self.rows:
            if row.distribution == distribution and row.k_mu == k_mu:
                return row.probability
        raise KeyError((distribution, k_mu))


# ----------------------
# Sampling
# ----------------------

def _draw(spec: DistributionSpec, rng: np.random.Generator, shape) -> np.ndarray:
    params = spec.parameters
    if spec.family is Family.BERNOULLI:
        return rng.choice(np.array([-1.0, 1.0]), size=shape)
    if spec.family is Family.UNIFORM:
        width = params["half_width"]
        return rng.uniform(-width, width, size=shape)
    if spec.family is Family.NORMAL:
        return rng.normal(0.0, params["scale"], size=shape)
    if spec.family is Family.LAPLACIAN:
        return rng.laplace(0.0, params["scale"], size=shape)
    # log-logistic is one-sided: magnitude from scipy's fisk, sign drawn separately
    magnitude = stats.fisk(c=params["shape"], scale=params["scale"]).rvs(size=shape, random_state=rng)
    return magnitude * rng.choice(np.array([-1.0, 1.0]), size=shape)


def _draw_nonzero(spec: DistributionSpec, rng: np.random.Generator, shape) -> np.ndarray:
    values = np.asarray(_draw(spec, rng, shape), dtype=float)
    zeros = values == 0
    while np.any(zeros):
        values[zeros] = _draw(spec, rng, int(zeros.sum()))
        zeros = values == 0
    return values


def sample_coefficients(spec: DistributionSpec, k: int, stream: np.random.Generator) -> np.ndarray:
    """k independent non-zero draws from `spec`."""
    if k < 1:
        raise InvalidParameters("k must be positive")
    return _draw_nonzero(spec, stream, k)


def stream_for(seed: int, family_index: int, grid_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(family_index, grid_index)))


# ----------------------
# Decay condition
# ----------------------

def satisfies_decay(values, mu: float) -> np.ndarray:
    """Noiseless decay condition, strict, for every row of `values` (last axis = k).

    Magnitudes are taken and sorted inside; a k = 1 row always satisfies it.
    """
    block = np.sort(np.abs(np.asarray(values, dtype=float)), axis=-1)[..., ::-1]
    k = block.shape[-1]
    ok = np.ones(block.shape[:-1], dtype=bool)
    for i in range(1, k):
        ok &= block[..., i - 1] > decay_factor(i, k, 0, mu) * block[..., i]
    return ok


def decay_constraint_curve(k: int, mu_list: Sequence[float]) -> pd.DataFrame:
    rows = []
    for mu in mu_list:
        if not 0 < mu <= 1.0 / k:
            raise InvalidCoherence(f"mu={mu} outside (0, 1/{k}]")
        for i in range(1, k):
            rows.append({"mu": float(mu), "i": i, "factor": decay_factor(i, k, 0, mu)})
    return pd.DataFrame.from_records(rows, columns=["mu", "i", "factor"])


def landmark_coherences(k: int) -> str:
    """1/(2k), 1/(2k-1), 1/(k+1) and 1/k as comma-separated text that parses back exactly."""
    if k < 1:
        raise InvalidParameters("k must be positive")
    return ", ".join(repr(1.0 / d) for d in (2 * k, 2 * k - 1, k + 1, k))


def default_grid(points: int = config.DEFAULT_GRID_POINTS) -> List[float]:
    if points < 1:
        raise InvalidParameters("grid needs at least one point")
    return [q / points for q in range(1, points + 1)]


def _count_successes(spec: DistributionSpec, k: int, k_mu: float, trials: int,
                     seed: int, grid_index: int) -> int:
    rng = stream_for(seed, spec.index, grid_index)
    block = _draw_nonzero(spec, rng, (trials, k))
    return int(satisfies_decay(block, k_mu / k).sum())


def prob_satisfy_decay(spec: DistributionSpec, k: int, k_mu_grid: Sequence[float], trials: int,
                       seed: int, max_workers: Optional[int] = None) -> ExperimentResult:
    if k < 1:
        raise InvalidParameters("k must be positive")
    if trials < 1:
        raise InvalidParameters("trials must be positive")
    grid = [float(v) for v in k_mu_grid]
    if any(not 0 < v <= 1 for v in grid):
        raise InvalidParameters("grid values must lie in (0, 1]")
    workers = max_workers if max_workers is not None else config.get_thread_cap()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        counts = list(pool.map(
            lambda item: _count_successes(spec, k, item[1], trials, seed, item[0]),
            enumerate(grid),
        ))
    rows = [ExperimentRow(k_mu, spec.family.value, count, trials, seed) for k_mu, count in zip(grid, counts)]
    logger.info("%s k=%d: %d grid points x %d trials", spec.family.value, k, len(grid), trials)
    return ExperimentResult(k=k, rows=rows)


def run_experiment(k: int = config.DEFAULT_K, grid: Optional[Sequence[float]] = None,
                   trials: int = config.DEFAULT_TRIALS, seed: int = 0,
                   specs: Optional[Sequence[DistributionSpec]] = None,
                   max_workers: Optional[int] = None) -> ExperimentResult:
    """Probability curves for every family (all five by default)."""
    grid = default_grid() if grid is None else list(grid)
    specs = [DistributionSpec(f) for f in FAMILY_ORDER] if specs is None else list(specs)
    result = ExperimentResult(k=k)
    for spec in specs:
        result.extend(prob_satisfy_decay(spec, k, grid, trials, seed, max_workers=max_workers))
    return result


# ----------------------
# Result files
# ----------------------

def emit_csv(result: ExperimentResult, path) -> None:
    frame = result.to_frame().sort_values(["distribution", "k_mu"], kind="mergesort")
    frame["probability"] = frame["probability"].map("{:.6f}".format)
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as exc:
        raise ResultIOError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %d rows to %s", len(frame), path)


def build_manifest(k: int, grid: Sequence[float], trials: int, seed: int,
                   specs: Sequence[DistributionSpec]) -> dict:
    return {
        "k": k,
        "grid": [float(v) for v in grid],
        "trials": trials,
        "seed": seed,
        "families": [s.family.value for s in specs],
        "parameters": {s.family.value: dict(s.parameters) for s in specs},
        "tool_version": config.TOOL_VERSION,
    }


def write_manifest(manifest: dict, path) -> None:
    write_json(path, manifest)


# ----------------------
# Guarantee validation
# ----------------------

GUARANTEE_IDS = ("thm1", "thm2", "thm3", "thm4", "thm5", "donoho")
NOISELESS_IDS = ("thm1", "thm2", "thm3")


@dataclass
class GuaranteeReport:
    theorem_id: str
    k: int
    mu: float
    variant: Variant
    dictionary_kind: str
    seed: int
    trials: int
    generated: int = 0
    failures: int = 0
    infeasible: int = 0
    max_measured_coherence: float = 0.0
    failure_examples: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.generated > 0 and self.failures == 0

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "k": self.k,
            "mu": self.mu,
            "variant": self.variant.value,
            "dictionary": self.dictionary_kind,
            "seed": self.seed,
            "trials": self.trials,
            "generated": self.generated,
            "failures": self.failures,
            "infeasible": self.infeasible,
            "max_measured_coherence": self.max_measured_coherence,
            "passed": self.passed,
            "failure_examples": self.failure_examples,
        }


def random_dictionary(m: int, n: int, mu_target: float, rng: np.random.Generator,
                      budget: int = config.GENERATION_BUDGET) -> Dictionary:
    """Gaussian unit columns, each redrawn until its coherence with the kept ones is <= mu_target."""
    if m > config.MAX_RANDOM_ROWS or n > config.MAX_RANDOM_COLUMNS:
        raise InvalidParameters(f"random dictionaries are limited to {config.MAX_RANDOM_ROWS}x{config.MAX_RANDOM_COLUMNS}")
    if n > m and welch_bound(m, n) > mu_target:
        raise InfeasibleGeneration(f"coherence {mu_target} is below the Welch bound for {m}x{n}")
    columns = np.zeros((m, 0))
    for _ in range(n):
        for _attempt in range(budget):
            v = rng.standard_normal(m)
            v /= np.linalg.norm(v)
            if columns.shape[1] == 0 or np.max(np.abs(columns.T @ v)) <= mu_target:
                columns = np.column_stack([columns, v])
                break
        else:
            raise InfeasibleGeneration(
                f"no column with coherence <= {mu_target} after {budget} draws ({columns.shape[1]} kept)"
            )
    return normalize_columns(columns)


def _head_magnitudes(k: int, rng: np.random.Generator, ratio_range: Tuple[float, float]) -> np.ndarray:
    lo, hi = ratio_range
    ratios = np.exp(rng.uniform(math.log(lo), math.log(hi), size=k - 1))
    # x_k = 1, x_i = r_i x_{i+1}
    return np.r_[np.cumprod(ratios[::-1])[::-1], 1.0]


def _tail_coefficients(count: int, tail_l1: float, rng: np.random.Generator) -> np.ndarray:
    if count == 0 or tail_l1 == 0:
        return np.zeros(count)
    raw = rng.standard_normal(count)
    return tail_l1 * raw / np.abs(raw).sum()


def _sphere(m: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    if radius == 0:
        return np.zeros(m)
    w = rng.standard_normal(m)
    return radius * w / np.linalg.norm(w)


def _thm3_params(k: int, mu: float, p: Optional[int], r: Optional[int]) -> Tuple[int, int, int]:
    """(p, r, step limit) for partial recovery checks from an empty start."""
    default = k if mu * k < 1 else k - 1
    r = default if r is None else r
    p = r if p is None else p
    limit = k if mu * k < 1 else r
    return p, r, limit


def _certify(theorem_id: str, profile: SignalProfile, mu: float, variant: Variant,
             p: int, r: int) -> Verdict:
    if theorem_id == "thm1":
        return certify_theorem1(profile, mu)[0]
    if theorem_id == "thm2":
        return certify_theorem2(profile, mu)[0]
    if theorem_id == "thm3":
        return certify_theorem3(profile, mu, p, r)
    if theorem_id == "thm4":
        return certify_theorem4(profile, mu)
    if theorem_id == "donoho":
        return certify_donoho_baseline(profile, mu)
    return certify_theorem5(profile, mu, variant)


def validate_guarantee(theorem_id: str, k: int, mu: float, trials: int, seed: int,
                       variant: Variant = Variant.OMP, dictionary: str = "adversarial",
                       noise_budget: float = 0.0, tail_l1: float = 0.0,
                       p: Optional[int] = None, r: Optional[int] = None,
                       ratio_range: Tuple[float, float] = config.DEFAULT_RATIO_RANGE,
                       budget: int = config.GENERATION_BUDGET) -> GuaranteeReport:
    """Replay certified instances through OMP/OLS and count selection failures.

    Certificates are evaluated at the generated dictionary's measured
    coherence. Coefficients are redrawn until the certificate passes; a trial
    that exhausts `budget` draws is counted as infeasible. Raises
    InfeasibleGeneration only when no trial could be generated at all.
    """
    variant = Variant(variant)
    if theorem_id not in GUARANTEE_IDS:
        raise InvalidParameters(f"unknown theorem id {theorem_id!r}; expected one of {GUARANTEE_IDS}")
    if dictionary not in ("adversarial", "random"):
        raise InvalidParameters("dictionary must be 'adversarial' or 'random'")
    if theorem_id in NOISELESS_IDS and (noise_budget > 0 or tail_l1 > 0):
        raise NotApplicable(f"{theorem_id} covers noiseless exactly sparse signals only")
    if trials < 1 or k < 1:
        raise InvalidParameters("k and trials must be positive")
    p, r, limit = _thm3_params(k, mu, p, r)
    rng = np.random.default_rng(seed)
    fixed = build_dictionary(k, mu).dictionary if dictionary == "adversarial" else None
    report = GuaranteeReport(theorem_id, k, mu, variant, dictionary, seed, trials)

    for trial in range(trials):
        try:
            d = fixed if fixed is not None else random_dictionary(config.MAX_RANDOM_ROWS, 2 * k, mu, rng, budget)
            mu_hat = d.coherence
            support = np.sort(rng.choice(d.n, size=k, replace=False))
            off_support = np.setdiff1d(np.arange(d.n), support)
            for _attempt in range(budget):
                head = _head_magnitudes(k, rng, ratio_range)
                tail = _tail_coefficients(len(off_support), tail_l1, rng)
                profile = SignalProfile(tuple(head), k, float(np.abs(tail).sum()), noise_budget)
                if _certify(theorem_id, profile, mu_hat, variant, p, r).passed:
                    break
            else:
                raise InfeasibleGeneration(f"no certified coefficients after {budget} draws")
        except InfeasibleGeneration as exc:
            report.infeasible += 1
            logger.debug("trial %d infeasible: %s", trial, exc)
            continue

        x = np.zeros(d.n)
        order = rng.permutation(k)
        x[support[order]] = head * rng.choice(np.array([-1.0, 1.0]), size=k)
        x[off_support] = tail
        y = d.atoms @ x + _sphere(d.m, noise_budget, rng)
        trace = run_oxx(d, y, SolverConfig(variant, max_iterations=k))
        if theorem_id == "thm3":
            priority = support[order[:p]]
            ok = partial_success(trace, support, priority, max_steps=limit)
        else:
            ok = k_step_success(trace, support)
        report.generated += 1
        report.max_measured_coherence = max(report.max_measured_coherence, mu_hat)
        if not ok:
            report.failures += 1
            if len(report.failure_examples) < 5:
                report.failure_examples.append({
                    "trial": trial,
                    "support": support.tolist(),
                    "coefficients": x.tolist(),
                    "selected": list(trace.selected),
                })
            logger.warning("%s trial %d: selections %s leave support %s",
                           theorem_id, trial, trace.selected, support.tolist())

    if report.generated == 0:
        raise InfeasibleGeneration(
            f"{theorem_id}: no certified instance at k={k}, mu={mu} in {trials} trials"
        )
    logger.info("%s (%s, %s dictionary): %d instances, %d failures, %d infeasible",
                theorem_id, variant.value, dictionary, report.generated, report.failures, report.infeasible)
    return report
