"""
Worst-case equiangular instances on which the decay conditions are tight.

Provides:
- build_gram(k, mu): (k+1)x(k+1) Gram target, unit diagonal and -mu elsewhere
- build_dictionary(k, mu): A = Lambda^{1/2} U^T realizing that Gram matrix
- worst_case_vector(k, j, mu, slack): coefficients meeting decay condition j with equality
- verify_lemma5(instance, Q, variant): exact projected correlations vs alpha_g / -mu_g
- demonstrate_converse_k / demonstrate_converse_j: replay OMP/OLS and confirm the ties
- strict_decay_positions(profile, mu): positions where the decay condition holds with room to spare

Atom indices are 0-based: the true support is 0..k-1 and atom k is the
impostor. The converse parameter j keeps its 1-based meaning, so the tie in
demonstrate_converse_j is between atoms j-1 and k.

Usage:
    from greedcert import adversarial
    report = adversarial.demonstrate_converse_j(3, 2, slack=1.1)
    report.to_dict()
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from greedcert import config
from greedcert.certificates import SignalProfile, alpha_g, certify_theorem2, decay_factor, mu_g
from greedcert.errors import CoherenceTooLarge, ConstructionFailed, InvalidCoherence, InvalidParameters
from greedcert.linalg import Dictionary, normalize_columns, projected_atoms
from greedcert.solvers import SolverConfig, Variant, run_oxx, select_next

logger = logging.getLogger(__name__)

VERDICT_CONFIRMED = "tie_confirmed"


@dataclass(frozen=True, eq=False)
class AdversarialInstance:
    k: int
    mu: float
    dictionary: Dictionary
    gram_target: np.ndarray
    worst_vector: Optional[np.ndarray] = None
    j: Optional[int] = None

    @property
    def support(self) -> tuple:
        return tuple(range(self.k))

    def with_worst_vector(self, j: int, slack: float = config.DEFAULT_SLACK) -> "AdversarialInstance":
        return replace(self, worst_vector=worst_case_vector(self.k, j, self.mu, slack), j=j)


@dataclass
class ConverseReport:
    k: int
    mu: float
    variant: Variant
    j: Optional[int] = None
    steps: List[dict] = field(default_factory=list)
    max_lemma5_deviation: float = 0.0
    verdict: str = VERDICT_CONFIRMED
    boundary_index: Optional[int] = None
    strict_positions: List[int] = field(default_factory=list)
    trace: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mu": self.mu,
            "j": self.j,
            "variant": self.variant.value,
            "steps": self.steps,
            "max_lemma5_deviation": self.max_lemma5_deviation,
            "boundary_index": self.boundary_index,
            "strict_positions": self.strict_positions,
            "verdict": self.verdict,
            "trace": self.trace,
        }


def _check_mu(k: int, mu: float) -> None:
    if k < 1:
        raise InvalidParameters("k must be positive")
    if not 0 < mu <= 1.0 / k:
        raise InvalidCoherence(f"mu={mu} outside (0, 1/k] for k={k}; the target is not a Gram matrix")


def build_gram(k: int, mu: float) -> np.ndarray:
    _check_mu(k, mu)
    n = k + 1
    gram = np.full((n, n), -float(mu))
    np.fill_diagonal(gram, 1.0)
    expected = np.sort(np.r_[1 - k * mu, np.full(k, 1 + mu)])
    eigenvalues = np.linalg.eigvalsh(gram)
    if np.max(np.abs(eigenvalues - expected)) > config.ORTHOGONALITY_TOL:
        raise ConstructionFailed(f"Gram spectrum {eigenvalues} differs from {expected}")
    return gram


def _eigenbasis(n: int) -> np.ndarray:
    """Normalized all-ones vector followed by a Gram-Schmidt completion of e_1..e_n."""
    columns = [np.ones(n) / np.sqrt(n)]
    for e in np.eye(n):
        v = e.copy()
        for _ in range(2):
            for u in columns:
                v -= (u @ v) * u
        norm = np.linalg.norm(v)
        if norm > config.RANK_TOL:
            columns.append(v / norm)
        if len(columns) == n:
            break
    return np.column_stack(columns)


def build_dictionary(k: int, mu: float) -> AdversarialInstance:
    gram = build_gram(k, mu)
    n = k + 1
    basis = _eigenbasis(n)
    # zero eigenvalue at mu = 1/k: the dictionary is kept in (k+1)-space with rank k
    spectrum = np.r_[max(1 - k * mu, 0.0), np.full(k, 1 + mu)]
    raw = np.sqrt(spectrum)[:, None] * basis.T
    d = normalize_columns(raw)
    deviation = float(np.max(np.abs(d.gram - gram)))
    if deviation > config.ORTHOGONALITY_TOL:
        raise ConstructionFailed(f"A^T A deviates from the target Gram matrix by {deviation:.3e}")
    logger.debug("adversarial dictionary k=%d mu=%.6g, Gram deviation %.2e", k, mu, deviation)
    return AdversarialInstance(k=k, mu=float(mu), dictionary=d, gram_target=gram)


def worst_case_vector(k: int, j: int, mu: float, slack: float = config.DEFAULT_SLACK) -> np.ndarray:
    """x^(j): ones on positions j+1..k, equality at j, slack-strict above (1-based positions)."""
    if not 1 <= j <= k - 1:
        raise InvalidParameters(f"j={j} must lie in 1..{k - 1}")
    if slack <= 1:
        raise InvalidParameters("slack must exceed 1")
    x = np.zeros(k + 1)
    x[j:k] = 1.0
    try:
        for i in range(j, 0, -1):
            value = decay_factor(i, k, 0, mu) * x[i]
            x[i - 1] = value if i == j else slack * value
    except CoherenceTooLarge as exc:
        raise InvalidParameters(f"mu={mu} too large for x^({j}): {exc}") from exc
    if np.any(np.diff(x[:k]) > 0):
        logger.warning("x^(%d) at mu=%.6g is not non-increasing: %s", j, mu, x)
    return x


def verify_lemma5(instance: AdversarialInstance, active_set: Sequence[int],
                  variant: Variant = Variant.OMP) -> dict:
    """Measured <c~_i, a~_i> and <c~_i, a~_j> against alpha_g and -mu_g."""
    variant = Variant(variant)
    state = projected_atoms(instance.dictionary, active_set)
    g = state.g
    if g > instance.k - 1:
        raise InvalidParameters(f"|Q|={g} exceeds k-1={instance.k - 1}")
    alpha = alpha_g(g, instance.mu, variant)
    cross = mu_g(g, instance.mu, variant)
    c_atoms = state.projected_atoms if variant is Variant.OMP else state.normalized_projected_atoms
    candidates = state.candidates()
    diag_dev = 0.0
    off_dev = 0.0
    for i in candidates:
        diag_dev = max(diag_dev, abs(float(c_atoms[i] @ state.projected_atoms[i]) - alpha))
        for other in candidates:
            if other != i:
                off_dev = max(off_dev, abs(float(c_atoms[i] @ state.projected_atoms[other]) + cross))
    return {
        "g": g,
        "variant": variant.value,
        "alpha_g": alpha,
        "mu_g": cross,
        "max_diagonal_deviation": diag_dev,
        "max_cross_deviation": off_dev,
        "max_deviation": max(diag_dev, off_dev),
        "passed": max(diag_dev, off_dev) <= config.LEMMA5_TOL,
    }


def _lemma5_sweep(instance: AdversarialInstance, variant: Variant) -> float:
    return max(verify_lemma5(instance, range(g), variant)["max_deviation"] for g in range(instance.k))


def _step_entry(g: int, active_set: Sequence[int], selection) -> dict:
    return {
        "g": g,
        "active_set": [int(i) for i in active_set],
        "tie_set": list(selection.tie_set),
        "scores": {str(i): s for i, s in sorted(selection.scores.items())},
        "signs": {str(i): int(np.sign(c)) for i, c in sorted(selection.correlations.items())},
    }


def _tie_holds(selection, first: int, second: int) -> bool:
    c1 = selection.correlations[first]
    c2 = selection.correlations[second]
    scale = max(1.0, abs(c1), abs(c2))
    return (
        first in selection.tie_set
        and second in selection.tie_set
        and abs(abs(c1) - abs(c2)) <= config.TIE_CHECK_TOL * scale
        and abs(c1 + c2) <= config.TIE_CHECK_TOL * scale
    )


def demonstrate_converse_k(k: int, coefficients: Optional[Sequence[float]] = None,
                           variant: Variant = Variant.OMP) -> ConverseReport:
    """At mu = 1/k, every set of k-1 correct selections leaves a tie with the impostor.

    Each true atom in turn is left out of the forced active set; the score of
    the remaining true atom must equal (with opposite sign) that of atom k.
    """
    variant = Variant(variant)
    if k < 1:
        raise InvalidParameters("k must be positive")
    instance = build_dictionary(k, 1.0 / k)
    d = instance.dictionary
    if coefficients is None:
        coefficients = np.arange(k, 0, -1, dtype=float)
    values = np.asarray(coefficients, dtype=float).reshape(-1)
    if values.shape[0] != k or np.any(values == 0):
        raise InvalidParameters("coefficients must be k non-zero values")
    x = np.zeros(k + 1)
    x[:k] = values
    y = d.atoms @ x
    report = ConverseReport(k=k, mu=instance.mu, variant=variant)
    report.max_lemma5_deviation = _lemma5_sweep(instance, variant)
    report.trace = run_oxx(d, y, SolverConfig(variant, max_iterations=k)).to_dict()
    for left_out in range(k):
        active = [i for i in range(k) if i != left_out]
        state = projected_atoms(d, active, y=y)
        selection = select_next(state, variant)
        report.steps.append(_step_entry(k - 1, active, selection))
        if not _tie_holds(selection, left_out, k):
            report.verdict = "no_tie"
            raise ConstructionFailed(
                f"no tie between atoms {left_out} and {k} at mu=1/{k}", report=report.to_dict()
            )
    logger.info("converse k=%d confirmed (%s), projected correlation deviation %.2e",
                k, variant.value, report.max_lemma5_deviation)
    return report


def strict_decay_positions(profile: SignalProfile, mu: float) -> List[int]:
    """1-based positions i with |x_i| > decay_factor(i) |x_{i+1}| clear of the boundary tolerance."""
    k = profile.k
    positions = []
    for i in range(1, k):
        lhs = profile.magnitude(i)
        rhs = decay_factor(i, k, 0, mu) * profile.magnitude(i + 1)
        if lhs > rhs and lhs - rhs > config.BOUNDARY_RTOL * max(lhs, rhs):
            positions.append(i)
    return positions


def demonstrate_converse_j(k: int, j: int, slack: float = config.DEFAULT_SLACK,
                           variant: Variant = Variant.OMP) -> ConverseReport:
    """At mu = 1/(2k-j) on x^(j): unique correct steps before j, then a tie.

    Steps 1..j-1 (1-based) must each select atom g uniquely; step j must tie
    atom j-1 with atom k with opposite signs; the decay certificate must fail
    on the boundary exactly at position j and hold strictly everywhere else.
    """
    variant = Variant(variant)
    if k < 2 or not 1 <= j <= k - 1:
        raise InvalidParameters(f"need k >= 2 and 1 <= j <= k-1, got k={k}, j={j}")
    mu = 1.0 / (2 * k - j)
    instance = build_dictionary(k, mu).with_worst_vector(j, slack)
    d = instance.dictionary
    y = d.atoms @ instance.worst_vector
    report = ConverseReport(k=k, mu=mu, variant=variant, j=j)
    report.max_lemma5_deviation = _lemma5_sweep(instance, variant)
    trace = run_oxx(d, y, SolverConfig(variant, max_iterations=j))
    report.trace = trace.to_dict()

    def fail(message: str):
        report.verdict = "failed"
        raise ConstructionFailed(message, report=report.to_dict())

    active: List[int] = []
    for g in range(j):
        state = projected_atoms(d, active, y=y)
        selection = select_next(state, variant)
        report.steps.append(_step_entry(g, active, selection))
        if g < j - 1:
            if selection.tie_set != (g,):
                fail(f"step {g + 1}: expected unique selection of atom {g}, got ties {selection.tie_set}")
        elif not _tie_holds(selection, j - 1, k):
            fail(f"step {j}: atoms {j - 1} and {k} do not tie")
        active.append(selection.selected)

    profile = SignalProfile.from_values(instance.worst_vector[:k], k=k)
    verdict, _, _ = certify_theorem2(profile, mu)
    report.boundary_index = verdict.binding_index if verdict.boundary else None
    if verdict.passed or report.boundary_index != j:
        fail(f"decay certificate should sit on the boundary at i={j}, got {verdict}")
    report.strict_positions = strict_decay_positions(profile, mu)
    loose = sorted(set(range(1, k)) - {j} - set(report.strict_positions))
    if loose:
        fail(f"decay condition should hold strictly away from i={j}; positions {loose} do not")
    logger.info("converse k=%d j=%d confirmed (%s, slack %.3g)", k, j, variant.value, slack)
    return report


def score_ratio(instance: AdversarialInstance, active_set: Sequence[int], y) -> Dict[int, float]:
    """OLS score divided by OMP score per candidate; 1/sqrt(alpha_g) on these instances."""
    state = projected_atoms(instance.dictionary, active_set, y=y)
    omp = select_next(state, Variant.OMP).scores
    ols = select_next(state, Variant.OLS).scores
    return {i: ols[i] / omp[i] for i in omp if omp[i] > 0}
