"""
Coherence-and-decay recovery certificates for OMP / OLS.

Each checker is a pure function of (k, mu, signal profile) and returns a
Verdict: whether the sufficient condition holds, which inequality binds,
and, for conditions that admit one, the coherence budget mu* such that the
condition holds iff mu < mu*.

Conventions:
- head magnitudes are sorted non-increasing and strictly positive
- inequality positions i are 1-based, matching x_1 >= x_2 >= ... >= x_k
- x_{k+1} is taken as 0; it only ever meets a zero decay factor
- every inequality is strict; two sides equal up to BOUNDARY_RTOL count as
  a failure and raise the `boundary` flag
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from greedcert import config
from greedcert.errors import (
    CoherenceTooLarge,
    InvalidIndex,
    InvalidParameters,
    NotApplicable,
)
from greedcert.solvers import Variant

logger = logging.getLogger(__name__)

THEOREM_IDS = (
    "uniform",
    "uniform_termination",
    "thm1",
    "thm2",
    "thm3",
    "thm4",
    "donoho",
    "thm5",
    "lemma4_step",
)


@dataclass(frozen=True)
class SignalProfile:
    """Sorted head magnitudes of a (possibly compressible, noisy) signal.

    With selected_prefix = g > 0 the head holds the k - g magnitudes of the
    atoms not selected yet, re-sorted on their own.
    """

    head_magnitudes: Tuple[float, ...]
    k: int
    tail_l1: float = 0.0
    noise_budget: float = 0.0
    selected_prefix: int = 0

    def __post_init__(self):
        head = tuple(float(v) for v in self.head_magnitudes)
        object.__setattr__(self, "head_magnitudes", head)
        if self.k < 1:
            raise InvalidParameters("k must be positive")
        if not 0 <= self.selected_prefix < self.k:
            raise InvalidParameters(f"selected_prefix must lie in [0, {self.k - 1}]")
        if len(head) != self.k - self.selected_prefix:
            raise InvalidParameters(
                f"expected {self.k - self.selected_prefix} head magnitudes, got {len(head)}"
            )
        if any(not math.isfinite(v) or v <= 0 for v in head):
            raise InvalidParameters("head magnitudes must be finite and strictly positive")
        if any(a < b for a, b in zip(head, head[1:])):
            raise InvalidParameters("head magnitudes must be sorted non-increasing")
        if self.tail_l1 < 0 or self.noise_budget < 0:
            raise InvalidParameters("tail_l1 and noise_budget must be non-negative")

    @classmethod
    def from_values(cls, values: Iterable[float], k: Optional[int] = None, tail_l1: float = 0.0,
                    noise_budget: float = 0.0, selected_prefix: int = 0) -> "SignalProfile":
        """Build from raw coefficients: magnitudes are taken and sorted."""
        raw = [abs(float(v)) for v in values]
        head = sorted(raw, reverse=True)
        if head != raw:
            logger.warning("head magnitudes were not sorted; re-ordered to %s", head)
        if k is None:
            k = len(head) + selected_prefix
        return cls(tuple(head), k, tail_l1, noise_budget, selected_prefix)

    def magnitude(self, i: int) -> float:
        """|x_i| for 1-based i; 0 past the end of the head."""
        if i < 1:
            raise InvalidIndex(f"position {i} must be >= 1")
        if i > len(self.head_magnitudes):
            return 0.0
        return self.head_magnitudes[i - 1]

    @property
    def is_noiseless_sparse(self) -> bool:
        return self.tail_l1 == 0 and self.noise_budget == 0

    @property
    def is_flat(self) -> bool:
        return self.head_magnitudes[0] == self.head_magnitudes[-1]

    def remaining(self, g: int) -> "SignalProfile":
        """Profile of the unselected atoms once the g largest were selected."""
        if self.selected_prefix != 0:
            raise InvalidParameters("remaining() expects a full head")
        return SignalProfile(self.head_magnitudes[g:], self.k, self.tail_l1, self.noise_budget, g)

    def scaled(self, c: float) -> "SignalProfile":
        return replace(
            self,
            head_magnitudes=tuple(c * v for v in self.head_magnitudes),
            tail_l1=c * self.tail_l1,
            noise_budget=c * self.noise_budget,
        )


@dataclass(frozen=True)
class Verdict:
    passed: bool
    binding_index: Optional[int] = None
    mu_star: Optional[float] = None
    boundary: bool = False
    branch: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "binding_index": self.binding_index,
            "mu_star": self.mu_star,
            "boundary": self.boundary,
            "branch": self.branch,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class CertificateReport:
    k: int
    mu: float
    variant: Variant
    verdicts: Dict[str, Verdict]
    quantities: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mu": self.mu,
            "variant": self.variant.value,
            "certificates": {tid: v.to_dict() for tid, v in self.verdicts.items()},
            "quantities": self.quantities,
        }


# ----------------------
# Lemma-level quantities
# ----------------------

def _inverse(g: int) -> float:
    return math.inf if g == 0 else 1.0 / g


def _require_below(mu: float, g: int, what: str) -> None:
    if g > 0 and mu * g >= 1:
        raise CoherenceTooLarge(mu, 1.0 / g, what)


def alpha_g(g: int, mu: float, variant: Variant = Variant.OMP) -> float:
    """Lower bound on <c~_i, a~_i> after g correct selections."""
    if g < 0:
        raise InvalidIndex("g must be non-negative")
    _require_below(mu, g, f"alpha_{g}")
    value = (mu + 1) * (1 - g * mu) / (1 - (g - 1) * mu)
    return math.sqrt(value) if Variant(variant) is Variant.OLS else value


def mu_g(g: int, mu: float, variant: Variant = Variant.OMP) -> float:
    """Upper bound on |<c~_i, a~_j>|, i != j, after g correct selections."""
    alpha = alpha_g(g, mu, variant)
    return min(1.0, mu / (1 - g * mu) * alpha)


def gamma_k(k: int, mu: float, variant: Variant = Variant.OMP) -> float:
    """Noise amplification constant of the noisy decay condition."""
    if k < 1:
        raise InvalidParameters("k must be positive")
    if mu * k >= 1:
        raise CoherenceTooLarge(mu, 1.0 / k, f"gamma_{k}")
    if Variant(variant) is Variant.OLS:
        return math.sqrt((1 - (k - 2) * mu) / (mu + 1)) * math.sqrt(1 - (k - 1) * mu) / (1 - k * mu)
    return (1 - (k - 2) * mu) / ((mu + 1) * (1 - k * mu))


def decay_factor(i: int, k: int, g: int, mu: float) -> float:
    """2 mu (k-g-i) / (1 - (g+i) mu): ratio |x_i| must beat against |x_{i+1}|."""
    if g < 0 or g >= k:
        raise InvalidIndex(f"g={g} must lie in [0, {k - 1}]")
    if i < 1 or i > k - g:
        raise InvalidIndex(f"position {i} outside 1..{k - g}")
    if i == k - g:
        return 0.0
    if mu * (g + i) >= 1:
        raise CoherenceTooLarge(mu, 1.0 / (g + i), "decay factor")
    return 2 * mu * (k - g - i) / (1 - (g + i) * mu)


# ----------------------
# Inequality bookkeeping
# ----------------------

def _is_boundary(lhs: float, rhs: float) -> bool:
    return abs(lhs - rhs) <= config.BOUNDARY_RTOL * max(abs(lhs), abs(rhs))


def _check_family(terms: Sequence[Tuple[int, float, float]], **extra) -> Verdict:
    """Evaluate lhs_i > rhs_i for every (i, lhs, rhs).

    On failure the first failing position binds; on success the position with
    the largest rhs/lhs ratio does.
    """
    binding = None
    worst = -math.inf
    for i, lhs, rhs in terms:
        boundary = _is_boundary(lhs, rhs)
        if boundary or not lhs > rhs:
            reason = "boundary equality" if boundary else "inequality violated"
            return Verdict(False, binding_index=i, boundary=boundary, reason=f"{reason} at i={i}", **extra)
        ratio = rhs / lhs
        if ratio > worst:
            worst, binding = ratio, i
    return Verdict(True, binding_index=binding, **extra)


def _require_sparse_noiseless(profile: SignalProfile, what: str) -> None:
    if not profile.is_noiseless_sparse:
        raise NotApplicable(f"{what} covers noiseless exactly sparse signals only")


def _require_full_head(profile: SignalProfile, what: str) -> None:
    if profile.selected_prefix != 0:
        raise InvalidParameters(f"{what} expects the full head (selected_prefix = 0)")


# ----------------------
# Uniform conditions
# ----------------------

def certify_uniform(k: int, mu: float) -> Verdict:
    if k < 1:
        raise InvalidParameters("k must be positive")
    budget = 1.0 / (2 * k - 1)
    passed = mu < budget
    return Verdict(passed, mu_star=budget, boundary=mu == budget,
                   reason="" if passed else "coherence at or above 1/(2k-1)")


def certify_uniform_termination(k: int, g: int, mu: float) -> Verdict:
    if not 0 <= g < k:
        raise InvalidParameters(f"g={g} must lie in [0, {k - 1}]")
    budget = 1.0 / (2 * k - g - 1)
    passed = mu < budget
    return Verdict(passed, mu_star=budget, boundary=mu == budget,
                   reason="" if passed else "coherence at or above 1/(2k-g-1)")


# ----------------------
# Decay-aware theorems
# ----------------------

def rho(profile: SignalProfile) -> float:
    """||x_head||_inf / ||x_head||_1."""
    head = profile.head_magnitudes
    return head[0] / math.fsum(head)


def certify_theorem1(profile: SignalProfile, mu: float) -> Tuple[Verdict, float]:
    """First step from the l_inf/l_1 ratio, later steps from 1/(2k-2)."""
    _require_sparse_noiseless(profile, "thm1")
    _require_full_head(profile, "thm1")
    if profile.k < 2:
        raise InvalidParameters("thm1 needs k >= 2")
    r = rho(profile)
    budget = min(r / (2 - r), 1.0 / (2 * profile.k - 2))
    passed = mu < budget
    verdict = Verdict(passed, mu_star=budget, boundary=mu == budget,
                      reason="" if passed else "coherence at or above mu*")
    return verdict, budget


def mu_i_star(profile: SignalProfile) -> Tuple[float, ...]:
    """Per-position budgets r_i / (2(k-g-i) + (g+i) r_i), r_i = |x_i|/|x_{i+1}|."""
    k, g = profile.k, profile.selected_prefix
    budgets = []
    for i in range(1, k - g):
        ratio = profile.magnitude(i) / profile.magnitude(i + 1)
        budgets.append(ratio / (2 * (k - g - i) + (g + i) * ratio))
    return tuple(budgets)


def mu_star_termination(profile: SignalProfile) -> float:
    """min(1/k, mu_1*, ..., mu_{k-g-1}*) over the unselected head."""
    return min((1.0 / profile.k,) + mu_i_star(profile))


def certify_theorem2(profile: SignalProfile, mu: float) -> Tuple[Verdict, Tuple[float, ...], float]:
    """mu < 1/k and |x_i| > decay_factor(i) |x_{i+1}| for i = 1..k-1."""
    _require_sparse_noiseless(profile, "thm2")
    _require_full_head(profile, "thm2")
    k = profile.k
    budgets = mu_i_star(profile)
    budget = min((1.0 / k,) + budgets)
    if mu * k >= 1:
        verdict = Verdict(False, mu_star=budget, boundary=mu * k == 1, reason="coherence at or above 1/k")
        return verdict, budgets, budget
    terms = [(i, profile.magnitude(i), decay_factor(i, k, 0, mu) * profile.magnitude(i + 1))
             for i in range(1, k)]
    return _check_family(terms, mu_star=budget), budgets, budget


def certify_corollary1(profile: SignalProfile, mu: float) -> Verdict:
    _require_sparse_noiseless(profile, "certify_corollary1")
    _require_full_head(profile, "certify_corollary1")
    k = profile.k
    if mu * k >= 1:
        return Verdict(False, mu_star=1.0 / k, reason="coherence at or above 1/k")
    terms = [(i, profile.magnitude(i), 2 * profile.magnitude(i + 1)) for i in range(1, k)]
    return _check_family(terms, mu_star=1.0 / k)


def certify_theorem3(profile: SignalProfile, mu: float, p: int, r: int) -> Verdict:
    """Partial recovery / successful termination after g = selected_prefix correct steps.

    Branch 1: mu < 1/k with position-dependent factors over i = 1..p.
    Branch 2: 1/k <= mu < 1/(g+r) with the constant factor at position r.
    """
    _require_sparse_noiseless(profile, "thm3")
    k, g = profile.k, profile.selected_prefix
    if not 1 <= p <= r <= k - g:
        raise InvalidParameters(f"need 1 <= p <= r <= k-g, got p={p}, r={r}, k-g={k - g}")
    if mu * k < 1:
        terms = [(i, profile.magnitude(i), decay_factor(i, k, g, mu) * profile.magnitude(i + 1))
                 for i in range(1, p + 1)]
        return _check_family(terms, branch=1)
    if mu * (g + r) < 1:
        factor = decay_factor(r, k, g, mu)
        terms = [(i, profile.magnitude(i), factor * profile.magnitude(i + 1)) for i in range(1, p + 1)]
        return _check_family(terms, branch=2)
    return Verdict(False, reason="coherence at or above both 1/k and 1/(g+r)")


def certify_corollary2(profile: SignalProfile, mu: float, p: int) -> Verdict:
    """First p selections lie in the support when mu < 1/p and the p+1 largest decay."""
    _require_full_head(profile, "certify_corollary2")
    if mu * p >= 1:
        return Verdict(False, mu_star=1.0 / p, reason="coherence at or above 1/p")
    return certify_theorem3(profile, mu, p, p)


def certify_corollary3(profile: SignalProfile, mu: float, p: int) -> Verdict:
    """The p largest entries are among the first k selections when mu < 1/k."""
    _require_full_head(profile, "certify_corollary3")
    if mu * profile.k >= 1:
        return Verdict(False, mu_star=1.0 / profile.k, reason="coherence at or above 1/k")
    return certify_theorem3(profile, mu, p, p)


def certify_theorem4(profile: SignalProfile, mu: float) -> Verdict:
    """mu < 1/(2k-1) and |x_i| > 2(tail + eps) / (1 - (2k-i) mu) for i = 1..k."""
    _require_full_head(profile, "thm4")
    k = profile.k
    if mu * (2 * k - 1) >= 1:
        return Verdict(False, reason="coherence at or above 1/(2k-1)")
    budget = 2 * (profile.tail_l1 + profile.noise_budget)
    terms = [(i, profile.magnitude(i), budget / (1 - (2 * k - i) * mu)) for i in range(1, k + 1)]
    return _check_family(terms)


def certify_donoho_baseline(profile: SignalProfile, mu: float) -> Verdict:
    """mu < 1/(2k-1) and min |x_i| > 2 eps / (1 - (2k-1) mu)."""
    _require_full_head(profile, "the baseline condition")
    if profile.tail_l1 > 0:
        raise NotApplicable("the baseline condition covers exactly sparse signals only")
    k = profile.k
    if mu * (2 * k - 1) >= 1:
        return Verdict(False, reason="coherence at or above 1/(2k-1)")
    threshold = 2 * profile.noise_budget / (1 - (2 * k - 1) * mu)
    return _check_family([(k, profile.magnitude(k), threshold)])


def certify_theorem5(profile: SignalProfile, mu: float, variant: Variant = Variant.OMP) -> Verdict:
    """mu < 1/k and |x_i| > decay_factor(i) |x_{i+1}| + 2 gamma_k (eps + tail), i = 1..k."""
    _require_full_head(profile, "thm5")
    k = profile.k
    if mu * k >= 1:
        return Verdict(False, boundary=mu * k == 1, reason="coherence at or above 1/k")
    noise_term = 2 * gamma_k(k, mu, variant) * (profile.noise_budget + profile.tail_l1)
    terms = [(i, profile.magnitude(i),
              decay_factor(i, k, 0, mu) * profile.magnitude(i + 1) + noise_term)
             for i in range(1, k + 1)]
    return _check_family(terms)


def check_lemma4_step(profile: SignalProfile, g: int, mu: float, variant: Variant = Variant.OMP) -> Verdict:
    """One correct selection from g correct ones.

    `profile` holds the magnitudes of the atoms still unselected.
    """
    _require_below(mu, g, "lemma4_step")
    alpha = alpha_g(g, mu, variant)
    cross = mu_g(g, mu, variant)
    head = profile.head_magnitudes
    lhs = (alpha + cross) * max(head) - 2 * cross * math.fsum(head)
    rhs = 2 * (profile.noise_budget + profile.tail_l1)
    return replace(_check_family([(1, lhs, rhs)]), binding_index=None)


# ----------------------
# Full report
# ----------------------

def _quantities(profile: SignalProfile, mu: float, variant: Variant) -> Dict[str, object]:
    k = profile.k
    alphas: List[Optional[float]] = []
    mus: List[Optional[float]] = []
    for g in range(k):
        if g == 0 or mu * g < 1:
            alphas.append(alpha_g(g, mu, variant))
            mus.append(mu_g(g, mu, variant))
        else:
            alphas.append(None)
            mus.append(None)
    return {
        "alpha_g": alphas,
        "mu_g": mus,
        "gamma_k": gamma_k(k, mu, variant) if mu * k < 1 else None,
        "mu_i_star": list(mu_i_star(profile)),
        "rho": rho(profile),
    }


def certify_all(profile: SignalProfile, mu: float, variant: Variant = Variant.OMP,
                p: Optional[int] = None, r: Optional[int] = None,
                theorem_ids: Sequence[str] = THEOREM_IDS) -> CertificateReport:
    """Evaluate the requested certificates; inapplicable ones become failed verdicts."""
    variant = Variant(variant)
    k, g = profile.k, profile.selected_prefix
    p = k - g if p is None else p
    r = max(p, k - g) if r is None else r
    checks = {
        "uniform": lambda: certify_uniform(k, mu),
        "uniform_termination": lambda: certify_uniform_termination(k, g, mu),
        "thm1": lambda: certify_theorem1(profile, mu)[0],
        "thm2": lambda: certify_theorem2(profile, mu)[0],
        "thm3": lambda: certify_theorem3(profile, mu, p, r),
        "thm4": lambda: certify_theorem4(profile, mu),
        "donoho": lambda: certify_donoho_baseline(profile, mu),
        "thm5": lambda: certify_theorem5(profile, mu, variant),
        "lemma4_step": lambda: check_lemma4_step(profile, g, mu, variant),
    }
    verdicts: Dict[str, Verdict] = {}
    for tid in theorem_ids:
        if tid not in checks:
            raise InvalidParameters(f"unknown theorem id {tid!r}; expected one of {THEOREM_IDS}")
        try:
            verdicts[tid] = checks[tid]()
        except (NotApplicable, InvalidParameters, CoherenceTooLarge) as exc:
            verdicts[tid] = Verdict(False, reason=f"not applicable: {exc}")
    return CertificateReport(k=k, mu=mu, variant=variant, verdicts=verdicts,
                             quantities=_quantities(profile, mu, variant))
