"""
OMP and OLS driven by the projected-atom selection rule.

Both variants pick argmax_{i not in Q} |<c~_i, r^Q>| where c~_i is the
projected atom a~_i (OMP) or its normalization b~_i (OLS). Every step is
recorded together with the full score map and the set of candidates tied
with the maximum, so that ambiguous selections are visible instead of being
resolved silently.

Usage:
    from greedcert.solvers import SolverConfig, Variant, run_oxx
    trace = run_oxx(d, y, SolverConfig(Variant.OLS, max_iterations=3))
    trace.final_active_set
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from greedcert import config
from greedcert.errors import (
    AllAtomsDegenerate,
    DimensionMismatch,
    InvalidIndex,
    InvalidParameters,
    RankDeficientActiveSet,
)
from greedcert.linalg import Dictionary, ProjectedState, project_complement, projected_atoms

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    OMP = "omp"
    OLS = "ols"


class TiePolicy(str, Enum):
    LOWEST_INDEX = "lowest_index"
    REPORT_AMBIGUOUS = "report_ambiguous"


STOP_COMPLETED = "completed"
STOP_ZERO_RESIDUAL = "zero_residual"
STOP_DEGENERATE = "degenerate"
STOP_AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class SolverConfig:
    variant: Variant = Variant.OMP
    max_iterations: int = 1
    tie_tolerance: float = config.TIE_TOL
    tie_policy: TiePolicy = TiePolicy.LOWEST_INDEX

    def validate(self, d: Dictionary) -> None:
        if self.max_iterations < 1:
            raise InvalidParameters("max_iterations must be positive")
        if self.max_iterations > min(d.m, d.n):
            raise InvalidParameters(
                f"max_iterations={self.max_iterations} exceeds min(m, n)={min(d.m, d.n)}"
            )
        if self.tie_tolerance < 0:
            raise InvalidParameters("tie_tolerance must be non-negative")


@dataclass(frozen=True)
class StepRecord:
    iteration: int
    selected: int
    tie_set: Tuple[int, ...]
    scores: Dict[int, float]
    correlations: Dict[int, float]
    residual_norm: float

    def to_dict(self) -> dict:
        return {
            "g": self.iteration,
            "selected": self.selected,
            "tie_set": list(self.tie_set),
            "residual_norm": self.residual_norm,
            "scores": {str(i): s for i, s in sorted(self.scores.items())},
        }


@dataclass(frozen=True)
class RunTrace:
    variant: Variant
    steps: Tuple[StepRecord, ...]
    final_active_set: Tuple[int, ...]
    stop_reason: str
    initial_residual_norm: float
    tie_tolerance: float = config.TIE_TOL

    @property
    def selected(self) -> Tuple[int, ...]:
        return tuple(step.selected for step in self.steps)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "steps": [step.to_dict() for step in self.steps],
            "stop_reason": self.stop_reason,
            "final_active_set": list(self.final_active_set),
            "initial_residual_norm": self.initial_residual_norm,
        }


class Selection(NamedTuple):
    selected: int
    tie_set: Tuple[int, ...]
    scores: Dict[int, float]
    correlations: Dict[int, float]


def select_next(state: ProjectedState, variant: Variant,
                tie_tolerance: float = config.TIE_TOL) -> Selection:
    """Apply the selection rule once.

    Candidates whose projected atom vanishes score 0 and never enter the tie
    set. The lowest tied index is returned; what an ambiguous tie set means
    is decided by the caller (see TiePolicy in run_oxx).
    """
    if state.residual is None:
        raise InvalidParameters("selection needs a state built with the data vector")
    variant = Variant(variant)
    atoms = state.projected_atoms if variant is Variant.OMP else state.normalized_projected_atoms
    correlations: Dict[int, float] = {}
    live: List[int] = []
    for i in state.candidates():
        correlations[i] = float(atoms[i] @ state.residual)
        if state.projected_norms[i] > 0.0:
            live.append(i)
    if not live:
        raise AllAtomsDegenerate(f"no usable atom outside active set {list(state.active_set)}")
    scores = {i: abs(c) for i, c in correlations.items()}
    best = max(scores[i] for i in live)
    tie_set = tuple(i for i in live if best - scores[i] <= tie_tolerance)
    return Selection(selected=tie_set[0], tie_set=tie_set, scores=scores, correlations=correlations)


def _as_data_vector(d: Dictionary, y) -> np.ndarray:
    vector = np.asarray(y, dtype=float).reshape(-1)
    if vector.shape[0] != d.m:
        raise DimensionMismatch(f"y has length {vector.shape[0]}, dictionary has {d.m} rows")
    if not np.all(np.isfinite(vector)):
        raise InvalidParameters("y must be finite")
    return vector


def run_oxx(d: Dictionary, y, solver_config: SolverConfig) -> RunTrace:
    """Run OMP or OLS for `max_iterations` steps, recording every decision.

    The residual is recomputed by a full projection at each step. The run
    stops early on a numerically zero residual, when every remaining atom is
    degenerate, or on the first tie under the ReportAmbiguous policy.
    """
    solver_config.validate(d)
    vector = _as_data_vector(d, y)
    initial_norm = float(np.linalg.norm(vector))
    active: List[int] = []
    steps: List[StepRecord] = []
    stop_reason = STOP_COMPLETED
    for g in range(solver_config.max_iterations):
        state = projected_atoms(d, active, y=vector)
        if np.linalg.norm(state.residual) <= config.ZERO_RESIDUAL_TOL:
            stop_reason = STOP_ZERO_RESIDUAL
            break
        try:
            choice = select_next(state, solver_config.variant, solver_config.tie_tolerance)
        except AllAtomsDegenerate:
            stop_reason = STOP_DEGENERATE
            break
        active.append(choice.selected)
        residual = project_complement(d, active, vector)
        step = StepRecord(
            iteration=g,
            selected=choice.selected,
            tie_set=choice.tie_set,
            scores=choice.scores,
            correlations=choice.correlations,
            residual_norm=float(np.linalg.norm(residual)),
        )
        steps.append(step)
        logger.debug("%s step %d: selected %d, ties %s, residual %.3e",
                     solver_config.variant.value, g, step.selected, step.tie_set, step.residual_norm)
        if solver_config.tie_policy is TiePolicy.REPORT_AMBIGUOUS and len(step.tie_set) > 1:
            stop_reason = STOP_AMBIGUOUS
            break
    return RunTrace(
        variant=Variant(solver_config.variant),
        steps=tuple(steps),
        final_active_set=tuple(active),
        stop_reason=stop_reason,
        initial_residual_norm=initial_norm,
        tie_tolerance=solver_config.tie_tolerance,
    )


def ols_residual_bruteforce(d: Dictionary, active_set: Sequence[int], candidate: int, y) -> float:
    """||P^perp_{Q + {candidate}} y|| computed by direct projection."""
    active = [int(i) for i in active_set]
    if candidate in active:
        raise InvalidIndex(f"candidate {candidate} is already in the active set")
    try:
        return float(np.linalg.norm(project_complement(d, active + [candidate], y)))
    except RankDeficientActiveSet as exc:
        if exc.index != candidate:
            raise
        # a dependent candidate leaves the residual unchanged
        return float(np.linalg.norm(project_complement(d, active, y)))


def k_step_success(trace: RunTrace, true_support: Iterable[int]) -> bool:
    support = set(int(i) for i in true_support)
    selected = trace.selected
    return all(i in support for i in selected) and support <= set(selected)


def partial_success(trace: RunTrace, true_support: Iterable[int], priority: Iterable[int],
                    max_steps: Optional[int] = None) -> bool:
    """Selections stay inside the support until every priority atom is picked.

    Checking stops after `max_steps` selections when given. A run that ends
    before covering the priority atoms (without leaving the support) fails.
    """
    support = set(int(i) for i in true_support)
    pending = set(int(i) for i in priority)
    limit = len(trace.steps) if max_steps is None else min(max_steps, len(trace.steps))
    for step in trace.steps[:limit]:
        if step.selected not in support:
            return False
        pending.discard(step.selected)
        if not pending:
            return True
    return max_steps is not None and limit == max_steps


def coefficients(d: Dictionary, y, active_set: Sequence[int]) -> np.ndarray:
    """Least-squares coefficients of y on A_Q, scattered into an n-vector."""
    vector = _as_data_vector(d, y)
    indices = [int(i) for i in active_set]
    x = np.zeros(d.n)
    if indices:
        solution, *_ = np.linalg.lstsq(d.atoms[:, indices], vector, rcond=None)
        x[indices] = solution
    return x
