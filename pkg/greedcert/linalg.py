"""
Dense linear-algebra primitives for greedy sparse recovery.

Provides:
- Dictionary: unit-column matrix with its cached Gram matrix and coherence
- normalize_columns(raw) to build a Dictionary from any full-column matrix
- project_complement(d, Q, v) applying the projector onto span(A_Q)^perp
- projected_atoms(d, Q, y=None) returning the projected / normalized atoms
- welch_bound(m, n) and lemma1_bounds(d, Q)

Projections use an orthonormal basis of span(A_Q) grown one atom at a time
(classical Gram-Schmidt with one re-orthogonalization pass). An atom whose
projected norm drops below RANK_TOL is treated as linearly dependent.

Usage:
    from greedcert import linalg
    d = linalg.normalize_columns(raw)
    state = linalg.projected_atoms(d, [0, 3], y=y)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from greedcert import config
from greedcert.errors import (
    DimensionMismatch,
    InvalidDimensions,
    InvalidIndex,
    RankDeficientActiveSet,
    ZeroColumn,
)

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Unit-norm atoms stored as the columns of an m x n matrix."""

    atoms: np.ndarray
    gram: np.ndarray
    coherence: float

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def atom(self, index: int) -> np.ndarray:
        return self.atoms[:, index]

    def permuted(self, order: Sequence[int]) -> "Dictionary":
        """Dictionary whose column q is column order[q] of this one."""
        return normalize_columns(self.atoms[:, list(order)])


def _coherence_from_gram(gram: np.ndarray) -> float:
    n = gram.shape[0]
    if n < 2:
        return 0.0
    off = np.abs(gram - np.diag(np.diag(gram)))
    return float(off.max())


def normalize_columns(raw) -> Dictionary:
    """Scale every column to unit Euclidean norm and cache Gram/coherence."""
    matrix = np.asarray(raw, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise InvalidDimensions(f"expected a non-empty 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidDimensions("matrix contains non-finite entries")
    norms = np.linalg.norm(matrix, axis=0)
    for index, norm in enumerate(norms):
        if norm < config.ZERO_COLUMN_TOL:
            raise ZeroColumn(index, float(norm))
    atoms = matrix / norms
    drift = np.abs(np.linalg.norm(atoms, axis=0) - 1.0)
    if drift.max() > config.UNIT_NORM_TOL:
        index = int(drift.argmax())
        raise InvalidDimensions(f"column {index} cannot be scaled to unit norm (norm {norms[index]:.3e})")
    gram = atoms.T @ atoms
    # exact symmetry and unit diagonal; both hold to rounding already
    gram = 0.5 * (gram + gram.T)
    np.fill_diagonal(gram, 1.0)
    return Dictionary(atoms=_frozen(atoms), gram=_frozen(gram), coherence=_coherence_from_gram(gram))


def mutual_coherence(d: Dictionary) -> float:
    """max_{i != j} |<a_i, a_j>|; 0 for a single-atom dictionary."""
    return _coherence_from_gram(d.gram)


def _check_indices(d: Dictionary, indices: Iterable[int]) -> Tuple[int, ...]:
    result = tuple(int(i) for i in indices)
    if len(set(result)) != len(result):
        raise InvalidIndex(f"repeated index in active set {result}")
    for i in result:
        if i < 0 or i >= d.n:
            raise InvalidIndex(f"atom index {i} outside 0..{d.n - 1}")
    return result


def _check_vector(d: Dictionary, v) -> np.ndarray:
    vector = np.asarray(v, dtype=float).reshape(-1)
    if vector.shape[0] != d.m:
        raise DimensionMismatch(f"vector has length {vector.shape[0]}, dictionary has {d.m} rows")
    return vector


def orthonormal_basis(d: Dictionary, active_set: Sequence[int], rank_tol: float = config.RANK_TOL) -> np.ndarray:
    """Orthonormal basis (m x g) of span(A_Q), built atom by atom."""
    indices = _check_indices(d, active_set)
    basis = np.zeros((d.m, 0))
    for index in indices:
        v = d.atom(index).copy()
        # two passes: the second removes what rounding left from the first
        for _ in range(2):
            v -= basis @ (basis.T @ v)
        norm = float(np.linalg.norm(v))
        if norm < rank_tol:
            raise RankDeficientActiveSet(index, norm)
        basis = np.column_stack([basis, v / norm])
    return basis


def _apply_complement(basis: np.ndarray, v: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return v.copy()
    out = v - basis @ (basis.T @ v)
    return out - basis @ (basis.T @ out)


def project_complement(d: Dictionary, active_set: Sequence[int], v,
                       rank_tol: float = config.RANK_TOL) -> np.ndarray:
    """P_Q^perp v = v - A_Q A_Q^+ v."""
    vector = _check_vector(d, v)
    basis = orthonormal_basis(d, active_set, rank_tol=rank_tol)
    return _apply_complement(basis, vector)


@dataclass(frozen=True, eq=False)
class ProjectedState:
    """Projected atoms (and optionally the residual) for one active set Q."""

    active_set: Tuple[int, ...]
    projected_atoms: Dict[int, np.ndarray]
    normalized_projected_atoms: Dict[int, np.ndarray]
    residual: Optional[np.ndarray] = None
    projected_norms: Dict[int, float] = field(default_factory=dict)

    @property
    def g(self) -> int:
        return len(self.active_set)

    def candidates(self) -> Tuple[int, ...]:
        return tuple(sorted(self.projected_atoms))


def projected_atoms(d: Dictionary, active_set: Sequence[int], y=None,
                    rank_tol: float = config.RANK_TOL) -> ProjectedState:
    """a~_i = P_Q^perp a_i and b~_i = a~_i / ||a~_i|| (zero when a~_i = 0), i not in Q.

    When `y` is given the residual r^Q = P_Q^perp y is computed with the same basis.
    """
    indices = _check_indices(d, active_set)
    if len(indices) >= d.n:
        raise InvalidIndex("active set must be a proper subset of the atoms")
    basis = orthonormal_basis(d, indices, rank_tol=rank_tol)
    chosen = set(indices)
    tilde_a: Dict[int, np.ndarray] = {}
    tilde_b: Dict[int, np.ndarray] = {}
    norms: Dict[int, float] = {}
    for i in range(d.n):
        if i in chosen:
            continue
        a = _apply_complement(basis, d.atom(i))
        norm = float(np.linalg.norm(a))
        if norm <= rank_tol:
            # atom in span(A_Q): the definition sends b~_i to zero
            a = np.zeros(d.m)
            b = np.zeros(d.m)
            norm = 0.0
        else:
            b = a / norm
        tilde_a[i] = _frozen(a)
        tilde_b[i] = _frozen(b)
        norms[i] = norm
    residual = None
    if y is not None:
        residual = _frozen(_apply_complement(basis, _check_vector(d, y)))
    return ProjectedState(
        active_set=indices,
        projected_atoms=tilde_a,
        normalized_projected_atoms=tilde_b,
        residual=residual,
        projected_norms=norms,
    )


def welch_bound(m: int, n: int) -> float:
    """Lowest coherence any n unit vectors in R^m can reach."""
    if m < 1 or n < 1:
        raise InvalidDimensions(f"dimensions must be positive, got m={m}, n={n}")
    if n < m:
        raise InvalidDimensions(f"Welch bound needs n >= m, got m={m}, n={n}")
    if n == m:
        return 0.0
    return float(np.sqrt((n - m) / (m * (n - 1))))


def lemma1_bounds(d: Dictionary, active_set: Sequence[int]) -> dict:
    """Measured projected-atom quantities next to their coherence bounds.

    Bounds apply only when mu < 1/g; `applicable` says whether they do.
    """
    state = projected_atoms(d, active_set)
    g = state.g
    mu = d.coherence
    applicable = g == 0 or mu * g < 1
    candidates = state.candidates()
    min_sq_norm = min(state.projected_norms[i] ** 2 for i in candidates)
    max_cross = 0.0
    for pos, i in enumerate(candidates):
        for j in candidates[pos + 1:]:
            value = abs(float(state.projected_atoms[i] @ state.projected_atoms[j]))
            max_cross = max(max_cross, value)
    result = {
        "g": g,
        "mu": mu,
        "applicable": applicable,
        "min_sq_norm": min_sq_norm,
        "max_cross": max_cross,
    }
    if applicable:
        denom = 1 - (g - 1) * mu
        result["sq_norm_bound"] = (mu + 1) * (1 - g * mu) / denom
        result["cross_bound"] = mu * (mu + 1) / denom
    return result
