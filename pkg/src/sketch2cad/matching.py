"""Set matching: cost matrices between ground truth and predictions, exact
minimum-cost assignment, and a brute-force oracle.

Cost entries are cross-entropies of the ground-truth element under the
prediction's distributions, so a perfectly confident correct prediction
costs zero. The assignment maps every ground-truth index to a distinct
query index; surplus queries stay unmatched and carry no cost here (their
supervision happens in the loss stage).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    CONSTRAINT_ARITY,
    LIVE_SLOTS,
    SYMMETRIC_CONSTRAINTS,
    Constraint,
    Primitive,
    PRIMITIVE_TYPE_INDEX,
    CONSTRAINT_TYPE_INDEX,
)
from .errors import InvalidInputError
from .predictions import ConstraintPredictionSet, PrimitivePredictionSet, dequantized_params

DEFAULT_PRIMITIVE_WEIGHTS = (1.0, 1.0, 5.0)
DEFAULT_CONSTRAINT_WEIGHTS = (1.0, 1.0)

_NORM_TOL = 1e-5


@dataclass(frozen=True)
class Assignment:
    """Injective map from ground-truth indices to query indices."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.sigma)) != len(self.sigma):
            raise InvalidInputError("assignment is not injective")

    def __getitem__(self, i: int) -> int:
        return self.sigma[i]

    def __len__(self) -> int:
        return len(self.sigma)

    def total_cost(self, cost: np.ndarray) -> float:
        return float(sum(cost[i, j] for i, j in enumerate(self.sigma)))


def _check_normalized(logp: np.ndarray, what: str):
    total = np.exp(logp).sum(axis=-1)
    if not np.all(np.abs(total - 1.0) <= _NORM_TOL):
        worst = float(np.abs(total - 1.0).max())
        raise InvalidInputError(f"{what} distributions not normalized (off by {worst:.2e})")


def primitive_cost_matrix(
    gt: list[Primitive],
    pred: PrimitivePredictionSet,
    weights: tuple[float, float, float] = DEFAULT_PRIMITIVE_WEIGHTS,
) -> np.ndarray:
    """(K_p, N_p) matching costs: weighted type/flag/parameter cross-entropy.

    The parameter term averages over the ground-truth type's live slots so
    costs stay comparable across primitive types. In regression mode the
    parameter cross-entropy is replaced by squared error on dequantized
    values.
    """
    w_type, w_flag, w_param = weights
    _check_normalized(pred.type_logp, "type")
    _check_normalized(pred.flag_logp, "flag")
    if pred.param_logp is not None:
        _check_normalized(pred.param_logp, "parameter")
    cost = np.zeros((len(gt), pred.n_queries))
    for i, p in enumerate(gt):
        t_idx = PRIMITIVE_TYPE_INDEX[p.ptype]
        live = list(LIVE_SLOTS[p.ptype])
        type_ce = -pred.type_logp[:, t_idx]
        flag_ce = -pred.flag_logp[:, int(p.flag)]
        if pred.param_logp is not None:
            slot_ce = np.stack([-pred.param_logp[:, s, p.params[s]] for s in live], axis=1)
            param_term = slot_ce.mean(axis=1)
        else:
            target = dequantized_params(p)[live]
            param_term = ((pred.param_value[:, live] - target) ** 2).mean(axis=1)
        cost[i] = w_type * type_ce + w_flag * flag_ce + w_param * param_term
    if not np.all(np.isfinite(cost)):
        raise InvalidInputError("cost matrix contains non-finite entries")
    return cost


def constraint_ref_cost(
    c: Constraint, pointer_logp_j: np.ndarray
) -> float:
    """Pointer cross-entropy of one constraint against one query's slots.

    Mean over the type's arity slots; symmetric pair types take the better
    of the two orderings so a swapped-but-correct pair is not penalized.
    Shared by the cost matrix and the loss so matching and training agree.
    """
    arity = CONSTRAINT_ARITY[c.ctype]
    if arity == 1:
        return float(-pointer_logp_j[0, c.refs[0]])
    a, b = c.refs
    direct = -(pointer_logp_j[0, a] + pointer_logp_j[1, b]) / 2.0
    if c.ctype in SYMMETRIC_CONSTRAINTS:
        swapped = -(pointer_logp_j[0, b] + pointer_logp_j[1, a]) / 2.0
        return float(min(direct, swapped))
    return float(direct)


def constraint_cost_matrix(
    gt: list[Constraint],
    pred: ConstraintPredictionSet,
    weights: tuple[float, float] = DEFAULT_CONSTRAINT_WEIGHTS,
) -> np.ndarray:
    """(K_c, N_c) matching costs: weighted type and pointer cross-entropy."""
    w_type, w_param = weights
    _check_normalized(pred.type_logp, "constraint type")
    _check_normalized(pred.pointer_logp, "pointer")
    k_p = pred.n_primitives
    cost = np.zeros((len(gt), pred.n_queries))
    for i, c in enumerate(gt):
        arity = CONSTRAINT_ARITY[c.ctype]
        if len(c.refs) != arity:
            raise InvalidInputError(f"constraint {i}: {c.ctype.value} arity {arity} but {len(c.refs)} refs")
        if any(not 0 <= r < k_p for r in c.refs):
            raise InvalidInputError(f"constraint {i}: ref outside the {k_p} input primitives")
        t_idx = CONSTRAINT_TYPE_INDEX[c.ctype]
        for j in range(pred.n_queries):
            cost[i, j] = w_type * -pred.type_logp[j, t_idx] + w_param * constraint_ref_cost(
                c, pred.pointer_logp[j]
            )
    if not np.all(np.isfinite(cost)):
        raise InvalidInputError("cost matrix contains non-finite entries")
    return cost


def _check_cost(cost: np.ndarray):
    if cost.ndim != 2:
        raise InvalidInputError("cost matrix must be 2-D")
    k, n = cost.shape
    if k > n:
        raise InvalidInputError(f"more ground-truth rows ({k}) than query columns ({n})")
    if not np.all(np.isfinite(cost)):
        raise InvalidInputError("cost matrix contains non-finite entries")


def hungarian(cost: np.ndarray) -> Assignment:
    """Exact minimum-cost assignment of every row to a distinct column.

    Solves the rectangular problem directly; the N - K surplus columns
    stay unmatched.
    """
    cost = np.asarray(cost, dtype=float)
    _check_cost(cost)
    rows, cols = linear_sum_assignment(cost)
    sigma = [0] * cost.shape[0]
    for r, c in zip(rows, cols):
        sigma[r] = int(c)
    return Assignment(tuple(sigma))


_PERM_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _permutation_table(k: int, n: int) -> np.ndarray:
    """All n-permute-k index tuples in lexicographic order, cached."""
    key = (k, n)
    if key not in _PERM_CACHE:
        _PERM_CACHE[key] = np.array(list(itertools.permutations(range(n), k)), dtype=np.intp)
    return _PERM_CACHE[key]


def brute_force_assignment(cost: np.ndarray, max_rows: int = 8) -> Assignment:
    """Exhaustive oracle; ties break to the lexicographically smallest map."""
    cost = np.asarray(cost, dtype=float)
    _check_cost(cost)
    k, n = cost.shape
    if k > max_rows:
        raise InvalidInputError(f"brute force capped at {max_rows} rows, got {k}")
    perms = _permutation_table(k, n)
    totals = cost[np.arange(k), perms].sum(axis=1)
    best = perms[int(np.argmin(totals))]  # argmin takes the first = lex smallest
    return Assignment(tuple(int(j) for j in best))
