"""Minimax game trees and the aiming-and-evasion game.

The evasion game: the evader picks a move parameter x in [0, 1] which sends
it to one of three positions with probabilities (1-x)^2, x, and x(1-x); the
marksman then aims at a single position.  The evader minimizes the largest
reach probability, the marksman maximizes his hit chance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceLimitError
from .matrix_game import MixedStrategy, PayoffMatrix, solve_exact

_NODE_KINDS = ("leaf", "max", "min", "chance")
_PROB_TOL = 1e-12
_GRID_CAP = 10_000


@dataclass(frozen=True)
class GameTree:
    """Immutable tree node: leaf payoff, max/min choice, or chance move."""

    kind: str
    payoff: float | None = None
    children: tuple["GameTree", ...] = ()
    probs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _NODE_KINDS:
            raise InputError(f"unknown node kind {self.kind!r}")
        object.__setattr__(self, "children", tuple(self.children))
        if self.kind == "leaf":
            try:
                payoff = float(self.payoff) if self.payoff is not None else None
            except (TypeError, ValueError):
                raise InputError("leaf payoff must be a number") from None
            if payoff is None or not np.isfinite(payoff):
                raise InputError("leaf node needs a finite payoff")
            if self.children or self.probs is not None:
                raise InputError("leaf node cannot have children")
            object.__setattr__(self, "payoff", payoff)
            return
        if self.payoff is not None:
            raise InputError(f"{self.kind} node cannot carry a payoff")
        if not self.children:
            raise InputError(f"{self.kind} node needs at least one child")
        if any(not isinstance(c, GameTree) for c in self.children):
            raise InputError("children must be GameTree nodes")
        if self.kind == "chance":
            if self.probs is None:
                raise InputError("chance node needs probabilities")
            try:
                probs = tuple(float(p) for p in self.probs)
            except (TypeError, ValueError):
                raise InputError("chance probabilities must be numbers") from None
            if len(probs) != len(self.children):
                raise InputError("one probability per child required")
            if any(p < 0.0 or not np.isfinite(p) for p in probs):
                raise InputError("chance probabilities must be nonnegative")
            if abs(sum(probs) - 1.0) > _PROB_TOL:
                raise InputError("chance probabilities must sum to 1")
            object.__setattr__(self, "probs", probs)
        elif self.probs is not None:
            raise InputError(f"{self.kind} node cannot carry probabilities")

    @classmethod
    def leaf(cls, payoff: float) -> "GameTree":
        return cls("leaf", payoff=payoff)

    @classmethod
    def max_node(cls, *children: "GameTree") -> "GameTree":
        return cls("max", children=children)

    @classmethod
    def min_node(cls, *children: "GameTree") -> "GameTree":
        return cls("min", children=children)

    @classmethod
    def chance(cls, children, probs) -> "GameTree":
        return cls("chance", children=tuple(children), probs=tuple(probs))

    @classmethod
    def from_dict(cls, doc: dict) -> "GameTree":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise InputError("tree document needs a 'kind' field")
        kind = doc["kind"]
        if kind == "leaf":
            if "payoff" not in doc:
                raise InputError("leaf document needs a 'payoff' field")
            return cls.leaf(doc["payoff"])
        children = tuple(cls.from_dict(c) for c in doc.get("children", ()))
        if kind == "chance":
            return cls.chance(children, doc.get("probs") or ())
        return cls(kind, children=children)

    def to_dict(self) -> dict:
        if self.kind == "leaf":
            return {"kind": "leaf", "payoff": self.payoff}
        doc = {"kind": self.kind, "children": [c.to_dict() for c in self.children]}
        if self.kind == "chance":
            doc["probs"] = list(self.probs)
        return doc


def evaluate_tree(tree: GameTree) -> float:
    """Backward-induction value: max/min over choices, expectation at chance."""
    if not isinstance(tree, GameTree):
        raise InputError("evaluate_tree expects a GameTree")
    if tree.kind == "leaf":
        return tree.payoff
    values = [evaluate_tree(c) for c in tree.children]
    if tree.kind == "max":
        return max(values)
    if tree.kind == "min":
        return min(values)
    return float(sum(p * v for p, v in zip(tree.probs, values)))


@dataclass(frozen=True)
class EvasionSolution:
    x_star: float
    value: float
    marksman_position: int
    reach_probs: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "x_star": self.x_star,
            "value": self.value,
            "marksman_position": self.marksman_position,
            "reach_probs": list(self.reach_probs),
        }


def _check_unit(x: float) -> float:
    x = float(x)
    if not np.isfinite(x) or x < 0.0 or x > 1.0:
        raise InputError("move parameter must lie in [0, 1]")
    return x


def evader_reach_probs(x: float) -> tuple[float, float, float]:
    """Probabilities ((1-x)^2, x, x(1-x)) of reaching the three positions.

    The third entry is the complement of the first two so that the triple
    sums to 1.0 exactly in floating point; if rounding ever pushes
    p1 + p2 past 1, p1 is shaved by one ulp instead of letting p3 go
    negative.  Sterbenz's lemma (p1 + p2 >= 3/4) makes 1 - (p1 + p2) exact.
    """
    x = _check_unit(x)
    p1 = (1.0 - x) * (1.0 - x)
    p2 = x
    partial = p1 + p2
    if partial > 1.0:
        p1 = 1.0 - p2
        partial = p1 + p2
    p3 = 1.0 - partial
    return p1, p2, p3


def marksman_best(x: float) -> tuple[int, float]:
    """Position (1-based) with the largest reach probability, ties low."""
    probs = evader_reach_probs(x)
    best = max(range(3), key=lambda i: (probs[i], -i))
    return best + 1, probs[best]


def solve_evasion_game(tol: float = 1e-9) -> EvasionSolution:
    """Minimize the largest reach probability over the move parameter.

    The first two reach probabilities cross where (1-x)^2 = x, and the max
    of the three is minimized exactly there; the crossing is found by
    bisection of the monotone difference (1-x)^2 - x.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (1.0 - mid) * (1.0 - mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    x_star = 0.5 * (lo + hi)
    probs = evader_reach_probs(x_star)
    position, value = marksman_best(x_star)
    return EvasionSolution(
        x_star=x_star,
        value=value,
        marksman_position=position,
        reach_probs=probs,
    )


def _reach_matrix(grid: np.ndarray) -> PayoffMatrix:
    rows = np.array([[evader_reach_probs(x)[i] for x in grid] for i in range(3)])
    return PayoffMatrix(entries=rows, col_labels=grid)


def _continuous_guarantee(sigma: np.ndarray) -> float:
    # min over x in [0,1] of s1(1-x)^2 + s2 x + s3 x(1-x): a quadratic.
    s1, s2, s3 = sigma
    a = s1 - s3
    b = -2.0 * s1 + s2 + s3
    candidates = [0.0, 1.0]
    if a > 0.0:
        vertex = -b / (2.0 * a)
        if 0.0 < vertex < 1.0:
            candidates.append(vertex)
    return float(min(a * x * x + b * x + s1 for x in candidates))


def epsilon_strategy(epsilon: float, grid_n: int) -> tuple[MixedStrategy, float]:
    """Marksman mix with a guaranteed hit probability within epsilon of V.

    Solves the 3 x grid_n reach-probability game on successively refined
    evader grids (grid_n -> 2*grid_n - 1) until the mix's guarantee against
    the *continuous* evader, evaluated in closed form, reaches V - epsilon.
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if grid_n < 11:
        raise InputError("grid_n must be at least 11")
    target = solve_evasion_game(tol=1e-12).value - epsilon
    n = grid_n
    while True:
        solution = solve_exact(_reach_matrix(np.linspace(0.0, 1.0, n)))
        sigma = solution.row_strategy
        guaranteed = _continuous_guarantee(sigma.weights)
        if guaranteed >= target:
            return sigma, guaranteed
        if 2 * n - 1 > _GRID_CAP:
            raise ResourceLimitError(
                f"guarantee {guaranteed:.6f} still below {target:.6f} at the "
                f"{_GRID_CAP}-point grid cap"
            )
        n = 2 * n - 1
