"""Lagrangian allocation decision with three risk-derived equality targets.

The decision score of a vector d under multipliers (alpha, beta, gamma) is

    objective(d) + alpha*(c1(d) - t1) + beta*(c2(d) - t2) + gamma*(c3(d) - t3)

and the solver finds the stationary feasible point of that expression by
Newton iteration on the KKT system.  Objectives and constraints are
pluggable: anything exposing value/gradient/hessian works, with affine and
diagonal-quadratic built-ins provided.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, DegenerateProblemError, InputError
from .risk import MitigatingRiskParams, risk_mitigating


def _coeff_array(values, name: str) -> np.ndarray:
    try:
        return np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} are not numeric: {exc}") from None


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    """sum_i quad_i * d_i^2 + lin_i * d_i."""

    quad: np.ndarray
    lin: np.ndarray

    def __post_init__(self):
        quad = _coeff_array(self.quad, "quadratic coefficients")
        lin = _coeff_array(self.lin, "linear coefficients")
        if quad.ndim != 1 or quad.shape != lin.shape:
            raise InputError("quadratic coefficients need matching 1-d shapes")
        if not (np.all(np.isfinite(quad)) and np.all(np.isfinite(lin))):
            raise InputError("objective coefficients must be finite")
        object.__setattr__(self, "quad", quad)
        object.__setattr__(self, "lin", lin)

    @property
    def dimension(self) -> int:
        return self.quad.shape[0]

    def value(self, d: np.ndarray) -> float:
        return float(self.quad @ (d * d) + self.lin @ d)

    def gradient(self, d: np.ndarray) -> np.ndarray:
        return 2.0 * self.quad * d + self.lin

    def hessian(self, d: np.ndarray) -> np.ndarray:
        return np.diag(2.0 * self.quad)

    def to_dict(self) -> dict:
        return {"kind": "quadratic", "q": self.quad.tolist(), "c": self.lin.tolist()}


@dataclass(frozen=True, eq=False)
class AffineObjective:
    """sum_i lin_i * d_i + offset."""

    lin: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        lin = _coeff_array(self.lin, "affine coefficients")
        if lin.ndim != 1 or not np.all(np.isfinite(lin)) or not np.isfinite(self.offset):
            raise InputError("affine coefficients must be a finite vector")
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self) -> int:
        return self.lin.shape[0]

    def value(self, d: np.ndarray) -> float:
        return float(self.lin @ d) + self.offset

    def gradient(self, d: np.ndarray) -> np.ndarray:
        return self.lin.copy()

    def hessian(self, d: np.ndarray) -> np.ndarray:
        return np.zeros((self.dimension, self.dimension))

    def to_dict(self) -> dict:
        return {"kind": "affine", "c": self.lin.tolist(), "b": self.offset}


@dataclass(frozen=True)
class CoordinateConstraint:
    """Picks out a single decision coordinate."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise InputError("coordinate index must be nonnegative")

    def value(self, d: np.ndarray) -> float:
        return float(d[self.index])

    def gradient(self, d: np.ndarray) -> np.ndarray:
        g = np.zeros(d.shape[0])
        g[self.index] = 1.0
        return g

    def hessian(self, d: np.ndarray) -> np.ndarray:
        return np.zeros((d.shape[0], d.shape[0]))

    def to_dict(self) -> dict:
        return {"kind": "coord", "index": self.index}


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """a . d + b."""

    a: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        a = _coeff_array(self.a, "constraint coefficients")
        if a.ndim != 1 or not np.all(np.isfinite(a)) or not np.isfinite(self.b):
            raise InputError("affine constraint needs a finite coefficient vector")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    def value(self, d: np.ndarray) -> float:
        return float(self.a @ d) + self.b

    def gradient(self, d: np.ndarray) -> np.ndarray:
        return self.a.copy()

    def hessian(self, d: np.ndarray) -> np.ndarray:
        return np.zeros((d.shape[0], d.shape[0]))

    def to_dict(self) -> dict:
        return {"kind": "affine", "a": self.a.tolist(), "b": self.b}


def objective_from_dict(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError("objective document needs a 'kind' field")
    kind = doc["kind"]
    if kind == "quadratic":
        try:
            return QuadraticObjective(quad=doc["q"], lin=doc["c"])
        except KeyError as exc:
            raise InputError(f"quadratic objective document missing {exc}") from None
    if kind == "affine":
        if "c" not in doc:
            raise InputError("affine objective document needs 'c'")
        return AffineObjective(lin=doc["c"], offset=doc.get("b", 0.0))
    raise InputError(f"unknown objective kind {kind!r}")


def constraint_from_dict(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError("constraint document needs a 'kind' field")
    kind = doc["kind"]
    if kind == "coord":
        if "index" not in doc:
            raise InputError("coordinate constraint document needs 'index'")
        try:
            return CoordinateConstraint(index=int(doc["index"]))
        except (TypeError, ValueError):
            raise InputError("coordinate index must be an integer") from None
    if kind == "affine":
        if "a" not in doc:
            raise InputError("affine constraint document needs 'a'")
        return AffineConstraint(a=doc["a"], b=doc.get("b", 0.0))
    raise InputError(f"unknown constraint kind {kind!r}")


@dataclass(frozen=True, eq=False)
class TosgProblem:
    """Objective, exactly three constraints, and their equality targets."""

    objective: object
    constraints: tuple
    targets: tuple[float, float, float]
    dimension: int

    def __post_init__(self):
        if self.dimension < 3:
            raise InputError("decision dimension must be at least 3")
        constraints = tuple(self.constraints)
        if len(constraints) != 3:
            raise InputError("exactly three constraints are required")
        try:
            targets = tuple(float(t) for t in self.targets)
        except (TypeError, ValueError):
            raise InputError("targets must be numbers") from None
        if len(targets) != 3 or any(not np.isfinite(t) for t in targets):
            raise InputError("three finite targets are required")
        obj_dim = getattr(self.objective, "dimension", None)
        if obj_dim is not None and obj_dim != self.dimension:
            raise InputError(f"objective dimension {obj_dim} != problem dimension {self.dimension}")
        for c in constraints:
            idx = getattr(c, "index", None)
            if idx is not None and idx >= self.dimension:
                raise InputError(f"constraint index {idx} out of range")
            a = getattr(c, "a", None)
            if a is not None and a.shape[0] != self.dimension:
                raise InputError("constraint coefficient length != problem dimension")
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_dict(cls, doc: dict) -> "TosgProblem":
        try:
            objective = objective_from_dict(doc["objective"])
            constraints = tuple(constraint_from_dict(c) for c in doc["constraints"])
            targets = tuple(doc["targets"])
        except (TypeError, KeyError) as exc:
            raise InputError(f"problem document missing field: {exc}") from None
        try:
            dimension = int(doc.get("dimension", getattr(objective, "dimension", 0)))
        except (TypeError, ValueError):
            raise InputError("dimension must be an integer") from None
        return cls(objective=objective, constraints=constraints, targets=targets, dimension=dimension)

    def to_dict(self) -> dict:
        return {
            "objective": self.objective.to_dict(),
            "constraints": [c.to_dict() for c in self.constraints],
            "targets": list(self.targets),
            "dimension": self.dimension,
        }


@dataclass(frozen=True, eq=False)
class TosgSolution:
    d_star: np.ndarray
    multipliers: tuple[float, float, float]
    tosg_value: float
    stationarity_residual: float
    feasibility_residual: float

    def to_dict(self) -> dict:
        return {
            "d_star": self.d_star.tolist(),
            "multipliers": list(self.multipliers),
            "tosg_value": self.tosg_value,
            "stationarity_residual": self.stationarity_residual,
            "feasibility_residual": self.feasibility_residual,
        }


def _check_vector(problem: TosgProblem, d) -> np.ndarray:
    d = _coeff_array(d, "decision vector")
    if d.shape != (problem.dimension,):
        raise InputError(f"decision vector must have shape ({problem.dimension},)")
    if not np.all(np.isfinite(d)):
        raise InputError("decision vector must be finite")
    return d


def tosg_value(problem: TosgProblem, d, multipliers) -> float:
    """Objective plus multiplier-weighted constraint deviations from target."""
    d = _check_vector(problem, d)
    try:
        multipliers = tuple(float(m) for m in multipliers)
    except (TypeError, ValueError):
        raise InputError("multipliers must be numbers") from None
    if len(multipliers) != 3:
        raise InputError("exactly three multipliers are required")
    total = problem.objective.value(d)
    for mult, constraint, target in zip(multipliers, problem.constraints, problem.targets):
        total += mult * (constraint.value(d) - target)
    return total


def constraint_targets_from_risk(
    risk_pti: MitigatingRiskParams,
    risk_tm: MitigatingRiskParams,
    risk_gaa: MitigatingRiskParams,
    baselines: tuple[float, float, float],
) -> tuple[float, float, float]:
    """Scale each baseline by (1 + normalized risk).

    Normalized risk is the mitigating risk at unit consequence, i.e.
    pa * (1 - pi * pn) in [0, 1]; this equals risk/ce for ce > 0 and extends
    it continuously to ce = 0.  The composition is this toolkit's own
    documented convention.
    """
    try:
        baselines = tuple(float(b) for b in baselines)
    except (TypeError, ValueError):
        raise InputError("baselines must be numbers") from None
    if len(baselines) != 3 or any(not np.isfinite(b) for b in baselines):
        raise InputError("three finite baselines are required")
    out = []
    for params, baseline in zip((risk_pti, risk_tm, risk_gaa), baselines):
        normalized = risk_mitigating(replace(params, ce=1.0))
        out.append(baseline * (1.0 + normalized))
    return tuple(out)


def solve_tosg(
    problem: TosgProblem,
    tol: float = 1e-10,
    max_iter: int = 50,
    start=None,
) -> TosgSolution:
    """Newton iteration on the KKT system of the equality-constrained problem.

    Returns the stationary feasible point and the recovered multipliers.
    Raises DegenerateProblemError on a singular KKT matrix and
    ConvergenceError (with residuals attached) when max_iter is exhausted.
    ``start`` overrides the zero initial decision vector.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    n = problem.dimension
    d = np.zeros(n) if start is None else _check_vector(problem, start).copy()
    multipliers = np.zeros(3)

    def residuals(d, multipliers):
        grad_obj = np.asarray(problem.objective.gradient(d), dtype=float)
        jac = np.vstack([c.gradient(d) for c in problem.constraints])
        deviation = np.array(
            [c.value(d) - t for c, t in zip(problem.constraints, problem.targets)]
        )
        lagrangian_grad = grad_obj + jac.T @ multipliers
        return lagrangian_grad, jac, deviation

    steps = 0
    while True:
        lagrangian_grad, jac, deviation = residuals(d, multipliers)
        stationarity = float(np.abs(lagrangian_grad).max())
        feasibility = float(np.abs(deviation).max())
        if stationarity <= tol and feasibility <= tol:
            break
        if steps >= max_iter:
            raise ConvergenceError(
                f"no convergence within {max_iter} iterations",
                stationarity_residual=stationarity,
                feasibility_residual=feasibility,
            )

        hess = np.asarray(problem.objective.hessian(d), dtype=float)
        for mult, constraint in zip(multipliers, problem.constraints):
            hess = hess + mult * constraint.hessian(d)
        kkt = np.block([[hess, jac.T], [jac, np.zeros((3, 3))]])
        rhs = -np.concatenate([lagrangian_grad, deviation])
        try:
            step = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError as exc:
            raise DegenerateProblemError(f"singular KKT system: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise DegenerateProblemError("KKT solve produced non-finite step")
        d = d + step[:n]
        multipliers = multipliers + step[n:]
        steps += 1

    mults = tuple(float(m) for m in multipliers)
    return TosgSolution(
        d_star=d,
        multipliers=mults,
        tosg_value=tosg_value(problem, d, mults),
        stationarity_residual=stationarity,
        feasibility_residual=feasibility,
    )
