"""Symmetric games of timing with skew-symmetric kernels.

A kernel is built from its upper-triangle generator A(x, y), defined for
x <= y: the matrix realization carries A above the diagonal, zeros on it,
and -A(y, x) below, which enforces K(x, y) = -K(y, x) to the bit.  The
game value is therefore 0 and both players share one optimal strategy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .matrix_game import MixedStrategy, PayoffMatrix, solve_exact

ATOM_TOL = 1e-6
_STRICT_TOL = 1e-12
_CONTINUITY_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class TimingKernel:
    """Grid discretization of a skew-symmetric timing kernel."""

    grid: np.ndarray
    a_upper: np.ndarray  # A(x_i, x_j) for i <= j, NaN below the diagonal
    matrix: np.ndarray

    def __post_init__(self):
        for name in ("grid", "a_upper", "matrix"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.grid.shape[0]
        if self.grid.ndim != 1 or n < 3:
            raise InputError("kernel grid needs at least 3 points")
        if self.grid[0] != 0.0 or self.grid[-1] != 1.0 or np.any(np.diff(self.grid) <= 0):
            raise InputError("grid must increase strictly from 0 to 1")
        if self.matrix.shape != (n, n) or self.a_upper.shape != (n, n):
            raise InputError("kernel matrices must be square over the grid")
        if not np.array_equal(self.matrix, -self.matrix.T):
            raise InputError("kernel matrix must be exactly skew-symmetric")

    @property
    def grid_n(self) -> int:
        return self.grid.shape[0]

    def a_at_1_1(self) -> float:
        return float(self.a_upper[-1, -1])

    def a_at_0_1(self) -> float:
        return float(self.a_upper[0, -1])

    def basic_interval_start(self) -> float | None:
        """Smallest grid point where A(x, x) >= 0, or None if there is none."""
        diag = np.diagonal(self.a_upper)
        hits = np.nonzero(diag >= 0.0)[0]
        return float(self.grid[hits[0]]) if hits.size else None


def _evaluate_upper(a, grid: np.ndarray) -> np.ndarray:
    n = grid.shape[0]
    x, y = np.meshgrid(grid, grid, indexing="ij")
    try:
        # A need only be defined for x <= y; mask out anything it produced below.
        with np.errstate(all="ignore"):
            values = np.asarray(a(x, y), dtype=float)
        if values.shape != (n, n):
            raise ValueError
    except Exception:
        values = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                values[i, j] = a(grid[i], grid[j])
    upper = np.where(np.triu(np.ones((n, n), dtype=bool)), values, np.nan)
    if not np.all(np.isfinite(upper[np.triu_indices(n)])):
        raise InputError("A(x, y) must be finite on the closed triangle x <= y")
    return upper


def kernel_from_upper(grid: np.ndarray, a_upper: np.ndarray) -> TimingKernel:
    """Assemble the skew-symmetric matrix from triangle values of A."""
    strict = np.triu(a_upper, k=1)
    return TimingKernel(grid=grid, a_upper=a_upper, matrix=strict - strict.T)


def build_kernel(a, grid_n: int) -> TimingKernel:
    """Realize A(x, y) on a uniform grid; skew-symmetry holds by construction."""
    if grid_n < 3:
        raise InputError("grid_n must be at least 3")
    grid = np.linspace(0.0, 1.0, grid_n)
    return kernel_from_upper(grid, _evaluate_upper(a, grid))


def duel_kernel_fn(x, y):
    """One-shot symmetric silent duel generator: hit now vs. survive and be hit."""
    return x - y + x * y


def affine_kernel_fn(cx: float, cy: float, cxy: float, c0: float):
    def a(x, y):
        return cx * x + cy * y + cxy * x * y + c0

    return a


def kernel_fn_from_spec(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError("kernel generator document needs a 'kind' field")
    kind = doc["kind"]
    if kind == "duel":
        return duel_kernel_fn
    if kind == "affine":
        try:
            return affine_kernel_fn(
                float(doc["cx"]), float(doc["cy"]), float(doc["cxy"]), float(doc["c0"])
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise InputError(f"bad affine kernel document: {exc}") from None
    raise InputError(f"unknown kernel kind {kind!r}")


def kernel_from_spec(doc: dict) -> TimingKernel:
    """Build a kernel from `{"A": {...}, "grid_n": n}`."""
    if not isinstance(doc, dict) or "A" not in doc or "grid_n" not in doc:
        raise InputError("kernel document needs 'A' and 'grid_n' fields")
    try:
        grid_n = int(doc["grid_n"])
    except (TypeError, ValueError):
        raise InputError("grid_n must be an integer") from None
    return build_kernel(kernel_fn_from_spec(doc["A"]), grid_n)


@dataclass(frozen=True)
class ValidationReport:
    """Advisory structure checks on the kernel generator; solving never blocks.

    The no-linear-intervals regularity condition is not observable on a
    grid and is reported as not evaluated (None).
    """

    strictly_increasing_in_x: bool
    strictly_decreasing_in_y: bool
    nonneg_x_slope: bool
    nonpos_y_slope: bool
    continuity_proxy: bool
    no_linear_intervals: None = None

    def to_dict(self) -> dict:
        return {
            "strictly_increasing_in_x": self.strictly_increasing_in_x,
            "strictly_decreasing_in_y": self.strictly_decreasing_in_y,
            "nonneg_x_slope": self.nonneg_x_slope,
            "nonpos_y_slope": self.nonpos_y_slope,
            "continuity_proxy": self.continuity_proxy,
            "no_linear_intervals": self.no_linear_intervals,
        }


def validate_kernel(kernel: TimingKernel) -> ValidationReport:
    """Check monotonicity and slope signs of A on the triangle x <= y."""
    a = kernel.a_upper
    n = kernel.grid_n
    x_diffs = []  # along x, fixed y, within x <= y
    y_diffs = []  # along y, fixed x
    for j in range(1, n):
        x_diffs.append(np.diff(a[: j + 1, j]))
    for i in range(n - 1):
        y_diffs.append(np.diff(a[i, i:]))
    dx = np.concatenate(x_diffs) if x_diffs else np.empty(0)
    dy = np.concatenate(y_diffs) if y_diffs else np.empty(0)

    steps = np.concatenate([np.abs(dx), np.abs(dy)]) if dx.size + dy.size else np.empty(0)
    tri = a[np.triu_indices(n)]
    value_range = float(tri.max() - tri.min())
    step_bound = _CONTINUITY_FACTOR * (value_range + _STRICT_TOL) / (n - 1)

    return ValidationReport(
        strictly_increasing_in_x=bool(np.all(dx > _STRICT_TOL)) if dx.size else True,
        strictly_decreasing_in_y=bool(np.all(dy < -_STRICT_TOL)) if dy.size else True,
        nonneg_x_slope=bool(np.all(dx >= -_STRICT_TOL)),
        nonpos_y_slope=bool(np.all(dy <= _STRICT_TOL)),
        continuity_proxy=bool(np.all(steps <= step_bound)) if steps.size else True,
    )


@dataclass(frozen=True)
class BoundaryClass:
    """Pure-strategy classification from the generator's corner values."""

    label: str  # "pure_at_1" | "pure_at_0" | "interior"
    a11: float
    a01: float

    @property
    def witness(self) -> float:
        return self.a11 if self.label == "pure_at_1" else self.a01

    def to_dict(self) -> dict:
        return {"label": self.label, "a11": self.a11, "a01": self.a01, "witness": self.witness}


def classify_boundary(kernel: TimingKernel) -> BoundaryClass:
    """pure_at_1 if A(1,1) <= 0, else pure_at_0 if A(0,1) >= 0, else interior."""
    a11 = kernel.a_at_1_1()
    a01 = kernel.a_at_0_1()
    if a11 <= 0.0:
        label = "pure_at_1"
    elif a01 >= 0.0:
        label = "pure_at_0"
    else:
        label = "interior"
    return BoundaryClass(label=label, a11=a11, a01=a01)


@dataclass(frozen=True)
class TimingSolution:
    """Shared optimal strategy of the symmetric timing game (value 0)."""

    value: float
    strategy: MixedStrategy
    support_lo: float
    has_zero_atom: bool
    residual_eq11: float
    residual_eq12: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "strategy": self.strategy.to_dict(),
            "support_lo": self.support_lo,
            "has_zero_atom": self.has_zero_atom,
            "residual_eq11": self.residual_eq11,
            "residual_eq12": self.residual_eq12,
        }


def verify_optimality(kernel: TimingKernel, strategy: MixedStrategy) -> tuple[float, float]:
    """Residuals of the two optimality conditions for a candidate strategy F.

    Condition one requires the response payoff V(y) = sum_x K(x, y) F(x) to
    be nonnegative everywhere; its residual is the worst shortfall.
    Condition two requires sum_y V(y) F(y) = 0, an identity under
    skew-symmetry; its residual is the absolute deviation.
    """
    if len(strategy) != kernel.grid_n:
        raise InputError(
            f"strategy has {len(strategy)} weights for a {kernel.grid_n}-point grid"
        )
    weights = strategy.on_grid()
    response = weights @ kernel.matrix
    residual_eq11 = max(0.0, -float(response.min()))
    residual_eq12 = abs(float(response @ weights))
    return residual_eq11, residual_eq12


def solve_timing(kernel: TimingKernel, tol: float = 1e-9) -> TimingSolution:
    """Solve the discretized timing game; both players share the strategy."""
    game = PayoffMatrix(
        entries=kernel.matrix, row_labels=kernel.grid, col_labels=kernel.grid
    )
    solution = solve_exact(game, tol=tol)
    strategy = solution.row_strategy
    weights = strategy.on_grid()
    has_zero_atom = bool(weights[0] > ATOM_TOL)
    positive = np.nonzero(weights[1:] > ATOM_TOL)[0] + 1
    if positive.size:
        support_lo = float(kernel.grid[positive[0]])
    else:
        support_lo = 0.0  # all mass at the origin atom
    residual_eq11, residual_eq12 = verify_optimality(kernel, strategy)
    return TimingSolution(
        value=solution.value,
        strategy=strategy,
        support_lo=support_lo,
        has_zero_atom=has_zero_atom,
        residual_eq11=residual_eq11,
        residual_eq12=residual_eq12,
    )


def spectrum(
    strategy: MixedStrategy, kernel: TimingKernel, atom_tol: float = ATOM_TOL
) -> tuple[np.ndarray, bool]:
    """Grid points carrying mass above atom_tol, with the zero atom split off."""
    if not atom_tol > 0:
        raise InputError("atom_tol must be positive")
    if len(strategy) != kernel.grid_n:
        raise InputError("strategy does not match the kernel grid")
    weights = strategy.on_grid()
    has_zero_atom = bool(weights[0] > atom_tol)
    idx = np.nonzero(weights[1:] > atom_tol)[0] + 1
    return kernel.grid[idx], has_zero_atom


def spectrum_in_basic_interval(
    kernel: TimingKernel, strategy: MixedStrategy, atom_tol: float = ATOM_TOL
) -> bool | None:
    """Advisory check that the spectrum lies in [b, 1], b the first point
    where A(x, x) turns nonnegative.  None when b is undefined."""
    b = kernel.basic_interval_start()
    if b is None:
        return None
    points, _ = spectrum(strategy, kernel, atom_tol)
    return bool(points.size == 0 or points.min() >= b)
