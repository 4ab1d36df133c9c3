"""Problem data and the fitting objective.

A problem instance is a collection of pairs (A_i, B_i) with A_i square of
side m_i and B_i of shape m_i x n, together with a rank bound k <= n.  The
task is to pick a symmetric positive semidefinite X of rank at most k
minimizing the sum of ||A_i - B_i X B_i^T||_F^2.  Writing X = Y Y^T with Y
of shape n x k turns this into an unconstrained problem in Y; this module
provides the objective, its analytic gradient, the relative residual
progress metric, and the PSD assembly X = Y Y^T.

All functions are pure and safe to call from multiple threads.  Sums over
pairs accumulate left to right in pair order, so results are reproducible.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import _kernels

# An n x k factor matrix parametrizing X = Y Y^T, and its gradient (same shape).
FactorMatrix = NDArray[np.float64]
GradientMatrix = NDArray[np.float64]


class ValidationError(ValueError):
    """An operation was given a problem instance violating its invariants."""


class DegenerateInstanceError(ValueError):
    """All A_i are zero, so the relative residual is undefined."""


@dataclass(frozen=True)
class ProblemInstance:
    """The pairs (A_i, B_i) plus the column dimension n and rank bound k."""

    pairs: tuple
    n: int
    k: int

    def __post_init__(self):
        norm = tuple(
            (
                np.ascontiguousarray(A, dtype=np.float64),
                np.ascontiguousarray(B, dtype=np.float64),
            )
            for A, B in self.pairs
        )
        object.__setattr__(self, "pairs", norm)

    @property
    def m(self):
        return len(self.pairs)

    @property
    def sizes(self):
        """The observation sides m_i."""
        return tuple(B.shape[0] for _, B in self.pairs)


@dataclass
class Violation:
    code: str  # "empty-instance" | "dimension-mismatch" | "rank-out-of-range"
    pair: int | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def raise_if_invalid(self):
        if not self.ok:
            raise ValidationError("; ".join(v.message for v in self.violations))


def validate(instance: ProblemInstance) -> ValidationReport:
    """Check all instance invariants, reporting every violation found."""
    report = ValidationReport()

    def bad(code, pair, message):
        report.violations.append(Violation(code, pair, message))

    if len(instance.pairs) == 0:
        bad("empty-instance", None, "instance has no (A, B) pairs")
    for i, (A, B) in enumerate(instance.pairs):
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            bad(
                "dimension-mismatch",
                i,
                f"pair {i}: A must be square, got shape {A.shape}",
            )
        if B.ndim != 2:
            bad("dimension-mismatch", i, f"pair {i}: B must be a matrix, got ndim {B.ndim}")
            continue
        if A.ndim == 2 and A.shape[0] == A.shape[1] and B.shape[0] != A.shape[0]:
            bad(
                "dimension-mismatch",
                i,
                f"pair {i}: B has {B.shape[0]} rows, expected {A.shape[0]} to match A",
            )
        if B.shape[1] != instance.n:
            bad(
                "dimension-mismatch",
                i,
                f"pair {i}: B has {B.shape[1]} columns, expected n={instance.n}",
            )
    if not (1 <= instance.k <= instance.n):
        bad(
            "rank-out-of-range",
            None,
            f"rank bound k={instance.k} outside [1, n]={instance.n}",
        )
    return report


def _as_factor(instance: ProblemInstance, Y, name="Y") -> FactorMatrix:
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    if Y.shape != (instance.n, instance.k):
        raise ValueError(
            f"{name} has shape {Y.shape}, expected ({instance.n}, {instance.k})"
        )
    return Y


def objective(instance: ProblemInstance, Y: FactorMatrix) -> float:
    """Sum over pairs of ||A_i - B_i Y Y^T B_i^T||_F^2 (nonnegative)."""
    Y = _as_factor(instance, Y)
    acc = 0.0
    for A, B in instance.pairs:
        acc += _kernels.residual_sq(A, B, Y)
    return acc


def gradient(instance: ProblemInstance, Y: FactorMatrix) -> GradientMatrix:
    """Analytic gradient of `objective` with respect to Y.

    Equals sum_i (4 B_i^T B_i Y Y^T B_i^T B_i Y - 2 B_i^T A_i B_i Y
    - 2 B_i^T A_i^T B_i Y); the A_i and A_i^T terms stay distinct because
    A_i need not be symmetric.  Computed in the factored form
    2 B_i^T (2 B_i Y Y^T B_i^T - A_i - A_i^T) B_i Y, which the tests pin
    against the expanded form.
    """
    Y = _as_factor(instance, Y)
    out = np.zeros((instance.n, instance.k))
    for A, B in instance.pairs:
        _kernels.gradient_accum(A, B, Y, out)
    return out


def residual_error(instance: ProblemInstance, Y: FactorMatrix) -> float:
    """Sum of residual Frobenius norms over the sum of ||A_i||_F.

    Note the numerator uses plain (not squared) norms, summed across pairs
    before dividing.
    """
    Y = _as_factor(instance, Y)
    denom = 0.0
    for A, _ in instance.pairs:
        denom += float(np.linalg.norm(A, "fro"))
    if denom == 0.0:
        raise DegenerateInstanceError(
            "all A_i are zero; relative residual is undefined"
        )
    num = 0.0
    for A, B in instance.pairs:
        num += np.sqrt(_kernels.residual_sq(A, B, Y))
    return num / denom


def assemble_X(Y: FactorMatrix) -> NDArray[np.float64]:
    """Assemble X = Y Y^T, symmetrized exactly by averaging with its transpose.

    The result is symmetric PSD with rank at most the column count of Y.
    """
    Y = np.asarray(Y, dtype=np.float64)
    X = Y @ Y.T
    return (X + X.T) / 2.0
