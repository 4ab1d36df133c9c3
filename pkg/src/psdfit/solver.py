"""Nonlinear conjugate gradient iteration with exact line search.

Directions mix the negative gradient with the previous direction through
the Fletcher-Reeves ratio; steps come from the exact quartic line search.
The direction resets to steepest descent on a fixed period and whenever
the mixed direction fails the descent test, so every line search starts
from a strict descent direction.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linesearch
from .problem import (
    FactorMatrix,
    GradientMatrix,
    ProblemInstance,
    _as_factor,
    assemble_X,
    gradient,
    objective,
    residual_error,
    validate,
)


class NumericalError(RuntimeError):
    """A non-finite objective or gradient value appeared during iteration."""


class TerminationReason(enum.Enum):
    GRADIENT_TOLERANCE = "gradient-tolerance"
    MAX_ITERATIONS = "max-iterations"
    DEGENERATE_DIRECTION = "degenerate-direction"


@dataclass
class SolverConfig:
    """Stopping and restart policy.

    epsilon is the gradient-norm stopping tolerance.  restart_period
    forces a steepest-descent reset every that many iterations —
    Fletcher-Reeves directions are known to stall on some instances
    without an occasional reset — while None disables periodic restarts,
    leaving only those triggered by a failed descent test.
    """

    epsilon: float = 1e-4
    max_iterations: int = 10000
    restart_period: int | None = 200
    enforce_descent: bool = True

    def check(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.restart_period is not None and self.restart_period < 1:
            raise ValueError("restart_period must be at least 1")


@dataclass
class IterationRecord:
    index: int
    f_value: float
    grad_norm: float
    residual: float
    step: float
    beta: float


@dataclass
class SolverResult:
    Y_final: FactorMatrix
    X_final: np.ndarray
    iterations: int
    converged: bool
    trace: list[IterationRecord] = field(repr=False)
    termination_reason: TerminationReason


def fr_beta(grad_next: GradientMatrix, grad_prev: GradientMatrix) -> float:
    """Fletcher-Reeves mixing ratio ||grad_next||_F^2 / ||grad_prev||_F^2."""
    denom = float(np.sum(grad_prev * grad_prev))
    if denom == 0.0:
        raise ValueError("previous gradient is zero; the iteration should have stopped")
    return float(np.sum(grad_next * grad_next)) / denom


def step(
    instance: ProblemInstance,
    Y: FactorMatrix,
    grad: GradientMatrix,
    D,
    config: SolverConfig,
    *,
    index: int = 1,
    force_restart: bool = False,
):
    """One iteration: exact step along D, new gradient, next direction.

    Requires D to be a descent direction (tr(grad^T D) < 0).  Returns
    (Y_next, grad_next, D_next, record).  The next direction resets to the
    negative gradient when force_restart is set or, with enforce_descent,
    when the Fletcher-Reeves direction fails the descent test; beta is
    recorded as 0 in both cases.
    """
    found = linesearch.exact_step(instance, Y, D)
    t = found.t_star
    Y_next = Y + t * D
    grad_next = gradient(instance, Y_next)
    if force_restart:
        beta = 0.0
        D_next = -grad_next
    else:
        beta = fr_beta(grad_next, grad)
        D_next = -grad_next + beta * D
        if config.enforce_descent and float(np.sum(grad_next * D_next)) >= 0.0:
            beta = 0.0
            D_next = -grad_next
    record = IterationRecord(
        index=index,
        f_value=objective(instance, Y_next),
        grad_norm=float(np.linalg.norm(grad_next)),
        residual=residual_error(instance, Y_next),
        step=t,
        beta=beta,
    )
    return Y_next, grad_next, D_next, record


def solve(
    instance: ProblemInstance,
    Y0: FactorMatrix | None = None,
    config: SolverConfig | None = None,
    *,
    seed: int = 0,
    callback=None,
) -> SolverResult:
    """Minimize the objective from Y0, tracing every iteration.

    Stops when the gradient Frobenius norm drops below config.epsilon, the
    iteration limit is reached, or the line search hits a degenerate
    direction.  When Y0 is None the start point is drawn uniformly from
    [0, 1) using the given seed.  The optional callback is invoked after
    each iteration as callback(record, Y, grad, direction).

    The f values along the trace are nonincreasing; identical inputs
    produce identical traces.
    """
    validate(instance).raise_if_invalid()
    if config is None:
        config = SolverConfig()
    config.check()
    restart_period = config.restart_period  # None: no periodic restarts

    if Y0 is None:
        Y0 = np.random.default_rng(seed).random((instance.n, instance.k))
    Y = _as_factor(instance, Y0, name="Y0")

    grad = gradient(instance, Y)
    f = objective(instance, Y)
    grad_norm = float(np.linalg.norm(grad))
    if not (np.isfinite(f) and np.isfinite(grad_norm)):
        raise NumericalError("non-finite objective or gradient at iteration 0")
    trace = [
        IterationRecord(
            index=0,
            f_value=f,
            grad_norm=grad_norm,
            residual=residual_error(instance, Y),
            step=0.0,
            beta=0.0,
        )
    ]

    D = -grad
    k = 0
    converged = False
    while True:
        if trace[-1].grad_norm < config.epsilon:
            reason = TerminationReason.GRADIENT_TOLERANCE
            converged = True
            break
        if k >= config.max_iterations:
            reason = TerminationReason.MAX_ITERATIONS
            break
        force = restart_period is not None and (k + 1) % restart_period == 0
        try:
            Y, grad, D, record = step(
                instance, Y, grad, D, config, index=k + 1, force_restart=force
            )
        except linesearch.DegenerateDirectionError:
            reason = TerminationReason.DEGENERATE_DIRECTION
            break
        except linesearch.NonDescentDirectionError:
            # Rounding can spoil the mixed direction's descent property even
            # though the test passed at construction; one steepest-descent
            # retry restores it unless the gradient direction itself fails.
            if not config.enforce_descent or np.array_equal(D, -grad):
                reason = TerminationReason.DEGENERATE_DIRECTION
                break
            D = -grad
            try:
                Y, grad, D, record = step(
                    instance, Y, grad, D, config, index=k + 1, force_restart=force
                )
            except (
                linesearch.DegenerateDirectionError,
                linesearch.NonDescentDirectionError,
            ):
                reason = TerminationReason.DEGENERATE_DIRECTION
                break
        if not (np.isfinite(record.f_value) and np.isfinite(record.grad_norm)):
            raise NumericalError(
                f"non-finite objective or gradient at iteration {k + 1}"
            )
        trace.append(record)
        if callback is not None:
            callback(record, Y, grad, D)
        k += 1

    return SolverResult(
        Y_final=Y,
        X_final=assemble_X(Y),
        iterations=k,
        converged=converged,
        trace=trace,
        termination_reason=reason,
    )
