"""
Sampling-based learning control: gradient-flow training and random testing.

Training integrates the gradient flow ``du/ds = grad J_N(u)`` with forward
Euler steps of fixed size ``eta`` on the sample grid until ``J_N > 1 - eps``.
Testing applies the learned pulse to further members and reports the
(unsquared) fidelity statistics.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .dynamics import ControlField, final_states
from .errors import ConfigurationError, NumericalFailure, ValidationError
from .objective import performance_and_gradient

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainConfig:
    eta: float
    epsilon: float
    initial_control: ControlField
    max_iterations: int = 50_000
    # retry a non-finite step with eta halved; off in all reproduction presets
    halve_on_nan: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise ConfigurationError(f"eta must be finite and non-negative, got {self.eta}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ConfigurationError(f"max_iterations must be a positive integer, got {self.max_iterations}")


@dataclass(eq=False)
class TrainResult:
    learned_control: ControlField
    convergence_log: list = field(default_factory=list)
    converged: bool = False
    iterations_used: int = 0

    @property
    def final_performance(self):
        return self.convergence_log[-1][1]

    @property
    def decreases(self):
        """Number of iterations at which J_N went down."""
        values = [j for _, j in self.convergence_log]
        return sum(b < a for a, b in zip(values, values[1:]))


@dataclass(eq=False)
class TestReport:
    members: list
    fidelities: np.ndarray
    seed: int = None

    # pytest would otherwise try to collect this class
    __test__ = False

    @property
    def mean(self):
        return float(np.mean(self.fidelities))

    @property
    def min(self):
        return float(np.min(self.fidelities))

    @property
    def max(self):
        return float(np.max(self.fidelities))

    @property
    def count(self):
        return len(self.fidelities)


def train(model, grid, config, workers=1, callback=None):
    """Learn a pulse that maximizes ``J_N`` over the sample ``grid``.

    Parameters
    ----------
    model : SystemModel
    grid : list of MemberParams
        Training members; ``J_N`` averages over them.
    config : TrainConfig
    workers : int
        Threads used for per-member propagation. Results do not depend on it.
    callback : callable, optional
        Called as ``callback(k, J_N)`` after every evaluation.

    Returns
    -------
    TrainResult
        ``convergence_log`` holds ``(k, J_N(u^k))`` for every evaluated
        iterate. The learned control is the last evaluated iterate.

    Raises
    ------
    NumericalFailure
        If ``J_N`` or the gradient becomes non-finite.
    """
    grid = list(grid)
    if not grid:
        raise ValidationError("training grid is empty")
    control = config.initial_control
    eta = config.eta
    log = []
    prev = None
    k = 0
    while True:
        j, grad = performance_and_gradient(model, grid, control, workers=workers)
        finite = np.isfinite(j) and np.all(np.isfinite(grad.values))
        if not finite:
            if config.halve_on_nan and prev is not None:
                eta *= 0.5
                logger.warning("non-finite values at iteration %d, halving eta to %g", k, eta)
                control, j, grad = prev
            else:
                raise NumericalFailure("non-finite performance or gradient", k)
        else:
            log.append((k, j))
            if callback is not None:
                callback(k, j)
            if j > 1.0 - config.epsilon:
                return TrainResult(control, log, True, k)
        if k >= config.max_iterations:
            return TrainResult(control, log, False, k)
        prev = (control, j, grad)
        try:
            control = control.with_values(control.values + eta * grad.values)
        except ValidationError:
            raise NumericalFailure("control update overflowed", k) from None
        k += 1


def evaluate(model, control, members, seed=None, workers=1):
    """Fidelity ``|<psi(T)|target>|`` of ``control`` on each member."""
    members = list(members)
    if not members:
        raise ValidationError("test member list is empty")
    psi_T = final_states(model, members, control, workers=workers)
    fids = np.abs(np.conj(psi_T) @ model.target)
    return TestReport(members=members, fidelities=fids, seed=seed)
