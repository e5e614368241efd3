"""
Propagation of ensemble members under piecewise-constant controls.

Every slice of a :class:`ControlField` is propagated by exactly
exponentiating its constant generator, so the only error is round-off.
Batched helpers work on whole member lists at once: the objective only needs
state vectors swept forward and costates swept backward, while
:func:`propagate` keeps the full cumulative propagators for one member.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class ControlField:
    """Piecewise-constant multi-channel pulse on ``[0, T]``.

    ``values[q, m]`` is channel ``m`` on slice ``q`` (0-based), which covers
    ``(q*dt, (q+1)*dt]``.
    """

    T: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValidationError(f"control values must be a (Q, M) array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("control values must be finite")
        if not (np.isfinite(self.T) and self.T > 0):
            raise ValidationError(f"horizon T must be positive, got {self.T}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "T", float(self.T))

    @property
    def n_slices(self):
        return self.values.shape[0]

    @property
    def n_controls(self):
        return self.values.shape[1]

    @property
    def dt(self):
        return self.T / self.n_slices

    def times(self):
        """Slice boundaries ``t_0 = 0, ..., t_Q = T``."""
        return np.arange(self.n_slices + 1) * self.dt

    def with_values(self, values):
        return ControlField(self.T, values)

    @classmethod
    def from_function(cls, func, T, n_slices, n_controls):
        """Sample ``func(t)`` at ``t_q = q*T/Q`` (``q = 1..Q``) on every channel."""
        t = np.arange(1, n_slices + 1) * (T / n_slices)
        column = np.asarray(func(t), dtype=float)
        return cls(T, np.repeat(column[:, None], n_controls, axis=1))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States and cumulative propagators at the slice boundaries."""

    times: np.ndarray
    states: np.ndarray
    propagators: np.ndarray

    @property
    def final_state(self):
        return self.states[-1]


def check_channels(model, control):
    if control.n_controls != model.n_controls:
        raise DimensionError(
            f"{model.kind.value} needs {model.n_controls} control channels, got {control.n_controls}"
        )


def slice_generators(model, members, control):
    """Generators for every member and slice, shape ``(N, Q, d, d)``.

    Built from the model's drift and per-channel generators; equal to
    calling :func:`model.generator` for each (member, slice) pair because
    the generator is affine in omega, theta and each control.
    """
    check_channels(model, control)
    params = np.asarray(members, dtype=float).reshape(-1, 2)
    omega, theta = params[:, 0], params[:, 1]
    ctrl = np.einsum("qm,mij->qij", control.values, model.control_generators)
    return (
        omega[:, None, None, None] * model.drift_generator
        + theta[:, None, None, None] * ctrl[None]
    )


def slice_steps(model, members, control, half=False):
    """Per-slice propagators ``exp(G_q dt)``, shape ``(N, Q, d, d)``.

    With ``half=True`` also returns the half-slice propagators
    ``exp(G_q dt/2)`` computed from the same decomposition.
    """
    gens = slice_generators(model, members, control)
    dt = control.dt
    if half:
        return tuple(linalg.skew_hermitian_exponentials(gens, dt, 0.5 * dt))
    return linalg.skew_hermitian_exponentials(gens, dt)[0]


def forward_states(steps, psi0):
    """``psi(t_0..t_Q)`` for each member, shape ``(N, Q + 1, d)``."""
    n, q, d, _ = steps.shape
    by_slice = np.ascontiguousarray(np.swapaxes(steps, 0, 1))
    out = np.empty((q + 1, n, d, 1), dtype=np.complex128)
    out[0] = np.asarray(psi0)[:, None]
    for k in range(q):
        np.matmul(by_slice[k], out[k], out=out[k + 1])
    return np.swapaxes(out[..., 0], 0, 1)


def backward_costates(steps, target):
    """``U(t_k) U(T)^dagger |target>`` for ``k = 0..Q``, shape ``(N, Q + 1, d)``."""
    n, q, d, _ = steps.shape
    by_slice = np.ascontiguousarray(linalg.dagger(np.swapaxes(steps, 0, 1)))
    out = np.empty((q + 1, n, d, 1), dtype=np.complex128)
    out[q] = np.asarray(target)[:, None]
    for k in range(q - 1, -1, -1):
        np.matmul(by_slice[k], out[k + 1], out=out[k])
    return np.swapaxes(out[..., 0], 0, 1)


def cumulative_propagators(steps):
    """``U(t_0..t_Q)`` with ``U(t_0) = I``, shape ``(N, Q + 1, d, d)``."""
    n, q, d, _ = steps.shape
    out = np.empty((n, q + 1, d, d), dtype=np.complex128)
    out[:, 0] = np.eye(d)
    for k in range(q):
        out[:, k + 1] = steps[:, k] @ out[:, k]
    return out


def map_members(fn, members, workers=1):
    """Apply ``fn`` to contiguous member blocks and join results along axis 0.

    ``fn`` takes a member list and returns an array (or tuple of arrays)
    with one leading entry per member. Blocks run on a thread pool and are
    re-joined in member order, so results do not depend on ``workers``.
    """
    members = list(members)
    if not members:
        raise ValidationError("member list is empty")
    workers = max(1, min(int(workers), len(members)))
    if workers == 1:
        return fn(members)
    bounds = np.linspace(0, len(members), workers + 1).astype(int)
    blocks = [members[a:b] for a, b in zip(bounds, bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, blocks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p, axis=0) for p in zip(*parts))
    return np.concatenate(parts, axis=0)


def propagate_many(model, members, control, workers=1):
    """Cumulative propagators ``U(t_0..t_Q)`` for each member, ``(N, Q + 1, d, d)``."""
    check_channels(model, control)
    return map_members(
        lambda b: cumulative_propagators(slice_steps(model, b, control)), members, workers
    )


def final_states(model, members, control, workers=1):
    """``psi(T)`` for each member, shape ``(N, d)``."""
    check_channels(model, control)
    return map_members(
        lambda b: forward_states(slice_steps(model, b, control), model.psi0)[:, -1], members, workers
    )


def propagate(model, member, control):
    """Propagate one member; returns a :class:`Trajectory`."""
    props = propagate_many(model, [member], control)[0]
    return Trajectory(times=control.times(), states=props @ model.psi0, propagators=props)


def bloch_coordinates(psi):
    """Bloch vector ``(x, y, z)`` of a normalized two-level state."""
    psi = linalg.as_state(psi)
    if psi.shape[0] != 2:
        raise DimensionError(f"Bloch coordinates need a two-level state, got dim {psi.shape[0]}")
    c0, c1 = psi
    cross = np.conj(c0) * c1
    return float(2 * cross.real), float(2 * cross.imag), float(abs(c0) ** 2 - abs(c1) ** 2)
