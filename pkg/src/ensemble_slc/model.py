"""
Preset quantum systems and the per-member generator.

Each member of an inhomogeneous ensemble evolves as ``dC/dt = G C`` with a
skew-Hermitian generator ``G`` that depends on the member's drift multiplier
``omega``, its control multiplier ``theta`` and the current control slice.

The two-level generators are written out entry by entry exactly as the
component ODEs are stated for those experiments. They are *not* rebuilt from
``-i(omega*H0 + theta*sum(u_m*H_m))`` with Pauli matrices, because the
printed ODEs differ from that form in the drift sign and in the ``0.5``
factor pattern. The three-level generator coincides with the operator form.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import ConfigurationError, DimensionError

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class ModelKind(str, enum.Enum):
    TWO_LEVEL_TWO_CONTROL = "two-level-two-control"
    TWO_LEVEL_SINGLE_CONTROL = "two-level-single-control"
    LAMBDA_THREE_LEVEL = "lambda-three-level"


class GeneratorRule(str, enum.Enum):
    """Which printed ODE form the generator follows."""

    TWO_CONTROL_F = "two-level f(u) = u2 - 0.5i u1"
    SINGLE_CONTROL_H = "two-level h(u) = u - 0.5i u"
    LAMBDA = "lambda three-level"


class MemberParams(NamedTuple):
    """Inhomogeneity of one ensemble member (``g(omega)=omega``, ``b(theta)=theta``)."""

    omega: float
    theta: float


@dataclass(frozen=True, eq=False)
class SystemModel:
    """A closed quantum system with drift and control Hamiltonians.

    ``drift`` and ``controls`` are the Hermitian operators of the physical
    model. The generator actually integrated is given by :func:`generator`
    according to ``generator_rule``; :attr:`effective_controls` are the
    Hermitian operators consistent with that generator and are the ones
    the gradient must use.
    """

    kind: ModelKind
    drift: np.ndarray
    controls: tuple
    psi0: np.ndarray
    target: np.ndarray
    generator_rule: GeneratorRule

    def __post_init__(self):
        dim = self.drift.shape[0]
        for op in (self.drift, *self.controls):
            if op.shape != (dim, dim) or not linalg.is_hermitian(op):
                raise ConfigurationError(f"{self.kind.value}: operators must be Hermitian {dim}x{dim}")
        for psi in (self.psi0, self.target):
            if psi.shape != (dim,) or not linalg.is_normalized(psi):
                raise ConfigurationError(f"{self.kind.value}: states must be normalized, dim {dim}")

    @property
    def dim(self):
        return self.drift.shape[0]

    @property
    def n_controls(self):
        return len(self.controls)

    @property
    def drift_generator(self):
        """``G`` at ``omega=1, theta=0``."""
        return generator(self, MemberParams(1.0, 0.0), np.zeros(self.n_controls))

    @property
    def control_generators(self):
        """``dG/du_m`` at ``theta=1``, shape ``(M, d, d)``.

        Exact because the generator is affine in every control channel.
        """
        unit = MemberParams(0.0, 1.0)
        return np.stack([generator(self, unit, e) for e in np.eye(self.n_controls)])

    @property
    def effective_controls(self):
        """Hermitian ``H_m := i dG/du_m / theta``, shape ``(M, d, d)``."""
        return 1j * self.control_generators


def _basis(dim, k):
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return e


def make_model(kind):
    """Build one of the preset systems.

    Parameters
    ----------
    kind : ModelKind or str
        ``"two-level-two-control"``, ``"two-level-single-control"`` or
        ``"lambda-three-level"``.
    """
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise ConfigurationError(f"unknown model kind {kind!r}") from None

    if kind is ModelKind.LAMBDA_THREE_LEVEL:
        h1 = np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=np.complex128)
        h2 = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=np.complex128)
        return SystemModel(
            kind=kind,
            drift=np.diag([1.5, 1.0, 0.0]).astype(np.complex128),
            controls=(h1, h2),
            psi0=np.full(3, 1 / np.sqrt(3), dtype=np.complex128),
            target=_basis(3, 2),
            generator_rule=GeneratorRule.LAMBDA,
        )

    if kind is ModelKind.TWO_LEVEL_TWO_CONTROL:
        controls = (0.5 * SIGMA_X, 0.5 * SIGMA_Y)
        rule = GeneratorRule.TWO_CONTROL_F
    else:
        controls = (0.5 * (SIGMA_X + SIGMA_Y),)
        rule = GeneratorRule.SINGLE_CONTROL_H
    return SystemModel(
        kind=kind,
        drift=0.5 * SIGMA_Z,
        controls=controls,
        psi0=_basis(2, 0),
        target=_basis(2, 1),
        generator_rule=rule,
    )


def generator(model, member, u_slice):
    """Skew-Hermitian generator ``G`` with ``dC/dt = G C`` for one slice.

    Parameters
    ----------
    model : SystemModel
    member : MemberParams
    u_slice : sequence of float
        Control values on the slice, one per channel.

    Returns
    -------
    np.ndarray
        ``(d, d)`` complex matrix.
    """
    u = np.asarray(u_slice, dtype=float)
    if u.shape != (model.n_controls,):
        raise DimensionError(f"{model.kind.value} takes {model.n_controls} controls, got shape {u.shape}")
    w, th = member

    rule = model.generator_rule
    if rule is GeneratorRule.LAMBDA:
        u1, u2 = u
        return np.array(
            [
                [-1.5j * w, 0, -1j * th * u2],
                [0, -1j * w, -1j * th * u1],
                [-1j * th * u2, -1j * th * u1, 0],
            ],
            dtype=np.complex128,
        )

    if rule is GeneratorRule.TWO_CONTROL_F:
        u1, u2 = u
        f = u2 - 0.5j * u1
    else:
        (v,) = u
        f = v - 0.5j * v
    return np.array(
        [
            [0.5j * w, th * f],
            [-th * np.conj(f), -0.5j * w],
        ],
        dtype=np.complex128,
    )
