"""Training grids and random test members over the (omega, theta) box."""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import MemberParams


@dataclass(frozen=True)
class DispersionSpec:
    """Dispersion bounds and grid resolution.

    ``omega`` ranges over ``[1 - Omega, 1 + Omega]`` and ``theta`` over
    ``[1 - Theta, 1 + Theta]``; each axis gets an odd number of samples.
    """

    Omega: float
    Theta: float
    N_Omega: int = 5
    N_Theta: int = 5

    def __post_init__(self):
        for name in ("Omega", "Theta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        for name in ("N_Omega", "N_Theta"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1 or value % 2 == 0:
                raise ConfigurationError(f"{name} must be a positive odd integer, got {value}")

    @property
    def size(self):
        return self.N_Omega * self.N_Theta


def grid_axis(bound, count):
    """``1 - bound + (2n - 1) * bound / count`` for ``n = 1..count``."""
    n = np.arange(1, count + 1)
    return 1.0 - bound + (2 * n - 1) * bound / count


def build_training_grid(spec):
    """All ``N_Omega * N_Theta`` combinations, row-major in (omega, theta)."""
    omegas = grid_axis(spec.Omega, spec.N_Omega)
    thetas = grid_axis(spec.Theta, spec.N_Theta)
    return [MemberParams(float(w), float(t)) for w in omegas for t in thetas]


def make_rng(seed):
    """PCG64 generator seeded through ``SeedSequence(seed)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed, n):
    """Independent per-worker streams: ``SeedSequence(seed).spawn(n)``."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def sample_test_members(Omega, Theta, count, seed):
    """Draw ``count`` members uniformly from the dispersion box.

    A single PCG64 stream draws a ``(count, 2)`` block of uniforms in
    ``[0, 1)`` row by row; column 0 maps to omega, column 1 to theta.
    The same seed always yields the same list.
    """
    if count < 1:
        raise ConfigurationError(f"test count must be >= 1, got {count}")
    if seed < 0 or seed >= 2**64:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    for name, value in (("Omega", Omega), ("Theta", Theta)):
        if not 0.0 <= value <= 1.0:
            raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
    r = make_rng(seed).random((count, 2))
    omegas = 1.0 - Omega + 2.0 * Omega * r[:, 0]
    thetas = 1.0 - Theta + 2.0 * Theta * r[:, 1]
    return [MemberParams(float(w), float(t)) for w, t in zip(omegas, thetas)]
