import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ensemble_slc.errors import ConfigurationError
from ensemble_slc.sampling import DispersionSpec, build_training_grid, grid_axis, sample_test_members


def test_reference_grid_values():
    grid = build_training_grid(DispersionSpec(0.2, 0.2, 5, 5))
    axis = [0.84, 0.92, 1.00, 1.08, 1.16]
    expected = [(w, t) for w in axis for t in axis]
    assert len(grid) == 25
    np.testing.assert_allclose(np.array(grid), expected, rtol=0, atol=1e-15)


def test_single_sample_axis_is_nominal():
    assert build_training_grid(DispersionSpec(0.2, 0.2, 1, 1)) == [(1.0, 1.0)]


def test_zero_dispersion_collapses_axis():
    grid = build_training_grid(DispersionSpec(0.2, 0.0, 5, 5))
    assert {t for _, t in grid} == {1.0}


@settings(max_examples=100, deadline=None)
@given(bound=st.floats(0, 1), half=st.integers(0, 20))
def test_axis_is_symmetric_interior_and_equally_spaced(bound, half):
    n = 2 * half + 1
    x = grid_axis(bound, n)
    assert len(x) == n
    assert np.all(x >= 1 - bound - 1e-15) and np.all(x <= 1 + bound + 1e-15)
    np.testing.assert_allclose(x + x[::-1], 2.0, atol=1e-14)
    assert x[half] == pytest.approx(1.0, abs=1e-15)
    if n > 1:
        np.testing.assert_allclose(np.diff(x), 2 * bound / n, atol=1e-14)


@pytest.mark.parametrize("kwargs", [dict(N_Omega=4), dict(N_Theta=0), dict(Omega=-0.1), dict(Theta=1.5)])
def test_invalid_dispersion(kwargs):
    base = dict(Omega=0.2, Theta=0.2, N_Omega=5, N_Theta=5)
    with pytest.raises(ConfigurationError):
        DispersionSpec(**{**base, **kwargs})


def test_test_members_deterministic_and_seed_sensitive():
    a = sample_test_members(0.2, 0.2, 50, seed=3)
    assert a == sample_test_members(0.2, 0.2, 50, seed=3)
    assert a != sample_test_members(0.2, 0.2, 50, seed=4)
    # a longer draw extends the shorter one
    assert sample_test_members(0.2, 0.2, 80, seed=3)[:50] == a


def test_test_members_fill_the_box():
    r = np.array(sample_test_members(0.2, 0.1, 100_000, seed=1))
    w, t = r[:, 0], r[:, 1]
    assert w.min() >= 0.8 and w.max() < 1.2
    assert t.min() >= 0.9 and t.max() < 1.1
    assert abs(w.mean() - 1) < 0.003 and abs(t.mean() - 1) < 0.003
    # uniform on [1-a, 1+a] has variance a^2/3
    assert w.var() == pytest.approx(0.04 / 3, rel=0.02)
    assert abs(np.corrcoef(w, t)[0, 1]) < 0.02


@pytest.mark.parametrize("args", [(0.2, 0.2, 0, 1), (0.2, 0.2, 5, -1), (1.2, 0.2, 5, 1)])
def test_invalid_sampling_arguments(args):
    with pytest.raises(ConfigurationError):
        sample_test_members(*args)
