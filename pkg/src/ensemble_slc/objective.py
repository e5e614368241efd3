"""
Fidelity, ensemble performance and its gradient with respect to the pulse.

For ``dU/dt = -i H U`` with ``H = omega*H0 + theta*sum_m u_m(t) H_m`` the
functional derivative of ``J = |<psi(T)|target>|^2`` is

    dJ/du_m(t) = 2 Im( <psi(T)|target> <target| U(T) U(t)^dag theta H_m U(t) |psi0> ).

On a piecewise-constant grid the sensitivity of slice ``q`` is evaluated at
the slice midpoint ``t_{q-1} + dt/2``, which makes the error second order in
``dt``; boundary evaluation is only first order and is badly off wherever the
gradient is small. The array returned by :func:`gradient`
is this continuous-time density; the partial derivative with respect to the
slice value is approximately ``delta[q, m] * dt``.
"""

from dataclasses import dataclass

import numpy as np

from . import dynamics, linalg
from .errors import DimensionError, ValidationError


@dataclass(frozen=True, eq=False)
class GradientArray:
    """``values[q, m]`` is the ascent direction for channel ``m`` on slice ``q``."""

    values: np.ndarray
    sample_count: int


def fidelity(psi, phi):
    """``|<psi|phi>|``."""
    return abs(linalg.inner_product(psi, phi))


def _members(members):
    members = list(members)
    if not members:
        raise ValidationError("member list is empty")
    return members


def performance(model, members, control, workers=1):
    """Sample-averaged squared fidelity ``J_N`` over ``members``."""
    members = _members(members)
    psi_T = dynamics.final_states(model, members, control, workers=workers)
    return _mean_squared_overlap(np.conj(psi_T) @ model.target)


def _mean_squared_overlap(overlaps):
    return float(np.sum(np.abs(overlaps) ** 2) / overlaps.shape[0])


def _block_terms(model, members, control):
    """Final overlaps ``(N,)`` and per-member gradient terms ``(N, Q, M)``."""
    steps, half = dynamics.slice_steps(model, members, control, half=True)
    psi = dynamics.forward_states(steps, model.psi0)
    chi = dynamics.backward_costates(steps, model.target)
    overlap = np.conj(psi[:, -1]) @ model.target
    # move both from the left boundary of each slice to its midpoint
    psi_mid = (half @ psi[:, :-1, :, None])[..., 0]
    chi_mid = (half @ chi[:, :-1, :, None])[..., 0]
    h_psi = np.einsum("mij,nkj->nkmi", model.effective_controls, psi_mid)
    sens = np.einsum("nkmi,nki->nkm", h_psi, np.conj(chi_mid))
    theta = np.array([th for _, th in members], dtype=float)
    return overlap, 2.0 * np.imag(overlap[:, None, None] * theta[:, None, None] * sens)


def performance_and_gradient(model, members, control, workers=1):
    """Return ``(J_N, GradientArray)`` from a single forward/backward sweep.

    The average over members is a plain sum in member order divided by N.
    """
    members = _members(members)
    dynamics.check_channels(model, control)
    overlaps, terms = dynamics.map_members(lambda b: _block_terms(model, b, control), members, workers)
    j = _mean_squared_overlap(overlaps)
    return j, GradientArray(np.sum(terms, axis=0) / len(members), len(members))


def gradient(model, members, control, workers=1):
    return performance_and_gradient(model, members, control, workers=workers)[1]


def finite_difference_gradient(model, members, control, sites, eps=1e-6):
    """Central differences of ``J_N`` with respect to single slice values.

    Parameters
    ----------
    sites : iterable of (q, m)
        Slice/channel indices to perturb.

    Returns
    -------
    np.ndarray
        ``dJ_N/du[q, m]`` for each site, in order.
    """
    base = control.values
    out = []
    for q, m in sites:
        if not (0 <= q < control.n_slices and 0 <= m < control.n_controls):
            raise DimensionError(f"site {(q, m)} outside control of shape {base.shape}")
        plus, minus = base.copy(), base.copy()
        plus[q, m] += eps
        minus[q, m] -= eps
        jp = performance(model, members, control.with_values(plus))
        jm = performance(model, members, control.with_values(minus))
        out.append((jp - jm) / (2 * eps))
    return np.array(out)
