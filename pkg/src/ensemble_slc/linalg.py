"""
Small dense complex linear algebra.

Matrices and states are plain ``numpy`` arrays of dtype ``complex128``.
The helpers here validate shapes and provide the matrix exponential used
for the piecewise-constant slice propagators. Most functions also accept
stacks of matrices (``(..., n, n)``) so that whole ensembles can be
propagated in one call.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionError

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12


def as_matrix(a):
    """Return ``a`` as a square complex matrix, raising on bad shapes."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def as_state(psi):
    """Return ``psi`` as a complex 1-d amplitude vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] < 1:
        raise DimensionError(f"expected a state vector, got shape {psi.shape}")
    return psi


def dagger(a):
    """Conjugate transpose over the last two axes (works on stacks)."""
    return np.conj(np.swapaxes(a, -1, -2))


def adjoint(a):
    return dagger(as_matrix(a))


def mul(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def apply(a, psi):
    """Matrix-vector product ``a @ psi``."""
    a, psi = as_matrix(a), as_state(psi)
    if a.shape[1] != psi.shape[0]:
        raise DimensionError(f"cannot apply {a.shape} matrix to dim {psi.shape[0]} state")
    return a @ psi


def inner_product(psi, phi):
    """``<psi|phi>``, conjugate-linear in the first argument."""
    psi, phi = as_state(psi), as_state(phi)
    if psi.shape != phi.shape:
        raise DimensionError(f"dimension mismatch: {psi.shape[0]} vs {phi.shape[0]}")
    return complex(np.vdot(psi, phi))


def norm(psi):
    return float(np.linalg.norm(as_state(psi)))


def is_normalized(psi, tol=UNITARY_TOL):
    return abs(norm(psi) - 1.0) <= tol


def is_hermitian(a, tol=HERMITIAN_TOL):
    a = as_matrix(a)
    return bool(np.allclose(a, dagger(a), rtol=0.0, atol=tol))


def is_skew_hermitian(a, tol=HERMITIAN_TOL):
    a = as_matrix(a)
    return bool(np.allclose(a, -dagger(a), rtol=0.0, atol=tol))


def unitarity_error(u):
    """Frobenius norm of ``U^dagger U - I``; accepts stacks."""
    u = np.asarray(u, dtype=np.complex128)
    eye = np.eye(u.shape[-1])
    return np.linalg.norm(dagger(u) @ u - eye, axis=(-2, -1))


def is_unitary(u, tol=UNITARY_TOL):
    return bool(unitarity_error(as_matrix(u)) <= tol)


def _pauli_exponentials(a, factors):
    # i*A = c*I + b.sigma has eigenvalues c +- |b|, so
    # exp(f*A) = exp(-i c f) (cos(|b| f) I - i sin(|b| f)/|b| b.sigma)
    h = 1j * a
    c = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
    bz = 0.5 * (h[..., 0, 0] - h[..., 1, 1]).real
    bx = h[..., 0, 1].real
    by = -h[..., 0, 1].imag
    r = np.sqrt(bx * bx + by * by + bz * bz)
    out = []
    for f in factors:
        phase = np.exp(-1j * c * f)
        cos = np.cos(r * f)
        sin_over_r = f * np.sinc(r * f / np.pi)
        e = np.empty(a.shape, dtype=np.complex128)
        e[..., 0, 0] = phase * (cos - 1j * sin_over_r * bz)
        e[..., 1, 1] = phase * (cos + 1j * sin_over_r * bz)
        e[..., 0, 1] = phase * (-1j * sin_over_r * (bx - 1j * by))
        e[..., 1, 0] = phase * (-1j * sin_over_r * (bx + 1j * by))
        out.append(e)
    return out


def _divided_difference(x, y, tau):
    # (e^{-i tau y} - e^{-i tau x}) / (y - x) without cancellation
    return -1j * tau * np.exp(-0.5j * tau * (x + y)) * np.sinc(0.5 * tau * (y - x) / np.pi)


def _hermitian3_eigenvalues(h):
    """Ascending eigenvalues of a stack of Hermitian 3x3 matrices (trigonometric form)."""
    q = np.trace(h, axis1=-2, axis2=-1).real / 3
    k = h - q[..., None, None] * np.eye(3)
    p = np.sqrt(np.sum(np.abs(k) ** 2, axis=(-2, -1)) / 6)
    det = (
        k[..., 0, 0] * (k[..., 1, 1] * k[..., 2, 2] - k[..., 1, 2] * k[..., 2, 1])
        - k[..., 0, 1] * (k[..., 1, 0] * k[..., 2, 2] - k[..., 1, 2] * k[..., 2, 0])
        + k[..., 0, 2] * (k[..., 1, 0] * k[..., 2, 1] - k[..., 1, 1] * k[..., 2, 0])
    ).real
    safe = np.where(p > 0, p, 1.0)
    r = np.clip(det / (2 * safe**3), -1.0, 1.0)
    phi = np.arccos(r) / 3
    hi = q + 2 * p * np.cos(phi)
    lo = q + 2 * p * np.cos(phi + 2 * np.pi / 3)
    return lo, 3 * q - lo - hi, hi


def _interpolated_exponentials3(a, factors):
    # exp(-i tau H) = f(l1) I + f[l1,l2] (H - l1) + f[l1,l2,l3] (H - l1)(H - l2)
    # on the eigenvalues l1 <= l2 <= l3 of H = i*A (Newton form of Cayley-Hamilton)
    h = 1j * a
    l1, l2, l3 = _hermitian3_eigenvalues(h)
    diag = np.arange(3)
    k1 = h.copy()
    k1[..., diag, diag] -= l1[..., None]
    k2 = h.copy()
    k2[..., diag, diag] -= l2[..., None]
    k12 = k1 @ k2
    spread = l3 - l1
    degenerate = spread <= 0
    denom = np.where(degenerate, 1.0, spread)
    out = []
    for tau in factors:
        d12 = _divided_difference(l1, l2, tau)
        d23 = _divided_difference(l2, l3, tau)
        d123 = np.where(degenerate, -0.5 * tau**2 * np.exp(-1j * tau * l1), (d23 - d12) / denom)
        e = d123[..., None, None] * k12
        e += d12[..., None, None] * k1
        e[..., diag, diag] += np.exp(-1j * tau * l1)[..., None]
        out.append(e)
    return out


def skew_hermitian_exponentials(a, *factors):
    """``[exp(f*A) for f in factors]`` for a (stack of) skew-Hermitian ``A``.

    ``i*A`` is Hermitian with real spectrum ``lam`` and unitary eigenvectors
    ``V``, so ``exp(f*A) = V diag(exp(-i*f*lam)) V^dagger``; one
    decomposition serves every factor. For 2x2 and 3x3 matrices the
    spectrum is computed in closed form and the exponential is the
    interpolating polynomial of ``exp(-i*f*lam)`` on it, which avoids one
    LAPACK call per matrix. Results are unitary to round-off. No check is
    made that ``a`` is skew-Hermitian.
    """
    a = np.asarray(a, dtype=np.complex128)
    factors = factors or (1.0,)
    if a.shape[-1] == 2:
        return _pauli_exponentials(a, factors)
    if a.shape[-1] == 3:
        return _interpolated_exponentials3(a, factors)
    lam, v = np.linalg.eigh(1j * a)
    vh = dagger(v)
    return [(v * np.exp(-1j * f * lam)[..., None, :]) @ vh for f in factors]


def expm_skew_hermitian(a):
    """Exponentiate a (stack of) skew-Hermitian matrices."""
    return skew_hermitian_exponentials(a, 1.0)[0]


def mat_exp(a):
    """Matrix exponential ``e^A`` of a square matrix.

    Skew-Hermitian input goes through the eigendecomposition route, which
    keeps the result unitary; anything else falls back to scipy's
    scaling-and-squaring Pade ``expm``.
    """
    a = as_matrix(a)
    if is_skew_hermitian(a):
        return expm_skew_hermitian(a)
    return scipy.linalg.expm(a)
