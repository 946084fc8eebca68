"""Riccati-Bessel functions of complex argument.

``psi_l(z) = z j_l(z)`` is regular at the origin, ``xi_l(z) = z h_l^(1)(z)``
is the outgoing second solution. Both satisfy

    f_{l-1} + f_{l+1} = (2l + 1)/z f_l,     f_l' = f_{l-1} - (l/z) f_l

and the Wronskian ``psi_l xi_l' - psi_l' xi_l = i``.

Algorithm
---------
* ``xi_l`` by upward recurrence from ``xi_0 = -i e^{iz}``,
  ``xi_{-1} = e^{iz}``; ``xi`` is never the minimal solution, so this is
  stable for every order.
* ``D_l = psi_l' / psi_l`` by downward recurrence, seeded at ``l_max``
  with a continued fraction (modified Lentz) for ``psi_l / psi_{l-1}``.
* ``psi_l = i / (xi_l' - D_l xi_l)`` from the Wronskian, so ``psi`` never
  goes through an unstable recurrence either.
* Arguments below the real axis are reflected into the upper half-plane.

The arguments may be arrays; outputs gain a trailing axis of length
``l_max + 1``.
"""

from typing import NamedTuple

import numpy as np

from .errors import DomainError, SpecialFunctionRangeError

__all__ = [
    "L_MAX",
    "IM_MAX",
    "RiccatiPair",
    "riccati_bessel",
    "psi",
    "xi",
    "wronskian_defect",
]

L_MAX = 64
IM_MAX = 200.0

_CF_TOL = 1e-16
_CF_MAXITER = 100_000
_TINY = 1e-300


class RiccatiPair(NamedTuple):
    value: complex
    derivative: complex
    order: int
    argument: complex


def _check(z, lmax, l_cap=L_MAX):
    if lmax < 0:
        raise DomainError("order must be non-negative")
    if lmax > l_cap:
        raise DomainError(f"order {lmax} exceeds l_max = {l_cap}")
    if np.any(z == 0):
        raise DomainError("Riccati-Bessel functions need z != 0")
    if np.any(np.abs(z.imag) > IM_MAX):
        raise SpecialFunctionRangeError(
            f"|Im z| = {np.max(np.abs(z.imag)):.4g} exceeds {IM_MAX}"
        )


def _ratio_cf(lmax, z):
    """``psi_L / psi_{L-1}`` by the continued fraction of the three-term recurrence.

    ``1 / ratio = c_L - 1/(c_{L+1} - 1/(c_{L+2} - ...))`` with
    ``c_m = (2m + 1)/z``; evaluated with the modified Lentz scheme.
    """
    f = (2 * lmax + 1) / z
    f = np.where(f == 0, _TINY, f)
    C = f.copy()
    D = np.zeros_like(f)
    active = np.ones(f.shape, dtype=bool)
    for j in range(1, _CF_MAXITER):
        b = (2 * (lmax + j) + 1) / z
        D = b - D
        D = np.where(D == 0, _TINY, D)
        C = b - 1.0 / C
        C = np.where(C == 0, _TINY, C)
        D = 1.0 / D
        delta = C * D
        f = np.where(active, f * delta, f)
        active &= np.abs(delta - 1.0) > _CF_TOL
        if not active.any():
            break
    else:  # pragma: no cover - only for |z| ~ 1e5
        raise SpecialFunctionRangeError("continued fraction did not converge")
    return 1.0 / f


def _xi_upward(lmax, z):
    shape = z.shape + (lmax + 1,)
    xi_ = np.empty(shape, dtype=complex)
    dxi = np.empty(shape, dtype=complex)
    e = np.exp(1j * z)
    prev = e  # xi_{-1}
    cur = -1j * e
    xi_[..., 0] = cur
    dxi[..., 0] = prev
    for l in range(1, lmax + 1):
        nxt = (2 * l - 1) / z * cur - prev
        prev, cur = cur, nxt
        xi_[..., l] = cur
        dxi[..., l] = prev - l / z * cur
    return xi_, dxi


def _psi_from_wronskian(lmax, z, xi_, dxi):
    D = np.empty(xi_.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = _ratio_cf(lmax, z)
        D[..., lmax] = 1.0 / ratio - lmax / z
        for l in range(lmax, 0, -1):
            D[..., l - 1] = l / z - 1.0 / (D[..., l] + l / z)
        psi_ = 1j / (dxi - D * xi_)
        # psi' = D psi, written so that a pole of D (zero of psi) stays finite
        big = np.abs(D) > 1.0
        dpsi = np.where(big, 1j / (dxi / np.where(big, D, 1.0) - xi_), D * psi_)
    return psi_, dpsi


def riccati_bessel(lmax, z, l_cap=L_MAX):
    """All orders ``0..lmax`` of ``psi``, ``psi'``, ``xi``, ``xi'`` at ``z``.

    Everything is computed in the closed upper half-plane. Below the real
    axis the mirror identities ``psi_l(conj z) = conj psi_l(z)`` and
    ``xi_l(conj z) = conj(2 psi_l(z) - xi_l(z))`` are used instead, since
    upward recurrence for ``xi`` is unstable there.

    Returns
    -------
    psi, dpsi, xi, dxi : ndarray, shape ``np.shape(z) + (lmax + 1,)``
    """
    z = np.asarray(z, dtype=complex)
    _check(z, lmax, l_cap)
    lower = z.imag < 0
    zu = np.where(lower, z.conj(), z)
    xi_, dxi = _xi_upward(lmax, zu)
    psi_, dpsi = _psi_from_wronskian(lmax, zu, xi_, dxi)
    if np.any(lower):
        flip = lower[..., None]
        xi_ = np.where(flip, (2.0 * psi_ - xi_).conj(), xi_)
        dxi = np.where(flip, (2.0 * dpsi - dxi).conj(), dxi)
        psi_ = np.where(flip, psi_.conj(), psi_)
        dpsi = np.where(flip, dpsi.conj(), dpsi)
    return psi_, dpsi, xi_, dxi


def psi(l, z):
    """``psi_l(z) = z j_l(z)`` and its derivative."""
    p, dp, _, _ = riccati_bessel(l, complex(z))
    return RiccatiPair(complex(p[l]), complex(dp[l]), l, complex(z))


def xi(l, z):
    """``xi_l(z) = z h_l^(1)(z)`` and its derivative."""
    _, _, x, dx = riccati_bessel(l, complex(z))
    return RiccatiPair(complex(x[l]), complex(dx[l]), l, complex(z))


def wronskian_defect(l, z):
    """``|psi_l xi_l' - psi_l' xi_l - i|``."""
    p, dp, x, dx = riccati_bessel(l, complex(z))
    return float(abs(p[l] * dx[l] - dp[l] * x[l] - 1j))
