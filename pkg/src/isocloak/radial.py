"""Per-mode radial Maxwell solver and modal impedance values.

For radially uniaxial media ``eps = eps_r Pi + eps_t (I - Pi)`` (same for
``mu``) the fields split into TM and TE families indexed by the degree
``l >= 1``. With ``L = l(l+1)``:

TM (``H_r = 0``, ``H = (u/r) X_lm``)::

    ((1/eps_t) u')' + (omega^2 mu_t - L / (eps_r r^2)) u = 0

TE (``E_r = 0``, ``E = (u/r) X_lm``)::

    ((1/mu_t) u')' + (omega^2 eps_t - L / (mu_r r^2)) u = 0

The derivation is written out in ``docs/radial_reduction.md``. Writing
``c`` for the curl-side coefficient (``eps`` for TM, ``mu`` for TE) and
``d`` for the other one, the solver integrates the first-order system

    u' = c_t w,     w' = (L / (c_r r^2) - omega^2 d_t) u

in ``y = (u, w)`` with the flux ``w = u' / c_t``. Both components are
continuous across material interfaces, so piecewise media need no jump
conditions.

The modal impedance value is ``zeta = u'(3) / u(3)`` for the solution that
is regular at the origin.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, ResonanceError, SingularMediumError, StiffnessError
from .params import OUTER_RADIUS, RadialMedium, RadialTensor, Segment, vacuum_medium
from .special import L_MAX, riccati_bessel

__all__ = [
    "TE",
    "TM",
    "Mode",
    "ModeState",
    "DtnSpectrum",
    "radial_ode",
    "regular_seed",
    "propagate_analytic",
    "propagate_ode",
    "modal_dtn",
    "dtn_spectrum",
    "vacuum_dtn",
    "potential_profiles",
    "all_modes",
]

TE = "TE"
TM = "TM"
_POLS = (TE, TM)

DEFAULT_TOL = 1e-10
RESONANCE_TOL = 1e-8
# right-hand-side evaluations per segment before giving up (DOP853 uses 12 per step)
_MAX_RHS_EVALS = 1_200_000


@dataclass(frozen=True, order=True)
class Mode:
    pol: str
    l: int

    def __post_init__(self):
        if self.pol not in _POLS:
            raise DomainError(f"polarization must be TE or TM, got {self.pol!r}")
        if int(self.l) < 1:
            raise DomainError("Maxwell modes need l >= 1")
        object.__setattr__(self, "l", int(self.l))

    def __str__(self):
        return f"{self.pol}{self.l}"


def all_modes(l_max):
    return [Mode(p, l) for p in _POLS for l in range(1, l_max + 1)]


@dataclass(frozen=True)
class ModeState:
    """Debye potential ``u`` and flux ``w = u'/c_t`` at radius ``r``.

    ``w`` is the component that stays continuous across interfaces; the
    one-sided derivative is ``du(c_t) = c_t * w``.
    """

    u: complex
    w: complex
    r: float

    def du(self, c_t):
        return c_t * self.w

    def scaled(self, factor):
        return ModeState(self.u * factor, self.w * factor, self.r)


@dataclass(frozen=True)
class DtnSpectrum:
    """Modal impedance values ``zeta`` for ``l = 1..l_max`` and both polarizations."""

    entries: dict
    omega: float
    fingerprint: str = ""

    @property
    def modes(self):
        return sorted(self.entries)

    @property
    def l_max(self):
        return max(m.l for m in self.entries)

    def __getitem__(self, mode):
        return self.entries[mode]

    def array(self, pol):
        return np.array([self.entries[Mode(pol, l)] for l in range(1, self.l_max + 1)])

    def to_dict(self):
        return {
            "omega": self.omega,
            "fingerprint": self.fingerprint,
            "modes": [
                {"pol": m.pol, "l": m.l, "zeta_re": self.entries[m].real,
                 "zeta_im": self.entries[m].imag}
                for m in self.modes
            ],
        }


def _coefficients(pol, eps, mu):
    """``(c_r, c_t, d_t)`` for the given polarization(s)."""
    pol = np.asarray(pol)
    tm = pol == TM
    c_r = np.where(tm, eps.radial, mu.radial)
    c_t = np.where(tm, eps.tangential, mu.tangential)
    d_t = np.where(tm, mu.tangential, eps.tangential)
    return c_r, c_t, d_t


def radial_ode(mode, eps, mu, omega, r, y):
    """Right-hand side of the first-order radial system.

    Parameters
    ----------
    mode : Mode
    eps, mu : RadialTensor
        Material eigenvalues at ``r``.
    y : (u, w)

    Returns
    -------
    (du/dr, dw/dr)
    """
    if r <= 0:
        raise DomainError("radial ODE needs r > 0")
    c_r, c_t, d_t = _coefficients(mode.pol, eps, mu)
    if np.any(c_r == 0) or np.any(c_t == 0):
        raise SingularMediumError(f"vanishing material eigenvalue at r = {r}")
    u, w = y
    L = mode.l * (mode.l + 1)
    return complex(c_t * w), complex((L / (c_r * r**2) - omega**2 * d_t) * u)


def _wavenumber(eps, mu, omega):
    return omega * np.sqrt(complex(eps) * complex(mu))


def _iso_values(seg):
    return complex(seg.eps.radial), complex(seg.mu.radial)


def regular_seed(mode, eps, mu, omega, r0):
    """State of the origin-regular solution ``psi_l(k r)`` at ``r0``.

    ``eps`` and ``mu`` are the scalar values of the isotropic core and
    ``k`` is the principal square root of ``omega^2 eps mu``.
    """
    k = _wavenumber(eps, mu, omega)
    p, dp, _, _ = riccati_bessel(mode.l, k * r0)
    c_t = eps if mode.pol == TM else mu
    return ModeState(complex(p[mode.l]), complex(k * dp[mode.l] / c_t), float(r0))


# -- batched propagators -------------------------------------------------------------
#
# ``u`` and ``w`` are arrays over a batch of modes described by ``pols`` and ``ls``.


def _analytic_batch(u, w, pols, ls, eps, mu, r1, r2, omega, lmax):
    if r1 == r2:
        return u.copy(), w.copy()
    k = _wavenumber(eps, mu, omega)
    c_t = np.where(pols == TM, eps, mu)
    psi, dpsi, xi, dxi = riccati_bessel(lmax, np.array([k * r1, k * r2]))
    p1, dp1, x1, dx1 = (a[0, ls] for a in (psi, dpsi, xi, dxi))
    p2, dp2, x2, dx2 = (a[1, ls] for a in (psi, dpsi, xi, dxi))
    up = c_t * w / k
    # u = A psi + B xi, u'/k = A psi' + B xi'; Wronskian = i
    A = (u * dx1 - up * x1) / 1j
    B = (up * p1 - u * dp1) / 1j
    u2 = A * p2 + B * x2
    w2 = k * (A * dp2 + B * dx2) / c_t
    return u2, w2


def _ode_batch(u, w, pols, ls, seg, r1, r2, omega, tol):
    if r1 == r2:
        return u.copy(), w.copy()
    m = u.size
    L = (ls * (ls + 1)).astype(float)
    tm = pols == TM
    evals = [0]

    def rhs(r, y):
        evals[0] += 1
        if evals[0] > _MAX_RHS_EVALS:
            raise StiffnessError("ODE integration exceeded its evaluation budget", r)
        eps = seg.eps_at(r)
        mu = seg.mu_at(r)
        c_r = np.where(tm, eps.radial, mu.radial)
        c_t = np.where(tm, eps.tangential, mu.tangential)
        d_t = np.where(tm, mu.tangential, eps.tangential)
        coef = np.concatenate([c_r, c_t, d_t])
        if not np.all(np.isfinite(coef)) or np.any(c_r == 0) or np.any(c_t == 0):
            raise SingularMediumError(f"material eigenvalue zero or non-finite at r = {r:.6g}")
        return np.concatenate([c_t * y[m:], (L / (c_r * r * r) - omega**2 * d_t) * y[:m]])

    # the system is linear: integrate each mode at unit size so that the
    # absolute tolerance is meaningful even for psi_l(k r0) ~ 1e-50
    scale = np.maximum(np.abs(u), np.abs(w))
    scale = np.where(scale > 0, scale, 1.0)
    y0 = np.concatenate([u / scale, w / scale]).astype(complex)
    sol = solve_ivp(rhs, (r1, r2), y0, method="DOP853", rtol=tol, atol=tol * 1e-6)
    if sol.status != 0:
        raise StiffnessError(f"ODE integration failed: {sol.message}", float(sol.t[-1]))
    y = sol.y[:, -1]
    return y[:m] * scale, y[m:] * scale


def propagate_analytic(state, mode, eps, mu, r_to, omega):
    """Exact transfer through a homogeneous isotropic shell.

    ``eps`` and ``mu`` are complex scalars; the state is carried from
    ``state.r`` to ``r_to`` using the ``(psi_l, xi_l)`` fundamental system
    at argument ``k r``.
    """
    pols = np.array([mode.pol])
    ls = np.array([mode.l])
    u, w = _analytic_batch(np.array([state.u]), np.array([state.w]), pols, ls,
                           complex(eps), complex(mu), state.r, r_to, omega, mode.l)
    return ModeState(complex(u[0]), complex(w[0]), float(r_to))


def propagate_ode(state, mode, segment, r_to, omega, tol=DEFAULT_TOL):
    """Adaptive Runge-Kutta transfer through ``segment`` from ``state.r`` to ``r_to``.

    ``segment`` is a :class:`~isocloak.params.Segment` or a
    :class:`~isocloak.params.RadialMedium`; in the latter case every
    breakpoint between the two radii is a mandatory step boundary.
    """
    pols = np.array([mode.pol])
    ls = np.array([mode.l])
    u, w = np.array([state.u], dtype=complex), np.array([state.w], dtype=complex)
    if isinstance(segment, Segment):
        pieces = [(segment, state.r, r_to)]
    else:
        pieces = _pieces(segment, state.r, r_to)
    for seg, lo, hi in pieces:
        u, w = _ode_batch(u, w, pols, ls, seg, lo, hi, omega, tol)
    return ModeState(complex(u[0]), complex(w[0]), float(r_to))


def _pieces(medium, r1, r2):
    out = []
    for seg in medium.segments:
        lo = max(seg.r_inner, r1)
        hi = min(seg.r_outer, r2)
        if hi > lo:
            out.append((seg, lo, hi))
    return out


def _seed_radius(medium):
    return min(0.05, medium.segments[0].r_outer / 2.0)


def _run(medium, modes, radii=(), tol=DEFAULT_TOL, method="auto"):
    """Propagate the regular solution of every mode out to r = 3.

    Returns the states at r = 3 and at each radius in ``radii`` as arrays
    ``(u, w, log_scale)``; true values are ``(u, w) * exp(log_scale)``.
    """
    if method not in ("auto", "ode", "analytic"):
        raise ValueError(f"unknown method {method!r}")
    omega = medium.omega
    pols = np.array([m.pol for m in modes])
    ls = np.array([m.l for m in modes])
    lmax = int(ls.max())
    if lmax > L_MAX:
        raise DomainError(f"l = {lmax} exceeds l_max = {L_MAX}")
    core = medium.segments[0]
    if not core.is_constant_isotropic:
        raise DomainError("innermost segment must be homogeneous and isotropic")
    r0 = _seed_radius(medium)
    eps0, mu0 = _iso_values(core)
    k0 = _wavenumber(eps0, mu0, omega)
    p, dp, _, _ = riccati_bessel(lmax, k0 * r0)
    c_t0 = np.where(pols == TM, eps0, mu0)
    u = p[ls].astype(complex)
    w = k0 * dp[ls] / c_t0
    logs = np.zeros(len(modes))

    stops = sorted({float(r) for r in radii if r0 < r <= OUTER_RADIUS})
    recorded = {}
    for seg in medium.segments:
        lo = max(seg.r_inner, r0)
        if seg.r_outer <= lo:
            continue
        marks = [lo] + [r for r in stops if lo < r < seg.r_outer] + [seg.r_outer]
        for a, b in zip(marks, marks[1:]):
            use_analytic = seg.is_constant_isotropic and method != "ode"
            if not use_analytic and method == "analytic":
                raise DomainError("analytic propagation needs homogeneous isotropic shells")
            if use_analytic:
                e, m_ = _iso_values(seg)
                u, w = _analytic_batch(u, w, pols, ls, e, m_, a, b, omega, lmax)
            else:
                u, w = _ode_batch(u, w, pols, ls, seg, a, b, omega, tol)
            scale = np.maximum(np.abs(u), np.abs(w))
            if not np.all(np.isfinite(scale)) or np.any(scale == 0):
                raise ResonanceError("propagated state degenerated (overflow or zero)")
            u, w = u / scale, w / scale
            logs = logs + np.log(scale)
            if b in stops:
                recorded[b] = (u.copy(), w.copy(), logs.copy())
    return (u, w, logs), recorded


def _zeta_from_state(medium, modes, u, w):
    outer = medium.segments[-1]
    eps = outer.eps_at(OUTER_RADIUS)
    mu = outer.mu_at(OUTER_RADIUS)
    pols = np.array([m.pol for m in modes])
    c_t = np.where(pols == TM, eps.tangential, mu.tangential)
    du = c_t * w
    norm = np.sqrt(np.abs(u) ** 2 + np.abs(du) ** 2)
    bad = np.abs(u) < RESONANCE_TOL * norm
    if np.any(bad):
        mode = modes[int(np.argmax(bad))]
        raise ResonanceError("u(3) vanishes: omega is at or near a resonance", mode)
    return du / u


def dtn_spectrum(medium, l_max=20, tol=DEFAULT_TOL, method="auto", fingerprint=None):
    """``zeta`` for all modes ``l <= l_max``, both polarizations.

    Parameters
    ----------
    method : {"auto", "ode", "analytic"}
        ``auto`` propagates homogeneous isotropic shells exactly and
        integrates everything else; ``ode`` integrates every shell
        outside the seed radius.
    """
    modes = all_modes(l_max)
    (u, w, _), _ = _run(medium, modes, tol=tol, method=method)
    zeta = _zeta_from_state(medium, modes, u, w)
    fp = medium.fingerprint() if fingerprint is None else fingerprint
    return DtnSpectrum({m: complex(z) for m, z in zip(modes, zeta)}, medium.omega, fp)


def modal_dtn(medium, mode, tol=DEFAULT_TOL, method="auto"):
    """``zeta = u'(3)/u(3)`` for one mode of ``medium``."""
    (u, w, _), _ = _run(medium, [mode], tol=tol, method=method)
    return complex(_zeta_from_state(medium, [mode], u, w)[0])


def vacuum_dtn(mode, omega=1.0):
    """Closed-form ``zeta = omega psi_l'(3 omega) / psi_l(3 omega)``."""
    p, dp, _, _ = riccati_bessel(mode.l, 3.0 * omega)
    pl, dpl = p[mode.l], dp[mode.l]
    if abs(pl) < RESONANCE_TOL * np.hypot(abs(pl), abs(dpl)):
        raise ResonanceError("psi_l(3 omega) vanishes", mode)
    return complex(omega * dpl / pl)


def potential_profiles(medium, modes, radii, tol=DEFAULT_TOL, method="auto"):
    """Debye potentials ``u(r)`` at ``radii``, normalised so that ``u(3) = 1``.

    Returns
    -------
    ndarray, shape ``(len(modes), len(radii))``
    """
    radii = [float(r) for r in radii]
    (u3, _, log3), rec = _run(medium, modes, radii=radii, tol=tol, method=method)
    out = np.empty((len(modes), len(radii)), dtype=complex)
    for j, r in enumerate(radii):
        if r == OUTER_RADIUS:
            out[:, j] = 1.0
            continue
        u, _, lg = rec[r]
        out[:, j] = u / u3 * np.exp(lg - log3)
    return out
