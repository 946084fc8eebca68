"""Isotropic two-phase micro-structure and its concentric-shell realisation.

On the cloaking shell 1 < s < 2 the fast profile is::

    gamma(s, t) = alpha(s)  for frac(t) in [0, 1/2)
                  beta(s)   for frac(t) in [1/2, 1)

with the amplitudes chosen so that the arithmetic mean is ``1/b`` and the
harmonic mean is ``(s-a)^2 / (b s^2)``: exactly the tangential and radial
eigenvalues of ``gamma*``. Eliminating ``beta`` gives the monic quadratic

    x^2 - (2/b) x + (s-a)^2 / (b^2 s^2) = 0

whose roots are ``alpha`` and ``beta``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleLaminateError
from .params import (
    PUSHFORWARD,
    HiddenObject,
    RadialMedium,
    RadialTensor,
    Segment,
    inner_shell_value,
    normalize_inner_shell,
)

__all__ = [
    "PhasePair",
    "Shell",
    "LayerStack",
    "solve_phase_pair",
    "gamma_cell",
    "build_stack",
    "means_of_stack",
]

_REGION_EDGES = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class PhasePair:
    alpha: float
    beta: float
    s: float

    @property
    def arithmetic(self):
        return 0.5 * (self.alpha + self.beta)

    @property
    def harmonic(self):
        return 2.0 * self.alpha * self.beta / (self.alpha + self.beta)


def solve_phase_pair(s, geom):
    """Phase amplitudes ``(alpha, beta)`` at slow radius ``s`` in [1, 2].

    Returns the larger root as ``alpha``. The smaller root is recovered
    from the product of roots to avoid cancellation.
    """
    s = float(s)
    if not 1.0 <= s <= 2.0:
        raise DomainError(f"phase pair needs 1 <= s <= 2, got {s}")
    half_sum = 1.0 / geom.b
    product = (s - geom.a) ** 2 / (geom.b**2 * s**2)
    disc = half_sum**2 - product
    if disc < 0:
        raise InfeasibleLaminateError(
            f"no real phase amplitudes at s = {s}, rho = {geom.rho}"
        )
    alpha = half_sum + np.sqrt(disc)
    beta = product / alpha
    if beta <= 0:
        raise InfeasibleLaminateError(f"non-positive phase amplitude at s = {s}")
    return PhasePair(float(alpha), float(beta), s)


def gamma_cell(s, t, geom, inner_shell=PUSHFORWARD):
    """Two-scale profile ``gamma(s, t)``, 1-periodic in ``t``."""
    s = float(s)
    if s <= 0 or s > 3.0:
        raise DomainError(f"gamma_cell needs 0 < s <= 3, got {s}")
    if s > 2.0 or s <= 0.5:
        return 1.0
    if s > 1.0:
        pair = solve_phase_pair(s, geom)
        return pair.alpha if (t % 1.0) < 0.5 else pair.beta
    return inner_shell_value(geom, inner_shell)


@dataclass(frozen=True)
class Shell:
    """Homogeneous isotropic shell ``(r_inner, r_outer]``.

    ``gamma`` is the micro-structure factor; ``eps`` and ``mu`` include
    the object, conductivity and ``delta`` prefactors.
    """

    r_inner: float
    r_outer: float
    eps: complex
    mu: complex
    gamma: float


@dataclass(frozen=True)
class LayerStack:
    shells: tuple
    n: int
    geom: object
    delta: float
    omega: float
    inner_shell: str = PUSHFORWARD

    def shells_in(self, lo, hi):
        return [sh for sh in self.shells if sh.r_inner >= lo and sh.r_outer <= hi]

    def to_medium(self):
        segs = tuple(
            Segment(sh.r_inner, sh.r_outer, RadialTensor.isotropic(sh.eps),
                    RadialTensor.isotropic(sh.mu))
            for sh in self.shells
        )
        return RadialMedium(segs, self.omega, label=f"stack(n={self.n})")

    def to_dict(self):
        return {
            "n": self.n,
            "rho": self.geom.rho,
            "delta": self.delta,
            "omega": self.omega,
            "inner_shell": self.inner_shell,
            "shells": [
                {
                    "r_inner": sh.r_inner,
                    "r_outer": sh.r_outer,
                    "eps_re": sh.eps.real,
                    "eps_im": sh.eps.imag,
                    "mu_re": sh.mu.real,
                    "mu_im": sh.mu.imag,
                }
                for sh in self.shells
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def build_stack(n, geom, delta=0.0, omega=1.0, obj=None, inner_shell=PUSHFORWARD,
                ordering="alpha-first"):
    """Finite-``n`` isotropic layered cloak ``(eps^n_delta, mu^n)``.

    The cloaking shell (1, 2) is cut into ``n`` periods of width ``1/n``;
    each period holds an ``alpha`` shell and a ``beta`` shell of width
    ``1/(2n)``. Both amplitudes of a period are evaluated at the period
    midpoint, so each period reproduces the target means exactly there.

    Parameters
    ----------
    n : int
        Number of periods across (1, 2).
    ordering : {"alpha-first", "beta-first"}
        Which phase occupies the inner half of each period.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be at least 1")
    if ordering not in ("alpha-first", "beta-first"):
        raise ValueError(f"unknown ordering {ordering!r}")
    inner_shell = normalize_inner_shell(inner_shell)
    obj = HiddenObject.vacuum() if obj is None else obj
    d2 = (1.0 + 1j * delta) ** 2
    shells = []
    r_in = 0.0
    for sh in obj.shells:
        shells.append(Shell(r_in, sh.r_outer, d2 * sh.eps, sh.mu + 0j, 1.0))
        r_in = sh.r_outer
    g_in = inner_shell_value(geom, inner_shell)
    shells.append(
        Shell(0.5, 1.0, d2 * (1 + 1j * geom.rho**-2 / omega) * g_in, g_in + 0j, g_in)
    )
    edges = 1.0 + np.arange(2 * n + 1) / (2.0 * n)
    edges[-1] = 2.0
    for k in range(n):
        pair = solve_phase_pair(1.0 + (k + 0.5) / n, geom)
        first, second = (pair.alpha, pair.beta)
        if ordering == "beta-first":
            first, second = second, first
        for j, g in enumerate((first, second)):
            lo, hi = float(edges[2 * k + j]), float(edges[2 * k + j + 1])
            shells.append(Shell(lo, hi, d2 * g, g + 0j, g))
    shells.append(Shell(2.0, 3.0, d2, 1.0 + 0j, 1.0))
    return LayerStack(tuple(shells), n, geom, float(delta), float(omega), inner_shell)


def means_of_stack(stack, s_lo, s_hi):
    """Thickness-weighted arithmetic and harmonic means of ``gamma^n``.

    The window must sit inside one region; inside the laminate it must
    not be wider than one period ``1/n``.
    """
    if not 0.0 <= s_lo < s_hi <= 3.0:
        raise DomainError("need 0 <= s_lo < s_hi <= 3")
    eps = 1e-12
    for edge in _REGION_EDGES:
        if s_lo < edge - eps and s_hi > edge + eps:
            raise DomainError(f"window ({s_lo}, {s_hi}) spans region boundary r = {edge}")
    if s_lo >= 1.0 - eps and s_hi <= 2.0 + eps and s_hi - s_lo > 1.0 / stack.n + eps:
        raise DomainError("window wider than one laminate period")
    widths, gammas = [], []
    for sh in stack.shells:
        w = min(sh.r_outer, s_hi) - max(sh.r_inner, s_lo)
        if w > 0:
            widths.append(w)
            gammas.append(sh.gamma)
    widths = np.asarray(widths)
    gammas = np.asarray(gammas)
    total = widths.sum()
    arithmetic = float(np.dot(widths, gammas) / total)
    harmonic = float(total / np.dot(widths, 1.0 / gammas))
    return arithmetic, harmonic
