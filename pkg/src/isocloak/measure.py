"""Experiment configurations, spectra, distances and convergence sweeps.

Three limits are measured through modal impedance values:

* ``n -> inf`` at fixed ``delta > 0``: layered stack vs anisotropic reference,
* ``delta -> 0`` with the reference media (``n = 0``),
* ``rho -> 0`` with ``delta = 0``: near-cloak vs vacuum.

Distances use a weighted sup over modes with weights
``(1 + l(l+1))^{-1/2}``, a modal stand-in for the ``H^{-1/2}(div)``
operator norm.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import trapezoid

from .errors import CloakError, DomainError, ResonanceError
from .laminate import build_stack
from .params import (
    PUSHFORWARD,
    CloakGeometry,
    HiddenObject,
    build_reference_media,
    normalize_inner_shell,
    pushforward_identity_medium,
    vacuum_medium,
)
from .radial import DEFAULT_TOL, Mode, TE, TM, dtn_spectrum, potential_profiles
from .special import L_MAX, riccati_bessel

__all__ = [
    "KINDS",
    "ExperimentConfig",
    "ConvergenceRow",
    "Distance",
    "check_frequency",
    "medium_for",
    "spectrum",
    "distance",
    "distance_report",
    "tail_report",
    "sweep",
    "fitted_slope",
    "annulus_field_gap",
]

KINDS = ("cloak", "vacuum", "pushforward")
PARAMS = ("n", "delta", "rho")
# direction in which each parameter approaches its limit
_LIMIT_INCREASING = {"n": True, "delta": False, "rho": False}
RESONANCE_GUARD = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """One point of the ``(n, delta, rho)`` family.

    ``n = 0`` selects the homogenized anisotropic reference. ``kind``
    switches to the vacuum ball or to the pure push-forward of the
    identity (boundary-invariance check).
    """

    rho: float = 0.25
    delta: float = 0.0
    n: int = 0
    omega: float = 1.0
    inner_shell: str = PUSHFORWARD
    object: HiddenObject = field(default_factory=HiddenObject.vacuum)
    l_max: int = 20
    tol: float = DEFAULT_TOL
    weights: str = "sobolev"
    kind: str = "cloak"

    def __post_init__(self):
        problems = []
        if not 0.0 < self.rho <= 0.5:
            problems.append(f"rho={self.rho} outside (0, 1/2]")
        if not 0.0 <= self.delta <= 0.5:
            problems.append(f"delta={self.delta} outside [0, 0.5]")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 0):
            problems.append(f"n={self.n} must be a non-negative integer")
        if not self.omega > 0:
            problems.append(f"omega={self.omega} must be positive")
        if not 1 <= self.l_max <= L_MAX:
            problems.append(f"l_max={self.l_max} outside [1, {L_MAX}]")
        if not self.tol > 0:
            problems.append("tol must be positive")
        if self.weights not in ("sobolev", "uniform"):
            problems.append(f"weights={self.weights!r} must be 'sobolev' or 'uniform'")
        if self.kind not in KINDS:
            problems.append(f"kind={self.kind!r} must be one of {KINDS}")
        try:
            object.__setattr__(self, "inner_shell", normalize_inner_shell(self.inner_shell))
        except ValueError as exc:
            problems.append(str(exc))
        if problems:
            raise DomainError("; ".join(problems))

    @property
    def geom(self):
        return CloakGeometry(self.rho)

    def with_(self, **changes):
        return replace(self, **changes)


class Distance(NamedTuple):
    sup: float
    l2: float
    worst: Mode


@dataclass
class ConvergenceRow:
    param: str
    value: float
    distance_sup: float
    distance_l2: float
    worst_pol: str
    worst_l: int
    runtime_s: float
    error: Optional[str] = None
    trend_violation: bool = False

    def as_dict(self):
        return asdict(self)


def check_frequency(omega, l_max):
    """Reject ``omega`` if a vacuum mode is close to a Dirichlet resonance.

    The test is on the normalised boundary value
    ``|psi_l| / |(psi_l, psi_l')|`` at ``3 omega``, which is scale free;
    the raw ``|psi_l|`` decays like ``(3 omega)^{l+1} / (2l+1)!!`` and says
    nothing about resonance for large ``l``.
    """
    p, dp, _, _ = riccati_bessel(l_max, 3.0 * omega)
    ratio = np.abs(p[1:]) / np.hypot(np.abs(p[1:]), np.abs(dp[1:]))
    bad = np.flatnonzero(ratio < RESONANCE_GUARD)
    if bad.size:
        raise ResonanceError(
            f"omega={omega} is within the resonance guard of vacuum mode l={bad[0] + 1}",
            Mode(TM, int(bad[0]) + 1),
        )


def medium_for(config):
    """The radial medium evaluated for ``config``."""
    if config.kind == "vacuum":
        return vacuum_medium(config.omega, config.delta)
    if config.kind == "pushforward":
        return pushforward_identity_medium(config.geom, config.omega, config.inner_shell)
    if config.n == 0:
        return build_reference_media(
            config.geom, config.delta, config.omega, config.object, config.inner_shell
        )
    return build_stack(
        config.n, config.geom, config.delta, config.omega, config.object, config.inner_shell
    ).to_medium()


def spectrum(config):
    """Modal impedance spectrum of ``config`` for ``l <= l_max``.

    The reference media are integrated with the adaptive ODE path on
    the anisotropic shell; layered stacks are propagated shell by shell
    with Riccati-Bessel functions.
    """
    check_frequency(config.omega, config.l_max)
    return dtn_spectrum(medium_for(config), config.l_max, tol=config.tol)


def _weights(ls, scheme):
    if scheme == "uniform":
        return np.ones_like(ls, dtype=float)
    return 1.0 / np.sqrt(1.0 + ls * (ls + 1.0))


def distance_report(s1, s2, weights="sobolev"):
    if set(s1.entries) != set(s2.entries):
        raise DomainError("spectra cover different mode sets")
    if s1.omega != s2.omega:
        raise DomainError("spectra computed at different omega")
    modes = s1.modes
    ls = np.array([m.l for m in modes], dtype=float)
    diff = np.array([abs(s1[m] - s2[m]) for m in modes])
    weighted = _weights(ls, weights) * diff
    i = int(np.argmax(weighted))
    return Distance(float(weighted[i]), float(np.sqrt(np.sum(diff**2))), modes[i])


def distance(s1, s2, weights="sobolev"):
    """Weighted sup distance ``max_l w_l |zeta_1 - zeta_2|``."""
    return distance_report(s1, s2, weights).sup


def tail_report(s1, s2):
    """``|zeta_1 - zeta_2|`` at ``l = l_max`` for each polarization."""
    l = s1.l_max
    return {pol: abs(s1[Mode(pol, l)] - s2[Mode(pol, l)]) for pol in (TE, TM)}


def _varied_param(configs):
    varied = []
    for p in PARAMS:
        if len({getattr(c, p) for c in configs}) > 1:
            varied.append(p)
    others = {
        f for f in ("omega", "inner_shell", "l_max", "kind", "object", "tol", "weights")
        if len({getattr(c, f) for c in configs}) > 1
    }
    if len(varied) != 1 or others:
        raise DomainError(
            f"a sweep must vary exactly one of {PARAMS}; got {varied + sorted(others)}"
        )
    return varied[0]


def _row(args):
    config, ref, param = args
    t0 = time.perf_counter()
    value = float(getattr(config, param))
    try:
        s = spectrum(config)
        d = distance_report(s, ref, config.weights)
    except CloakError as exc:
        return ConvergenceRow(param, value, math.nan, math.nan, "", 0,
                              time.perf_counter() - t0, error=str(exc))
    return ConvergenceRow(param, value, d.sup, d.l2, d.worst.pol, d.worst.l,
                          time.perf_counter() - t0)


def sweep(configs, reference, workers=1):
    """Distances from each config's spectrum to the reference spectrum.

    Parameters
    ----------
    configs : sequence of ExperimentConfig
        Must differ in exactly one of ``n``, ``delta``, ``rho``.
    reference : ExperimentConfig or DtnSpectrum
    workers : int
        ``1`` runs sequentially (bitwise reproducible); larger values fan
        the configs out to a process pool.

    Returns
    -------
    list of ConvergenceRow
        Sorted by parameter value. ``trend_violation`` marks a row whose
        distance fails to decrease when moving one step closer to the limit.
    """
    configs = list(configs)
    param = _varied_param(configs)
    ref = spectrum(reference) if isinstance(reference, ExperimentConfig) else reference
    configs.sort(key=lambda c: getattr(c, param))
    jobs = [(c, ref, param) for c in configs]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    else:
        rows = [_row(j) for j in jobs]
    towards = rows if _LIMIT_INCREASING[param] else rows[::-1]
    prev = None
    for row in towards:
        if row.error is None:
            if prev is not None and not row.distance_sup < prev:
                row.trend_violation = True
            prev = row.distance_sup
    return rows


def fitted_slope(values, distances):
    """Least-squares slope of ``log(distance)`` against ``log(value)``."""
    return float(np.polyfit(np.log(values), np.log(distances), 1)[0])


def annulus_field_gap(config_a, config_b, mode, radii=None, same_collar=True):
    """Discrete ``L^2`` gap of the Debye potentials on the collar 2 < r < 3.

    Both potentials are normalised to ``u(3) = 1``, i.e. to the same
    boundary datum; the gap is the trapezoidal ``L^2(radii)`` norm of
    their difference.

    Parameters
    ----------
    same_collar : bool
        Require equal ``delta`` so both configs share the media on
        [2, 3]. Pass ``False`` to measure the effect of ``delta`` itself.
    """
    if config_a.omega != config_b.omega:
        raise DomainError("configs must share omega")
    if same_collar and config_a.delta != config_b.delta:
        raise DomainError("configs must share the collar media (same delta)")
    if radii is None:
        radii = np.linspace(2.05, 2.95, 19)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 2.0) or np.any(radii >= 3.0):
        raise DomainError("annulus radii must lie in (2, 3)")
    ua = potential_profiles(medium_for(config_a), [mode], radii, tol=config_a.tol)[0]
    ub = potential_profiles(medium_for(config_b), [mode], radii, tol=config_b.tol)[0]
    diff2 = np.abs(ua - ub) ** 2
    if radii.size == 1:
        return float(np.sqrt(diff2[0]))
    return float(np.sqrt(trapezoid(diff2, radii)))
