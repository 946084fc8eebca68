"""Blow-up map, radial push-forwards and the anisotropic reference cloak.

Every medium in this package is radially symmetric, so a material tensor
is stored by its two eigenvalues: ``radial`` (on the span of x/|x|) and
``tangential`` (double, on the orthogonal complement).

The ball B_3 is split into four regions::

    (0, 1/2]   hidden object
    (1/2, 1)   conductive layer
    (1, 2)     anisotropic cloaking shell
    [2, 3]     vacuum collar (identity up to the (1+i delta)^2 factor)

Inner-shell convention
----------------------
The push-forward of the identity under ``x -> x/rho`` is ``rho * I``.
A tabulated variant uses ``1/rho`` on the (1/2, 1) shell instead. Both
are available through ``inner_shell``:

* ``"computed-pushforward"`` (default): ``rho``; passes the exact
  boundary-invariance check (see :func:`isocloak.radial.modal_dtn`).
* ``"paper-literal"`` (alias ``"reciprocal"``): ``1/rho``, the tabulated
  value. The config string is fixed by the file schema.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, SingularMapError

__all__ = [
    "PUSHFORWARD",
    "RECIPROCAL",
    "CloakGeometry",
    "RadialTensor",
    "ObjectShell",
    "HiddenObject",
    "Segment",
    "RadialMedium",
    "normalize_inner_shell",
    "f_rho",
    "f_rho_inv",
    "pushforward_radial",
    "gamma_star",
    "inner_shell_value",
    "build_reference_media",
    "pushforward_identity_medium",
    "vacuum_medium",
    "gamma_star_medium",
]

PUSHFORWARD = "computed-pushforward"
RECIPROCAL = "paper-literal"

_INNER_ALIASES = {
    PUSHFORWARD: PUSHFORWARD,
    "pushforward": PUSHFORWARD,
    RECIPROCAL: RECIPROCAL,
    "reciprocal": RECIPROCAL,
}

OUTER_RADIUS = 3.0
# points produced by normalising a vector to |x| = 3 may overshoot by an ulp
_BALL_SLACK = 1.0 + 1e-12


def normalize_inner_shell(mode):
    """Map user-facing inner-shell names to the canonical constants."""
    try:
        return _INNER_ALIASES[mode]
    except KeyError:
        raise ValueError(
            f"unknown inner_shell mode {mode!r}; expected one of "
            f"{sorted(_INNER_ALIASES)}"
        ) from None


@dataclass(frozen=True)
class CloakGeometry:
    """Parameters of the blow-up map ``F_rho``.

    ``a`` and ``b`` are the offset and slope of the affine radial profile
    ``r = a + b s`` that sends ``(rho, 2]`` onto ``(1, 2]``.
    """

    rho: float
    a: float = field(init=False)
    b: float = field(init=False)

    def __post_init__(self):
        rho = float(self.rho)
        if not 0.0 < rho <= 0.5:
            raise DomainError(f"rho must lie in (0, 1/2], got {rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "a", 2.0 * (1.0 - rho) / (2.0 - rho))
        object.__setattr__(self, "b", 1.0 / (2.0 - rho))


@dataclass(frozen=True)
class RadialTensor:
    """Radially symmetric tensor ``radial * Pi + tangential * (I - Pi)``.

    Fields may be scalars or numpy arrays of matching shape.
    """

    radial: complex
    tangential: complex

    @classmethod
    def isotropic(cls, value):
        return cls(value, value)

    @property
    def is_isotropic(self):
        return bool(np.all(self.radial == self.tangential))

    def scale(self, factor):
        return RadialTensor(self.radial * factor, self.tangential * factor)

    def __mul__(self, factor):
        return self.scale(factor)

    __rmul__ = __mul__


@dataclass(frozen=True)
class ObjectShell:
    r_outer: float
    eps: complex
    mu: complex


@dataclass(frozen=True)
class HiddenObject:
    """Radially layered object hidden in B_{1/2}.

    Shells are listed from the centre outward by outer radius; the last
    one must end at 1/2. Each must be regular: ``Re eps > 0``,
    ``Re mu > 0``, ``Im eps >= 0`` and real ``mu``.
    """

    shells: tuple = (ObjectShell(0.5, 1.0 + 0j, 1.0 + 0j),)

    def __post_init__(self):
        shells = tuple(
            s if isinstance(s, ObjectShell) else ObjectShell(*s) for s in self.shells
        )
        shells = tuple(
            ObjectShell(float(s.r_outer), complex(s.eps), complex(s.mu)) for s in shells
        )
        object.__setattr__(self, "shells", shells)
        problems = self.problems()
        if problems:
            raise DomainError("; ".join(problems))

    def problems(self):
        out = []
        if not self.shells:
            return ["object needs at least one shell"]
        prev = 0.0
        for i, s in enumerate(self.shells):
            if not prev < s.r_outer <= 0.5:
                out.append(
                    f"shell {i}: r_outer={s.r_outer} must increase and stay within (0, 1/2]"
                )
            if s.eps.real <= 0 or s.mu.real <= 0:
                out.append(f"shell {i}: Re(eps) and Re(mu) must be positive")
            if s.eps.imag < 0:
                out.append(f"shell {i}: Im(eps) must be non-negative")
            if s.mu.imag != 0:
                out.append(f"shell {i}: mu must be real")
            prev = s.r_outer
        if self.shells[-1].r_outer != 0.5:
            out.append("outermost object shell must end at r = 1/2")
        return out

    @classmethod
    def vacuum(cls):
        return cls()

    @classmethod
    def homogeneous(cls, eps, mu=1.0):
        return cls((ObjectShell(0.5, complex(eps), complex(mu)),))


MaterialSpec = Union[RadialTensor, Callable[[np.ndarray], RadialTensor]]


@dataclass(frozen=True)
class Segment:
    """One interval ``(r_inner, r_outer]`` of a radial medium.

    ``eps`` and ``mu`` are either constant :class:`RadialTensor` values or
    callables ``r -> RadialTensor``.
    """

    r_inner: float
    r_outer: float
    eps: MaterialSpec
    mu: MaterialSpec

    def eps_at(self, r):
        return self.eps(r) if callable(self.eps) else self.eps

    def mu_at(self, r):
        return self.mu(r) if callable(self.mu) else self.mu

    @property
    def is_constant_isotropic(self):
        return (
            isinstance(self.eps, RadialTensor)
            and isinstance(self.mu, RadialTensor)
            and self.eps.is_isotropic
            and self.mu.is_isotropic
        )


@dataclass(frozen=True)
class RadialMedium:
    """Piecewise description of ``eps(r)``, ``mu(r)`` on ``(0, 3]``."""

    segments: tuple
    omega: float = 1.0
    label: str = ""

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise DomainError("medium needs at least one segment")
        if segs[0].r_inner != 0.0 or segs[-1].r_outer != OUTER_RADIUS:
            raise DomainError("segments must cover (0, 3]")
        for left, right in zip(segs, segs[1:]):
            if left.r_outer != right.r_inner:
                raise DomainError("segments must be contiguous")
        if not self.omega > 0:
            raise DomainError("omega must be positive")

    @property
    def breakpoints(self):
        return (0.0,) + tuple(s.r_outer for s in self.segments)

    def segment_at(self, r):
        for seg in self.segments:
            if r <= seg.r_outer:
                return seg
        raise DomainError(f"r = {r} outside (0, 3]")

    def eps_at(self, r):
        return self.segment_at(r).eps_at(r)

    def mu_at(self, r):
        return self.segment_at(r).mu_at(r)

    def fingerprint(self):
        """Stable hash of the medium sampled on a fixed grid."""
        import hashlib

        h = hashlib.sha256()
        h.update(np.float64(self.omega).tobytes())
        for seg in self.segments:
            h.update(np.array([seg.r_inner, seg.r_outer]).tobytes())
            r = np.linspace(seg.r_inner, seg.r_outer, 9)[1:]
            for spec in (seg.eps_at(r), seg.mu_at(r)):
                for part in (spec.radial, spec.tangential):
                    arr = np.broadcast_to(np.asarray(part, dtype=complex), r.shape)
                    h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError("points must have a trailing dimension of size 3")
    return x


def _radial_profile(r, geom):
    """Image radius of ``F_rho`` for source radius ``r``."""
    return np.where(
        r >= 2.0, r, np.where(r > geom.rho, geom.a + geom.b * r, r / geom.rho)
    )


def f_rho(x, geom):
    """Apply the blow-up map ``F_rho`` to points ``x`` (shape ``(..., 3)``).

    Identity on ``2 <= |x| <= 3``; ``(a + b|x|) x/|x|`` on ``rho < |x| <= 2``;
    ``x / rho`` on ``|x| <= rho``.
    """
    x = _as_points(x)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r > _BALL_SLACK * OUTER_RADIUS):
        raise DomainError("f_rho is defined on the closed ball of radius 3")
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(r > 0, _radial_profile(r, geom) / np.where(r > 0, r, 1.0), 1.0 / geom.rho)
    return x * scale[..., None]


def f_rho_inv(y, geom):
    """Inverse of :func:`f_rho`."""
    y = _as_points(y)
    r = np.linalg.norm(y, axis=-1)
    if np.any(r > _BALL_SLACK * OUTER_RADIUS):
        raise DomainError("f_rho_inv is defined on the closed ball of radius 3")
    src = np.where(r >= 2.0, r, np.where(r > 1.0, (r - geom.a) / geom.b, r * geom.rho))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(r > 0, src / np.where(r > 0, r, 1.0), geom.rho)
    return y * scale[..., None]


def pushforward_radial(R, dR, s, tensor):
    """Push a radial tensor forward under the radial map ``x -> R(|x|) x/|x|``.

    The Jacobian has eigenvalues ``R'(s)`` (radial) and ``R(s)/s``
    (tangential, twice), so ``DF T DF^t / det DF`` scales the radial
    eigenvalue by ``R' s^2 / R^2`` and the tangential one by ``1 / R'``.

    Parameters
    ----------
    R, dR : callable
        The radial profile and its derivative.
    s : float
        Source radius.
    tensor : RadialTensor
        Material at the source radius.

    Returns
    -------
    RadialTensor
        Material at the target radius ``R(s)``.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise SingularMapError("push-forward is singular at s = 0")
    Rs = R(s)
    dRs = dR(s)
    if np.any(dRs <= 0):
        raise SingularMapError("radial map must be strictly increasing")
    return RadialTensor(
        tensor.radial * dRs * s**2 / Rs**2,
        tensor.tangential / dRs,
    )


def inner_shell_value(geom, inner_shell=PUSHFORWARD):
    """Isotropic value of ``gamma*`` on the conductive layer (1/2, 1)."""
    mode = normalize_inner_shell(inner_shell)
    return geom.rho if mode == PUSHFORWARD else 1.0 / geom.rho


def _middle_shell(r, geom):
    r = np.asarray(r, dtype=float)
    return RadialTensor((r - geom.a) ** 2 / (geom.b * r**2), np.full_like(r, 1.0 / geom.b))


def gamma_star(r, geom, inner_shell=PUSHFORWARD):
    """Anisotropic reference profile ``gamma*`` at radius ``r``.

    ``I`` on [2, 3]; ``((r-a)^2/(b r^2), 1/b)`` on (1, 2); the inner-shell
    scalar on (1/2, 1]; ``I`` on (0, 1/2].
    """
    r = float(r)
    if r <= 0 or r > OUTER_RADIUS:
        raise DomainError(f"gamma_star needs 0 < r <= 3, got {r}")
    if r >= 2.0 or r <= 0.5:
        return RadialTensor(1.0, 1.0)
    if r > 1.0:
        t = _middle_shell(r, geom)
        return RadialTensor(float(t.radial), float(t.tangential))
    return RadialTensor.isotropic(inner_shell_value(geom, inner_shell))


def build_reference_media(geom, delta=0.0, omega=1.0, obj=None, inner_shell=PUSHFORWARD):
    """Anisotropic cloak ``(eps*_delta, mu*)`` with ``obj`` hidden in B_{1/2}.

    ``mu* = phi1 gamma*`` and
    ``eps*_delta = (1 + i delta)^2 (1 + i phi3/omega) phi2 gamma*`` where
    ``phi3 = rho^-2`` on the conductive layer and ``phi1, phi2`` carry the
    object's ``mu`` and ``eps`` inside B_{1/2}. At ``delta = 0`` this is
    the regularised near-cloak.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    if not 0.0 <= delta < 1.0:
        raise DomainError("delta must lie in [0, 1)")
    obj = HiddenObject.vacuum() if obj is None else obj
    d2 = (1.0 + 1j * delta) ** 2
    segs = []
    r_in = 0.0
    for sh in obj.shells:
        segs.append(
            Segment(r_in, sh.r_outer, RadialTensor.isotropic(d2 * sh.eps),
                    RadialTensor.isotropic(sh.mu + 0j))
        )
        r_in = sh.r_outer
    g_in = inner_shell_value(geom, inner_shell)
    phi3 = geom.rho**-2
    segs.append(
        Segment(0.5, 1.0, RadialTensor.isotropic(d2 * (1 + 1j * phi3 / omega) * g_in),
                RadialTensor.isotropic(g_in + 0j))
    )

    def mid_eps(r):
        return _middle_shell(r, geom).scale(d2)

    def mid_mu(r):
        return _middle_shell(r, geom).scale(1.0 + 0j)

    segs.append(Segment(1.0, 2.0, mid_eps, mid_mu))
    segs.append(Segment(2.0, 3.0, RadialTensor.isotropic(d2), RadialTensor.isotropic(1.0 + 0j)))
    return RadialMedium(tuple(segs), omega, label=f"reference(rho={geom.rho}, delta={delta})")


def pushforward_identity_medium(geom, omega=1.0, inner_shell=PUSHFORWARD):
    """``(F_rho)_* I`` on all of B_3, for both ``eps`` and ``mu``.

    With the computed push-forward this is ``rho I`` on (0, 1), and its
    boundary response must coincide with vacuum. With the reciprocal
    inner shell the tabulated ``gamma*`` is used instead (``1/rho`` on (1/2, 1), ``I``
    inside), which is *not* a push-forward of the identity.
    """
    mode = normalize_inner_shell(inner_shell)
    segs = []
    if mode == PUSHFORWARD:
        core = RadialTensor.isotropic(geom.rho + 0j)
        segs.append(Segment(0.0, 1.0, core, core))
    else:
        one = RadialTensor.isotropic(1.0 + 0j)
        shell = RadialTensor.isotropic(1.0 / geom.rho + 0j)
        segs.append(Segment(0.0, 0.5, one, one))
        segs.append(Segment(0.5, 1.0, shell, shell))

    def mid(r):
        return _middle_shell(r, geom).scale(1.0 + 0j)

    segs.append(Segment(1.0, 2.0, mid, mid))
    one = RadialTensor.isotropic(1.0 + 0j)
    segs.append(Segment(2.0, 3.0, one, one))
    return RadialMedium(tuple(segs), omega, label=f"pushforward(rho={geom.rho}, {mode})")


def vacuum_medium(omega=1.0, delta=0.0):
    """Homogeneous ball with ``eps = (1 + i delta)^2``, ``mu = 1``."""
    eps = RadialTensor.isotropic((1.0 + 1j * delta) ** 2)
    mu = RadialTensor.isotropic(1.0 + 0j)
    return RadialMedium((Segment(0.0, 3.0, eps, mu),), omega, label=f"vacuum(delta={delta})")


def gamma_star_medium(geom, omega=1.0, inner_shell=PUSHFORWARD):
    """``gamma*`` laid out as a medium (``eps = mu = gamma*``), for tabulation."""
    one = RadialTensor.isotropic(1.0 + 0j)
    shell = RadialTensor.isotropic(inner_shell_value(geom, inner_shell) + 0j)

    def mid(r):
        return _middle_shell(r, geom).scale(1.0 + 0j)

    return RadialMedium(
        (
            Segment(0.0, 0.5, one, one),
            Segment(0.5, 1.0, shell, shell),
            Segment(1.0, 2.0, mid, mid),
            Segment(2.0, 3.0, one, one),
        ),
        omega,
        label="gamma*",
    )
