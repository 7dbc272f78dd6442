"""Planar refractive-index profiles.

A :class:`Profile` is an ordered list of :class:`Segment` objects tiling a
finite interval ``[zmin, zmax]``.  Outside that interval the medium is
uniform and takes the limiting material values of the outermost segment, at
every imaginary wavenumber ``kappa``.  A Beltrami segment whose pole sits on
the outer end of the profile leaves that side open: the profile then ends at
the pole instead of in a uniform cap.

All evaluation routines broadcast over ``kappa``; ``z`` is a scalar.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

EDGE_TOLERANCE = 1e-6
CONTINUITY_TOLERANCE = 1e-9
_KAPPA_PROBE = np.array([0.0, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4])


class ValidationError(ValueError):
    """Invalid profile definition."""


class DomainError(ValueError):
    """Argument outside the domain where a quantity is defined."""


class UntestedMediumWarning(UserWarning):
    """Magnetic media other than the geometric Beltrami case."""


@dataclass(frozen=True)
class DispersionParams:
    """Lorentz-type dispersion of the exponential profile."""

    kappa0: float

    def __post_init__(self):
        if not (self.kappa0 > 0 and math.isfinite(self.kappa0)):
            raise ValidationError(f"kappa0 must be positive, got {self.kappa0}")


# ---------------------------------------------------------------------------
# segment kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    eps: float = 1.0
    mu: float = 1.0

    kind = "uniform"

    def material(self, z, kappa, kappa0=None):
        one = np.ones_like(np.asarray(kappa, dtype=float))
        zero = np.zeros_like(one)
        return self.eps * one, self.mu * one, zero, zero

    def params(self):
        return {"eps": self.eps, "mu": self.mu}

    def scaled(self, lam):
        return self


@dataclass(frozen=True)
class Beltrami:
    """Index ``n = b / |pole - z|``.

    ``geometric=False`` gives eps = n**2, mu = 1; ``geometric=True`` gives
    eps = mu = n.
    """

    b: float
    pole: float
    geometric: bool = False

    kind = "beltrami"

    def index(self, z):
        t = abs(self.pole - z)
        if t == 0.0:
            raise DomainError(f"Beltrami profile evaluated at its pole z={z}")
        n = self.b / t
        dn = math.copysign(self.b / t**2, self.pole - z)
        return n, dn

    def material(self, z, kappa, kappa0=None):
        n, dn = self.index(z)
        one = np.ones_like(np.asarray(kappa, dtype=float))
        if self.geometric:
            return n * one, n * one, dn * one, dn * one
        return n * n * one, one, 2.0 * n * dn * one, 0.0 * one

    def params(self):
        return {"b": self.b, "pole": self.pole, "geometric": self.geometric}

    def scaled(self, lam):
        return Beltrami(self.b * lam, self.pole * lam, self.geometric)


@dataclass(frozen=True)
class ExponentialDispersive:
    """``eps = epsilon(kappa) ** (rate * (z - origin))``, mu = 1.

    Without dispersion ``epsilon = base``; with dispersion
    ``epsilon(kappa) = (kappa**2 + base*kappa0**2) / (kappa**2 + kappa0**2)``.
    """

    base: float = math.e
    origin: float = 0.0
    rate: float = 1.0

    kind = "exponential"

    def log_rate(self, kappa, kappa0=None):
        kappa = np.asarray(kappa, dtype=float)
        if kappa0 is None:
            return self.rate * math.log(self.base) * np.ones_like(kappa)
        k2 = kappa * kappa
        q2 = kappa0 * kappa0
        # log1p form keeps the rate accurate when kappa >> kappa0
        return self.rate * np.log1p((self.base - 1.0) * q2 / (k2 + q2))

    def material(self, z, kappa, kappa0=None):
        lr = self.log_rate(kappa, kappa0)
        eps = np.exp(lr * (z - self.origin))
        one = np.ones_like(eps)
        return eps, one, lr * eps, 0.0 * one

    def params(self):
        return {"base": self.base, "origin": self.origin, "rate": self.rate}

    def scaled(self, lam):
        return ExponentialDispersive(self.base, self.origin * lam, self.rate / lam)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Sampled eps(z), mu(z) with monotone cubic interpolation."""

    z: tuple
    eps: tuple
    mu: tuple
    _eps_fn: Any = field(init=False, repr=False, compare=False)
    _mu_fn: Any = field(init=False, repr=False, compare=False)

    kind = "tabulated"

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        mu = np.asarray(self.mu, dtype=float)
        if z.ndim != 1 or z.size < 2 or eps.shape != z.shape or mu.shape != z.shape:
            raise ValidationError("tabulated segment needs matching z, eps, mu arrays")
        if np.any(np.diff(z) <= 0):
            raise ValidationError("tabulated z samples must be strictly increasing")
        object.__setattr__(self, "_eps_fn", PchipInterpolator(z, eps))
        object.__setattr__(self, "_mu_fn", PchipInterpolator(z, mu))

    def material(self, z, kappa, kappa0=None):
        one = np.ones_like(np.asarray(kappa, dtype=float))
        eps = float(self._eps_fn(z))
        mu = float(self._mu_fn(z))
        deps = float(self._eps_fn(z, 1))
        dmu = float(self._mu_fn(z, 1))
        return eps * one, mu * one, deps * one, dmu * one

    def params(self):
        return {"z": list(self.z), "eps": list(self.eps), "mu": list(self.mu)}

    def scaled(self, lam):
        return Tabulated(tuple(lam * np.asarray(self.z)), self.eps, self.mu)


SegmentKind = Union[Uniform, Beltrami, ExponentialDispersive, Tabulated]
_KINDS = {cls.kind: cls for cls in (Uniform, Beltrami, ExponentialDispersive, Tabulated)}


@dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    zmin: float
    zmax: float

    def __post_init__(self):
        if not self.zmin < self.zmax:
            raise ValidationError(f"segment has zmin={self.zmin} >= zmax={self.zmax}")
        if isinstance(self.kind, Beltrami) and self.zmin < self.kind.pole < self.zmax:
            raise ValidationError(f"Beltrami pole {self.kind.pole} inside its segment")
        if isinstance(self.kind, Tabulated):
            if self.kind.z[0] > self.zmin or self.kind.z[-1] < self.zmax:
                raise ValidationError("tabulated samples must cover the segment extent")


@dataclass(frozen=True)
class EdgeDescriptor:
    """A jump of dn/dz at a point where n itself is continuous.

    ``wall_side`` is +1 when the steeper side (the wall) lies at z > z_edge.
    ``rising`` is True when n grows into the wall for increasing z, False
    when the wall lies to the left and n falls towards the edge.
    """

    z_edge: float
    n0: float
    jump: float
    rising: bool
    wall_side: int = 1

    @property
    def b(self) -> float:
        return 1.0 / abs(self.jump)


# ---------------------------------------------------------------------------
# profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    segments: tuple
    dispersion: DispersionParams | None = None
    allow_jumps: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValidationError("profile needs at least one segment")
        for left, right in zip(segs[:-1], segs[1:]):
            if abs(left.zmax - right.zmin) > 1e-12 * max(1.0, abs(left.zmax)):
                raise ValidationError(
                    f"segments must tile an interval: gap/overlap between "
                    f"{left.zmax} and {right.zmin}"
                )
        for i, seg in enumerate(segs):
            if isinstance(seg.kind, Beltrami):
                p = seg.kind.pole
                if p == seg.zmin and i != 0 or p == seg.zmax and i != len(segs) - 1:
                    raise ValidationError(f"Beltrami pole at interior boundary z={p}")
        self._check_passive()
        if not self.allow_jumps:
            for zb in self.boundaries:
                self._check_continuity(zb)
        if any(
            isinstance(s.kind, Uniform) and s.kind.mu != 1.0
            or isinstance(s.kind, Tabulated) and np.any(np.asarray(s.kind.mu) != 1.0)
            for s in segs
        ):
            warnings.warn(
                "mu != 1 outside the geometric Beltrami case is permitted but untested",
                UntestedMediumWarning,
                stacklevel=3,
            )

    # -- structure -----------------------------------------------------------

    @property
    def kappa0(self):
        return None if self.dispersion is None else self.dispersion.kappa0

    @property
    def zmin(self) -> float:
        return self.segments[0].zmin

    @property
    def zmax(self) -> float:
        return self.segments[-1].zmax

    @property
    def open_left(self) -> bool:
        k = self.segments[0].kind
        return isinstance(k, Beltrami) and k.pole == self.zmin

    @property
    def open_right(self) -> bool:
        k = self.segments[-1].kind
        return isinstance(k, Beltrami) and k.pole == self.zmax

    @property
    def boundaries(self) -> list:
        """Points where the material formula changes, including cap junctions."""
        out = [] if self.open_left else [self.zmin]
        out += [s.zmax for s in self.segments[:-1]]
        if not self.open_right:
            out.append(self.zmax)
        return out

    def domain_check(self, z: float):
        if not math.isfinite(z):
            raise DomainError(f"z={z} is not finite")
        if self.open_left and z <= self.zmin or self.open_right and z >= self.zmax:
            raise DomainError(f"z={z} lies at or beyond the Beltrami pole")

    def locate(self, z: float, side: int = 1) -> int:
        """Segment index holding ``z``: -1 for the left cap, len(segments) for the right.

        On a boundary ``side=+1`` picks the segment to the right, -1 the left one.
        """
        self.domain_check(z)
        if z < self.zmin or z == self.zmin and side < 0:
            return -1
        if z > self.zmax or z == self.zmax and side > 0:
            return len(self.segments)
        for i, seg in enumerate(self.segments):
            if seg.zmin < z < seg.zmax:
                return i
            if z == seg.zmin and side > 0 or z == seg.zmax and side < 0:
                return i
        raise DomainError(f"z={z} not located")  # pragma: no cover

    def material(self, z: float, kappa, side: int = 1):
        """Return ``eps, mu, deps/dz, dmu/dz`` at ``z`` for each ``kappa``."""
        idx = self.locate(z, side)
        kappa = np.asarray(kappa, dtype=float)
        if idx == -1:
            eps, mu, _, _ = self.segments[0].kind.material(self.zmin, kappa, self.kappa0)
            return eps, mu, 0.0 * eps, 0.0 * eps
        if idx == len(self.segments):
            eps, mu, _, _ = self.segments[-1].kind.material(self.zmax, kappa, self.kappa0)
            return eps, mu, 0.0 * eps, 0.0 * eps
        return self.segments[idx].kind.material(z, kappa, self.kappa0)

    def cap_material(self, right: bool, kappa):
        z = self.zmax if right else self.zmin
        return self.material(z, kappa, side=1 if right else -1)

    # -- validation ----------------------------------------------------------

    def _check_passive(self):
        for seg in self.segments:
            lo, hi = seg.zmin, seg.zmax
            zs = np.linspace(lo, hi, 9)
            if isinstance(seg.kind, Beltrami):
                p = seg.kind.pole
                zs = zs[zs != p]
            for z in zs:
                eps, mu, _, _ = seg.kind.material(float(z), _KAPPA_PROBE, self.kappa0)
                if np.any(eps < 1.0 - 1e-12) or np.any(mu < 1.0 - 1e-12):
                    raise ValidationError(
                        f"passive media need eps, mu >= 1; violated at z={z} in "
                        f"{seg.kind.kind} segment [{lo}, {hi}]"
                    )

    def _check_continuity(self, zb: float):
        nl, _ = refractive_index(self, zb, _KAPPA_PROBE, side=-1)
        nr, _ = refractive_index(self, zb, _KAPPA_PROBE, side=1)
        if np.any(np.abs(nl - nr) > CONTINUITY_TOLERANCE * np.maximum(1.0, nl)):
            raise ValidationError(
                f"refractive index jumps at boundary z={zb} "
                f"(n- = {nl.max():.6g}, n+ = {nr.max():.6g}); hard walls need allow_jumps"
            )

    # -- serialization -------------------------------------------------------

    def to_config(self) -> dict:
        return {
            "segments": [
                {"kind": s.kind.kind, "zmin": s.zmin, "zmax": s.zmax, "params": s.kind.params()}
                for s in self.segments
            ],
            "dispersion": None if self.dispersion is None else {"kappa0": self.dispersion.kappa0},
            "allow_jumps": self.allow_jumps,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_config(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def scaled(self, lam: float) -> "Profile":
        """Rescale every length by ``lam``."""
        segs = tuple(Segment(s.kind.scaled(lam), s.zmin * lam, s.zmax * lam) for s in self.segments)
        disp = None if self.dispersion is None else DispersionParams(self.dispersion.kappa0 / lam)
        return Profile(segs, disp, self.allow_jumps)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def permittivity(profile: Profile, z: float, kappa=0.0, side: int = 1):
    eps, _, _, _ = profile.material(z, kappa, side)
    return eps if np.ndim(kappa) else float(eps)


def permeability(profile: Profile, z: float, kappa=0.0, side: int = 1):
    _, mu, _, _ = profile.material(z, kappa, side)
    return mu if np.ndim(kappa) else float(mu)


def refractive_index(profile: Profile, z: float, kappa=0.0, side: int = 1):
    """Return ``(n, dn/dz)`` with the derivative taken from the ``side`` of ``z``."""
    eps, mu, deps, dmu = profile.material(z, kappa, side)
    n = np.sqrt(eps * mu)
    dn = (deps * mu + eps * dmu) / (2.0 * n)
    if np.ndim(kappa) == 0:
        return float(n), float(dn)
    return n, dn


def detect_edges(profile: Profile, kappa: float = 0.0, tol: float = EDGE_TOLERANCE) -> list:
    """Locate the boundaries where dn/dz jumps while n stays continuous."""
    edges = []
    for zb in profile.boundaries:
        nl, dl = refractive_index(profile, zb, kappa, side=-1)
        nr, dr = refractive_index(profile, zb, kappa, side=1)
        if abs(nl - nr) > CONTINUITY_TOLERANCE * max(1.0, nl):
            raise ValidationError(f"index discontinuity at boundary z={zb}: {nl} vs {nr}")
        jump = dr - dl
        if abs(jump) > tol:
            side = 1 if abs(dr) >= abs(dl) else -1
            edges.append(EdgeDescriptor(zb, 0.5 * (nl + nr), jump, side > 0, side))
    return edges


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_TOP_KEYS = {"segments", "dispersion", "allow_jumps"}
_SEG_KEYS = {"kind", "zmin", "zmax", "params"}
_PARAM_KEYS = {
    "uniform": {"eps", "mu"},
    "beltrami": {"b", "pole", "geometric"},
    "exponential": {"base", "origin", "rate"},
    "tabulated": {"z", "eps", "mu"},
}


def _reject_unknown(keys, allowed, where):
    extra = set(keys) - allowed
    if extra:
        raise ValidationError(f"unknown keys in {where}: {sorted(extra)}")


def profile_from_config(cfg: dict) -> Profile:
    if not isinstance(cfg, dict):
        raise ValidationError("profile config must be a JSON object")
    _reject_unknown(cfg, _TOP_KEYS, "profile")
    if "segments" not in cfg:
        raise ValidationError("profile config needs 'segments'")
    segs = []
    for i, s in enumerate(cfg["segments"]):
        _reject_unknown(s, _SEG_KEYS, f"segment {i}")
        kind = s.get("kind")
        if kind not in _KINDS:
            raise ValidationError(f"segment {i}: unknown kind {kind!r}")
        params = s.get("params", {}) or {}
        _reject_unknown(params, _PARAM_KEYS[kind], f"segment {i} params")
        try:
            if kind == "tabulated":
                params = {k: tuple(float(v) for v in params[k]) for k in ("z", "eps", "mu")}
            segs.append(Segment(_KINDS[kind](**params), float(s["zmin"]), float(s["zmax"])))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"segment {i}: {exc}") from exc
    disp = cfg.get("dispersion")
    if disp is not None:
        _reject_unknown(disp, {"kappa0"}, "dispersion")
        disp = DispersionParams(float(disp["kappa0"]))
    return Profile(tuple(segs), disp, bool(cfg.get("allow_jumps", False)))


def load_profile(source) -> Profile:
    """Read a profile from a JSON file path or an already-parsed mapping."""
    if isinstance(source, dict):
        return profile_from_config(source)
    with open(Path(source), encoding="utf-8") as fh:
        return profile_from_config(json.load(fh))


# ---------------------------------------------------------------------------
# stock profiles
# ---------------------------------------------------------------------------


def uniform_profile(eps: float = 1.0, mu: float = 1.0, zmin=-1.0, zmax=1.0) -> Profile:
    return Profile((Segment(Uniform(eps, mu), zmin, zmax),))


def soft_wall(b: float = 1.0, n0: float = 1.0, falling: bool = False) -> Profile:
    """Uniform medium of index ``n0`` meeting a realistic Beltrami wall.

    The rising wall has its edge at ``z = -1`` and the pole at
    ``z = b_pole/n0 - 1``, where ``b`` is the inverse jump of dn/dz at the edge.
    ``falling=True`` mirrors it: pole at ``z = 1 - b_pole/n0``, edge at ``z = 1``.
    """
    # dn/dz = n0**2 / b_pole at the edge, so b_pole = n0**2 * b
    b_pole = n0 * n0 * b
    t_edge = b_pole / n0
    if falling:
        pole = 1.0 - t_edge
        segs = (Segment(Beltrami(b_pole, pole), pole, 1.0), Segment(Uniform(n0 * n0), 1.0, 2.0))
    else:
        pole = -1.0 + t_edge
        segs = (Segment(Uniform(n0 * n0), -2.0, -1.0), Segment(Beltrami(b_pole, pole), -1.0, pole))
    return Profile(segs)


def fig2_profile(kappa0: float | None = 200.0) -> Profile:
    """Exponential slab ``eps = epsilon(kappa)**z`` on 0 < z < 1, uniform outside."""
    disp = None if kappa0 is None else DispersionParams(kappa0)
    return Profile((Segment(ExponentialDispersive(), 0.0, 1.0),), disp)


def mirror_pair(eps: float = 1e4, gap: float = 1.0) -> Profile:
    """Two dielectric half-spaces separated by a vacuum gap ``0 < z < gap``."""
    return Profile(
        (
            Segment(Uniform(eps), -1.0, 0.0),
            Segment(Uniform(1.0), 0.0, gap),
            Segment(Uniform(eps), gap, gap + 1.0),
        ),
        allow_jumps=True,
    )
