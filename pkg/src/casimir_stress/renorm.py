"""Spectral stress densities and their renormalization.

Per polarization the density is

    W_p = (1/nu_p) (k^2 - d_z d_z0) g_p |_{z0 -> z},   k^2 = u^2 + n^2 kappa^2,

and the subtracted part ``W0_p`` is the same expression for the outgoing
waves, i.e. the natural solutions of the local segment continued without
edges.  With local reflection ratios ``r, s`` (see :mod:`casimir_stress.green`)

    nu (W - W0) = [2 r s D0 + s (k^2 - nu^2 y_f^2) + r (k^2 - nu^2 y_h^2)]
                  / ((y_h - y_f) (1 - r s)),      D0 = k^2 - nu^2 y_f y_h,

which never subtracts two large numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from casimir_stress import bessel
from casimir_stress.green import (
    E,
    M,
    POLARIZATIONS,
    LocalState,
    ReflectionPair,
    SpectralPoint,
    transfer_cache,
)
from casimir_stress.profile import DomainError, Profile


@dataclass(frozen=True)
class SpectralDensity:
    e: float
    m: float

    @property
    def total(self) -> float:
        return self.e + self.m


def _split(state: LocalState):
    b = state.basis
    k, nu, yf, yh = b.k, b.nu, b.y_f, b.y_h
    d0 = k * k - nu * nu * yf * yh
    gap = yh - yf
    w0 = d0 / (nu * gap)
    r = state.r.value
    s = state.s.value
    sign = state.r.sign * state.s.sign
    with np.errstate(invalid="ignore"):
        log_rs = state.r.log_magnitude + state.s.log_magnitude
        rs = sign * np.exp(log_rs)
        one_minus = np.where(sign > 0, -np.expm1(log_rs), 1.0 + np.exp(log_rs))
    rs = np.nan_to_num(rs, nan=0.0)
    one_minus = np.nan_to_num(one_minus, nan=1.0)
    num = 2.0 * rs * d0 + s * (k - nu * yf) * (k + nu * yf) + r * (k - nu * yh) * (k + nu * yh)
    dw = num / (nu * gap * one_minus)
    return w0, dw


def density_parts(profile: Profile, kappa, u, z: float, side: int = 1):
    """``{pol: (W0, W - W0)}`` on arrays of spectral nodes."""
    out = {}
    for pol in POLARIZATIONS:
        tr = transfer_cache.get(profile, pol, kappa, u)
        out[pol] = _split(tr.state(z, side))
    return out


def renormalized_density(profile: Profile, kappa, u, z: float, side: int = 1):
    """Total ``W - W0`` summed over polarizations, per spectral node."""
    parts = density_parts(profile, kappa, u, z, side)
    return parts[E][1] + parts[M][1]


def spectral_density_W(profile: Profile, point: SpectralPoint, z: float) -> SpectralDensity:
    parts = density_parts(profile, [point.kappa], [point.u], z)
    return SpectralDensity(*(float(parts[p][0][0] + parts[p][1][0]) for p in POLARIZATIONS))


def spectral_density_W0(profile: Profile, point: SpectralPoint, z: float) -> SpectralDensity:
    parts = density_parts(profile, [point.kappa], [point.u], z)
    return SpectralDensity(*(float(parts[p][0][0]) for p in POLARIZATIONS))


def renormalized_spectral_density(profile: Profile, point: SpectralPoint, z: float) -> SpectralDensity:
    parts = density_parts(profile, [point.kappa], [point.u], z)
    return SpectralDensity(*(float(parts[p][1][0]) for p in POLARIZATIONS))


def wkb_density_W0(profile: Profile, point: SpectralPoint, z: float) -> SpectralDensity:
    """Geometrical-optics density from g0 = -sqrt(nu nu0/(k k0))/2 exp(-|int k|).

    Its coincidence limit is -k + (nu'/nu - k'/k)^2 / (8 k) per polarization.
    """
    eps, mu, deps, dmu = profile.material(z, point.kappa)
    eps, mu, deps, dmu = float(eps), float(mu), float(deps), float(dmu)
    k = point.local_k(profile, z)
    if k == 0.0:
        raise DomainError("geometrical optics is singular where k = 0")
    dk = point.kappa**2 * (deps * mu + eps * dmu) / (2.0 * k)
    vals = []
    for nu, dnu in ((mu, dmu), (eps, deps)):
        c = dnu / nu - dk / k
        vals.append(-k + c * c / (8.0 * k))
    return SpectralDensity(*vals)


def reflected_density_soft_wall(point: SpectralPoint, z: float, reflections: ReflectionPair, n0: float = 1.0) -> float:
    """``rho_E W_E + rho_M W_M`` inside the wall n = -1/z (pole 0, edge -1/n0).

    W_p = -(1/nu_p) F_p^2 (k^2 - (F_p'/F_p)^2) with F_E = sqrt(t) I_nu(u t),
    F_M = I_nu(u t)/sqrt(t), t = -z, nu = sqrt(kappa^2 + 1/4); the mixed
    derivative uses I' from the recurrence.
    """
    if not (-1.0 / n0 < z < 0.0):
        raise DomainError(f"z={z} is outside the wall (-1/n0, 0)")
    kappa, u = point.kappa, point.u
    t = -z
    order = math.sqrt(kappa * kappa + 0.25)
    x = u * t
    log_i = float(bessel.log_iv(order, x))
    dlog_i = float(u * bessel.log_derivative_i(order, x))
    k2 = u * u + kappa * kappa / (t * t)
    total = 0.0
    for alpha, inv_nu, rho in ((0.5, 1.0, reflections.rho_e), (-0.5, t * t, reflections.rho_m)):
        d = alpha / t + dlog_i  # |d/dz log F|
        factor = -inv_nu * (k2 - d * d)
        lg = float(rho.log_magnitude) + 2.0 * (alpha * math.log(t) + log_i) + math.log(abs(factor))
        total += float(rho.sign) * math.copysign(1.0, factor) * math.exp(lg)
    return total
