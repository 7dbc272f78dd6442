"""Closed-form Casimir results used as oracles for the numerical pipeline.

Wall coordinates: the realistic Beltrami wall ``n = -1/z`` occupies
``-1 < z < 0`` with its edge to vacuum at ``z = -1``.  Polar spectral
coordinates are ``kappa = w cos(theta)``, ``u = w sin(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from casimir_stress.bessel import Scaled
from casimir_stress.profile import DomainError, Profile, detect_edges

THETA_MIN = 1e-4
EDGE_COEFFICIENT = 23.0 / (240.0 * (2.0 * math.pi) ** 2)  # = 23/(960 pi^2)


@dataclass(frozen=True)
class EdgeLaw:
    """Distance ``a`` from the edge, inverse derivative jump ``b``, edge index ``n0``."""

    a: float
    b: float
    n0: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"edge distance must be positive, got a={self.a}")
        if not self.b > 0:
            raise DomainError(f"b must be positive, got b={self.b}")
        if not self.n0 >= 1:
            raise DomainError(f"n0 must be >= 1, got n0={self.n0}")


def casimir_ideal(a: float) -> float:
    """Energy density pi^2/(240 a^4) between perfect mirrors a apart."""
    if not a > 0:
        raise DomainError(f"mirror distance must be positive, got a={a}")
    return math.pi**2 / 240.0 / a**4


def near_edge_stress(law: EdgeLaw) -> float:
    """sigma_zz = 23 / (240 (2 pi)^2 n0^3 a^2 b^2); identical for rising and falling edges."""
    return EDGE_COEFFICIENT / (law.n0**3 * law.a**2 * law.b**2)


def edge_law_sum(profile: Profile, z: float, kappa: float = 0.0) -> float:
    """Sum of the near-edge laws of every edge whose wall side contains ``z``."""
    total = 0.0
    for edge in detect_edges(profile, kappa):
        a = (z - edge.z_edge) * edge.wall_side
        if a > 0:
            total += near_edge_stress(EdgeLaw(a, edge.b, max(edge.n0, 1.0)))
    return total


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < THETA_MIN) or np.any(theta > math.pi / 2 + 1e-15):
        raise DomainError(f"theta must lie in [{THETA_MIN}, pi/2]")
    return theta


def phi(z, theta):
    """Exponent sqrt(cos^2 + z^2 sin^2) + cos * arsinh(cot/z), with signed z < 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z >= 0) or np.any(z < -1.0 - 1e-12):
        raise DomainError("phi needs -1 <= z < 0")
    theta = _check_theta(theta)
    c = np.cos(theta)
    s = np.sin(theta)
    return np.sqrt(c * c + z * z * s * s) + c * np.arcsinh(c / s / z)


def asympt_reflection(theta, w):
    """Large-w reflection coefficients ``(rho_E, rho_M)`` of the vacuum/Beltrami edge."""
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise DomainError("w must be positive")
    theta = _check_theta(theta)
    c2 = np.cos(theta) ** 2
    expo = -2.0 * w * phi(-1.0, theta)
    with np.errstate(divide="ignore"):
        rho_e = Scaled(np.log(math.pi * c2 / (4.0 * w)) + expo, -np.ones_like(expo))
    rho_m = Scaled(np.log(math.pi * (2.0 - c2) / (4.0 * w)) + expo, np.ones_like(expo))
    return rho_e, rho_m


def asympt_density(z, theta, w):
    """Large-w reflected-wave densities ``(W_E, W_M)`` inside the wall."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    theta = _check_theta(theta)
    c2 = np.cos(theta) ** 2
    bracket = z * z - (z * z - 1.0) * c2
    expo = 2.0 * w * phi(z, theta)
    den = 2.0 * math.pi * z * bracket
    w_e = Scaled.from_value(-c2 / den)
    w_m = Scaled.from_value((2.0 * z * z + (1.0 - 2.0 * z * z) * c2) / den)
    return (
        Scaled(w_e.log_magnitude + expo, w_e.sign),
        Scaled(w_m.log_magnitude + expo, w_m.sign),
    )


def asymptotic_soft_wall_stress(a: float, linearized: bool = False) -> float:
    """Integrate the large-w densities and reflections over (w, theta).

    With ``linearized=True`` the exponent is replaced by -2 w a and the
    prefactors are frozen at the edge, which gives 23/(960 pi^2 a^2) exactly.
    """
    z = a - 1.0

    def inner(theta):
        if linearized:
            zeta = math.cos(theta)
            ang = 2.0 - 2.0 * zeta**2 + zeta**4
            return ang / 4.0 * math.sin(theta) / (4.0 * a * a)

        def radial(w):
            if w == 0.0:
                return 0.0
            re, rm = asympt_reflection(theta, w)
            we, wm = asympt_density(z, theta, w)
            val = (re * we).value + (rm * wm).value
            return -float(val) * w * w * math.sin(theta)

        return integrate.quad(radial, 0.0, np.inf, limit=200, epsabs=0.0, epsrel=1e-11)[0]

    lo = 0.0 if linearized else THETA_MIN
    total = integrate.quad(inner, lo, math.pi / 2, limit=200, epsabs=0.0, epsrel=1e-12)[0]
    return total / (4.0 * math.pi**2)


def angular_integral_check() -> dict:
    """Evaluate the angular and radial factors of the near-edge law."""
    # three-point Gauss-Legendre is exact for the quartic
    x, wts = np.polynomial.legendre.leggauss(3)
    zeta = 0.5 * (x + 1.0)
    angular = math.fsum(0.5 * wts * (2.0 - 2.0 * zeta**2 + zeta**4))
    radial = integrate.quad(lambda w: w * math.exp(-2.0 * w), 0.0, np.inf, epsabs=0.0, epsrel=1e-13)[0]
    assembled = angular * radial / (16.0 * math.pi**2)
    return {"angular": angular, "radial": radial, "assembled": assembled}


def lifshitz_plates(eps: float, a: float, mu: float = 1.0) -> float:
    """Gap stress between two nondispersive half-spaces from Fresnel coefficients.

    sigma = (1/2 pi^2) int int sum_p w x_p/(1 - x_p) u du dkappa,
    x_p = r_p^2 exp(-2 w a), with r_E = (mu w - k)/(mu w + k) and
    r_M = (eps w - k)/(eps w + k), k = sqrt(u^2 + eps mu kappa^2).
    Tends to pi^2/(240 a^4) as eps -> infinity.
    """
    if not a > 0:
        raise DomainError(f"plate distance must be positive, got a={a}")
    if not (eps >= 1 and mu >= 1):
        raise DomainError("need eps >= 1 and mu >= 1")

    def integrand(theta, w):
        c, s = math.cos(theta), math.sin(theta)
        k = w * math.sqrt(s * s + eps * mu * c * c)
        damp = math.exp(-2.0 * w * a)
        total = 0.0
        for r in ((mu * w - k) / (mu * w + k), (eps * w - k) / (eps * w + k)):
            x = r * r * damp
            total += x / (1.0 - x)
        return total * w**3 * s

    val = integrate.dblquad(integrand, 0.0, 60.0 / a, 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-10)[0]
    return val / (2.0 * math.pi**2)
