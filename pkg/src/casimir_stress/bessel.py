"""Modified Bessel functions of real order in log-scaled form.

Values are carried as ``sign * exp(log_magnitude)`` so that products such as
``I_nu(x) * K_nu(y)`` can be formed when the factors alone over- or underflow.

Evaluation strategy, per element:

* exponentially scaled AMOS routines (``scipy.special.ive``/``kve``) when the
  scaled value is representable;
* the Debye uniform expansion (14 terms) for order >= 50;
* small-argument series for the remaining low orders, where only tiny x
  can leave the representable range.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

DEBYE_MIN_ORDER = 50.0
_DEBYE_TERMS = 14
_TINY = 1e-290
_HUGE = 1e290


class ArgumentError(ValueError):
    """Bessel function argument outside nu >= 0, x > 0, finite."""


class AsymptoticAccuracyWarning(UserWarning):
    """Leading uniform asymptotics requested where sqrt(nu**2 + x**2) < 1."""


@dataclass(frozen=True)
class Scaled:
    """``sign * exp(log_magnitude)``; fields may be numpy arrays."""

    log_magnitude: np.ndarray
    sign: np.ndarray

    @property
    def value(self):
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_magnitude)

    def __mul__(self, other: "Scaled") -> "Scaled":
        return Scaled(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "Scaled") -> "Scaled":
        return Scaled(self.log_magnitude - other.log_magnitude, self.sign * other.sign)

    def scale(self, factor) -> "Scaled":
        factor = np.asarray(factor, dtype=float)
        with np.errstate(divide="ignore"):
            return Scaled(self.log_magnitude + np.log(np.abs(factor)), self.sign * np.sign(factor))

    @classmethod
    def from_value(cls, v) -> "Scaled":
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(v)), np.sign(v))


ScaledBessel = Scaled


# ---------------------------------------------------------------------------
# Debye expansion
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _debye_polynomials():
    p2 = Polynomial([0.0, 0.0, 1.0])
    polys = [Polynomial([1.0])]
    for _ in range(_DEBYE_TERMS):
        uk = polys[-1]
        nxt = 0.5 * p2 * (1.0 - p2) * uk.deriv() + ((1.0 - 5.0 * p2) * uk).integ(lbnd=0.0) / 8.0
        polys.append(nxt)
    return tuple(polys)


def _debye(nu, x):
    """Return (log I - x, log K + x) from the Debye expansion."""
    z = x / nu
    sq = np.hypot(1.0, z)
    p = 1.0 / sq
    # nu*eta - x with eta = sq + log(z/(1+sq)), arranged to avoid cancellation
    a = nu / (sq + z) + nu * np.log(z / (1.0 + sq))
    s_i = np.zeros_like(nu)
    s_k = np.zeros_like(nu)
    inv = 1.0 / nu
    powk = np.ones_like(nu)
    for k, uk in enumerate(_debye_polynomials()):
        term = uk(p) * powk
        s_i += term
        s_k += term if k % 2 == 0 else -term
        powk = powk * inv
    half_log_sq = 0.5 * np.log(sq)
    log_ie = a - 0.5 * np.log(2.0 * np.pi * nu) - half_log_sq + np.log(s_i)
    log_ke = -a + 0.5 * np.log(np.pi / (2.0 * nu)) - half_log_sq + np.log(s_k)
    return log_ie, log_ke


def _small_x_log_i(nu, x):
    """log I_nu(x) from the power series; used where x << 1."""
    q = 0.25 * x * x
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 12):
        term = term * q / (k * (nu + k))
        total += term
    return nu * np.log(0.5 * x) - special.gammaln(nu + 1.0) + np.log(total)


def _small_x_log_k(nu, x):
    """log K_nu(x) for nu > 1, x << 1: leading power plus first correction."""
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = np.where(np.abs(nu - 1.0) > 1e-3, 0.25 * x * x / (1.0 - nu), 0.0)
    return special.gammaln(nu) - math.log(2.0) + nu * np.log(2.0 / x) + np.log1p(corr)


# ---------------------------------------------------------------------------
# scaled logs
# ---------------------------------------------------------------------------


def _prepare(nu, x):
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(x))):
        raise ArgumentError("Bessel arguments must be finite")
    if np.any(nu < 0) or np.any(x <= 0):
        raise ArgumentError("need order nu >= 0 and argument x > 0")
    nu, x = np.broadcast_arrays(nu, x)
    # subnormal orders upset AMOS; the shift is far below double precision
    nu = np.where(nu < 1e-15, 0.0, nu)
    return np.atleast_1d(nu), np.atleast_1d(x), nu.shape


def log_ive(nu, x):
    """``log(I_nu(x)) - x``."""
    nu, x, shape = _prepare(nu, x)
    with np.errstate(all="ignore"):
        v = special.ive(nu, x)
        out = np.log(v)
    bad = ~(np.isfinite(v) & (v > _TINY) & (v < _HUGE))
    if np.any(bad):
        out = np.array(out, dtype=float)
        deb = bad & (nu >= DEBYE_MIN_ORDER)
        if np.any(deb):
            out[deb] = _debye(nu[deb], x[deb])[0]
        low = bad & ~deb
        if np.any(low):
            out[low] = _small_x_log_i(nu[low], x[low]) - x[low]
    return out.reshape(shape)


def log_kve(nu, x):
    """``log(K_nu(x)) + x``."""
    nu, x, shape = _prepare(nu, x)
    with np.errstate(all="ignore"):
        v = special.kve(nu, x)
        out = np.log(v)
    bad = ~(np.isfinite(v) & (v > _TINY) & (v < _HUGE))
    if np.any(bad):
        out = np.array(out, dtype=float)
        deb = bad & (nu >= DEBYE_MIN_ORDER)
        if np.any(deb):
            out[deb] = _debye(nu[deb], x[deb])[1]
        low = bad & ~deb
        if np.any(low):
            out[low] = _small_x_log_k(nu[low], x[low]) + x[low]
    return out.reshape(shape)


def log_iv(nu, x):
    return log_ive(nu, x) + np.asarray(x, dtype=float)


def log_kv(nu, x):
    return log_kve(nu, x) - np.asarray(x, dtype=float)


def iv_ratio(nu, x):
    """``I_{nu+1}(x) / I_nu(x)``."""
    nu = np.asarray(nu, dtype=float)
    return np.exp(log_ive(nu + 1.0, x) - log_ive(nu, x))


def kv_ratio(nu, x):
    """``K_{nu+1}(x) / K_nu(x)``."""
    nu = np.asarray(nu, dtype=float)
    return np.exp(log_kve(nu + 1.0, x) - log_kve(nu, x))


def log_derivative_i(nu, x):
    """``I_nu'(x) / I_nu(x) = I_{nu+1}/I_nu + nu/x``."""
    return iv_ratio(nu, x) + np.asarray(nu, dtype=float) / np.asarray(x, dtype=float)


def log_derivative_k(nu, x):
    """``K_nu'(x) / K_nu(x) = nu/x - K_{nu+1}/K_nu``."""
    return np.asarray(nu, dtype=float) / np.asarray(x, dtype=float) - kv_ratio(nu, x)


# ---------------------------------------------------------------------------
# public functions
# ---------------------------------------------------------------------------


def mod_bessel_i(nu, x) -> Scaled:
    lg = log_iv(nu, x)
    return Scaled(lg, np.ones_like(lg))


def mod_bessel_k(nu, x) -> Scaled:
    lg = log_kv(nu, x)
    return Scaled(lg, np.ones_like(lg))


def mod_bessel_i_prime(nu, x) -> Scaled:
    """Derivative via ``I' = I_{nu+1} + (nu/x) I_nu`` (always positive)."""
    lg = log_iv(nu, x) + np.log(log_derivative_i(nu, x))
    return Scaled(lg, np.ones_like(lg))


def mod_bessel_k_prime(nu, x) -> Scaled:
    """Derivative via ``K' = (nu/x) K_nu - K_{nu+1}`` (always negative)."""
    lg = log_kv(nu, x) + np.log(-log_derivative_k(nu, x))
    return Scaled(lg, -np.ones_like(lg))


def _uniform_parts(nu, x):
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(x))):
        raise ArgumentError("Bessel arguments must be finite")
    if np.any(nu < 0) or np.any(x <= 0):
        raise ArgumentError("need order nu >= 0 and argument x > 0")
    r = np.hypot(nu, x)
    if np.any(r < 1.0):
        warnings.warn(
            "uniform asymptotics used with sqrt(nu^2 + x^2) < 1",
            AsymptoticAccuracyWarning,
            stacklevel=3,
        )
    expo = r - nu * np.arcsinh(nu / x)
    return r, expo


def uniform_asymptotic_k(nu, x) -> Scaled:
    """Leading form ``sqrt(pi/2) exp(-r + nu*arsinh(nu/x)) / r**0.5``, r = hypot(nu, x)."""
    r, expo = _uniform_parts(nu, x)
    lg = 0.5 * math.log(math.pi / 2.0) - expo - 0.5 * np.log(r)
    return Scaled(lg, np.ones_like(lg))


def uniform_asymptotic_i(nu, x) -> Scaled:
    """Leading form ``exp(r - nu*arsinh(nu/x)) / (sqrt(2 pi) r**0.5)``."""
    r, expo = _uniform_parts(nu, x)
    lg = expo - 0.5 * math.log(2.0 * math.pi) - 0.5 * np.log(r)
    return Scaled(lg, np.ones_like(lg))
