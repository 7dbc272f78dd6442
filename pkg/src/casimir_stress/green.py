"""Fourier-space Green functions of planar media.

For a polarization ``p`` with material parameter ``nu_p`` (``mu`` for E,
``eps`` for M) the Green function solves

    d/dz (1/nu_p) d/dz g - (u^2 + n^2 kappa^2)/nu_p g = delta(z - z0).

It is built from the solution ``psi_L`` that decays to the left and
``psi_R`` that decays to the right, carried through their impedances
``y = psi' / (nu_p psi)``.  ``y`` is continuous everywhere, also across
jumps of eps and mu.

Inside Uniform, Beltrami and exponential segments the two "natural"
solutions ``f`` (decays leftward) and ``h`` (decays rightward) are known in
closed form.  The global solutions are written there as

    psi_L = f * (1 + r),   psi_R = h * (1 + s),

with local reflection ratios ``r = A h/f`` and ``s = B f/h`` kept in log
form.  ``r`` and ``s`` only change at segment boundaries, so no ODE stepping
is needed; in Tabulated segments ``f, h`` are first-order WKB solutions and
``y`` is stepped with an adaptive Runge-Kutta integrator.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from casimir_stress import bessel
from casimir_stress.bessel import Scaled
from casimir_stress.profile import (
    Beltrami,
    DomainError,
    EdgeDescriptor,
    ExponentialDispersive,
    Profile,
    Tabulated,
    Uniform,
)

E = "E"
M = "M"
POLARIZATIONS = (E, M)

RTOL = 1e-9
ATOL = 1e-12
_FLAT_RATE = 1e-9


class SolverError(RuntimeError):
    """Impedance propagation failed (e.g. a zero of psi was crossed)."""


def _check_pol(pol):
    if pol not in POLARIZATIONS:
        raise ValueError(f"polarization must be 'E' or 'M', got {pol!r}")


@dataclass(frozen=True)
class SpectralPoint:
    """Imaginary wavenumber ``kappa`` and transverse wavenumber ``u``."""

    kappa: float
    u: float

    def __post_init__(self):
        if self.kappa < 0 or self.u < 0:
            raise DomainError("spectral point needs kappa >= 0 and u >= 0")

    @classmethod
    def polar(cls, w: float, theta: float) -> "SpectralPoint":
        return cls(w * math.cos(theta), w * math.sin(theta))

    @property
    def w(self) -> float:
        return math.hypot(self.kappa, self.u)

    @property
    def theta(self) -> float:
        return math.atan2(self.u, self.kappa)

    def local_k(self, profile: Profile, z: float, side: int = 1) -> float:
        eps, mu, _, _ = profile.material(z, self.kappa, side)
        return float(np.sqrt(self.u**2 + eps * mu * self.kappa**2))


@dataclass(frozen=True)
class GreenPair:
    """Impedances and log-amplitudes of the left- and right-decaying solutions at ``z``."""

    z: float
    polarization: str
    y_left: float
    y_right: float
    log_amp_left: float
    log_amp_right: float


@dataclass(frozen=True)
class ReflectionPair:
    rho_e: Scaled
    rho_m: Scaled


# ---------------------------------------------------------------------------
# local bases
# ---------------------------------------------------------------------------


@dataclass
class Basis:
    """Natural solutions ``f`` (decays leftward) and ``h`` at one point, per spectral node."""

    k: np.ndarray
    nu: np.ndarray
    y_f: np.ndarray
    y_h: np.ndarray
    log_f: np.ndarray
    log_h: np.ndarray

    @property
    def delta(self):
        return self.log_h - self.log_f


def _uniform_basis(eps, mu, pol, kappa, u, z):
    k = np.sqrt(u * u + eps * mu * kappa * kappa)
    nu = mu if pol == E else eps
    return Basis(k, nu, k / nu, -k / nu, k * z, -k * z)


def _bessel_pair(order, x, dxdz_over_x):
    """Log values and z-log-derivatives of I_order(x) and K_order(x)."""
    li0 = bessel.log_ive(order, x)
    li1 = bessel.log_ive(order + 1.0, x)
    lk0 = bessel.log_kve(order, x)
    lk1 = bessel.log_kve(order + 1.0, x)
    # x * Z'/Z from the recurrences
    xi = order + x * np.exp(li1 - li0)
    xk = order - x * np.exp(lk1 - lk0)
    return li0 + x, lk0 - x, dxdz_over_x * xi, dxdz_over_x * xk


def _beltrami_basis(seg: Beltrami, pol, kappa, u, z):
    t = abs(seg.pole - z)
    if t == 0.0:
        raise DomainError("Beltrami basis evaluated at the pole")
    sigma = 1.0 if seg.pole > z else -1.0
    n = seg.b / t
    if seg.geometric:
        alpha = 0.0
        order = kappa * seg.b
        nu = n * np.ones_like(kappa)
    else:
        alpha = 0.5 if pol == E else -0.5
        order = np.sqrt((kappa * seg.b) ** 2 + 0.25)
        nu = np.ones_like(kappa) if pol == E else n * n * np.ones_like(kappa)
    x = np.maximum(u * t, 1e-300)
    li, lk, di, dk = _bessel_pair(order, x, -sigma / t)
    shift = alpha * math.log(t)
    di = di - sigma * alpha / t
    dk = dk - sigma * alpha / t
    k = np.sqrt(u * u + (n * kappa) ** 2)
    if sigma > 0:
        # pole to the right: K decays leftward, I decays toward the pole
        return Basis(k, nu, dk / nu, di / nu, lk + shift, li + shift)
    return Basis(k, nu, di / nu, dk / nu, li + shift, lk + shift)


def _exponential_basis(seg: ExponentialDispersive, kappa0, pol, kappa, u, z):
    rate = seg.log_rate(kappa, kappa0)
    s = z - seg.origin
    eps = np.exp(rate * s)
    nu = np.ones_like(kappa) if pol == E else eps
    k = np.sqrt(u * u + eps * kappa * kappa)
    y_f = np.empty_like(k)
    y_h = np.empty_like(k)
    lf = np.empty_like(k)
    lh = np.empty_like(k)

    flat = np.abs(rate) < _FLAT_RATE
    zero = (kappa == 0.0) & ~flat
    gen = ~flat & ~zero
    if np.any(flat):
        b = _uniform_basis(eps[flat], 1.0, pol, kappa[flat], u[flat], z)
        b.nu = nu[flat]
        b.y_f, b.y_h = b.k / b.nu, -b.k / b.nu
        y_f[flat], y_h[flat], lf[flat], lh[flat] = b.y_f, b.y_h, b.log_f, b.log_h
    if np.any(zero):
        # kappa = 0: plain exponentials
        r, uu = rate[zero], u[zero]
        if pol == E:
            lam_p, lam_m = uu, -uu
        else:
            root = np.sqrt(0.25 * r * r + uu * uu)
            lam_p, lam_m = 0.5 * r + root, 0.5 * r - root
        y_f[zero] = lam_p / nu[zero]
        y_h[zero] = lam_m / nu[zero]
        lf[zero] = lam_p * z
        lh[zero] = lam_m * z
    if np.any(gen):
        r, uu, kk = rate[gen], u[gen], kappa[gen]
        ar = np.abs(r)
        if pol == E:
            order = 2.0 * uu / ar
            shift_log, shift_d = 0.0, 0.0
        else:
            order = np.sqrt(4.0 * uu * uu / (r * r) + 1.0)
            shift_log, shift_d = 0.5 * r * s, 0.5 * r
        x = 2.0 * kk / ar * np.exp(0.5 * r * s)
        li, lk, di, dk = _bessel_pair(order, x, 0.5 * r)
        rising = r > 0
        f_log = np.where(rising, li, lk) + shift_log
        h_log = np.where(rising, lk, li) + shift_log
        f_d = np.where(rising, di, dk) + shift_d
        h_d = np.where(rising, dk, di) + shift_d
        y_f[gen] = f_d / nu[gen]
        y_h[gen] = h_d / nu[gen]
        lf[gen] = f_log
        lh[gen] = h_log
    return Basis(k, nu, y_f, y_h, lf, lh)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _wkb_basis(profile: Profile, seg_index: int, pol, kappa, u, z):
    """First-order WKB basis of a Tabulated segment, phase measured from its left end."""
    seg = profile.segments[seg_index]
    eps, mu, deps, dmu = seg.kind.material(z, kappa)
    nu = mu if pol == E else eps
    dnu = dmu if pol == E else deps
    k2 = u * u + eps * mu * kappa * kappa
    k = np.sqrt(k2)
    dk = kappa * kappa * (deps * mu + eps * dmu) / (2.0 * k)
    c = 0.5 * (dnu / nu - dk / k)
    phase = np.zeros_like(k)
    if z > seg.zmin:
        half = 0.5 * (z - seg.zmin)
        for xg, wg in zip(_GL_X, _GL_W):
            zq = seg.zmin + half * (xg + 1.0)
            e_q, m_q, _, _ = seg.kind.material(zq, kappa)
            phase += wg * half * np.sqrt(u * u + e_q * m_q * kappa * kappa)
    pre = 0.5 * np.log(nu / k)
    return Basis(k, nu, (k + c) / nu, (-k + c) / nu, pre + phase, pre - phase)


def local_basis(profile: Profile, region: int, pol: str, kappa, u, z: float) -> Basis:
    """Basis of ``region`` (segment index, -1 / len for the caps) evaluated at ``z``."""
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    kappa, u = np.broadcast_arrays(kappa, u)
    if region < 0 or region >= len(profile.segments):
        eps, mu, _, _ = profile.cap_material(region >= 0, kappa)
        return _uniform_basis(eps, mu, pol, kappa, u, z)
    kind = profile.segments[region].kind
    if isinstance(kind, Uniform):
        return _uniform_basis(kind.eps, kind.mu, pol, kappa, u, z)
    if isinstance(kind, Beltrami):
        return _beltrami_basis(kind, pol, kappa, u, z)
    if isinstance(kind, ExponentialDispersive):
        return _exponential_basis(kind, profile.kappa0, pol, kappa, u, z)
    if isinstance(kind, Tabulated):
        return _wkb_basis(profile, region, pol, kappa, u, z)
    raise TypeError(f"unsupported segment kind {type(kind).__name__}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Riccati stepping
# ---------------------------------------------------------------------------


def _region_material(profile, region, z, kappa):
    if region < 0 or region >= len(profile.segments):
        return profile.cap_material(region >= 0, kappa)
    return profile.segments[region].kind.material(z, kappa, profile.kappa0)


def _riccati_rhs(profile, pol, kappa, u, region):
    n_pts = kappa.size

    def rhs(z, state):
        eps, mu, _, _ = _region_material(profile, region, z, kappa)
        nu = mu if pol == E else eps
        y = state[:n_pts]
        k2 = u * u + eps * mu * kappa * kappa
        return np.concatenate([k2 / nu - nu * y * y, nu * y])

    return rhs


def _step_riccati(profile, pol, kappa, u, z_from, z_to, y0, rtol=RTOL, atol=ATOL):
    """Integrate y and log psi from z_from to z_to, restarting at every boundary."""
    y = np.array(y0, dtype=float)
    logamp = np.zeros_like(y)
    if z_from == z_to:
        return y, logamp
    lo, hi = min(z_from, z_to), max(z_from, z_to)
    stops = sorted({zb for zb in profile.boundaries if lo < zb < hi}, reverse=z_to < z_from)
    nodes = [z_from, *stops, z_to]
    for a, b in zip(nodes[:-1], nodes[1:]):
        rhs = _riccati_rhs(profile, pol, kappa, u, profile.locate(0.5 * (a + b)))
        sol = solve_ivp(
            rhs, (a, b), np.concatenate([y, logamp]), method="DOP853", rtol=rtol, atol=atol
        )
        if sol.status != 0 or not np.all(np.isfinite(sol.y[:, -1])):
            bad = sol.t[-1] if sol.t.size else a
            raise SolverError(f"impedance blow-up near z={bad:.6g}: psi has a zero, check y_init")
        y = sol.y[: y.size, -1]
        logamp = sol.y[y.size :, -1]
    return y, logamp


def _pole_start(profile: Profile, pol, kappa, u, right: bool):
    """Starting point and leading power-law impedance next to an open pole."""
    seg = profile.segments[-1 if right else 0].kind
    t0 = 1e-6 * seg.b
    z0 = seg.pole - t0 if right else seg.pole + t0
    if seg.geometric:
        alpha, order = 0.0, kappa * seg.b
        nu = seg.b / t0 * np.ones_like(kappa)
    else:
        alpha = 0.5 if pol == E else -0.5
        order = np.sqrt((kappa * seg.b) ** 2 + 0.25)
        nu = np.ones_like(kappa) if pol == E else (seg.b / t0) ** 2 * np.ones_like(kappa)
    # psi ~ t**(alpha + order) * (1 + x^2/(4(order+1))), x = u t
    x = u * t0
    dlog_dt = (alpha + order) / t0 + x * u / (2.0 * (order + 1.0)) / (1.0 + x * x / (4.0 * (order + 1.0)))
    sign = -1.0 if right else 1.0
    return z0, sign * dlog_dt / nu


def stepped_impedances(profile: Profile, pol: str, kappa, u, z: float, rtol=RTOL, atol=ATOL):
    """``(y_L, y_R)`` at ``z`` by Runge-Kutta integration in from both ends."""
    _check_pol(pol)
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    kappa, u = np.broadcast_arrays(kappa, u)
    profile.domain_check(z)
    if profile.open_left:
        zl, yl = _pole_start(profile, pol, kappa, u, right=False)
    else:
        zl = min(profile.zmin, z)
        b = local_basis(profile, -1, pol, kappa, u, zl)
        yl = b.y_f
    if profile.open_right:
        zr, yr = _pole_start(profile, pol, kappa, u, right=True)
    else:
        zr = max(profile.zmax, z)
        b = local_basis(profile, len(profile.segments), pol, kappa, u, zr)
        yr = b.y_h
    y_left, la = _step_riccati(profile, pol, kappa, u, zl, z, yl, rtol, atol)
    y_right, lb = _step_riccati(profile, pol, kappa, u, zr, z, yr, rtol, atol)
    return y_left, y_right


# ---------------------------------------------------------------------------
# reflection-ratio transfer
# ---------------------------------------------------------------------------


def _scaled(value):
    return Scaled.from_value(value)


def _into_left(prev: Basis, r_prev: Scaled, cur: Basis) -> Scaled:
    """Reflection ratio of psi_L in the new region from the state just left of the boundary."""
    rp = r_prev.value
    num = (cur.y_f - prev.y_f) + rp * (cur.y_f - prev.y_h)
    den = (prev.y_f - cur.y_h) + rp * (prev.y_h - cur.y_h)
    return _scaled(num / den)


def _into_right(nxt: Basis, s_next: Scaled, cur: Basis) -> Scaled:
    sn = s_next.value
    num = (cur.y_h - nxt.y_h) + sn * (cur.y_h - nxt.y_f)
    den = (nxt.y_h - cur.y_f) + sn * (nxt.y_f - cur.y_f)
    return _scaled(num / den)


def _shift(r: Scaled, amount) -> Scaled:
    return Scaled(r.log_magnitude + amount, r.sign)


def _ratio_from_impedance(b: Basis, y, left: bool) -> Scaled:
    if left:
        return _scaled((b.y_f - y) / (y - b.y_h))
    return _scaled((b.y_h - y) / (y - b.y_f))


@dataclass
class LocalState:
    """Everything the stress density needs at one ``z`` for one polarization."""

    basis: Basis
    r: Scaled
    s: Scaled

    @property
    def y_left(self):
        r = self.r.value
        return (self.basis.y_f + r * self.basis.y_h) / (1.0 + r)

    @property
    def y_right(self):
        s = self.s.value
        return (self.basis.y_h + s * self.basis.y_f) / (1.0 + s)


class Transfer:
    """Reflection ratios at every boundary for one polarization and a set of spectral nodes."""

    def __init__(self, profile: Profile, pol: str, kappa, u, rtol=RTOL, atol=ATOL):
        _check_pol(pol)
        kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
        u = np.atleast_1d(np.asarray(u, dtype=float))
        self.kappa, self.u = np.broadcast_arrays(kappa, u)
        self.profile = profile
        self.pol = pol
        self.rtol, self.atol = rtol, atol
        nseg = len(profile.segments)
        zero = Scaled(np.full(self.kappa.shape, -np.inf), np.ones(self.kappa.shape))
        self._left = {}   # region -> (anchor z, anchor basis, r at anchor)
        self._right = {}  # region -> (anchor z, anchor basis, s at anchor)
        self._yleft = {}
        self._yright = {}

        edges = [seg.zmin for seg in profile.segments] + [profile.zmax]
        # left sweep: psi_L enters each region from its left boundary
        if profile.open_left:
            self._left[0] = ("pole", None, zero)
            start = 1
        else:
            self._left[-1] = (edges[0], self.basis(-1, edges[0]), zero)
            start = 0
        for j in range(start, nseg + 1):
            if j == nseg and profile.open_right:
                break
            zb = edges[j]
            prev_b, prev_r = self._left_at(j - 1, zb)
            cur_b = self.basis(j, zb)
            self._left[j] = (zb, cur_b, _into_left(prev_b, prev_r, cur_b))
            if self._tabulated(j):
                rp = prev_r.value
                self._yleft[j] = (zb, (prev_b.y_f + rp * prev_b.y_h) / (1.0 + rp))
        # right sweep: psi_R enters each region from its right boundary
        if profile.open_right:
            self._right[nseg - 1] = ("pole", None, zero)
            start = nseg - 2
        else:
            self._right[nseg] = (edges[nseg], self.basis(nseg, edges[nseg]), zero)
            start = nseg - 1
        for j in range(start, -2, -1):
            if j == -1 and profile.open_left:
                break
            zb = edges[j + 1]
            nxt_b, nxt_s = self._right_at(j + 1, zb)
            cur_b = self.basis(j, zb)
            self._right[j] = (zb, cur_b, _into_right(nxt_b, nxt_s, cur_b))
            if self._tabulated(j):
                sn = nxt_s.value
                self._yright[j] = (zb, (nxt_b.y_h + sn * nxt_b.y_f) / (1.0 + sn))

    def basis(self, region, z):
        return local_basis(self.profile, region, self.pol, self.kappa, self.u, z)

    def _tabulated(self, region):
        return 0 <= region < len(self.profile.segments) and isinstance(
            self.profile.segments[region].kind, Tabulated
        )

    def _left_at(self, region, z, b=None):
        """Basis and r of region at z (z inside or on the closure of region)."""
        b = self.basis(region, z) if b is None else b
        anchor_z, anchor_b, r0 = self._left[region]
        if self._tabulated(region):
            z0, y0 = self._yleft[region]
            y, _ = _step_riccati(self.profile, self.pol, self.kappa, self.u, z0, z, y0, self.rtol, self.atol)
            return b, _ratio_from_impedance(b, y, left=True)
        if anchor_z == "pole":
            return b, r0
        return b, _shift(r0, b.delta - anchor_b.delta)

    def _right_at(self, region, z, b=None):
        b = self.basis(region, z) if b is None else b
        anchor_z, anchor_b, s0 = self._right[region]
        if self._tabulated(region):
            z0, y0 = self._yright[region]
            y, _ = _step_riccati(self.profile, self.pol, self.kappa, self.u, z0, z, y0, self.rtol, self.atol)
            return b, _ratio_from_impedance(b, y, left=False)
        if anchor_z == "pole":
            return b, s0
        return b, _shift(s0, anchor_b.delta - b.delta)

    def state(self, z: float, side: int = 1) -> LocalState:
        region = self.profile.locate(z, side)
        b = self.basis(region, z)
        _, r = self._left_at(region, z, b)
        _, s = self._right_at(region, z, b)
        return LocalState(b, r, s)


class _TransferCache:
    """Bounded LRU of Transfer objects keyed by profile, polarization and nodes."""

    def __init__(self, maxsize=64):
        self.maxsize = maxsize
        self._data = OrderedDict()

    def get(self, profile, pol, kappa, u):
        kappa = np.ascontiguousarray(kappa, dtype=float)
        u = np.ascontiguousarray(u, dtype=float)
        key = (profile, pol, kappa.shape, kappa.tobytes(), u.tobytes())
        hit = self._data.get(key)
        if hit is not None:
            self._data.move_to_end(key)
            return hit
        tr = Transfer(profile, pol, kappa, u)
        self._data[key] = tr
        if len(self._data) > self.maxsize:
            self._data.popitem(last=False)
        return tr

    def clear(self):
        self._data.clear()


transfer_cache = _TransferCache()


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImpedanceResult:
    y: float
    log_amplitude: float


def _closed_form_step(ba: Basis, bb: Basis, y, a, b):
    """Carry ``y`` across one closed-form region from ``a`` to ``b``.

    psi = f (1 + q) with q = A h/f when the f content dominates, otherwise
    psi = h (1 + p) with p = 1/q; either ratio only rescales along the way.
    """
    num = ba.y_f - y
    den = y - ba.y_h
    if not np.all(np.isfinite(y)):
        raise SolverError(f"non-finite impedance at z={a}")
    use_q = np.abs(num) <= np.abs(den)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_a = np.where(use_q, num / den, den / num)
        shift = np.where(use_q, 1.0, -1.0) * (bb.delta - ba.delta)
        ratio_b = np.sign(ratio_a) * np.exp(np.log(np.abs(ratio_a)) + shift)
    ratio_b = np.where(ratio_a == 0.0, 0.0, ratio_b)
    if np.any(1.0 + ratio_b == 0.0) or np.any((1.0 + ratio_a) * (1.0 + ratio_b) <= 0):
        raise SolverError(f"psi crosses zero between z={a} and z={b}; bad y_init")
    y_main = np.where(use_q, bb.y_f, bb.y_h)
    y_other = np.where(use_q, bb.y_h, bb.y_f)
    y_new = (y_main + ratio_b * y_other) / (1.0 + ratio_b)
    log_main = np.where(use_q, bb.log_f - ba.log_f, bb.log_h - ba.log_h)
    step = log_main + np.log(np.abs(1.0 + ratio_b)) - np.log(np.abs(1.0 + ratio_a))
    return y_new, float(step[0])


def propagate_impedance(
    profile: Profile,
    polarization: str,
    point: SpectralPoint,
    z_from: float,
    z_to: float,
    y_init: float,
    method: str = "auto",
    rtol: float = RTOL,
    atol: float = ATOL,
) -> ImpedanceResult:
    """Carry an impedance from ``z_from`` to ``z_to``.

    Returns ``y(z_to)`` and ``log|psi(z_to)/psi(z_from)|``.  ``method="auto"``
    uses the closed-form segment solutions wherever they exist and steps the
    Riccati equation ``y' = k^2/nu - nu y^2`` elsewhere; ``"stepped"`` always
    steps.
    """
    _check_pol(polarization)
    if z_from == z_to:
        raise DomainError("z_from and z_to must differ")
    if not math.isfinite(y_init):
        raise DomainError("y_init must be finite")
    profile.domain_check(z_from)
    profile.domain_check(z_to)
    kappa = np.array([point.kappa])
    u = np.array([point.u])
    if method == "stepped":
        y, la = _step_riccati(profile, polarization, kappa, u, z_from, z_to, [y_init], rtol, atol)
        return ImpedanceResult(float(y[0]), float(la[0]))
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")

    direction = 1 if z_to > z_from else -1
    stops = sorted(
        {zb for zb in profile.boundaries if min(z_from, z_to) < zb < max(z_from, z_to)},
        reverse=direction < 0,
    )
    nodes = [z_from, *stops, z_to]
    y = np.array([float(y_init)])
    total = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        region = profile.locate(0.5 * (a + b))
        if 0 <= region < len(profile.segments) and isinstance(profile.segments[region].kind, Tabulated):
            y, la = _step_riccati(profile, polarization, kappa, u, a, b, y, rtol, atol)
            total += float(la[0])
            continue
        ba = local_basis(profile, region, polarization, kappa, u, a)
        bb = local_basis(profile, region, polarization, kappa, u, b)
        y, step = _closed_form_step(ba, bb, y, a, b)
        total += step
    return ImpedanceResult(float(y[0]), total)


def green_pair(profile: Profile, polarization: str, point: SpectralPoint, z: float) -> GreenPair:
    _check_pol(polarization)
    tr = Transfer(profile, polarization, point.kappa, point.u)
    st = tr.state(z)
    r, s = st.r.value, st.s.value
    return GreenPair(
        z,
        polarization,
        float(st.y_left[0]),
        float(st.y_right[0]),
        float(st.basis.log_f[0] + np.log(np.abs(1.0 + r[0]))),
        float(st.basis.log_h[0] + np.log(np.abs(1.0 + s[0]))),
    )


def green_at_coincidence(profile: Profile, polarization: str, point: SpectralPoint, z: float, method: str = "auto"):
    """``(g(z,z), d_z d_z0 g |_{z0=z})`` from the impedances.

    g(z, z) = 1/(y_R - y_L) and the mixed derivative is nu^2 y_L y_R g(z, z).
    """
    _check_pol(polarization)
    if method == "stepped":
        yl, yr = stepped_impedances(profile, polarization, point.kappa, point.u, z)
        yl, yr = float(yl[0]), float(yr[0])
    else:
        pair = green_pair(profile, polarization, point, z)
        yl, yr = pair.y_left, pair.y_right
    eps, mu, _, _ = profile.material(z, point.kappa)
    nu = float(mu if polarization == E else eps)
    g = 1.0 / (yr - yl)
    return g, nu * nu * yl * yr * g


def green_function(profile: Profile, polarization: str, point: SpectralPoint, z: float, z0: float, route: str = "left"):
    """Off-diagonal ``g(z, z0)``.

    ``route="left"`` uses psi_L between the two points, ``"right"`` uses
    psi_R; reciprocity makes them equal.
    """
    _check_pol(polarization)
    lo, hi = (z, z0) if z <= z0 else (z0, z)
    if lo == hi:
        return green_at_coincidence(profile, polarization, point, z)[0]
    if route == "left":
        pair = green_pair(profile, polarization, point, hi)
        log_ratio = pair.log_amp_left - green_pair(profile, polarization, point, lo).log_amp_left
        return math.exp(-log_ratio) / (pair.y_right - pair.y_left)
    pair = green_pair(profile, polarization, point, lo)
    log_ratio = green_pair(profile, polarization, point, hi).log_amp_right - pair.log_amp_right
    return math.exp(log_ratio) / (pair.y_right - pair.y_left)


def beltrami_green_fourier(polarization: str, kappa: float, u: float, z: float, z0: float, b: float = 1.0, geometric: bool = False):
    """Closed-form Green function of the unbounded Beltrami profile n = -b/z (z, z0 < 0)."""
    _check_pol(polarization)
    if z >= 0 or z0 >= 0:
        raise DomainError("Beltrami Green function needs z, z0 < 0")
    t_near, t_far = sorted((-z, -z0))
    order = kappa * b if geometric else math.sqrt((kappa * b) ** 2 + 0.25)
    log_ik = float(bessel.log_iv(order, u * t_near) + bessel.log_kv(order, u * t_far))
    if geometric:
        return -b * math.exp(log_ik)
    if polarization == E:
        return -math.sqrt(t_near * t_far) * math.exp(log_ik)
    return -(b * b) / math.sqrt(t_near * t_far) * math.exp(log_ik)


def soft_wall_reflection(point: SpectralPoint, edge: EdgeDescriptor | float = 1.0) -> ReflectionPair:
    """Exact rho_E, rho_M of a uniform medium meeting the realistic wall n = -1/z.

    Wall units: pole at z = 0, edge at z = -1/n0.  ``edge`` is an
    :class:`EdgeDescriptor` or the edge index ``n0``.
    """
    n0 = edge.n0 if isinstance(edge, EdgeDescriptor) else float(edge)
    if n0 < 1:
        raise DomainError("n0 must be >= 1")
    kappa, u = point.kappa, point.u
    t = 1.0 / n0
    order = math.sqrt(kappa * kappa + 0.25)
    x = u * t
    if x <= 0:
        raise DomainError("soft_wall_reflection needs u > 0")
    k0 = math.hypot(u, n0 * kappa)
    li, lk, di, dk = _bessel_pair(np.array([order]), np.array([x]), 1.0 / t)
    out = []
    for alpha in (0.5, -0.5):
        # d/dt log(t^alpha Z) ; d/dz = -d/dt
        num = alpha / t + dk[0] + k0
        den = alpha / t + di[0] + k0
        with np.errstate(divide="ignore"):
            lg = lk[0] - li[0] + np.log(abs(num) / den)
        out.append(Scaled(np.array(lg), np.array(-math.copysign(1.0, num))))
    return ReflectionPair(out[0], out[1])


def geodesic_length(x: float, y: float, z: float, z0: float) -> float:
    """Optical path length 2 artanh(c-/c+) in the Beltrami half-space n = -1/z."""
    if z >= 0 or z0 >= 0:
        raise DomainError("points must lie in z < 0")
    c_plus = math.sqrt(x * x + y * y + (z + z0) ** 2)
    c_minus = math.sqrt(x * x + y * y + (z - z0) ** 2)
    if c_minus == 0.0:
        raise DomainError("source and field point coincide")
    return 2.0 * math.atanh(c_minus / c_plus)


def beltrami_green_realspace(x: float, y: float, z: float, z0: float, kappa: float) -> float:
    """Real-space Green function -exp(-kappa s)/(2 pi c+ c-) of the geometric Beltrami profile."""
    s = geodesic_length(x, y, z, z0)
    c_plus = math.sqrt(x * x + y * y + (z + z0) ** 2)
    c_minus = math.sqrt(x * x + y * y + (z - z0) ** 2)
    return -math.exp(-kappa * s) / (2.0 * math.pi * c_plus * c_minus)
