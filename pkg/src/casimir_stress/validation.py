"""Invariant suite behind ``casimir-stress validate``.

Every check returns a :class:`Check` carrying the observed and expected
values so that a failure names what went wrong.
"""

from __future__ import annotations

import csv
import decimal
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from casimir_stress import analytic, bessel
from casimir_stress.green import (
    POLARIZATIONS,
    SpectralPoint,
    beltrami_green_fourier,
    green_at_coincidence,
    green_function,
)
from casimir_stress.profile import Beltrami, Profile, Segment, Uniform, mirror_pair, soft_wall, uniform_profile
from casimir_stress.stress import QuadratureParams, stress_at


@dataclass
class Check:
    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _check(name, observed, expected, tolerance, relative=True, detail=""):
    observed, expected = float(observed), float(expected)
    scale = abs(expected) if relative and expected != 0 else 1.0
    passed = math.isfinite(observed) and abs(observed - expected) <= tolerance * scale
    return Check(name, bool(passed), observed, expected, tolerance, detail)


def default_golden_path() -> Path:
    return Path(str(resources.files("casimir_stress") / "data" / "bessel_golden.csv"))


def read_golden(path) -> list:
    """Rows ``(nu, x, log I, log K)``; logs are taken in decimal arithmetic."""
    ctx = decimal.Context(prec=40)
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                (
                    float(row["nu"]),
                    float(row["x"]),
                    float(ctx.ln(decimal.Decimal(row["I"]))),
                    float(ctx.ln(decimal.Decimal(row["K"]))),
                )
            )
    return rows


def check_bessel_golden(path=None, tol=1e-10) -> Check:
    rows = read_golden(path or default_golden_path())
    nu, x, li, lk = (np.array(c) for c in zip(*rows))
    err_i = np.abs(bessel.log_iv(nu, x) - li)
    err_k = np.abs(bessel.log_kv(nu, x) - lk)
    worst = np.maximum(err_i, err_k)
    j = int(np.argmax(worst))
    return Check(
        "bessel_golden",
        bool(worst[j] < tol),
        float(worst[j]),
        0.0,
        tol,
        f"{len(rows)} rows; worst at nu={nu[j]}, x={x[j]}",
    )


def check_wronskian(tol=1e-10) -> Check:
    nu, x = np.meshgrid([0.0, 0.5, 2.3, 10.0, 75.5, 400.0], np.geomspace(1e-3, 1e3, 13))
    nu, x = nu.ravel(), x.ravel()
    # x (I K' - I' K) = -1, evaluated as a ratio of logs
    lhs = np.exp(bessel.log_iv(nu, x) + bessel.log_kv(nu, x) + np.log(x)) * (
        bessel.log_derivative_i(nu, x) - bessel.log_derivative_k(nu, x)
    )
    return _check("bessel_wronskian", np.max(np.abs(lhs - 1.0)), 0.0, tol, relative=False)


def check_uniform_asymptotics(tol=1e-2) -> Check:
    nu, x = np.meshgrid([0.0, 5.0, 31.0, 200.0], [31.0, 50.0, 300.0])
    nu, x = nu.ravel(), x.ravel()
    ri = np.exp(bessel.uniform_asymptotic_i(nu, x).log_magnitude - bessel.log_iv(nu, x))
    rk = np.exp(bessel.uniform_asymptotic_k(nu, x).log_magnitude - bessel.log_kv(nu, x))
    worst = max(np.max(np.abs(ri - 1)), np.max(np.abs(rk - 1)))
    return _check("uniform_asymptotics", worst, 0.0, tol, relative=False)


def check_angular_constant() -> Check:
    return _check("angular_integral", analytic.angular_integral_check()["angular"], 23.0 / 15.0, 1e-12)


def check_phi_slope() -> Check:
    h = 1e-5
    worst = 0.0
    for theta in np.linspace(0.2, 1.5, 10):
        f = [float(analytic.phi(-1.0 + j * h, theta)) for j in (0, 1, 2)]
        d = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        worst = max(worst, abs(d + 1.0))
    return _check("phi_slope_at_edge", worst, 0.0, 1e-6, relative=False)


def check_beltrami_oracle(tol=1e-6) -> Check:
    prof = Profile((Segment(Uniform(1.0), -51.0, -50.0), Segment(Beltrami(50.0, 0.0), -50.0, 0.0)))
    worst = 0.0
    for kappa in (0.2, 2.0):
        for u in (0.5, 3.0):
            for z in (-4.0, -0.5):
                for pol in POLARIZATIONS:
                    g = green_at_coincidence(prof, pol, SpectralPoint(kappa, u), z, method="stepped")[0]
                    ref = beltrami_green_fourier(pol, kappa, u, z, z, b=50.0)
                    worst = max(worst, abs(g / ref - 1.0))
    return _check("beltrami_green_oracle", worst, 0.0, tol, relative=False)


def check_jump_condition(tol=1e-6) -> Check:
    prof = soft_wall()
    point = SpectralPoint(0.7, 1.3)
    z0, h = -0.5, 1e-4
    worst = 0.0
    for pol in POLARIZATIONS:
        g = [green_function(prof, pol, point, z0 + j * h, z0) for j in (-2, -1, 0, 1, 2)]
        right = (-3 * g[2] + 4 * g[3] - g[4]) / (2 * h)
        left = (3 * g[2] - 4 * g[1] + g[0]) / (2 * h)
        eps, mu, _, _ = prof.material(z0, point.kappa)
        nu = float(mu if pol == "E" else eps)
        worst = max(worst, abs((right - left) / nu - 1.0))
    return _check("green_jump_condition", worst, 0.0, tol, relative=False)


def check_uniform_nullity() -> Check:
    prof = uniform_profile(2.25, 1.0)
    worst = max(abs(stress_at(prof, z)[0]) for z in (-0.7, 0.1, 0.9))
    return _check("uniform_nullity", worst, 0.0, 1e-8, relative=False)


def check_soft_wall(params=None) -> Check:
    a = 0.05
    sigma = stress_at(soft_wall(), -1.0 + a, params)[0]
    law = analytic.near_edge_stress(analytic.EdgeLaw(a, 1.0))
    return _check("soft_wall_edge_law", sigma, law, 0.05)


def check_mirror_lifshitz() -> Check:
    sigma = stress_at(mirror_pair(1e4, 1.0), 0.5)[0]
    return _check("mirror_lifshitz", sigma, analytic.lifshitz_plates(1e4, 1.0), 1e-6)


def tolerance_sweep(rtols=(1e-4, 1e-6, 1e-8)) -> list:
    """Each tightening moves sigma by less than the previous error estimate."""
    out = []
    z = -0.95
    prev = None
    for rtol in rtols:
        sigma, err, _ = stress_at(soft_wall(), z, QuadratureParams(rtol=rtol))
        if prev is not None:
            moved = abs(sigma - prev[0])
            out.append(
                Check(f"tolerance_sweep_rtol_{rtol:g}", bool(moved <= prev[1]), moved, 0.0, prev[1])
            )
        prev = (sigma, err)
    return out


def run_suite(golden=None, sweep=False) -> list:
    checks = [
        check_bessel_golden(golden),
        check_wronskian(),
        check_uniform_asymptotics(),
        check_angular_constant(),
        check_phi_slope(),
        check_beltrami_oracle(),
        check_jump_condition(),
        check_uniform_nullity(),
        check_soft_wall(),
        check_mirror_lifshitz(),
    ]
    if sweep:
        checks += tolerance_sweep()
    return checks
