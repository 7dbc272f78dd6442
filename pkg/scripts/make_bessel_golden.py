"""Generate the modified-Bessel golden table with mpmath.

I_nu uses the power series (mpmath.besseli).  K_nu uses mpmath.besselk and,
where that fails to converge, the integral
K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, split at the peak of the
integrand.  Every row is checked against the Wronskian I K' - I' K = -1/x at
working precision before it is written.

usage: python scripts/make_bessel_golden.py [OUT.csv]
"""

import csv
import sys
from pathlib import Path

import mpmath

ORDERS = ["0", "0.5", "1", "2.3", "5", "10", "30", "75.5", "200", "1000"]
ARGS = [
    "0.001", "0.01", "0.1", "0.5", "1", "2", "3.7", "5", "7", "10",
    "15", "20", "30", "50", "75", "100", "200", "350", "600", "1000",
]


def besselk(nu, x):
    try:
        return mpmath.besselk(nu, x)
    except ValueError:
        peak = mpmath.asinh(nu / x) if nu > 0 else mpmath.mpf(0)
        # work relative to the peak value to keep the integrand O(1)
        shift = -x * mpmath.cosh(peak) + nu * peak
        f = lambda t: mpmath.exp(-x * mpmath.cosh(t) + nu * t - shift) * (1 + mpmath.exp(-2 * nu * t)) / 2
        width = 1 / mpmath.sqrt(x * mpmath.cosh(peak))
        pts = [0] + [p for p in (peak - 8 * width, peak, peak + 8 * width) if p > 0] + [mpmath.inf]
        return mpmath.quad(f, sorted(set(pts))) * mpmath.exp(shift)


def row(nu_s, x_s):
    nu, x = mpmath.mpf(nu_s), mpmath.mpf(x_s)
    i = mpmath.besseli(nu, x)
    k = besselk(nu, x)
    ip = mpmath.besseli(nu + 1, x) + nu / x * i
    kp = nu / x * k - besselk(nu + 1, x)
    wr = (i * kp - ip * k) * x + 1
    if abs(wr) > mpmath.mpf(10) ** -25:
        raise RuntimeError(f"Wronskian check failed at nu={nu_s}, x={x_s}: {wr}")
    return [nu_s, x_s, mpmath.nstr(i, 30), mpmath.nstr(k, 30)]


def main(out):
    mpmath.mp.dps = 45
    rows = [row(n, x) for n in ORDERS for x in ARGS]
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["nu", "x", "I", "K"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "src" / "casimir_stress" / "data" / "bessel_golden.csv"
    main(sys.argv[1] if len(sys.argv) > 1 else default)
