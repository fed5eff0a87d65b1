#!/usr/bin/env python3
"""Generate the Tracy-Widom (beta = 1) CDF table shipped in crates/core/data/tw1.txt.

F_1(s) = det(I - K_s) on L^2(s, inf) with kernel K_s(x, y) = Ai((x + y) / 2) / 2.
The Fredholm determinant is discretised with Gauss-Legendre quadrature after the
map x = s + 10 * tan(pi * t / 2), t in [0, 1). Moments are integrated on a dense
auxiliary grid with the density obtained by differentiating the log determinant
by parts.

Usage: python3 scripts/gen_tw1_table.py > crates/core/data/tw1.txt
"""

import numpy as np
from scipy.special import airy

NODES = 96
X_MIN, X_MAX, STEP = -6.0, 5.0, 0.01


def quadrature(s, m=NODES):
    t, w = np.polynomial.legendre.leggauss(m)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    x = s + 10.0 * np.tan(np.pi * t / 2.0)
    dx = 10.0 * (np.pi / 2.0) / np.cos(np.pi * t / 2.0) ** 2
    return x, w * dx


def tw1_cdf(s):
    x, w = quadrature(s)
    sw = np.sqrt(w)
    ai = airy(0.5 * (x[:, None] + x[None, :]))[0]
    kernel = 0.5 * sw[:, None] * ai * sw[None, :]
    return float(np.linalg.det(np.eye(len(x)) - kernel))


def moments():
    # Dense grid well beyond the tabulated range; the tails contribute below 1e-12.
    xs = np.linspace(-10.0, 8.0, 18001)
    cdf = np.array([tw1_cdf(s) for s in xs])
    trap = getattr(np, "trapezoid", None) or np.trapz
    # integration by parts: E[X] = b - int F dx, E[X^2] = b^2 - int 2 x F dx
    mean = xs[-1] - trap(cdf, xs)
    second = xs[-1] ** 2 - trap(2.0 * xs * cdf, xs)
    return mean, float(np.sqrt(second - mean * mean))


def main():
    mean, sd = moments()
    xs = np.round(np.arange(X_MIN, X_MAX + STEP / 2, STEP), 10)
    rows = [(x, tw1_cdf(x)) for x in xs]
    for (x0, f0), (x1, f1) in zip(rows, rows[1:]):
        if not (0.0 < f0 < f1 < 1.0):
            raise SystemExit(f"non-monotone or out-of-range cdf between {x0} and {x1}: {f0} {f1}")
    print("# Tracy-Widom beta=1 cumulative distribution function")
    print("# generated by scripts/gen_tw1_table.py (Fredholm determinant, "
          f"{NODES}-point Gauss-Legendre)")
    print(f"# mean: {mean:.10f}")
    print(f"# sd: {sd:.10f}")
    print("# x cdf")
    for x, f in rows:
        print(f"{x:.2f} {f:.15e}")


if __name__ == "__main__":
    main()
