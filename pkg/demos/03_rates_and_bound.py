"""Convergence-rate constants and the a-priori truncation bound.

Two regimes govern how fast the lifted approximation converges in N:

  * dissipative:  R_d = mu * ||F2||_2 / sigma     (sigma = spectral abscissa)
  * resonant:     R_r = 4e * mu * kappa1 * ||F2||_1 / delta

R < 1 guarantees geometric decay; the resonant-regime bound

    error(N) <= N * C * T * R_r^(N-1),   C = kappa1 * ||F2||_1 * mu^2

is checked here against a measured truncation error.
"""

import numpy as np

from carleman import (
    build_bernoulli,
    build_burgers,
    compute_rates,
    error_bound,
    induced_norm,
    spectral_report,
    truncation_error,
)


def describe(name, system, x0, M):
    report = spectral_report(system.F1, max_order=M)
    f21 = system.coupling.norm1()
    f22 = induced_norm(system.coupling, 2)
    mu = float(np.abs(x0).max())
    rates = compute_rates(report, f21, f22, mu)
    print(f"{name}: delta={report.delta:.4g} kappa1={report.kappa1:.4g} "
          f"sigma={report.sigma:.4g}")
    print(f"   R_r = {rates.rr:.4g}   R_d = {rates.rd:.4g}   (mu = ||x0||_inf)")
    return rates


def main():
    for name, built, M in [
        ("Burgers n=7 ", build_burgers(7), 9),
        ("Burgers n=31", build_burgers(31), 5),
    ]:
        system, x0 = built
        describe(name, system, x0, M)

    print("\nBound dominance on the scalar model (operational mu from the run):")
    system, x0 = build_bernoulli()
    f21 = system.coupling.norm1()
    f22 = induced_norm(system.coupling, 2)
    report = spectral_report(system.F1, max_order=7)
    print(" N   measured error   a-priori bound")
    for N in (2, 3, 4, 5, 6):
        result = truncation_error(system, x0, N=N, T=1.0, dt=1e-3)
        rates = compute_rates(report, f21, f22, result.mu)
        bound = error_bound(N, 1.0, rates, regime="resonant")
        flag = "ok" if result.final_error <= bound else "VIOLATED"
        print(f"{N:2d}   {result.final_error:.6e}    {bound:.6e}   {flag}")


if __name__ == "__main__":
    main()
