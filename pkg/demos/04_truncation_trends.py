"""Truncation-error trends in N, and what divergence looks like.

Re-runs a miniature version of the convergence studies: the weakly
nonlinear Burgers system converges geometrically in the truncation level,
while cranking the nonlinearity up makes the truncated linear system's
transient growth cross the divergence guard. Saves a log-scale plot when
matplotlib is available.
"""

import numpy as np

from carleman import UnstableStepError, build_burgers, truncation_error


def main():
    system, x0 = build_burgers(7, c=0.125)
    levels = list(range(2, 7))
    errors = []
    print("Burgers n=7, ||F2||_1 = 0.75, T = 1")
    print(" N   final error")
    for N in levels:
        result = truncation_error(system, x0, N=N, T=1.0)
        errors.append(result.final_error)
        print(f"{N:2d}   {result.final_error:.6e}")

    print("\nSame grid with the quadratic term 2048x stronger (||F2||_1 = 1536):")
    strong, x0s = build_burgers(7, c=256.0)
    try:
        truncation_error(strong, x0s, N=6, T=1.0)
        print("  ... unexpectedly stayed below the guard")
    except UnstableStepError as exc:
        print(f"  divergence guard tripped at t = {exc.time:.4f} "
              "(norm crossed 1e12)")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not installed; skipping the plot")
        return

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(levels, errors, "o-")
    ax.set_xlabel("truncation level N")
    ax.set_ylabel("final error (l1)")
    ax.set_title("Burgers n=7, weak nonlinearity")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig("demos/trend_burgers.png", dpi=120)
    print("\nwrote demos/trend_burgers.png")


if __name__ == "__main__":
    main()
