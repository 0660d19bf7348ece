"""Builders for the benchmark systems.

Three semi-discretized PDE/lattice models drive the convergence studies:

* **Burgers** — viscous Burgers with an upwind quadratic flux on a Dirichlet
  grid of n interior points spanning [−1/2, 1/2] (spacing Δx = 1/(n−1)),
  plus an optional β·I shift that moves the spectrum toward the imaginary
  axis; strongly dissipative, real spectrum.
* **KdV** — third-order dispersion with the same upwind flux on a periodic
  grid (Δx = 1/n); purely imaginary spectrum plus one zero mode coming from
  mass conservation, which the first-integral reduction removes.
* **FPU** — a chain of p unit masses with linear springs k and cubic
  inter-site forces α; the first-order form doubles the dimension to 2p and
  the coupling is degree 3.

A scalar **Bernoulli** model (dx/dt = λx + f·x², closed form known) is kept
alongside as the smallest end-to-end test vehicle.

All builders return plain ``PolynomialSystem`` instances plus the initial
state used in the studies; ``ModelConfig`` is the strict schema the CLI
accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import PolynomialSystem
from .tensor import SparseCoupling

__all__ = [
    "FirstIntegralViolation",
    "ModelConfig",
    "ReducedSystem",
    "build_burgers",
    "build_kdv",
    "build_fpu",
    "build_bernoulli",
    "reduce_first_integral",
    "build_from_config",
    "nonlinearity_coefficient",
    "nonlinearity_from_norm",
]

_ORTHOGONALITY_RTOL = 1e-10


class FirstIntegralViolation(ValueError):
    """The supplied functional is not conserved by the system."""


def _initial_profile(grid):
    """The two-shoulder arctan profile used by both PDE studies."""
    return -np.arctan(20.0 * (grid - 0.25)) + np.arctan(20.0 * (grid + 0.25))


def build_burgers(n, c=1.0, beta=0.0):
    """Viscous Burgers system on n Dirichlet grid points.

    du_j/dt = −c(u_j² − u_{j−1}²)/(2Δx) + (u_{j+1} − 2u_j + u_{j−1})/Δx²
    with u_0 = u_{n+1} = 0, Δx = 1/(n−1), plus β added to the diagonal of
    the diffusion matrix. The quadratic flux keeps its fixed upwind stencil
    regardless of sign(u). ‖F2‖₁ = c/Δx = c·(n−1).

    Returns (system, x0) with x0 the arctan shoulder profile sampled on
    ``linspace(−1/2, 1/2, n)``.
    """
    if n < 2:
        raise ValueError("Burgers grid needs n >= 2")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    dx = 1.0 / (n - 1)
    F1 = (
        np.diag(np.full(n, -2.0))
        + np.diag(np.ones(n - 1), 1)
        + np.diag(np.ones(n - 1), -1)
    ) / dx**2 + beta * np.eye(n)
    half = c / (2.0 * dx)
    entries = [(i, (i, i), -half) for i in range(n)]
    entries += [(i, (i - 1, i - 1), +half) for i in range(1, n)]
    if c == 0.0:
        entries = []
    coupling = SparseCoupling(n, 2, entries)
    grid = np.linspace(-0.5, 0.5, n)
    x0 = _initial_profile(grid)
    return PolynomialSystem(n, F1, coupling, label="burgers"), x0


def build_kdv(n, c=1.0):
    """Periodic KdV system on n grid points; also returns its reduction.

    du_j/dt = −c(u_j² − u_{j−1}²)/(2Δx)
              − (u_{j+2} − 2u_{j+1} + 2u_{j−1} − u_{j−2})/(2Δx³)
    with periodic wrap and Δx = 1/n. The all-ones functional is conserved
    (telescoping flux; circulant dispersion), so the zero mode is removable:
    the returned ``ReducedSystem`` eliminates it.

    Returns (system, x0, reduced); x0 is the arctan shoulder profile on the
    zero-centered periodic grid x_j = (j − (n−1)/2)/n. ‖F2‖₁ = c·n.
    """
    if n < 5:
        raise ValueError("the five-point dispersion stencil needs n >= 5")
    dx = 1.0 / n
    inv3 = 1.0 / dx**3
    F1 = np.zeros((n, n))
    for j in range(n):
        F1[j, (j + 2) % n] += -0.5 * inv3
        F1[j, (j + 1) % n] += inv3
        F1[j, (j - 1) % n] += -inv3
        F1[j, (j - 2) % n] += 0.5 * inv3
    half = c / (2.0 * dx)
    entries = []
    if c != 0.0:
        for j in range(n):
            entries.append((j, (j, j), -half))
            entries.append((j, ((j - 1) % n, (j - 1) % n), +half))
    coupling = SparseCoupling(n, 2, entries)
    grid = (np.arange(n) - (n - 1) / 2.0) / n
    x0 = _initial_profile(grid)
    system = PolynomialSystem(n, F1, coupling, label="kdv")
    reduced = reduce_first_integral(system, np.ones(n))
    return system, x0, reduced


def build_fpu(p, k=1.0, alpha=0.25):
    """FPU chain of p moving particles with fixed ends, state (u, u̇) ∈ R^{2p}.

    ü_i = k(u_{i+1} − 2u_i + u_{i−1}) + α(u_{i+1} − u_i)³ − α(u_i − u_{i−1})³
    with u_0 = u_{p+1} = 0. The cubic coupling is stored symmetrized over
    index permutations so ‖F3‖₁ = 4α exactly. Initial data: displacement
    u_i(0) = sin(2πi/(p+1))/10 (1-based site index), zero velocity.
    """
    if p < 2:
        raise ValueError("FPU chain needs p >= 2")
    n = 2 * p
    F1 = np.zeros((n, n))
    for i in range(p):
        F1[i, p + i] = 1.0
        F1[p + i, i] = -2.0 * k
        if i + 1 < p:
            F1[p + i, i + 1] = k
        if i - 1 >= 0:
            F1[p + i, i - 1] = k

    entries = []
    if alpha != 0.0:
        for i in range(p):
            entries.append((p + i, (i, i, i), -2.0 * alpha))
        for i in range(p - 1):  # bond to the right neighbor i+1
            r, a, b = p + i, i, i + 1
            entries += [
                (r, (b, b, b), alpha),
                (r, (a, a, b), alpha),
                (r, (a, b, a), alpha),
                (r, (b, a, a), alpha),
                (r, (b, b, a), -alpha),
                (r, (a, b, b), -alpha),
                (r, (b, a, b), -alpha),
            ]
        for i in range(1, p):  # bond to the left neighbor i-1
            r, a, b = p + i, i, i - 1
            entries += [
                (r, (b, b, b), alpha),
                (r, (a, a, b), alpha),
                (r, (a, b, a), alpha),
                (r, (b, a, a), alpha),
                (r, (b, b, a), -alpha),
                (r, (a, b, b), -alpha),
                (r, (b, a, b), -alpha),
            ]
    coupling = SparseCoupling(n, 3, entries)
    sites = np.arange(1, p + 1)
    x0 = np.concatenate([np.sin(2.0 * np.pi * sites / (p + 1)) / 10.0, np.zeros(p)])
    return PolynomialSystem(n, F1, coupling, label="fpu"), x0


def build_bernoulli(lam=-1.0, f=0.1, x0=0.5):
    """Scalar dx/dt = λx + f·x²; the smallest end-to-end test system."""
    F1 = np.array([[float(lam)]])
    entries = [(0, (0, 0), float(f))] if f != 0.0 else []
    coupling = SparseCoupling(1, 2, entries)
    system = PolynomialSystem(1, F1, coupling, label="bernoulli")
    return system, np.array([float(x0)])


@dataclass(frozen=True)
class ReducedSystem:
    """A system with one conserved linear functional eliminated.

    ``embed`` (n × (n−1)) maps reduced coordinates into the invariant
    complement of the conserved functional; ``project`` = embedᵀ maps back,
    with project·embed = identity. Trajectories of ``reduced`` embed to
    trajectories of ``original`` for initial data inside the complement.
    """

    original: PolynomialSystem
    reduced: PolynomialSystem
    embed: np.ndarray
    project: np.ndarray


def reduce_first_integral(system: PolynomialSystem, v) -> ReducedSystem:
    """Eliminate a conserved functional vᵀx from a quadratic system.

    Requires vᵀF1 = 0 and vᵀF2(· ⊗ ·) = 0 (checked to relative 1e−10),
    i.e. d(vᵀx)/dt = 0 along every trajectory. The complement basis is the
    deterministic Householder complement of v, so the reduced matrices are
    reproducible bit-for-bit.
    """
    if system.degree != 2:
        raise ValueError("first-integral reduction is implemented for degree 2")
    v = np.asarray(v, dtype=float)
    n = system.n
    if v.shape != (n,) or not np.any(v):
        raise ValueError("v must be a nonzero vector of length n")

    scale1 = max(np.abs(system.F1).sum(axis=0).max(), 1.0) * np.abs(v).max()
    if np.abs(v @ system.F1).max() > _ORTHOGONALITY_RTOL * scale1:
        raise FirstIntegralViolation("v is not a left null vector of F1")
    if system.coupling.nnz:
        col_sums = np.zeros(n**2)
        np.add.at(col_sums, system.coupling.cols, v[system.coupling.rows] * system.coupling.values)
        scale2 = max(system.coupling.norm1(), 1.0) * np.abs(v).max()
        if np.abs(col_sums).max() > _ORTHOGONALITY_RTOL * scale2:
            raise FirstIntegralViolation("v does not annihilate the quadratic flux")

    # Householder reflection sending v/‖v‖ to ∓e_1; the remaining columns
    # form a deterministic orthonormal basis of the complement of v.
    u = v / np.linalg.norm(v)
    w = u.copy()
    w[0] += np.copysign(1.0, u[0] if u[0] != 0 else 1.0)
    w /= np.linalg.norm(w)
    H = np.eye(n) - 2.0 * np.outer(w, w)
    embed = H[:, 1:]
    project = embed.T

    F1_red = project @ system.F1 @ embed
    dense = system.coupling.to_dense().reshape(n, n, n)
    reduced_tensor = np.einsum("ai,ijk,jb,kc->abc", project, dense, embed, embed)
    m = n - 1
    entries = [
        (a, (b, cc), float(reduced_tensor[a, b, cc]))
        for a in range(m)
        for b in range(m)
        for cc in range(m)
        if reduced_tensor[a, b, cc] != 0.0
    ]
    reduced = PolynomialSystem(
        m, F1_red, SparseCoupling(m, 2, entries), label=system.label + "-reduced"
    )
    return ReducedSystem(system, reduced, embed, project)


_MODEL_FIELDS = {
    "burgers": {"n", "c", "beta", "boundary"},
    "kdv": {"n", "c", "boundary"},
    "fpu": {"p", "alpha", "k"},
    "bernoulli": {"lambda", "f", "x0"},
}


@dataclass(frozen=True)
class ModelConfig:
    """Validated model section of a CLI config.

    Exactly the fields meaningful for the chosen model are allowed; anything
    else is rejected up front so config typos fail fast.
    """

    model: str
    n: Optional[int] = None
    p: Optional[int] = None
    c: Optional[float] = None
    alpha: Optional[float] = None
    k: float = 1.0
    beta: float = 0.0
    boundary: Optional[str] = None
    lam: Optional[float] = None
    f: Optional[float] = None
    x0: Optional[float] = None

    @classmethod
    def from_dict(cls, raw) -> "ModelConfig":
        if not isinstance(raw, dict):
            raise ValueError("model section must be a JSON object")
        if "model" not in raw:
            raise ValueError("model section needs a 'model' field")
        model = raw["model"]
        if model not in _MODEL_FIELDS:
            raise ValueError(
                f"unknown model {model!r}; expected one of {sorted(_MODEL_FIELDS)}"
            )
        allowed = _MODEL_FIELDS[model]
        unknown = set(raw) - allowed - {"model"}
        if unknown:
            raise ValueError(
                f"unknown model config keys for {model}: {sorted(unknown)}"
            )
        boundary = raw.get("boundary")
        if boundary is not None:
            expected = "periodic" if model == "kdv" else "dirichlet"
            if boundary != expected:
                raise ValueError(f"{model} supports only boundary={expected!r}")
        if model in ("burgers", "kdv") and "n" not in raw:
            raise ValueError(f"{model} needs 'n'")
        if model == "fpu" and "p" not in raw:
            raise ValueError("fpu needs 'p'")
        return cls(
            model=model,
            n=int(raw["n"]) if "n" in raw else None,
            p=int(raw["p"]) if "p" in raw else None,
            c=float(raw["c"]) if "c" in raw else None,
            alpha=float(raw["alpha"]) if "alpha" in raw else None,
            k=float(raw.get("k", 1.0)),
            beta=float(raw.get("beta", 0.0)),
            boundary=boundary,
            lam=float(raw["lambda"]) if "lambda" in raw else None,
            f=float(raw["f"]) if "f" in raw else None,
            x0=float(raw["x0"]) if "x0" in raw else None,
        )

    def replace_nonlinearity(self, value: float) -> "ModelConfig":
        """A copy with the model's nonlinearity coefficient set to ``value``."""
        from dataclasses import replace

        if self.model in ("burgers", "kdv"):
            return replace(self, c=float(value))
        if self.model == "fpu":
            return replace(self, alpha=float(value))
        if self.model == "bernoulli":
            return replace(self, f=float(value))
        raise ValueError(f"unknown model {self.model!r}")


def nonlinearity_coefficient(config: ModelConfig) -> float:
    """The model's nonlinearity coefficient (c, α, or f), defaulted."""
    if config.model in ("burgers", "kdv"):
        return config.c if config.c is not None else 1.0
    if config.model == "fpu":
        return config.alpha if config.alpha is not None else 0.25
    if config.model == "bernoulli":
        return config.f if config.f is not None else 0.1
    raise ValueError(f"unknown model {config.model!r}")


def nonlinearity_from_norm(config: ModelConfig, norm_value: float) -> float:
    """Convert an ℓ1 coupling-norm target into the model coefficient.

    Burgers: ‖F2‖₁ = c·(n−1); KdV: ‖F2‖₁ = c·n; FPU: ‖F3‖₁ = 4α;
    Bernoulli: ‖F2‖₁ = f.
    """
    if config.model == "burgers":
        return float(norm_value) / (config.n - 1)
    if config.model == "kdv":
        return float(norm_value) / config.n
    if config.model == "fpu":
        return float(norm_value) / 4.0
    if config.model == "bernoulli":
        return float(norm_value)
    raise ValueError(f"unknown model {config.model!r}")


def build_from_config(config: ModelConfig):
    """Instantiate (system, x0) for a validated config."""
    if config.model == "burgers":
        return build_burgers(
            config.n,
            c=config.c if config.c is not None else 1.0,
            beta=config.beta,
        )
    if config.model == "kdv":
        system, x0, _reduced = build_kdv(
            config.n, c=config.c if config.c is not None else 1.0
        )
        return system, x0
    if config.model == "fpu":
        return build_fpu(
            config.p,
            k=config.k,
            alpha=config.alpha if config.alpha is not None else 0.25,
        )
    if config.model == "bernoulli":
        return build_bernoulli(
            lam=config.lam if config.lam is not None else -1.0,
            f=config.f if config.f is not None else 0.1,
            x0=config.x0 if config.x0 is not None else 0.5,
        )
    raise ValueError(f"unknown model {config.model!r}")
