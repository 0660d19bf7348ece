"""Resonance and dissipation diagnostics.

The central quantity is the resonance distance

    Δ = min over eigenvalues λ_k and weight vectors m ≥ 0, 2 ≤ Σm ≤ M,
        of |λ_k − Σ_j m_j λ_j|,

the distance from the spectrum to its own higher-order integer combinations.
Δ > 0 is the no-resonance hypothesis behind the convergence rate R_r; the
larger Δ, the faster the truncated lift converges.

Two conventions matter in practice and both are supported:

* ``exclude_conjugate_pairs=True`` (default): weight vectors that use *both*
  members of a complex-conjugate pair are skipped. For spectra that are
  closed under conjugation (any real system matrix) such combinations allow
  exact cancellations λ + λ̄ + (anything), which drive the literal infimum
  to zero for every Hamiltonian spectrum and make Δ useless exactly where
  it is most interesting. Equivalently this convention enumerates *signed*
  combinations over one representative per pair; it is the convention under
  which the dispersive benchmark values in the test-suite reproduce.
* ``exclude_conjugate_pairs=False``: the literal enumeration over all
  nonnegative m. Used by the eigenstructure checks, where resolvent-shift
  distances must be lower-bounded without exception.

The search is truncated at total degree M (resonances of order above the
truncation level never enter the analysis) and reports a witness: the
achieving target eigenvalue and weight vector, tie-broken lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, islice

import numpy as np

from .linalg import condition_number_1, eigendecompose

__all__ = [
    "CombinatorialBudgetError",
    "ResonanceWitness",
    "SpectralReport",
    "RateReport",
    "resonance_delta",
    "compute_rates",
    "error_bound",
    "spectral_report",
    "filter_zero_modes",
]

#: Enumerations larger than this many weight vectors are refused up front.
COMBINATORIAL_BUDGET = 10**8

DEFAULT_ZERO_TOL = 1e-8

_CHUNK = 50_000


class CombinatorialBudgetError(ValueError):
    """The requested Δ search would enumerate too many combinations."""


@dataclass(frozen=True)
class ResonanceWitness:
    """The combination achieving Δ.

    ``target_index`` is a 0-based position into the post-filter eigenvalue
    list; ``weights`` is the nonnegative integer vector m over that list.
    """

    target_index: int
    weights: tuple


@dataclass(frozen=True)
class SpectralReport:
    """Eigenstructure diagnostics of a system matrix."""

    eigenvalues: np.ndarray
    kappa1: float
    delta: float
    sigma: float
    search_order: int
    zero_modes_removed: int
    witness: ResonanceWitness | None = None


@dataclass(frozen=True)
class RateReport:
    """Convergence-rate constants derived from a spectral report."""

    rd: float
    rr: float
    c_const: float
    mu: float
    norm_f2_1: float
    norm_f2_2: float


def filter_zero_modes(eigenvalues, zero_tol=DEFAULT_ZERO_TOL):
    """Drop eigenvalues with |λ| ≤ zero_tol · max|λ|; returns (kept, removed)."""
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    if lam.size == 0:
        return lam, 0
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        return lam[:0], lam.size
    keep = np.abs(lam) > zero_tol * scale
    return lam[keep], int(np.count_nonzero(~keep))


def _conjugate_partners(lam, tol):
    """partner[i] = index of the conjugate partner of λ_i, or -1.

    Real eigenvalues have no partner; complex ones are matched greedily to
    the nearest unmatched conjugate within tolerance.
    """
    n = lam.shape[0]
    partner = np.full(n, -1, dtype=np.intp)
    scale = max(float(np.max(np.abs(lam))), 1.0) if n else 1.0
    for i in range(n):
        if partner[i] >= 0 or abs(lam[i].imag) <= tol * scale:
            continue
        best, best_dist = -1, np.inf
        for j in range(n):
            if j == i or partner[j] >= 0:
                continue
            dist = abs(lam[j] - lam[i].conjugate())
            if dist < best_dist:
                best, best_dist = j, dist
        if best >= 0 and best_dist <= tol * scale:
            partner[i] = best
            partner[best] = i
    return partner


def resonance_delta(
    eigenvalues,
    max_order,
    drop_zero_modes=True,
    zero_tol=DEFAULT_ZERO_TOL,
    exclude_conjugate_pairs=True,
):
    """Minimal distance from the spectrum to its order-[2, M] combinations.

    Parameters
    ----------
    eigenvalues : sequence of complex
        The spectrum to analyse (order is preserved; the witness indexes
        into the post-filter list).
    max_order : int
        M ≥ 2, the largest total degree Σm searched.
    drop_zero_modes : bool
        Remove eigenvalues with |λ| ≤ zero_tol·max|λ| before enumerating
        (conserved modes are handled by first-integral reduction instead).
    zero_tol : float
        Relative threshold for the zero-mode filter.
    exclude_conjugate_pairs : bool
        Skip weight vectors touching both members of a conjugate pair (see
        module docstring).

    Returns
    -------
    (delta, witness) : (float, ResonanceWitness or None)
        delta = +inf (witness None) when the filtered spectrum is empty.

    Raises
    ------
    CombinatorialBudgetError
        If C(n+M, M) exceeds 10^8 for the filtered pool of size n.
    """
    max_order = int(max_order)
    if max_order < 2:
        raise ValueError("max_order must be at least 2")
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    if lam.size == 0:
        raise ValueError("eigenvalue list must be nonempty")
    if drop_zero_modes:
        lam, _removed = filter_zero_modes(lam, zero_tol)
    if lam.size == 0:
        return math.inf, None

    n = lam.size
    if math.comb(n + max_order, max_order) > COMBINATORIAL_BUDGET:
        raise CombinatorialBudgetError(
            f"C({n}+{max_order}, {max_order}) = "
            f"{math.comb(n + max_order, max_order):,} exceeds the "
            f"{COMBINATORIAL_BUDGET:,} enumeration budget"
        )

    pairs = ()
    if exclude_conjugate_pairs:
        partner = _conjugate_partners(lam, tol=1e-9)
        pairs = tuple(
            (i, int(partner[i])) for i in range(n) if partner[i] > i
        )

    best_dist = math.inf
    best_key = None  # (target_index, weights) for lexicographic tie-break
    for total in range(2, max_order + 1):
        combos = combinations_with_replacement(range(n), total)
        while True:
            chunk = list(islice(combos, _CHUNK))
            if not chunk:
                break
            idx = np.asarray(chunk, dtype=np.intp)
            if pairs:
                counts = np.zeros((idx.shape[0], n), dtype=np.int8)
                np.add.at(counts, (np.arange(idx.shape[0])[:, None], idx), 1)
                excl = np.zeros(idx.shape[0], dtype=bool)
                for i, j in pairs:
                    excl |= (counts[:, i] > 0) & (counts[:, j] > 0)
                if excl.all():
                    continue
                idx = idx[~excl]
            sums = lam[idx].sum(axis=1)
            dists = np.abs(sums[:, None] - lam[None, :])
            row_min = dists.min(axis=1)
            chunk_best = float(row_min.min())
            if chunk_best > best_dist:
                continue
            # Walk the (few) candidates achieving the chunk minimum in
            # enumeration order to apply the lexicographic tie-break; any
            # row above the chunk minimum loses to the minimum row anyway.
            for r in np.flatnonzero(row_min == chunk_best):
                k = int(dists[r].argmin())
                dist = float(dists[r, k])
                weights = tuple(np.bincount(idx[r], minlength=n).tolist())
                key = (k, weights)
                if dist < best_dist or (dist == best_dist and key < best_key):
                    best_dist = dist
                    best_key = key
    if best_key is None:
        return math.inf, None
    # An exact resonance (integer eigenvalue identity) reaches zero only up
    # to rounding; snap it so callers can rely on "delta > 0" as the
    # no-resonance test.
    if best_dist <= zero_tol * float(np.max(np.abs(lam))):
        best_dist = 0.0
    return best_dist, ResonanceWitness(best_key[0], best_key[1])


def spectral_report(
    F1,
    max_order,
    drop_zero_modes=True,
    zero_tol=DEFAULT_ZERO_TOL,
    exclude_conjugate_pairs=True,
    tol=1e-10,
) -> SpectralReport:
    """Eigendecompose F1 and assemble Δ, σ, κ₁ into one report.

    ``F1`` may be a matrix or anything with an ``F1`` attribute (e.g. a
    PolynomialSystem). σ = −max Re λ, so σ > 0 means strongly dissipative.
    """
    F1 = getattr(F1, "F1", F1)
    decomp = eigendecompose(np.asarray(F1, dtype=float), tol=tol)
    lam = decomp.eigenvalues
    filtered, removed = (
        filter_zero_modes(lam, zero_tol) if drop_zero_modes else (lam, 0)
    )
    delta, witness = resonance_delta(
        lam,
        max_order,
        drop_zero_modes=drop_zero_modes,
        zero_tol=zero_tol,
        exclude_conjugate_pairs=exclude_conjugate_pairs,
    )
    return SpectralReport(
        eigenvalues=filtered,
        kappa1=condition_number_1(decomp),
        delta=float(delta),
        sigma=float(-np.max(lam.real)),
        search_order=int(max_order),
        zero_modes_removed=removed,
        witness=witness,
    )


def compute_rates(report: SpectralReport, norm_f2_1, norm_f2_2, mu) -> RateReport:
    """Convergence rates and the bound constant from a spectral report.

    R_r = 4e·μ·κ₁·‖F2‖₁/Δ (infinite when Δ = 0), R_d = μ·‖F2‖₂/σ when
    σ > 0 else infinite, C = κ₁·‖F2‖₁·μ². Infinities are legal outputs —
    they simply mean the corresponding regime gives no information.
    """
    mu = float(mu)
    if mu <= 0:
        raise ValueError("mu must be positive")
    norm_f2_1 = float(norm_f2_1)
    norm_f2_2 = float(norm_f2_2)
    if report.delta > 0:
        rr = 4.0 * math.e * mu * report.kappa1 * norm_f2_1 / report.delta
    else:
        rr = math.inf
    rd = mu * norm_f2_2 / report.sigma if report.sigma > 0 else math.inf
    c_const = report.kappa1 * norm_f2_1 * mu**2
    return RateReport(
        rd=rd, rr=rr, c_const=c_const, mu=mu,
        norm_f2_1=norm_f2_1, norm_f2_2=norm_f2_2,
    )


def error_bound(N, T, rates: RateReport, regime="resonant") -> float:
    """A-priori truncation-error bound at level N over [0, T].

    resonant:    N · C · T · R_r^(N−1)
    dissipative: μ · (T · ‖F2‖₂ · μ)^N   (the short-time/dissipative form)
    """
    N = int(N)
    T = float(T)
    if N < 1:
        raise ValueError("N must be >= 1")
    if T <= 0:
        raise ValueError("T must be positive")
    if regime == "resonant":
        if math.isinf(rates.rr):
            return math.inf
        return N * rates.c_const * T * rates.rr ** (N - 1)
    if regime == "dissipative":
        return rates.mu * (T * rates.norm_f2_2 * rates.mu) ** N
    raise ValueError(f"unknown regime {regime!r}")
