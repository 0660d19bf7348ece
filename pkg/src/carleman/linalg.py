"""Dense linear-algebra substrate.

Eigendecompositions with certified residuals, induced operator norms, and
eigenvector condition numbers. Everything downstream (spectral diagnostics,
eigenstructure verification, step-size heuristics) goes through this module
rather than calling LAPACK wrappers directly, so the numerical guarantees
live in one place:

* ``eigendecompose`` returns right *and* left eigenvectors with an explicit
  residual bound, ℓ1-unit right columns, exact conjugate pairing for real
  input, and a deterministic eigenvalue ordering;
* ``induced_norm`` computes exact ℓ1/ℓ∞ norms and a power-iteration ℓ2 norm;
* ``condition_number_1`` is the ℓ1 condition number κ₁(W) = ‖W‖₁‖W⁻¹‖₁,
  which reduces to ‖W⁻¹‖₁ under the ℓ1-unit column normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigenDecomposition",
    "NonConvergenceError",
    "DefectiveMatrixError",
    "eigendecompose",
    "induced_norm",
    "condition_number_1",
    "spectral_radius",
]

#: Largest matrix dimension accepted by eigendecompose. The artifact targets
#: desk-scale spectra; anything bigger deserves a sparse eigensolver.
MAX_EIGEN_DIM = 256

_DEFAULT_TOL = 1e-10


class NonConvergenceError(RuntimeError):
    """The underlying eigenvalue iteration failed to converge."""


class DefectiveMatrixError(ValueError):
    """The matrix is (numerically) defective: no certified eigenbasis exists."""


def _validated_square(A, name="A"):
    """Return ``A`` as a finite square ndarray, or raise ValueError."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


@dataclass(frozen=True)
class EigenDecomposition:
    """Certified eigendecomposition F1 = W diag(λ) W⁻¹.

    Attributes
    ----------
    eigenvalues : (n,) complex ndarray
        Sorted by (real part descending, imaginary part ascending).
    right_vectors : (n, n) complex ndarray
        Columns are right eigenvectors with unit ℓ1 norm.
    left_vectors : (n, n) complex ndarray
        Rows are left eigenvectors, scaled so ``left_vectors @ right_vectors``
        is the identity (biorthogonal to the right columns).
    residual_bound : float
        Certified bound on max_i ‖A e_i − λ_i e_i‖₁ and on the biorthogonality
        defect max_{ij} |f_iᵀ e_j − δ_{ij}|.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    residual_bound: float

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def _pair_conjugates(lam, W, rtol):
    """Symmetrize conjugate eigenpairs of a real matrix in place.

    LAPACK already returns exact conjugate pairs for real input; this pass
    re-asserts the structure (λ_j ← conj(λ_i), column_j ← conj(column_i)) so
    that later arithmetic (conjugate-pair detection in the resonance scan,
    κ₁ determinism) never sees rounding drift between the two members.
    """
    n = lam.shape[0]
    scale = max(np.max(np.abs(lam)), 1.0)
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i] or abs(lam[i].imag) <= rtol * scale:
            continue
        # Find the closest unused conjugate partner.
        best, best_dist = -1, np.inf
        for j in range(n):
            if j == i or used[j]:
                continue
            dist = abs(lam[j] - lam[i].conjugate())
            if dist < best_dist:
                best, best_dist = j, dist
        if best >= 0 and best_dist <= 1e-6 * scale:
            lam[best] = lam[i].conjugate()
            W[:, best] = W[:, i].conjugate()
            used[i] = used[best] = True
    return lam, W


def eigendecompose(A, tol: float = _DEFAULT_TOL) -> EigenDecomposition:
    """Diagonalize a small dense matrix with certified residuals.

    Parameters
    ----------
    A : (n, n) array_like
        Real or complex square matrix, n ≤ 256, numerically diagonalizable.
    tol : float
        Certification tolerance: the eigenvector residual must not exceed
        ``tol`` and the biorthogonality defect must not exceed ``10 * tol``.

    Returns
    -------
    EigenDecomposition

    Raises
    ------
    NonConvergenceError
        If the QR iteration underneath ``numpy.linalg.eig`` fails.
    DefectiveMatrixError
        If a certified biorthogonal left basis cannot be produced within
        tolerance (numerically defective input).
    """
    A = _validated_square(A)
    n = A.shape[0]
    if n > MAX_EIGEN_DIM:
        raise ValueError(f"matrix dimension {n} exceeds supported {MAX_EIGEN_DIM}")
    if n == 0:
        raise ValueError("empty matrix")

    try:
        lam, W = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NonConvergenceError(str(exc)) from exc

    lam = lam.astype(complex)
    W = W.astype(complex)
    if np.isrealobj(A):
        lam, W = _pair_conjugates(lam, W, rtol=1e-12)

    # Deterministic ordering: real part descending, imaginary part ascending.
    order = np.lexsort((lam.imag, -lam.real))
    lam = lam[order]
    W = W[:, order]

    # ℓ1-unit columns.
    col_norms = np.abs(W).sum(axis=0)
    if np.any(col_norms == 0):
        raise DefectiveMatrixError("eigensolver returned a zero eigenvector")
    W = W / col_norms

    try:
        left = np.linalg.solve(W, np.eye(n, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise DefectiveMatrixError(
            "eigenvector matrix is numerically singular"
        ) from exc

    # Certify: eigen-residual, biorthogonality defect, and diagonal
    # reconstruction. A numerically defective matrix passes the residual
    # check (the computed vectors are genuine eigenvectors) but cannot be
    # reconstructed from a near-singular W, so all three are required.
    residual = np.abs(A @ W - W * lam).sum(axis=0).max()
    bio_defect = np.abs(left @ W - np.eye(n)).max()
    recon_defect = np.abs((W * lam) @ left - A).sum(axis=0).max()
    scale = max(np.abs(A).sum(axis=0).max(), 1.0)
    if residual > tol * scale:
        raise DefectiveMatrixError(
            f"eigenvector residual {residual:.3e} exceeds tol*‖A‖₁ = {tol * scale:.3e}"
        )
    if bio_defect > 10 * tol:
        raise DefectiveMatrixError(
            f"biorthogonality defect {bio_defect:.3e} not certifiable at tol {tol:.1e}"
        )
    if recon_defect > 100 * tol * scale:
        raise DefectiveMatrixError(
            f"diagonal reconstruction off by {recon_defect:.3e}; "
            "matrix is numerically defective"
        )

    return EigenDecomposition(
        eigenvalues=lam,
        right_vectors=W,
        left_vectors=left,
        residual_bound=float(max(residual, bio_defect)),
    )


def _spectral_norm_power(A, rtol=1e-10, max_iter=20000):
    """Largest singular value via power iteration on AᴴA.

    Deterministic start vector (fixed-seed pseudo-random, so repeated runs
    agree bit-for-bit and the start is almost surely not orthogonal to the
    leading singular vector).
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    m = A.shape[1]
    v = np.random.default_rng(0x5EED).standard_normal(m)
    v /= np.linalg.norm(v)
    Ah = A.conj().T
    sigma = 0.0
    for _ in range(max_iter):
        w = A @ v
        sigma_new = np.linalg.norm(w)
        if sigma_new == 0.0:
            return 0.0
        v = Ah @ w
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return float(sigma_new)
        v /= nv
        if abs(sigma_new - sigma) <= rtol * sigma_new:
            return float(sigma_new)
        sigma = sigma_new
    raise NonConvergenceError(
        f"power iteration did not reach rtol={rtol:g} in {max_iter} iterations"
    )


def induced_norm(A, p) -> float:
    """Induced operator norm of a matrix or sparse coupling.

    ``p`` ∈ {1, 2, inf} (the strings "1", "2", "inf" are accepted too).
    ℓ1/ℓ∞ are exact column/row absolute sums; ℓ2 is the largest singular
    value computed by power iteration on AᴴA to relative tolerance 1e−10
    (dense operands only — sparse couplings are densified by the caller).
    """
    key = str(p)
    if hasattr(A, "norm1") and not isinstance(A, np.ndarray):
        # SparseCoupling supports exact ℓ1/ℓ∞ without densifying.
        if key == "1":
            return A.norm1()
        if key == "inf":
            return A.norm_inf()
        if key == "2":
            return _spectral_norm_power(A.to_dense())
        raise ValueError(f"unsupported norm order {p!r}")
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("induced_norm expects a matrix")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    if key == "1":
        return float(np.abs(A).sum(axis=0).max(initial=0.0))
    if key == "inf":
        return float(np.abs(A).sum(axis=1).max(initial=0.0))
    if key == "2":
        return _spectral_norm_power(A)
    raise ValueError(f"unsupported norm order {p!r}")


def condition_number_1(decomp: EigenDecomposition) -> float:
    """ℓ1 condition number κ₁(W) = ‖W‖₁ ‖W⁻¹‖₁ of the eigenvector matrix.

    With the ℓ1-unit column normalization enforced by ``eigendecompose``,
    ‖W‖₁ = 1 and this equals ‖W⁻¹‖₁.
    """
    return induced_norm(decomp.right_vectors, 1) * induced_norm(decomp.left_vectors, 1)


def spectral_radius(A) -> float:
    """max |λ| over the spectrum of a small dense matrix."""
    A = _validated_square(A)
    if A.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))
