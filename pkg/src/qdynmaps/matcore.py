"""Dense complex-matrix kernel.

Everything downstream (states, channels, assignment maps, domain geometry)
reduces to a handful of operations on small dense complex matrices: Kronecker
products, partial trace/transpose over a bipartition, Hermitian
eigendecomposition, and matrix functions of Hermitian generators.

The Hermitian eigensolver is a cyclic Jacobi sweep rather than a LAPACK
kernel: dimensions never exceed ~16 here and Jacobi gives bit-stable,
platform-independent results for the sign checks every CP/positivity verdict
rests on. Bulk minimum-eigenvalue scans over thousands of sampled states go
through :func:`min_eig_batch`, which uses the stacked LAPACK path for speed;
eigenvalues of Hermitian matrices are solver-independent well past the
tolerances used anywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import tolerance

__all__ = [
    "kron",
    "partial_trace",
    "partial_transpose",
    "herm_eig",
    "unitary_at",
    "HermEig",
    "dag",
    "is_hermitian",
    "hermiticity_residual",
    "min_eig",
    "min_eig_batch",
    "trace_norm",
    "mat_close",
]


def dag(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, block structure a[i, j] * b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def hermiticity_residual(m: np.ndarray) -> float:
    """Max-entry distance from m to its conjugate transpose."""
    return float(np.abs(m - dag(m)).max()) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float | None = None) -> bool:
    t = tolerance() if tol is None else tol
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    return hermiticity_residual(m) <= t * scale


def mat_close(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Tolerance-based equality; never compare matrices bit-exactly."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    return float(np.abs(a - b).max()) <= tol


def _check_bipartite(m: np.ndarray, dims: tuple[int, int]) -> None:
    d_s, d_r = dims
    n = d_s * d_r
    if m.shape != (n, n):
        raise ValueError(
            f"matrix shape {m.shape} incompatible with bipartition dims {dims}"
        )


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int = 0) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``keep=0`` keeps the first (system) factor, tracing over the second;
    ``keep=1`` keeps the second. Basis ordering is S (x) R throughout.
    """
    m = np.asarray(m, dtype=complex)
    _check_bipartite(m, dims)
    d_s, d_r = dims
    t = m.reshape(d_s, d_r, d_s, d_r)
    if keep == 0:
        return np.einsum("ikjk->ij", t)
    if keep == 1:
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 0 or 1, got {keep}")


def partial_transpose(m: np.ndarray, dims: tuple[int, int], subsystem: int = 1) -> np.ndarray:
    """Transpose one factor of a bipartite operator. Involutive."""
    m = np.asarray(m, dtype=complex)
    _check_bipartite(m, dims)
    d_s, d_r = dims
    t = m.reshape(d_s, d_r, d_s, d_r)
    if subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 0 or 1, got {subsystem}")
    return t.reshape(d_s * d_r, d_s * d_r)


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` ascend; ``eigenvectors`` is unitary with the k-th column
    the eigenvector of ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dag(v)


def _jacobi_eig(a: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for complex Hermitian matrices.

    Annihilates off-diagonal pairs in row-cyclic order with complex Givens
    rotations until the off-diagonal Frobenius mass falls below machine-level
    relative to the matrix norm.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.diagonal().copy(), v

    scale = max(1.0, float(np.abs(a).max()))
    stop = 1e-14 * scale * n

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diagonal(a))) ** 2))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                h = abs(apq)
                if h <= stop / (n * n):
                    continue
                e = apq / h  # phase of the pivot entry
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * h)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^dag A J with J[p,p]=J[q,q]=c, J[p,q]=s*e, J[q,p]=-s*conj(e)
                col_p = c * a[:, p] - s * np.conj(e) * a[:, q]
                col_q = s * e * a[:, p] + c * a[:, q]
                a[:, p] = col_p
                a[:, q] = col_q
                row_p = c * a[p, :] - s * e * a[q, :]
                row_q = s * np.conj(e) * a[p, :] + c * a[q, :]
                a[p, :] = row_p
                a[q, :] = row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vcol_p = c * v[:, p] - s * np.conj(e) * v[:, q]
                vcol_q = s * e * v[:, p] + c * v[:, q]
                v[:, p] = vcol_p
                v[:, q] = vcol_q

    w = np.real(np.diagonal(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def herm_eig(m: np.ndarray) -> HermEig:
    """Eigendecomposition of a Hermitian matrix; raises if m is not Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise ValueError(
            f"matrix is not Hermitian within tolerance "
            f"(residual {hermiticity_residual(m):.3e})"
        )
    sym = (m + dag(m)) / 2.0
    w, v = _jacobi_eig(sym)
    return HermEig(eigenvalues=w, eigenvectors=v)


def min_eig(m: np.ndarray) -> float:
    """Minimum eigenvalue of the Hermitian part of m."""
    sym = (np.asarray(m, dtype=complex) + dag(m)) / 2.0
    if sym.shape == (1, 1):
        return float(sym[0, 0].real)
    if sym.shape == (2, 2):
        tr = sym[0, 0].real + sym[1, 1].real
        det = (sym[0, 0] * sym[1, 1] - sym[0, 1] * sym[1, 0]).real
        disc = max(tr * tr - 4.0 * det, 0.0)
        return float((tr - np.sqrt(disc)) / 2.0)
    w, _ = _jacobi_eig(sym)
    return float(w[0])


def min_eig_batch(ms: np.ndarray) -> np.ndarray:
    """Minimum eigenvalues of a stacked array of Hermitian matrices.

    Hot path of the positivity searches; uses the stacked LAPACK solver.
    """
    ms = np.asarray(ms, dtype=complex)
    sym = (ms + np.conj(np.swapaxes(ms, -1, -2))) / 2.0
    if sym.shape[-1] == 2:
        tr = np.real(sym[..., 0, 0] + sym[..., 1, 1])
        det = np.real(
            sym[..., 0, 0] * sym[..., 1, 1] - sym[..., 0, 1] * sym[..., 1, 0]
        )
        disc = np.maximum(tr * tr - 4.0 * det, 0.0)
        return (tr - np.sqrt(disc)) / 2.0
    return np.linalg.eigvalsh(sym)[..., 0]


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values; the distance used throughout the package."""
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def unitary_at(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition.

    Unitary up to rounding for any t; no series truncation involved.
    """
    eig = herm_eig(h)
    phases = np.exp(-1j * eig.eigenvalues * t)
    v = eig.eigenvectors
    return (v * phases) @ dag(v)
