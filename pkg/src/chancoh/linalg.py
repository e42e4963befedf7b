"""Dense complex linear algebra primitives shared by the other modules.

Everything operates on plain numpy arrays (complex128). Matrices are kept
dense; the dimensions in this package stay well below the point where that
would hurt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERM_TOL = 1e-10


@dataclass(frozen=True)
class EigDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Attributes
    ----------
    eigenvalues : ndarray
        Real eigenvalues sorted in ascending order.
    eigenvectors : ndarray
        Unitary matrix whose k-th column is the unit eigenvector belonging
        to ``eigenvalues[k]``, so that V diag(w) V^dag reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    """True if ``m`` equals its conjugate transpose within ``tol`` (max entry)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, (a.rows*b.rows) x (a.cols*b.cols)."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(m: np.ndarray, dims: list[int], keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    Parameters
    ----------
    m : ndarray
        Square matrix on the tensor product of the subsystems in ``dims``.
    dims : list of int
        Dimension of each subsystem, in tensor order.
    keep : iterable of int
        Indices of the subsystems to retain; the result lives on their
        tensor product in the original order.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if m.ndim != 2 or m.shape != (total, total):
        raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out_sub = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(t, row + col, out_sub)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def herm_eig(h: np.ndarray) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ValueError if the input is not square or deviates from
    Hermiticity by more than 1e-10 in any entry.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > HERM_TOL:
        raise ValueError("matrix is not Hermitian within 1e-10")
    w, v = np.linalg.eigh(h)
    return EigDecomposition(eigenvalues=w, eigenvectors=v)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a square matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"trace_norm expects a square matrix, got shape {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())
