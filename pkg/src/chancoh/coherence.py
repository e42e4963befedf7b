"""State-level coherence theory: dephasing, entropies, C_r, MIO membership.

All entropies are in bits (base-2 logarithms), so the maximally coherent
qubit state has exactly one unit of coherence.
"""

from __future__ import annotations

import math

import numpy as np

from . import channel, linalg

SIGMA_SUPPORT_TOL = 1e-12
RHO_WEIGHT_TOL = 1e-10


def _as_matrix(rho) -> np.ndarray:
    """Accept a QState or a raw density matrix."""
    if isinstance(rho, channel.QState):
        return rho.matrix
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def dephase(rho) -> np.ndarray:
    """Project onto the diagonal (the resource-destroying map)."""
    m = _as_matrix(rho)
    return np.diag(np.diag(m).real).astype(complex)


def _entropy_bits(eigenvalues) -> float:
    w = np.asarray(eigenvalues, dtype=float)
    if w.min() < -1e-10:
        raise ValueError(f"eigenvalue {w.min()} below tolerance for a state")
    w = np.clip(w, 0.0, 1.0)
    w = w[w > 0]
    return float(-(w * np.log2(w)).sum())


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho log2 rho."""
    return _entropy_bits(np.linalg.eigvalsh(_as_matrix(rho)))


def rel_entropy(rho, sigma) -> float:
    """Quantum relative entropy S(rho||sigma) in bits.

    Returns math.inf when the support of rho is not contained in the
    support of sigma (sigma eigenvalues below 1e-12 carrying rho weight
    above 1e-10).
    """
    rho_m = _as_matrix(rho)
    sigma_m = _as_matrix(sigma)
    if rho_m.shape != sigma_m.shape:
        raise ValueError(f"dims {rho_m.shape[0]} and {sigma_m.shape[0]} differ")
    sig = linalg.herm_eig(sigma_m)
    # rho weights in the sigma eigenbasis
    overlap = np.einsum("ki,ij,jk->k", sig.eigenvectors.conj().T, rho_m,
                        sig.eigenvectors).real
    null = sig.eigenvalues < SIGMA_SUPPORT_TOL
    if overlap[null].sum() > RHO_WEIGHT_TOL:
        return math.inf
    tr_rho_log_rho = -von_neumann_entropy(rho_m)
    tr_rho_log_sig = float(
        (overlap[~null] * np.log2(np.clip(sig.eigenvalues[~null], SIGMA_SUPPORT_TOL, None))).sum())
    return tr_rho_log_rho - tr_rho_log_sig


def c_r(rho) -> float:
    """Relative entropy of coherence, S(dephase(rho)) - S(rho)."""
    m = _as_matrix(rho)
    diag_entropy = _entropy_bits(np.diag(m).real)
    return diag_entropy - von_neumann_entropy(m)


def is_incoherent(rho, tol: float = 1e-9) -> bool:
    """True iff every off-diagonal entry has magnitude below ``tol``."""
    m = _as_matrix(rho)
    off = m - np.diag(np.diag(m))
    return bool(np.max(np.abs(off)) < tol)


def is_mio(n: channel.QChannel, tol: float = 1e-9) -> bool:
    """True iff the channel maps every incoherent state to an incoherent state.

    By convexity it suffices to check basis-state inputs, which are the
    diagonal input-blocks of the Choi matrix.
    """
    jt = n.choi.reshape(n.dim_in, n.dim_out, n.dim_in, n.dim_out)
    for i in range(n.dim_in):
        block = jt[i, :, i, :]
        off = block - np.diag(np.diag(block))
        if np.max(np.abs(off)) >= tol:
            return False
    return True


def sample_free_channel(d: int, rng_seed) -> channel.QChannel:
    """Random MIO channel on dimension ``d``, free by construction.

    A Dirichlet-weighted mixture of permutation unitaries with diagonal
    phases, the dephasing channel, and constant channels to random
    diagonal states. Each component preserves the incoherent set, and MIO
    is closed under convex mixing. Deterministic given the seed.
    """
    if d < 2:
        raise ValueError("need dimension at least 2")
    rng = np.random.default_rng(rng_seed)
    parts = []
    for _ in range(2):
        perm = rng.permutation(d)
        phases = np.exp(2j * np.pi * rng.random(d))
        u = np.zeros((d, d), dtype=complex)
        u[perm, np.arange(d)] = phases
        parts.append(channel.unitary_channel(u))
    parts.append(channel.dephasing_channel(d))
    for _ in range(2):
        probs = rng.dirichlet(np.ones(d))
        diag = channel.QState(np.diag(probs).astype(complex))
        parts.append(channel.constant_channel(diag, dim_in=d))
    weights = rng.dirichlet(np.ones(len(parts)))
    return channel.mix_channels(parts, weights)
