"""Quantum channels as validated CPTP maps with Kraus and Choi views.

The Choi convention used throughout is unnormalized,

    J(N) = sum_ij |i><j|_in (x) N(|i><j|)_out,

so a row index of J is i*dim_out + a (input index major) and trace
preservation reads Tr_out J = I_in.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

from . import linalg

TP_TOL = 1e-9
KRAUS_PRUNE_TOL = 1e-12


class QState:
    """Density matrix validated for Hermiticity, unit trace and positivity."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"state matrix must be square, got shape {matrix.shape}")
        if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10:
            raise ValueError("state matrix is not Hermitian within 1e-10")
        tr = matrix.trace().real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"state trace is {tr}, expected 1 within 1e-10")
        w = np.linalg.eigvalsh(matrix)
        if w[0] < -1e-10:
            raise ValueError(f"state has negative eigenvalue {w[0]}")
        self.matrix = matrix
        self.dim = matrix.shape[0]

    def __repr__(self):
        return f"QState(dim={self.dim})"


def pure_state(vec) -> QState:
    """State |psi><psi| from a (not necessarily normalized) vector."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(vec)
    if nrm < 1e-12:
        raise ValueError("cannot normalize a zero vector")
    vec = vec / nrm
    return QState(np.outer(vec, vec.conj()))


def basis_state(dim: int, index: int) -> QState:
    """Computational basis state |index><index| in dimension ``dim``."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[index, index] = 1.0
    return QState(m)


class QChannel:
    """CPTP map stored as a Kraus list with its Choi matrix cached.

    Instances are immutable by convention; construct through
    :func:`from_kraus` or :func:`from_choi`.
    """

    def __init__(self, kraus, dim_in, dim_out, choi):
        self.kraus = kraus
        self.dim_in = dim_in
        self.dim_out = dim_out
        self.choi = choi

    def __repr__(self):
        return (f"QChannel(dim_in={self.dim_in}, dim_out={self.dim_out}, "
                f"n_kraus={len(self.kraus)})")


def _choi_from_kraus(kraus, dim_in, dim_out):
    # row k of W is the column-major vectorization matching the Choi index
    # (i, a) -> i*dim_out + a
    W = np.stack([K.T.reshape(-1) for K in kraus])
    J = W.T @ W.conj()
    return 0.5 * (J + J.conj().T)


def from_kraus(ops, tp_tol: float = TP_TOL) -> QChannel:
    """Build a validated channel from a nonempty list of Kraus operators.

    Operators with Frobenius norm below 1e-12 are dropped. Raises
    ValueError on inconsistent shapes or when sum_k K_k^dag K_k deviates
    from the identity by more than ``tp_tol`` in any entry.
    """
    if len(ops) == 0:
        raise ValueError("need at least one Kraus operator")
    mats = []
    shape = None
    for k, op in enumerate(ops):
        m = np.asarray(op, dtype=complex)
        if m.ndim != 2:
            raise ValueError(f"kraus[{k}] is not a matrix")
        if shape is None:
            shape = m.shape
        elif m.shape != shape:
            raise ValueError(f"kraus[{k}] has shape {m.shape}, expected {shape}")
        mats.append(m)
    kept = [m for m in mats if np.linalg.norm(m) >= KRAUS_PRUNE_TOL]
    if not kept:
        raise ValueError("all Kraus operators are numerically zero")
    dim_out, dim_in = shape
    stack = np.stack(kept)
    gram = np.einsum("kai,kaj->ij", stack.conj(), stack)
    dev = np.max(np.abs(gram - np.eye(dim_in)))
    if dev > tp_tol:
        raise ValueError(f"Kraus operators violate trace preservation by {dev:.3e}")
    choi = _choi_from_kraus(kept, dim_in, dim_out)
    return QChannel(kept, dim_in, dim_out, choi)


def from_choi(j, dim_in: int, dim_out: int) -> QChannel:
    """Recover a channel from its (unnormalized) Choi matrix.

    The matrix must be PSD down to -1e-9 and satisfy Tr_out J = I within
    1e-8. Kraus operators come from the eigenvectors, with eigenvalues
    below 1e-12 dropped.
    """
    j = np.asarray(j, dtype=complex)
    q = dim_in * dim_out
    if j.shape != (q, q):
        raise ValueError(f"Choi matrix shape {j.shape} does not match dims "
                         f"({dim_in}, {dim_out})")
    if np.max(np.abs(j - j.conj().T)) > 1e-8:
        raise ValueError("Choi matrix is not Hermitian within 1e-8")
    tr_out = linalg.partial_trace(j, [dim_in, dim_out], keep={0})
    dev = np.max(np.abs(tr_out - np.eye(dim_in)))
    if dev > 1e-8:
        raise ValueError(f"Choi partial trace deviates from identity by {dev:.3e}")
    eig = linalg.herm_eig(0.5 * (j + j.conj().T))
    if eig.eigenvalues[0] < -1e-9:
        raise ValueError(f"Choi matrix has negative eigenvalue {eig.eigenvalues[0]}")
    kraus = []
    for lam, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam > 1e-12:
            kraus.append(np.sqrt(lam) * vec.reshape(dim_in, dim_out).T)
    if not kraus:
        raise ValueError("Choi matrix is numerically zero")
    return from_kraus(kraus, tp_tol=1e-8)


def apply(n: QChannel, rho: QState) -> QState:
    """Apply the channel: sum_k K_k rho K_k^dag, revalidated as a state."""
    if rho.dim != n.dim_in:
        raise ValueError(f"state dim {rho.dim} does not match channel input "
                         f"dim {n.dim_in}")
    if len(n.kraus) > n.dim_in * n.dim_out:
        jt = n.choi.reshape(n.dim_in, n.dim_out, n.dim_in, n.dim_out)
        out = np.einsum("iajb,ij->ab", jt, rho.matrix)
    else:
        stack = np.stack(n.kraus)
        out = np.einsum("kai,ij,kbj->ab", stack, rho.matrix, stack.conj())
    out = 0.5 * (out + out.conj().T)
    tr = out.trace().real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"channel output trace {tr} is not 1")
    return QState(out / tr)


def tensor(n: QChannel, m: QChannel) -> QChannel:
    """Parallel composition with Kraus set {K_i (x) L_j}."""
    kraus = [np.kron(a, b) for a in n.kraus for b in m.kraus]
    return from_kraus(kraus)


def compose(after: QChannel, before: QChannel) -> QChannel:
    """Sequential composition (after o before) with Kraus set {A_i B_j}."""
    if before.dim_out != after.dim_in:
        raise ValueError(f"cannot compose: inner dims {before.dim_out} and "
                         f"{after.dim_in} differ")
    kraus = [a @ b for a in after.kraus for b in before.kraus]
    return from_kraus(kraus)


@dataclass(frozen=True)
class FreeSuperOp:
    """Super-operation N -> post o (N (x) id_ancilla) o pre.

    ``pre`` is applied first, ``post`` last. Whether pre/post are free
    (MIO) is the caller's concern; see coherence.is_mio.
    """

    pre: QChannel
    post: QChannel
    ancilla_dim: int


def superop_apply(s: FreeSuperOp, n: QChannel) -> QChannel:
    """Transform a channel through a super-operation."""
    if s.ancilla_dim < 1:
        raise ValueError("ancilla_dim must be at least 1")
    if s.pre.dim_out != n.dim_in * s.ancilla_dim:
        raise ValueError(f"pre outputs dim {s.pre.dim_out}, channel with ancilla "
                         f"needs {n.dim_in * s.ancilla_dim}")
    if s.post.dim_in != n.dim_out * s.ancilla_dim:
        raise ValueError(f"post takes dim {s.post.dim_in}, channel with ancilla "
                         f"produces {n.dim_out * s.ancilla_dim}")
    middle = tensor(n, identity_channel(s.ancilla_dim))
    return compose(s.post, compose(middle, s.pre))


def identity_channel(d: int) -> QChannel:
    return from_kraus([np.eye(d, dtype=complex)])


def unitary_channel(u) -> QChannel:
    """Channel rho -> U rho U^dag. Raises if U is not unitary within 1e-10."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > 1e-10:
        raise ValueError(f"matrix deviates from unitarity by {dev:.3e}")
    return from_kraus([u])


def constant_channel(sigma: QState, dim_in: int | None = None) -> QChannel:
    """Channel that outputs ``sigma`` for every input state."""
    if dim_in is None:
        dim_in = sigma.dim
    eig = linalg.herm_eig(sigma.matrix)
    kraus = []
    for lam, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if lam > 1e-12:
            for i in range(dim_in):
                k = np.zeros((sigma.dim, dim_in), dtype=complex)
                k[:, i] = np.sqrt(lam) * vec
                kraus.append(k)
    return from_kraus(kraus)


def dephasing_channel(d: int) -> QChannel:
    """Pinching to the diagonal, Kraus set {|i><i|}."""
    kraus = []
    for i in range(d):
        k = np.zeros((d, d), dtype=complex)
        k[i, i] = 1.0
        kraus.append(k)
    return from_kraus(kraus)


def rotation_unitary(theta: float) -> QChannel:
    """Qubit rotation channel for [[cos t, -sin t], [sin t, cos t]]."""
    c, s = np.cos(theta), np.sin(theta)
    return unitary_channel(np.array([[c, -s], [s, c]]))


def mix_channels(channels, weights) -> QChannel:
    """Convex mixture sum_c w_c N_c as a single channel.

    Kraus set is the union of the component sets scaled by sqrt(w_c).
    """
    if len(channels) != len(weights) or not channels:
        raise ValueError("need equally many channels and weights, at least one")
    dims = {(c.dim_in, c.dim_out) for c in channels}
    if len(dims) != 1:
        raise ValueError(f"mixture components have mismatched dims {sorted(dims)}")
    kraus = []
    for c, w in zip(channels, weights):
        if w < -1e-12:
            raise ValueError(f"negative mixture weight {w}")
        if w > KRAUS_PRUNE_TOL:
            kraus.extend(np.sqrt(w) * k for k in c.kraus)
    return from_kraus(kraus)


def random_state(d: int, rng, rank: int | None = None) -> QState:
    """Random density matrix from a normalized Ginibre Gram matrix."""
    rng = np.random.default_rng(rng)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return QState(m / m.trace().real)


def random_pure_state(d: int, rng) -> QState:
    rng = np.random.default_rng(rng)
    return pure_state(rng.standard_normal(d) + 1j * rng.standard_normal(d))


def random_channel(dim_in: int, dim_out: int, kraus_rank: int, rng) -> QChannel:
    """Random channel from a Haar-ish isometry split into Kraus blocks."""
    if dim_out * kraus_rank < dim_in:
        raise ValueError("dim_out * kraus_rank must be at least dim_in")
    rng = np.random.default_rng(rng)
    g = (rng.standard_normal((dim_out * kraus_rank, dim_in))
         + 1j * rng.standard_normal((dim_out * kraus_rank, dim_in)))
    q, _ = np.linalg.qr(g)
    kraus = [q[k * dim_out:(k + 1) * dim_out, :] for k in range(kraus_rank)]
    return from_kraus(kraus)


def channel_to_json_dict(n: QChannel) -> dict:
    """Serialize a channel to the JSON schema used by the CLI."""
    return {
        "dim_in": n.dim_in,
        "dim_out": n.dim_out,
        "kraus": [[[[float(x.real), float(x.imag)] for x in row] for row in k]
                  for k in n.kraus],
    }


def _require_int(obj, key):
    val = obj.get(key)
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        raise ValueError(f"field '{key}' must be a positive integer")
    return val


def channel_from_json_dict(obj) -> QChannel:
    """Parse the CLI channel schema; errors name the offending Kraus index."""
    if not isinstance(obj, dict):
        raise ValueError("channel document must be a JSON object")
    dim_in = _require_int(obj, "dim_in")
    dim_out = _require_int(obj, "dim_out")
    kraus_field = obj.get("kraus")
    if not isinstance(kraus_field, list) or not kraus_field:
        raise ValueError("field 'kraus' must be a nonempty array")
    mats = []
    for k, mat in enumerate(kraus_field):
        if not isinstance(mat, list) or len(mat) != dim_out:
            raise ValueError(f"kraus[{k}] must have {dim_out} rows")
        parsed = np.zeros((dim_out, dim_in), dtype=complex)
        for r, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != dim_in:
                raise ValueError(f"kraus[{k}] row {r} must have {dim_in} entries")
            for c, pair in enumerate(row):
                if (not isinstance(pair, list) or len(pair) != 2
                        or not all(isinstance(x, numbers.Real) for x in pair)):
                    raise ValueError(f"kraus[{k}] entry ({r},{c}) must be a "
                                     f"[re, im] pair of numbers")
                parsed[r, c] = complex(pair[0], pair[1])
        mats.append(parsed)
    return from_kraus(mats)
