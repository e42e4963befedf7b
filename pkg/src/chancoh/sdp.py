"""Small dense semidefinite-program solver.

Standard primal form over a block-diagonal symmetric variable X:

    minimize    <C, X>
    subject to  <A_i, X> = b_i   (i = 1..m)
                X >= 0           (blockwise PSD)

The algorithm is a primal-dual path-following interior point method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step, run on dense
real symmetric blocks. Complex Hermitian data enters through the real
embedding below. Problems in this package stay small (block sizes of a few
hundred at most), where the dense approach is simple and reliable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STEP_SHRINK = 0.98


@dataclass
class SdpProblem:
    """Blockwise-PSD SDP in standard primal form.

    ``objective`` and each constraint functional map block index to a real
    symmetric coefficient matrix; blocks not mentioned have zero
    coefficient. Functionals act by the trace pairing <A, X>.
    """

    blocks: list[int]
    objective: dict[int, np.ndarray]
    equality_constraints: list[tuple[dict[int, np.ndarray], float]] = field(
        default_factory=list)


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    primal_point: list[np.ndarray]
    status: str
    iterations: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    rel_gap: float = 0.0


def complex_to_real_embedding(h: np.ndarray) -> np.ndarray:
    """Real symmetric image [[Re h, -Im h], [Im h, Re h]] of a Hermitian h.

    The embedding is PSD iff h is PSD, and each eigenvalue of h appears
    twice in the image.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError("matrix is not Hermitian within 1e-10")
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def real_embedding_to_complex(r: np.ndarray) -> np.ndarray:
    """Inverse of the embedding, averaging over the embedded symmetry.

    On exact embeddings this is an exact inverse; on general symmetric
    matrices it first projects onto the embedded subspace, which preserves
    positive semidefiniteness and the trace pairing against embedded
    coefficients.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {r.shape}")
    n = r.shape[0] // 2
    re = 0.5 * (r[:n, :n] + r[n:, n:])
    im = 0.5 * (r[n:, :n] - r[:n, n:])
    h = re + 1j * im
    return 0.5 * (h + h.conj().T)


def _functional_tensors(p: SdpProblem):
    """Stack constraint coefficients into one dense (m, n_b, n_b) tensor per block."""
    m = len(p.equality_constraints)
    tensors = []
    for bi, n in enumerate(p.blocks):
        t = np.zeros((m, n, n))
        for ci, (coeffs, _) in enumerate(p.equality_constraints):
            a = coeffs.get(bi)
            if a is None:
                continue
            a = np.asarray(a, dtype=float)
            if a.shape != (n, n):
                raise ValueError(f"constraint {ci} block {bi} has shape {a.shape}, "
                                 f"expected {(n, n)}")
            if np.max(np.abs(a - a.T)) > 1e-9:
                raise ValueError(f"constraint {ci} block {bi} is not symmetric")
            t[ci] = 0.5 * (a + a.T)
        tensors.append(t)
    return tensors


def _objective_blocks(p: SdpProblem):
    cs = []
    for bi, n in enumerate(p.blocks):
        c = p.objective.get(bi)
        if c is None:
            cs.append(np.zeros((n, n)))
            continue
        c = np.asarray(c, dtype=float)
        if c.shape != (n, n):
            raise ValueError(f"objective block {bi} has shape {c.shape}, "
                             f"expected {(n, n)}")
        if np.max(np.abs(c - c.T)) > 1e-9:
            raise ValueError(f"objective block {bi} is not symmetric")
        cs.append(0.5 * (c + c.T))
    return cs


def _sym(m):
    return 0.5 * (m + m.T)


def _psd_sqrt_pair(m):
    """(m^(1/2), m^(-1/2)) for a symmetric positive definite matrix."""
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 1e-300, None)
    rt = np.sqrt(w)
    return (v * rt) @ v.T, (v / rt) @ v.T


def _nt_scaling(x, s):
    """NT scaling point W with W S W = X, plus W^(1/2) and W^(-1/2)."""
    s_half, s_inv_half = _psd_sqrt_pair(s)
    t_half, _ = _psd_sqrt_pair(_sym(s_half @ x @ s_half))
    w = _sym(s_inv_half @ t_half @ s_inv_half)
    w_half, w_inv_half = _psd_sqrt_pair(w)
    return w, w_half, w_inv_half


def _max_step(x, dx):
    """Largest alpha with x + alpha*dx still PSD (inf if unbounded)."""
    w, v = np.linalg.eigh(x)
    w = np.clip(w, 1e-300, None)
    t = v / np.sqrt(w)
    b = _sym(t.T @ dx @ t)
    lam_min = np.linalg.eigvalsh(b)[0]
    if lam_min >= -1e-14:
        return np.inf
    return -1.0 / lam_min


def _lyap_solve(v_mat, g):
    """Solve (V D + D V)/2 = G for symmetric D, V symmetric positive definite."""
    nu, f = np.linalg.eigh(v_mat)
    nu = np.clip(nu, 1e-300, None)
    gt = f.T @ g @ f
    d = gt / (0.5 * (nu[:, None] + nu[None, :]))
    return _sym(f @ d @ f.T)


def solve(p: SdpProblem, max_iterations: int = 200,
          tolerance: float = 1e-8) -> SdpSolution:
    """Solve the SDP; deterministic for identical inputs and parameters.

    Returns status "optimal" once primal/dual residuals and the relative
    duality gap all fall below ``tolerance``; "infeasible" if the primal
    residual stalls above 1e-6 while the complementarity measure collapses;
    "max_iterations" otherwise.
    """
    m = len(p.equality_constraints)
    tensors = _functional_tensors(p)
    cs = _objective_blocks(p)
    b = np.array([rhs for _, rhs in p.equality_constraints], dtype=float)
    n_total = sum(p.blocks)
    nb = len(p.blocks)

    def a_apply(xs):
        out = np.zeros(m)
        for t, xb in zip(tensors, xs):
            out += t.reshape(m, -1) @ xb.reshape(-1)
        return out

    def a_adjoint(y):
        return [np.einsum("i,ipq->pq", y, t) for t in tensors]

    a_norms = np.array([
        max(np.linalg.norm(coeffs[bi]) if bi in coeffs else 0.0
            for bi in range(nb)) if coeffs else 0.0
        for coeffs, _ in p.equality_constraints]) if m else np.zeros(0)
    c_norm = max(np.linalg.norm(c) for c in cs)
    tau_p = max(1.0, float(np.max(np.abs(b) / (1.0 + a_norms))) if m else 1.0)
    tau_d = max(1.0, c_norm)

    xs = [tau_p * np.eye(n) for n in p.blocks]
    ss = [tau_d * np.eye(n) for n in p.blocks]
    y = np.zeros(m)

    b_scale = 1.0 + np.linalg.norm(b)
    c_scale = 1.0 + np.sqrt(sum(np.linalg.norm(c) ** 2 for c in cs))
    status = "max_iterations"
    it = 0
    pres = dres = relgap = np.inf

    for it in range(1, max_iterations + 1):
        rp = b - a_apply(xs)
        aty = a_adjoint(y)
        rd = [c - s - at for c, s, at in zip(cs, ss, aty)]
        mu = sum(np.vdot(x, s).real for x, s in zip(xs, ss)) / n_total

        pval = sum(np.vdot(c, x).real for c, x in zip(cs, xs))
        dval = float(b @ y)
        pres = np.linalg.norm(rp) / b_scale
        dres = np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd)) / c_scale
        relgap = abs(pval - dval) / (1.0 + abs(pval))
        if pres < tolerance and dres < tolerance and relgap < tolerance:
            status = "optimal"
            break
        if mu < 1e-10 and pres > 1e-6:
            status = "infeasible"
            break

        scal = [_nt_scaling(x, s) for x, s in zip(xs, ss)]
        schur = np.zeros((m, m))
        for t, (w, _, _) in zip(tensors, scal):
            tw = np.matmul(w, np.matmul(t, w))
            schur += t.reshape(m, -1) @ tw.reshape(m, -1).T
        schur = _sym(schur)
        try:
            chol = np.linalg.cholesky(
                schur + 1e-14 * max(1.0, schur.trace() / max(m, 1)) * np.eye(m))
        except np.linalg.LinAlgError:
            chol = None

        def solve_schur(rhs):
            if chol is not None:
                z = np.linalg.solve(chol, rhs)
                return np.linalg.solve(chol.T, z)
            return np.linalg.lstsq(schur, rhs, rcond=None)[0]

        def directions(rcs):
            rhs = rp.copy()
            for t, (w, _, _), rc, rdb in zip(tensors, scal, rcs, rd):
                inner = rc - w @ rdb @ w
                rhs -= t.reshape(m, -1) @ inner.reshape(-1)
            dy = solve_schur(rhs)
            ds = [rdb - np.einsum("i,ipq->pq", dy, t)
                  for rdb, t in zip(rd, tensors)]
            dx = [_sym(rc - w @ dsb @ w)
                  for rc, (w, _, _), dsb in zip(rcs, scal, ds)]
            ds = [_sym(d) for d in ds]
            return dy, ds, dx

        # predictor: aim at mu = 0
        rcs_aff = [-x for x in xs]
        dy_a, ds_a, dx_a = directions(rcs_aff)
        ap_a = min(1.0, min(_max_step(x, dx) for x, dx in zip(xs, dx_a)))
        ad_a = min(1.0, min(_max_step(s, ds) for s, ds in zip(ss, ds_a)))
        mu_aff = sum(
            np.vdot(x + ap_a * dx, s + ad_a * ds).real
            for x, dx, s, ds in zip(xs, dx_a, ss, ds_a)) / n_total
        sigma = min(1.0, max(0.0, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector in the NT-scaled space
        rcs = []
        for x, (w, w_half, w_inv_half), dxb, dsb in zip(xs, scal, dx_a, ds_a):
            v_mat = _sym(w_inv_half @ x @ w_inv_half)
            dxt = w_inv_half @ dxb @ w_inv_half
            dst = w_half @ dsb @ w_half
            g = sigma * mu * np.eye(v_mat.shape[0]) - v_mat @ v_mat \
                - _sym(dxt @ dst)
            d = _lyap_solve(v_mat, g)
            rcs.append(_sym(w_half @ d @ w_half))
        dy, ds, dx = directions(rcs)

        ap = min(1.0, STEP_SHRINK * min(_max_step(x, d) for x, d in zip(xs, dx)))
        ad = min(1.0, STEP_SHRINK * min(_max_step(s, d) for s, d in zip(ss, ds)))
        if ap < 1e-12 and ad < 1e-12:
            break
        xs = [_sym(x + ap * d) for x, d in zip(xs, dx)]
        y = y + ad * dy
        ss = [_sym(s + ad * d) for s, d in zip(ss, ds)]

    pval = sum(np.vdot(c, x).real for c, x in zip(cs, xs))
    dval = float(b @ y)
    return SdpSolution(
        primal_value=float(pval), dual_value=float(dval), primal_point=xs,
        status=status, iterations=it, primal_residual=float(pres),
        dual_residual=float(dres), rel_gap=float(relgap))
