import numpy as np
import pytest

from chancoh import (SdpProblem, complex_to_real_embedding,
                     real_embedding_to_complex, solve)

from oracles import planted_sdp_instance


def test_embedding_pauli_y():
    sy = np.array([[0, -1j], [1j, 0]])
    r = complex_to_real_embedding(sy)
    assert r.shape == (4, 4)
    assert np.allclose(r, r.T)
    assert np.allclose(sorted(np.linalg.eigvalsh(r)), [-1, -1, 1, 1])


def test_embedding_doubles_spectrum():
    rng = np.random.default_rng(40)
    for _ in range(25):
        d = int(rng.integers(2, 6))
        h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = 0.5 * (h + h.conj().T)
        r = complex_to_real_embedding(h)
        wr = np.sort(np.linalg.eigvalsh(r))
        wh = np.sort(np.linalg.eigvalsh(h))
        assert np.allclose(wr, np.sort(np.concatenate([wh, wh])), atol=1e-10)
        # real part in the diagonal blocks, imaginary in the off blocks
        assert np.allclose(r[:d, :d], h.real)
        assert np.allclose(r[d:, :d], h.imag)


def test_embedding_round_trip():
    rng = np.random.default_rng(41)
    for _ in range(25):
        d = int(rng.integers(1, 6))
        h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = 0.5 * (h + h.conj().T)
        back = real_embedding_to_complex(complex_to_real_embedding(h))
        assert np.max(np.abs(back - h)) < 1e-12


def test_embedding_rejects_non_hermitian():
    with pytest.raises(ValueError):
        complex_to_real_embedding(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_solve_scalar_pinned():
    # minimize x over x >= 0 with the linear constraint x = 2
    p = SdpProblem(blocks=[1], objective={0: np.array([[1.0]])},
                   equality_constraints=[({0: np.array([[1.0]])}, 2.0)])
    sol = solve(p)
    assert sol.status == "optimal"
    assert abs(sol.primal_value - 2.0) < 1e-7
    assert abs(sol.dual_value - 2.0) < 1e-7


def test_solve_diag_assignment():
    # minimize tr(diag(1, 2) X) with tr X = 1; optimum puts all weight on
    # the cheap coordinate
    c = np.diag([1.0, 2.0])
    p = SdpProblem(blocks=[2], objective={0: c},
                   equality_constraints=[({0: np.eye(2)}, 1.0)])
    sol = solve(p)
    assert sol.status == "optimal"
    assert abs(sol.primal_value - 1.0) < 1e-7
    x = sol.primal_point[0]
    assert abs(x[0, 0] - 1.0) < 1e-6 and abs(x[1, 1]) < 1e-6


def test_solve_two_blocks():
    # blocks are independent: each contributes its own minimum
    p = SdpProblem(
        blocks=[2, 1],
        objective={0: np.diag([1.0, 3.0]), 1: np.array([[1.0]])},
        equality_constraints=[
            ({0: np.eye(2)}, 1.0),
            ({1: np.array([[1.0]])}, 0.5),
        ],
    )
    sol = solve(p)
    assert sol.status == "optimal"
    assert abs(sol.primal_value - 1.5) < 1e-7


def test_solve_recovers_planted_optima():
    rng = np.random.default_rng(42)
    for trial in range(20):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(2, n + 1))
        blocks, objective, constraints, value = planted_sdp_instance(
            rng, n=n, m=m)
        p = SdpProblem(blocks=blocks, objective=objective,
                       equality_constraints=constraints)
        sol = solve(p)
        assert sol.status == "optimal", f"trial {trial}: {sol.status}"
        assert abs(sol.primal_value - value) < 1e-6 * max(1.0, abs(value)), \
            f"trial {trial}: got {sol.primal_value}, planted {value}"


def test_solution_invariants():
    rng = np.random.default_rng(43)
    blocks, objective, constraints, _ = planted_sdp_instance(rng, n=5, m=4)
    p = SdpProblem(blocks=blocks, objective=objective,
                   equality_constraints=constraints)
    sol = solve(p)
    assert sol.status == "optimal"
    assert sol.primal_residual < 1e-8
    assert sol.dual_residual < 1e-8
    assert sol.rel_gap < 1e-8
    assert sol.iterations > 0
    x = sol.primal_point[0]
    assert np.allclose(x, x.T, atol=1e-10)
    assert np.min(np.linalg.eigvalsh(x)) > -1e-9
    # constraints hold at the returned point
    for coeffs, rhs in constraints:
        got = sum(np.vdot(a, sol.primal_point[b]).real
                  for b, a in coeffs.items())
        assert abs(got - rhs) < 1e-6


def test_solve_deterministic():
    rng = np.random.default_rng(44)
    blocks, objective, constraints, _ = planted_sdp_instance(rng, n=6, m=5)
    p = SdpProblem(blocks=blocks, objective=objective,
                   equality_constraints=constraints)
    a = solve(p)
    b = solve(p)
    assert a.primal_value == b.primal_value
    assert a.iterations == b.iterations
    for xa, xb in zip(a.primal_point, b.primal_point):
        assert np.array_equal(xa, xb)


def test_solve_flags_infeasible():
    # tr X = -1 with X PSD has no solution
    p = SdpProblem(blocks=[2], objective={0: np.eye(2)},
                   equality_constraints=[({0: np.eye(2)}, -1.0)])
    sol = solve(p)
    assert sol.status in ("infeasible", "max_iterations")
    assert sol.status != "optimal"
