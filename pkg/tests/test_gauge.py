import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from adiabatic_mixing.errors import NumericalError
from adiabatic_mixing.gauge import (
    basis_state,
    build_gauge_matrix,
    cardinality_probability,
    diffuse,
    diffuse_many,
    entropy,
    holonomy_apply,
    holonomy_matrix,
    normalized_entropy,
    probabilities_csv,
    trivial_probability,
)
from adiabatic_mixing.graph import Graph, generate_random_graph
from adiabatic_mixing.propagate import chebyshev_expm_apply
from adiabatic_mixing.solutions import enumerate_independent_sets, median_adjacency

# K2 after one loop at theta = pi/2, from the closed form on the 3-node path
K2_P_EMPTY = math.cos(math.pi * math.sqrt(2)) ** 2
K2_P_SINGLE = math.sin(math.pi * math.sqrt(2)) ** 2 / 2


def gauge_for(g, theta):
    b = enumerate_independent_sets(g)
    return b, build_gauge_matrix(b, median_adjacency(b), theta)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def expm_oracle(A, psi, t):
    return scipy.linalg.expm(1j * t * A.to_dense()) @ psi


def test_k2_matrix(k2):
    _, A = gauge_for(k2, math.pi / 2)
    expected = np.array([[-1, 0.5, 0.5], [0.5, -1, 0], [0.5, 0, -1]])
    np.testing.assert_allclose(A.to_dense(), expected, atol=1e-15)


def test_theta_zero_is_diagonal():
    b, A = gauge_for(generate_random_graph(7, 7, 1), 0.0)
    np.testing.assert_array_equal(A.to_dense(), np.diag(-(b.n - b.popcounts).astype(float)))


def test_p3_structure(p3):
    b, A = gauge_for(p3, math.pi / 2)
    adj = np.zeros((5, 5))
    for a, c in median_adjacency(b).pairs:
        adj[a, c] = adj[c, a] = 1
    np.testing.assert_allclose(A.to_dense(), -1.5 * np.eye(5) + 0.5 * adj, atol=1e-15)


def test_invariants():
    b, A = gauge_for(generate_random_graph(10, 10, 4), 0.83)
    M = A.to_dense()
    assert np.array_equal(M, M.T)
    off = M - np.diag(np.diag(M))
    assert np.count_nonzero(off) == 2 * len(median_adjacency(b))
    _, A = gauge_for(generate_random_graph(10, 10, 4), math.pi / 2)
    np.testing.assert_allclose(A.diagonal, -5.0, atol=1e-14)
    _, A = gauge_for(generate_random_graph(10, 10, 4), math.pi)
    assert A.hopping == 0.0


def test_theta_range_checked(k2):
    b = enumerate_independent_sets(k2)
    with pytest.raises(ValueError):
        build_gauge_matrix(b, median_adjacency(b), -0.1)
    with pytest.raises(ValueError):
        build_gauge_matrix(b, median_adjacency(b), 3.2)


def test_k2_holonomy_closed_form(k2):
    b, A = gauge_for(k2, math.pi / 2)
    for method in ("dense", "chebyshev"):
        p = np.abs(holonomy_apply(A, basis_state(b), method=method)) ** 2
        np.testing.assert_allclose(p, [K2_P_EMPTY, K2_P_SINGLE, K2_P_SINGLE], atol=1e-12)
    oracle = np.abs(expm_oracle(A, basis_state(b), 2 * math.pi)) ** 2
    np.testing.assert_allclose(oracle, [K2_P_EMPTY, K2_P_SINGLE, K2_P_SINGLE], atol=1e-12)


def test_theta_zero_holonomy_is_phase():
    rng = np.random.default_rng(0)
    b, A = gauge_for(generate_random_graph(8, 8, 2), 0.0)
    psi = random_state(rng, b.size)
    out = holonomy_apply(A, psi)
    phase = np.vdot(psi, out)
    assert abs(abs(phase) - 1) < 1e-12
    np.testing.assert_allclose(out, phase * psi, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_edgeless_holonomy_is_phase(n):
    rng = np.random.default_rng(n)
    b, A = gauge_for(Graph(n), math.pi / 2)
    psi = random_state(rng, b.size)
    out = expm_oracle(A, psi, 2 * math.pi)
    phase = np.vdot(psi, out)
    np.testing.assert_allclose(out, phase * psi, atol=1e-10)
    np.testing.assert_allclose(holonomy_apply(A, psi), out, atol=1e-10)


def test_diffuse_zero_and_loop():
    b, A = gauge_for(generate_random_graph(9, 9, 5), 1.2)
    psi0 = basis_state(b)
    assert np.array_equal(diffuse(A, psi0, 0.0), psi0)
    np.testing.assert_allclose(diffuse(A, psi0, 2 * math.pi), holonomy_apply(A, psi0), atol=1e-9)


def test_multiple_loops_compose():
    b, A = gauge_for(generate_random_graph(9, 9, 6), math.pi / 2)
    psi = basis_state(b)
    direct = diffuse(A, psi, 2 * math.pi * 3)
    for _ in range(3):
        psi = holonomy_apply(A, psi)
    np.testing.assert_allclose(direct, psi, atol=1e-9)


def test_dense_matches_expm_oracle():
    rng = np.random.default_rng(1)
    b, A = gauge_for(generate_random_graph(8, 9, 3), 0.9)
    psi = random_state(rng, b.size)
    for t in (0.3, 2 * math.pi, 17.0):
        np.testing.assert_allclose(diffuse(A, psi, t, method="dense"), expm_oracle(A, psi, t), atol=1e-10)


def test_chebyshev_matches_dense():
    rng = np.random.default_rng(2)
    for seed in range(6):
        n = 7 + seed
        b, A = gauge_for(generate_random_graph(n, n + 2, seed), float(rng.uniform(0, math.pi)))
        if b.size > 500:
            continue
        psi = random_state(rng, b.size)
        for t in (1.0, 2 * math.pi, 20 * math.pi):
            d = diffuse(A, psi, t, method="dense")
            c = diffuse(A, psi, t, method="chebyshev")
            assert np.max(np.abs(d - c)) < 1e-8


def test_negative_time_inverts():
    rng = np.random.default_rng(5)
    b, A = gauge_for(generate_random_graph(9, 9, 9), 1.1)
    psi = random_state(rng, b.size)
    fwd = diffuse(A, psi, 3.7, method="chebyshev")
    np.testing.assert_allclose(diffuse(A, fwd, -3.7, method="chebyshev"), psi, atol=1e-10)


def test_chebyshev_reports_non_convergence():
    b, A = gauge_for(generate_random_graph(8, 8, 1), 1.0)
    with pytest.raises(NumericalError, match="not converged"):
        chebyshev_expm_apply(A.matvec, basis_state(b), 50.0, A.spectral_interval, max_terms=10)


def test_shape_mismatch(k2):
    _, A = gauge_for(k2, 1.0)
    with pytest.raises(ValueError):
        diffuse(A, np.ones(4), 1.0)


def test_diffuse_many_matches_single():
    b, A = gauge_for(generate_random_graph(10, 10, 2), 1.2)
    ts = np.linspace(0, 4 * math.pi, 7)
    rows = diffuse_many(A, basis_state(b), ts)
    for t, row in zip(ts, rows):
        np.testing.assert_allclose(row, diffuse(A, basis_state(b), t), atol=1e-10)
    rows_c = diffuse_many(A, basis_state(b), ts[:3], method="chebyshev")
    np.testing.assert_allclose(rows_c, rows[:3], atol=1e-9)


def test_unitarity_dense():
    rng = np.random.default_rng(3)
    for _ in range(8):
        n = int(rng.integers(3, 13))
        g = generate_random_graph(n, int(rng.integers(n // 2, n * (n - 1) // 2 + 1)), int(rng.integers(1 << 30)))
        b, A = gauge_for(g, float(rng.uniform(0, math.pi)))
        if b.size > 500:
            continue
        W = holonomy_matrix(A)
        assert np.max(np.abs(W.conj().T @ W - np.eye(b.size))) < 1e-10


@pytest.mark.parametrize("theta", [0.0, math.pi])
def test_pole_angles_leave_probabilities(theta):
    b, A = gauge_for(generate_random_graph(10, 10, 8), theta)
    W = holonomy_matrix(A)
    np.testing.assert_allclose(np.abs(W) ** 2, np.eye(b.size), atol=1e-9)


def test_identity_shift_is_global_phase():
    rng = np.random.default_rng(4)
    b, A = gauge_for(generate_random_graph(10, 10, 8), 1.2)
    psi = random_state(rng, b.size)
    p0 = np.abs(holonomy_apply(A, psi)) ** 2
    for c in (-3.3, 0.5, 1e3):
        for method in ("dense", "chebyshev"):
            p = np.abs(holonomy_apply(A.shifted(c), psi, method=method)) ** 2
            assert np.max(np.abs(p - p0)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(2, 10),
    density=st.floats(0.0, 1.0),
    theta=st.floats(0.0, math.pi),
    t=st.floats(-20 * math.pi, 20 * math.pi),
    seed=st.integers(0, 2**32),
)
def test_norm_conserved(n, density, theta, t, seed):
    g = generate_random_graph(n, round(density * n * (n - 1) / 2), seed)
    b, A = gauge_for(g, theta)
    psi = random_state(np.random.default_rng(seed), b.size)
    for method in ("dense", "chebyshev"):
        out = diffuse(A, psi, t, method=method)
        assert abs(np.linalg.norm(out) - 1) < 1e-10


def test_trivial_probability(p3):
    b = enumerate_independent_sets(p3)
    assert trivial_probability(basis_state(b), b) == (1.0, 0.25)
    uniform = np.full(b.size, 1 / math.sqrt(b.size))
    d, c = trivial_probability(uniform, b)
    assert d == pytest.approx(4 / 5)
    assert c == pytest.approx(1 / 5)


def test_k2_post_loop_trivial_and_entropy(k2):
    b, A = gauge_for(k2, math.pi / 2)
    psi = holonomy_apply(A, basis_state(b))
    assert trivial_probability(psi, b)[0] == pytest.approx(1.0, abs=1e-12)
    probs = np.array([K2_P_EMPTY, K2_P_SINGLE, K2_P_SINGLE])
    s_direct = float(-np.sum(probs * np.log(probs)))
    assert entropy(psi) == pytest.approx(s_direct, abs=1e-12)
    assert normalized_entropy(psi) == pytest.approx(s_direct / math.log(3), abs=1e-12)
    assert s_direct == pytest.approx(0.89995, abs=1e-5)


def test_entropy_limits():
    e = np.zeros(10, dtype=complex)
    e[3] = 1
    assert entropy(e) == 0.0
    u = np.full(10, 1 / math.sqrt(10))
    assert entropy(u) == pytest.approx(math.log(10))
    assert normalized_entropy(u, 10) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        normalized_entropy(np.ones(1))


def test_cardinality_probability(p3):
    b = enumerate_independent_sets(p3)
    assert cardinality_probability(basis_state(b), b).tolist() == [1, 0, 0, 0]
    uniform = np.full(b.size, 1 / math.sqrt(b.size))
    np.testing.assert_allclose(cardinality_probability(uniform, b), b.cardinality_histogram / b.size)
    rng = np.random.default_rng(0)
    psi = random_state(rng, b.size)
    assert cardinality_probability(psi, b).sum() == pytest.approx(1.0)


def test_probabilities_csv(k2):
    b = enumerate_independent_sets(k2)
    lines = probabilities_csv(basis_state(b), b).splitlines()
    assert lines == ["index,bitmask,probability", "0,0,1", "1,1,0", "2,2,0"]
