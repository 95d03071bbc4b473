import numpy as np
import pytest

from graphmaslov.edge_solver import (
    _cos_like,
    _sinc_like,
    assemble_eigenfunction,
    fundamental_matrix,
    k_lambda_frame,
    propagator,
)
from graphmaslov.graph import Edge, make_interval, make_star
from graphmaslov.symplectic import frame, intersection_dim, is_lagrangian


def test_propagator_free_cases():
    assert np.allclose(propagator(0.0, 2.5), [[1.0, 2.5], [0.0, 1.0]])
    assert np.allclose(propagator(1.0, np.pi), [[-1.0, 0.0], [0.0, -1.0]], atol=1e-12)


def test_constant_shift_identity():
    for lam, c in [(3.0, 1.2), (-2.0, -0.7), (0.5, 0.5)]:
        shifted = fundamental_matrix(Edge(1.3, ((1.0, c),)), lam)
        free = fundamental_matrix(Edge(1.3), lam - c)
        assert np.allclose(shifted, free, atol=1e-12)


def test_wronskian_thousand_draws():
    # Relative to the matrix scale: deep in the hyperbolic branch the entries
    # grow like exp(sqrt(-z) h) and the determinant is a cancellation of
    # their squares, so machine epsilon times that scale is the right yardstick.
    rng = np.random.default_rng(101)
    for _ in range(1000):
        z = rng.uniform(-50.0, 50.0)
        h = rng.uniform(0.01, 3.0)
        m = propagator(z, h)
        scale = max(1.0, np.max(np.abs(m)) ** 2)
        assert abs(np.linalg.det(m) - 1.0) < 1e-10 * scale


def test_branch_agreement_near_zero():
    # The trig, hyperbolic and series branches must agree across z = 0.
    h = np.array([0.8])
    for z in (1e-8, -1e-8, 1e-5, -1e-5):
        c_series = 1 - z * h[0] ** 2 / 2 + (z * h[0] ** 2) ** 2 / 24
        s_series = h[0] * (1 - z * h[0] ** 2 / 6 + (z * h[0] ** 2) ** 2 / 120)
        assert float(_cos_like(z, h)[0]) == pytest.approx(c_series, abs=1e-13)
        assert float(_sinc_like(z, h)[0]) == pytest.approx(s_series, abs=1e-13)


def test_solution_frame_interval_at_one():
    g = make_interval(np.pi)
    f = k_lambda_frame(g, 1.0)
    # Columns carry the endpoint traces of cos and sin with the inward sign
    # at the right end.
    expected = np.array(
        [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]
    )
    assert np.allclose(f.matrix.real, expected, atol=1e-12)
    assert is_lagrangian(f).ok


def test_solution_frame_is_lagrangian_everywhere():
    rng = np.random.default_rng(102)
    graphs = [
        make_interval(np.pi, -5.0),
        make_star(3, [1.0, np.sqrt(2), np.pi / 2], 0.5),
        make_star(2, [0.9, 1.7], -1.3),
    ]
    for g in graphs:
        for lam in rng.uniform(-20.0, 20.0, size=10):
            assert is_lagrangian(k_lambda_frame(g, float(lam))).ok


def test_dirichlet_intersection_at_eigenvalue():
    g = make_interval(np.pi)
    dirichlet = frame(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    assert intersection_dim(k_lambda_frame(g, 1.0), dirichlet) == 1
    assert intersection_dim(k_lambda_frame(g, 2.0), dirichlet) == 0


def test_assemble_sine_norm():
    g = make_interval(np.pi)
    f = assemble_eigenfunction(g, 1.0, [0.0, 1.0])
    assert f.norm == pytest.approx(np.sqrt(np.pi / 2), abs=1e-8)
    assert np.allclose(f.values[0], np.sin(f.x[0]), atol=1e-10)


def test_assemble_zero_function():
    g = make_interval(np.pi)
    f = assemble_eigenfunction(g, 1.0, [0.0, 0.0])
    assert f.norm == 0.0


def test_assemble_linear_mode_norm():
    g = make_interval(np.pi)
    f = assemble_eigenfunction(g, 0.0, [1.0, -1.0 / np.pi])
    assert f.norm**2 == pytest.approx(np.pi / 3, abs=1e-8)


def test_assemble_rejects_bad_input():
    g = make_interval(np.pi)
    with pytest.raises(ValueError, match="at least 5"):
        assemble_eigenfunction(g, 1.0, [0.0, 1.0], samples_per_edge=3)
    with pytest.raises(ValueError, match="expected 2 coefficients"):
        assemble_eigenfunction(g, 1.0, [0.0, 1.0, 2.0])
