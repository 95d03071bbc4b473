import numpy as np
import pytest

from graphmaslov.symplectic import (
    LagrangianFrame,
    SymplecticSpace,
    frame,
    frame_from_unitary,
    intersection_basis,
    intersection_dim,
    is_lagrangian,
    omega,
    plane_distance,
    random_lagrangian_frame,
    souriau_unitary,
)


def line_frame(theta: float) -> LagrangianFrame:
    return frame(np.array([[np.cos(theta)], [np.sin(theta)]]))


def test_omega_basic_values():
    assert omega(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(-1.0)
    assert omega(np.array([1.0, 1.0]), np.array([1.0, 1.0])) == pytest.approx(0.0)


def test_omega_matches_matrix_form():
    rng = np.random.default_rng(11)
    space = SymplecticSpace(2)
    jm = space.j_matrix()
    for _ in range(50):
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        expected = np.vdot(v, jm @ u)  # <J u, v> with the second slot conjugated
        assert omega(u, v) == pytest.approx(expected, abs=1e-12)


def test_omega_antisymmetry():
    rng = np.random.default_rng(12)
    for _ in range(100):
        u = rng.normal(size=6) + 1j * rng.normal(size=6)
        v = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert omega(u, v) == pytest.approx(-np.conj(omega(v, u)), abs=1e-12)


def test_is_lagrangian_examples():
    dirichlet = frame(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    assert is_lagrangian(dirichlet).ok
    diag = frame(np.vstack([np.eye(2), np.eye(2)]))
    assert is_lagrangian(diag).ok
    bad = frame(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    assert not is_lagrangian(bad).ok


def test_souriau_reference_planes():
    horizontal = frame(np.vstack([np.eye(2), np.zeros((2, 2))]))
    assert np.allclose(souriau_unitary(horizontal), np.eye(2))
    dirichlet = frame(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    assert np.allclose(souriau_unitary(dirichlet), -np.eye(2))


@pytest.mark.parametrize("theta", [0.0, 0.3, -1.1, np.pi / 2])
def test_souriau_rotating_line(theta):
    w = souriau_unitary(line_frame(theta))
    assert w.shape == (1, 1)
    assert w[0, 0] == pytest.approx(np.exp(2j * theta), abs=1e-12)


def test_souriau_frame_independent():
    rng = np.random.default_rng(13)
    for _ in range(20):
        f = random_lagrangian_frame(SymplecticSpace(3), rng)
        c = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        c += 3 * np.eye(3)  # keep it invertible
        g = LagrangianFrame(f.space, f.matrix @ c)
        assert np.allclose(souriau_unitary(f), souriau_unitary(g), atol=1e-9)


def test_intersection_dim_examples():
    rng = np.random.default_rng(14)
    f = random_lagrangian_frame(SymplecticSpace(4), rng)
    assert intersection_dim(f, f) == 4
    dirichlet = frame(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    horizontal = frame(np.vstack([np.eye(2), np.zeros((2, 2))]))
    assert intersection_dim(dirichlet, horizontal) == 0
    assert intersection_dim(line_frame(0.4), line_frame(0.4 + np.pi / 2)) == 0
    assert intersection_dim(line_frame(0.4), line_frame(0.4 + np.pi)) == 1


def test_intersection_basis_spans_common_directions():
    basis = intersection_basis(line_frame(0.7), line_frame(0.7 + np.pi))
    assert basis.shape == (2, 1)
    direction = np.array([np.cos(0.7), np.sin(0.7)])
    overlap = abs(np.vdot(direction, basis[:, 0]))
    assert overlap == pytest.approx(1.0, abs=1e-9)


def test_plane_distance_examples():
    dirichlet = frame(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    horizontal = frame(np.vstack([np.eye(2), np.zeros((2, 2))]))
    assert plane_distance(dirichlet, dirichlet) == pytest.approx(0.0, abs=1e-12)
    assert plane_distance(dirichlet, horizontal) == pytest.approx(1.0, abs=1e-12)
    assert plane_distance(line_frame(0.0), line_frame(np.pi / 4)) == pytest.approx(
        np.sin(np.pi / 4), abs=1e-12
    )


def test_plane_distance_triangle_inequality():
    rng = np.random.default_rng(15)
    space = SymplecticSpace(3)
    for _ in range(50):
        a, b, c = (random_lagrangian_frame(space, rng) for _ in range(3))
        assert plane_distance(a, c) <= plane_distance(a, b) + plane_distance(b, c) + 1e-12


def test_random_frames_are_lagrangian():
    rng = np.random.default_rng(16)
    for m in (1, 2, 5):
        for _ in range(20):
            f = random_lagrangian_frame(SymplecticSpace(m), rng)
            assert is_lagrangian(f).ok


def test_frame_from_unitary_round_trip():
    rng = np.random.default_rng(17)
    space = SymplecticSpace(3)
    for _ in range(20):
        f = random_lagrangian_frame(space, rng)
        w = souriau_unitary(f)
        g = frame_from_unitary(space, w)
        assert plane_distance(f, g) < 1e-9
