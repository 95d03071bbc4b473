import numpy as np
import pytest
from scipy.optimize import brentq

from graphmaslov.graph import make_interval, make_star
from graphmaslov.spectral import (
    eigenfunction_trace,
    eigenvalues_in,
    morse_index,
    secular_gap,
    spectral_floor,
    spectral_flow,
)
from graphmaslov.vertex import (
    BoundaryFamily,
    delta_star_family,
    delta_star_pair,
    dirichlet_pair,
    neumann_pair,
    robin_interval_family,
)


def test_secular_gap_values():
    g = make_interval(np.pi)
    d = dirichlet_pair(2)
    assert secular_gap(g, d, 1.0) <= 1e-10
    assert secular_gap(g, d, 2.0) > 0.1
    assert secular_gap(g, neumann_pair(2), 0.0) <= 1e-10


def test_interval_dirichlet_spectrum():
    g = make_interval(np.pi)
    spec = eigenvalues_in(g, dirichlet_pair(2), (0.5, 10.0))
    lams = [h.lam for h in spec.eigenvalues]
    assert lams == pytest.approx([1.0, 4.0, 9.0], abs=1e-8)
    assert all(h.multiplicity == 1 for h in spec.eigenvalues)


def test_interval_neumann_spectrum():
    g = make_interval(np.pi)
    spec = eigenvalues_in(g, neumann_pair(2), (-0.5, 5.0))
    assert [h.lam for h in spec.eigenvalues] == pytest.approx([0.0, 1.0, 4.0], abs=1e-8)


def test_star_ground_state_scalar_oracle():
    # Equal lengths 1, Dirichlet outer, continuity + current conservation at
    # the center: ground state solves sum_e sqrt(lam) cot(sqrt(lam) l_e) = 0.
    g = make_star(3, [1.0, 1.0, 1.0])
    p = delta_star_pair(g, 0.0)
    spec = eigenvalues_in(g, p, (0.5, 4.0))
    assert spec.count() >= 1
    lam1 = spec.eigenvalues[0].lam
    oracle = brentq(lambda lam: np.sqrt(lam) / np.tan(np.sqrt(lam)), 1.0, 4.0)
    assert lam1 == pytest.approx(oracle, abs=1e-8)
    assert oracle == pytest.approx((np.pi / 2) ** 2, abs=1e-10)


def test_degenerate_level_detected():
    # Equal-length star: at lam = pi^2 the antisymmetric modes form a
    # two-dimensional eigenspace.
    g = make_star(3, [1.0, 1.0, 1.0])
    p = delta_star_pair(g, 0.0)
    spec = eigenvalues_in(g, p, (9.0, 10.5))
    assert spec.count() == 2
    assert spec.eigenvalues[0].multiplicity == 2
    assert spec.eigenvalues[0].lam == pytest.approx(np.pi**2, abs=1e-8)


def test_window_endpoint_guard():
    g = make_interval(np.pi)
    with pytest.raises(ValueError, match="window endpoints are eigenvalues"):
        eigenvalues_in(g, dirichlet_pair(2), (1.0, 10.0))


def test_morse_indices():
    assert morse_index(make_interval(np.pi, -5.0), dirichlet_pair(2)) == 2
    assert morse_index(make_interval(np.pi), dirichlet_pair(2)) == 0
    assert morse_index(make_interval(np.pi, -0.5), neumann_pair(2)) == 1


def test_morse_zero_eigenvalue_guard():
    g = make_interval(np.pi)
    with pytest.raises(ValueError, match="zero is an eigenvalue"):
        morse_index(g, neumann_pair(2))


def test_spectral_floor_certificate():
    g = make_interval(np.pi, -5.0)
    cert = spectral_floor(g, [dirichlet_pair(2)])
    assert cert.lam_inf < -4.0  # below the smallest eigenvalue 1 - 5 = -4
    assert cert.scanned[1] <= cert.lam_inf
    assert cert.min_gap > 0.0


def test_eigenfunction_trace_normalization():
    g = make_interval(np.pi)
    data = eigenfunction_trace(g, dirichlet_pair(2), 1.0)
    # Normalized sine: zero boundary values, inward derivatives sqrt(2/pi).
    expected = np.sqrt(2.0 / np.pi)
    assert np.allclose(data.trace.dirichlet, 0.0, atol=1e-9)
    assert np.allclose(np.abs(data.trace.neumann), expected, atol=1e-8)
    assert data.residual < 1e-8


def test_flow_robin_interval():
    g = make_interval(np.pi)
    res = spectral_flow(g, robin_interval_family(), (-1.0, 0.0))
    assert res.flow == 1
    assert res.morse_alpha == 1 and res.morse_beta == 0
    assert res.tracking_flow == 1
    assert len(res.crossings) == 1
    assert res.crossings[0] == pytest.approx(-1.0 / np.pi, abs=0.02)


def test_flow_constant_family():
    g = make_interval(np.pi)
    fam = BoundaryFamily(lambda t: dirichlet_pair(2))
    res = spectral_flow(g, fam, (0.0, 1.0))
    assert res.flow == 0 and res.tracking_flow == 0


def test_flow_delta_star():
    g = make_star(3, [1.0, np.sqrt(2), np.pi / 2])
    res = spectral_flow(g, delta_star_family(g), (-3.0, -2.0))
    assert res.flow == 1
    assert res.tracking_flow == 1
