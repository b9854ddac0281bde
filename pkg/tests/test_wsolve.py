import numpy as np
import pytest

from conftest import closed_form_w
from squeezelab.errors import PhysicalityError
from squeezelab.model import QdeCoefficients, make_reference_model
from squeezelab.wsolve import solve_w


def zero(t):
    return 0.0


def test_reference_matches_closed_form(reference):
    traj = solve_w(reference, 2.0)
    for t in (0.01, 0.5, 1.0, 1.7, 2.0):
        np.testing.assert_allclose(traj(t), closed_form_w(t), rtol=1e-9, atol=1e-12)
    assert traj.point(1.0).w1 == pytest.approx(0.5 * (np.e - 1), abs=1e-9)


def test_trajectory_layout(reference):
    traj = solve_w(reference, 1.5)
    assert traj.t[0] == reference.t_min
    assert np.all(np.diff(traj.t) > 0)
    assert np.all(np.diff(traj.samples[:, 3]) >= 0)
    assert traj.t_end == pytest.approx(1.5)
    with pytest.raises(ValueError):
        traj(1.6)


def test_squeezing_w3_vanishes(squeezing):
    traj = solve_w(squeezing, 2.0)
    assert np.abs(traj.samples[:, 2]).max() <= 1e-9
    grid = np.linspace(squeezing.t_min, 2.0, 101)
    assert max(abs(traj.point(t).w3) for t in grid) <= 1e-9


def test_zero_noise_gives_zero_w():
    m = QdeCoefficients(b11=lambda t: 0.5, b12=zero, b22=lambda t: 0.5, k1=zero, k2=zero,
                        k3=lambda t: 0j)
    traj = solve_w(m, 1.0)
    assert np.all(traj.samples == 0.0)


def test_tolerance_convergence(reference):
    a = solve_w(reference, 2.0, rel_tol=1e-8).point(2.0)
    b = solve_w(reference, 2.0, rel_tol=5e-9).point(2.0)
    rel = np.abs(np.array(a) - np.array(b)) / np.abs(np.array(b)).clip(1e-300)
    assert rel[[0, 1, 3]].max() < 10 * 5e-9


def test_linear_in_inhomogeneity():
    def model(scale):
        return QdeCoefficients(b11=zero, b12=zero, b22=zero,
                               k1=lambda t: 0.3 * scale, k2=lambda t: 0.7 * scale,
                               k3=lambda t: complex(0.1 * scale, -0.25))
    w_a = np.array(solve_w(model(1.0), 1.0).point(1.0))
    w_b = np.array(solve_w(model(2.0), 1.0).point(1.0))
    np.testing.assert_allclose(w_b[:3], 2 * w_a[:3], rtol=1e-9)
    assert w_b[3] == pytest.approx(w_a[3], rel=1e-12)


@pytest.mark.parametrize("rel_tol", [1e-13, 1e-3])
def test_rel_tol_range(reference, rel_tol):
    with pytest.raises(ValueError):
        solve_w(reference, 1.0, rel_tol=rel_tol)


def test_unphysical_coefficients_reported():
    # no diffusion at all while w4 grows: the discriminant is negative
    m = QdeCoefficients(b11=zero, b12=zero, b22=zero, k1=lambda t: 0.01, k2=lambda t: 0.01,
                        k3=lambda t: complex(0, -0.25))
    traj = solve_w(m, 1.0)
    assert not traj.physicality
    with pytest.raises(PhysicalityError):
        solve_w(m, 1.0, strict=True)


def test_undefined_coefficient_raises():
    from squeezelab.model import make_table_model

    m = make_table_model([0.0, 1.0], [0.5] * 2, [0] * 2, [0.5] * 2, [0.5] * 2, [0.5] * 2,
                         [-0.25j] * 2)
    with pytest.raises(ValueError):
        solve_w(m, 2.0)
