import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import closed_form_w, random_symplectic, random_w_point
from squeezelab.algebra import (
    Bogoliubov,
    GeneralizedLoweringOp,
    bogoliubov,
    conjugate_by_flow,
    from_bogoliubov,
    lowering_b,
    split_r,
    standard_lowering,
    xi_angle,
)
from squeezelab.gaussian import default_rng, eigenstate_of

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_commutator_validation():
    a = standard_lowering()
    assert a.commutator() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        GeneralizedLoweringOp(1.0, 1.0)
    assert (a * 1j).commutator() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        a * 2.0


def test_xi_branch():
    assert xi_angle((1, 1, 0.0, 1.0)) == pytest.approx(math.pi / 4)
    assert xi_angle((1, 1, -1e6, 1.0)) == pytest.approx(0.0, abs=1e-6)
    assert xi_angle((1, 1, 1e6, 1.0)) == pytest.approx(math.pi / 2, abs=1e-6)
    with pytest.raises(ValueError):
        xi_angle((1, 1, 0, 0.0))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_xi_in_range(seed):
    rng = default_rng(seed)
    w = random_w_point(rng)
    xi = xi_angle(w)
    assert 0.0 <= xi <= math.pi / 2
    assert math.sin(2 * xi) >= 0


def test_example_symmetric_reference_values():
    w = closed_form_w(1.0)
    split = split_r(w, strategy="example_symmetric")
    expected = (math.e - 1) * (2 - 1) / 4
    assert split.r1 == pytest.approx(expected, abs=1e-12)
    assert split.r2 == pytest.approx(expected, abs=1e-12)
    assert split.r1 == pytest.approx(0.429570, abs=1e-6)


def test_example_symmetric_gives_rotated_a():
    w4 = 0.8
    excess = math.expm1(w4) / 4
    w = (excess + 0.3, excess + 0.1, 0.0, w4)
    B = lowering_b(w, split_r(w, strategy="example_symmetric"))
    target = standard_lowering() * np.exp(-1j * math.pi / 4)
    assert B.u == pytest.approx(target.u, abs=1e-12)
    assert B.v == pytest.approx(target.v, abs=1e-12)


def test_example_symmetric_requires_w3_zero():
    with pytest.raises(ValueError):
        split_r((2.0, 2.0, 0.1, 1.0), strategy="example_symmetric")


def test_zero_discriminant_gives_trivial_split():
    w4 = 1.0
    excess = math.expm1(w4) / 4
    w = (excess, excess, 0.0, w4)
    split = split_r(w, strategy="q_filter")
    assert split.r1 == 0.0 and split.r2 == pytest.approx(0.0, abs=1e-15)


def test_negative_r_rejected():
    with pytest.raises(ValueError, match="unphysical"):
        split_r((0.1, 0.1, 0.0, 1.0), strategy="q_filter")
    with pytest.raises(ValueError):
        split_r((1.0, 1.0, 0.0, 1.0), strategy="nonsense")


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from(["q_filter", "p_filter"]))
def test_split_product_identity_and_unit_commutator(seed, strategy):
    rng = default_rng(seed)
    w1, w2, w3, w4 = w = random_w_point(rng)
    split = split_r(w, strategy=strategy)
    assert split.r1 >= 0 and split.r2 >= 0
    lhs = (w1 - split.r1) * (w2 - split.r2)
    rhs = w3**2 + math.expm1(w4) ** 2 / 16
    assert lhs == pytest.approx(rhs, rel=1e-10)
    B = lowering_b(w, split)
    assert abs(B.commutator() - 1) <= 1e-10
    assert eigenstate_of(B, 0.3 - 0.2j).det == pytest.approx(0.25, rel=1e-10)


def test_q_filter_eigenstate_reference():
    w = closed_form_w(1.0)
    B = lowering_b(w, split_r(w, strategy="q_filter"))
    assert eigenstate_of(B, 1 + 0.5j).det == pytest.approx(0.25, rel=1e-10)


def test_lowering_b_with_hbar():
    rng = default_rng(3)
    w = random_w_point(rng, hbar=2.0)
    B = lowering_b(w, split_r(w, 2.0), 2.0)
    assert B.commutator() == pytest.approx(1.0, abs=1e-10)


def test_conjugate_by_identity_and_rotation():
    a = standard_lowering()
    same = conjugate_by_flow(a, np.eye(2))
    assert (same.u, same.v) == (a.u, a.v)
    phi = 0.7
    R = np.array([[math.cos(phi), math.sin(phi)], [-math.sin(phi), math.cos(phi)]])
    rotated = bogoliubov(conjugate_by_flow(a, R))
    assert abs(rotated.nu) == pytest.approx(0.0, abs=1e-15)
    assert abs(rotated.mu) == pytest.approx(1.0)
    assert rotated.mu == pytest.approx(np.exp(-1j * phi))


def test_conjugate_rejects_non_symplectic():
    with pytest.raises(ValueError):
        conjugate_by_flow(standard_lowering(), 2 * np.eye(2))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_conjugation_properties(seed):
    rng = default_rng(seed)
    S = random_symplectic(rng)
    a = standard_lowering()
    out = conjugate_by_flow(a, S)
    assert abs(out.commutator() - 1) <= 1e-10
    bog = bogoliubov(out)
    bog.check()
    assert abs(bog.nu) ** 2 == pytest.approx((np.trace(S.T @ S) - 2) / 4, rel=1e-9, abs=1e-12)


def test_bogoliubov_examples():
    a = bogoliubov(standard_lowering())
    assert a.mu == pytest.approx(1.0) and a.nu == pytest.approx(0.0)
    rot = bogoliubov(standard_lowering() * np.exp(-1j * math.pi / 4))
    assert rot.mu == pytest.approx(np.exp(-1j * math.pi / 4)) and abs(rot.nu) < 1e-15


def test_bogoliubov_round_trip():
    nu = complex(0.2, -0.3)
    mu = complex(math.sqrt(1 + abs(nu) ** 2), 0) * np.exp(0.3j)
    bog = bogoliubov(from_bogoliubov(mu, nu, hbar=1.5))
    assert bog.mu == pytest.approx(mu) and bog.nu == pytest.approx(nu)
    with pytest.raises(ValueError):
        Bogoliubov(1.0, 0.5).check()


def test_squeezing_two_time_mode_is_squeezed(squeezing):
    from squeezelab.channels import two_time_mode
    from squeezelab.wsolve import solve_w

    traj = solve_w(squeezing, 2.0)
    for t in (0.9, 1.1):
        bog = bogoliubov(two_time_mode(squeezing, 1.0, t, traj=traj))
        assert abs(bog.nu) > 0
        bog.check(1e-10)
    at_star = bogoliubov(two_time_mode(squeezing, 1.0, 1.0, traj=traj))
    assert at_star.mu == pytest.approx(np.exp(-1j * math.pi / 4), abs=1e-10)
    assert abs(at_star.nu) < 1e-10
