import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc

from squeezelab.algebra import from_bogoliubov, standard_lowering
from squeezelab.channels import b_operator
from squeezelab.entropy import wehrl_gaussian
from squeezelab.errors import MixedStateError
from squeezelab.gaussian import (
    GaussianState,
    apply_parity,
    coherent,
    eigenstate_of,
    fidelity,
    purity,
    random_state,
    thermal,
    vacuum,
    wavefunction,
)
from squeezelab.qubit import (
    TRANSCRIPT_COLUMNS,
    CnotGrid,
    QubitCoords,
    cnot_apply,
    gate,
    measure_p1,
    not_circuit,
    not_target,
    qubit_decode,
    qubit_encode,
    rescale_amplitude,
    secure_transcript,
)
from squeezelab.wsolve import solve_w

SQRT_HALF = math.sqrt(0.5)


def test_amplitudes_normalized():
    for theta in (-3.0, -0.4, 0.0, 1.2, 5.0):
        c = QubitCoords(theta, 0.7)
        assert abs(c.a) ** 2 + abs(c.b) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert c.a >= 0


def test_encode_decode_round_trip(rng):
    for _ in range(50):
        theta, phi = rng.uniform(-3, 3), rng.uniform(-10, 10)
        r = rng.uniform(-1, 1)
        dq, dp = SQRT_HALF * math.exp(r), SQRT_HALF * math.exp(-r)
        c = qubit_decode(qubit_encode(theta, phi, dq, dp))
        assert c.theta == pytest.approx(theta, abs=1e-12)
        assert c.phi == pytest.approx(phi % (2 * math.pi), abs=1e-12)


def test_encode_examples():
    s = qubit_encode(1.0, 0.0, SQRT_HALF, SQRT_HALF)
    assert s.mean[0] == pytest.approx(1.0, abs=1e-15)
    s = qubit_encode(0.0, 0.3, SQRT_HALF, SQRT_HALF)
    assert measure_p1(s) == pytest.approx((0.5, 0.5), abs=1e-15)
    with pytest.raises(MixedStateError):
        qubit_encode(0.0, 0.0, 1.0, 1.0)


def test_decode_vacuum_and_mixed():
    c = qubit_decode(vacuum())
    assert (c.theta, c.phi) == (0.0, 0.0)
    assert c.a == pytest.approx(SQRT_HALF) and abs(c.b) == pytest.approx(SQRT_HALF)
    with pytest.raises(MixedStateError):
        qubit_decode(thermal(0.5))
    assert qubit_decode(thermal(0.5), strict=False).theta == 0.0


def test_p1_limits_and_examples():
    assert measure_p1(coherent(20.0))[1] == pytest.approx(1.0, abs=1e-15)
    assert measure_p1(coherent(-20.0))[1] == pytest.approx(0.0, abs=1e-15)
    s = GaussianState([3.0, 0.0], [[0.5, 0.0], [0.0, 0.5]])
    assert measure_p1(s)[1] == pytest.approx(0.5 * erfc(-3.0), abs=1e-15)
    assert measure_p1(s)[1] == pytest.approx(0.99998, abs=1e-5)
    p0, p1 = measure_p1(s)
    assert measure_p1(apply_parity(s)) == pytest.approx((p1, p0), abs=1e-15)


def test_p1_matches_density_quadrature(rng):
    for _ in range(100):
        s = random_state(rng, pure=True, max_squeeze=1.0, max_mean=2.0)
        dens = lambda x: abs(wavefunction(s, np.array([x]))[0]) ** 2
        direct, _ = quad(dens, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12)
        assert measure_p1(s)[1] == pytest.approx(direct, abs=1e-8)
        theta = qubit_decode(s).theta
        assert measure_p1(s)[1] == pytest.approx(0.5 * erfc(-theta), abs=1e-12)


def test_gate_identities(rng):
    for _ in range(20):
        r = rng.uniform(-1, 1)
        s = qubit_encode(rng.uniform(-2, 2), rng.uniform(0, 2 * math.pi),
                         SQRT_HALF * math.exp(r), SQRT_HALF * math.exp(-r))
        c = qubit_decode(s)
        xx = qubit_decode(gate(gate(s, "X"), "X"))
        assert (xx.theta, xx.phi) == (c.theta, c.phi)
        z = qubit_decode(gate(s, "Z"))
        assert z.phi == pytest.approx((c.phi + math.pi) % (2 * math.pi), abs=1e-12)
        zx, y = qubit_decode(gate(gate(s, "X"), "Z")), qubit_decode(gate(s, "Y"))
        assert (zx.theta, zx.phi) == (y.theta, y.phi)
    s = qubit_encode(1.0, 0.0, SQRT_HALF, SQRT_HALF)
    assert qubit_decode(gate(s, "X")).theta == -1.0
    assert qubit_decode(gate(s, "Z")).phi == pytest.approx(math.pi, abs=1e-15)
    with pytest.raises(ValueError):
        gate(s, "H")


def test_rescale_amplitude_keeps_covariance():
    op = from_bogoliubov(math.sqrt(1.09), 0.3j)
    s = eigenstate_of(op, 0.4 - 0.2j)
    out = rescale_amplitude(s, op, 2.5)
    assert out.allclose(eigenstate_of(op, 2.5 * (0.4 - 0.2j)), atol=1e-13)


def b_amplitude(op, s):
    return op.u * s.mean[0] + op.v * s.mean[1]


def test_not_circuit_reference_amplitude(reference):
    traj = solve_w(reference, 1.0)
    out = not_circuit(reference, 1.0, 1.0, "q_filter", traj)
    B, _ = b_operator(traj, 1.0, "q_filter")
    assert b_amplitude(B, out) == pytest.approx(-math.exp(-0.5), abs=1e-9)
    assert purity(out) == pytest.approx(1.0, abs=1e-9)
    assert fidelity(out, not_target(reference, 1.0, 1.0, "q_filter", traj)) >= 1 - 1e-9


def test_not_circuit_vacuum(squeezing):
    out = not_circuit(squeezing, 0.0, 1.0)
    np.testing.assert_allclose(out.mean, 0.0, atol=1e-12)


@pytest.mark.parametrize("beta", [1.0, 0.7 - 1.3j])
def test_not_circuit_split_independent(squeezing, beta):
    # B(t*) depends on the split, so compare the logical action: undoing the
    # decay in the B-frame must give X applied to the encoded input
    traj = solve_w(squeezing, 1.0)
    w4 = traj.point(1.0).w4
    actions = []
    for split in ("q_filter", "p_filter", "example_symmetric"):
        B, _ = b_operator(traj, 1.0, split)
        out = not_circuit(squeezing, beta, 1.0, split, traj)
        assert fidelity(out, not_target(squeezing, beta, 1.0, split, traj)) >= 1 - 1e-9
        restored = qubit_decode(rescale_amplitude(out, B, math.exp(0.5 * w4)))
        flipped = qubit_decode(gate(eigenstate_of(B, beta), "X"))
        actions.append((restored.theta - flipped.theta, restored.phi - flipped.phi))
    np.testing.assert_allclose(actions, 0.0, atol=1e-9)


def test_eavesdropper_not_circuit_is_mixed(squeezing):
    traj = solve_w(squeezing, 1.3)
    for t in (0.7, 1.3):
        out = not_circuit(squeezing, 1.0, 1.0, "example_symmetric", traj, filter_time=t)
        delta0 = 1.0 - purity(out)
        print(f"eavesdropper filter at t={t}: delta0={delta0:.6e}")
        assert delta0 > 1e-5
        assert wehrl_gaussian(out) > 1.0


def test_cnot_vacuum_inputs_symmetric():
    out, table = cnot_apply(0.0, standard_lowering())
    assert out.norm == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(out.control_probs, 0.5, atol=1e-6)
    np.testing.assert_allclose(table, 0.5, atol=1e-6)
    np.testing.assert_allclose(out.density, out.density[::-1, ::-1], atol=1e-12)


def test_cnot_norm_and_rows():
    op = from_bogoliubov(math.sqrt(1.09), 0.3)
    out, table = cnot_apply(1 + 0.5j, op)
    assert out.norm == pytest.approx(1.0, abs=1e-6)
    np.testing.assert_allclose(table.sum(axis=1), 1.0, atol=1e-6)


def test_cnot_conditional_flip_mirrors():
    op = from_bogoliubov(math.sqrt(1.09), 0.3)
    beta = 1.2
    _, table = cnot_apply(beta, op)
    np.testing.assert_allclose(table[0], table[1][::-1], atol=1e-9)
    # control q1 < 0 leaves |beta> alone, which sits at positive q
    p1 = measure_p1(eigenstate_of(op, beta))[1]
    # midpoint rule on the half-line: O(h^2) error at 512 points
    assert table[0, 1] == pytest.approx(p1, abs=1e-5)


def test_cnot_control_profile():
    mu, nu = math.sqrt(1.09), 0.3
    op = from_bogoliubov(mu, nu)
    out, _ = cnot_apply(0.5, op, CnotGrid(n=256))
    ratio = (mu + nu) / (mu - nu)
    profile = np.exp(-ratio * out.q1**2)
    marginal = out.density.sum(axis=1)
    np.testing.assert_allclose(marginal / marginal.sum(), profile / profile.sum(), atol=1e-12)


def test_cnot_rejects_narrow_grid():
    with pytest.raises(ValueError):
        cnot_apply(0.0, standard_lowering(), CnotGrid(n=64, half_width=4.0))


def test_secure_transcript(squeezing_strong):
    rows = secure_transcript(squeezing_strong, 1.0, 0.8 + 0.4j, [0.7, 1.3])
    assert [r["role"] for r in rows] == ["eavesdropper", "receiver", "eavesdropper"]
    assert all(set(TRANSCRIPT_COLUMNS) == set(r) for r in rows)
    receiver = rows[1]
    assert receiver["purity"] == pytest.approx(1.0, abs=1e-9)
    assert abs(receiver["theta_err"]) < 1e-9 and abs(receiver["phi_err"]) < 1e-9
    assert receiver["fidelity_to_target"] >= 1 - 1e-9
    for r in (rows[0], rows[2]):
        assert r["purity"] < 1.0 and r["wehrl"] > 1.0


def test_secure_transcript_beta_changes_only_means(squeezing_strong):
    a = secure_transcript(squeezing_strong, 1.0, 0.8 + 0.4j, [0.7])
    b = secure_transcript(squeezing_strong, 1.0, -0.3 + 1.1j, [0.7])
    for ra, rb in zip(a, b):
        assert ra["purity"] == pytest.approx(rb["purity"], abs=1e-12)
        assert ra["wehrl"] == pytest.approx(rb["wehrl"], abs=1e-12)


def test_secure_transcript_rejects_t_star(squeezing_strong):
    with pytest.raises(ValueError):
        secure_transcript(squeezing_strong, 1.0, 1.0, [1.0])
    with pytest.raises(ValueError):
        secure_transcript(squeezing_strong, 1.0, 1.0, [])
