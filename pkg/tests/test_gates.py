"""Gate actions, preparation protocols, inversion and the dynamic phase."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

import oracles
from fermitope import gates
from fermitope.errors import InvalidGateError, InvalidPulseError
from fermitope.fock import basis_vector, natural_occupations, one_rdm, sector_dim, superposition
from fermitope.gates import (
    GateOp,
    Protocol,
    PulseSpec,
    apply_gate,
    apply_protocol,
    build_protocol,
    controlled_rotation,
    dynamic_phase,
    gate_matrix,
    invert_protocol,
    phase_gate,
    protocol_states,
    rotation,
    target_state,
)

SLATER = basis_vector(6, "101010")

# Intermediate states of the two preparation chains.  |psi4> carries the
# reordering sign on |011001>, matching the first-quantized wedge product.
PSI_I = superposition(6, {"101010": 1, "011010": 1})
PSI_1 = superposition(6, {"101010": 1, "011010": math.sqrt(2)})
PSI_2 = superposition(6, {"101010": 1, "011010": 1, "010110": 1})
PSI_3 = superposition(6, {"101010": 1, "011010": 1, "010101": 1})
PSI_4 = superposition(6, {"101010": 1, "010110": 1, "011001": -1})


def dense_rotation_generator(d: int, i: int, j: int, angle: float, n: int) -> np.ndarray:
    """(angle/2)(a_j^+ a_i - a_i^+ a_j) restricted to the sector, dense."""
    gen = (
        oracles.dense_creation(d, j) @ oracles.dense_annihilation(d, i)
        - oracles.dense_creation(d, i) @ oracles.dense_annihilation(d, j)
    ) * (angle / 2.0)
    return oracles.restrict(gen, d, n, n)


class TestRotation:
    def test_half_pi_creates_even_superposition(self):
        out = apply_gate(SLATER, rotation(1, 2, math.pi / 2))
        assert out.fidelity_to(PSI_I) == pytest.approx(1.0, abs=1e-12)

    def test_zero_angle_is_identity(self):
        state = superposition(6, {"101010": 0.6, "010101": 0.8})
        out = apply_gate(state, rotation(3, 4, 0.0))
        assert np.allclose(out.amplitudes, state.amplitudes)

    def test_pair_action_matches_definition(self):
        phi = 0.7
        out = apply_gate(basis_vector(2, "10"), rotation(1, 2, phi))
        assert out.amplitude("10") == pytest.approx(math.cos(phi / 2))
        assert out.amplitude("01") == pytest.approx(math.sin(phi / 2))
        out = apply_gate(basis_vector(2, "01"), rotation(1, 2, phi))
        assert out.amplitude("01") == pytest.approx(math.cos(phi / 2))
        assert out.amplitude("10") == pytest.approx(-math.sin(phi / 2))

    def test_identity_on_empty_and_full_pairs(self):
        for occ in ("001010", "111010"):
            state = basis_vector(6, occ)
            out = apply_gate(state, rotation(1, 2, 1.2345))
            assert np.allclose(out.amplitudes, state.amplitudes)

    @pytest.mark.parametrize("angle", [math.pi, 0.7, -2.1])
    def test_distant_pair_matches_expm_oracle(self, angle):
        # d=6, N=2 sector is 15-dimensional; strings between sites 1 and 6
        # carry occupation-dependent signs that the oracle reproduces.
        u = gate_matrix(rotation(1, 6, angle), 6, 2)
        u_oracle = expm(dense_rotation_generator(6, 1, 6, angle, 2))
        assert np.allclose(u, u_oracle, atol=1e-12)

    def test_string_sign_appears_for_occupied_interior(self):
        # |110000>: site 2 occupied between sites 1 and 6.
        out = apply_gate(basis_vector(6, "110000"), rotation(1, 6, math.pi))
        assert out.amplitude("010001") == pytest.approx(-1.0)

    def test_double_pi_rotation_is_minus_identity_on_pair_subspace(self):
        state = superposition(6, {"101010": 1, "011010": -2j})
        once = apply_gate(state, rotation(1, 2, math.pi))
        twice = apply_gate(once, rotation(1, 2, math.pi))
        assert np.allclose(twice.amplitudes, -state.amplitudes, atol=1e-12)


class TestControlledRotation:
    def test_projector_definition(self):
        # Control occupied: rotate; control empty: identity.
        active = apply_gate(basis_vector(6, "011010"), controlled_rotation(2, 3, 4, math.pi))
        assert active.amplitude("010110") == pytest.approx(1.0)
        idle = apply_gate(basis_vector(6, "101010"), controlled_rotation(2, 3, 4, math.pi))
        assert idle.amplitude("101010") == pytest.approx(1.0)

    def test_matches_dense_projector_construction(self):
        from fermitope.fock import sector_basis

        d, n = 6, 3
        k, i, j = 2, 3, 4
        angle = 1.1
        u = gate_matrix(controlled_rotation(k, i, j, angle), d, n)
        r_dense = expm(dense_rotation_generator(d, i, j, angle, n))
        occ = np.array([int(b.occupations[k - 1]) for b in sector_basis(d, n)])
        p_k = np.diag(occ.astype(complex))
        u_oracle = p_k @ r_dense + (np.eye(sector_dim(d, n)) - p_k)
        assert np.allclose(u, u_oracle, atol=1e-12)

    def test_control_site_must_differ(self):
        with pytest.raises(InvalidGateError):
            controlled_rotation(3, 3, 4, 1.0)


class TestPhaseGate:
    def test_symmetric_phases_on_pair(self):
        theta = 0.9
        out = apply_gate(basis_vector(2, "10"), phase_gate(1, 2, theta))
        assert out.amplitude("10") == pytest.approx(np.exp(-1j * theta / 2))
        out = apply_gate(basis_vector(2, "01"), phase_gate(1, 2, theta))
        assert out.amplitude("01") == pytest.approx(np.exp(1j * theta / 2))

    def test_identity_outside_pair_subspace(self):
        state = basis_vector(6, "001010")
        out = apply_gate(state, phase_gate(1, 2, 2.2))
        assert np.allclose(out.amplitudes, state.amplitudes)


class TestGateContracts:
    @pytest.mark.parametrize(
        "gate",
        [
            rotation(1, 2, 0.8),
            rotation(2, 6, -1.7),
            controlled_rotation(2, 3, 4, 2.7),
            controlled_rotation(5, 1, 6, 0.4),
            phase_gate(3, 4, 1.3),
        ],
    )
    def test_unitary_on_sector(self, gate):
        u = gate_matrix(gate, 6, 3)
        assert np.max(np.abs(u @ u.conj().T - np.eye(20))) < 1e-12

    def test_out_of_range_site_raises(self):
        with pytest.raises(InvalidGateError):
            apply_gate(SLATER, rotation(1, 7, 1.0))

    def test_gate_validation(self):
        with pytest.raises(InvalidGateError):
            rotation(1, 1, 0.5)
        with pytest.raises(InvalidGateError):
            GateOp("rotation", (1, 2), float("nan"))
        with pytest.raises(InvalidGateError):
            GateOp("twist", (1, 2), 0.5)

    def test_gate_json_round_trip(self):
        gate = controlled_rotation(2, 3, 4, math.pi / 2, 60e-12)
        assert GateOp.from_json(gate.to_json()) == gate


class TestProtocols:
    def test_epr_chain_and_intermediate(self):
        states = protocol_states(SLATER, build_protocol("epr"))
        assert states[0].fidelity_to(PSI_I) == pytest.approx(1.0, abs=1e-12)
        assert states[1].fidelity_to(target_state("epr")) == pytest.approx(1.0, abs=1e-12)

    def test_ghz_extends_epr(self):
        epr, ghz = build_protocol("epr"), build_protocol("ghz")
        assert ghz.gates[: len(epr.gates)] == epr.gates
        final = apply_protocol(SLATER, ghz)
        assert final.fidelity_to(target_state("ghz")) == pytest.approx(1.0, abs=1e-12)

    def test_w_chain_hits_all_intermediates(self):
        states = protocol_states(SLATER, build_protocol("w"))
        for got, want in zip(states, (PSI_1, PSI_2, PSI_3, PSI_4, target_state("w"))):
            assert got.fidelity_to(want) == pytest.approx(1.0, abs=1e-12)

    def test_slater_protocol_is_identity(self):
        protocol = build_protocol("slater")
        assert protocol.gates == ()
        assert apply_protocol(SLATER, protocol).fidelity_to(SLATER) == 1.0

    @pytest.mark.parametrize("label", ["slater", "epr", "w", "ghz"])
    def test_targets_reproduce_reference_occupations(self, label):
        final = apply_protocol(SLATER, build_protocol(label))
        lam, _ = natural_occupations(one_rdm(final))
        assert np.allclose(lam, gates.TARGET_OCCUPATIONS[label], atol=1e-12)

    def test_protocol_durations(self):
        protocol = build_protocol("w")
        assert protocol.total_duration() == pytest.approx(220e-12)

    def test_protocol_json_round_trip(self):
        protocol = build_protocol("ghz")
        assert Protocol.from_json(protocol.to_json()) == protocol


class TestInversion:
    def test_single_gate_inverse(self):
        inv = invert_protocol(Protocol("one", (rotation(1, 2, math.pi / 2),)))
        assert inv.gates == (rotation(1, 2, -math.pi / 2),)

    @pytest.mark.parametrize("label", ["epr", "ghz", "w"])
    def test_roundtrip_returns_to_start(self, label):
        protocol = build_protocol(label)
        back = apply_protocol(apply_protocol(SLATER, protocol), invert_protocol(protocol))
        assert back.fidelity_to(SLATER) >= 1 - 1e-10

    def test_inverse_matrix_is_adjoint(self):
        protocol = build_protocol("w")
        u = np.eye(20, dtype=complex)
        for gate in protocol.gates:
            u = gate_matrix(gate, 6, 3) @ u
        v = np.eye(20, dtype=complex)
        for gate in invert_protocol(protocol).gates:
            v = gate_matrix(gate, 6, 3) @ v
        assert np.allclose(v, u.conj().T, atol=1e-12)


class TestDynamicPhase:
    def test_vanishing_integrand(self):
        pulse = PulseSpec(lambda t: 0.0, lambda t: 0.0, detuning=1e9, duration=1e-9)
        assert dynamic_phase(pulse) == pytest.approx(0.0, abs=1e-15)

    def test_constant_pulse_closed_form(self):
        omega, delta, duration = 2e9, 5e8, 3e-9
        pulse = PulseSpec(lambda t: omega, lambda t: omega, delta, duration)
        expected = -duration * (math.sqrt(2 * omega**2 + delta**2 / 4) - delta / 2)
        assert dynamic_phase(pulse) == pytest.approx(expected, rel=1e-9)

    def test_gaussian_pulse_matches_trapezoid_oracle(self):
        def env(t):
            return 1e9 * math.exp(-(((t - 1e-9) / 3e-10) ** 2))

        pulse = PulseSpec(env, env, detuning=4e8, duration=2e-9)
        got = dynamic_phase(pulse)
        want = oracles.trapezoid_phase(env, env, 4e8, 2e-9)
        assert got == pytest.approx(want, rel=1e-8)

    def test_non_positive_for_non_negative_detuning(self):
        for delta in (0.0, 1e8, 3e9):
            pulse = PulseSpec(lambda t: 1e9, lambda t: 5e8, delta, 1e-9)
            assert dynamic_phase(pulse) <= 0.0

    def test_magnitude_grows_with_duration_and_spans_two_pi(self):
        def phase_at(delta, duration):
            return dynamic_phase(PulseSpec(lambda t: 1e9, lambda t: 1e9, delta, duration))

        assert abs(phase_at(5e8, 2e-9)) > abs(phase_at(5e8, 1e-9))
        values = [phase_at(delta, 8e-9) for delta in np.linspace(0, 4e9, 9)]
        assert max(values) - min(values) >= 2 * math.pi

    def test_invalid_pulse_raises(self):
        with pytest.raises(InvalidPulseError):
            PulseSpec(lambda t: 1.0, lambda t: 1.0, detuning=0.0, duration=0.0)
        bad = PulseSpec(lambda t: float("inf"), lambda t: 0.0, 0.0, 1e-9)
        with pytest.raises(InvalidPulseError):
            dynamic_phase(bad)
