import math

import numpy as np
import pytest

from ddiqkd.optics import (
    BeamSplitter,
    ConfigurationError,
    HalfWavePlate,
    OpticalState,
    PhaseModulator,
    PolAmplitude,
    PolarizingBeamSplitter,
    ValidationError,
    apply_beamsplitter,
    apply_hwp,
    apply_pbs,
    apply_phase_modulator,
    energies,
    propagate,
    single_photon_probabilities,
)


def random_state(rng, labels=("a", "b")):
    modes = {}
    for label in labels:
        re_h, im_h, re_v, im_v = rng.normal(size=4)
        modes[label] = PolAmplitude(complex(re_h, im_h), complex(re_v, im_v))
    return OpticalState(modes)


class TestBeamSplitter:
    def test_balanced_splits_coherent_input(self):
        mu = 1.7
        p = PolAmplitude(0.6, 0.8j)  # unit polarization
        state = OpticalState({"a": p.scaled(math.sqrt(2 * mu))})
        out = apply_beamsplitter(state, BeamSplitter(0.5, ("a", "b"), ("c", "d")))
        for mode in ("c", "d"):
            amp = out.amplitude(mode)
            assert amp.h == pytest.approx(math.sqrt(mu) * p.h, abs=1e-12)
            assert amp.v == pytest.approx(math.sqrt(mu) * p.v, abs=1e-12)

    def test_balanced_equal_inputs_interfere(self):
        x = PolAmplitude(0.3 + 0.4j, -0.2j)
        state = OpticalState({"a": x, "b": x})
        out = apply_beamsplitter(state, BeamSplitter(0.5, ("a", "b"), ("c", "d")))
        assert out.amplitude("c").h == pytest.approx(math.sqrt(2) * x.h, abs=1e-12)
        assert out.amplitude("c").v == pytest.approx(math.sqrt(2) * x.v, abs=1e-12)
        assert out.energy("d") == pytest.approx(0.0, abs=1e-12)

    def test_splitting_ratio(self):
        state = OpticalState({"a": PolAmplitude(1.0, 0.0)})
        out = apply_beamsplitter(state, BeamSplitter(0.44, ("a", "b"), ("c", "d")))
        assert out.energy("c") == pytest.approx(0.44, abs=1e-12)
        assert out.energy("d") == pytest.approx(0.56, abs=1e-12)

    def test_transmittance_validation(self):
        for t in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValidationError):
                BeamSplitter(t, ("a", "b"), ("c", "d"))

    def test_missing_mode_is_configuration_error(self):
        state = OpticalState({"a": PolAmplitude(1.0)})
        with pytest.raises(ConfigurationError):
            apply_beamsplitter(state, BeamSplitter(0.5, ("a", "nope"), ("c", "d")))

    def test_populated_output_rejected(self):
        state = OpticalState({"a": PolAmplitude(1.0), "c": PolAmplitude(1.0)})
        with pytest.raises(ConfigurationError):
            apply_beamsplitter(state, BeamSplitter(0.5, ("a", "b"), ("c", "d")))


class TestPhaseModulator:
    def test_zero_phase_identity(self):
        state = OpticalState({"c": PolAmplitude(0.3, 0.7j)})
        out = apply_phase_modulator(state, PhaseModulator(0.0, "c"))
        assert out.amplitude("c") == state.amplitude("c")

    def test_pi_negates(self):
        state = OpticalState({"c": PolAmplitude(1.0, 0.0)})
        out = apply_phase_modulator(state, PhaseModulator(math.pi, "c"))
        assert out.amplitude("c").h == pytest.approx(-1.0, abs=1e-12)

    def test_phase_additivity(self):
        state = OpticalState({"c": PolAmplitude(0.5 + 0.1j, 0.2)})
        twice = apply_phase_modulator(
            apply_phase_modulator(state, PhaseModulator(math.pi / 2, "c")),
            PhaseModulator(math.pi / 2, "c"),
        )
        once = apply_phase_modulator(state, PhaseModulator(math.pi, "c"))
        assert twice.amplitude("c").h == pytest.approx(once.amplitude("c").h, abs=1e-12)
        assert twice.amplitude("c").v == pytest.approx(once.amplitude("c").v, abs=1e-12)

    def test_relabeling_output(self):
        state = OpticalState({"c": PolAmplitude(1.0)})
        out = apply_phase_modulator(state, PhaseModulator(0.3, "c", out="e"))
        assert out.energy("c") == 0.0
        assert out.energy("e") == pytest.approx(1.0, abs=1e-12)


class TestHalfWavePlate:
    def test_swaps_polarizations(self):
        state = OpticalState({"d": PolAmplitude(1.0, 0.0)})
        out = apply_hwp(state, HalfWavePlate("d"))
        assert out.amplitude("d").h == 0
        assert out.amplitude("d").v == 1.0

    def test_involution(self):
        state = OpticalState({"d": PolAmplitude(0.2 + 0.3j, 0.9)})
        out = apply_hwp(apply_hwp(state, HalfWavePlate("d")), HalfWavePlate("d"))
        assert out.amplitude("d") == state.amplitude("d")

    def test_symmetric_fixed_point(self):
        x = 0.4 - 0.2j
        state = OpticalState({"d": PolAmplitude(x, x)})
        out = apply_hwp(state, HalfWavePlate("d"))
        assert out.amplitude("d") == PolAmplitude(x, x)


class TestPolarizingBeamSplitter:
    def test_routes_h_and_v(self):
        state = OpticalState({"g": PolAmplitude(1.0, 1.0)})
        out = apply_pbs(state, PolarizingBeamSplitter("g", ("D3", "D4")))
        assert out.amplitude("D3") == PolAmplitude(1.0, 0.0)
        assert out.amplitude("D4") == PolAmplitude(0.0, 1.0)

    def test_pure_v_input(self):
        x = 0.8j
        state = OpticalState({"g": PolAmplitude(0.0, x)})
        out = apply_pbs(state, PolarizingBeamSplitter("g", ("D3", "D4")))
        assert out.amplitude("D3") == PolAmplitude(0.0, 0.0)
        assert out.amplitude("D4") == PolAmplitude(0.0, x)

    def test_energy_conserved_random(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            state = random_state(rng, labels=("g",))
            before = state.total_energy()
            out = apply_pbs(state, PolarizingBeamSplitter("g", ("D3", "D4")))
            assert out.total_energy() == pytest.approx(before, rel=1e-12)


class TestUnitarity:
    def test_every_element_conserves_energy(self):
        rng = np.random.default_rng(23)
        for _ in range(250):
            state = random_state(rng, labels=("a", "b"))
            t = rng.uniform(0.01, 0.99)
            applied = [
                apply_beamsplitter(state, BeamSplitter(t, ("a", "b"), ("c", "d"))),
                apply_phase_modulator(state, PhaseModulator(rng.uniform(0, 2 * math.pi), "a")),
                apply_hwp(state, HalfWavePlate("b")),
                apply_pbs(state, PolarizingBeamSplitter("a", ("D1", "D2"))),
            ]
            for out in applied:
                assert out.total_energy() == pytest.approx(state.total_energy(), rel=1e-12)


class TestPropagate:
    def test_empty_network_is_identity(self):
        state = OpticalState({"a": PolAmplitude(0.5, 0.5j)})
        assert propagate([], state) is state

    def test_dangling_reference(self):
        state = OpticalState({"a": PolAmplitude(1.0)})
        with pytest.raises(ConfigurationError):
            propagate([PhaseModulator(0.1, "q")], state)

    def test_unknown_element_type(self):
        with pytest.raises(ConfigurationError):
            propagate([object()], OpticalState({}))


class TestEnergies:
    def test_detector_ports_reported(self):
        state = OpticalState({"D1": PolAmplitude(1.0), "D3": PolAmplitude(0.0, 2.0)})
        e = energies(state)
        assert e == {"D1": 1.0, "D2": 0.0, "D3": 4.0, "D4": 0.0}


class TestSinglePhotonProbabilities:
    def test_two_equal_ports(self):
        probs = single_photon_probabilities([1.0, 1.0, 0.0, 0.0])
        assert np.allclose(probs, [0.5, 0.5, 0.0, 0.0], atol=1e-15)

    def test_single_port(self):
        probs = single_photon_probabilities([1.0, 0.0, 0.0, 0.0])
        assert np.allclose(probs, [1.0, 0.0, 0.0, 0.0], atol=1e-15)

    def test_all_zero_is_error(self):
        with pytest.raises(ValidationError):
            single_photon_probabilities([0.0, 0.0, 0.0, 0.0])

    def test_sums_to_one(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            assert single_photon_probabilities(amps).sum() == pytest.approx(1.0, abs=1e-12)


class TestStateValidation:
    def test_unknown_label_rejected(self):
        with pytest.raises(ConfigurationError):
            OpticalState({"zz": PolAmplitude(1.0)})

    def test_non_finite_amplitude_rejected(self):
        with pytest.raises(ValidationError):
            PolAmplitude(complex("nan"), 0.0)
