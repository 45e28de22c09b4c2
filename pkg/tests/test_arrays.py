"""Tests for steering vectors, snapshot synthesis and array patterns."""

import cmath
import json
import math

import numpy as np
import pytest

from wlansim.arrays import (
    GAIN_FLOOR_DB,
    ArrayConfig,
    Scenario,
    Source,
    array_pattern,
    default_scenario,
    steering_vector,
    synthesize,
)


def scenario_with(**overrides) -> Scenario:
    base = dict(
        carrier_hz=5e9,
        num_elements=4,
        spacing_wavelengths=0.5,
        step_size=0.32,
        iterations=100,
        seed=11,
        noise_power=0.0,
        sources=(Source("desired", 0.3, "sinusoid", 0.1, 1.0),),
    )
    base.update(overrides)
    return Scenario(**base)


class TestSteeringVector:
    def test_broadside_is_all_ones(self):
        for n in (1, 2, 8, 16):
            v = steering_vector(0.0, ArrayConfig(n))
            assert np.allclose(v, np.ones(n))

    def test_two_element_endfire(self):
        v = steering_vector(math.pi / 2, ArrayConfig(2, 0.5))
        assert v[0] == pytest.approx(1.0)
        assert v[1] == pytest.approx(-1.0, abs=1e-12)

    def test_eight_element_phase_progression(self):
        cfg = ArrayConfig(8, 0.5)
        v = steering_vector(math.pi / 4, cfg)
        expected_step = -math.pi * math.sin(math.pi / 4)
        for k in range(8):
            # Per-element phase oracle: element k carries phase k*step.
            assert v[k] == pytest.approx(cmath.exp(1j * expected_step * k), abs=1e-12)

    def test_unit_magnitude_entries(self):
        cfg = ArrayConfig(16, 0.37)
        for theta in np.linspace(-1.5, 1.5, 31):
            assert np.max(np.abs(np.abs(steering_vector(theta, cfg)) - 1.0)) < 1e-12


class TestSynthesize:
    def test_null_scenario_gives_zero_snapshot(self):
        sc = scenario_with(
            sources=(Source("desired", 0.3, "sinusoid", 0.1, 0.0),), noise_power=0.0
        )
        snap = synthesize(sc, 5)
        assert np.all(snap.x == 0)
        assert snap.d == 0

    def test_single_element_passthrough(self):
        sc = scenario_with(num_elements=1, noise_power=0.0)
        for n in range(10):
            snap = synthesize(sc, n)
            assert snap.x[0] == pytest.approx(snap.d, abs=1e-15)

    def test_matches_direct_summation_oracle(self):
        sc = default_scenario()
        snap = synthesize(sc, 0)
        # Element-wise sum oracle, built from the raw definitions.
        x = np.zeros(sc.num_elements, dtype=complex)
        for src in sc.sources:
            s = src.amplitude * cmath.exp(2j * math.pi * src.normalized_freq * 0)
            phase = -2j * math.pi * sc.spacing_wavelengths * math.sin(src.angle_rad)
            x += s * np.exp(phase * np.arange(sc.num_elements))
        noise = snap.x - x
        # Residual must be the (reproducible) noise vector, bounded in power.
        assert np.mean(np.abs(noise) ** 2) < 20 * sc.noise_power
        assert snap.d == pytest.approx(1.0, abs=1e-15)

    def test_noiseless_oracle_is_exact(self):
        sc = scenario_with(
            num_elements=6,
            sources=(
                Source("desired", 0.4, "sinusoid", 0.08, 1.3),
                Source("interferer", -0.7, "sinusoid", 0.21, 0.6),
            ),
        )
        n = 17
        snap = synthesize(sc, n)
        x = np.zeros(6, dtype=complex)
        for src in sc.sources:
            s = src.amplitude * cmath.exp(2j * math.pi * src.normalized_freq * n)
            x += s * np.exp(-2j * math.pi * 0.5 * math.sin(src.angle_rad) * np.arange(6))
        assert np.allclose(snap.x, x, atol=1e-12)

    def test_reproducible_bit_identical(self):
        sc = scenario_with(noise_power=0.5, seed=99)
        a = synthesize(sc, 7)
        b = synthesize(sc, 7)
        assert a.x.tobytes() == b.x.tobytes()
        assert a.d == b.d

    def test_order_independent(self):
        sc = scenario_with(noise_power=0.5, seed=99)
        direct = synthesize(sc, 3).x
        for n in (9, 1, 4):
            synthesize(sc, n)
        assert synthesize(sc, 3).x.tobytes() == direct.tobytes()

    def test_symbol_waveform_unit_modulus_and_deterministic(self):
        sc = scenario_with(
            num_elements=1,
            sources=(Source("desired", 0.0, "symbols", amplitude=2.0),),
        )
        seen = set()
        for n in range(50):
            d = synthesize(sc, n).d
            assert abs(d) == pytest.approx(2.0, abs=1e-12)
            seen.add(complex(round(d.real, 9), round(d.imag, 9)))
        assert len(seen) > 1
        assert synthesize(sc, 13).d == synthesize(sc, 13).d

    def test_noise_power_matches_configuration(self):
        # >= 1e5 noise samples: 50 elements x 2000 snapshots.
        sc = scenario_with(
            num_elements=50,
            noise_power=2.5,
            sources=(Source("desired", 0.0, "sinusoid", 0.1, 0.0),),
            seed=5,
        )
        total = 0.0
        count = 0
        for n in range(2000):
            x = synthesize(sc, n).x
            total += float(np.sum(np.abs(x) ** 2))
            count += x.size
        assert count >= 1e5
        assert total / count == pytest.approx(2.5, rel=0.03)

    def test_missing_desired_source_rejected(self):
        with pytest.raises(ValueError, match="desired"):
            synthesize(scenario_with(sources=(Source("interferer", 0.1),)), 0)


class TestScenarioIO:
    def test_json_roundtrip(self, tmp_path):
        sc = default_scenario()
        path = tmp_path / "scenario.json"
        sc.to_json_file(path)
        assert Scenario.from_json_file(path) == sc

    def test_shipped_scenario_file_matches_default(self):
        from wlansim.cli import _default_scenario_path

        shipped = Scenario.from_json_file(_default_scenario_path())
        assert shipped == default_scenario()

    def test_validation_messages_name_the_field(self, tmp_path):
        data = default_scenario().to_dict()
        data["iterations"] = 0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError, match="iterations"):
            Scenario.from_json_file(path)

    def test_missing_field_reported(self, tmp_path):
        data = default_scenario().to_dict()
        del data["seed"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError, match="seed"):
            Scenario.from_json_file(path)

    def test_source_angle_range_enforced(self):
        with pytest.raises(ValueError, match="angle"):
            Source("desired", math.pi / 2)


class TestArrayPattern:
    def test_uniform_weights_peak_at_broadside(self):
        n = 8
        cfg = ArrayConfig(n)
        pattern = array_pattern(np.ones(n) / n, cfg, [0.0])
        assert pattern[0][1] == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_weights_hit_gain_floor(self):
        cfg = ArrayConfig(2, 0.5)
        # w orthogonal to a(0) = [1, 1].
        w = np.array([1.0, -1.0]) / 2
        pattern = array_pattern(w, cfg, [0.0])
        assert pattern[0][1] == GAIN_FLOOR_DB

    def test_two_element_first_null_by_scan_oracle(self):
        cfg = ArrayConfig(2, 0.5)
        w = np.ones(2) / 2
        grid = np.linspace(0, math.pi / 2 - 1e-6, 20001)
        gains = [g for _, g in array_pattern(w, cfg, grid)]
        null_theta = grid[int(np.argmin(gains))]
        # First null of a 2-element half-wave array: sin(theta) = 1/(2*spacing).
        assert math.sin(null_theta) == pytest.approx(1.0 / (2 * 0.5), abs=1e-3)

    def test_peak_at_steered_angle(self):
        cfg = ArrayConfig(8, 0.5)
        theta0 = 0.6
        w = steering_vector(theta0, cfg) / 8
        grid = np.linspace(-math.pi / 2, math.pi / 2, 2001)
        pattern = array_pattern(w, cfg, grid)
        angles = [a for a, _ in pattern]
        gains = [g for _, g in pattern]
        peak = angles[int(np.argmax(gains))]
        step = grid[1] - grid[0]
        assert abs(peak - theta0) <= step

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            array_pattern(np.ones(3), ArrayConfig(4), [0.0])
