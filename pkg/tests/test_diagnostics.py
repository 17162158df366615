import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adialab import (
    RotatingModelParams,
    TooFewSamplesError,
    adiabatic_propagator,
    build_eigenframe,
    dominant_frequency,
    fidelity_trace,
    nu_check,
    propagate,
    resonance_report,
    rotating_hamiltonian,
)
from adialab.errors import NotNormalizedError
from adialab.propagation import TimeGrid

from conftest import grid_for


class TestDominantFrequency:
    def test_pure_negative_tone(self):
        ts = np.arange(4096) * 0.01
        bin_width = 2 * np.pi / (4096 * 0.01)
        got = dominant_frequency(np.exp(-1j * 3.0 * ts), 0.01)
        assert abs(got - (-3.0)) <= bin_width

    def test_positive_tone_sign(self):
        ts = np.arange(2048) * 0.05
        bin_width = 2 * np.pi / (2048 * 0.05)
        assert abs(dominant_frequency(np.exp(1j * 1.7 * ts), 0.05) - 1.7) <= bin_width

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamplesError):
            dominant_frequency(np.ones(63, dtype=complex), 0.1)

    @settings(max_examples=30, deadline=None)
    @given(
        st.floats(0.0, 2 * np.pi),
        st.floats(0.01, 100.0),
    )
    def test_invariance_under_phase_and_scale(self, phase, scale):
        ts = np.arange(1024) * 0.02
        sig = np.exp(1j * 2.5 * ts)
        bin_width = 2 * np.pi / (1024 * 0.02)
        base = dominant_frequency(sig, 0.02)
        modified = dominant_frequency(scale * np.exp(1j * phase) * sig, 0.02)
        assert abs(base - modified) <= bin_width

    def test_forward_frame_term_frequency(self, slow_drive):
        # Dressed coupling A_{10} e^{+i omega0 t}: with the model's
        # -(omega0/2) prefactor, the dressed pair signal sits at
        # +/-(omega0 + omega cos theta).
        p, src = slow_drive
        grid = grid_for(16 * 2 * np.pi / p.omega, 0.5)
        frame = build_eigenframe(src, grid)
        from adialab import coupling_series

        A = coupling_series(frame)[1:-1]
        P = frame.phase_integrals[1:-1]
        signal = A[:, 0, 1] * np.exp(1j * (P[:, 0] - P[:, 1]))
        got = dominant_frequency(signal, grid.dt)
        expected = -(p.omega0 + p.omega * np.cos(p.theta))
        bin_width = 2 * np.pi / (signal.shape[0] * grid.dt)
        assert abs(got - expected) <= bin_width

    def test_dual_frame_term_frequency(self, slow_drive):
        # Bare coupling alone: (omega/2) sin(theta) e^{-i omega cos(theta) t}.
        p, src = slow_drive
        grid = grid_for(16 * 2 * np.pi / p.omega, 0.5)
        frame = build_eigenframe(src, grid)
        from adialab import coupling_series

        signal = coupling_series(frame)[1:-1, 0, 1]
        got = dominant_frequency(signal, grid.dt)
        expected = -p.omega * np.cos(p.theta)
        bin_width = 2 * np.pi / (signal.shape[0] * grid.dt)
        assert abs(got - expected) <= bin_width


@pytest.fixture(scope="module")
def dichotomy_frame(slow_drive):
    p, src = slow_drive
    grid = grid_for(16 * 2 * np.pi / p.omega, 0.5)
    return p, build_eigenframe(src, grid)


class TestResonanceReport:
    def test_forward_frame_adiabatic(self, dichotomy_frame):
        p, frame = dichotomy_frame
        rep = resonance_report(frame, "forward")
        assert rep.verdict == "adiabatic"
        assert rep.verdict_ratio <= 0.01
        expected = p.omega * np.sin(p.theta) / (p.omega0 + p.omega * np.cos(p.theta))
        assert rep.verdict_ratio == pytest.approx(expected, rel=0.05)

    def test_dual_frame_resonant_tan_theta(self, dichotomy_frame):
        p, frame = dichotomy_frame
        rep = resonance_report(frame, "dual")
        assert rep.verdict == "resonant"
        assert rep.verdict_ratio == pytest.approx(np.tan(p.theta), rel=0.05)

    def test_small_tilt_dual_adiabatic(self):
        p = RotatingModelParams(1.0, 0.01, 0.01)
        frame = build_eigenframe(
            rotating_hamiltonian(p), grid_for(16 * 2 * np.pi / p.omega, 0.5)
        )
        rep = resonance_report(frame, "dual")
        assert rep.verdict == "adiabatic"
        assert rep.verdict_ratio == pytest.approx(np.tan(p.theta), rel=0.1)

    def test_verdict_threshold_is_configurable(self, dichotomy_frame):
        _, frame = dichotomy_frame
        loose = resonance_report(frame, "dual", threshold=2.0)
        assert loose.verdict == "adiabatic"

    def test_gap_and_coupling_fields(self, dichotomy_frame):
        p, frame = dichotomy_frame
        rep = resonance_report(frame, "dual")
        assert rep.gap == pytest.approx(p.omega0, abs=1e-10)
        assert rep.coupling_magnitude == pytest.approx(
            0.5 * p.omega * np.sin(p.theta), rel=1e-4
        )
        assert rep.pairs[0].rabi_frequency == pytest.approx(
            2 * rep.coupling_magnitude, abs=0
        )

    def test_mode_validation(self, dichotomy_frame):
        with pytest.raises(ValueError):
            resonance_report(dichotomy_frame[1], "sideways")


class TestFidelityTrace:
    def test_self_fidelity_is_one(self, fast_drive_frame):
        _, _, grid, trace, _ = fast_drive_frame
        psi0 = np.array([1.0, 0.0], dtype=complex)
        _, fids = fidelity_trace(trace, lambda k: trace.U[k], psi0)
        # Deviation from 1 is bounded by twice the unitarity drift.
        assert np.abs(fids - 1.0).max() <= 4.0 * trace.max_unitarity_residual

    def test_adiabatic_fidelity_slow_drive(self, slow_drive):
        p, src = slow_drive
        grid = grid_for(2 * np.pi / p.omega, 0.02)
        trace = propagate(src, grid)
        frame = build_eigenframe(src, grid)
        psi0 = frame.vectors[0][:, 0]
        ts, fids = fidelity_trace(trace, lambda k: adiabatic_propagator(frame, k), psi0)
        assert fids.min() >= 0.999
        assert ts.shape == fids.shape

    def test_rejects_unnormalized(self, fast_drive_frame):
        _, _, _, trace, _ = fast_drive_frame
        with pytest.raises(NotNormalizedError):
            fidelity_trace(trace, lambda k: trace.U[k], np.array([1.0, 1.0]))


class TestNuCheck:
    def test_static_drive_is_dc_only(self):
        p = RotatingModelParams(1.0, 0.0, np.pi / 4)
        src = rotating_hamiltonian(p)
        trace = propagate(src, TimeGrid(0.0, 0.05, 2000))
        result = nu_check(src, trace)
        assert result.dc_only
        assert result.measured is None

    def test_moderate_drive_peak(self, fast_drive):
        p, src = fast_drive
        trace = propagate(src, grid_for(40 * np.pi, 0.01))
        result = nu_check(src, trace)
        assert result.predicted == pytest.approx(np.sqrt(1 + 0.01 + 0.2 * np.cos(np.pi / 4)))
        assert result.passed
        assert abs(result.measured - result.predicted) <= result.bin_width

    def test_slow_drive_peak_approaches_splitting(self, slow_drive):
        p, src = slow_drive
        trace = propagate(src, grid_for(2 * 2 * np.pi / p.omega, 0.05))
        result = nu_check(src, trace)
        assert abs(result.measured - p.omega0) <= 0.011

    def test_off_diagonal_element(self, fast_drive):
        p, src = fast_drive
        trace = propagate(src, grid_for(40 * np.pi, 0.01))
        result = nu_check(src, trace, element=(0, 1))
        assert result.measured is not None

    def test_sampled_source_has_no_prediction(self):
        from adialab.verification import random_smooth_source

        src = random_smooth_source(5, t_end=30.0, dt=0.05)
        trace = propagate(src, TimeGrid(0.0, 0.05, 600))
        result = nu_check(src, trace)
        assert result.predicted is None
        assert result.passed is None
        assert result.measured is not None
