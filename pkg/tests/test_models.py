import numpy as np
import pytest

from adialab import (
    DimensionMismatchError,
    InvalidParamsError,
    NonMonotoneTimesError,
    NotHermitianError,
    RotatingModelParams,
    SourceWindowError,
    propagate,
    rotating_coupling,
    rotating_eigenspinors,
    rotating_exact_propagator,
    rotating_hamiltonian,
    sampled_hamiltonian,
)
from adialab.linalg import frobenius, unitarity_defect
from adialab.models import rotating_effective_hamiltonian
from adialab.propagation import TimeGrid

from conftest import grid_for

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0 + 0j, -1.0])


class TestParams:
    def test_valid(self):
        p = RotatingModelParams(2.0, 0.3, 1.1)
        assert p.omega0 == 2.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega0=0.0, omega=0.1, theta=0.5),
            dict(omega0=-1.0, omega=0.1, theta=0.5),
            dict(omega0=1.0, omega=-0.1, theta=0.5),
            dict(omega0=1.0, omega=0.1, theta=-0.1),
            dict(omega0=1.0, omega=0.1, theta=3.2),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParamsError):
            RotatingModelParams(**kwargs)


class TestRotatingHamiltonian:
    def test_theta_zero_is_static_sigma_z(self):
        src = rotating_hamiltonian(RotatingModelParams(1.0, 0.3, 0.0))
        for t in (0.0, 2.0, 17.0):
            assert frobenius(src(t) + 0.5 * SIGMA_Z) <= 1e-15

    def test_equator_at_time_zero(self):
        src = rotating_hamiltonian(RotatingModelParams(1.0, 0.3, np.pi / 2))
        assert frobenius(src(0.0) + 0.5 * SIGMA_X) <= 1e-15

    def test_eigenvalues_constant(self):
        src = rotating_hamiltonian(RotatingModelParams(1.5, 0.2, 1.0))
        for t in (0.0, 3.3, 11.0):
            assert np.allclose(np.linalg.eigvalsh(src(t)), [-0.75, 0.75], atol=1e-14)


class TestExactPropagator:
    def test_identity_at_zero(self, fast_drive):
        assert np.allclose(rotating_exact_propagator(fast_drive[0], 0.0), np.eye(2))

    def test_effective_splitting_formula(self):
        for theta in (0.01, 0.7, np.pi / 2, 2.5):
            p = RotatingModelParams(1.0, 0.2, theta)
            ev = np.linalg.eigvalsh(rotating_effective_hamiltonian(p))
            assert ev[1] - ev[0] == pytest.approx(p.splitting_frequency, abs=1e-13)

    def test_matches_integrator(self, fast_drive):
        p, src = fast_drive
        grid = TimeGrid(0.0, 1e-4, 73000)  # t = 7.3
        trace = propagate(src, grid)
        assert frobenius(trace.U[-1] - rotating_exact_propagator(p, 7.3)) <= 1e-8

    def test_unitary(self, fast_drive):
        for t in (0.3, 5.0, 40.0):
            assert unitarity_defect(rotating_exact_propagator(fast_drive[0], t)) <= 1e-13

    def test_corotating_group_property(self, fast_drive):
        from adialab import expm_hermitian

        heff = rotating_effective_hamiltonian(fast_drive[0])
        t1, t2 = 1.7, 4.1
        left = expm_hermitian(heff, t1) @ expm_hermitian(heff, t2)
        assert frobenius(left - expm_hermitian(heff, t1 + t2)) <= 1e-12

    def test_splitting_approaches_omega0_for_slow_drive(self):
        for theta in (0.0, 0.7, np.pi / 2, 3.0):
            p = RotatingModelParams(1.0, 0.01, theta)
            assert abs(p.splitting_frequency - 1.0) <= 0.011


class TestEigenspinors:
    def test_theta_zero_is_computational_basis(self):
        p = RotatingModelParams(1.0, 0.3, 0.0)
        for t in (0.0, 2.0):
            plus, minus = rotating_eigenspinors(p, t)
            assert np.allclose(plus, [1.0, 0.0], atol=1e-15)
            assert np.allclose(minus, [0.0, 1.0], atol=1e-15)

    def test_eigen_equation(self, fast_drive):
        # With the -(omega0/2) prefactor of the model, the field-aligned
        # 'plus' spinor is the ground state: h|+> = -(omega0/2)|+>.
        p, src = fast_drive
        for t in (0.0, 0.9, 6.2):
            plus, minus = rotating_eigenspinors(p, t)
            h = src(t)
            assert np.linalg.norm(h @ plus - (-0.5 * p.omega0) * plus) <= 1e-12
            assert np.linalg.norm(h @ minus - (+0.5 * p.omega0) * minus) <= 1e-12

    def test_parallel_transport_gauge_order(self, fast_drive):
        # |<n(t)|n(t+dt)> - 1| must shrink as O(dt^2).
        p, _ = fast_drive
        t = 1.3
        devs = []
        for dt in (1e-3, 5e-4):
            plus_now, _ = rotating_eigenspinors(p, t)
            plus_next, _ = rotating_eigenspinors(p, t + dt)
            devs.append(abs(np.vdot(plus_now, plus_next) - 1.0))
        assert 3.5 <= devs[0] / devs[1] <= 4.5

    def test_orthonormal_everywhere(self):
        for theta in (0.0, 0.4, np.pi / 2, 2.8, np.pi):
            p = RotatingModelParams(1.0, 0.2, theta)
            for t in (0.0, 1.0, 9.7):
                plus, minus = rotating_eigenspinors(p, t)
                assert abs(np.linalg.norm(plus) - 1.0) <= 1e-13
                assert abs(np.linalg.norm(minus) - 1.0) <= 1e-13
                assert abs(np.vdot(plus, minus)) <= 1e-13


class TestRotatingCoupling:
    def test_theta_zero_vanishes(self):
        p = RotatingModelParams(1.0, 0.3, 0.0)
        assert rotating_coupling(p, 2.2) == 0.0

    def test_constant_magnitude(self, fast_drive):
        p, _ = fast_drive
        ts = np.linspace(0.0, 50.0, 100)
        mags = np.abs(rotating_coupling(p, ts))
        assert np.allclose(mags, 0.5 * p.omega * np.sin(p.theta), atol=1e-15)

    def test_matches_finite_difference_of_spinors(self, fast_drive):
        p, _ = fast_drive
        dt = 1e-4
        for t in (0.4, 3.0):
            plus, _ = rotating_eigenspinors(p, t)
            _, minus_next = rotating_eigenspinors(p, t + dt)
            _, minus_prev = rotating_eigenspinors(p, t - dt)
            fd = -1j * np.vdot(plus, (minus_next - minus_prev) / (2 * dt))
            assert abs(fd - rotating_coupling(p, t)) <= 1e-6


class TestSampledHamiltonian:
    def test_constant_from_identical_samples(self):
        M = 0.5 * SIGMA_Z
        src = sampled_hamiltonian([(0.0, M), (1.0, M)])
        assert np.allclose(src(0.37), M, atol=1e-16)

    def test_matches_parametric_source(self, fast_drive):
        p, parametric = fast_drive
        ts = np.arange(0, 2001) * 1e-3
        samples = [(float(t), parametric(t)) for t in ts[::1]]
        sampled = sampled_hamiltonian(samples)
        grid = grid_for(2.0, 1e-3)
        U_param = propagate(parametric, grid).U[-1]
        U_sampled = propagate(sampled, grid).U[-1]
        assert frobenius(U_param - U_sampled) <= 1e-6

    def test_out_of_window(self):
        src = sampled_hamiltonian([(0.0, SIGMA_Z), (1.0, SIGMA_Z)])
        with pytest.raises(SourceWindowError):
            src(1.2)

    def test_non_monotone_times(self):
        with pytest.raises(NonMonotoneTimesError):
            sampled_hamiltonian([(0.0, SIGMA_Z), (0.0, SIGMA_Z)])

    def test_non_hermitian_sample(self):
        bad = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(NotHermitianError):
            sampled_hamiltonian([(0.0, bad), (1.0, bad)])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            sampled_hamiltonian([(0.0, SIGMA_Z), (1.0, np.eye(3))])
