"""Named invariant checks behind the ``verify`` command.

Each check re-derives one headline claim from scratch at pinned
parameters and tolerances and reports a single pass/fail line. The fast
level covers the two-level scenarios and finishes well inside a minute;
the full level adds random 4x4 sampled Hamiltonians and convergence
order studies.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .diagnostics import nu_check, resonance_report, fidelity_trace
from .duality import (
    build_dual_frame,
    dual_adiabatic_propagator,
    dual_generator_source,
    equivalence_residual_series,
    inconsistency_distance_series,
    inconsistency_operator,
)
from .frames import (
    adiabatic_propagator,
    build_eigenframe,
    coupling_series,
    integrate_dual_frame,
    integrate_forward_frame,
)
from .linalg import eig_hermitian, frobenius, operator_distance
from .models import (
    RotatingModelParams,
    rotating_exact_propagator,
    rotating_hamiltonian,
    sampled_hamiltonian,
)
from .propagation import HamiltonianSource, TimeGrid, dual_source, propagate

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: str
    detail: str = ""
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return (
            f"[{status}] {self.name}: measured={self.measured:.6g} "
            f"bound={self.bound}{extra} [{self.elapsed:.1f}s]"
        )


def _grid(t_end: float, dt: float) -> TimeGrid:
    return TimeGrid(0.0, dt, max(1, int(round(t_end / dt))))


def _duality_error(src, grid) -> float:
    trace = propagate(src, grid)
    dual = propagate(dual_source(src, trace), grid)
    diff = dual.U - np.conj(np.swapaxes(trace.U, 1, 2))
    return float(np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2))).max())


def check_duality_roundtrip() -> CheckResult:
    """Propagating the dual generator reproduces U^dag, order-2 in dt."""
    t0 = time.perf_counter()
    src = rotating_hamiltonian(RotatingModelParams(1.0, 0.1, np.pi / 4))
    e1 = _duality_error(src, _grid(20 * np.pi, 1e-3))
    e2 = _duality_error(src, _grid(20 * np.pi, 5e-4))
    ratio = e1 / e2
    elapsed = time.perf_counter() - t0
    passed = e1 <= 1e-6 and 3.5 <= ratio <= 4.5 and elapsed < 5.0
    return CheckResult(
        "duality_roundtrip",
        passed,
        e1,
        "<=1e-06 and dt-halving ratio in [3.5, 4.5]",
        f"ratio={ratio:.3f}, runtime={elapsed:.2f}s<5s",
        elapsed,
    )


def check_equivalence_rotating() -> CheckResult:
    """W^dag = U^dag U_adia V^dag at every node, three tilt angles."""
    t0 = time.perf_counter()
    worst = 0.0
    for theta in (0.01, np.pi / 4, np.pi / 3):
        src = rotating_hamiltonian(RotatingModelParams(1.0, 0.1, theta))
        grid = _grid(4 * np.pi, 2e-3)
        trace = propagate(src, grid)
        frame = build_eigenframe(src, grid)
        worst = max(worst, float(equivalence_residual_series(trace, frame).max()))
    return CheckResult(
        "equivalence_identity_rotating",
        worst <= 1e-12,
        worst,
        "<=1e-12 at every node",
        "theta in {0.01, pi/4, pi/3}",
        time.perf_counter() - t0,
    )


def random_smooth_source(
    seed: int, dim: int = 4, t_end: float = 6.0, dt: float = 0.01
) -> HamiltonianSource:
    """Seeded smooth sampled Hamiltonian with well-separated levels.

    Unit static gaps plus a three-tone Hermitian perturbation of norm
    ~0.3, sampled on the evaluation grid.
    """
    rng = np.random.default_rng(seed)
    base = np.diag(np.arange(dim, dtype=complex))
    tones = []
    for j in range(1, 4):
        C = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        tones.append((j, 0.1 * C / np.linalg.norm(C)))
    times = np.arange(0, int(round(t_end / dt)) + 1) * dt
    samples = []
    for t in times:
        V = np.zeros((dim, dim), dtype=complex)
        for j, C in tones:
            ph = np.exp(1j * j * 0.25 * t)
            V += ph * C
        samples.append((float(t), base + V + V.conj().T))
    return sampled_hamiltonian(samples)


def check_equivalence_sampled() -> CheckResult:
    """The same exact identity on three random smooth 4x4 Hamiltonians."""
    t0 = time.perf_counter()
    worst = 0.0
    for seed in (11, 12, 13):
        src = random_smooth_source(seed)
        grid = _grid(6.0, 0.01)
        trace = propagate(src, grid)
        frame = build_eigenframe(src, grid)
        worst = max(worst, float(equivalence_residual_series(trace, frame).max()))
    return CheckResult(
        "equivalence_identity_sampled_4x4",
        worst <= 1e-12,
        worst,
        "<=1e-12 at every node",
        "seeds 11..13",
        time.perf_counter() - t0,
    )


def check_nu_spectral() -> CheckResult:
    """Dual-generator elements oscillate at the co-rotating splitting."""
    t0 = time.perf_counter()
    p1 = RotatingModelParams(1.0, 0.1, np.pi / 4)
    src1 = rotating_hamiltonian(p1)
    r1 = nu_check(src1, propagate(src1, _grid(40 * np.pi, 0.01)))
    ok1 = r1.passed is True

    p2 = RotatingModelParams(1.0, 0.01, np.pi / 4)
    src2 = rotating_hamiltonian(p2)
    r2 = nu_check(src2, propagate(src2, _grid(2 * TWO_PI / p2.omega, 0.05)))
    dev2 = abs(r2.measured - p2.omega0)
    ok2 = dev2 <= 0.011
    elapsed = time.perf_counter() - t0
    passed = ok1 and ok2 and elapsed < 10.0
    return CheckResult(
        "nu_spectral_peak",
        passed,
        r1.measured if r1.measured is not None else float("nan"),
        f"within one bin of {r1.predicted:.6f}; slow-drive peak within 0.011 of omega0",
        f"|peak-omega0|={dev2:.5f}, runtime={elapsed:.2f}s<10s",
        elapsed,
    )


def _resonance_frame(omega0, omega, theta) -> tuple:
    p = RotatingModelParams(omega0, omega, theta)
    grid = _grid(16 * TWO_PI / omega, 0.5)
    return p, build_eigenframe(rotating_hamiltonian(p), grid)


def check_resonance_dichotomy() -> CheckResult:
    """Forward frame adiabatic while the dual frame is resonant (tan theta)."""
    t0 = time.perf_counter()
    p, frame = _resonance_frame(1.0, 0.01, np.pi / 4)
    rh = resonance_report(frame, "forward")
    rd = resonance_report(frame, "dual")
    tan = np.tan(p.theta)
    ok = (
        rh.verdict == "adiabatic"
        and rh.verdict_ratio <= 0.01
        and rd.verdict == "resonant"
        and abs(rd.verdict_ratio - tan) <= 0.05 * tan
    )
    _, frame_small = _resonance_frame(1.0, 0.01, 0.01)
    rd_small = resonance_report(frame_small, "dual")
    ok = ok and rd_small.verdict == "adiabatic"
    return CheckResult(
        "resonance_dichotomy",
        ok,
        rd.verdict_ratio,
        "dual ratio = tan(theta) +/- 5%, forward ratio <= 0.01, small-tilt dual adiabatic",
        f"forward_ratio={rh.verdict_ratio:.5f}, dual_small={rd_small.verdict_ratio:.4f}",
        time.perf_counter() - t0,
    )


def _fidelity_pair(theta: float, omega: float = 0.01) -> tuple[float, float]:
    """(min forward fidelity, min dual fidelity) over one transfer period."""
    p = RotatingModelParams(1.0, omega, theta)
    src = rotating_hamiltonian(p)
    grid = _grid(TWO_PI / omega, 0.01)
    trace = propagate(src, grid)
    frame = build_eigenframe(src, grid)
    dual_trace = propagate(dual_source(src, trace), grid)
    psi_h = frame.vectors[0][:, 0]
    _, fid_h = fidelity_trace(trace, lambda k: adiabatic_propagator(frame, k), psi_h)
    psi_d = frame.vectors[0][:, -1]
    _, fid_d = fidelity_trace(
        dual_trace, lambda k: dual_adiabatic_propagator(trace, frame, k), psi_d
    )
    return float(fid_h.min()), float(fid_d.min())


def check_fidelity_limits() -> CheckResult:
    """Dual adiabatic fidelity: ~1 at small tilt, cos^2(theta) floor at pi/3."""
    t0 = time.perf_counter()
    h1, d1 = _fidelity_pair(0.01)
    h2, d2 = _fidelity_pair(np.pi / 4)
    h3, d3 = _fidelity_pair(np.pi / 3)
    ok = (
        d1 >= 0.999
        and abs(d3 - 0.25) <= 0.02
        and min(h1, h2, h3) >= 0.999
    )
    return CheckResult(
        "fidelity_limits",
        ok,
        d3,
        "dual >=0.999 at theta=0.01; =0.25+/-0.02 at pi/3; forward >=0.999 throughout",
        f"dual(0.01)={d1:.6f}, forward_min={min(h1, h2, h3):.6f}",
        time.perf_counter() - t0,
    )


def check_inconsistency_norm() -> CheckResult:
    """U_adia V^dag sits far from I while U U^dag stays at rounding level."""
    t0 = time.perf_counter()
    p = RotatingModelParams(1.0, 0.01, np.pi / 4)
    src = rotating_hamiltonian(p)
    grid = _grid(np.pi / p.omega, 0.01)
    trace = propagate(src, grid)
    frame = build_eigenframe(src, grid)
    dist = operator_distance(inconsistency_operator(frame, grid.steps), np.eye(2))
    direct = float(inconsistency_distance_series(frame)[-1])
    ok = (
        dist >= 0.5
        and abs(dist - direct) <= 1e-10
        and trace.max_unitarity_residual <= 1e-12
    )
    return CheckResult(
        "inconsistency_norm",
        ok,
        dist,
        ">=0.5 at t=pi/omega with unitarity <=1e-12",
        f"direct_construction={direct:.6f}, unitarity={trace.max_unitarity_residual:.2e}",
        time.perf_counter() - t0,
    )


def check_h2_repropagation() -> CheckResult:
    """Propagating the adiabatic generator reproduces U_adia^dag."""
    t0 = time.perf_counter()
    p = RotatingModelParams(1.0, 0.1, np.pi / 4)
    src = rotating_hamiltonian(p)
    grid = _grid(TWO_PI, 1e-4)
    frame = build_eigenframe(src, grid)
    gen = dual_generator_source(frame)
    trace = propagate(gen, grid)
    phases = np.exp(-1j * frame.phase_integrals)
    Ua = np.einsum(
        "kim,jm->kij", frame.vectors * phases[:, np.newaxis, :], frame.vectors[0].conj()
    )
    diff = trace.U - np.conj(np.swapaxes(Ua, 1, 2))
    err = float(np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2))).max())
    return CheckResult(
        "h2_repropagation",
        err <= 1e-6,
        err,
        "<=1e-06 at dt=1e-4",
        "",
        time.perf_counter() - t0,
    )


def check_structural_invariants() -> CheckResult:
    """Unitarity, eigen-reconstruction, coupling symmetry, norm conservation."""
    t0 = time.perf_counter()
    details = []

    p = RotatingModelParams(1.0, 0.01, np.pi / 3)
    src = rotating_hamiltonian(p)
    grid = _grid(1000.0, 0.01)  # 1e5 steps
    trace = propagate(src, grid)
    unit = trace.max_unitarity_residual
    details.append(f"unitarity={unit:.2e}")

    rng = np.random.default_rng(7)
    recon = 0.0
    for dim in range(2, 9):
        for _ in range(4):
            A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            H = 0.5 * (A + A.conj().T)
            dec = eig_hermitian(H)
            rebuilt = (dec.vectors * dec.values) @ dec.vectors.conj().T
            recon = max(recon, frobenius(rebuilt - H) / max(frobenius(H), 1.0))
    details.append(f"eig_reconstruction={recon:.2e}")

    frame = build_eigenframe(src, grid)
    A = coupling_series(frame)[1:-1]
    sym = float(np.abs(A - np.conj(np.swapaxes(A, 1, 2))).max())
    details.append(f"coupling_symmetry={sym:.2e}")

    phi0 = np.array([1.0, 0.0], dtype=complex)
    drift = 0.0
    for amps in (
        integrate_forward_frame(frame, phi0),
        integrate_dual_frame(frame, phi0),
    ):
        drift = max(drift, float(np.abs(amps.norms() - 1.0).max()))
    details.append(f"norm_drift_1e5_steps={drift:.2e}")

    ok = unit <= 1e-12 and recon <= 1e-12 and sym <= 1e-8 and drift <= 1e-10
    return CheckResult(
        "structural_invariants",
        ok,
        max(unit, recon, sym, drift),
        "unitarity<=1e-12, reconstruction<=1e-12, coupling symmetry<=1e-8, norm<=1e-10",
        ", ".join(details),
        time.perf_counter() - t0,
    )


def check_midpoint2_order() -> CheckResult:
    """Halving dt divides the midpoint-rule error by ~4 against the closed form."""
    t0 = time.perf_counter()
    p = RotatingModelParams(1.0, 0.1, np.pi / 4)
    src = rotating_hamiltonian(p)
    t_end = 12.56  # exactly divisible by both step sizes
    ref = rotating_exact_propagator(p, t_end)
    errs = []
    for dt in (0.02, 0.01):
        trace = propagate(src, _grid(t_end, dt))
        errs.append(operator_distance(trace.U[-1], ref))
    ratio = errs[0] / errs[1]
    return CheckResult(
        "midpoint2_order",
        3.5 <= ratio <= 4.5,
        ratio,
        "in [3.5, 4.5]",
        f"errors {errs[0]:.3e} -> {errs[1]:.3e}",
        time.perf_counter() - t0,
    )


def check_magnus4_gain() -> CheckResult:
    """Fourth-order stepping beats midpoint2 by >=100x at dt=1e-2."""
    t0 = time.perf_counter()
    p = RotatingModelParams(1.0, 0.1, np.pi / 4)
    src = rotating_hamiltonian(p)
    grid = _grid(4 * np.pi, 1e-2)
    ref = rotating_exact_propagator(p, grid.t_end)
    e2 = operator_distance(propagate(src, grid, "midpoint2").U[-1], ref)
    e4 = operator_distance(propagate(src, grid, "magnus4").U[-1], ref)
    gain = e2 / e4
    return CheckResult(
        "magnus4_gain",
        gain >= 100.0,
        gain,
        ">=100",
        f"midpoint2={e2:.3e}, magnus4={e4:.3e}",
        time.perf_counter() - t0,
    )


def check_double_dual() -> CheckResult:
    """The dual of the dual generator reproduces the forward evolution."""
    t0 = time.perf_counter()
    src = rotating_hamiltonian(RotatingModelParams(1.0, 0.1, np.pi / 4))
    grid = _grid(4 * np.pi, 1e-3)
    trace = propagate(src, grid)
    dual1 = dual_source(src, trace)
    trace1 = propagate(dual1, grid)
    dual2 = dual_source(dual1, trace1)
    trace2 = propagate(dual2, grid)
    diff = trace2.U - trace.U
    err = float(np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2))).max())
    return CheckResult(
        "double_dual",
        err <= 1e-6,
        err,
        "<=1e-06",
        "",
        time.perf_counter() - t0,
    )


def check_dual_frame_consistency() -> CheckResult:
    """Dual eigenframe residual and the dual-frame Rabi floor cos^2(theta)."""
    t0 = time.perf_counter()
    p = RotatingModelParams(1.0, 0.05, np.pi / 3)
    src = rotating_hamiltonian(p)
    grid = _grid(TWO_PI / p.omega, 0.01)
    trace = propagate(src, grid)
    frame = build_eigenframe(src, grid)
    dual_frame = build_dual_frame(trace, frame, src)
    amps = integrate_dual_frame(frame, np.array([1.0, 0.0]))
    floor = float((np.abs(amps.phi[:, 0]) ** 2).min())
    ok = dual_frame.max_eigen_residual <= 1e-9 and abs(floor - 0.25) <= 0.02
    return CheckResult(
        "dual_frame_consistency",
        ok,
        floor,
        "population floor = cos^2(pi/3) +/- 0.02, eigen residual <= 1e-9",
        f"eigen_residual={dual_frame.max_eigen_residual:.2e}",
        time.perf_counter() - t0,
    )


FAST_CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_duality_roundtrip,
    check_equivalence_rotating,
    check_nu_spectral,
    check_resonance_dichotomy,
    check_fidelity_limits,
    check_inconsistency_norm,
    check_h2_repropagation,
    check_structural_invariants,
)

FULL_CHECKS: tuple[Callable[[], CheckResult], ...] = FAST_CHECKS + (
    check_equivalence_sampled,
    check_midpoint2_order,
    check_magnus4_gain,
    check_double_dual,
    check_dual_frame_consistency,
)


def run_verification(level: str = "fast", echo=print) -> list[CheckResult]:
    """Run the named checks at the given level, printing one line each."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    checks = FAST_CHECKS if level == "fast" else FULL_CHECKS
    results = []
    for fn in checks:
        result = fn()
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results
