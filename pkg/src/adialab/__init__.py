"""adialab: exact propagation of driven Hamiltonians and their duals.

A driven Hamiltonian h(t) generates an evolution U(t); the dual
Hamiltonian -U^dag h U generates the reversed evolution U^dag(t). This
package propagates both exactly (unitary geometric stepping), builds
instantaneous eigenframes in the parallel-transport gauge, constructs
the classic approximations to U^dag and the operator identity relating
them, and quantifies when each moving-frame equation is off-resonance.
"""

from .diagnostics import (
    NuCheckResult,
    PairResonance,
    ResonanceReport,
    SpectralPeak,
    dominant_frequency,
    fidelity_trace,
    nu_check,
    resonance_report,
)
from .duality import (
    DualEigenFrame,
    build_dual_frame,
    dual_adiabatic_propagator,
    dual_approx_conjugated,
    dual_approx_generator,
    dual_generator_source,
    equivalence_residual,
    equivalence_residual_series,
    inconsistency_distance_series,
    inconsistency_operator,
    static_phase_evolution,
)
from .errors import (
    AdialabError,
    BranchMatchError,
    ConfigError,
    DegenerateSpectrumError,
    DimensionMismatchError,
    EigenResidualError,
    GridMismatchError,
    InvalidParamsError,
    NoConvergenceError,
    NonMonotoneTimesError,
    NotHermitianError,
    NotNormalizedError,
    NumericalFailure,
    SourceWindowError,
    TooFewSamplesError,
)
from .frames import (
    CouplingMatrix,
    EigenFrame,
    FrameAmplitudes,
    adiabatic_propagator,
    build_eigenframe,
    coupling_matrix,
    coupling_series,
    dual_coupling,
    integrate_dual_frame,
    integrate_forward_frame,
    reconstruct_state,
    state_fidelity,
)
from .linalg import (
    EigenDecomposition,
    check_hermitian,
    eig_hermitian,
    expm_hermitian,
    operator_distance,
    spectral_distance,
    unitarity_defect,
)
from .models import (
    RotatingModelParams,
    rotating_coupling,
    rotating_effective_hamiltonian,
    rotating_eigenspinors,
    rotating_exact_propagator,
    rotating_hamiltonian,
    sampled_hamiltonian,
)
from .propagation import (
    HamiltonianSource,
    PropagatorTrace,
    TimeGrid,
    dual_hamiltonian_at,
    dual_source,
    propagate,
)
from .scenarios import (
    ScenarioConfig,
    ScenarioReport,
    load_sampled_file,
    run_scenario,
    sweep_scenario,
    write_sampled_file,
)
from .verification import run_verification

__version__ = "0.1.0"
