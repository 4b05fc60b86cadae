"""Local adiabatic gauge potentials for the mixed-field Ising chain.

Exact translation-invariant Pauli-string algebra, variational gauge-potential
solves, closed-form perturbative oracles near the classical line, a dense
finite-chain backend, driven state-preparation dynamics, and coupling-plane
landscape sweeps.
"""

from .ansatz import AnsatzBasis, AdjointSystem, assemble, build_basis
from .dynamics import (
    CdConfig,
    EvolutionResult,
    RampProtocol,
    basis_state,
    dark_state_library,
    dress,
    evolve,
    sweep_rate,
)
from .exact import (
    DenseOperator,
    SpectrumData,
    dense_vagp,
    energy_variance,
    exact_agp,
    materialize,
    materialize_sparse,
    mid_spectrum_state,
    spectrum,
)
from .landscape import (
    FlowField,
    Streamline,
    compute_field,
    coefficient_scan,
    gamma_sweep,
    integrate_streamline,
    norm_scan,
    singular_points,
)
from .pauli import (
    PauliWord,
    TransOp,
    build_hamiltonian,
    trans_commutator,
    trans_inner,
    word_product,
)
from .vagp import (
    DegenerateSystemError,
    LifetimeResult,
    OptimalDirection,
    VagpSolution,
    direction_operator,
    lifetime,
    optimal_angle,
    radial_angle,
    solve,
)

__version__ = "0.1.0"
