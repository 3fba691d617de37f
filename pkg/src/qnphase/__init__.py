"""Phase estimation with a randomly coupled quantum network.

A two-mode resource state picks up a phase, interacts with a network of
two-level nodes under one of three coupling types (with optional decay,
dephasing and depolarizing noise), and the node occupations are combined by a
ridge-trained linear readout to retrieve the phase. The harness reproduces the
precision-scaling experiments (standard quantum limit, Heisenberg limit, and
the quantum Cramer-Rao comparison).
"""

from .hilbert import (
    DensityMatrix,
    HilbertSpace,
    ModeSpec,
    Operator,
    annihilation,
    basis_ket,
    boson,
    creation,
    density_from_ket,
    number_operator,
    pauli,
    qubit,
    standard_space,
)
from .network import (
    CouplingType,
    NetworkRealization,
    boson_truncation,
    build_hamiltonian,
    node_hamiltonian,
    sample_realization,
    total_excitation_operator,
)
from .evolution import (
    ChannelBoundError,
    EvolutionPlan,
    NoiseConfig,
    PositivityError,
    Trajectory,
    apply_decay,
    apply_dephasing,
    apply_depolarizing,
    default_plan,
    evolve,
    evolve_cascading,
    integrate_occupations,
    unitary_step,
)
from .resources import (
    ResourceSpec,
    coherence,
    dephase_fock,
    embed_input_state,
    encode_phase,
    input_space,
    make_resource,
    negativity,
    qfi,
)
from .measurement import ShotModel, sample_bernoulli, sample_bernoulli_array, sample_gaussian
from .readout import (
    EvaluationSet,
    FeatureMap,
    ReadoutModel,
    TrainingSet,
    build_training_set,
    default_lambda_grid,
    estimate_phases,
    predict,
    retrieve_phase,
    select_lambda,
    target_signal,
    train,
)
from .metrics import PhaseErrorReport, SqlHlRatio, phase_error, qcr_bound, sql_hl_ratio
from .family import FamilyOccupations, PhaseFamily, evolve_phase_family, family_state, input_phase_family
from .config import ConfigError, LambdaPolicy, ScenarioConfig, SweepSpec, config_hash, load_config_file, parse_scenario
from .harness import ExperimentResult, QcrSearchResult, run_qcr_search, run_scenario

__version__ = "0.1.0"
