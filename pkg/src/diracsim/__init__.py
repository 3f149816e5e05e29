"""Simulation of 1+1 dimensional Dirac dynamics on a driven qubit-resonator
system: frame-resolved Hamiltonians, unitary propagation, trajectory and
Wigner-function observables, closed-form position analytics, and a scenario
registry with a config-driven command line interface."""

from .errors import (
    ConfigError,
    DegenerateMassError,
    DimensionError,
    DiracSimError,
    GridTooSmallError,
    NoPeakError,
    NonHermitianError,
    ParseError,
    SingularHError,
    TruncationError,
    ValidationError,
)
from .hilbert import (
    Operator,
    QubitFieldState,
    FieldDensityMatrix,
    TruncationSpec,
    coherent_state,
    displacement_op,
    joint_state,
    ladder_ops,
    load_state,
    number_op,
    parity_op,
    quadrature_ops,
    qubit_ops,
    save_state,
    spin_vector,
    tensor,
)
from .hamiltonians import (
    DiracParams,
    DriveParams,
    build_effective,
    build_fw_hamiltonian,
    build_fw_unitary,
    build_interaction,
    build_l1,
    build_lab,
    build_nonrel,
    joint_x_p,
    mhz,
)
from .propagation import (
    TimeGrid,
    evolve_fw,
    frame_map_interaction_to_l1,
    frame_map_l1_to_interaction,
    frame_map_l1_to_lab,
    frame_map_lab_to_l1,
    propagate_td,
    propagate_ti,
    propagate_ti_sampled,
)
from .observables import (
    Trajectory,
    WignerMap,
    expectation,
    record_trajectory,
    reduce_field,
    trajectory_from_states,
    wigner_map,
    write_trajectory_csv,
    write_wigner_csv,
)
from .analytics import (
    HeisenbergPosition,
    fw_position,
    klein_short_time,
    series_propagator,
    x_heisenberg,
    zbw_frequency,
)
from .scenarios import (
    SCENARIOS,
    ScenarioConfig,
    config_for_scenario,
    parse_config,
    run_scenario,
    scenario_params,
    sweep_rwa,
)
from .checks import CheckReport, run_checks

__version__ = "0.1.0"
