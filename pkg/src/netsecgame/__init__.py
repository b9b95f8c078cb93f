"""Monitor placement games on Laplacian consensus networks."""

from .game import (
    Equilibrium,
    InfeasibleGameError,
    PayoffFormatError,
    PayoffMatrix,
    build_payoff_matrix,
    expected_payoff,
    load_table1,
    read_payoff_csv,
    solve_zero_sum,
    verify_saddle,
    write_payoff_csv,
)
from .graph import (
    Graph,
    GraphError,
    GraphFormatError,
    algebraic_monitor_condition,
    distance,
    feasible_monitor_set,
    load_graph,
)
from .lti import (
    AttackScenario,
    VertexRole,
    ZeroSet,
    build_scenario,
    characteristic_polynomial,
    check_no_closed_positive_real_zeros,
    invariant_zeros,
    numerator_polynomial,
    relative_degree,
)
from .oog import Feasibility, GainResult, grid_gain_oracle, magnitude_squared, output_to_output_gain
from .polynomial import Polynomial
from .sim import AttackSignal, SimulationTrace, UnstableStepError, energy_ratio_sweep, simulate, stealthiness

__version__ = "0.1.0"
