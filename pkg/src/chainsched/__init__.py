"""Single-machine scheduling with release times, deadlines and precedence chains."""

from chainsched.baselines import (
    EddReport,
    OracleResult,
    canonicalize_schedule,
    drop_precedence_if_chain_uniform,
    edd_schedule,
    oracle_solve,
    rescale_simultaneous_releases,
    solve_single_window,
)
from chainsched.decompose import (
    ChainDecomposition,
    ClosureMatrix,
    min_chain_decomposition,
    prec_consistent,
    proper_level,
    transitive_closure,
    width,
)
from chainsched.model import (
    FeasibilityReport,
    Instance,
    InstanceStats,
    Job,
    Objective,
    Schedule,
    instance_stats,
    validate_instance,
    validate_schedule,
)
from chainsched.reduction import (
    ShuffleInstance,
    ShuffleWitness,
    certify_reduction,
    construct_1,
    construct_2,
    enumerate_shuffle,
    shuffle_member,
)
from chainsched.solver import (
    DpTable,
    SolveResult,
    reconstruct_schedule,
    solve_chain_dp,
    solve_width_dp,
)

__version__ = "0.1.0"
