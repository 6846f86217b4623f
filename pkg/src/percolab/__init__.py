"""percolab: bond percolation and first-passage percolation laboratory.

A numpy/scipy library for measuring when giant components emerge in bond
percolation on finite weighted graphs: Monte Carlo ensembles with
reproducible parallel streams, exact hitting-time tables on small graphs,
closed-form limit laws for the coupled counterexample graphs, and
first-passage spreading with its variance bounds.
"""

from .components import ComponentTracker
from .exact import (
    HittingTable,
    exact_hitting_table,
    mc_submultiplicativity,
    verify_coupling_bound,
    verify_monotone,
)
from .fpp import (
    DiameterEstimate,
    FirstPassageField,
    PassageSolver,
    diameter_product_scan,
    estimate_passage_diameter,
    first_passage,
    min_weight,
    variance_bound_report,
)
from .graphs import (
    EdgeListParseError,
    GenerationError,
    GraphValidationError,
    InvalidSizeError,
    WeightedGraph,
    from_edge_tuples,
    make_complete,
    make_coupled_complete,
    make_line_exp,
    make_random_regular,
    make_torus,
    parse_edge_list,
    serialize_edge_list,
)
from .limits import (
    ReachTimeLaw,
    coupled_reach_time_law,
    giant_fraction,
    giant_fraction_inverse,
    merge_time_cdf,
    merge_time_quantile,
    sample_merge_time,
)
from .montecarlo import (
    CurveEstimate,
    ExperimentSpec,
    SummaryStats,
    concentration_scan,
    estimate_curve,
    hitting_time_samples,
    omega_sweep,
    run_ensemble,
    variance_standard_error,
)
from .percolation import (
    MergeTrace,
    PercolationTrajectory,
    ThresholdError,
    merge_trace,
    open_times_from_uniform,
    run_trajectory,
    sample_open_times,
    threshold_from_fraction,
    threshold_from_omega,
)
from .reports import CheckReport
from .rng import philox_key, replicate_rng, spawn_generator

__version__ = "0.1.0"
