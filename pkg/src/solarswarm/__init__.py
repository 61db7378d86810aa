"""solarswarm: robust multiobjective sizing of a solar irrigation pump.

Pipeline: a monthly climate table feeds interval type-2 fuzzy models of
temperature and insolation noise; alpha-plane cuts turn membership grades
into crisp noise intervals; a bacterial foraging swarm maximizes weighted
sums of three pump response surfaces over design and noise jointly; a
weight-grid sweep assembles the Pareto frontier, scored by dominance and
sigma-line diversity.
"""

from .bfa import (
    BfaConfig,
    BoxFunction,
    RunResult,
    RunTrace,
    Swarm,
    eliminate_disperse,
    reproduce,
    run_bfa,
    sphere_function,
)
from .climate import (
    ClimateTable,
    MonthlyClimateRecord,
    annual_extrema,
    builtin_table,
    load_climate_csv,
    monthly_interval,
    parse_climate_csv,
    serialize_climate_csv,
)
from .fuzzy import (
    AlphaPlane,
    CredibilityLevel,
    FootprintOfUncertainty,
    SCurveParams,
    Type2FuzzyVariable,
    alpha_plane_cut,
    build_type2_model,
    defuzzify_interval,
    fit_scurve,
    fou_bounds,
    grade_pair,
    sample_fou,
    scurve_grade,
    scurve_invert,
    type_reduce,
)
from .irrigation import (
    DesignVector,
    IrrigationFitness,
    NoiseVector,
    ObjectiveTriple,
    ProblemSpec,
    WeightVector,
    aggregate,
    design_bounds,
    eval_objectives,
    feasible,
    noise_interval_from_grades,
)
from .pareto import (
    Frontier,
    GradeContext,
    SigmaVector,
    SolutionPoint,
    build_frontier,
    compute_metrics,
    derive_seed,
    diversity_metric,
    frontier_dominance,
    nondominated_filter,
    rank_solutions,
    read_frontier_csv,
    reference_sigma_lines,
    sigma_components,
    weight_grid,
    write_frontier_csv,
)

__version__ = "0.1.0"
