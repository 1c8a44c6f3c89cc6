"""flipline: self-stabilizing lattice-path flip dynamics.

A chain of blind agents holds a monotone path between two grid corners;
each agent sees only `s` letters outward on each side.  A uniformly
random scheduler repeatedly picks a site, and the totally symmetric
local rule decides whether to flip it.  When the primitive slope vector
fits inside the sight (ta + tb <= s), the path coalesces to the
Christoffel approximation of the straight line in expected polynomial
time; this package implements the process, the energy-based analysis,
exact small-instance oracles, the counterexample families, and figure
rendering, behind one CLI.
"""

from .core import (
    CHAIN,
    CYCLE,
    Configuration,
    LineParams,
    Site,
    config_from_json,
    config_to_json,
    flip,
    flip_sites,
    h_max,
    h_min,
    height,
    height_profile,
    is_christoffel,
    is_nonnegative,
    mirror_christoffel,
    parse_word,
    sites_of,
    swap_morphism,
    target_christoffel,
    thickness,
)
from .rule import (
    LocalRule,
    RuleParams,
    SlopeEstimate,
    active_sites,
    delta,
    delta_r,
    is_active,
    local_words,
    prefix_counts,
    slope_estimate,
    standard_rule,
    strong_thickness,
    weak_thickness,
)
from .dynamics import (
    ProcessState,
    StepEvent,
    StopCondition,
    Trace,
    canonical_start,
    derive_seed,
    new_process,
    run,
    write_trace,
)
from .analysis import (
    EnergyContext,
    ExperimentReport,
    coalescence_bound,
    coalescence_experiment,
    energy,
    energy_context,
    expected_drift,
    fit_scaling_exponent,
    martingale_bound,
    scaling_sweep,
    top_down_up,
)
from .oracle import (
    HittingTime,
    TransitionGraph,
    bottom_classes,
    build_graph,
    enumerate_words,
    exact_hitting_time,
    impossibility_family,
    rank_word,
    reachable_set,
    rule_stability_probe,
    stuck_config,
    theorem1_check,
    unrank_word,
    verify_corpus,
)
from .render import RenderSpec, ascii_grid, render_svg_word, svg_snapshots

__version__ = "0.1.0"
