"""Semantic-mutation adequacy scoring for metamorphic relation suites.

The package measures how well a metamorphic-relation suite detects
domain-semantic faults in twelve scientific-computing kernels: it houses
the kernels, hand-built mutant pools, the relation catalogue, the
equivalence/kill engine, root-cause attribution, the statistics stack,
and an executable check that the semantic score collapses to the classic
mutation score in the degenerate limit.
"""

__version__ = "0.1.0"

from .engine import (  # noqa: F401
    CampaignResult,
    CellResult,
    EquivalenceConfig,
    MutantState,
    compute_sms,
    false_equiv_bound,
    pattern_coverage,
    run_campaign,
    run_cell,
)
from .kernels import (  # noqa: F401
    Program,
    PutClass,
    PutId,
    evaluate_put,
    evaluate_trajectory,
    list_puts,
    original,
)
from .lrca import LrcaConfig, RootCause, annotate_campaign, diagnose  # noqa: F401
from .mutants import (  # noqa: F401
    MutantRecord,
    OperatorClass,
    catalog,
    l0_prescreen,
    pool,
    syntactic_mutants,
)
from .relations import (  # noqa: F401
    CellDensity,
    MetaPattern,
    MrInstance,
    density,
    mrs_for,
    primary_mp,
)
from .verify import (  # noqa: F401
    AvpVerdict,
    avp_verify,
    check_tolerance_equality,
    convergence_order,
    dtw_distance,
    wilcoxon_signed_rank,
)
