"""Weighted proportional allocation of chores and goods with subsidies.

Pipeline: reduce any instance to identical ordering, run fractional
bid-and-take, build the item-sharing forest, split each tree into
canonical components, round each component by exact minimization, lift
back, and certify every subsidy bound as an exact rational inequality.
"""

__version__ = "0.1.0"

from .fbta import (
    NORMALIZED,
    RAW_COST,
    AllocationTrace,
    FBTAError,
    StuckError,
    SuccessorRecord,
    TraceEvent,
    fbta,
    fbta_chores,
    fbta_goods,
    format_trace,
    fractional_items,
)
from .graph import (
    AtomPath,
    Edge,
    GraphError,
    ItemSharingGraph,
    Tree,
    build_graph,
    find_atom_paths,
    make_tree,
    to_dot,
    trees,
)
from .ido import RankProfile, is_ido, lift_allocation, reduce_to_ido
from .model import (
    CHORES,
    GOODS,
    FractionalAllocation,
    Instance,
    IntegralAllocation,
    ModelError,
    SubsidyVector,
    ValidationReport,
    compute_subsidies,
    format_decimal,
    frac,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
    validate_instance,
    wprop_share,
)
from .oracle import (
    EnumerationCapExceeded,
    brute_force_rounding,
    gen_random_instance,
    six_agent_reference_instance,
)
from .rounding import (
    BASELINE,
    TREE,
    ComponentRounding,
    PipelineResult,
    RoundingCertificate,
    RoundingError,
    TreeRounding,
    allocate_with_subsidy,
    local_subsidy,
    round_baseline,
    round_expanded_atom_path,
    round_pair,
    round_single_edge,
    round_tree,
    run_pipeline,
)
from .split import (
    ExpandedAtomPath,
    Pair,
    SingleEdge,
    SplitError,
    atom_path_split,
    choose_attachment,
    simple_split,
)

__all__ = [
    "AllocationTrace",
    "AtomPath",
    "BASELINE",
    "CHORES",
    "ComponentRounding",
    "Edge",
    "EnumerationCapExceeded",
    "ExpandedAtomPath",
    "FBTAError",
    "FractionalAllocation",
    "GOODS",
    "GraphError",
    "Instance",
    "IntegralAllocation",
    "ItemSharingGraph",
    "ModelError",
    "NORMALIZED",
    "Pair",
    "PipelineResult",
    "RAW_COST",
    "RankProfile",
    "RoundingCertificate",
    "RoundingError",
    "SingleEdge",
    "SplitError",
    "StuckError",
    "SubsidyVector",
    "SuccessorRecord",
    "TREE",
    "TraceEvent",
    "Tree",
    "TreeRounding",
    "ValidationReport",
    "allocate_with_subsidy",
    "atom_path_split",
    "brute_force_rounding",
    "build_graph",
    "choose_attachment",
    "compute_subsidies",
    "fbta",
    "fbta_chores",
    "fbta_goods",
    "find_atom_paths",
    "format_decimal",
    "format_trace",
    "frac",
    "fractional_items",
    "gen_random_instance",
    "is_ido",
    "lift_allocation",
    "local_subsidy",
    "make_tree",
    "parse_allocation",
    "parse_instance",
    "reduce_to_ido",
    "round_baseline",
    "round_expanded_atom_path",
    "round_pair",
    "round_single_edge",
    "round_tree",
    "run_pipeline",
    "serialize_allocation",
    "serialize_instance",
    "simple_split",
    "six_agent_reference_instance",
    "to_dot",
    "trees",
    "validate_instance",
    "wprop_share",
]
