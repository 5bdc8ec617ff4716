"""Subtree discrepancy of trees: constructions, evaluators and brute-force oracles."""

from treedisc.tree_core import (
    Decomposition,
    PruneChain,
    PruneRecord,
    StarComponent,
    Tree,
    TreeError,
    connected_edge_subsets,
    decompose_star_forest,
    from_edge_list,
    generate,
    leaf_parents,
    leaves,
    prufer_decode,
    prufer_encode,
    prune_deg2_leaf_parents,
    terminal_paths,
)
from treedisc.sphere import (
    EpsNet,
    beta_half,
    build_eps_net,
    certified_net,
    circle_net,
    densify_net,
    lower_bound,
    mean_abs_dot,
    phi,
    sample_sphere,
    simplex_identity_check,
    simplex_vertices,
    verify_covering,
)
from treedisc.labeling import (
    ConstructionTrace,
    Labeling,
    extend_labeling,
    label_star,
    label_tree,
)
from treedisc.evaluator import (
    EvalResult,
    eval_bruteforce,
    eval_certified,
    eval_local_ascent,
    eval_star_circle_exact,
    max_weight_connected_subtree,
    subtree_sum,
)
from treedisc.oriented import (
    Orientation,
    RootedSubtree,
    agreement,
    extend_orientation,
    orient_star,
    orient_tree,
    oriented_discrepancy_bruteforce,
    oriented_eval,
    oriented_eval_bruteforce,
)

__version__ = "0.1.0"
