"""dft2gspn: dynamic fault trees compiled to stochastic Petri nets.

The pipeline: parse a Galileo-style tree (galileo), validate it (dft), pick
one of five semantics (profiles), compile per-node templates into one net
(translate), explore the marking graph (gspn), and extract measures from the
underlying Markov automaton or chain (stochastics).  Exporters live in
export, the command line in cli.
"""

from .dft import (
    Dft,
    DftNode,
    InvalidDftError,
    NodeType,
    ValidationReport,
    build_dft,
    check_profile_support,
    spare_modules,
    validate_conventional,
)
from .galileo import GalileoParseError, parse_galileo, serialize_galileo
from .gspn import (
    Gspn,
    MarkingGraph,
    StateLimitExceeded,
    build_marking_graph,
    check_bounded,
    check_fire_once,
    check_monotone,
    conceded,
    detect_time_trap,
    enabled,
    fire,
)
from .profiles import PROFILES, SemanticsProfile, profile_by_name
from .stochastics import (
    Ctmc,
    MarkovAutomaton,
    eliminate_vanishing,
    extract_ma,
    goal_failed_top,
    is_deterministic,
    reach_min_max,
    unreliability,
)
from .translate import (
    PriorityConstraintSet,
    TranslationOptions,
    UnsatisfiablePrioritiesError,
    UnsupportedFeatureError,
    generate_priority_constraints,
    merge_templates,
    solve_priorities,
    template_for_node,
    template_init,
    translate,
)

__version__ = "0.1.0"
