"""relhyp: desk-scale computations on finite relative presentations."""

__version__ = "0.1.0"

from .presentation import (
    FreeAbelianModel,
    FiniteTableModel,
    FreeGroupModel,
    XLetter,
    HLetter,
    Word,
    EMPTY_WORD,
    RelativePresentation,
    free_reduce,
    cyclically_reduce,
    letter_count,
    parse_presentation,
    parse_document,
    serialize_presentation,
)
from .errors import (
    RelhypError,
    ParseError,
    OracleInvalidError,
    ResourceCapError,
    LpSolverError,
    GeodesicNotFoundError,
)
from .oracle import (
    FreeProductOracle,
    IntegerQuotientOracle,
    FiniteQuotientOracle,
    PluginOracle,
    Trivial,
    NontrivialCertified,
    build_oracle,
    budgeted_word_problem,
)
from .cayley import (
    BallGraph,
    RelLength,
    ball_to_csv,
    ball_to_json,
    geodesic_witness,
    rel_length,
    truncated_ball,
)
from .filling import (
    DehnProfile,
    FillingCertificate,
    Unknown,
    check_asymptotic_dominance,
    dehn_profile,
    linear_fit,
    relative_area,
    replay_certificate,
    rho_escalation,
)
from .cochain import (
    CellId,
    Chain,
    Cochain,
    GrowthScan,
    Infeasible,
    Primitive,
    Window,
    boundary_chain,
    build_window,
    coboundary,
    growth_scan,
    min_linf_primitive,
    pair,
    path_gain,
    relative_correction,
    relator_indicator_family,
    window_to_json,
    windowed_max_nu,
)
from .corridor import (
    Corridor,
    FreeAction,
    RelAutomorphism,
    SeparationReport,
    apply_action,
    apply_automorphism,
    build_corridor,
    check_separated,
    check_uniform_flare,
    corridor_cocycle_pairing,
    encode_action,
    identity_automorphism,
    parse_action,
    validate_action,
    validate_relaut,
)
from .cli import loop_literal_parse, main as cli_main

__all__ = [
    "FreeAbelianModel", "FiniteTableModel", "FreeGroupModel",
    "XLetter", "HLetter", "Word", "EMPTY_WORD", "RelativePresentation",
    "free_reduce", "cyclically_reduce", "letter_count",
    "parse_presentation", "parse_document", "serialize_presentation",
    "RelhypError", "ParseError", "OracleInvalidError", "ResourceCapError",
    "LpSolverError", "GeodesicNotFoundError",
    "FreeProductOracle", "IntegerQuotientOracle", "FiniteQuotientOracle",
    "PluginOracle", "Trivial", "NontrivialCertified", "build_oracle",
    "budgeted_word_problem",
    "BallGraph", "RelLength", "ball_to_csv", "ball_to_json",
    "geodesic_witness", "rel_length", "truncated_ball",
    "DehnProfile", "FillingCertificate", "Unknown",
    "check_asymptotic_dominance", "dehn_profile", "linear_fit",
    "relative_area", "replay_certificate", "rho_escalation",
    "CellId", "Chain", "Cochain", "GrowthScan", "Infeasible", "Primitive",
    "Window", "boundary_chain", "build_window", "coboundary", "growth_scan",
    "min_linf_primitive", "pair", "path_gain", "relative_correction",
    "relator_indicator_family", "window_to_json", "windowed_max_nu",
    "Corridor", "FreeAction", "RelAutomorphism", "SeparationReport",
    "apply_action", "apply_automorphism", "build_corridor",
    "check_separated", "check_uniform_flare", "corridor_cocycle_pairing",
    "encode_action", "identity_automorphism", "parse_action",
    "validate_action", "validate_relaut",
    "loop_literal_parse", "cli_main",
    "__version__",
]
