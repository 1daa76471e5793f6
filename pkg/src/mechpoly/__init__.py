"""mechpoly: competing mechanisms over incentive-compatibility polytopes.

Finite games between several principals and several agents with private
types.  Direct mechanisms are dense stochastic tables constrained to a
per-principal polytope of Bayesian incentive compatibility; the solver layer
computes best responses, minmax/maxmin values with certificates, punishment
profiles, and payoff-floor membership.  The mechanisms layer handles finite
message games, the menu and deviator-reporting constructions, continuation
equilibria, and three equilibrium notions.
"""

from .game import (
    DirectMechanism,
    FiniteGame,
    GameFormatError,
    NotSeparable,
    RandomActionProfile,
    ValidationResult,
    agent_expected_payoff,
    canonical_game_bytes,
    conditional_prior,
    contract_opponents,
    decompose_separable,
    expected_principal_payoff,
    game_from_dict,
    game_hash,
    game_to_dict,
    load_game,
    mechanism_from_dict,
    mechanism_to_dict,
    principal_value_at_profile,
    profile_from_list,
    profile_to_list,
    save_game,
    validate_game,
)
from .games import matching_pennies_game, random_game, screening_game
from .bic import (
    BicPolytope,
    DimensionTooLarge,
    MembershipResult,
    build_bic_polytope,
    enumerate_vertices,
    export_h_representation,
    is_individually_bic,
    is_profile_bic,
    sample_bic,
)
from .solver import (
    EXACT_KINDS,
    GapFamily,
    GapSearchResult,
    LPProblem,
    LPResult,
    MembershipVerdict,
    ModeUnsupported,
    NumericalFailure,
    ValueCertificate,
    best_response,
    maxmin,
    minmax,
    punishment_profile,
    report_to_json,
    robust_pbe_membership,
    search_minmax_maxmin_gap,
    solve_lp,
    solve_report,
    witness_to_jsonable,
)
from .mechanisms import (
    CeVerdict,
    DeviationSetEmpty,
    GeneralMechanism,
    MenuEntryNotBIC,
    NotBIC,
    NotionVerdict,
    SelectionSpaceTooLarge,
    SetValuedContract,
    StrategyProfile,
    TooFewAgents,
    build_deviator_reporting,
    build_type_and_dm_mechanism,
    check_continuation_equilibrium,
    check_equilibrium_notion,
    deviator_message_label,
    deviator_truthful_strategies,
    enumerate_pure_continuation_equilibria,
    general_mechanism_from_dict,
    general_mechanism_to_dict,
    induce_direct_mechanism,
    induce_profile,
    load_general_mechanism,
    load_strategies,
    mechanism_profile_hash,
    nest_szentes_contract,
    pure_strategies,
    save_general_mechanism,
    save_strategies,
    simulate,
    standard_from_direct,
    strategies_from_dict,
    strategies_to_dict,
    truthful_strategies,
)

__version__ = "0.1.0"

__all__ = [
    "BicPolytope",
    "CeVerdict",
    "DeviationSetEmpty",
    "DimensionTooLarge",
    "DirectMechanism",
    "EXACT_KINDS",
    "FiniteGame",
    "GameFormatError",
    "GapFamily",
    "GapSearchResult",
    "GeneralMechanism",
    "LPProblem",
    "LPResult",
    "MembershipResult",
    "MembershipVerdict",
    "MenuEntryNotBIC",
    "ModeUnsupported",
    "NotBIC",
    "NotSeparable",
    "NotionVerdict",
    "NumericalFailure",
    "RandomActionProfile",
    "SelectionSpaceTooLarge",
    "SetValuedContract",
    "StrategyProfile",
    "TooFewAgents",
    "ValidationResult",
    "ValueCertificate",
    "agent_expected_payoff",
    "best_response",
    "build_bic_polytope",
    "build_deviator_reporting",
    "build_type_and_dm_mechanism",
    "canonical_game_bytes",
    "check_continuation_equilibrium",
    "check_equilibrium_notion",
    "conditional_prior",
    "contract_opponents",
    "decompose_separable",
    "deviator_message_label",
    "deviator_truthful_strategies",
    "enumerate_pure_continuation_equilibria",
    "enumerate_vertices",
    "expected_principal_payoff",
    "export_h_representation",
    "game_from_dict",
    "game_hash",
    "game_to_dict",
    "general_mechanism_from_dict",
    "general_mechanism_to_dict",
    "induce_direct_mechanism",
    "induce_profile",
    "is_individually_bic",
    "is_profile_bic",
    "load_game",
    "load_general_mechanism",
    "load_strategies",
    "matching_pennies_game",
    "maxmin",
    "mechanism_from_dict",
    "mechanism_profile_hash",
    "mechanism_to_dict",
    "minmax",
    "nest_szentes_contract",
    "principal_value_at_profile",
    "profile_from_list",
    "profile_to_list",
    "punishment_profile",
    "pure_strategies",
    "random_game",
    "report_to_json",
    "robust_pbe_membership",
    "sample_bic",
    "save_game",
    "save_general_mechanism",
    "save_strategies",
    "screening_game",
    "search_minmax_maxmin_gap",
    "simulate",
    "solve_lp",
    "solve_report",
    "standard_from_direct",
    "strategies_from_dict",
    "strategies_to_dict",
    "truthful_strategies",
    "validate_game",
    "witness_to_jsonable",
]
