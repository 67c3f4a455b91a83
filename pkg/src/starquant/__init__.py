"""starquant: explicit algebraic deformation quantization at finite
truncation order.

Exact star products on affine space with polynomial Poisson structures,
generators-and-relations presentations of the deformed algebra, and
deformed quotient algebras for affine Poisson subvarieties.
"""

from .algebra import (
    GREVLEX,
    HPoly,
    HSeries,
    MonomialOrder,
    Poly,
    hseries_to_json,
    poly_from_json,
    poly_to_json,
)
from .config import ConfigError, ProblemConfig
from .groebner import (
    GroebnerBasis,
    StandardMonomialSet,
    antisymmetric_syzygy,
    buchberger,
    jacobian_rank_check,
    standard_monomials,
)
from .parsing import ParseError, parse_poly
from .poisson import PoissonStructure
from .presentation import (
    ExpansionMatrix,
    Relation,
    RelationSet,
    build_expansion_matrix,
    emit_presentation,
    expand_star_monomial,
    invert_expansion,
    normal_form_word,
    rewrite_unordered,
    star_basis_coords,
)
from .quotient import (
    CheckResult,
    DeformedIdeal,
    FlatnessReport,
    Lifting,
    MembershipResult,
    QuotientBasis,
    ReductionSystem,
    build_reduction_system,
    check_centrality,
    check_two_sided,
    ideal_membership_mod,
    lift_generators,
    multiplication_table,
    quotient_normal_form,
    verify_flatness,
    weyl_symmetrize,
)
from .star import (
    BidiffOperator,
    GaugeTransform,
    StarProductSpec,
    check_semiformal_filtration,
    gauge_transform,
    gutt_star,
    moyal_star,
    verify_associativity,
    verify_commutator_bracket,
    verify_degree_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BidiffOperator", "CheckResult", "ConfigError", "DeformedIdeal",
    "ExpansionMatrix", "FlatnessReport", "GaugeTransform", "GroebnerBasis",
    "GREVLEX", "HPoly", "HSeries", "Lifting", "MembershipResult",
    "MonomialOrder", "ParseError", "PoissonStructure", "Poly",
    "ProblemConfig", "QuotientBasis", "Relation", "RelationSet",
    "ReductionSystem", "StandardMonomialSet", "StarProductSpec",
    "antisymmetric_syzygy", "buchberger", "build_expansion_matrix",
    "build_reduction_system", "check_centrality", "check_semiformal_filtration",
    "check_two_sided", "emit_presentation", "expand_star_monomial",
    "gauge_transform", "gutt_star", "hseries_to_json", "ideal_membership_mod",
    "invert_expansion", "jacobian_rank_check", "lift_generators",
    "moyal_star", "multiplication_table", "normal_form_word", "parse_poly",
    "poly_from_json", "poly_to_json", "quotient_normal_form",
    "rewrite_unordered", "standard_monomials", "star_basis_coords",
    "verify_associativity", "verify_commutator_bracket", "verify_degree_bound",
    "verify_flatness", "weyl_symmetrize",
]
