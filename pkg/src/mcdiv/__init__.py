"""mcdiv: exact divisor theory on metrized complexes of algebraic curves.

A metrized complex is a metric graph with a marked smooth projective curve
attached at some of its vertices.  This package computes reduced divisors,
divisor ranks, eta decompositions, and limit linear series certificates on
such objects, entirely in exact rational / prime-field arithmetic.
"""

from .complexes import (
    ComplexDivisor,
    ComplexRationalFunction,
    MetrizedComplex,
    NodalCurveDescription,
    as_trivial_complex,
    graphical_complex,
    regularize,
)
from .curves import (
    CurveDivisor,
    EllipticOracle,
    O_POINT,
    P1Oracle,
    TableOracle,
    genus2_table_oracle,
    riemann_roch_audit,
)
from .decomposition import (
    EtaFunction,
    WeightedGraph,
    bn_search,
    connected_sum_rank,
    eta,
    eta_v,
    gamma_sharp,
    glue,
    graph_rank,
    wedge_rank,
    weighted_rank,
    wrank3_bound,
)
from .exact import INF, Fraction, PrimeField, QQ
from .limitseries import (
    Aspect,
    FunctionSpace,
    VanishingTable,
    crude_limit_check,
    eqD_divisor,
    limit_equiv_audit,
    not_completable_audit,
    restricted_eta,
    restricted_rank,
    vanishing_sequence,
)
from .metric import (
    GraphDivisor,
    GraphModel,
    PLFunction,
    enumerate_acyclic_orientations,
)
from .rank import (
    Moderator,
    clifford_audit,
    combinatorial_rank,
    find_weierstrass,
    is_weierstrass,
    linear_equiv,
    moderator,
    nonneg_rank,
    rank,
    rank_bound_from_nonspecial,
    rr_audit,
)
from .reduction import burn, clear_debt, fire_cut, reduce_divisor

__version__ = "0.1.0"

__all__ = [
    "Aspect",
    "ComplexDivisor",
    "ComplexRationalFunction",
    "CurveDivisor",
    "EllipticOracle",
    "EtaFunction",
    "Fraction",
    "FunctionSpace",
    "GraphDivisor",
    "GraphModel",
    "INF",
    "MetrizedComplex",
    "Moderator",
    "NodalCurveDescription",
    "O_POINT",
    "P1Oracle",
    "PLFunction",
    "PrimeField",
    "QQ",
    "TableOracle",
    "VanishingTable",
    "WeightedGraph",
    "as_trivial_complex",
    "bn_search",
    "burn",
    "clear_debt",
    "clifford_audit",
    "combinatorial_rank",
    "connected_sum_rank",
    "crude_limit_check",
    "enumerate_acyclic_orientations",
    "eqD_divisor",
    "eta",
    "eta_v",
    "find_weierstrass",
    "fire_cut",
    "gamma_sharp",
    "genus2_table_oracle",
    "glue",
    "graph_rank",
    "graphical_complex",
    "is_weierstrass",
    "limit_equiv_audit",
    "linear_equiv",
    "moderator",
    "nonneg_rank",
    "not_completable_audit",
    "rank",
    "rank_bound_from_nonspecial",
    "reduce_divisor",
    "regularize",
    "restricted_eta",
    "restricted_rank",
    "riemann_roch_audit",
    "rr_audit",
    "vanishing_sequence",
    "wedge_rank",
    "weighted_rank",
    "wrank3_bound",
]
