"""Exact analysis of collective arbitrage, hedging and completeness in finite multi-agent markets."""

from .arbitrage import (
    ArbitrageWitness,
    MeasureVector,
    NcaReport,
    PriceSet,
    agent_mm_polytope,
    check_na_agent,
    check_na_global,
    check_nca,
    collective_mm_polytope,
    conditional_weights,
    extended_market,
    implications_audit,
    is_singleton,
    max_t,
    price_set,
)
from .gains import (
    AgentStrategy,
    CsfStrategy,
    GainsBasis,
    aggregate_exchanges,
    gain_of_strategy,
    gains_basis,
    lift_to_csf,
    value_decomposition,
    value_process,
)
from .hedging import (
    HedgeCertificate,
    PriceGap,
    classical_super_price,
    completeness,
    decomposition_check,
    dual_super_price,
    is_replicable,
    price_gap,
    replicate,
    sub_price,
    super_price,
)
from .linalg import determinant, nullspace, rank, solve_linear_system
from .lp import LinearProgram, LPResult, solve_lp
from .market import (
    ExchangeSchedule,
    ExchangeSpace,
    MarketModel,
    RandomVector,
    indicator_claim,
    load_market,
    make_exchange_space,
    parse_market,
    restrict_horizon,
    serialize_market,
    zero_sum_generators_from_partition,
)
from .polytope import Polytope, affine_dimension, enumerate_vertices

__all__ = [
    "AgentStrategy",
    "ArbitrageWitness",
    "CsfStrategy",
    "ExchangeSchedule",
    "ExchangeSpace",
    "GainsBasis",
    "HedgeCertificate",
    "LPResult",
    "LinearProgram",
    "MarketModel",
    "MeasureVector",
    "NcaReport",
    "Polytope",
    "PriceGap",
    "PriceSet",
    "RandomVector",
    "affine_dimension",
    "agent_mm_polytope",
    "aggregate_exchanges",
    "check_na_agent",
    "check_na_global",
    "check_nca",
    "classical_super_price",
    "collective_mm_polytope",
    "completeness",
    "conditional_weights",
    "decomposition_check",
    "determinant",
    "dual_super_price",
    "enumerate_vertices",
    "extended_market",
    "gain_of_strategy",
    "gains_basis",
    "implications_audit",
    "indicator_claim",
    "is_replicable",
    "is_singleton",
    "lift_to_csf",
    "load_market",
    "make_exchange_space",
    "max_t",
    "nullspace",
    "parse_market",
    "price_gap",
    "price_set",
    "rank",
    "replicate",
    "restrict_horizon",
    "serialize_market",
    "solve_linear_system",
    "solve_lp",
    "sub_price",
    "super_price",
    "value_decomposition",
    "value_process",
    "zero_sum_generators_from_partition",
]
