"""Exact robust super-hedging under proportional transaction costs on finite scenario trees."""

__version__ = "0.1.0"

from .arbitrage import (  # noqa: E402
    Na2Report,
    NaReport,
    PriceSystem,
    check_na2,
    check_na_frictionless,
    cross_check_equivalence,
    find_scps,
)
from .cones import (  # noqa: E402
    BidAskSpec,
    SolvencyCone,
    build_cone,
    in_cone,
    in_dual,
    in_dual_interior,
    in_minus_cone,
    project_to_slice,
)
from .dp import ValueFunction, backward_induction  # noqa: E402
from .enlarged import EnlargedTree, ThetaGrid, build_enlarged, check_theorem_main  # noqa: E402
from .lp import LinearProgram, LpOutcome, solve  # noqa: E402
from .pricing import (  # noqa: E402
    ClaimSpec,
    HedgeCertificate,
    StaticOption,
    eta_from_H,
    price_dual,
    price_enlarged,
    price_primal,
    robustness_check,
)
from .specfile import MarketSpec, digest, dumps, load, loads  # noqa: E402
from .tree import NodeRecord, ScenarioTree, is_admissible, polar_mask  # noqa: E402

__all__ = [
    "Na2Report", "NaReport", "PriceSystem", "check_na2", "check_na_frictionless",
    "cross_check_equivalence", "find_scps", "BidAskSpec", "SolvencyCone", "build_cone", "in_cone",
    "in_dual", "in_dual_interior", "in_minus_cone", "project_to_slice", "ValueFunction",
    "backward_induction", "EnlargedTree", "ThetaGrid", "build_enlarged", "check_theorem_main",
    "LinearProgram", "LpOutcome", "solve", "ClaimSpec", "HedgeCertificate", "StaticOption",
    "eta_from_H", "price_dual", "price_enlarged", "price_primal", "robustness_check", "MarketSpec",
    "digest", "dumps", "load", "loads", "NodeRecord", "ScenarioTree", "is_admissible", "polar_mask",
]
