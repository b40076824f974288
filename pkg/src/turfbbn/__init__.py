"""Decision support for territorial-use fisheries: learn a discrete belief
network linking enforcement, geography, and effort-displacement drivers to
the state of the harvested stock, then answer what-if and reverse
probability queries over it.
"""

from .core import (
    Cpt,
    Dag,
    Edge,
    Evidence,
    Network,
    Variable,
    build_network,
    parent_combinations,
    topological_order,
)
from .errors import TurfBbnError
from .fishery import (
    EnforcementProfile,
    MaRecord,
    PairedStateMetrics,
    SizeSample,
    SurveillanceArrangement,
    effective_enforcement,
    iaoa,
    illegal_proportion,
    paired_state_metrics,
    rank_enforcement,
    relative_median_size,
    wilcoxon_test,
)
from .infer import (
    QueryEvent,
    QueryResult,
    exact_query,
    good_state_event,
    lw_query,
    reverse_query,
)
from .learn import (
    DiscreteDataset,
    ScoredDag,
    SearchConfig,
    edge_strength,
    exhaustive_search,
    family_score,
    fit_cpts,
    parse_constraints,
    score_dag,
    tabu_search,
)
from .netdoc import deserialize_network, serialize_network, to_dot
from .pipeline import (
    DiscretizationSpec,
    default_fishery_spec,
    discretize,
    drop_variables,
    event_frequency,
    ingest_ma_csv,
    ingest_sizes_csv,
    pair_metrics,
    synth_dataset,
)
from .ranktests import RankTestResult, rank_sum, signed_rank
from .scenarios import (
    Scenario,
    ScenarioReport,
    load_scenarios,
    parse_scenarios,
    run_reverse_scenarios,
    run_scenarios,
)

__version__ = "0.1.0"

__all__ = [
    "Cpt", "Dag", "Edge", "Evidence", "Network", "Variable",
    "build_network", "parent_combinations", "topological_order",
    "TurfBbnError",
    "EnforcementProfile", "MaRecord", "PairedStateMetrics", "SizeSample",
    "SurveillanceArrangement", "effective_enforcement", "iaoa",
    "illegal_proportion", "paired_state_metrics", "rank_enforcement",
    "relative_median_size", "wilcoxon_test",
    "QueryEvent", "QueryResult", "exact_query", "good_state_event",
    "lw_query", "reverse_query",
    "DiscreteDataset", "ScoredDag", "SearchConfig", "edge_strength",
    "exhaustive_search", "family_score", "fit_cpts", "parse_constraints",
    "score_dag", "tabu_search",
    "deserialize_network", "serialize_network", "to_dot",
    "DiscretizationSpec", "default_fishery_spec", "discretize",
    "drop_variables", "event_frequency", "ingest_ma_csv", "ingest_sizes_csv",
    "pair_metrics", "synth_dataset",
    "RankTestResult", "rank_sum", "signed_rank",
    "Scenario", "ScenarioReport", "load_scenarios", "parse_scenarios",
    "run_reverse_scenarios", "run_scenarios",
    "__version__",
]
