"""From raw field CSVs to a learnable discrete dataset.

Ingestion validates the two documented CSV schemas (drivers per management
area; shell lengths per site), pairing joins each management area with its
cove's open-access lengths, and discretization turns the typed records into
the categorical variable table the learner consumes: ten driver variables
plus two response variables.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .binning import bin_for_value, bin_labels
from .core import Evidence, Network, Variable, topological_order
from .errors import (
    EmptyDataset,
    RangeError,
    SchemaError,
    UncoveredValue,
    UnknownVariable,
)
from .fishery import (
    EnforcementProfile,
    MaRecord,
    PairedStateMetrics,
    SizeSample,
    SurveillanceArrangement,
    iaoa,
    paired_state_metrics,
    rank_enforcement,
)
from .learn import DiscreteDataset

MA_HEADER = (
    "cove", "ma_id", "ma_surface_km2", "oa_surface_km2", "registered_fishers",
    "distance_km", "wave_exposure", "land_access", "other_activities", "who",
    "schedule", "uneven", "perceived_ineffective", "perceived_poaching",
)
SIZES_HEADER = ("cove", "site_id", "regime", "length_mm")

_WAVE = {"S": "exposed_south", "N": "protected_north"}
_SCHEDULE = {"occasional": "occasional", "daily8": "daily_8h",
             "daily24": "daily_24h", "-": None}
_YN = {"Y": True, "N": False}

RESPONSE_VARIABLES = ("illegal_proportion", "relative_size")
DEFAULT_DROPPED = ("perceived_poaching", "land_access", "n_mas")


def _check_header(actual: Sequence[str] | None, expected: tuple[str, ...],
                  what: str) -> None:
    actual = tuple(actual or ())
    if actual == expected:
        return
    missing = [c for c in expected if c not in actual]
    extra = [c for c in actual if c not in expected]
    parts = [f"{what} header mismatch"]
    if missing:
        parts.append(f"missing columns: {', '.join(missing)}")
    if extra:
        parts.append(f"unexpected columns: {', '.join(extra)}")
    if not missing and not extra:
        parts.append(f"column order must be: {', '.join(expected)}")
    raise SchemaError("; ".join(parts))


class _RowProblems:
    """Collects row-level complaints so one bad file reports all at once."""

    def __init__(self) -> None:
        self.schema: list[str] = []
        self.range: list[str] = []
        self.range_rows: list[int] = []

    def schema_error(self, line: int, message: str) -> None:
        self.schema.append(f"line {line}: {message}")

    def range_error(self, line: int, message: str) -> None:
        self.range.append(f"line {line}: {message}")
        self.range_rows.append(line)

    def raise_if_any(self) -> None:
        if self.schema:
            raise SchemaError("\n".join(self.schema))
        if self.range:
            raise RangeError("\n".join(self.range), rows=self.range_rows)


def _enum(raw: str, allowed: dict[str, Any], column: str, line: int,
          problems: _RowProblems) -> Any:
    if raw in allowed:
        return allowed[raw]
    problems.schema_error(
        line, f"{column} must be one of {sorted(allowed)}, got {raw!r}"
    )
    return None


def ingest_ma_csv(path: str | Path) -> list[MaRecord]:
    """Read and validate the per-management-area driver table.

    The availability index is filled in per record from the cove's total
    managed surface, so it is only computed once the whole file parses.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, MA_HEADER, "driver table")
        raw_rows = [(line, row) for line, row in enumerate(reader, start=2)]

    problems = _RowProblems()
    parsed: list[tuple[int, dict[str, Any]]] = []
    seen_ids: set[str] = set()
    for line, row in raw_rows:
        if any(v is None for v in row.values()) or None in row:
            problems.schema_error(line, "wrong number of fields")
            continue
        out: dict[str, Any] = {"cove": row["cove"].strip(),
                               "ma_id": row["ma_id"].strip()}
        if not out["cove"] or not out["ma_id"]:
            problems.schema_error(line, "cove and ma_id must be non-empty")
            continue
        if out["ma_id"] in seen_ids:
            problems.schema_error(line, f"duplicate ma_id {out['ma_id']!r}")
            continue
        seen_ids.add(out["ma_id"])

        for column in ("ma_surface_km2", "oa_surface_km2", "distance_km"):
            try:
                value = float(row[column])
            except ValueError:
                problems.schema_error(line, f"{column} is not a number: {row[column]!r}")
                continue
            if value < 0:
                problems.range_error(line, f"{column} must be >= 0, got {value}")
            out[column] = value
        try:
            fishers = int(row["registered_fishers"])
            if fishers < 1:
                problems.range_error(line, f"registered_fishers must be >= 1, got {fishers}")
            out["fishers"] = fishers
        except ValueError:
            problems.schema_error(
                line, f"registered_fishers is not an integer: {row['registered_fishers']!r}"
            )

        out["wave"] = _enum(row["wave_exposure"], _WAVE, "wave_exposure", line, problems)
        out["access"] = _enum(row["land_access"],
                              {"easy": "easy", "difficult": "difficult"},
                              "land_access", line, problems)
        out["other"] = _enum(row["other_activities"], _YN, "other_activities",
                             line, problems)
        who = _enum(row["who"], {w: w for w in ("none", "fishers", "hired")},
                    "who", line, problems)
        schedule_known = row["schedule"] in _SCHEDULE
        schedule = _enum(row["schedule"], _SCHEDULE, "schedule", line, problems)
        out["uneven"] = _enum(row["uneven"], _YN, "uneven", line, problems)
        out["ineffective"] = _enum(row["perceived_ineffective"], _YN,
                                   "perceived_ineffective", line, problems)
        out["poaching"] = _enum(row["perceived_poaching"],
                                {"1": 1, "2": 2, "3": 3, "4": 4},
                                "perceived_poaching", line, problems)
        if who is not None and schedule_known:
            try:
                out["rank"] = rank_enforcement(SurveillanceArrangement(who, schedule))
            except Exception as exc:
                problems.schema_error(line, str(exc))
        parsed.append((line, out))
    problems.raise_if_any()
    if not parsed:
        raise EmptyDataset("driver table has no data rows")

    cove_totals: dict[str, float] = {}
    for _, out in parsed:
        cove_totals[out["cove"]] = cove_totals.get(out["cove"], 0.0) + out["ma_surface_km2"]

    records = []
    for _, out in parsed:
        records.append(MaRecord(
            cove=out["cove"],
            ma_id=out["ma_id"],
            ma_surface=out["ma_surface_km2"],
            oa_surface_accessible=out["oa_surface_km2"],
            registered_fishers=out["fishers"],
            distance_to_surveillance=out["distance_km"],
            wave_exposure=out["wave"],
            land_access=out["access"],
            other_activities=out["other"],
            enforcement=EnforcementProfile(
                rank=out["rank"],
                uneven_across_mas=out["uneven"],
                perceived_ineffective=out["ineffective"],
            ),
            perceived_poaching=out["poaching"],
            iaoa=iaoa(out["oa_surface_km2"], cove_totals[out["cove"]], out["fishers"]),
        ))
    return records


def ingest_sizes_csv(path: str | Path) -> list[SizeSample]:
    """Read shell lengths, grouped into one sample per (cove, site, regime)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, SIZES_HEADER, "sizes table")
        raw_rows = [(line, row) for line, row in enumerate(reader, start=2)]

    problems = _RowProblems()
    groups: dict[tuple[str, str, str], list[float]] = {}
    for line, row in raw_rows:
        if any(v is None for v in row.values()) or None in row:
            problems.schema_error(line, "wrong number of fields")
            continue
        cove, site = row["cove"].strip(), row["site_id"].strip()
        if not cove or not site:
            problems.schema_error(line, "cove and site_id must be non-empty")
            continue
        regime = row["regime"]
        if regime not in ("MA", "OA"):
            problems.schema_error(line, f"regime must be MA or OA, got {regime!r}")
            continue
        try:
            length = float(row["length_mm"])
        except ValueError:
            problems.schema_error(line, f"length_mm is not a number: {row['length_mm']!r}")
            continue
        if length <= 0:
            problems.range_error(line, f"length_mm must be > 0, got {length}")
            continue
        groups.setdefault((cove, site, regime), []).append(length)
    problems.raise_if_any()
    return [
        SizeSample(cove=cove, site_id=site, regime=regime, lengths_mm=tuple(lengths))
        for (cove, site, regime), lengths in groups.items()
    ]


def pair_metrics(records: Sequence[MaRecord], samples: Sequence[SizeSample],
                 mls: float = 65.0, mode: str = "rank_sum"
                 ) -> dict[str, PairedStateMetrics]:
    """Resource-state metrics per management area.

    Each area's MA sample (site_id = ma_id) is compared against the pooled
    open-access lengths of its cove.
    """
    ma_samples = {(s.cove, s.site_id): s for s in samples if s.regime == "MA"}
    oa_lengths: dict[str, list[float]] = {}
    for s in samples:
        if s.regime == "OA":
            oa_lengths.setdefault(s.cove, []).extend(s.lengths_mm)

    metrics: dict[str, PairedStateMetrics] = {}
    missing: list[str] = []
    for record in records:
        ma = ma_samples.get((record.cove, record.ma_id))
        oa = oa_lengths.get(record.cove)
        if ma is None:
            missing.append(f"no MA length sample for {record.cove}/{record.ma_id}")
            continue
        if not oa:
            missing.append(f"no OA lengths for cove {record.cove}")
            continue
        pooled_oa = SizeSample(cove=record.cove, site_id="oa_pooled", regime="OA",
                               lengths_mm=tuple(oa))
        metrics[record.ma_id] = paired_state_metrics(ma, pooled_oa, mls, mode=mode)
    if missing:
        raise SchemaError("\n".join(missing))
    return metrics


# --- discretization -----------------------------------------------------------


@dataclass(frozen=True)
class CutRule:
    """Continuous value → bin index by strictly increasing cut points.

    A value exactly on a cut joins the lower bin. Default labels are derived
    from the cut points themselves so they can be parsed back later.
    """

    cuts: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cuts", tuple(float(c) for c in self.cuts))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        if not self.cuts:
            raise ValueError("need at least one cut point")
        if any(b <= a for a, b in zip(self.cuts, self.cuts[1:])):
            raise ValueError(f"cut points must strictly increase: {self.cuts}")
        if self.labels is not None and len(self.labels) != len(self.cuts) + 1:
            raise ValueError("need exactly one label per bin")

    @property
    def states(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(bin_labels(list(self.cuts)))

    def state_for(self, value: Any) -> str:
        return self.states[bin_for_value(float(value), list(self.cuts))]


@dataclass(frozen=True)
class MappingRule:
    """Categorical/ordinal value → state label by explicit lookup."""

    states: tuple[str, ...]
    mapping: dict[Any, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "mapping", dict(self.mapping))
        unknown = {s for s in self.mapping.values() if s not in self.states}
        if unknown:
            raise ValueError(f"mapping targets undeclared states: {sorted(unknown)}")

    def state_for(self, value: Any) -> str:
        try:
            return self.mapping[value]
        except (KeyError, TypeError):
            raise UncoveredValue(f"no state covers input value {value!r}") from None


@dataclass(frozen=True)
class VariableRule:
    name: str
    rule: CutRule | MappingRule
    kind: str = "ordinal"

    def variable(self) -> Variable:
        return Variable(name=self.name, states=tuple(self.rule.states), kind=self.kind)


@dataclass(frozen=True)
class DiscretizationSpec:
    """Ordered per-variable discretization rules."""

    rules: tuple[VariableRule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names in discretization rules")

    def variables(self) -> tuple[Variable, ...]:
        return tuple(r.variable() for r in self.rules)

    def rule_for(self, name: str) -> VariableRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise UnknownVariable(f"no discretization rule for {name!r}")


def _quartile_cuts(values: Sequence[float], what: str) -> tuple[float, ...]:
    cuts = statistics.quantiles(values, n=4)
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError(
            f"{what} quartiles are not distinct ({cuts}); "
            "supply explicit cut points instead"
        )
    return tuple(cuts)


LEVELS_4 = ("low", "moderate", "high", "very_high")
LEVELS_5 = ("very_low", "low", "moderate", "high", "very_high")
DISTANCE_LEVELS = ("close", "moderate", "far", "very_far")


def default_fishery_spec(records: Sequence[MaRecord]) -> DiscretizationSpec:
    """The shipped discretization: quartile bins for continuous drivers,
    fixed level maps for ranked drivers, fixed response cut points.

    The enforcement node has four levels covering ranks 2-5; a rank-1 area
    (no surveillance at all) is outside the shipped state space and should
    be handled with an explicit rule if such data ever appears.
    """
    if not records:
        raise EmptyDataset("cannot derive quartiles from zero records")
    cove_counts: dict[str, int] = {}
    for r in records:
        cove_counts[r.cove] = cove_counts.get(r.cove, 0) + 1
    rules = (
        VariableRule("ma_surface", CutRule(
            _quartile_cuts([r.ma_surface for r in records], "ma_surface"),
            labels=LEVELS_4)),
        VariableRule("n_mas", CutRule((1.5, 2.5), labels=("one", "two", "three_plus"))),
        VariableRule("distance", CutRule(
            _quartile_cuts([r.distance_to_surveillance for r in records], "distance"),
            labels=DISTANCE_LEVELS)),
        VariableRule("land_access", MappingRule(
            states=("easy", "difficult"),
            mapping={"easy": "easy", "difficult": "difficult"}), kind="nominal"),
        VariableRule("wave_exposure", MappingRule(
            states=("exposed_south", "protected_north"),
            mapping={"exposed_south": "exposed_south",
                     "protected_north": "protected_north"}), kind="nominal"),
        VariableRule("iaoa", CutRule(
            _quartile_cuts([r.iaoa for r in records], "iaoa"), labels=LEVELS_4)),
        VariableRule("other_activities", MappingRule(
            states=("N", "Y"), mapping={False: "N", True: "Y"}), kind="nominal"),
        VariableRule("enforcement", MappingRule(
            states=LEVELS_4,
            mapping={2: "low", 3: "moderate", 4: "high", 5: "very_high"})),
        VariableRule("effectiveness", MappingRule(
            states=LEVELS_5,
            mapping={1: "very_low", 2: "low", 3: "moderate", 4: "high",
                     5: "very_high"})),
        VariableRule("perceived_poaching", MappingRule(
            states=LEVELS_4,
            mapping={1: "low", 2: "moderate", 3: "high", 4: "very_high"})),
        VariableRule("illegal_proportion", CutRule((0.15, 0.31))),
        VariableRule("relative_size", CutRule((0.5, 0.59))),
    )
    return DiscretizationSpec(rules=rules)


def _raw_values(record: MaRecord, metric: PairedStateMetrics,
                cove_counts: dict[str, int]) -> dict[str, Any]:
    return {
        "ma_surface": record.ma_surface,
        "n_mas": cove_counts[record.cove],
        "distance": record.distance_to_surveillance,
        "land_access": record.land_access,
        "wave_exposure": record.wave_exposure,
        "iaoa": record.iaoa,
        "other_activities": record.other_activities,
        "enforcement": record.enforcement.rank,
        "effectiveness": record.enforcement.effective_rank,
        "perceived_poaching": record.perceived_poaching,
        "illegal_proportion": metric.illegal_proportion_ma,
        "relative_size": metric.e_hat,
    }


def discretize(records: Sequence[MaRecord],
               metrics: dict[str, PairedStateMetrics],
               spec: DiscretizationSpec) -> DiscreteDataset:
    """One dataset row per management area, one column per spec rule."""
    missing = [r.ma_id for r in records if r.ma_id not in metrics]
    if missing:
        raise SchemaError(f"no paired metrics for: {', '.join(missing)}")
    cove_counts: dict[str, int] = {}
    for r in records:
        cove_counts[r.cove] = cove_counts.get(r.cove, 0) + 1

    variables = spec.variables()
    rows = np.zeros((len(records), len(variables)), dtype=np.int64)
    for i, record in enumerate(records):
        raw = _raw_values(record, metrics[record.ma_id], cove_counts)
        for j, rule in enumerate(spec.rules):
            if rule.name not in raw:
                raise UnknownVariable(
                    f"no raw field feeds discretization rule {rule.name!r}"
                )
            state = rule.rule.state_for(raw[rule.name])
            rows[i, j] = variables[j].state_index(state)
    return DiscreteDataset(variables=variables, rows=rows)


def drop_variables(dataset: DiscreteDataset, names: Sequence[str]) -> DiscreteDataset:
    """Dataset without the named columns (the shipped config drops three)."""
    for name in names:
        dataset.index_of(name)  # raises UnknownVariable
    drop = set(names)
    keep = [i for i, v in enumerate(dataset.variables) if v.name not in drop]
    return DiscreteDataset(
        variables=tuple(dataset.variables[i] for i in keep),
        rows=dataset.rows[:, keep],
    )


def synth_dataset(generator_network: Network, n_rows: int, seed: int = 0
                  ) -> DiscreteDataset:
    """Complete rows drawn from a network by ancestral sampling."""
    if n_rows < 0:
        raise ValueError("n_rows must be >= 0")
    dag = generator_network.dag
    order = topological_order(dag)
    rng = np.random.Generator(np.random.PCG64(seed))
    columns: dict[str, np.ndarray] = {}
    for name in order:
        cpt = generator_network.cpts[name]
        r = dag.variable(name).cardinality
        row_idx = np.zeros(n_rows, dtype=np.int64)
        for parent, card in zip(cpt.parents, cpt.parent_cards):
            row_idx = row_idx * card + columns[parent]
        probs = cpt.table[row_idx]
        cum = np.cumsum(probs, axis=1)
        u = rng.random(n_rows)
        draws = (u[:, None] * cum[:, -1][:, None] > cum).sum(axis=1)
        columns[name] = np.minimum(draws, r - 1).astype(np.int64)
    rows = np.stack([columns[v.name] for v in dag.variables], axis=1) \
        if n_rows else np.zeros((0, len(dag.variables)), dtype=np.int64)
    return DiscreteDataset(variables=dag.variables, rows=rows)


def event_frequency(dataset: DiscreteDataset, event: Evidence) -> float:
    """Fraction of dataset rows satisfying every constraint of the event."""
    if dataset.row_count == 0:
        raise EmptyDataset("no rows to count over")
    hold = np.ones(dataset.row_count, dtype=bool)
    for name, states in event.constraints.items():
        var = dataset.variable(name)
        member = np.zeros(var.cardinality, dtype=bool)
        member[[var.state_index(s) for s in states]] = True
        hold &= member[dataset.column(name)]
    return float(hold.sum() / dataset.row_count)
