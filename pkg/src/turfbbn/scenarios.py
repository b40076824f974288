"""Named what-if scenarios and the reverse driver analysis.

A scenario file is plain text: one `[name]` section per scenario, with
`evidence:` and `event:` clauses of the form `var in {state, state}`, plus
optional `samples:` and `seed:` lines. Running scenarios produces, for each
row, the sampled estimate with its interval, an exact cross-check, and a
flag telling whether the exact value fell inside the sampled interval.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import Evidence, Network
from .errors import ParseError, TurfBbnError
from .infer import QueryEvent, QueryResult, exact_query, lw_query, reverse_query

DEFAULT_SAMPLES = 2000

# State groups whose total posterior mass the reverse report calls out,
# one per driver that has a natural "favourable" direction.
DEFAULT_REVERSE_GROUPS: dict[str, tuple[str, ...]] = {
    "iaoa": ("high", "very_high"),
    "enforcement": ("high", "very_high"),
    "effectiveness": ("moderate", "high", "very_high"),
    "distance": ("close",),
}

_CLAUSE_RE = re.compile(r"^(\w+)\s+in\s+\{([^{}]*)\}$")


@dataclass(frozen=True)
class Scenario:
    name: str
    evidence: Evidence
    event: QueryEvent
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("a scenario needs a name")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


@dataclass(frozen=True)
class ScenarioRow:
    """One scenario's outcome; either the three results or an error string."""

    name: str
    evidence_clauses: tuple[str, ...]
    event_clause: str
    sampled: QueryResult | None = None
    exact: QueryResult | None = None
    exact_within_ci: bool | None = None
    error: str | None = None


@dataclass(frozen=True)
class ScenarioReport:
    rows: tuple[ScenarioRow, ...]

    @property
    def has_errors(self) -> bool:
        return any(r.error is not None for r in self.rows)


@dataclass(frozen=True)
class ReverseRow:
    driver: str
    distribution: dict[str, float]
    group_states: tuple[str, ...] | None = None
    group_mass: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class ReverseReport:
    event_clauses: tuple[str, ...]
    rows: tuple[ReverseRow, ...]

    @property
    def has_errors(self) -> bool:
        return any(r.error is not None for r in self.rows)


def _parse_clause(line: str, lineno: int) -> tuple[str, frozenset[str]]:
    m = _CLAUSE_RE.match(line.strip())
    if not m:
        raise ParseError(
            f"expected 'var in {{state, ...}}', got {line.strip()!r}",
            location=f"line {lineno}",
        )
    states = tuple(s.strip() for s in m.group(2).split(",") if s.strip())
    if not states:
        raise ParseError("empty state set", location=f"line {lineno}")
    return m.group(1), frozenset(states)


def parse_scenarios(text: str) -> list[Scenario]:
    """Parse a scenario document; `#` starts a comment anywhere."""
    scenarios: list[Scenario] = []
    current: dict | None = None
    names_seen: set[str] = set()

    def close(current: dict | None) -> None:
        if current is None:
            return
        if not current["event"]:
            raise ParseError(
                f"scenario {current['name']!r} has no event clause",
                location=f"line {current['line']}",
            )
        scenarios.append(Scenario(
            name=current["name"],
            evidence=Evidence(constraints=current["evidence"]),
            event=QueryEvent(constraints=current["event"]),
            n_samples=current["samples"],
            seed=current["seed"],
        ))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            close(current)
            name = line[1:-1].strip()
            if not name:
                raise ParseError("empty scenario name", location=f"line {lineno}")
            if name in names_seen:
                raise ParseError(f"duplicate scenario name {name!r}",
                                 location=f"line {lineno}")
            names_seen.add(name)
            current = {"name": name, "line": lineno, "evidence": {},
                       "event": {}, "samples": DEFAULT_SAMPLES, "seed": 0}
            continue
        if current is None:
            raise ParseError("content before the first [scenario] header",
                             location=f"line {lineno}")
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if key in ("evidence", "event"):
            var, states = _parse_clause(value, lineno)
            bucket = current[key]
            if var in bucket:
                raise ParseError(f"variable {var!r} constrained twice",
                                 location=f"line {lineno}")
            bucket[var] = states
        elif key in ("samples", "seed"):
            try:
                number = int(value)
            except ValueError:
                raise ParseError(f"{key} must be an integer, got {value!r}",
                                 location=f"line {lineno}") from None
            if key == "samples" and number < 1:
                raise ParseError("samples must be >= 1", location=f"line {lineno}")
            current[key] = number
        else:
            raise ParseError(f"unknown key {key!r}", location=f"line {lineno}")
    close(current)
    return scenarios


def load_scenarios(path) -> list[Scenario]:
    with open(path, encoding="utf-8") as fh:
        return parse_scenarios(fh.read())


def _render_clause(network: Network, name: str, states: frozenset[str]) -> str:
    try:
        declared = network.dag.variable(name).states
        ordered = [s for s in declared if s in states]
        ordered += sorted(states - set(declared))
    except TurfBbnError:
        ordered = sorted(states)
    return f"{name} in {{{','.join(ordered)}}}"


def _render_constraints(network: Network, constraints: Evidence) -> tuple[str, ...]:
    return tuple(
        _render_clause(network, name, states)
        for name, states in constraints.constraints.items()
    )


def run_scenarios(network: Network, scenarios: list[Scenario]) -> ScenarioReport:
    """Run every scenario; per-scenario failures become error rows, not raises."""
    rows = []
    for scenario in scenarios:
        clauses = _render_constraints(network, scenario.evidence)
        event_clause = "; ".join(_render_constraints(network, scenario.event))
        try:
            sampled = lw_query(network, scenario.event, scenario.evidence,
                               n=scenario.n_samples, seed=scenario.seed)
            exact = exact_query(network, scenario.event, scenario.evidence)
            within = sampled.ci_low - 1e-12 <= exact.estimate <= sampled.ci_high + 1e-12
            rows.append(ScenarioRow(
                name=scenario.name, evidence_clauses=clauses,
                event_clause=event_clause, sampled=sampled, exact=exact,
                exact_within_ci=within,
            ))
        except TurfBbnError as exc:
            rows.append(ScenarioRow(
                name=scenario.name, evidence_clauses=clauses,
                event_clause=event_clause,
                error=f"{type(exc).__name__}: {exc}",
            ))
    return ScenarioReport(rows=tuple(rows))


def run_reverse_scenarios(network: Network, drivers: list[str],
                          response_event: Evidence,
                          groups: dict[str, tuple[str, ...]] | None = None
                          ) -> ReverseReport:
    """Posterior over each driver's states given the response event.

    For drivers with a named favourable state group, the report also carries
    the total mass on that group.
    """
    if groups is None:
        groups = DEFAULT_REVERSE_GROUPS
    rows = []
    for driver in drivers:
        try:
            distribution = reverse_query(network, driver, response_event)
            group = groups.get(driver)
            mass = None
            if group is not None:
                var = network.dag.variable(driver)
                for state in group:
                    var.state_index(state)  # unknown group states are a bug
                mass = sum(distribution[state] for state in group)
            rows.append(ReverseRow(driver=driver, distribution=distribution,
                                   group_states=group, group_mass=mass))
        except TurfBbnError as exc:
            rows.append(ReverseRow(driver=driver, distribution={},
                                   error=f"{type(exc).__name__}: {exc}"))
    return ReverseReport(
        event_clauses=_render_constraints(network, response_event),
        rows=tuple(rows),
    )
