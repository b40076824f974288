"""Domain types for discrete Bayesian networks and their validity rules.

A network is a directed acyclic graph over categorical variables plus one
conditional probability table per variable. All types are immutable after
construction and safe to share across concurrent readers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CptShapeMismatch,
    CycleDetected,
    RowNotNormalized,
    UnknownState,
    UnknownVariable,
)

ROW_SUM_TOL = 1e-9

Edge = tuple[str, str]


@dataclass(frozen=True)
class Variable:
    """A categorical variable with at least two uniquely labelled states.

    State order is significant for ordinal variables (it defines "above" and
    "below" in threshold events) and is preserved but meaningless for nominal
    ones.
    """

    name: str
    states: tuple[str, ...]
    kind: str = "nominal"  # "ordinal" | "nominal"

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) < 2:
            raise ValueError(f"variable {self.name!r} needs >= 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"variable {self.name!r} has duplicate state labels")
        if self.kind not in ("ordinal", "nominal"):
            raise ValueError(f"variable {self.name!r}: kind must be ordinal or nominal")

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(f"variable {self.name!r} has no state {state!r}") from None


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph over declared variables.

    Edges are ordered (parent, child) pairs; self-edges, duplicates, cycles
    and undeclared endpoints are rejected at construction.
    """

    variables: tuple[Variable, ...]
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        declared = set(names)
        edges = frozenset(self.edges)
        object.__setattr__(self, "edges", edges)
        for parent, child in edges:
            if parent not in declared:
                raise UnknownVariable(f"edge endpoint {parent!r} is not declared")
            if child not in declared:
                raise UnknownVariable(f"edge endpoint {child!r} is not declared")
            if parent == child:
                raise CycleDetected(f"self-edge on {parent!r}")
        topological_order(self)  # raises CycleDetected on a cycle

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise UnknownVariable(f"no variable named {name!r}")

    def parents(self, name: str) -> tuple[str, ...]:
        """Parents of `name` in declaration order of the variables."""
        self.variable(name)
        order = {v.name: i for i, v in enumerate(self.variables)}
        ps = sorted((p for p, c in self.edges if c == name), key=order.__getitem__)
        return tuple(ps)

    def children(self, name: str) -> tuple[str, ...]:
        self.variable(name)
        order = {v.name: i for i, v in enumerate(self.variables)}
        cs = sorted((c for p, c in self.edges if p == name), key=order.__getitem__)
        return tuple(cs)


def topological_order(dag: Dag) -> list[str]:
    """Variable names ordered so every parent precedes every child.

    Deterministic: ties are broken by declaration order (Kahn's algorithm
    with a declaration-ordered ready list).
    """
    names = [v.name for v in dag.variables]
    indegree = {n: 0 for n in names}
    for _, child in dag.edges:
        indegree[child] += 1
    ready = [n for n in names if indegree[n] == 0]
    out: list[str] = []
    while ready:
        node = ready.pop(0)
        out.append(node)
        newly = []
        for parent, child in dag.edges:
            if parent == node:
                indegree[child] -= 1
                if indegree[child] == 0:
                    newly.append(child)
        ready.extend(sorted(newly, key=names.index))
        ready.sort(key=names.index)
    if len(out) != len(names):
        remaining = [n for n in names if n not in out]
        raise CycleDetected(f"cycle among {remaining}")
    return out


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table of `child` given an ordered parent list.

    `table` has one row per parent-state combination (row-major, last parent
    varying fastest) and one column per child state. Every row sums to 1
    within ROW_SUM_TOL.
    """

    child: str
    parents: tuple[str, ...]
    parent_cards: tuple[int, ...]
    table: np.ndarray = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cpt):
            return NotImplemented
        return (
            self.child == other.child
            and self.parents == other.parents
            and self.parent_cards == other.parent_cards
            and np.array_equal(self.table, other.table)
        )

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "parent_cards", tuple(self.parent_cards))
        if len(self.parents) != len(self.parent_cards):
            raise CptShapeMismatch(
                f"cpt for {self.child!r}: {len(self.parents)} parents but "
                f"{len(self.parent_cards)} cardinalities"
            )
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2:
            raise CptShapeMismatch(f"cpt for {self.child!r}: table must be 2-D")
        q = 1
        for c in self.parent_cards:
            q *= c
        if table.shape[0] != q:
            raise CptShapeMismatch(
                f"cpt for {self.child!r}: {table.shape[0]} rows, expected {q}"
            )
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise RowNotNormalized(f"cpt for {self.child!r}: probabilities outside [0,1]")
        sums = table.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise RowNotNormalized(
                f"cpt for {self.child!r}: row {bad[0]} sums to {sums[bad[0]]!r}"
            )
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    @property
    def child_cardinality(self) -> int:
        return int(self.table.shape[1])

    def row_index(self, parent_states: tuple[int, ...]) -> int:
        """Row number for a tuple of parent state indices (last parent fastest)."""
        idx = 0
        for card, s in zip(self.parent_cards, parent_states):
            idx = idx * card + s
        return idx

    def row(self, parent_states: tuple[int, ...]) -> np.ndarray:
        return self.table[self.row_index(parent_states)]


def parent_combinations(cpt: Cpt, parent_states: dict[str, tuple[str, ...]]) -> list[tuple[str, ...]]:
    """Enumerate parent-state tuples in the CPT's row order.

    Row-major with the last parent varying fastest; a parentless CPT has a
    single empty combination.
    """
    state_lists = [parent_states[p] for p in cpt.parents]
    return [tuple(combo) for combo in itertools.product(*state_lists)]


@dataclass(frozen=True, eq=False)
class Network:
    """An immutable validated Bayesian network: DAG plus one CPT per variable."""

    dag: Dag
    cpts: dict[str, Cpt]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self.dag == other.dag and self.cpts == other.cpts

    def __post_init__(self) -> None:
        object.__setattr__(self, "cpts", dict(self.cpts))
        declared = {v.name: v for v in self.dag.variables}
        if set(self.cpts) != set(declared):
            missing = set(declared) - set(self.cpts)
            extra = set(self.cpts) - set(declared)
            raise CptShapeMismatch(
                f"cpt set mismatch: missing {sorted(missing)}, extra {sorted(extra)}"
            )
        for name, cpt in self.cpts.items():
            if cpt.child != name:
                raise CptShapeMismatch(f"cpt stored under {name!r} declares child {cpt.child!r}")
            expected_parents = self.dag.parents(name)
            if tuple(cpt.parents) != expected_parents:
                raise CptShapeMismatch(
                    f"cpt for {name!r} has parents {list(cpt.parents)}, "
                    f"dag says {list(expected_parents)}"
                )
            expected_cards = tuple(declared[p].cardinality for p in cpt.parents)
            if cpt.parent_cards != expected_cards:
                raise CptShapeMismatch(f"cpt for {name!r}: parent cardinalities disagree with dag")
            if cpt.child_cardinality != declared[name].cardinality:
                raise CptShapeMismatch(f"cpt for {name!r}: child cardinality disagrees with dag")

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.dag.variables

    def variable(self, name: str) -> Variable:
        return self.dag.variable(name)


def build_network(dag: Dag, cpts: list[Cpt]) -> Network:
    """Assemble and validate a Network from a DAG and a list of CPTs."""
    by_child: dict[str, Cpt] = {}
    for cpt in cpts:
        if cpt.child in by_child:
            raise CptShapeMismatch(f"duplicate cpt for {cpt.child!r}")
        by_child[cpt.child] = cpt
    return Network(dag=dag, cpts=by_child)


@dataclass(frozen=True)
class Evidence:
    """Set-valued conditioning: variable name -> allowed subset of its states.

    A variable appears at most once; an empty mapping means "no evidence".
    Allowed-state sets encode disjunctive clauses such as "very high or high".
    """

    constraints: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        frozen = {}
        for var, states in self.constraints.items():
            states = frozenset(states)
            if not states:
                raise ValueError(f"evidence on {var!r} allows no states")
            frozen[var] = states
        object.__setattr__(self, "constraints", frozen)

    @classmethod
    def of(cls, **constraints: list[str] | tuple[str, ...] | set[str] | str) -> "Evidence":
        out = {}
        for var, states in constraints.items():
            out[var] = frozenset([states] if isinstance(states, str) else states)
        return cls(out)

    def validate_against(self, network: Network) -> None:
        for var, states in self.constraints.items():
            variable = network.variable(var)  # raises UnknownVariable
            for s in states:
                variable.state_index(s)  # raises UnknownState

    def __bool__(self) -> bool:
        return bool(self.constraints)
