"""Score-based structure learning and CPT estimation from complete discrete data.

The search optimizes a decomposable penalized log-likelihood score (BIC) over
DAG space with tabu search: single-edge add/delete/reverse moves, a tabu list
forbidding move undos, aspiration for moves that beat the incumbent best, and
seeded random restarts. An exhaustive enumerator over all DAGs doubles as the
test oracle for small problems.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import Cpt, Dag, Edge, Network, Variable, build_network
from .errors import (
    EmptyDataset,
    InfeasibleConstraints,
    TooManyVariables,
    UnknownEdge,
    UnknownVariable,
)


@dataclass(frozen=True)
class DiscreteDataset:
    """Complete categorical observations: one state index per variable per row."""

    variables: tuple[Variable, ...]
    rows: np.ndarray = field(repr=False)  # shape (N, len(variables)), int

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.size == 0:
            rows = rows.reshape(0, len(self.variables))
        if rows.ndim != 2 or rows.shape[1] != len(self.variables):
            raise ValueError(
                f"rows must be N x {len(self.variables)}, got shape {rows.shape}"
            )
        for j, v in enumerate(self.variables):
            col = rows[:, j]
            if col.size and (col.min() < 0 or col.max() >= v.cardinality):
                raise ValueError(f"state index out of range for variable {v.name!r}")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def row_count(self) -> int:
        return int(self.rows.shape[0])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.index_of(name)]

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise UnknownVariable(f"no variable named {name!r} in dataset")

    def variable(self, name: str) -> Variable:
        return self.variables[self.index_of(name)]


@dataclass(frozen=True)
class SearchConfig:
    """Tabu search settings; defaults sized for small survey cohorts."""

    max_iterations: int = 200
    tabu_list_length: int = 10
    max_parents: int = 4
    restarts: int = 5
    seed: int = 0
    required_edges: frozenset[Edge] = frozenset()
    forbidden_edges: frozenset[Edge] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "required_edges", frozenset(self.required_edges))
        object.__setattr__(self, "forbidden_edges", frozenset(self.forbidden_edges))
        if self.tabu_list_length < 1:
            raise ValueError("tabu_list_length must be >= 1")
        if self.max_parents < 1:
            raise ValueError("max_parents must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        overlap = self.required_edges & self.forbidden_edges
        if overlap:
            raise ValueError(f"edges both required and forbidden: {sorted(overlap)}")


@dataclass(frozen=True)
class ScoredDag:
    """A DAG with its total score and the per-variable family scores."""

    dag: Dag
    total_score: float
    family_scores: dict[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "family_scores", dict(self.family_scores))
        if abs(self.total_score - sum(self.family_scores.values())) > 1e-6:
            raise ValueError("total_score disagrees with the family score sum")


class FamilyScorer:
    """BIC family scores over one dataset, cached by (child, parent set).

    score(child | parents) = sum_rows log p_hat(child | parents)
                             - 0.5 * ln(N) * q * (r - 1)

    where p_hat is the maximum-likelihood row estimate, q the product of
    parent cardinalities and r the child cardinality. The cache is read-only
    after warm-up and safe to share across concurrent readers.
    """

    def __init__(self, dataset: DiscreteDataset):
        if dataset.row_count == 0:
            raise EmptyDataset("cannot score an empty dataset")
        self.dataset = dataset
        self._index = {v.name: i for i, v in enumerate(dataset.variables)}
        self._cards = np.array([v.cardinality for v in dataset.variables])
        self._log_n = math.log(dataset.row_count)
        self._cache: dict[tuple[str, frozenset[str]], float] = {}

    def family_score(self, child: str, parents: frozenset[str] | set[str]) -> float:
        parents = frozenset(parents)
        if child in parents:
            raise ValueError(f"{child!r} cannot be its own parent")
        key = (child, parents)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        score = self._compute(child, parents)
        self._cache[key] = score
        return score

    def _compute(self, child: str, parents: frozenset[str]) -> float:
        rows = self.dataset.rows
        ci = self._index.get(child)
        if ci is None:
            raise UnknownVariable(f"no variable named {child!r} in dataset")
        parent_idx = sorted(self._index[p] for p in self.checked(parents))
        r = int(self._cards[ci])
        q = 1
        combo = np.zeros(rows.shape[0], dtype=np.int64)
        for j in parent_idx:
            card = int(self._cards[j])
            combo = combo * card + rows[:, j]
            q *= card
        joint = combo * r + rows[:, ci]
        counts = np.bincount(joint, minlength=q * r).reshape(q, r).astype(float)
        row_totals = counts.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = np.log(counts) - np.log(row_totals)[:, None]
        ll = float(np.sum(counts[counts > 0] * log_p[counts > 0]))
        penalty = 0.5 * self._log_n * q * (r - 1)
        return ll - penalty

    def checked(self, names) -> frozenset[str]:
        for name in names:
            if name not in self._index:
                raise UnknownVariable(f"no variable named {name!r} in dataset")
        return frozenset(names)


def family_score(dataset: DiscreteDataset, child: str, parents: set[str] | frozenset[str]) -> float:
    """BIC family score of `child` given `parents` (uncached convenience form)."""
    return FamilyScorer(dataset).family_score(child, parents)


def score_dag(dataset: DiscreteDataset, dag: Dag, scorer: FamilyScorer | None = None) -> ScoredDag:
    """Score a DAG as the sum of its independent family scores."""
    scorer = scorer or FamilyScorer(dataset)
    family_scores = {
        v.name: scorer.family_score(v.name, frozenset(dag.parents(v.name)))
        for v in dag.variables
    }
    return ScoredDag(dag=dag, total_score=sum(family_scores.values()),
                     family_scores=family_scores)


# --- tabu search ---------------------------------------------------------------

# A move is (kind, (parent, child)) with kind in {"add", "del", "rev"}.
Move = tuple[str, Edge]

_KIND_RANK = {"del": 0, "rev": 1, "add": 2}


def _undoes(candidate: Move, applied: Move) -> bool:
    ck, ce = candidate
    ak, ae = applied
    if ck == "add" and ak == "del":
        return ce == ae
    if ck == "del" and ak == "add":
        return ce == ae
    if ck == "rev" and ak == "rev":
        return ce == (ae[1], ae[0])
    return False


class _SearchState:
    """Mutable DAG state for one tabu run over fixed variables."""

    def __init__(self, names: tuple[str, ...], scorer: FamilyScorer,
                 edges: set[Edge]):
        self.names = names
        self.scorer = scorer
        self.parents: dict[str, set[str]] = {n: set() for n in names}
        self.children: dict[str, set[str]] = {n: set() for n in names}
        for p, c in edges:
            self.parents[c].add(p)
            self.children[p].add(c)
        self.family: dict[str, float] = {
            n: scorer.family_score(n, self.parents[n]) for n in names
        }

    @property
    def score(self) -> float:
        return sum(self.family.values())

    def edges(self) -> set[Edge]:
        return {(p, c) for c, ps in self.parents.items() for p in ps}

    def has_path(self, src: str, dst: str, *, skip_edge: Edge | None = None) -> bool:
        """Directed reachability src -> dst, optionally ignoring one edge."""
        if src == dst:
            return True
        stack = [src]
        seen = {src}
        while stack:
            node = stack.pop()
            for nxt in self.children[node]:
                if skip_edge is not None and (node, nxt) == skip_edge:
                    continue
                if nxt == dst:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def apply(self, move: Move) -> None:
        kind, (u, v) = move
        if kind == "add":
            self.parents[v].add(u)
            self.children[u].add(v)
            self.family[v] = self.scorer.family_score(v, self.parents[v])
        elif kind == "del":
            self.parents[v].discard(u)
            self.children[u].discard(v)
            self.family[v] = self.scorer.family_score(v, self.parents[v])
        else:  # rev: u->v becomes v->u
            self.parents[v].discard(u)
            self.children[u].discard(v)
            self.parents[u].add(v)
            self.children[v].add(u)
            self.family[v] = self.scorer.family_score(v, self.parents[v])
            self.family[u] = self.scorer.family_score(u, self.parents[u])

    def candidate_moves(self, config: SearchConfig) -> list[tuple[Move, float]]:
        """All feasible moves with their score deltas, deterministically ordered.

        Only the affected families are rescored; everything else is looked up
        from the shared cache.
        """
        out: list[tuple[Move, float]] = []
        fs = self.scorer.family_score
        for u, v in itertools.permutations(self.names, 2):
            edge = (u, v)
            if v in self.children[u]:
                continue
            if edge in config.forbidden_edges:
                continue
            if len(self.parents[v]) >= config.max_parents:
                continue
            if self.has_path(v, u):
                continue  # u->v would close a cycle
            delta = fs(v, self.parents[v] | {u}) - self.family[v]
            out.append((("add", edge), delta))
        for edge in sorted(self.edges()):
            u, v = edge
            if edge in config.required_edges:
                continue
            delta = fs(v, self.parents[v] - {u}) - self.family[v]
            out.append((("del", edge), delta))
            reversed_edge = (v, u)
            if reversed_edge in config.forbidden_edges:
                continue
            if len(self.parents[u]) >= config.max_parents:
                continue
            if self.has_path(u, v, skip_edge=edge):
                continue  # an alternate u..v path makes v->u cyclic
            delta = (
                fs(v, self.parents[v] - {u}) - self.family[v]
                + fs(u, self.parents[u] | {v}) - self.family[u]
            )
            out.append((("rev", edge), delta))
        out.sort(key=lambda mv: (_KIND_RANK[mv[0][0]], mv[0][1]))
        return out


def _dag_sort_key(edges: set[Edge]) -> tuple[int, list[Edge]]:
    return (len(edges), sorted(edges))


def tabu_search(dataset: DiscreteDataset, config: SearchConfig = SearchConfig()) -> ScoredDag:
    """Best-scoring DAG found by tabu search with seeded random restarts.

    Each run starts from the required-edge skeleton (the first unperturbed,
    later ones perturbed by random feasible edge additions), then repeatedly
    applies the best non-tabu single-edge move; undoing a tabu-listed move is
    allowed only when it would beat the global best (aspiration). The
    incumbent best is updated only on strict improvement, so the result never
    scores below the start DAG. Deterministic for a fixed seed.
    """
    if dataset.row_count == 0:
        raise EmptyDataset("cannot learn from an empty dataset")
    scorer = FamilyScorer(dataset)
    names = dataset.names
    base_edges = _checked_required(dataset, config)

    rng = random.Random(config.seed)
    best_edges: set[Edge] | None = None
    best_score = -math.inf

    for run in range(config.restarts):
        state = _SearchState(names, scorer, set(base_edges))
        if run > 0:
            _perturb(state, config, rng)
        tabu: deque[Move] = deque(maxlen=config.tabu_list_length)
        incumbent_edges = state.edges()
        incumbent_score = state.score

        for _ in range(config.max_iterations):
            chosen: tuple[Move, float] | None = None
            for move, delta in sorted(state.candidate_moves(config),
                                      key=lambda mv: -mv[1]):
                if any(_undoes(move, applied) for applied in tabu):
                    if state.score + delta <= incumbent_score:
                        continue  # tabu, and no aspiration
                chosen = (move, delta)
                break
            if chosen is None:
                break
            move, _ = chosen
            state.apply(move)
            tabu.append(move)
            if state.score > incumbent_score:
                incumbent_score = state.score
                incumbent_edges = state.edges()

        if incumbent_score > best_score + 1e-9 or (
            abs(incumbent_score - best_score) <= 1e-9
            and best_edges is not None
            and _dag_sort_key(incumbent_edges) < _dag_sort_key(best_edges)
        ) or best_edges is None:
            best_score = max(best_score, incumbent_score)
            best_edges = incumbent_edges

    dag = Dag(variables=dataset.variables, edges=frozenset(best_edges or set()))
    return score_dag(dataset, dag, scorer)


def _checked_required(dataset: DiscreteDataset, config: SearchConfig) -> set[Edge]:
    names = set(dataset.names)
    for p, c in sorted(config.required_edges | config.forbidden_edges):
        if p not in names or c not in names:
            raise UnknownVariable(f"constraint names unknown variable in edge {(p, c)}")
    required = set(config.required_edges)
    if not _is_acyclic(dataset.names, required):
        raise InfeasibleConstraints("required edges form a cycle")
    by_child: dict[str, int] = {}
    for _, c in required:
        by_child[c] = by_child.get(c, 0) + 1
        if by_child[c] > config.max_parents:
            raise InfeasibleConstraints(
                f"required edges give {c!r} more than max_parents={config.max_parents} parents"
            )
    return required


def _perturb(state: _SearchState, config: SearchConfig, rng: random.Random) -> None:
    """Seed a restart with random feasible edge additions (one per variable)."""
    for _ in range(len(state.names)):
        additions = [
            move for move, _ in state.candidate_moves(config) if move[0] == "add"
        ]
        if not additions:
            return
        state.apply(rng.choice(additions))


def _is_acyclic(names: tuple[str, ...], edges: set[Edge]) -> bool:
    indegree = {n: 0 for n in names}
    children: dict[str, list[str]] = {n: [] for n in names}
    for p, c in edges:
        indegree[c] += 1
        children[p].append(c)
    ready = [n for n in names if indegree[n] == 0]
    seen = 0
    while ready:
        node = ready.pop()
        seen += 1
        for c in children[node]:
            indegree[c] -= 1
            if indegree[c] == 0:
                ready.append(c)
    return seen == len(names)


def exhaustive_search(dataset: DiscreteDataset, max_vars: int = 5) -> ScoredDag:
    """Global score maximum by enumerating every DAG (test oracle).

    Enumerates orientation choices per unordered pair (absent, one way, the
    other) and filters for acyclicity. Ties are broken by fewest edges, then
    lexicographic edge list. Limited to `max_vars` variables.
    """
    names = dataset.names
    if len(names) > max_vars or len(names) > 5:
        raise TooManyVariables(
            f"exhaustive enumeration supports at most {min(max_vars, 5)} variables"
        )
    scorer = FamilyScorer(dataset)
    pairs = list(itertools.combinations(names, 2))

    best: tuple[float, tuple[int, list[Edge]], set[Edge]] | None = None
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = set()
        for (u, v), c in zip(pairs, choice):
            if c == 1:
                edges.add((u, v))
            elif c == 2:
                edges.add((v, u))
        if not _is_acyclic(names, edges):
            continue
        parents: dict[str, set[str]] = {n: set() for n in names}
        for p, c in edges:
            parents[c].add(p)
        total = sum(scorer.family_score(n, parents[n]) for n in names)
        key = _dag_sort_key(edges)
        if best is None or total > best[0] + 1e-9 or (
            abs(total - best[0]) <= 1e-9 and key < best[1]
        ):
            best = (total, key, edges)

    assert best is not None  # the empty DAG always qualifies
    dag = Dag(variables=dataset.variables, edges=frozenset(best[2]))
    return score_dag(dataset, dag, scorer)


def count_dags(n_vars: int) -> int:
    """Number of labeled DAGs on n variables, by the same enumeration."""
    names = tuple(f"v{i}" for i in range(n_vars))
    pairs = list(itertools.combinations(names, 2))
    total = 0
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = set()
        for (u, v), c in zip(pairs, choice):
            if c == 1:
                edges.add((u, v))
            elif c == 2:
                edges.add((v, u))
        if _is_acyclic(names, edges):
            total += 1
    return total


# --- parameter fitting -----------------------------------------------------------


def fit_cpts(dataset: DiscreteDataset, dag: Dag, alpha: float = 0.0) -> Network:
    """Laplace-smoothed maximum-likelihood CPTs for every variable.

    Each row is (count + alpha) / (row_total + alpha * r); rows that were
    never observed fall back to the uniform vector when alpha is 0.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    index = {v.name: i for i, v in enumerate(dataset.variables)}
    cpts = []
    for v in dag.variables:
        if v.name not in index:
            raise UnknownVariable(f"no variable named {v.name!r} in dataset")
        parents = dag.parents(v.name)
        parent_cards = tuple(dag.variable(p).cardinality for p in parents)
        r = v.cardinality
        q = int(np.prod(parent_cards)) if parent_cards else 1
        combo = np.zeros(dataset.row_count, dtype=np.int64)
        for p in parents:
            combo = combo * dag.variable(p).cardinality + dataset.rows[:, index[p]]
        joint = combo * r + dataset.rows[:, index[v.name]]
        counts = np.bincount(joint, minlength=q * r).reshape(q, r).astype(float)
        table = counts + alpha
        totals = table.sum(axis=1)
        empty = totals == 0.0
        table[empty] = 1.0 / r
        totals[empty] = 1.0
        table /= totals[:, None]
        cpts.append(Cpt(child=v.name, parents=parents, parent_cards=parent_cards,
                        table=table))
    return build_network(dag, cpts)


def edge_strength(dataset: DiscreteDataset, dag: Dag, edge: Edge,
                  scorer: FamilyScorer | None = None) -> float:
    """Family-score gain at the child from keeping `edge` versus dropping it."""
    if edge not in dag.edges:
        raise UnknownEdge(f"edge {edge} is not in the dag")
    scorer = scorer or FamilyScorer(dataset)
    parent, child = edge
    parents = frozenset(dag.parents(child))
    return scorer.family_score(child, parents) - scorer.family_score(child, parents - {parent})


def all_edge_strengths(dataset: DiscreteDataset, dag: Dag) -> dict[Edge, float]:
    scorer = FamilyScorer(dataset)
    return {edge: edge_strength(dataset, dag, edge, scorer) for edge in sorted(dag.edges)}


# --- constraint files --------------------------------------------------------------


def parse_constraints(text: str) -> tuple[frozenset[Edge], frozenset[Edge]]:
    """Parse `require parent -> child` / `forbid parent -> child` lines.

    Blank lines and `#` comments are ignored. Returns (required, forbidden).
    """
    from .errors import ParseError

    required: set[Edge] = set()
    forbidden: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[2] != "->" or parts[0] not in ("require", "forbid"):
            raise ParseError(
                f"expected 'require|forbid parent -> child', got {raw.strip()!r}",
                location=f"line {lineno}",
            )
        edge = (parts[1], parts[3])
        (required if parts[0] == "require" else forbidden).add(edge)
    return frozenset(required), frozenset(forbidden)
