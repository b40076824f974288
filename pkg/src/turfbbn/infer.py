"""Conditional probability queries over a fitted network.

Three query styles: exact enumeration (the reference answer on small
networks), likelihood weighting (the sampled estimate with a confidence
interval), and reverse queries (posterior over a driver's states given a
response event). Evidence and events are set-valued: a variable may be
constrained to any non-empty subset of its states, which encodes clauses
like "high or very high".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binning import states_above, states_below
from .core import Evidence, Network, topological_order
from .errors import (
    AllZeroWeights,
    InconsistentQuery,
    TooManyVariables,
    UnknownVariable,
    ZeroProbabilityEvidence,
)

_EXACT_NODE_LIMIT = 20
_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class QueryEvent(Evidence):
    """A target event: like evidence, but required to constrain something."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if not self.constraints:
            raise ValueError("a query event must constrain at least one variable")


@dataclass(frozen=True)
class QueryResult:
    estimate: float
    ci_low: float
    ci_high: float
    n_samples: int
    method: str  # "exact" | "likelihood_weighting"

    def __post_init__(self) -> None:
        if self.method not in ("exact", "likelihood_weighting"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.ci_low <= self.estimate <= self.ci_high <= 1.0:
            raise ValueError(
                "require 0 <= ci_low <= estimate <= ci_high <= 1, got "
                f"({self.ci_low}, {self.estimate}, {self.ci_high})"
            )
        if self.method == "exact" and not self.ci_low == self.estimate == self.ci_high:
            raise ValueError("exact results must report a degenerate interval")


def _allowed_indices(network: Network, *constraint_maps: Evidence | None
                     ) -> dict[str, frozenset[int]]:
    """Merge constraints into per-variable allowed state-index sets.

    A variable named by several maps keeps the intersection; an empty
    intersection means the maps contradict each other.
    """
    merged: dict[str, frozenset[int]] = {}
    for m in constraint_maps:
        if m is None:
            continue
        m.validate_against(network)
        for name, states in m.constraints.items():
            var = network.dag.variable(name)
            idx = frozenset(var.state_index(s) for s in states)
            if name in merged:
                idx &= merged[name]
                if not idx:
                    raise InconsistentQuery(
                        f"constraints on {name!r} share no state"
                    )
            merged[name] = idx
    return merged


def _restricted_mass(network: Network, allowed: dict[str, frozenset[int]]) -> float:
    """Total joint probability of assignments within the allowed state sets.

    Depth-first enumeration in topological order; zero-probability branches
    are pruned as soon as they appear.
    """
    order = topological_order(network.dag)
    cpts = [network.cpts[name] for name in order]
    var_pos = {name: i for i, name in enumerate(order)}
    parent_pos = [tuple(var_pos[p] for p in c.parents) for c in cpts]
    choices = [
        sorted(allowed[name]) if name in allowed
        else list(range(network.dag.variable(name).cardinality))
        for name in order
    ]
    assignment = [0] * len(order)

    def walk(depth: int, weight: float) -> float:
        if depth == len(order):
            return weight
        cpt = cpts[depth]
        strides = cpt.parent_cards
        row = 0
        for pos, card in zip(parent_pos[depth], strides):
            row = row * card + assignment[pos]
        probs = cpt.table[row]
        total = 0.0
        for state in choices[depth]:
            p = probs[state]
            if p == 0.0:
                continue
            assignment[depth] = state
            total += walk(depth + 1, weight * p)
        return total

    return walk(0, 1.0)


def exact_query(network: Network, event: Evidence,
                evidence: Evidence | None = None) -> QueryResult:
    """P(event | evidence) by exact enumeration of the joint distribution.

    Overlapping variables are allowed when their state sets intersect; the
    intersection is what counts as the event holding.
    """
    if len(network.dag.variables) > _EXACT_NODE_LIMIT:
        raise TooManyVariables(
            f"exact enumeration supports at most {_EXACT_NODE_LIMIT} variables"
        )
    evidence_idx = _allowed_indices(network, evidence)
    joint_idx = _allowed_indices(network, event, evidence)
    p_evidence = _restricted_mass(network, evidence_idx) if evidence_idx else 1.0
    if p_evidence <= 0.0:
        raise ZeroProbabilityEvidence("the evidence has probability zero")
    p_joint = _restricted_mass(network, joint_idx) if joint_idx else 1.0
    estimate = min(1.0, p_joint / p_evidence)
    return QueryResult(estimate=estimate, ci_low=estimate, ci_high=estimate,
                       n_samples=0, method="exact")


def lw_query(network: Network, event: Evidence, evidence: Evidence | None = None,
             n: int = 2000, seed: int = 0) -> QueryResult:
    """P(event | evidence) by likelihood weighting with `n` samples.

    Evidence variables are clamped: the CPT row is renormalized over the
    allowed subset and the sample weight picks up the subset's row mass.
    The 95% interval is a normal approximation on the weighted ratio.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    evidence_idx = _allowed_indices(network, evidence)
    joint_idx = _allowed_indices(network, event, evidence)  # validates consistency
    event_idx = _allowed_indices(network, event)

    order = topological_order(network.dag)
    rng = np.random.Generator(np.random.PCG64(seed))
    uniforms = rng.random((n, len(order)))

    sampled: dict[str, np.ndarray] = {}
    log_w = np.zeros(n)
    dead = np.zeros(n, dtype=bool)  # samples whose evidence mass hit zero
    for depth, name in enumerate(order):
        cpt = network.cpts[name]
        var = network.dag.variable(name)
        r = var.cardinality
        row_idx = np.zeros(n, dtype=np.int64)
        for parent, card in zip(cpt.parents, cpt.parent_cards):
            row_idx = row_idx * card + sampled[parent]
        probs = cpt.table[row_idx]  # (n, r)
        if name in evidence_idx:
            mask = np.zeros(r)
            mask[list(evidence_idx[name])] = 1.0
            masked = probs * mask
            mass = masked.sum(axis=1)
            zero = mass <= 0.0
            dead |= zero
            safe_mass = np.where(zero, 1.0, mass)
            with np.errstate(divide="ignore"):
                log_w += np.where(zero, -np.inf, np.log(safe_mass))
            probs = np.where(zero[:, None], mask / mask.sum(), masked / safe_mass[:, None])
        cum = np.cumsum(probs, axis=1)
        draws = (uniforms[:, depth][:, None] * cum[:, -1][:, None] > cum).sum(axis=1)
        sampled[name] = np.minimum(draws, r - 1).astype(np.int64)

    weights = np.where(dead, 0.0, np.exp(log_w))
    total_w = float(weights.sum())
    if total_w <= 0.0:
        raise AllZeroWeights("every sample conflicts with the evidence")

    holds = np.ones(n, dtype=bool)
    for name, idx in event_idx.items():
        member = np.zeros(network.dag.variable(name).cardinality, dtype=bool)
        member[list(idx)] = True
        holds &= member[sampled[name]]

    estimate = float(weights[holds].sum() / total_w)
    residual = holds.astype(float) - estimate
    variance = float(np.sum((weights * residual) ** 2)) / total_w**2
    half = _Z95 * math.sqrt(max(variance, 0.0))
    return QueryResult(
        estimate=estimate,
        ci_low=max(0.0, min(estimate, estimate - half)),
        ci_high=min(1.0, max(estimate, estimate + half)),
        n_samples=n,
        method="likelihood_weighting",
    )


def reverse_query(network: Network, driver: str,
                  response_event: Evidence) -> dict[str, float]:
    """Posterior P(driver = s | response_event) for every state s of the driver."""
    var = network.dag.variable(driver)
    if driver in response_event.constraints:
        raise InconsistentQuery(
            f"driver {driver!r} may not appear in the response event"
        )
    posterior = {
        state: exact_query(network,
                           Evidence.of(**{driver: state}),
                           response_event).estimate
        for state in var.states
    }
    return posterior


def good_state_event(network: Network,
                     e_hat_threshold: float = 0.59,
                     illegal_threshold: float = 0.31,
                     *,
                     e_hat_variable: str = "relative_size",
                     illegal_variable: str = "illegal_proportion") -> QueryEvent:
    """The compound "resource in good state" event over both response nodes.

    Good state means relative median size above `e_hat_threshold` and illegal
    proportion at or below `illegal_threshold`. Thresholds must be bin
    boundaries of the corresponding variables.
    """
    names = {v.name for v in network.dag.variables}
    for needed in (e_hat_variable, illegal_variable):
        if needed not in names:
            raise UnknownVariable(f"no variable named {needed!r} in the network")
    size_states = states_above(network.dag.variable(e_hat_variable).states,
                               e_hat_threshold)
    illegal_states = states_below(network.dag.variable(illegal_variable).states,
                                  illegal_threshold)
    return QueryEvent(constraints={
        e_hat_variable: frozenset(size_states),
        illegal_variable: frozenset(illegal_states),
    })
