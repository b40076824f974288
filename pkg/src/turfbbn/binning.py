"""Canonical labels for interval bins induced by ordered cut points.

Both the discretization pipeline and threshold-event construction rely on the
same label convention so that cut points can be recovered from a variable's
state labels alone. A boundary value always joins the lower bin, so the bins
for cuts [a, b] are (-inf, a], (a, b], (b, +inf).
"""

from __future__ import annotations

from .errors import ThresholdNotACutPoint


def format_cut(value: float) -> str:
    """Format a cut point compactly and unambiguously (no trailing zeros)."""
    text = f"{value:.10g}"
    return text


def bin_labels(cuts: list[float]) -> list[str]:
    """State labels for the bins induced by strictly increasing cut points.

    For cuts [0.31] the labels are ["le_0.31", "gt_0.31"]; a middle bin
    (a, b] is labelled "a_to_b".
    """
    if not cuts:
        raise ValueError("at least one cut point is required")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ValueError(f"cut points must be strictly increasing: {cuts}")
    labels = [f"le_{format_cut(cuts[0])}"]
    for lo, hi in zip(cuts, cuts[1:]):
        labels.append(f"{format_cut(lo)}_to_{format_cut(hi)}")
    labels.append(f"gt_{format_cut(cuts[-1])}")
    return labels


def cuts_from_labels(states: tuple[str, ...] | list[str]) -> list[float]:
    """Recover the ordered cut points from labels produced by `bin_labels`.

    Raises ValueError when the labels do not follow the convention.
    """
    states = list(states)
    if len(states) < 2 or not states[0].startswith("le_") or not states[-1].startswith("gt_"):
        raise ValueError(f"states {states} are not threshold bins")
    cuts = [float(states[0][3:])]
    for label in states[1:-1]:
        lo, sep, hi = label.partition("_to_")
        if not sep:
            raise ValueError(f"state {label!r} is not an interval label")
        if float(lo) != cuts[-1]:
            raise ValueError(f"state {label!r} does not continue from cut {cuts[-1]}")
        cuts.append(float(hi))
    if float(states[-1][3:]) != cuts[-1]:
        raise ValueError(f"state {states[-1]!r} does not close at cut {cuts[-1]}")
    return cuts


def bin_for_value(value: float, cuts: list[float]) -> int:
    """Index of the bin holding `value`; boundary values join the lower bin."""
    for i, cut in enumerate(cuts):
        if value <= cut:
            return i
    return len(cuts)


def states_above(states: tuple[str, ...] | list[str], threshold: float) -> list[str]:
    """The bin labels lying strictly above `threshold`.

    `threshold` must be one of the variable's cut points, otherwise the set
    of qualifying bins would be ill-defined.
    """
    cuts = _checked_cuts(states, threshold)
    k = cuts.index(threshold)
    return list(states)[k + 1 :]


def states_below(states: tuple[str, ...] | list[str], threshold: float) -> list[str]:
    """The bin labels lying at or below `threshold` (boundary joins the lower bin)."""
    cuts = _checked_cuts(states, threshold)
    k = cuts.index(threshold)
    return list(states)[: k + 1]


def _checked_cuts(states, threshold: float) -> list[float]:
    try:
        cuts = cuts_from_labels(states)
    except ValueError as exc:
        raise ThresholdNotACutPoint(str(exc)) from None
    if threshold not in cuts:
        raise ThresholdNotACutPoint(
            f"threshold {threshold} is not a bin boundary (cuts: {cuts})"
        )
    return cuts
