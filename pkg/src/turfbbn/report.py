"""Render scenario and reverse reports to delimited text, aligned tables,
and figures.

All renderers are deterministic: fixed float formats, fixed column orders,
and figure files written without environment-dependent metadata, so a rerun
with the same inputs is byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .core import Network
from .netdoc import layout_depths
from .scenarios import ReverseReport, ScenarioReport

_FLOAT = "%.6f"
_PNG_METADATA = {"Software": None}  # drop the library/version stamp


def _fmt(value: float | None) -> str:
    return "" if value is None else _FLOAT % value


def _fmt_flag(value: bool | None) -> str:
    return "" if value is None else ("yes" if value else "no")


SCENARIO_COLUMNS = (
    "scenario", "variable_1", "variable_2", "response", "probability",
    "ci_low", "ci_high", "exact", "within_ci", "method", "n_samples", "error",
)


def scenario_report_rows(report: ScenarioReport) -> list[tuple[str, ...]]:
    rows = []
    for r in report.rows:
        clauses = list(r.evidence_clauses) + ["", ""]
        rows.append((
            r.name,
            clauses[0],
            clauses[1] if len(r.evidence_clauses) <= 2
            else "; ".join(r.evidence_clauses[1:]),
            r.event_clause,
            _fmt(r.sampled.estimate if r.sampled else None),
            _fmt(r.sampled.ci_low if r.sampled else None),
            _fmt(r.sampled.ci_high if r.sampled else None),
            _fmt(r.exact.estimate if r.exact else None),
            _fmt_flag(r.exact_within_ci),
            r.sampled.method if r.sampled else "",
            str(r.sampled.n_samples) if r.sampled else "",
            r.error or "",
        ))
    return rows


def scenario_report_tsv(report: ScenarioReport) -> str:
    lines = ["\t".join(SCENARIO_COLUMNS)]
    lines += ["\t".join(row) for row in scenario_report_rows(report)]
    return "\n".join(lines) + "\n"


def _aligned(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(cells) -> str:
        return "  ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()
    rule = "  ".join("-" * w for w in widths)
    return "\n".join([line(header), rule] + [line(r) for r in rows]) + "\n"


def scenario_report_text(report: ScenarioReport) -> str:
    return _aligned(SCENARIO_COLUMNS, scenario_report_rows(report))


REVERSE_COLUMNS = ("driver", "state", "probability", "in_group", "group_mass", "error")


def reverse_report_rows(report: ReverseReport) -> list[tuple[str, ...]]:
    rows = []
    for r in report.rows:
        if r.error is not None:
            rows.append((r.driver, "", "", "", "", r.error))
            continue
        for state, p in r.distribution.items():
            in_group = r.group_states is not None and state in r.group_states
            rows.append((
                r.driver, state, _fmt(p),
                _fmt_flag(in_group if r.group_states is not None else None),
                _fmt(r.group_mass) if in_group else "",
                "",
            ))
    return rows


def reverse_report_tsv(report: ReverseReport) -> str:
    lines = ["# response event: " + "; ".join(report.event_clauses)]
    lines.append("\t".join(REVERSE_COLUMNS))
    lines += ["\t".join(row) for row in reverse_report_rows(report)]
    return "\n".join(lines) + "\n"


def reverse_report_text(report: ReverseReport) -> str:
    body = _aligned(REVERSE_COLUMNS, reverse_report_rows(report))
    return "response event: " + "; ".join(report.event_clauses) + "\n\n" + body


# --- figures ---------------------------------------------------------------


def render_scenario_figure(report: ScenarioReport, path: str | Path) -> None:
    """Horizontal bars of sampled estimates with intervals and exact marks."""
    rows = [r for r in report.rows if r.sampled is not None]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.6 * max(1, len(rows)) + 1.2)))
    names = [r.name for r in rows]
    y = list(range(len(rows)))[::-1]
    estimates = [r.sampled.estimate for r in rows]
    err_low = [r.sampled.estimate - r.sampled.ci_low for r in rows]
    err_high = [r.sampled.ci_high - r.sampled.estimate for r in rows]
    ax.barh(y, estimates, xerr=[err_low, err_high], color="#4a7aa5",
            edgecolor="#2d4a63", capsize=3, height=0.6)
    exacts = [r.exact.estimate for r in rows if r.exact is not None]
    ax.scatter(exacts, [yy for yy, r in zip(y, rows) if r.exact is not None],
               marker="|", s=240, color="#c23b22", zorder=3, label="exact")
    ax.set_yticks(y)
    ax.set_yticklabels(names)
    ax.set_xlim(0, 1)
    ax.set_xlabel("probability of the queried response event")
    ax.legend(loc="lower right")
    skipped = len(report.rows) - len(rows)
    if skipped:
        ax.set_title(f"{skipped} scenario(s) failed; see the report table")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def render_reverse_figure(report: ReverseReport, path: str | Path) -> None:
    """One bar panel per driver: posterior mass per state given the event."""
    rows = [r for r in report.rows if r.error is None]
    n = max(1, len(rows))
    fig, axes = plt.subplots(n, 1, figsize=(8, 2.2 * n), squeeze=False)
    for ax, row in zip(axes[:, 0], rows):
        states = list(row.distribution)
        values = [row.distribution[s] for s in states]
        colors = [
            "#c28f3b" if row.group_states and s in row.group_states else "#4a7aa5"
            for s in states
        ]
        ax.bar(range(len(states)), values, color=colors, edgecolor="#2d4a63")
        ax.set_xticks(range(len(states)))
        ax.set_xticklabels(states, fontsize=8)
        ax.set_ylim(0, 1)
        title = row.driver
        if row.group_mass is not None:
            title += f"  (highlighted mass {row.group_mass:.2f})"
        ax.set_title(title, fontsize=10)
    fig.suptitle("driver posteriors given: " + "; ".join(report.event_clauses),
                 fontsize=10)
    fig.tight_layout(rect=(0, 0, 1, 0.97))
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def render_network_figure(network: Network, path: str | Path,
                          edge_strengths: dict[tuple[str, str], float] | None = None,
                          response_variables: tuple[str, ...] = ()) -> None:
    """Left-to-right layered drawing of the learned structure."""
    dag = network.dag
    depths = layout_depths(dag)
    by_depth: dict[int, list[str]] = {}
    for v in dag.variables:
        by_depth.setdefault(depths[v.name], []).append(v.name)
    pos: dict[str, tuple[float, float]] = {}
    for depth, names in sorted(by_depth.items()):
        for i, name in enumerate(names):
            pos[name] = (float(depth), -(i - (len(names) - 1) / 2.0))

    fig, ax = plt.subplots(figsize=(9, 5.5))
    strengths = edge_strengths or {}
    magnitudes = [abs(s) for s in strengths.values()] or [1.0]
    top = max(magnitudes) or 1.0
    for parent, child in sorted(dag.edges):
        x0, y0 = pos[parent]
        x1, y1 = pos[child]
        width = 0.6 + 2.8 * abs(strengths.get((parent, child), 0.0)) / top
        ax.annotate(
            "", xy=(x1, y1), xytext=(x0, y0),
            arrowprops={"arrowstyle": "-|>", "lw": width, "color": "#5a6b78",
                        "shrinkA": 18, "shrinkB": 18},
        )
    for name, (x, y) in pos.items():
        is_response = name in response_variables
        ax.scatter([x], [y], s=1400, zorder=3,
                   color="#c28f3b" if is_response else "#dbe6ee",
                   edgecolor="#2d4a63")
        ax.annotate(name, (x, y), ha="center", va="center", fontsize=7, zorder=4)
    ax.set_axis_off()
    margin = 0.7
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    ax.set_xlim(min(xs) - margin, max(xs) + margin)
    ax.set_ylim(min(ys) - margin, max(ys) + margin)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
