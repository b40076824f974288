/**
 * DOM construction for the explorer. Every renderer clears its host and
 * rebuilds from the data it is given; none of them fetch or compute
 * probabilities. Bar widths and whisker offsets are the only numeric work,
 * and that is presentation scaling of service-supplied values.
 */

import type {
  NetworkView,
  QueryResponse,
  ReverseResponse,
  ScenarioPreset,
} from "./api.js";
import {
  maxEdgeStrength,
  place,
  strokeWidth,
  NODE_HEIGHT,
  NODE_WIDTH,
} from "./layout.js";
import type { Selection } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export function clearChildren(host: Element): void {
  while (host.firstChild) host.removeChild(host.firstChild);
}

// --- banner ---

export function renderBanner(host: HTMLElement, message: string | null): void {
  clearChildren(host);
  host.hidden = message === null;
  if (message !== null) {
    host.appendChild(el("span", { class: "banner-text" }, message));
  }
}

// --- network drawing ---

export function renderNetwork(host: HTMLElement, view: NetworkView): void {
  clearChildren(host);
  const placement = place(view);
  const maxStrength = maxEdgeStrength(view);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${placement.width} ${placement.height}`,
    width: String(placement.width),
    height: String(placement.height),
    role: "img",
    "aria-label": "network structure",
  });

  const defs = svgEl("defs");
  const marker = svgEl("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.appendChild(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  for (const edge of view.edges) {
    const from = placement.positions.get(edge.parent);
    const to = placement.positions.get(edge.child);
    if (!from || !to) continue;
    const line = svgEl("line", {
      class: "edge",
      x1: String(from.x + NODE_WIDTH / 2),
      y1: String(from.y),
      x2: String(to.x - NODE_WIDTH / 2 - 8),
      y2: String(to.y),
      "stroke-width": String(strokeWidth(edge.strength, maxStrength)),
      "marker-end": "url(#arrow)",
    });
    if (edge.strength !== null) {
      const title = svgEl("title");
      title.textContent = `${edge.parent} -> ${edge.child} (strength ${edge.strength})`;
      line.appendChild(title);
    }
    svg.appendChild(line);
  }

  for (const variable of view.variables) {
    const pos = placement.positions.get(variable.name);
    if (!pos) continue;
    const isResponse = view.response_variables.includes(variable.name);
    const group = svgEl("g", {
      class: isResponse ? "node response" : "node",
      "data-variable": variable.name,
    });
    group.appendChild(
      svgEl("rect", {
        x: String(pos.x - NODE_WIDTH / 2),
        y: String(pos.y - NODE_HEIGHT / 2),
        width: String(NODE_WIDTH),
        height: String(NODE_HEIGHT),
        rx: "8",
      }),
    );
    const label = svgEl("text", {
      x: String(pos.x),
      y: String(pos.y + 4),
      "text-anchor": "middle",
    });
    label.textContent = variable.name;
    group.appendChild(label);
    svg.appendChild(group);
  }

  host.appendChild(svg);
}

// --- evidence panel ---

export interface EvidenceHandlers {
  onToggle(variable: string, state: string): void;
  onClearVariable(variable: string): void;
  onClearAll(): void;
}

export function renderEvidencePanel(
  host: HTMLElement,
  view: NetworkView,
  selection: Selection,
  handlers: EvidenceHandlers,
): void {
  clearChildren(host);
  const heading = el("div", { class: "panel-head" });
  heading.appendChild(el("h2", {}, "Evidence"));
  const clearAll = el(
    "button",
    { class: "clear-all", type: "button" },
    "clear evidence",
  );
  clearAll.addEventListener("click", () => handlers.onClearAll());
  heading.appendChild(clearAll);
  host.appendChild(heading);

  for (const variable of view.variables) {
    if (view.response_variables.includes(variable.name)) continue;
    const picked = selection[variable.name];
    const row = el("div", {
      class: "evidence-row",
      "data-variable": variable.name,
    });
    row.appendChild(el("span", { class: "var-name" }, variable.name));
    const chips = el("div", { class: "chips" });
    for (const state of variable.states) {
      const on = picked !== undefined && picked.includes(state);
      const chip = el(
        "button",
        {
          class: "chip",
          type: "button",
          "data-state": state,
          "aria-pressed": on ? "true" : "false",
        },
        state,
      );
      chip.addEventListener("click", () =>
        handlers.onToggle(variable.name, state),
      );
      chips.appendChild(chip);
    }
    row.appendChild(chips);
    const any = el(
      "button",
      { class: "any", type: "button", disabled: "" },
      "any",
    );
    if (picked !== undefined) any.removeAttribute("disabled");
    any.addEventListener("click", () =>
      handlers.onClearVariable(variable.name),
    );
    row.appendChild(any);
    host.appendChild(row);
  }
}

// --- response posterior panels ---

export type ResponseResults = Map<string, Map<string, QueryResponse>>;

function barRow(state: string, result: QueryResponse): HTMLElement {
  const row = el("div", { class: "bar-row", "data-state": state });
  row.appendChild(el("span", { class: "state-name" }, state));

  const value = result.exact ?? result.estimate;
  const track = el("div", { class: "track" });
  track.appendChild(
    el("div", {
      class: "bar",
      style: `width: ${(value * 100).toFixed(3)}%`,
    }),
  );
  // sampler interval as a whisker over the bar; the bar itself is exact
  const lo = Math.max(0, Math.min(1, result.ci_low));
  const hi = Math.max(0, Math.min(1, result.ci_high));
  const whisker = el("div", {
    class: "whisker",
    style: `left: ${(lo * 100).toFixed(3)}%; width: ${((hi - lo) * 100).toFixed(3)}%`,
    title: `sampled ${result.estimate} (${result.method}, n=${result.n_samples})`,
  });
  track.appendChild(whisker);
  row.appendChild(track);

  const readout = el("span", { class: "readout" });
  if (result.exact !== null) {
    // the service's exact value, byte for byte; rounding happens nowhere
    readout.appendChild(
      el("code", { class: "exact-value" }, String(result.exact)),
    );
  } else {
    readout.appendChild(
      el("code", { class: "sampled-value" }, String(result.estimate)),
    );
  }
  row.appendChild(readout);
  return row;
}

export function renderResponsePanels(
  host: HTMLElement,
  view: NetworkView,
  results: ResponseResults | null,
  options: { pending: boolean; notice: string | null },
): void {
  clearChildren(host);
  host.classList.toggle("pending", options.pending);

  if (options.notice !== null) {
    host.appendChild(el("div", { class: "impossible-notice" }, options.notice));
  }

  for (const name of view.response_variables) {
    const panel = el("section", {
      class: "response-panel",
      "data-variable": name,
    });
    panel.appendChild(el("h3", {}, name));
    const byState = results?.get(name);
    const variable = view.variables.find((v) => v.name === name);
    for (const state of variable?.states ?? []) {
      const result = byState?.get(state);
      if (result) {
        panel.appendChild(barRow(state, result));
      } else {
        const row = el("div", { class: "bar-row empty", "data-state": state });
        row.appendChild(el("span", { class: "state-name" }, state));
        row.appendChild(el("span", { class: "readout" }, "…"));
        panel.appendChild(row);
      }
    }
    host.appendChild(panel);
  }
}

// --- reverse panel ---

export interface ReversePanelData {
  /** event description, e.g. the good-state clauses as text */
  eventLabel: string;
  /** driver name -> posterior given the event */
  posteriors: Map<string, ReverseResponse>;
  /** driver name -> marginal distribution, for the comparison ticks */
  marginals: Map<string, ReverseResponse>;
  /** driver name -> states highlighted as the reported mass group */
  highlights: Map<string, readonly string[]>;
}

export interface ThresholdControl {
  variable: string;
  cuts: number[] | null;
  chosen: number | null;
}

export function renderThresholdControls(
  host: HTMLElement,
  controls: ThresholdControl[],
  onChange: (variable: string, cut: number) => void,
): void {
  clearChildren(host);
  for (const control of controls) {
    const wrap = el("label", {
      class: "threshold",
      "data-variable": control.variable,
    });
    wrap.appendChild(el("span", {}, `${control.variable} threshold`));
    const select = el("select", {});
    if (control.cuts === null) {
      // nominal response states carry no cut points to choose between
      select.setAttribute("disabled", "");
      select.appendChild(el("option", {}, "n/a"));
    } else {
      for (const cut of control.cuts) {
        const option = el("option", { value: String(cut) }, String(cut));
        if (cut === control.chosen) option.setAttribute("selected", "");
        select.appendChild(option);
      }
      select.addEventListener("change", () =>
        onChange(control.variable, Number(select.value)),
      );
    }
    wrap.appendChild(select);
    host.appendChild(wrap);
  }
}

export function renderReversePanel(
  host: HTMLElement,
  data: ReversePanelData | null,
): void {
  clearChildren(host);
  if (data === null) {
    host.appendChild(el("p", { class: "muted" }, "reverse query pending"));
    return;
  }
  host.appendChild(
    el("p", { class: "event-label" }, `given ${data.eventLabel}`),
  );
  for (const [driver, response] of data.posteriors) {
    const block = el("div", { class: "driver-block", "data-driver": driver });
    block.appendChild(el("h4", {}, driver));
    const highlight = data.highlights.get(driver) ?? [];
    const marginal = data.marginals.get(driver)?.distribution ?? {};
    for (const [state, probability] of Object.entries(response.distribution)) {
      const inGroup = highlight.includes(state);
      const row = el("div", {
        class: inGroup ? "bar-row grouped" : "bar-row",
        "data-state": state,
      });
      row.appendChild(el("span", { class: "state-name" }, state));
      const track = el("div", { class: "track" });
      track.appendChild(
        el("div", {
          class: inGroup ? "bar grouped" : "bar",
          style: `width: ${(probability * 100).toFixed(3)}%`,
        }),
      );
      const base = marginal[state];
      if (base !== undefined) {
        track.appendChild(
          el("div", {
            class: "marginal-tick",
            style: `left: ${(base * 100).toFixed(3)}%`,
            title: `marginal ${base}`,
          }),
        );
      }
      row.appendChild(track);
      row.appendChild(
        el("code", { class: "reverse-value" }, String(probability)),
      );
      block.appendChild(row);
    }
    host.appendChild(block);
  }
}

// --- scenario presets ---

export function renderScenarioPicker(
  host: HTMLElement,
  presets: ScenarioPreset[],
  onApply: (preset: ScenarioPreset) => void,
): void {
  clearChildren(host);
  if (presets.length === 0) return;
  host.appendChild(el("h2", {}, "Presets"));
  const list = el("div", { class: "preset-list" });
  for (const preset of presets) {
    const button = el(
      "button",
      { class: "preset", type: "button", "data-name": preset.name },
      preset.name,
    );
    const evidence = preset.evidence
      .map((c) => `${c.var} in {${c.states.join(", ")}}`)
      .join(" and ");
    button.setAttribute("title", evidence);
    button.addEventListener("click", () => onApply(preset));
    list.appendChild(button);
  }
  host.appendChild(list);
}
