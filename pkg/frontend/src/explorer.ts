/**
 * Controller for the explorer page: owns the selection, debounces evidence
 * changes into query batches, and keeps exactly one batch live at a time
 * (newer evidence aborts whatever is still in flight). All rendering goes
 * through render.ts and all numbers come from the service untouched.
 */

import {
  ImpossibleCombination,
  ServiceClient,
  type Clause,
  type NetworkView,
  type QueryResponse,
  type ReverseResponse,
  type ScenarioPreset,
} from "./api.js";
import { cutsFromLabels, statesAbove, statesAtOrBelow } from "./bins.js";
import {
  clearAll,
  clearVariable,
  decodeSelection,
  driverNames,
  emptySelection,
  encodeSelection,
  isResponse,
  queryPlan,
  toggleState,
  variableByName,
  type Selection,
  QueryGate,
} from "./state.js";
import {
  renderBanner,
  renderEvidencePanel,
  renderNetwork,
  renderResponsePanels,
  renderReversePanel,
  renderScenarioPicker,
  renderThresholdControls,
  type ResponseResults,
  type ThresholdControl,
} from "./render.js";

// which side of the threshold counts as the favourable outcome
const GOOD_SIDE: Record<string, "above" | "below"> = {
  relative_size: "above",
  illegal_proportion: "below",
};

const DEFAULT_THRESHOLD: Record<string, number> = {
  relative_size: 0.59,
  illegal_proportion: 0.31,
};

// the driver-state groups the management summary singles out
const HIGHLIGHT_GROUPS: Record<string, readonly string[]> = {
  iaoa: ["high", "very_high"],
  enforcement: ["high", "very_high"],
  effectiveness: ["moderate", "high", "very_high"],
  distance: ["close"],
};

export interface ExplorerOptions {
  debounceMs?: number;
  seed?: number;
  initialSelection?: string;
  onSelectionChange?: (encoded: string) => void;
}

interface Hosts {
  banner: HTMLElement;
  network: HTMLElement;
  presets: HTMLElement;
  evidence: HTMLElement;
  responses: HTMLElement;
  thresholds: HTMLElement;
  reverse: HTMLElement;
}

export class Explorer {
  private readonly debounceMs: number;
  private readonly seed: number;
  private readonly onSelectionChange: (encoded: string) => void;
  private readonly initialSelection: string;

  private view: NetworkView | null = null;
  private selection: Selection = emptySelection();
  private results: ResponseResults | null = null;
  private notice: string | null = null;
  private thresholds = new Map<string, number>();
  private marginalsByDriver = new Map<string, ReverseResponse>();

  private hosts: Hosts | null = null;
  private readonly queryGate = new QueryGate();
  private readonly reverseGate = new QueryGate();
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private batchInFlight: Promise<void> | null = null;
  private reverseInFlight: Promise<void> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ServiceClient,
    options: ExplorerOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? 120;
    this.seed = options.seed ?? 0;
    this.onSelectionChange = options.onSelectionChange ?? (() => {});
    this.initialSelection = options.initialSelection ?? "";
  }

  async start(): Promise<void> {
    this.buildSkeleton();
    const hosts = this.hosts as Hosts;
    let view: NetworkView;
    try {
      view = await this.client.network();
    } catch {
      renderBanner(
        hosts.banner,
        `cannot reach the network service at ${this.client.baseUrl}`,
      );
      return;
    }
    this.view = view;
    this.selection = decodeSelection(view, this.initialSelection);
    for (const name of view.response_variables) {
      const cuts = cutsFromLabels(variableByName(view, name).states);
      if (!cuts) continue;
      const preferred = DEFAULT_THRESHOLD[name];
      this.thresholds.set(
        name,
        preferred !== undefined && cuts.includes(preferred)
          ? preferred
          : cuts[cuts.length - 1],
      );
    }

    renderBanner(hosts.banner, null);
    renderNetwork(hosts.network, view);
    this.renderEvidence();
    this.renderResponses(true);
    this.renderThresholds();

    this.runQueriesNow();
    this.runReverse();
    void this.loadPresets();
  }

  // --- evidence interaction ---

  toggle(variable: string, state: string): void {
    if (!this.view) return;
    this.selection = toggleState(this.view, this.selection, variable, state);
    this.afterSelectionChange();
  }

  clearVariable(variable: string): void {
    this.selection = clearVariable(this.selection, variable);
    this.afterSelectionChange();
  }

  clearEvidence(): void {
    this.selection = clearAll();
    this.afterSelectionChange();
  }

  applyPreset(preset: ScenarioPreset): void {
    if (!this.view) return;
    const view = this.view;
    const next: Record<string, readonly string[]> = {};
    for (const clause of preset.evidence) {
      const variable = view.variables.find((v) => v.name === clause.var);
      if (!variable || isResponse(view, clause.var)) continue;
      const states = variable.states.filter((s) => clause.states.includes(s));
      if (states.length > 0 && states.length < variable.states.length) {
        next[clause.var] = states;
      }
    }
    this.selection = next;
    this.afterSelectionChange();
  }

  private afterSelectionChange(): void {
    this.notice = null;
    this.renderEvidence();
    this.renderResponses(true);
    this.onSelectionChange(encodeSelection(this.selection));
    this.scheduleQueries();
  }

  // --- forward queries ---

  private scheduleQueries(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      this.runQueriesNow();
    }, this.debounceMs);
  }

  private runQueriesNow(): void {
    if (!this.view) return;
    const view = this.view;
    const { epoch, signal } = this.queryGate.begin();
    const plan = queryPlan(view, this.selection, this.seed);
    const batch = (async () => {
      try {
        const answers = await Promise.all(
          plan.map((p) => this.client.query(p.request, signal)),
        );
        if (!this.queryGate.isCurrent(epoch)) return;
        const results: ResponseResults = new Map();
        plan.forEach((p, i) => {
          if (!results.has(p.responseVariable)) {
            results.set(p.responseVariable, new Map());
          }
          (results.get(p.responseVariable) as Map<string, QueryResponse>).set(
            p.state,
            answers[i],
          );
        });
        this.results = results;
        this.notice = null;
        this.renderResponses(false);
      } catch (err) {
        if (!this.queryGate.isCurrent(epoch)) return;
        if (err instanceof Error && err.name === "AbortError") return;
        if (err instanceof ImpossibleCombination) {
          this.notice = `impossible combination: ${err.detail}`;
          this.renderResponses(false);
          return;
        }
        if (this.hosts) {
          renderBanner(this.hosts.banner, `query failed: ${String(err)}`);
        }
      } finally {
        // a superseded batch must not clear the marker its successor owns
        if (this.queryGate.isCurrent(epoch)) this.batchInFlight = null;
      }
    })();
    this.batchInFlight = batch;
  }

  // --- reverse panel ---

  private reverseEvent(): Clause[] {
    const view = this.view as NetworkView;
    const clauses: Clause[] = [];
    for (const name of view.response_variables) {
      const cut = this.thresholds.get(name);
      if (cut === undefined) continue;
      const states = variableByName(view, name).states;
      const side = GOOD_SIDE[name] ?? "above";
      const chosen =
        side === "above" ? statesAbove(states, cut) : statesAtOrBelow(states, cut);
      clauses.push({ var: name, states: chosen });
    }
    return clauses;
  }

  private tautologyEvent(): Clause[] {
    // every state of one response variable: conditioning on it changes
    // nothing, so the service returns the driver's marginal distribution
    const view = this.view as NetworkView;
    const name = view.response_variables[0];
    return [{ var: name, states: [...variableByName(view, name).states] }];
  }

  setThreshold(variable: string, cut: number): void {
    this.thresholds.set(variable, cut);
    this.renderThresholds();
    this.runReverse();
  }

  private runReverse(): void {
    if (!this.view || this.view.response_variables.length === 0) {
      if (this.hosts) renderReversePanel(this.hosts.reverse, null);
      return;
    }
    const view = this.view;
    const hosts = this.hosts as Hosts;
    const { epoch, signal } = this.reverseGate.begin();
    const event = this.reverseEvent();
    if (event.length === 0) {
      renderReversePanel(hosts.reverse, null);
      return;
    }
    const drivers = driverNames(view);
    const eventLabel = event
      .map((c) => `${c.var} in {${c.states.join(", ")}}`)
      .join(" and ");
    const run = (async () => {
      try {
        if (this.marginalsByDriver.size === 0) {
          const tautology = this.tautologyEvent();
          const marginals = await Promise.all(
            drivers.map((d) =>
              this.client.reverse({ driver: d, event: tautology }, signal),
            ),
          );
          if (!this.reverseGate.isCurrent(epoch)) return;
          drivers.forEach((d, i) =>
            this.marginalsByDriver.set(d, marginals[i]),
          );
        }
        const posteriors = await Promise.all(
          drivers.map((d) => this.client.reverse({ driver: d, event }, signal)),
        );
        if (!this.reverseGate.isCurrent(epoch)) return;
        const byDriver = new Map<string, ReverseResponse>();
        drivers.forEach((d, i) => byDriver.set(d, posteriors[i]));
        const highlights = new Map<string, readonly string[]>();
        for (const d of drivers) {
          const group = HIGHLIGHT_GROUPS[d];
          if (group) highlights.set(d, group);
        }
        renderReversePanel(hosts.reverse, {
          eventLabel,
          posteriors: byDriver,
          marginals: this.marginalsByDriver,
          highlights,
        });
      } catch (err) {
        if (!this.reverseGate.isCurrent(epoch)) return;
        if (err instanceof Error && err.name === "AbortError") return;
        renderBanner(hosts.banner, `reverse query failed: ${String(err)}`);
      } finally {
        if (this.reverseGate.isCurrent(epoch)) this.reverseInFlight = null;
      }
    })();
    this.reverseInFlight = run;
  }

  private async loadPresets(): Promise<void> {
    const hosts = this.hosts as Hosts;
    try {
      const presets = await this.client.scenarios();
      renderScenarioPicker(hosts.presets, presets, (p) => this.applyPreset(p));
    } catch {
      // presets are a convenience; the page works without them
    }
  }

  /** Resolves once no debounce timer or query batch is outstanding. */
  async settled(): Promise<void> {
    for (;;) {
      if (
        this.debounceTimer === null &&
        this.batchInFlight === null &&
        this.reverseInFlight === null
      ) {
        return;
      }
      const batch = this.batchInFlight;
      const reverse = this.reverseInFlight;
      if (batch) await batch.catch(() => {});
      if (reverse) await reverse.catch(() => {});
      await new Promise((resolve) => setTimeout(resolve, 10));
    }
  }

  currentSelection(): Selection {
    return this.selection;
  }

  // --- skeleton and re-renders ---

  private buildSkeleton(): void {
    this.root.innerHTML = `
      <div class="banner" hidden></div>
      <div class="columns">
        <div class="left">
          <section class="network-host"></section>
          <section class="presets-host"></section>
        </div>
        <div class="right">
          <section class="evidence-host"></section>
          <section class="responses-host"></section>
          <section class="reverse-section">
            <h2>Drivers of the good state</h2>
            <div class="thresholds-host"></div>
            <div class="reverse-host"></div>
          </section>
        </div>
      </div>`;
    const one = (cls: string): HTMLElement =>
      this.root.querySelector(`.${cls}`) as HTMLElement;
    this.hosts = {
      banner: one("banner"),
      network: one("network-host"),
      presets: one("presets-host"),
      evidence: one("evidence-host"),
      responses: one("responses-host"),
      thresholds: one("thresholds-host"),
      reverse: one("reverse-host"),
    };
  }

  private renderEvidence(): void {
    if (!this.view || !this.hosts) return;
    renderEvidencePanel(this.hosts.evidence, this.view, this.selection, {
      onToggle: (v, s) => this.toggle(v, s),
      onClearVariable: (v) => this.clearVariable(v),
      onClearAll: () => this.clearEvidence(),
    });
  }

  private renderResponses(pending: boolean): void {
    if (!this.view || !this.hosts) return;
    renderResponsePanels(this.hosts.responses, this.view, this.results, {
      pending,
      notice: this.notice,
    });
  }

  private renderThresholds(): void {
    if (!this.view || !this.hosts) return;
    const controls: ThresholdControl[] = this.view.response_variables.map(
      (name) => ({
        variable: name,
        cuts: cutsFromLabels(
          variableByName(this.view as NetworkView, name).states,
        ),
        chosen: this.thresholds.get(name) ?? null,
      }),
    );
    renderThresholdControls(this.hosts.thresholds, controls, (v, c) =>
      this.setThreshold(v, c),
    );
  }
}
