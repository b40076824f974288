/**
 * Evidence selection and query planning, kept free of DOM and fetch so the
 * payload-building rules are testable on their own.
 *
 * A variable is either free (absent from the selection) or constrained to a
 * non-empty subset of its states in declaration order. The builders cannot
 * produce a clause with a duplicate variable or an empty state set, which is
 * every contradiction a client can detect without knowing the probabilities;
 * anything subtler comes back from the service as a 422.
 */

import type { Clause, NetworkView, QueryRequest, Variable } from "./api.js";

export type Selection = Readonly<Record<string, readonly string[]>>;

export function emptySelection(): Selection {
  return {};
}

export function variableByName(view: NetworkView, name: string): Variable {
  const found = view.variables.find((v) => v.name === name);
  if (!found) throw new Error(`unknown variable ${name}`);
  return found;
}

export function isResponse(view: NetworkView, name: string): boolean {
  return view.response_variables.includes(name);
}

export function driverNames(view: NetworkView): string[] {
  return view.variables
    .map((v) => v.name)
    .filter((name) => !isResponse(view, name));
}

/**
 * Flip one state in or out of a variable's allowed set.
 *
 * Deselecting the last state, or selecting every state, both mean "no
 * constraint" and drop the variable from the selection entirely.
 */
export function toggleState(
  view: NetworkView,
  selection: Selection,
  variable: string,
  state: string,
): Selection {
  const declared = variableByName(view, variable).states;
  if (!declared.includes(state)) {
    throw new Error(`variable ${variable} has no state ${state}`);
  }
  const current = new Set(selection[variable] ?? []);
  if (current.has(state)) {
    current.delete(state);
  } else {
    current.add(state);
  }
  const next: Record<string, readonly string[]> = { ...selection };
  if (current.size === 0 || current.size === declared.length) {
    delete next[variable];
  } else {
    // keep declaration order so identical selections serialize identically
    next[variable] = declared.filter((s) => current.has(s));
  }
  return next;
}

export function clearVariable(selection: Selection, variable: string): Selection {
  const next: Record<string, readonly string[]> = { ...selection };
  delete next[variable];
  return next;
}

export function clearAll(): Selection {
  return {};
}

/** Evidence clauses in network variable order, one per constrained variable. */
export function selectionClauses(
  view: NetworkView,
  selection: Selection,
): Clause[] {
  const clauses: Clause[] = [];
  for (const v of view.variables) {
    const states = selection[v.name];
    if (states === undefined) continue;
    if (states.length === 0) {
      throw new Error(`empty state set for ${v.name} must not be submitted`);
    }
    clauses.push({ var: v.name, states: [...states] });
  }
  return clauses;
}

export interface PlannedQuery {
  responseVariable: string;
  state: string;
  request: QueryRequest;
}

/**
 * One query per response-variable state: the event is that single state,
 * the evidence is the current selection. The service's exact value drives
 * the bar for that state.
 */
export function queryPlan(
  view: NetworkView,
  selection: Selection,
  seed: number,
): PlannedQuery[] {
  const evidence = selectionClauses(view, selection);
  const plan: PlannedQuery[] = [];
  for (const name of view.response_variables) {
    for (const state of variableByName(view, name).states) {
      plan.push({
        responseVariable: name,
        state,
        request: {
          evidence,
          event: [{ var: name, states: [state] }],
          seed,
        },
      });
    }
  }
  return plan;
}

// --- URL permalinks ---

// ?ev=enforcement:high|very_high;distance:close
export function encodeSelection(selection: Selection): string {
  const parts = Object.keys(selection)
    .sort()
    .map((name) => `${name}:${(selection[name] ?? []).join("|")}`);
  return parts.join(";");
}

/** Decode a permalink, silently dropping anything the network does not know. */
export function decodeSelection(view: NetworkView, text: string): Selection {
  const out: Record<string, readonly string[]> = {};
  for (const part of text.split(";")) {
    if (!part) continue;
    const colon = part.indexOf(":");
    if (colon < 1) continue;
    const name = part.slice(0, colon);
    const variable = view.variables.find((v) => v.name === name);
    if (!variable) continue;
    const picked = new Set(part.slice(colon + 1).split("|"));
    const states = variable.states.filter((s) => picked.has(s));
    if (states.length > 0 && states.length < variable.states.length) {
      out[name] = states;
    }
  }
  return out;
}

// --- latest-wins query dispatch ---

/**
 * Serializes query batches: beginning a new batch aborts the previous one,
 * and results from a superseded batch report as stale so the caller can
 * drop them instead of overwriting newer answers.
 */
export class QueryGate {
  private epoch = 0;
  private controller: AbortController | null = null;

  begin(): { epoch: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    this.epoch += 1;
    return { epoch: this.epoch, signal: this.controller.signal };
  }

  isCurrent(epoch: number): boolean {
    return epoch === this.epoch;
  }
}
