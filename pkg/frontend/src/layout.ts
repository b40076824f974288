/**
 * Left-to-right layered placement for the network drawing. Depth is the
 * longest path from any parentless node, so a node always sits to the right
 * of all of its parents.
 */

import type { NetworkView } from "./api.js";

export interface NodePosition {
  name: string;
  depth: number;
  row: number;
  x: number;
  y: number;
}

export interface Placement {
  positions: Map<string, NodePosition>;
  columns: string[][];
  width: number;
  height: number;
}

export const COLUMN_WIDTH = 170;
export const ROW_HEIGHT = 72;
export const NODE_WIDTH = 138;
export const NODE_HEIGHT = 40;

export function topologicalDepths(view: NetworkView): Map<string, number> {
  const names = view.variables.map((v) => v.name);
  const incoming = new Map<string, number>(names.map((n) => [n, 0]));
  const children = new Map<string, string[]>(names.map((n) => [n, []]));
  for (const e of view.edges) {
    incoming.set(e.child, (incoming.get(e.child) ?? 0) + 1);
    children.get(e.parent)?.push(e.child);
  }
  const depth = new Map<string, number>();
  const queue = names.filter((n) => incoming.get(n) === 0);
  for (const n of queue) depth.set(n, 0);
  let seen = 0;
  while (queue.length > 0) {
    const node = queue.shift() as string;
    seen += 1;
    for (const child of children.get(node) ?? []) {
      const d = Math.max(depth.get(child) ?? 0, (depth.get(node) ?? 0) + 1);
      depth.set(child, d);
      const left = (incoming.get(child) ?? 0) - 1;
      incoming.set(child, left);
      if (left === 0) queue.push(child);
    }
  }
  if (seen !== names.length) {
    throw new Error("network edges contain a cycle");
  }
  return depth;
}

/** Column per depth; row order within a column follows variable order. */
export function place(view: NetworkView): Placement {
  const depth = topologicalDepths(view);
  const maxDepth = Math.max(0, ...depth.values());
  const columns: string[][] = Array.from({ length: maxDepth + 1 }, () => []);
  for (const v of view.variables) {
    columns[depth.get(v.name) ?? 0].push(v.name);
  }
  const tallest = Math.max(...columns.map((c) => c.length));
  const positions = new Map<string, NodePosition>();
  columns.forEach((column, d) => {
    // center short columns vertically against the tallest one
    const pad = (tallest - column.length) / 2;
    column.forEach((name, i) => {
      positions.set(name, {
        name,
        depth: d,
        row: i,
        x: d * COLUMN_WIDTH + NODE_WIDTH / 2 + 10,
        y: (i + pad) * ROW_HEIGHT + NODE_HEIGHT / 2 + 10,
      });
    });
  });
  return {
    positions,
    columns,
    width: (maxDepth + 1) * COLUMN_WIDTH + 20,
    height: tallest * ROW_HEIGHT + 20,
  };
}

/**
 * Edge thickness scaled by strength relative to the strongest edge in the
 * view. Edges without a reported strength get the hairline.
 */
export function strokeWidth(
  strength: number | null,
  maxStrength: number,
): number {
  if (strength === null || maxStrength <= 0) return 1.25;
  const s = Math.max(0, strength) / maxStrength;
  return 1.25 + 4.25 * s;
}

export function maxEdgeStrength(view: NetworkView): number {
  let max = 0;
  for (const e of view.edges) {
    if (e.strength !== null && e.strength > max) max = e.strength;
  }
  return max;
}
