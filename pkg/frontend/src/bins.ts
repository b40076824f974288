/**
 * The service names threshold bins "le_X", "A_to_B", "gt_Y", which lets a
 * client recover the numeric cut points from state labels alone. That is
 * all the reverse panel needs to offer threshold choices: picking states
 * above or below a cut is label slicing, not probability arithmetic.
 */

export function cutsFromLabels(states: readonly string[]): number[] | null {
  if (states.length < 2) return null;
  if (!states[0].startsWith("le_") || !states[states.length - 1].startsWith("gt_")) {
    return null;
  }
  const cuts = [Number(states[0].slice(3))];
  if (Number.isNaN(cuts[0])) return null;
  for (const label of states.slice(1, -1)) {
    const sep = label.indexOf("_to_");
    if (sep < 1) return null;
    const lo = Number(label.slice(0, sep));
    const hi = Number(label.slice(sep + 4));
    if (Number.isNaN(lo) || Number.isNaN(hi) || lo !== cuts[cuts.length - 1]) {
      return null;
    }
    cuts.push(hi);
  }
  const closing = Number(states[states.length - 1].slice(3));
  if (Number.isNaN(closing) || closing !== cuts[cuts.length - 1]) return null;
  return cuts;
}

export function statesAbove(states: readonly string[], cut: number): string[] {
  const cuts = cutsFromLabels(states);
  if (!cuts) throw new Error(`states ${states.join(",")} are not threshold bins`);
  const k = cuts.indexOf(cut);
  if (k < 0) throw new Error(`${cut} is not a cut point of ${states.join(",")}`);
  return states.slice(k + 1) as string[];
}

export function statesAtOrBelow(
  states: readonly string[],
  cut: number,
): string[] {
  const cuts = cutsFromLabels(states);
  if (!cuts) throw new Error(`states ${states.join(",")} are not threshold bins`);
  const k = cuts.indexOf(cut);
  if (k < 0) throw new Error(`${cut} is not a cut point of ${states.join(",")}`);
  return states.slice(0, k + 1) as string[];
}
