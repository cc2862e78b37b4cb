/**
 * Before/after proof comparison for the teach loop.
 *
 * A node counts as changed when its normalized statement key appears in
 * exactly one of the two proofs, which makes the effect of a correction
 * legible without trying to align tree shapes.
 */

import { mapProof, ProofViewModel, walkProof } from "./viewmodel.js";

const NON_WORD_RE = /[^\p{L}\p{N}_\s]+/gu;
const WS_RE = /\s+/g;

/** Mirror of the service's belief key normalization. */
export function normalizedKey(statement: string): string {
  return statement.toLowerCase().replace(NON_WORD_RE, " ").replace(WS_RE, " ").trim();
}

function keySet(proof: ProofViewModel | null): Set<string> {
  const keys = new Set<string>();
  if (proof !== null) {
    for (const node of walkProof(proof)) {
      keys.add(normalizedKey(node.statement));
    }
  }
  return keys;
}

/** Keys present in exactly one of the two proofs. */
export function changedKeys(
  previous: ProofViewModel | null,
  current: ProofViewModel | null,
): Set<string> {
  const before = keySet(previous);
  const after = keySet(current);
  const changed = new Set<string>();
  for (const key of before) {
    if (!after.has(key)) changed.add(key);
  }
  for (const key of after) {
    if (!before.has(key)) changed.add(key);
  }
  return changed;
}

/** Mark changed nodes; forced stays visible where nothing changed. */
export function applyHighlights(
  proof: ProofViewModel,
  changed: ReadonlySet<string>,
): ProofViewModel {
  return mapProof(proof, (node) => ({
    highlight: changed.has(normalizedKey(node.statement))
      ? "corrected"
      : node.forced
        ? "forced"
        : "none",
  }));
}
