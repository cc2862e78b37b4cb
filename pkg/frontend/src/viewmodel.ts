/**
 * Proof view models: a lossless projection of the service's proof JSON.
 *
 * Every score is kept as the verbatim token from the response body, so the
 * UI can display numbers string-equal to what the service said and
 * re-serialize the model byte-identical to the fetched JSON. The only
 * additions are per-node UI state (collapsed, highlight), which is excluded
 * from re-serialization.
 */

import {
  JsonText,
  JsonEntry,
  getEntry,
  parseJsonText,
  serializeJsonText,
  stringNode,
  toPlain,
} from "./jsontext.js";
import { AskInfo, Mode, OptionOutcomeInfo } from "./types.js";

export type Branch = "direct" | "reasoned";
export type Highlight = "none" | "corrected" | "forced";

export interface ProofViewModel {
  statement: string;
  /** Verbatim string token, kept so re-serialization is byte-exact. */
  statementRaw: string;
  sD: string;
  cD: string;
  sR: string;
  overall: string;
  /** Entailment score of the step; reasoned nodes only. */
  sE: string | null;
  branch: Branch;
  forced: boolean;
  children: ProofViewModel[];
  collapsed: boolean;
  highlight: Highlight;
}

export class SchemaMismatchError extends Error {
  constructor(message: string, readonly path: string) {
    super(`${path}: ${message}`);
    this.name = "SchemaMismatchError";
  }
}

const NODE_KEYS = ["statement", "s_d", "c_d", "s_r", "overall", "branch", "forced"];

function requireKind<K extends JsonText["kind"]>(
  value: JsonText | undefined,
  kind: K,
  path: string,
  what: string,
): Extract<JsonText, { kind: K }> {
  if (value === undefined) {
    throw new SchemaMismatchError(`missing ${what}`, path);
  }
  if (value.kind !== kind) {
    throw new SchemaMismatchError(`${what} must be a ${kind}, got ${value.kind}`, path);
  }
  return value as Extract<JsonText, { kind: K }>;
}

/** Validate one proof-node object from the service and project it. */
export function buildProofView(tree: JsonText, path = "proof"): ProofViewModel {
  if (tree.kind !== "object") {
    throw new SchemaMismatchError(`proof node must be an object, got ${tree.kind}`, path);
  }
  const known = new Set([...NODE_KEYS, "s_e", "children"]);
  for (const entry of tree.entries) {
    if (!known.has(entry.key)) {
      throw new SchemaMismatchError(`unknown key ${JSON.stringify(entry.key)}`, path);
    }
  }
  const statement = requireKind(getEntry(tree, "statement"), "string", path, "statement");
  const sD = requireKind(getEntry(tree, "s_d"), "number", path, "s_d");
  const cD = requireKind(getEntry(tree, "c_d"), "number", path, "c_d");
  const sR = requireKind(getEntry(tree, "s_r"), "number", path, "s_r");
  const overall = requireKind(getEntry(tree, "overall"), "number", path, "overall");
  const branchNode = requireKind(getEntry(tree, "branch"), "string", path, "branch");
  const forced = requireKind(getEntry(tree, "forced"), "boolean", path, "forced");
  if (branchNode.value !== "direct" && branchNode.value !== "reasoned") {
    throw new SchemaMismatchError(`branch must be direct or reasoned, got ${branchNode.value}`, path);
  }
  const branch = branchNode.value;

  const sENode = getEntry(tree, "s_e");
  if (branch === "reasoned" && sENode === undefined) {
    throw new SchemaMismatchError("reasoned node is missing s_e", path);
  }
  if (branch === "direct" && sENode !== undefined) {
    throw new SchemaMismatchError("direct node must not carry s_e", path);
  }
  const sE = sENode === undefined ? null : requireKind(sENode, "number", path, "s_e").raw;

  const childrenNode = requireKind(getEntry(tree, "children"), "array", path, "children");
  const children = childrenNode.items.map((item, i) =>
    buildProofView(item, `${path}/children[${i}]`),
  );
  if (branch === "direct" && children.length > 0) {
    throw new SchemaMismatchError("direct node must not have children", path);
  }
  if (branch === "reasoned" && children.length === 0) {
    throw new SchemaMismatchError("reasoned node must have children", path);
  }

  return {
    statement: statement.value,
    statementRaw: statement.raw,
    sD: sD.raw,
    cD: cD.raw,
    sR: sR.raw,
    overall: overall.raw,
    sE,
    branch,
    forced: forced.value,
    children,
    collapsed: false,
    highlight: forced.value ? "forced" : "none",
  };
}

/** Rebuild the service JSON for a view model; UI state is excluded. */
export function proofViewToJson(view: ProofViewModel): JsonText {
  const entries: JsonEntry[] = [
    entry("statement", { kind: "string", value: view.statement, raw: view.statementRaw }),
    entry("s_d", { kind: "number", raw: view.sD }),
    entry("c_d", { kind: "number", raw: view.cD }),
    entry("s_r", { kind: "number", raw: view.sR }),
    entry("overall", { kind: "number", raw: view.overall }),
    entry("branch", stringNode(view.branch)),
    entry("forced", { kind: "boolean", value: view.forced }),
  ];
  if (view.sE !== null) {
    entries.push(entry("s_e", { kind: "number", raw: view.sE }));
  }
  entries.push(
    entry("children", { kind: "array", items: view.children.map(proofViewToJson) }),
  );
  return { kind: "object", entries };
}

function entry(key: string, value: JsonText): JsonEntry {
  return { key, keyRaw: key, value };
}

export function reserializeProof(view: ProofViewModel): string {
  return serializeJsonText(proofViewToJson(view));
}

export function* walkProof(view: ProofViewModel): Generator<ProofViewModel> {
  yield view;
  for (const child of view.children) {
    yield* walkProof(child);
  }
}

/** Structure-preserving per-node rewrite; returns a new tree. */
export function mapProof(
  view: ProofViewModel,
  fn: (node: ProofViewModel) => Partial<ProofViewModel>,
): ProofViewModel {
  const children = view.children.map((child) => mapProof(child, fn));
  return { ...view, ...fn(view), children };
}

export function nodeAtPath(
  view: ProofViewModel,
  path: readonly number[],
): ProofViewModel | undefined {
  let node: ProofViewModel | undefined = view;
  for (const index of path) {
    node = node?.children[index];
  }
  return node;
}

/** One complete /ask reply: envelope facts plus per-option proof views. */
export interface AskView {
  bodyText: string;
  info: AskInfo;
  proofs: (ProofViewModel | null)[];
}

export function parseAskBody(bodyText: string): AskView {
  const tree = parseJsonText(bodyText);
  const path = "ask";
  const proofId = requireKind(getEntry(tree, "proof_id"), "string", path, "proof_id");
  const createdAt = requireKind(getEntry(tree, "created_at"), "string", path, "created_at");
  const result = requireKind(getEntry(tree, "result"), "object", path, "result");
  const question = requireKind(getEntry(result, "question"), "string", path, "question");
  const mode = requireKind(getEntry(result, "mode"), "string", path, "mode");
  const chosenIndex = requireKind(getEntry(result, "chosen_index"), "number", path, "chosen_index");
  const chosenOption = requireKind(getEntry(result, "chosen_option"), "string", path, "chosen_option");
  const faithful = requireKind(getEntry(result, "faithful"), "boolean", path, "faithful");
  const perOption = requireKind(getEntry(result, "per_option"), "array", path, "per_option");

  const proofs: (ProofViewModel | null)[] = [];
  const outcomes: OptionOutcomeInfo[] = [];
  perOption.items.forEach((item, i) => {
    const optionPath = `ask/per_option[${i}]`;
    const option = requireKind(getEntry(item, "option"), "string", optionPath, "option");
    const hypothesis = getEntry(item, "hypothesis");
    const error = getEntry(item, "error");
    const proof = getEntry(item, "proof");
    const hasProof = proof !== undefined && proof.kind !== "null";
    proofs.push(hasProof ? buildProofView(proof, `${optionPath}/proof`) : null);
    outcomes.push({
      option: option.value,
      hypothesis: hypothesis?.kind === "string" ? hypothesis.value : null,
      error: error?.kind === "string" ? error.value : null,
      hasProof,
    });
  });

  return {
    bodyText,
    info: {
      proofId: proofId.value,
      createdAt: createdAt.value,
      question: question.value,
      mode: toPlain(mode) as Mode,
      chosenIndex: Number(chosenIndex.raw),
      chosenOption: chosenOption.value,
      faithful: faithful.value,
      perOption: outcomes,
    },
    proofs,
  };
}

export function chosenProof(view: AskView): ProofViewModel | null {
  return view.proofs[view.info.chosenIndex] ?? null;
}
