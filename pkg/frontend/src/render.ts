/**
 * Pure tree rendering: view models in, DOM-structure descriptions out.
 *
 * Descriptions are plain data so tests can assert on exactly what would be
 * mounted. Scores are emitted verbatim from the view model; this module
 * never parses or formats a number.
 */

import { JsonText } from "./jsontext.js";
import { buildProofView, ProofViewModel, SchemaMismatchError } from "./viewmodel.js";

export interface DomDesc {
  tag: string;
  attrs?: Record<string, string>;
  children?: (DomDesc | string)[];
}

export interface ErrorPanel {
  kind: "error-panel";
  message: string;
}

export type RenderResult = { kind: "tree"; root: DomDesc } | ErrorPanel;

function scoreSpan(name: string, raw: string): DomDesc {
  return {
    tag: "span",
    attrs: { class: "score", "data-score": name },
    children: [`${name}=${raw}`],
  };
}

function nodeDesc(node: ProofViewModel, path: string): DomDesc {
  const row: (DomDesc | string)[] = [];
  if (node.children.length > 0) {
    row.push({
      tag: "button",
      attrs: { class: "expander", "data-action": "toggle", "data-path": path },
      children: [node.collapsed ? "+" : "−"],
    });
  }
  row.push({
    tag: "span",
    attrs: { class: "statement", "data-action": "select", "data-path": path },
    children: [node.statement],
  });
  row.push(scoreSpan("s_d", node.sD));
  if (node.sE !== null) {
    row.push(scoreSpan("s_e", node.sE));
  }
  row.push(scoreSpan("overall", node.overall));
  row.push({ tag: "span", attrs: { class: "branch" }, children: [node.branch] });
  if (node.forced) {
    row.push({ tag: "span", attrs: { class: "forced-flag" }, children: ["forced"] });
  }

  const children: (DomDesc | string)[] = [
    { tag: "div", attrs: { class: "node-row" }, children: row },
  ];
  if (node.children.length > 0 && !node.collapsed) {
    children.push({
      tag: "ul",
      attrs: { class: "premises" },
      children: node.children.map((child, i) => nodeDesc(child, `${path}.${i}`)),
    });
  }
  return {
    tag: "li",
    attrs: {
      class: "proof-node",
      "data-branch": node.branch,
      "data-forced": String(node.forced),
      "data-highlight": node.highlight,
    },
    children,
  };
}

/** Collapsible nested list for one proof tree. */
export function renderTree(view: ProofViewModel): DomDesc {
  return {
    tag: "ul",
    attrs: { class: "proof-tree" },
    children: [nodeDesc(view, "0")],
  };
}

/** Render straight from service JSON; schema problems become an error
 * panel and nothing of the tree is rendered. */
export function renderServedProof(tree: JsonText): RenderResult {
  let view: ProofViewModel;
  try {
    view = buildProofView(tree);
  } catch (err) {
    if (err instanceof SchemaMismatchError) {
      return { kind: "error-panel", message: err.message };
    }
    throw err;
  }
  return { kind: "tree", root: renderTree(view) };
}

/** Depth-first walk of a description, yielding every DomDesc. */
export function* walkDesc(desc: DomDesc): Generator<DomDesc> {
  yield desc;
  for (const child of desc.children ?? []) {
    if (typeof child !== "string") {
      yield* walkDesc(child);
    }
  }
}

export function textOf(desc: DomDesc): string {
  let out = "";
  for (const child of desc.children ?? []) {
    out += typeof child === "string" ? child : textOf(child);
  }
  return out;
}

const VOID_TAGS = new Set(["br", "hr", "img", "input", "meta", "link"]);

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

/** Serialize a description to HTML for mounting via innerHTML. */
export function toHtml(desc: DomDesc): string {
  const attrs = Object.entries(desc.attrs ?? {})
    .map(([name, value]) => ` ${name}="${escapeHtml(value)}"`)
    .join("");
  if (VOID_TAGS.has(desc.tag)) {
    return `<${desc.tag}${attrs}>`;
  }
  const inner = (desc.children ?? [])
    .map((child) => (typeof child === "string" ? escapeHtml(child) : toHtml(child)))
    .join("");
  return `<${desc.tag}${attrs}>${inner}</${desc.tag}>`;
}
