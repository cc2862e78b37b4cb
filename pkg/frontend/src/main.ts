/**
 * Browser entry point: mount the app, wire DOM events to handlers.
 *
 * Rendering replaces the root's innerHTML with the serialized description;
 * events are delegated from the root so re-renders never lose listeners.
 */

import { ApiClient } from "./api.js";
import { App, renderApp, Tab } from "./app.js";
import { toHtml } from "./render.js";

function mount(root: HTMLElement, baseUrl: string): App {
  const client = new ApiClient(baseUrl);
  const app = new App(client, (current) => {
    root.innerHTML = toHtml(renderApp(current));
  });

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (target === null) return;
    const action = target.dataset.action;
    if (action === "tab") {
      const tab = target.dataset.tab as Tab;
      app.switchTab(tab);
      if (tab === "beliefs") void app.refreshBeliefs();
    } else if (action === "delete-belief" && target.dataset.key !== undefined) {
      void app.deleteBelief(target.dataset.key);
    } else if (action === "toggle" || action === "select") {
      const path = target.dataset.path;
      if (path === undefined) return;
      if (action === "toggle") {
        toggleNode(app, path);
      } else {
        promptCorrection(app, path);
      }
    }
  });

  root.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.dataset.action !== "ask") return;
    event.preventDefault();
    const data = new FormData(form);
    const question = String(data.get("question") ?? "").trim();
    const options = String(data.get("options") ?? "")
      .split(",")
      .map((o) => o.trim())
      .filter((o) => o.length > 0);
    if (question.length === 0) return;
    void app.ask({ question, options, mode: "entailer" });
  });

  app.switchTab("ask");
  return app;
}

function pathIndices(path: string): number[] {
  // rendered paths look like "0.1.0"; the leading 0 is the root itself
  return path.split(".").slice(1).map(Number);
}

function toggleNode(app: App, path: string): void {
  const view = app.session.current;
  if (view === null) return;
  const proof = view.proofs[view.info.chosenIndex];
  if (proof === null || proof === undefined) return;
  let node = proof;
  for (const index of pathIndices(path)) {
    const child = node.children[index];
    if (child === undefined) return;
    node = child;
  }
  node.collapsed = !node.collapsed;
  app.switchTab("ask"); // re-render without losing state
}

function promptCorrection(app: App, path: string): void {
  const indices = pathIndices(path);
  const statement = window.prompt("Correct this belief to:", "");
  if (statement === null || statement.trim().length === 0) return;
  const assertedTrue = window.confirm("Is the corrected statement true? OK = true.");
  void app.correct(indices, { statement: statement.trim(), assertedTrue });
}

declare global {
  interface Window {
    entailMount?: typeof mount;
  }
}

if (typeof document !== "undefined") {
  window.entailMount = mount;
  const root = document.getElementById("root");
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
  if (root !== null) {
    mount(root, baseUrl);
  }
}
