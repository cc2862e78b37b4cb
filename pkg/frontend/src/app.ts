/**
 * Single-page app state and its pure renderer.
 *
 * Three tabs: ask (question form, proof tree, before/after diff), history
 * (stored proofs), beliefs (taught corrections). The renderer only turns
 * confirmed server state into a DOM description; handlers mutate state
 * through the session and trigger a re-render callback.
 */

import { ApiClient, ApiError } from "./api.js";
import { DomDesc, renderTree } from "./render.js";
import { Correction, QuestionDraft, TeachSession } from "./session.js";
import { BeliefInfo } from "./types.js";
import { AskView, chosenProof } from "./viewmodel.js";

export type Tab = "ask" | "history" | "beliefs";

export interface HistoryEntry {
  proofId: string;
  createdAt: string;
  question: string;
  chosenOption: string;
}

export interface AppState {
  tab: Tab;
  beliefs: BeliefInfo[];
  history: HistoryEntry[];
  error: string | null;
}

export class App {
  readonly session: TeachSession;
  state: AppState = { tab: "ask", beliefs: [], history: [], error: null };

  constructor(
    private readonly client: ApiClient,
    private readonly onChange: (app: App) => void = () => {},
  ) {
    this.session = new TeachSession(client);
  }

  private notify(): void {
    this.onChange(this);
  }

  private fail(err: unknown): void {
    this.state.error = err instanceof Error ? err.message : String(err);
    this.notify();
  }

  switchTab(tab: Tab): void {
    this.state.tab = tab;
    this.state.error = null;
    this.notify();
  }

  async ask(draft: QuestionDraft): Promise<void> {
    this.state.error = null;
    try {
      const view = await this.session.ask(draft);
      this.remember(view);
    } catch (err) {
      this.fail(err);
      return;
    }
    this.notify();
  }

  async correct(
    nodePath: readonly number[],
    correction: Correction,
  ): Promise<void> {
    this.state.error = null;
    try {
      const view = await this.session.correctAndReask(
        nodePath,
        correction.statement,
        correction.assertedTrue,
      );
      this.remember(view);
    } catch (err) {
      this.fail(err);
      return;
    }
    this.notify();
  }

  private remember(view: AskView): void {
    this.state.history.unshift({
      proofId: view.info.proofId,
      createdAt: view.info.createdAt,
      question: view.info.question,
      chosenOption: view.info.chosenOption,
    });
  }

  async refreshBeliefs(): Promise<void> {
    try {
      this.state.beliefs = await this.client.listBeliefs();
    } catch (err) {
      this.fail(err);
      return;
    }
    this.notify();
  }

  async deleteBelief(key: string): Promise<void> {
    try {
      await this.client.deleteBelief(key);
      this.state.beliefs = this.state.beliefs.filter((b) => b.key !== key);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.state.beliefs = this.state.beliefs.filter((b) => b.key !== key);
      } else {
        this.fail(err);
        return;
      }
    }
    this.notify();
  }
}

// -- rendering ----------------------------------------------------------

function el(
  tag: string,
  attrs: Record<string, string>,
  children: (DomDesc | string)[] = [],
): DomDesc {
  return { tag, attrs, children };
}

function tabBar(active: Tab): DomDesc {
  const tabs: Tab[] = ["ask", "history", "beliefs"];
  return el(
    "nav",
    { class: "tabs" },
    tabs.map((tab) =>
      el(
        "button",
        {
          class: tab === active ? "tab active" : "tab",
          "data-action": "tab",
          "data-tab": tab,
        },
        [tab],
      ),
    ),
  );
}

function askForm(draft: QuestionDraft, busy: boolean): DomDesc {
  return el("form", { class: "ask-form", "data-action": "ask" }, [
    el("input", {
      name: "question",
      placeholder: "Ask a question",
      value: draft.question,
    }),
    el("input", {
      name: "options",
      placeholder: "Options, comma separated (e.g. yes, no)",
      value: draft.options.join(", "),
    }),
    el(
      "button",
      busy
        ? { type: "submit", disabled: "disabled" }
        : { type: "submit" },
      [busy ? "asking…" : "ask"],
    ),
  ]);
}

function answerSummary(view: AskView, label: string): DomDesc {
  const proof = chosenProof(view);
  const summary = el("div", { class: "answer" }, [
    el("span", { class: "answer-label" }, [label]),
    el("strong", {}, [view.info.chosenOption]),
    el("span", { class: "faithful" }, [
      view.info.faithful ? "proof-backed" : "not proof-backed",
    ]),
  ]);
  const children: (DomDesc | string)[] = [summary];
  if (proof !== null) {
    children.push(renderTree(proof));
  }
  return el("section", { class: "result" }, children);
}

function askPanel(session: TeachSession): DomDesc {
  const children: (DomDesc | string)[] = [askForm(session.draft, session.busy)];
  if (session.current !== null) {
    children.push(answerSummary(session.current, "answer"));
  }
  if (session.previous !== null) {
    children.push(answerSummary(session.previous, "before correction"));
  }
  return el("main", { class: "panel ask-panel" }, children);
}

function historyPanel(history: HistoryEntry[]): DomDesc {
  if (history.length === 0) {
    return el("main", { class: "panel" }, [el("p", {}, ["no proofs yet"])]);
  }
  return el(
    "main",
    { class: "panel" },
    [
      el(
        "ul",
        { class: "history" },
        history.map((entry) =>
          el("li", { "data-proof-id": entry.proofId }, [
            el("span", { class: "when" }, [entry.createdAt]),
            el("span", { class: "question" }, [entry.question]),
            el("span", { class: "chosen" }, [entry.chosenOption]),
          ]),
        ),
      ),
    ],
  );
}

function beliefsPanel(beliefs: BeliefInfo[]): DomDesc {
  if (beliefs.length === 0) {
    return el("main", { class: "panel" }, [el("p", {}, ["no taught beliefs"])]);
  }
  return el(
    "main",
    { class: "panel" },
    [
      el(
        "ul",
        { class: "beliefs" },
        beliefs.map((belief) =>
          el("li", { "data-key": belief.key }, [
            el("span", { class: "statement" }, [belief.text]),
            el("span", { class: "polarity" }, [
              belief.asserted_true ? "true" : "false",
            ]),
            el(
              "button",
              { "data-action": "delete-belief", "data-key": belief.key },
              ["forget"],
            ),
          ]),
        ),
      ),
    ],
  );
}

export function renderApp(app: App): DomDesc {
  const { state, session } = app;
  const children: (DomDesc | string)[] = [tabBar(state.tab)];
  if (state.error !== null) {
    children.push(el("div", { class: "error-panel", role: "alert" }, [state.error]));
  }
  if (state.tab === "ask") {
    children.push(askPanel(session));
  } else if (state.tab === "history") {
    children.push(historyPanel(state.history));
  } else {
    children.push(beliefsPanel(state.beliefs));
  }
  return el("div", { class: "app" }, children);
}
