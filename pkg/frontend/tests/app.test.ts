import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, renderApp } from "../src/app.js";
import { DomDesc, textOf, walkDesc } from "../src/render.js";
import { FakeService } from "./helpers.js";

function magnetApp(): { app: App; service: FakeService; renders: number[] } {
  const service = new FakeService("magnet");
  const renders: number[] = [];
  const app = new App(new ApiClient("http://service.test", service.fetch), () =>
    renders.push(1),
  );
  return { app, service, renders };
}

function find(desc: DomDesc, cls: string): DomDesc | undefined {
  return [...walkDesc(desc)].find((d) => d.attrs?.class?.split(" ").includes(cls));
}

const MAGNET_DRAFT = {
  question: "Can a magnet attract a penny?",
  options: ["yes", "no"],
  mode: "entailer" as const,
};

describe("tabs", () => {
  it("starts on ask and switches panels", () => {
    const { app } = magnetApp();
    expect(find(renderApp(app), "ask-form")).toBeDefined();

    app.switchTab("history");
    const history = renderApp(app);
    expect(find(history, "ask-form")).toBeUndefined();
    expect(textOf(find(history, "panel")!)).toContain("no proofs yet");

    app.switchTab("beliefs");
    expect(textOf(find(renderApp(app), "panel")!)).toContain("no taught beliefs");
  });

  it("marks the active tab", () => {
    const { app } = magnetApp();
    app.switchTab("beliefs");
    const bar = find(renderApp(app), "tabs")!;
    const actives = [...walkDesc(bar)]
      .filter((d) => d.attrs?.class === "tab active")
      .map(textOf);
    expect(actives).toEqual(["beliefs"]);
  });
});

describe("asking", () => {
  it("renders the confirmed answer with its proof tree", async () => {
    const { app, renders } = magnetApp();
    await app.ask(MAGNET_DRAFT);
    expect(renders.length).toBeGreaterThan(0);

    const desc = renderApp(app);
    const answer = find(desc, "answer")!;
    expect(textOf(answer)).toContain("yes");
    expect(find(desc, "proof-tree")).toBeDefined();
    expect(find(desc, "error-panel")).toBeUndefined();
  });

  it("records history entries for every confirmed ask", async () => {
    const { app } = magnetApp();
    await app.ask(MAGNET_DRAFT);
    await app.correct([1], { statement: "Copper is magnetic.", assertedTrue: false });

    expect(app.state.history).toHaveLength(2);
    expect(app.state.history[0]?.chosenOption).toBe("no");
    expect(app.state.history[1]?.chosenOption).toBe("yes");
    expect(app.state.history.every((h) => h.proofId.length > 0)).toBe(true);

    app.switchTab("history");
    const panel = find(renderApp(app), "history")!;
    expect([...walkDesc(panel)].filter((d) => d.tag === "li")).toHaveLength(2);
  });

  it("shows before and after trees once a correction lands", async () => {
    const { app } = magnetApp();
    await app.ask(MAGNET_DRAFT);
    await app.correct([1], { statement: "Copper is magnetic.", assertedTrue: false });

    const desc = renderApp(app);
    const sections = [...walkDesc(desc)].filter(
      (d) => d.attrs?.class === "result",
    );
    expect(sections).toHaveLength(2);
    expect(textOf(sections[0]!)).toContain("no");
    expect(textOf(sections[1]!)).toContain("before correction");
    const highlighted = [...walkDesc(desc)].filter(
      (d) => d.attrs?.["data-highlight"] === "corrected",
    );
    expect(highlighted.length).toBeGreaterThan(0);
  });

  it("puts failures in the error panel and keeps the old result", async () => {
    const { app, service } = magnetApp();
    await app.ask(MAGNET_DRAFT);
    service.failNext = { path: "/ask", status: 503, detail: "model service down" };
    await app.ask(MAGNET_DRAFT);

    const desc = renderApp(app);
    expect(textOf(find(desc, "error-panel")!)).toBe("model service down");
    expect(find(desc, "proof-tree")).toBeDefined(); // previous result still shown
    expect(app.state.history).toHaveLength(1);
  });
});

describe("beliefs", () => {
  it("lists and deletes taught beliefs", async () => {
    const { app, service } = magnetApp();
    service.beliefs.push({ statement: "Copper is magnetic.", asserted_true: false });
    await app.refreshBeliefs();
    expect(app.state.beliefs.map((b) => b.key)).toEqual(["copper is magnetic"]);

    app.switchTab("beliefs");
    const panel = find(renderApp(app), "beliefs")!;
    expect(textOf(panel)).toContain("Copper is magnetic.");
    expect(textOf(panel)).toContain("false");

    await app.deleteBelief("copper is magnetic");
    expect(app.state.beliefs).toEqual([]);
    expect(service.beliefs).toEqual([]);
  });

  it("treats deleting a missing belief as already gone", async () => {
    const { app } = magnetApp();
    app.state.beliefs = [
      {
        key: "ghost",
        text: "Ghost.",
        asserted_true: true,
        source: "user",
        created_at: "",
        note: null,
      },
    ];
    await app.deleteBelief("ghost");
    expect(app.state.beliefs).toEqual([]);
    expect(app.state.error).toBeNull();
  });
});
