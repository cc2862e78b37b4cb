import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { changedKeys, normalizedKey } from "../src/diff.js";
import { QuestionDraft, TeachSession } from "../src/session.js";
import { chosenProof, walkProof } from "../src/viewmodel.js";
import { FakeService } from "./helpers.js";

const MAGNET_DRAFT: QuestionDraft = {
  question: "Can a magnet attract a penny?",
  options: ["yes", "no"],
  mode: "entailer",
};

const PAPERCLIP_DRAFT: QuestionDraft = {
  question: "Is a paperclip made of metal?",
  options: ["yes", "no"],
  mode: "entailer",
};

function magnetSession(): { session: TeachSession; service: FakeService } {
  const service = new FakeService("magnet");
  const client = new ApiClient("http://service.test", service.fetch);
  return { session: new TeachSession(client), service };
}

function highlightedStatements(session: TeachSession): Set<string> {
  const marked = new Set<string>();
  for (const view of [session.previous, session.current]) {
    if (view === null) continue;
    const proof = chosenProof(view);
    if (proof === null) continue;
    for (const node of walkProof(proof)) {
      if (node.highlight === "corrected") marked.add(node.statement);
    }
  }
  return marked;
}

describe("normalizedKey", () => {
  it("matches the service's belief keys", () => {
    expect(normalizedKey("Copper is magnetic.")).toBe("copper is magnetic");
    expect(normalizedKey("  COPPER   is, magnetic!  ")).toBe("copper is magnetic");
  });
});

describe("ask", () => {
  it("stores the draft and the confirmed result", async () => {
    const { session, service } = magnetSession();
    const view = await session.ask(MAGNET_DRAFT);
    expect(view.info.chosenOption).toBe("yes");
    expect(session.current).toBe(view);
    expect(session.previous).toBeNull();
    expect(session.draft.question).toBe(MAGNET_DRAFT.question);
    expect(service.askBodies).toEqual([
      {
        question: "Can a magnet attract a penny?",
        options: ["yes", "no"],
        mode: "entailer",
        use_memory: true,
      },
    ]);
  });

  it("allows one in-flight ask at a time", async () => {
    const { session } = magnetSession();
    const first = session.ask(MAGNET_DRAFT);
    await expect(session.ask(MAGNET_DRAFT)).rejects.toThrow(/already in flight/);
    await first;
    await session.ask(MAGNET_DRAFT); // free again once settled
  });

  it("surfaces service failures and keeps no partial state", async () => {
    const { session, service } = magnetSession();
    service.failNext = { path: "/ask", status: 503, detail: "model service down" };
    await expect(session.ask(MAGNET_DRAFT)).rejects.toThrow("model service down");
    expect(session.current).toBeNull();
    expect(session.busy).toBe(false);
  });
});

describe("correctAndReask", () => {
  it("flips the magnet answer and sets previous only after the re-ask", async () => {
    const { session, service } = magnetSession();
    const before = await session.ask(MAGNET_DRAFT);
    expect(before.info.chosenOption).toBe("yes");

    const after = await session.correctAndReask([1], "Copper is magnetic.", false);
    expect(after.info.chosenOption).toBe("no");
    expect(session.current?.info.chosenOption).toBe("no");
    expect(session.previous?.info.chosenOption).toBe("yes");
    expect(service.beliefs).toEqual([
      { statement: "Copper is magnetic.", asserted_true: false },
    ]);
    const statements = [...walkProof(chosenProof(session.current!)!)].map(
      (n) => n.statement,
    );
    expect(statements).toContain("Copper is not magnetic.");
  });

  it("highlights exactly the nodes present on one side only", async () => {
    const { session } = magnetSession();
    await session.ask(MAGNET_DRAFT);
    await session.correctAndReask([1], "Copper is magnetic.", false);

    expect(highlightedStatements(session)).toEqual(
      new Set([
        "A magnet can attract a penny.",
        "Copper is magnetic.",
        "A magnet cannot attract a penny.",
        "Copper is not magnetic.",
      ]),
    );
    const shared = [...walkProof(chosenProof(session.current!)!)].find(
      (n) => n.statement === "A penny is made of copper.",
    );
    expect(shared?.highlight).toBe("none");
  });

  it("leaves the diff empty for a no-op correction", async () => {
    const service = new FakeService("paperclip");
    const session = new TeachSession(new ApiClient("http://service.test", service.fetch));
    await session.ask(PAPERCLIP_DRAFT);
    const after = await session.correctAndReask([0], "A paperclip is made of steel.", true);

    expect(after.info.chosenOption).toBe("yes"); // unchanged
    expect(session.previous?.info.chosenOption).toBe("yes");
    expect(highlightedStatements(session)).toEqual(new Set());
  });

  it("requires a leaf node path", async () => {
    const { session } = magnetSession();
    await session.ask(MAGNET_DRAFT);
    await expect(session.correctAndReask([], "x.", false)).rejects.toThrow(
      /inner node, not a leaf/,
    );
    await expect(session.correctAndReask([7], "x.", false)).rejects.toThrow(
      /not in the proof/,
    );
  });

  it("requires an existing result", async () => {
    const { session } = magnetSession();
    await expect(session.correctAndReask([0], "x.", false)).rejects.toThrow(
      /nothing asked yet/,
    );
  });

  it("keeps the session unchanged when teaching fails", async () => {
    const { session, service } = magnetSession();
    const before = await session.ask(MAGNET_DRAFT);
    service.failNext = { path: "/beliefs", status: 500, detail: "boom" };

    await expect(
      session.correctAndReask([1], "Copper is magnetic.", false),
    ).rejects.toThrow(ApiError);
    expect(session.current).toBe(before);
    expect(session.previous).toBeNull();
    expect(service.beliefs).toEqual([]);
  });

  it("keeps the session unchanged when the re-ask fails", async () => {
    const { session, service } = magnetSession();
    const before = await session.ask(MAGNET_DRAFT);
    service.failNext = { path: "/ask", status: 504, detail: "search exceeded 120s" };

    await expect(
      session.correctAndReask([1], "Copper is magnetic.", false),
    ).rejects.toThrow("search exceeded 120s");
    expect(session.current).toBe(before);
    expect(session.previous).toBeNull();
    expect(session.busy).toBe(false);
  });

  it("submits a staged correction and clears it from pending", async () => {
    const { session } = magnetSession();
    await session.ask(MAGNET_DRAFT);
    session.stageCorrection({ statement: "Copper is magnetic.", assertedTrue: false });
    expect(session.pendingCorrections).toHaveLength(1);
    await session.correctAndReask([1], "Copper is magnetic.", false);
    expect(session.pendingCorrections).toEqual([]);
  });

  it("accumulates sequential corrections in the service's belief list", async () => {
    const { session, service } = magnetSession();
    const client = new ApiClient("http://service.test", service.fetch);
    await session.ask(MAGNET_DRAFT);
    await session.correctAndReask([1], "Copper is magnetic.", false);
    await client.addBelief("A magnet attracts iron.", true);

    const beliefs = await client.listBeliefs();
    expect(beliefs.map((b) => b.key)).toEqual([
      "copper is magnetic",
      "a magnet attracts iron",
    ]);
  });
});

describe("changedKeys", () => {
  it("is empty for identical proofs", async () => {
    const { session } = magnetSession();
    const view = await session.ask(MAGNET_DRAFT);
    const proof = chosenProof(view)!;
    expect(changedKeys(proof, proof)).toEqual(new Set());
  });

  it("treats a missing side as all-changed", async () => {
    const { session } = magnetSession();
    const view = await session.ask(MAGNET_DRAFT);
    const proof = chosenProof(view)!;
    expect(changedKeys(null, proof)).toEqual(
      new Set([
        "a magnet can attract a penny",
        "a penny is made of copper",
        "copper is magnetic",
      ]),
    );
  });
});
