/**
 * Teach-loop session state: one question, its current result, and the
 * previous result kept for before/after comparison.
 *
 * One ask is in flight at a time; nothing is rendered optimistically, so
 * state only changes after the service confirms. On any failure the
 * session is left exactly as it was.
 */

import { ApiClient } from "./api.js";
import { applyHighlights, changedKeys } from "./diff.js";
import { AskRequest, Mode } from "./types.js";
import { AskView, chosenProof, nodeAtPath } from "./viewmodel.js";

export interface QuestionDraft {
  question: string;
  options: string[];
  mode: Mode;
}

export interface Correction {
  statement: string;
  assertedTrue: boolean;
}

export class TeachSession {
  draft: QuestionDraft = { question: "", options: [], mode: "entailer" };
  current: AskView | null = null;
  previous: AskView | null = null;
  pendingCorrections: Correction[] = [];
  private inFlight = false;

  constructor(private readonly client: ApiClient) {}

  get busy(): boolean {
    return this.inFlight;
  }

  private async withFlightLock<T>(work: () => Promise<T>): Promise<T> {
    if (this.inFlight) {
      throw new Error("an ask is already in flight for this session");
    }
    this.inFlight = true;
    try {
      return await work();
    } finally {
      this.inFlight = false;
    }
  }

  private askBody(useMemory: boolean): AskRequest {
    return {
      question: this.draft.question,
      options: this.draft.options,
      mode: this.draft.mode,
      use_memory: useMemory,
    };
  }

  /** Ask the drafted question; replaces the whole before/after pair. */
  async ask(draft: QuestionDraft): Promise<AskView> {
    return this.withFlightLock(async () => {
      const view = await this.client.ask({
        question: draft.question,
        options: draft.options,
        mode: draft.mode,
        use_memory: true,
      });
      this.draft = { ...draft, options: [...draft.options] };
      this.current = view;
      this.previous = null;
      return view;
    });
  }

  stageCorrection(correction: Correction): void {
    this.pendingCorrections.push(correction);
  }

  /**
   * Teach one correction and re-ask the same question with memory on.
   *
   * `nodePath` must address a leaf of the current chosen proof (child
   * indices from the root). After the re-ask completes the old result
   * becomes `previous` and changed nodes are highlighted on both sides.
   */
  async correctAndReask(
    nodePath: readonly number[],
    correctedStatement: string,
    assertedTrue: boolean,
  ): Promise<AskView> {
    const before = this.current;
    if (before === null) {
      throw new Error("nothing asked yet; there is no proof to correct");
    }
    const proof = chosenProof(before);
    if (proof === null) {
      throw new Error("the chosen option has no proof to correct");
    }
    const target = nodeAtPath(proof, nodePath);
    if (target === undefined) {
      throw new Error(`node path [${nodePath.join(", ")}] is not in the proof`);
    }
    if (target.children.length > 0) {
      throw new Error(
        `node path [${nodePath.join(", ")}] addresses an inner node, not a leaf`,
      );
    }

    return this.withFlightLock(async () => {
      const correction: Correction = { statement: correctedStatement, assertedTrue };
      this.pendingCorrections = this.pendingCorrections.filter(
        (c) => c.statement !== correction.statement || c.assertedTrue !== correction.assertedTrue,
      );
      await this.client.addBelief(correction.statement, correction.assertedTrue);
      const after = await this.client.ask(this.askBody(true));

      const changed = changedKeys(proof, chosenProof(after));
      this.previous = withHighlights(before, changed);
      this.current = withHighlights(after, changed);
      return this.current;
    });
  }
}

function withHighlights(view: AskView, changed: ReadonlySet<string>): AskView {
  return {
    ...view,
    proofs: view.proofs.map((proof) =>
      proof === null ? null : applyHighlights(proof, changed),
    ),
  };
}
