/** Plain-JS shapes of the service JSON, for everything except proof scores.
 * Proof scores are never read through these types; they flow through the
 * token-preserving view model so the UI shows them verbatim.
 */

export type Mode = "direct" | "entailer" | "combined";

export interface AskRequest {
  id?: string;
  question: string;
  options?: string[];
  mode?: Mode;
  use_memory?: boolean;
  open_ended?: boolean;
  n_candidates?: number;
  cfg?: Record<string, unknown>;
}

export interface HealthInfo {
  status: string;
  backend: string;
  beliefs: number;
  proofs: number;
}

export interface OptionOutcomeInfo {
  option: string;
  hypothesis: string | null;
  error: string | null;
  hasProof: boolean;
}

/** Envelope facts of one /ask reply; scores live in the view models. */
export interface AskInfo {
  proofId: string;
  createdAt: string;
  question: string;
  mode: Mode;
  chosenIndex: number;
  chosenOption: string;
  faithful: boolean;
  perOption: OptionOutcomeInfo[];
}

export interface BeliefInfo {
  key: string;
  text: string;
  asserted_true: boolean;
  source: string;
  created_at: string;
  note: string | null;
}

export interface BeliefAck {
  key: string;
  override: Omit<BeliefInfo, "key">;
}
