/**
 * HTTP client for the proof-search service.
 *
 * All service interaction goes through these documented endpoints; the
 * fetch implementation is injected so tests run against a scripted fake.
 * Ask replies are returned with their raw body text because the view
 * models need the verbatim score tokens.
 */

import { AskRequest, BeliefAck, BeliefInfo, HealthInfo } from "./types.js";
import { AskView, parseAskBody } from "./viewmodel.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  const text = await response.text();
  try {
    const body = JSON.parse(text) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (body.detail !== undefined) return JSON.stringify(body.detail);
  } catch {
    // fall through to the raw text
  }
  return text || `HTTP ${response.status}`;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    const impl = fetchImpl ?? globalThis.fetch;
    if (impl === undefined) {
      throw new Error("no fetch implementation available");
    }
    this.fetchImpl = impl.bind(globalThis);
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async health(): Promise<HealthInfo> {
    const response = await this.request("GET", "/health");
    return (await response.json()) as HealthInfo;
  }

  /** POST /ask, keeping the raw body for verbatim score display. */
  async ask(body: AskRequest): Promise<AskView> {
    const response = await this.request("POST", "/ask", body);
    return parseAskBody(await response.text());
  }

  /** GET /proofs/{id}; the stored record embeds the original result. */
  async getProof(proofId: string): Promise<unknown> {
    const response = await this.request("GET", `/proofs/${encodeURIComponent(proofId)}`);
    return await response.json();
  }

  async listBeliefs(): Promise<BeliefInfo[]> {
    const response = await this.request("GET", "/beliefs");
    const body = (await response.json()) as { overrides: BeliefInfo[] };
    return body.overrides;
  }

  async addBelief(
    statement: string,
    assertedTrue: boolean,
    note?: string,
  ): Promise<BeliefAck> {
    const body: Record<string, unknown> = { statement, asserted_true: assertedTrue };
    if (note !== undefined) body.note = note;
    const response = await this.request("POST", "/beliefs", body);
    return (await response.json()) as BeliefAck;
  }

  async deleteBelief(key: string): Promise<void> {
    await this.request("DELETE", `/beliefs/${encodeURIComponent(key)}`);
  }
}
