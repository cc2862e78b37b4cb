/** Shared test plumbing: fixture loading and a scripted fake service.
 *
 * Fixture bodies were captured verbatim from the Python service (see
 * scripts/capture_fixtures.py), so byte-level assertions against them are
 * assertions about the real wire format.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { FetchLike } from "../src/api.js";
import { normalizedKey } from "../src/diff.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

export interface RecordedBelief {
  statement: string;
  asserted_true: boolean;
}

export type Scenario = "magnet" | "paperclip" | "chain";

/**
 * Replays captured bodies behind the real HTTP surface. Asks answer from
 * the "before" fixture until the scenario's correction has been taught,
 * then from the "after" fixture, which is exactly how the live service
 * behaves with memory on.
 */
export class FakeService {
  beliefs: RecordedBelief[] = [];
  askBodies: unknown[] = [];
  failNext: { path: string; status: number; detail: string } | null = null;

  constructor(private readonly scenario: Scenario) {}

  private corrected(): boolean {
    if (this.scenario === "magnet") {
      return this.beliefs.some(
        (b) => normalizedKey(b.statement) === "copper is magnetic" && !b.asserted_true,
      );
    }
    if (this.scenario === "paperclip") {
      return this.beliefs.some(
        (b) =>
          normalizedKey(b.statement) === "a paperclip is made of steel" &&
          b.asserted_true,
      );
    }
    return false;
  }

  private askFixture(): string {
    if (this.scenario === "magnet") {
      return this.corrected() ? "magnet_after.json" : "magnet_before.json";
    }
    if (this.scenario === "paperclip") {
      return this.corrected() ? "paperclip_noop_after.json" : "paperclip_ask.json";
    }
    return "chain_ask.json";
  }

  get fetch(): FetchLike {
    return async (url, init) => {
      const method = init?.method ?? "GET";
      const path = new URL(url).pathname;
      if (this.failNext !== null && path === this.failNext.path) {
        const { status, detail } = this.failNext;
        this.failNext = null;
        return jsonResponse(JSON.stringify({ detail }), status);
      }
      if (method === "POST" && path === "/ask") {
        this.askBodies.push(JSON.parse(String(init?.body)));
        return jsonResponse(fixtureText(this.askFixture()));
      }
      if (method === "POST" && path === "/beliefs") {
        const body = JSON.parse(String(init?.body)) as RecordedBelief;
        this.beliefs = this.beliefs.filter(
          (b) => normalizedKey(b.statement) !== normalizedKey(body.statement),
        );
        this.beliefs.push(body);
        return jsonResponse(
          JSON.stringify({
            key: normalizedKey(body.statement),
            override: {
              text: body.statement,
              asserted_true: body.asserted_true,
              source: "user",
              created_at: "2026-08-21T00:00:00+00:00",
              note: null,
            },
          }),
        );
      }
      if (method === "GET" && path === "/beliefs") {
        return jsonResponse(
          JSON.stringify({
            overrides: this.beliefs.map((b) => ({
              key: normalizedKey(b.statement),
              text: b.statement,
              asserted_true: b.asserted_true,
              source: "user",
              created_at: "2026-08-21T00:00:00+00:00",
              note: null,
            })),
          }),
        );
      }
      if (method === "DELETE" && path.startsWith("/beliefs/")) {
        const key = decodeURIComponent(path.slice("/beliefs/".length));
        const kept = this.beliefs.filter((b) => normalizedKey(b.statement) !== key);
        if (kept.length === this.beliefs.length) {
          return jsonResponse(
            JSON.stringify({ detail: `no override stored for key '${key}'` }),
            404,
          );
        }
        this.beliefs = kept;
        return jsonResponse(JSON.stringify({ removed: key }));
      }
      if (method === "GET" && path === "/health") {
        return jsonResponse(fixtureText("magnet_health.json"));
      }
      return jsonResponse(JSON.stringify({ detail: `no route ${method} ${path}` }), 404);
    };
  }
}

function jsonResponse(body: string, status = 200): Response {
  return new Response(body, {
    status,
    headers: { "content-type": "application/json" },
  });
}
