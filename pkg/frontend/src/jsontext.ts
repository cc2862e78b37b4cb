/**
 * Token-preserving JSON codec.
 *
 * The UI never computes or reformats scores: every number shown must be
 * string-equal to the token the service sent. `JSON.parse` destroys that
 * information (`1.0` becomes the number 1, which re-renders as "1"), so this
 * codec keeps the verbatim source token for every number and string.
 * Re-serializing a parsed tree reproduces a compact service body byte for
 * byte, which is what makes "lossless projection" checkable at all.
 */

export type JsonText =
  | { kind: "object"; entries: JsonEntry[] }
  | { kind: "array"; items: JsonText[] }
  | { kind: "string"; value: string; raw: string }
  | { kind: "number"; raw: string }
  | { kind: "boolean"; value: boolean }
  | { kind: "null" };

export interface JsonEntry {
  key: string;
  keyRaw: string;
  value: JsonText;
}

export class JsonTextError extends Error {
  constructor(message: string, readonly position: number) {
    super(`${message} at offset ${position}`);
    this.name = "JsonTextError";
  }
}

const NUMBER_RE = /^-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/;
const WHITESPACE = new Set([" ", "\t", "\n", "\r"]);

export function parseJsonText(text: string): JsonText {
  const parser = new Parser(text);
  const value = parser.parseValue();
  parser.skipWhitespace();
  if (!parser.done()) {
    throw new JsonTextError("trailing content after JSON value", parser.pos);
  }
  return value;
}

class Parser {
  pos = 0;

  constructor(private readonly text: string) {}

  done(): boolean {
    return this.pos >= this.text.length;
  }

  skipWhitespace(): void {
    while (!this.done() && WHITESPACE.has(this.text[this.pos]!)) {
      this.pos += 1;
    }
  }

  parseValue(): JsonText {
    this.skipWhitespace();
    if (this.done()) {
      throw new JsonTextError("unexpected end of input", this.pos);
    }
    const ch = this.text[this.pos]!;
    if (ch === "{") return this.parseObject();
    if (ch === "[") return this.parseArray();
    if (ch === '"') return this.parseString();
    if (ch === "t" || ch === "f") return this.parseBoolean();
    if (ch === "n") return this.parseNull();
    return this.parseNumber();
  }

  private parseObject(): JsonText {
    this.pos += 1; // consume "{"
    const entries: JsonEntry[] = [];
    this.skipWhitespace();
    if (this.text[this.pos] === "}") {
      this.pos += 1;
      return { kind: "object", entries };
    }
    for (;;) {
      this.skipWhitespace();
      const key = this.parseString();
      this.skipWhitespace();
      if (this.text[this.pos] !== ":") {
        throw new JsonTextError("expected ':' after object key", this.pos);
      }
      this.pos += 1;
      entries.push({ key: key.value, keyRaw: key.raw, value: this.parseValue() });
      this.skipWhitespace();
      const ch = this.text[this.pos];
      if (ch === ",") {
        this.pos += 1;
        continue;
      }
      if (ch === "}") {
        this.pos += 1;
        return { kind: "object", entries };
      }
      throw new JsonTextError("expected ',' or '}' in object", this.pos);
    }
  }

  private parseArray(): JsonText {
    this.pos += 1; // consume "["
    const items: JsonText[] = [];
    this.skipWhitespace();
    if (this.text[this.pos] === "]") {
      this.pos += 1;
      return { kind: "array", items };
    }
    for (;;) {
      items.push(this.parseValue());
      this.skipWhitespace();
      const ch = this.text[this.pos];
      if (ch === ",") {
        this.pos += 1;
        continue;
      }
      if (ch === "]") {
        this.pos += 1;
        return { kind: "array", items };
      }
      throw new JsonTextError("expected ',' or ']' in array", this.pos);
    }
  }

  private parseString(): { kind: "string"; value: string; raw: string } {
    if (this.text[this.pos] !== '"') {
      throw new JsonTextError("expected string", this.pos);
    }
    const start = this.pos;
    this.pos += 1;
    while (!this.done()) {
      const ch = this.text[this.pos]!;
      if (ch === "\\") {
        this.pos += 2;
        continue;
      }
      if (ch === '"') {
        this.pos += 1;
        const quoted = this.text.slice(start, this.pos);
        let value: string;
        try {
          value = JSON.parse(quoted) as string;
        } catch {
          throw new JsonTextError("malformed string escape", start);
        }
        return { kind: "string", value, raw: quoted.slice(1, -1) };
      }
      this.pos += 1;
    }
    throw new JsonTextError("unterminated string", start);
  }

  private parseNumber(): JsonText {
    const match = NUMBER_RE.exec(this.text.slice(this.pos));
    if (!match) {
      throw new JsonTextError("expected a JSON value", this.pos);
    }
    this.pos += match[0].length;
    return { kind: "number", raw: match[0] };
  }

  private parseBoolean(): JsonText {
    if (this.text.startsWith("true", this.pos)) {
      this.pos += 4;
      return { kind: "boolean", value: true };
    }
    if (this.text.startsWith("false", this.pos)) {
      this.pos += 5;
      return { kind: "boolean", value: false };
    }
    throw new JsonTextError("expected a JSON value", this.pos);
  }

  private parseNull(): JsonText {
    if (this.text.startsWith("null", this.pos)) {
      this.pos += 4;
      return { kind: "null" };
    }
    throw new JsonTextError("expected a JSON value", this.pos);
  }
}

/** Compact re-serialization; byte-identical for compact input. */
export function serializeJsonText(value: JsonText): string {
  switch (value.kind) {
    case "object":
      return (
        "{" +
        value.entries
          .map((e) => `"${e.keyRaw}":${serializeJsonText(e.value)}`)
          .join(",") +
        "}"
      );
    case "array":
      return "[" + value.items.map(serializeJsonText).join(",") + "]";
    case "string":
      return `"${value.raw}"`;
    case "number":
      return value.raw;
    case "boolean":
      return value.value ? "true" : "false";
    case "null":
      return "null";
  }
}

/** Build a string node whose raw token matches standard JSON escaping. */
export function stringNode(value: string): JsonText {
  return { kind: "string", value, raw: JSON.stringify(value).slice(1, -1) };
}

/** Decode to plain JS values; number tokens become JS numbers. */
export function toPlain(value: JsonText): unknown {
  switch (value.kind) {
    case "object": {
      const out: Record<string, unknown> = {};
      for (const entry of value.entries) {
        out[entry.key] = toPlain(entry.value);
      }
      return out;
    }
    case "array":
      return value.items.map(toPlain);
    case "string":
      return value.value;
    case "number":
      return Number(value.raw);
    case "boolean":
      return value.value;
    case "null":
      return null;
  }
}

export function getEntry(value: JsonText, key: string): JsonText | undefined {
  if (value.kind !== "object") return undefined;
  return value.entries.find((e) => e.key === key)?.value;
}

export function atIndex(value: JsonText, index: number): JsonText | undefined {
  if (value.kind !== "array") return undefined;
  return value.items[index];
}
