// Fixture loading plus tiny HTML scrapers shared by the contract tests.
// Fixtures under tests/fixtures are recorded from the real service; tests
// never fabricate payloads by hand.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureJson<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

export function fixtureZip(name: string): ArrayBuffer {
  const { base64 } = fixtureJson<{ base64: string }>(name);
  const buf = Buffer.from(base64, "base64");
  return buf.buffer.slice(buf.byteOffset, buf.byteOffset + buf.byteLength);
}

export function scrape(html: string, pattern: RegExp): string[][] {
  const out: string[][] = [];
  for (const match of html.matchAll(pattern)) {
    out.push(match.slice(1));
  }
  return out;
}

// Stub fetch that replays a canned response and records the request.
export interface RecordedCall {
  url: string;
  form: FormData | null;
}

export function mockFetch(
  response: () => Response,
): { calls: RecordedCall[]; restore: () => void } {
  const calls: RecordedCall[] = [];
  const original = globalThis.fetch;
  globalThis.fetch = (async (input: unknown, init?: RequestInit) => {
    calls.push({
      url: String(input),
      form: init?.body instanceof FormData ? init.body : null,
    });
    return response();
  }) as typeof fetch;
  return {
    calls,
    restore: () => {
      globalThis.fetch = original;
    },
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
