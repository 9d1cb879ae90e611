/** Shared test utilities: fixture loading, a strict fake fetch, and the
 * numeric-token extraction used by the data-provenance checks. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import { fmtNum } from "../src/viewmodel.js";

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export interface Fixture {
  method: string;
  path: string;
  request: unknown;
  status: number;
  response: unknown;
}

export function loadFixture(name: string): Fixture {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, `${name}.json`), "utf8"));
}

export interface TrafficEntry {
  url: string;
  method: string;
  body: unknown;
  response: unknown;
}

/** Serves recorded fixtures only; any unmatched request is an error, so a
 * test cannot quietly rely on traffic that was never recorded. */
export function fakeFetch(fixtures: Fixture[], log: TrafficEntry[] = []): FetchLike {
  return async (url, init) => {
    const path = url.replace(/^https?:\/\/[^/]*/, "");
    const body = init.body === undefined ? null : JSON.parse(init.body);
    const hit = fixtures.find(
      (f) =>
        f.method === init.method &&
        f.path === path &&
        JSON.stringify(f.request) === JSON.stringify(body),
    );
    if (!hit) {
      throw new Error(`no fixture for ${init.method} ${path} ${JSON.stringify(body)}`);
    }
    log.push({ url, method: init.method, body, response: hit.response });
    return { status: hit.status, json: async () => hit.response };
  };
}

const NUMBER_TOKEN = /-?\d+(?:\.\d+)?/g;

function walk(value: unknown, onNumber: (v: number) => void, onString: (s: string) => void): void {
  if (typeof value === "number") onNumber(value);
  else if (typeof value === "string") onString(value);
  else if (Array.isArray(value)) for (const v of value) walk(v, onNumber, onString);
  else if (typeof value === "object" && value !== null) {
    for (const v of Object.values(value)) walk(v, onNumber, onString);
  }
}

/** Every token a renderer may legitimately show, derived from response
 * payloads alone: formatted/verbatim number leaves plus numeric fragments
 * of string leaves (scenario names, error messages, citations). */
export function allowedTokens(responses: unknown[]): Set<string> {
  const allowed = new Set<string>();
  for (const response of responses) {
    walk(
      response,
      (v) => {
        allowed.add(String(v));
        allowed.add(fmtNum(v));
      },
      (s) => {
        for (const m of s.match(NUMBER_TOKEN) ?? []) allowed.add(m);
      },
    );
  }
  return allowed;
}

/** Numeric tokens a person can read: text content only, attributes gone. */
export function visibleNumericTokens(markup: string): string[] {
  const text = markup.replace(/<[^>]*>/g, " ");
  return text.match(NUMBER_TOKEN) ?? [];
}
