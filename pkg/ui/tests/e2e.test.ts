/** Scripted console session against the real Python service.
 *
 * Spins up `listcurator serve` on a synthetic bundle, drives the UI store
 * through create / accept x2 / reject x1 / export, then replays the same
 * decisions through the raw HTTP API on a fresh session. The two exports
 * must be identical apart from the session id.
 */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { CurationApi, ExportDocument } from "../src/api.js";
import { SessionStore } from "../src/state.js";

const PORT = 8631;
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let server: ChildProcess | undefined;

async function waitForService(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/v1/datasets`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "curation-ui-"));
  const synth = spawnSync(
    "listcurator",
    [
      "synth",
      "--preset", "small",
      "--seed", "13",
      "--n-seed", "20",
      "--n-noise", "60",
      "--tweets-per-user", "8",
      "--vocab-size", "200",
      "--list-count", "16",
      "--signal", "tweets200=0.8",
      "--signal", "co_listed=0.6",
      "--out", join(workdir, "data", "demo"),
    ],
    { encoding: "utf-8" },
  );
  expect(synth.status, synth.stderr).toBe(0);

  server = spawn(
    "listcurator",
    ["serve", "--data-root", join(workdir, "data"), "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForService();
}, 60_000);

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

function stripSession(doc: ExportDocument): Omit<ExportDocument, "session_id"> {
  const { session_id: _ignored, ...rest } = doc;
  return rest;
}

describe("console session against the live service", () => {
  it("matches a raw HTTP replay of the same decisions", async () => {
    // drive the UI store: create, accept two, reject one, export
    const api = new CurationApi(BASE);
    const store = new SessionStore(api, () => {}, 10);
    await store.start("demo");
    expect(store.state.connection).toBe("ok");
    expect(store.state.summary?.seed_count).toBe(20);

    const script: Array<"accept" | "reject"> = ["accept", "accept", "reject"];
    for (const action of script) {
      const top = store.candidateIds()[0]!;
      await store.decide(top, action);
      expect(store.candidateIds()).not.toContain(top);
    }
    expect(store.state.summary?.seed_count).toBe(22);
    expect(store.state.summary?.rejected_count).toBe(1);

    const sessionId = store.state.summary!.session_id;
    const uiExport = (await (
      await fetch(`${BASE}/v1/sessions/${sessionId}/export`)
    ).json()) as ExportDocument;

    // decision history shown by the console replays in export order
    expect(store.state.decisions).toEqual(uiExport.decisions);

    // replay the same decisions through the raw HTTP API on a new session
    const created = await fetch(`${BASE}/v1/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ dataset_id: "demo" }),
    });
    expect(created.status).toBe(201);
    const rawSession = ((await created.json()) as { session_id: string }).session_id;
    for (const decision of uiExport.decisions) {
      const posted = await fetch(`${BASE}/v1/sessions/${rawSession}/decisions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          user_id: decision.user_id,
          action: decision.action,
          curator: decision.curator,
        }),
      });
      expect(posted.status).toBe(200);
    }
    const rawExport = (await (
      await fetch(`${BASE}/v1/sessions/${rawSession}/export`)
    ).json()) as ExportDocument;

    expect(stripSession(uiExport)).toEqual(stripSession(rawExport));
  }, 60_000);

  it("serves cohesion diagnostics the console can gauge", async () => {
    const api = new CurationApi(BASE);
    const store = new SessionStore(api, () => {}, 5);
    await store.start("demo");
    const tags = store.state.cohesion.map((e) => e.criterion);
    expect(tags).toEqual(store.state.summary?.criteria);
    for (const entry of store.state.cohesion) {
      expect(entry.randomizations).toBeGreaterThanOrEqual(100);
      expect(Number.isFinite(entry.corrected)).toBe(true);
    }
  }, 60_000);
});
