import { describe, expect, it } from "vitest";

import { CurationApi } from "../src/api.js";
import { barWidth, gaugeLabel, gaugeWidth, renderApp } from "../src/render.js";
import { SessionStore } from "../src/state.js";
import { FakeService } from "./fake_service.js";

async function loadedState() {
  const fake = new FakeService(["s1", "s2"], ["c1", "c2", "c3"]);
  const store = new SessionStore(fake as unknown as CurationApi, () => {}, 3);
  await store.start("demo");
  return { fake, store };
}

describe("renderApp", () => {
  it("renders one card per candidate with accept and reject buttons", async () => {
    const { store } = await loadedState();
    const html = renderApp(store.state);
    expect(html.match(/data-testid="candidate-card"/g)?.length).toBe(3);
    expect(html.match(/data-action="accept"/g)?.length).toBe(3);
    expect(html.match(/data-action="reject"/g)?.length).toBe(3);
  });

  it("shows per-criterion score bars from standardized panel scores", async () => {
    const { store } = await loadedState();
    const html = renderApp(store.state);
    expect(html).toContain("tweets200");
    expect(html).toContain('class="bar-fill"');
    // standardized 1.2 maps onto the 0..100 track
    expect(html).toContain(`width:${barWidth(1.2)}%`);
  });

  it("never renders a user as both candidate and member", async () => {
    const { store } = await loadedState();
    await store.decide("c1", "accept");
    const html = renderApp(store.state);
    const cardIds = [...html.matchAll(/data-testid="candidate-card" data-user-id="([^"]+)"/g)].map(
      (m) => m[1],
    );
    const memberIds = [...html.matchAll(/data-testid="member" data-user-id="([^"]+)"/g)].map(
      (m) => m[1],
    );
    expect(cardIds.filter((u) => memberIds.includes(u))).toEqual([]);
    expect(memberIds).toContain("c1");
  });

  it("renders the no-signal marker for corrected cohesion at zero", async () => {
    const { store } = await loadedState();
    const html = renderApp(store.state);
    expect(html).toContain('data-criterion="co_listed"');
    expect(html).toContain("no signal");
    expect(gaugeLabel(0)).toBe("no signal");
    expect(gaugeLabel(-0.2)).toBe("no signal");
    expect(gaugeLabel(0.25)).toBe("0.250");
  });

  it("renders history entries in decision order", async () => {
    const { store } = await loadedState();
    await store.decide("c1", "accept");
    await store.decide("c2", "reject");
    const html = renderApp(store.state);
    const seqs = [...html.matchAll(/data-testid="decision" data-seq="(\d+)"/g)].map((m) =>
      Number(m[1]),
    );
    expect(seqs).toEqual([1, 2]);
  });

  it("shows the retry banner when the service is unreachable", async () => {
    const { fake, store } = await loadedState();
    fake.unreachable = true;
    await store.refresh();
    const html = renderApp(store.state);
    expect(html).toContain('data-testid="banner-unreachable"');
    expect(html).toContain('data-action="retry"');
  });

  it("shows the reload prompt for a stale session", async () => {
    const { fake, store } = await loadedState();
    fake.forgetSession = true;
    await store.refresh();
    const html = renderApp(store.state);
    expect(html).toContain('data-testid="banner-stale"');
    expect(html).toContain('data-action="reload"');
  });

  it("escapes markup in server-provided strings", async () => {
    const fake = new FakeService(["s1", "s2"], ['<img src=x onerror="1">']);
    const store = new SessionStore(fake as unknown as CurationApi, () => {}, 3);
    await store.start("demo");
    const html = renderApp(store.state);
    expect(html).not.toContain('<img src=x');
    expect(html).toContain("&lt;img");
  });
});

describe("scales", () => {
  it("clamps bar widths into 0..100", () => {
    expect(barWidth(-10)).toBe(0);
    expect(barWidth(0)).toBe(50);
    expect(barWidth(10)).toBe(100);
  });

  it("clamps gauge widths into 0..100", () => {
    expect(gaugeWidth(-0.5)).toBe(0);
    expect(gaugeWidth(0.5)).toBe(50);
    expect(gaugeWidth(2)).toBe(100);
  });
});
