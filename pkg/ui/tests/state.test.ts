import { describe, expect, it } from "vitest";

import { CurationApi } from "../src/api.js";
import { SessionStore } from "../src/state.js";
import { FakeService } from "./fake_service.js";

function storeWith(fake: FakeService, k = 5): SessionStore {
  // the fake implements the same method surface the store uses
  return new SessionStore(fake as unknown as CurationApi, () => {}, k);
}

function makeFake(): FakeService {
  return new FakeService(
    ["s1", "s2"],
    ["c1", "c2", "c3", "c4", "c5", "c6"],
  );
}

describe("SessionStore", () => {
  it("loads candidates, members, history, and cohesion on start", async () => {
    const store = storeWith(makeFake());
    await store.start("demo");
    expect(store.candidateIds()).toEqual(["c1", "c2", "c3", "c4", "c5"]);
    expect(store.memberIds()).toEqual(["s1", "s2"]);
    expect(store.state.cohesion.map((e) => e.criterion)).toEqual([
      "tweets200",
      "co_listed",
    ]);
    expect(store.state.connection).toBe("ok");
  });

  it("accepting the top candidate removes its card and grows the list", async () => {
    const store = storeWith(makeFake());
    await store.start("demo");
    const top = store.candidateIds()[0]!;
    await store.decide(top, "accept");
    expect(store.candidateIds()).not.toContain(top);
    expect(store.memberIds()).toContain(top);
    expect(store.state.summary?.seed_count).toBe(3);
  });

  it("rejected users never return as candidates", async () => {
    const store = storeWith(makeFake());
    await store.start("demo");
    const target = store.candidateIds()[1]!;
    await store.decide(target, "reject");
    expect(store.candidateIds()).not.toContain(target);
    expect(store.memberIds()).not.toContain(target);
    expect(store.state.summary?.rejected_count).toBe(1);
  });

  it("never shows a user as both candidate and member", async () => {
    const store = storeWith(makeFake());
    await store.start("demo");
    for (const action of ["accept", "reject", "accept"] as const) {
      await store.decide(store.candidateIds()[0]!, action);
      const overlap = store.candidateIds().filter((u) => store.memberIds().includes(u));
      expect(overlap).toEqual([]);
    }
  });

  it("decision history grows in order", async () => {
    const store = storeWith(makeFake());
    await store.start("demo");
    await store.decide(store.candidateIds()[0]!, "accept");
    await store.decide(store.candidateIds()[0]!, "reject");
    expect(store.state.decisions.map((d) => d.seq)).toEqual([1, 2]);
    expect(store.state.decisions.map((d) => d.action)).toEqual(["accept", "reject"]);
  });

  it("surfaces already-decided conflicts and resyncs", async () => {
    const fake = makeFake();
    const store = storeWith(fake);
    await store.start("demo");
    const top = store.candidateIds()[0]!;
    // another curator decides the same user elsewhere
    await fake.decide("s1", top, "reject");
    await store.decide(top, "accept");
    expect(store.state.notice).toContain("already decided");
    expect(store.candidateIds()).not.toContain(top);
  });

  it("flags an unreachable service and recovers on retry", async () => {
    const fake = makeFake();
    const store = storeWith(fake);
    await store.start("demo");
    fake.unreachable = true;
    await store.refresh();
    expect(store.state.connection).toBe("unreachable");
    fake.unreachable = false;
    await store.refresh();
    expect(store.state.connection).toBe("ok");
  });

  it("flags a stale session for reload", async () => {
    const fake = makeFake();
    const store = storeWith(fake);
    await store.start("demo");
    fake.forgetSession = true;
    await store.refresh();
    expect(store.state.connection).toBe("stale");
  });

  it("truncation flag reflects the response", async () => {
    const store = storeWith(makeFake(), 50);
    await store.start("demo");
    expect(store.state.truncated).toBe(true);
  });
});
