import { describe, expect, it } from "vitest";

import {
  applyEvent,
  canDecide,
  clearVerdictPending,
  initialState,
  markVerdictPending,
  rebuildFromCandidates,
} from "../src/state.js";
import { renderCandidatePanel, renderClusterCard, renderDashboard } from "../src/view.js";
import type { CandidatePayload, ClusterSnapshot, WireEvent } from "../src/types.js";

function snap(overrides: Partial<ClusterSnapshot> = {}): ClusterSnapshot {
  return {
    cluster_id: 1,
    members: [{ language: "en", title: "Pope Benedict XVI" }],
    occurrences: 2,
    edit_count: 2,
    editors: ["Alice", "Bob"],
    created_at: "2013-02-11T10:58:00.000Z",
    last_edit_at: "2013-02-11T10:59:00.000Z",
    max_gap_secs: 60,
    candidate_fired: false,
    ...overrides,
  };
}

function candidate(overrides: Partial<CandidatePayload> = {}): CandidatePayload {
  return {
    candidate_id: "cand-1",
    cluster_id: 1,
    members: [
      { language: "en", title: "Pope Benedict XVI" },
      { language: "fr", title: "Benoît XVI" },
    ],
    fired_at: "2013-02-11T11:01:00.000Z",
    occurrences: 6,
    editors: ["Alice", "Bob", "Carol"],
    timeline: [],
    queries: [
      { language: "en", query_text: "Pope Benedict XVI" },
      { language: "fr", query_text: "Benoît XVI" },
    ],
    plausibility: [],
    verdict: "pending",
    verdict_by: null,
    verdict_at: null,
    verdict_note: null,
    ...overrides,
  };
}

function event(kind: string, payload: any, seq = 1): WireEvent {
  return { kind, seq, payload, emitted_at: "2013-02-11T11:01:00.000Z" };
}

describe("applyEvent", () => {
  it("adds a card on newCluster and updates it in place", () => {
    let state = applyEvent(initialState(), event("newCluster", snap()));
    expect(state.clusters[1].occurrences).toBe(2);
    state = applyEvent(state, event("existingCluster", snap({ occurrences: 3 }), 2));
    expect(state.clusters[1].occurrences).toBe(3);
    expect(Object.keys(state.clusters)).toHaveLength(1);
  });

  it("tracks candidates in arrival order", () => {
    let state = applyEvent(initialState(), event("breakingNewsCandidate", candidate()));
    state = applyEvent(
      state,
      event("breakingNewsCandidate", candidate({ candidate_id: "cand-2" }), 2),
    );
    expect(state.candidateOrder).toEqual(["cand-1", "cand-2"]);
  });

  it("attaches plausibility results to their candidate", () => {
    let state = applyEvent(initialState(), event("breakingNewsCandidate", candidate()));
    state = applyEvent(
      state,
      event("plausibilityResult", {
        candidate_id: "cand-1",
        connector: "twitter",
        query: { language: "en", query_text: "Pope Benedict XVI" },
        hits: [{ author: "reuters", text: "pope resigns", posted_at: "", source_url: "" }],
        fetched_at: "2013-02-11T11:01:00.000Z",
        status: "ok",
      }, 2),
    );
    expect(state.candidates["cand-1"].plausibility).toHaveLength(1);
    expect(state.candidates["cand-1"].plausibility[0].hits[0].author).toBe("reuters");
  });

  it("ignores results for unknown candidates", () => {
    const state = applyEvent(
      initialState(),
      event("plausibilityResult", { candidate_id: "cand-9", hits: [] }),
    );
    expect(Object.keys(state.candidates)).toHaveLength(0);
  });

  it("applies verdicts from any evaluator and clears pending", () => {
    let state = applyEvent(initialState(), event("breakingNewsCandidate", candidate()));
    state = markVerdictPending(state, "cand-1");
    expect(canDecide(state, "cand-1")).toBe(false);
    state = applyEvent(
      state,
      event("verdict", {
        candidate_id: "cand-1",
        decision: "confirmed",
        evaluator: "someone-else",
        decided_at: "2013-02-11T11:02:00.000Z",
        note: null,
      }, 2),
    );
    expect(state.candidates["cand-1"].verdict).toBe("confirmed");
    expect(state.pendingVerdicts["cand-1"]).toBeUndefined();
    expect(canDecide(state, "cand-1")).toBe(false);
  });

  it("is a pure function of the event sequence", () => {
    const events = [
      event("newCluster", snap()),
      event("breakingNewsCandidate", candidate(), 2),
      event("stats", { live_clusters: 1, clusters_created: 1, candidates_fired: 1, events_ingested: 6 }, 3),
    ];
    const a = events.reduce(applyEvent, initialState());
    const b = events.reduce(applyEvent, initialState());
    expect(a).toEqual(b);
    expect(a.lastSeq).toBe(3);
  });

  it("leaves state intact on unknown event kinds", () => {
    const before = applyEvent(initialState(), event("newCluster", snap()));
    const after = applyEvent(before, event("somethingNew", { x: 1 }, 2));
    expect(after.clusters).toEqual(before.clusters);
  });
});

describe("rebuildFromCandidates", () => {
  it("replaces panels from the candidate list endpoint", () => {
    let state = applyEvent(initialState(), event("breakingNewsCandidate", candidate()));
    state = rebuildFromCandidates(state, [
      candidate({ candidate_id: "cand-1", verdict: "confirmed", verdict_by: "eve" }),
      candidate({ candidate_id: "cand-2" }),
    ]);
    expect(state.candidateOrder).toEqual(["cand-1", "cand-2"]);
    expect(state.candidates["cand-1"].verdict).toBe("confirmed");
  });
});

describe("canDecide", () => {
  it("is false for unknown, pending-POST, and decided candidates", () => {
    let state = initialState();
    expect(canDecide(state, "cand-1")).toBe(false);
    state = applyEvent(state, event("breakingNewsCandidate", candidate()));
    expect(canDecide(state, "cand-1")).toBe(true);
    state = markVerdictPending(state, "cand-1");
    expect(canDecide(state, "cand-1")).toBe(false);
    state = clearVerdictPending(state, "cand-1");
    expect(canDecide(state, "cand-1")).toBe(true);
  });
});

describe("rendering", () => {
  it("cluster card shows members and countdown", () => {
    const html = renderClusterCard(snap(), Date.parse("2013-02-11T11:00:30.000Z"));
    expect(html).toContain("en:Pope Benedict XVI");
    expect(html).toContain("90s");
  });

  it("candidate panel locks buttons once decided", () => {
    let state = applyEvent(initialState(), event("breakingNewsCandidate", candidate()));
    let html = renderCandidatePanel(state, state.candidates["cand-1"]);
    expect(html).not.toContain("disabled");
    state = applyEvent(
      state,
      event("verdict", {
        candidate_id: "cand-1", decision: "rejected", evaluator: "eve",
        decided_at: "2013-02-11T11:02:00.000Z", note: null,
      }, 2),
    );
    html = renderCandidatePanel(state, state.candidates["cand-1"]);
    expect(html).toContain("disabled");
    expect(html).toContain("rejected by eve");
  });

  it("escapes markup coming from article titles", () => {
    const state = applyEvent(
      initialState(),
      event("breakingNewsCandidate", candidate({
        members: [{ language: "en", title: "<script>alert(1)</script>" }],
      })),
    );
    const html = renderDashboard(state, Date.now());
    expect(html).not.toContain("<script>alert(1)</script>");
  });
});
