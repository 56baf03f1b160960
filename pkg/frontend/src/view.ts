// Rendering is string templating over the state object. Keeping it a
// pure state -> HTML function means the tests can assert on markup
// without a browser, and the browser entry just swaps innerHTML.

import { canDecide, DashboardState } from "./state.js";
import type { CandidatePayload, ClusterSnapshot } from "./types.js";

function esc(text: unknown): string {
  return String(text)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function secondsSince(iso: string, nowMs: number): number {
  const then = Date.parse(iso);
  return Number.isNaN(then) ? 0 : Math.max(0, Math.round((nowMs - then) / 1000));
}

export function renderClusterCard(snap: ClusterSnapshot, nowMs: number): string {
  const members = snap.members
    .map((m) => `${esc(m.language)}:${esc(m.title)}`)
    .join(", ");
  const fired = snap.candidate_fired ? " cluster-fired" : "";
  return (
    `<div class="cluster-card${fired}" data-cluster="${snap.cluster_id}">` +
    `<h3>${members || "(no members yet)"}</h3>` +
    `<dl>` +
    `<dt>occurrences</dt><dd>${snap.occurrences}</dd>` +
    `<dt>editors</dt><dd>${snap.editors.length}</dd>` +
    `<dt>since last edit</dt><dd class="countdown">${secondsSince(snap.last_edit_at, nowMs)}s</dd>` +
    `</dl></div>`
  );
}

export function renderCandidatePanel(
  state: DashboardState,
  cand: CandidatePayload,
): string {
  const decided = cand.verdict !== "pending";
  const disabled = canDecide(state, cand.candidate_id) ? "" : " disabled";
  const results = cand.plausibility
    .map((r) => {
      const hits = r.hits
        .map(
          (h) =>
            `<li><a href="${esc(h.source_url)}">${esc(h.author)}</a>: ${esc(h.text)}</li>`,
        )
        .join("");
      return (
        `<div class="search-results" data-lang="${esc(r.query.language)}">` +
        `<h4>${esc(r.connector)} / ${esc(r.query.language)}: ${esc(r.query.query_text)} [${esc(r.status)}]</h4>` +
        `<ul>${hits}</ul></div>`
      );
    })
    .join("");
  const verdictLine = decided
    ? `<p class="verdict-line">${esc(cand.verdict)} by ${esc(cand.verdict_by)}</p>`
    : "";
  return (
    `<div class="candidate-panel${decided ? " decided" : " highlighted"}" ` +
    `data-candidate="${esc(cand.candidate_id)}">` +
    `<h3>Breaking news candidate ${esc(cand.candidate_id)} (fired ${esc(cand.fired_at)})</h3>` +
    `<p>${cand.occurrences} edits by ${cand.editors.length} editors across ` +
    `${cand.members.map((m) => esc(m.language)).join(", ")}</p>` +
    results +
    verdictLine +
    `<button class="confirm" data-candidate="${esc(cand.candidate_id)}"${disabled}>confirm</button>` +
    `<button class="reject" data-candidate="${esc(cand.candidate_id)}"${disabled}>reject</button>` +
    `</div>`
  );
}

export function renderDashboard(state: DashboardState, nowMs: number): string {
  const stats = state.stats
    ? `live clusters ${state.stats.live_clusters} · ` +
      `created ${state.stats.clusters_created} · ` +
      `candidates ${state.stats.candidates_fired} · ` +
      `events ${state.stats.events_ingested}`
    : "no statistics yet";
  const clusters = Object.values(state.clusters)
    .sort((a, b) => a.cluster_id - b.cluster_id)
    .map((snap) => renderClusterCard(snap, nowMs))
    .join("");
  const candidates = state.candidateOrder
    .map((id) => renderCandidatePanel(state, state.candidates[id]))
    .join("");
  const notices = state.notices.map((n) => `<li>${esc(n)}</li>`).join("");
  return (
    `<header class="status-${state.connection}">` +
    `<span class="connection">${state.connection}</span>` +
    `<span class="stats">${stats}</span></header>` +
    `<section id="candidates">${candidates}</section>` +
    `<section id="clusters">${clusters}</section>` +
    `<ul id="notices">${notices}</ul>`
  );
}
