// Browser entry: wire the gateway client to the DOM. Single UI event
// loop, one push connection, re-render on every state change plus a
// 1s timer so the seconds-since-last-edit countdowns move.

import { GatewayClient } from "./client.js";
import { renderDashboard } from "./view.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("gateway") ?? window.location.origin;
const evaluator = params.get("evaluator") ?? `evaluator-${Math.floor(Math.random() * 1e6)}`;

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const client = new GatewayClient({
  baseUrl,
  evaluator,
  onChange: (state) => {
    root.innerHTML = renderDashboard(state, Date.now());
  },
});

root.addEventListener("click", (ev) => {
  const target = ev.target as HTMLElement;
  const candidateId = target.dataset?.candidate;
  if (!candidateId) return;
  if (target.classList.contains("confirm")) {
    void client.submitVerdict(candidateId, "confirmed");
  } else if (target.classList.contains("reject")) {
    void client.submitVerdict(candidateId, "rejected");
  }
});

setInterval(() => {
  root.innerHTML = renderDashboard(client.state, Date.now());
}, 1000);

client.connect();
void client.refreshCandidates();
