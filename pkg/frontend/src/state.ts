// Dashboard state is a pure function of the event sequence received
// plus local pending submissions. Every mutation goes through
// applyEvent or one of the small helpers below, which all return a new
// state object; this is what makes the two-client harness meaningful
// (same events in, same view out).

import type {
  CandidatePayload,
  ClusterSnapshot,
  PlausibilityResult,
  StatsPayload,
  VerdictRecord,
  WireEvent,
} from "./types.js";

export type ConnectionStatus = "connecting" | "open" | "reconnecting";

export interface DashboardState {
  clusters: Record<number, ClusterSnapshot>;
  candidates: Record<string, CandidatePayload>;
  candidateOrder: string[];
  stats: StatsPayload | null;
  lastSeq: number;
  connection: ConnectionStatus;
  // candidate ids with a verdict POST in flight; buttons stay disabled
  // until the server answers
  pendingVerdicts: Record<string, true>;
  notices: string[];
}

export function initialState(): DashboardState {
  return {
    clusters: {},
    candidates: {},
    candidateOrder: [],
    stats: null,
    lastSeq: 0,
    connection: "connecting",
    pendingVerdicts: {},
    notices: [],
  };
}

export function applyEvent(state: DashboardState, event: WireEvent): DashboardState {
  const next = { ...state, lastSeq: Math.max(state.lastSeq, event.seq) };
  switch (event.kind) {
    case "newCluster":
    case "existingCluster": {
      const snap = event.payload as ClusterSnapshot;
      next.clusters = { ...state.clusters, [snap.cluster_id]: snap };
      return next;
    }
    case "breakingNewsCandidate": {
      const cand = event.payload as CandidatePayload;
      next.candidates = { ...state.candidates, [cand.candidate_id]: cand };
      if (!state.candidateOrder.includes(cand.candidate_id)) {
        next.candidateOrder = [...state.candidateOrder, cand.candidate_id];
      }
      return next;
    }
    case "plausibilityResult": {
      const { candidate_id, ...result } = event.payload as PlausibilityResult & {
        candidate_id: string;
      };
      const cand = state.candidates[candidate_id];
      if (!cand) return next; // result for a candidate we never saw
      next.candidates = {
        ...state.candidates,
        [candidate_id]: {
          ...cand,
          plausibility: [...cand.plausibility, result as PlausibilityResult],
        },
      };
      return next;
    }
    case "verdict": {
      const record = event.payload as VerdictRecord;
      const cand = state.candidates[record.candidate_id];
      if (!cand) return next;
      next.candidates = {
        ...state.candidates,
        [record.candidate_id]: {
          ...cand,
          verdict: record.decision,
          verdict_by: record.evaluator,
          verdict_at: record.decided_at,
          verdict_note: record.note,
        },
      };
      // a verdict from anywhere (including another evaluator) clears
      // our own in-flight marker
      if (state.pendingVerdicts[record.candidate_id]) {
        const pending = { ...state.pendingVerdicts };
        delete pending[record.candidate_id];
        next.pendingVerdicts = pending;
      }
      return next;
    }
    case "stats": {
      next.stats = event.payload as StatsPayload;
      return next;
    }
    default:
      // unknown kinds are ignored rather than breaking the view
      return next;
  }
}

/** Rebuild candidate panels from GET /candidates after a reconnect. */
export function rebuildFromCandidates(
  state: DashboardState,
  payloads: CandidatePayload[],
): DashboardState {
  const candidates: Record<string, CandidatePayload> = {};
  const order: string[] = [];
  for (const payload of payloads) {
    candidates[payload.candidate_id] = payload;
    order.push(payload.candidate_id);
  }
  return { ...state, candidates, candidateOrder: order };
}

export function setConnection(
  state: DashboardState,
  connection: ConnectionStatus,
): DashboardState {
  return { ...state, connection };
}

export function markVerdictPending(
  state: DashboardState,
  candidateId: string,
): DashboardState {
  return { ...state, pendingVerdicts: { ...state.pendingVerdicts, [candidateId]: true } };
}

export function clearVerdictPending(
  state: DashboardState,
  candidateId: string,
): DashboardState {
  const pending = { ...state.pendingVerdicts };
  delete pending[candidateId];
  return { ...state, pendingVerdicts: pending };
}

export function addNotice(state: DashboardState, notice: string): DashboardState {
  return { ...state, notices: [...state.notices, notice] };
}

/** Buttons are live only for an undecided candidate with no POST in flight. */
export function canDecide(state: DashboardState, candidateId: string): boolean {
  const cand = state.candidates[candidateId];
  if (!cand) return false;
  return cand.verdict === "pending" && !state.pendingVerdicts[candidateId];
}
