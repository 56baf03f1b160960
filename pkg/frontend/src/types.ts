// Wire contract with the gateway. These mirror the JSON the server
// emits on /events and returns from /candidates; the client renders
// whatever arrives and never re-derives detection logic.

export interface WireEvent {
  kind: string;
  seq: number;
  payload: any;
  emitted_at: string;
}

export interface ClusterMember {
  language: string;
  title: string;
}

export interface ClusterSnapshot {
  cluster_id: number;
  members: ClusterMember[];
  occurrences: number;
  edit_count: number;
  editors: string[];
  created_at: string;
  last_edit_at: string;
  max_gap_secs: number;
  candidate_fired: boolean;
}

export interface SearchHit {
  author: string;
  text: string;
  posted_at: string;
  source_url: string;
}

export interface PlausibilityResult {
  connector: string;
  query: { language: string; query_text: string };
  hits: SearchHit[];
  fetched_at: string;
  status: "ok" | "empty" | "error";
}

export interface CandidatePayload {
  candidate_id: string;
  cluster_id: number;
  members: ClusterMember[];
  fired_at: string;
  occurrences: number;
  editors: string[];
  timeline: Array<{
    at: string;
    editor: string;
    language: string;
    title: string;
    delta: number;
    level: string;
    counted: boolean;
  }>;
  queries: Array<{ language: string; query_text: string }>;
  plausibility: PlausibilityResult[];
  verdict: "pending" | "confirmed" | "rejected";
  verdict_by: string | null;
  verdict_at: string | null;
  verdict_note: string | null;
}

export interface StatsPayload {
  live_clusters: number;
  clusters_created: number;
  candidates_fired: number;
  events_ingested: number;
}

export interface VerdictRecord {
  candidate_id: string;
  decision: "confirmed" | "rejected";
  evaluator: string;
  decided_at: string;
  note: string | null;
}
