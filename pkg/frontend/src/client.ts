// Gateway client: one push connection plus plain HTTP for verdicts.
// The WebSocket and fetch implementations are injectable so the same
// code runs in a browser and in the node test harness.

import {
  addNotice,
  applyEvent,
  canDecide,
  clearVerdictPending,
  DashboardState,
  initialState,
  markVerdictPending,
  rebuildFromCandidates,
  setConnection,
} from "./state.js";
import type { CandidatePayload, WireEvent } from "./types.js";

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: any }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  close(): void;
}

export interface GatewayClientOptions {
  /** http(s) origin of the gateway, e.g. http://127.0.0.1:8137 */
  baseUrl: string;
  evaluator: string;
  onChange?: (state: DashboardState) => void;
  makeWebSocket?: (url: string) => WebSocketLike;
  fetchFn?: typeof fetch;
  reconnectDelayMs?: number;
}

export class GatewayClient {
  state: DashboardState = initialState();

  private readonly baseUrl: string;
  private readonly evaluator: string;
  private readonly onChange: (state: DashboardState) => void;
  private readonly makeWebSocket: (url: string) => WebSocketLike;
  private readonly fetchFn: typeof fetch;
  private readonly reconnectDelayMs: number;
  private ws: WebSocketLike | null = null;
  private closed = false;
  private hadSession = false;

  constructor(options: GatewayClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/$/, "");
    this.evaluator = options.evaluator;
    this.onChange = options.onChange ?? (() => {});
    this.makeWebSocket =
      options.makeWebSocket ??
      ((url) => new WebSocket(url) as unknown as WebSocketLike);
    this.fetchFn = options.fetchFn ?? fetch.bind(globalThis);
    this.reconnectDelayMs = options.reconnectDelayMs ?? 1000;
  }

  private setState(state: DashboardState): void {
    this.state = state;
    this.onChange(state);
  }

  connect(): void {
    const wsUrl = this.baseUrl.replace(/^http/, "ws") + "/events";
    const ws = this.makeWebSocket(wsUrl);
    this.ws = ws;

    ws.onopen = () => {
      this.setState(setConnection(this.state, "open"));
      if (this.hadSession) {
        // after a reconnect the event stream has a gap; replay the
        // candidate list to rebuild panels
        void this.refreshCandidates();
      }
      this.hadSession = true;
    };

    ws.onmessage = (ev) => {
      let event: WireEvent;
      try {
        event = JSON.parse(String(ev.data));
      } catch {
        return; // not ours
      }
      this.setState(applyEvent(this.state, event));
    };

    ws.onerror = () => {
      /* onclose follows and handles the retry */
    };

    ws.onclose = () => {
      if (this.closed) return;
      this.setState(setConnection(this.state, "reconnecting"));
      setTimeout(() => {
        if (!this.closed) this.connect();
      }, this.reconnectDelayMs);
    };
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }

  async refreshCandidates(): Promise<void> {
    try {
      const res = await this.fetchFn(this.baseUrl + "/candidates");
      const body = (await res.json()) as { candidates: CandidatePayload[] };
      this.setState(rebuildFromCandidates(this.state, body.candidates));
    } catch {
      this.setState(addNotice(this.state, "candidate refresh failed"));
    }
  }

  /**
   * Submit a verdict. Buttons lock immediately; 200 and 409 both leave
   * them locked (409 means another evaluator decided first, and the
   * verdict event carries the outcome). A network failure unlocks and
   * asks the evaluator to retry.
   */
  async submitVerdict(
    candidateId: string,
    decision: "confirmed" | "rejected",
    note?: string,
  ): Promise<number> {
    if (!canDecide(this.state, candidateId)) return 0;
    this.setState(markVerdictPending(this.state, candidateId));
    let res: Response;
    try {
      res = await this.fetchFn(this.baseUrl + "/verdicts", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({
          candidate_id: candidateId,
          decision,
          evaluator: this.evaluator,
          note: note ?? null,
        }),
      });
    } catch {
      this.setState(
        addNotice(
          clearVerdictPending(this.state, candidateId),
          `verdict for ${candidateId} failed to send, retry`,
        ),
      );
      return -1;
    }
    if (res.status === 409) {
      this.setState(
        addNotice(this.state, `${candidateId} was already decided elsewhere`),
      );
    } else if (res.status !== 200) {
      this.setState(
        addNotice(
          clearVerdictPending(this.state, candidateId),
          `verdict for ${candidateId} rejected with ${res.status}`,
        ),
      );
    }
    return res.status;
  }
}
