// Central view state. Every displayed number is copied out of a service
// response; the store only decides which response is current. A response is
// applied only when it answers the question the view is asking right now:
// same document revision, same overrides, and no newer answer already shown.

import type {
  CatalogJson,
  NetworkDocument,
  OutputRow,
  ReportJson,
  Scenario,
  SimulateResponse,
  SweepResponse,
  TraceResponse,
} from "./types.js";

/** JSON with recursively sorted object keys, so semantically equal scenarios
 * produce identical tags regardless of insertion order. */
export function canonicalJson(value: unknown): string {
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  if (typeof value === "object" && value !== null) {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => JSON.stringify(k) + ":" + canonicalJson(v));
    return "{" + entries.join(",") + "}";
  }
  return JSON.stringify(value);
}

export function requestTag(revision: string | null, scenario: Scenario): string {
  return (revision ?? "") + "|" + canonicalJson(scenario);
}

export interface ToastState {
  kind: "error" | "info";
  message: string;
}

export interface StoreState {
  revision: string | null;
  document: NetworkDocument | null;
  catalog: CatalogJson | null;
  scenario: Scenario;
  report: ReportJson | null;
  outputRows: OutputRow[];
  trace: TraceResponse | null;
  selectedOutput: string | null;
  sweep: SweepResponse | null;
  simulateInFlight: boolean;
  optimizeRunning: boolean;
  diagnostics: string[];
  toast: ToastState | null;
  conflict: boolean;
}

type Listener = (state: StoreState) => void;

export class Store {
  private state: StoreState = {
    revision: null,
    document: null,
    catalog: null,
    scenario: {},
    report: null,
    outputRows: [],
    trace: null,
    selectedOutput: null,
    sweep: null,
    simulateInFlight: false,
    optimizeRunning: false,
    diagnostics: [],
    toast: null,
    conflict: false,
  };
  private listeners: Listener[] = [];
  private seq = 0;
  private appliedSeq = 0;

  get(): StoreState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  patch(partial: Partial<StoreState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Tag for the question the view asks right now. */
  currentTag(): string {
    return requestTag(this.state.revision, this.state.scenario);
  }

  /** Call when issuing a simulate; returns a ticket to redeem on arrival. */
  openSimulate(): { tag: string; seq: number } {
    this.seq += 1;
    this.patch({ simulateInFlight: true });
    return { tag: this.currentTag(), seq: this.seq };
  }

  /** Apply a simulate response if it is still the current question and no
   * newer response has landed. Returns whether it was applied. */
  applySimulate(
    ticket: { tag: string; seq: number },
    response: SimulateResponse,
  ): boolean {
    const last = ticket.seq === this.seq;
    if (last) this.patch({ simulateInFlight: false });
    if (ticket.tag !== this.currentTag() || ticket.seq <= this.appliedSeq) {
      return false;
    }
    this.appliedSeq = ticket.seq;
    this.patch({
      report: response.report,
      outputRows: response.outputs,
      toast: null,
    });
    return true;
  }

  /** A failed simulate keeps the last good report on screen. */
  failSimulate(ticket: { tag: string; seq: number }, message: string): void {
    if (ticket.seq === this.seq) this.patch({ simulateInFlight: false });
    if (ticket.tag !== this.currentTag()) return;
    this.patch({ toast: { kind: "error", message } });
  }
}
