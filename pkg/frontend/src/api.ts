// Thin typed wrapper over the planning service HTTP API. The fetch function
// is injected so tests can run against a scripted fake without a server.

import type {
  CatalogJson,
  ErrorDetail,
  JobStarted,
  JobStatus,
  NetworkDocument,
  NetworkEnvelope,
  PutNetworkResponse,
  Scenario,
  SimulateResponse,
  SweepResponse,
  TraceResponse,
  ValidateResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: ErrorDetail;

  constructor(status: number, detail: ErrorDetail) {
    super(detail.message || `request failed with status ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

function asDetail(body: unknown): ErrorDetail {
  if (typeof body === "object" && body !== null && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === "string") return { message: detail };
    if (typeof detail === "object" && detail !== null) {
      return detail as ErrorDetail;
    }
  }
  return { message: "request failed" };
}

export class Api {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const payload: unknown = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, asDetail(payload));
    }
    return payload as T;
  }

  getNetwork(): Promise<NetworkEnvelope> {
    return this.request("GET", "/api/network");
  }

  putNetwork(
    document: NetworkDocument,
    revision: string,
  ): Promise<PutNetworkResponse> {
    return this.request("PUT", "/api/network", { document, revision });
  }

  getCatalog(): Promise<CatalogJson> {
    return this.request("GET", "/api/catalog");
  }

  validate(document: NetworkDocument): Promise<ValidateResponse> {
    return this.request("POST", "/api/validate", { document });
  }

  simulate(scenario?: Scenario): Promise<SimulateResponse> {
    const body = scenario ? { scenario } : {};
    return this.request("POST", "/api/simulate", body);
  }

  sweep(options: {
    line?: string;
    levels?: number[];
    scenario?: Scenario;
  } = {}): Promise<SweepResponse> {
    return this.request("POST", "/api/sweep", options);
  }

  optimize(options: {
    budget?: number;
    seed?: number;
    scenario?: Scenario;
  } = {}): Promise<JobStarted> {
    return this.request("POST", "/api/optimize", options);
  }

  job(jobId: string): Promise<JobStatus> {
    return this.request("GET", `/api/jobs/${encodeURIComponent(jobId)}`);
  }

  trace(
    outputId: string,
    options: { line?: string; scenario?: Scenario } = {},
  ): Promise<TraceResponse> {
    const params = new URLSearchParams();
    if (options.line) params.set("line", options.line);
    if (options.scenario) params.set("scenario", JSON.stringify(options.scenario));
    const query = params.toString();
    const path = `/api/outputs/${encodeURIComponent(outputId)}/trace${query ? "?" + query : ""}`;
    return this.request("GET", path);
  }
}
