// JSON shapes as the service emits them. Nothing here is computed in the
// browser; these mirror the documents byte for byte.

export type SignalLine = "TERR" | "VL" | "VH" | "HL" | "HH";
export type Band = "terrestrial" | "sat_if";

export const ALL_LINES: SignalLine[] = ["TERR", "VL", "VH", "HL", "HH"];

// -- network document --------------------------------------------------------

export interface SpectrumJson {
  level_dbuv?: number;
  anchors_mhz_dbuv?: [number, number][];
  power_dbm?: number;
}

export interface ChannelJson {
  center_mhz: number;
  bandwidth_mhz: number;
  line: string;
}

export interface SourceNodeJson {
  id: string;
  kind: "source";
  lines: Record<string, SpectrumJson>;
  cnr_db?: Record<string, number>;
  channels?: ChannelJson[];
}

export interface ComponentNodeJson {
  id: string;
  kind: "component";
  part: string;
  regulators?: Record<string, number>;
}

export interface OutputNodeJson {
  id: string;
  kind: "output";
  output_kind: string;
  floor?: number;
  apartment?: string;
}

export type NodeJson = SourceNodeJson | ComponentNodeJson | OutputNodeJson;

export interface EdgeJson {
  id: string;
  from: string; // "node:port"
  to: string;
  cable: string;
  length_m: number;
  lines: string[] | string; // explicit list, or a group alias like "all"/"sat"
}

export interface NetworkDocument {
  format_version: number;
  catalog: { builtin?: boolean; inline?: CatalogJson };
  grid: unknown;
  constraints?: {
    level_windows_dbuv: Record<string, [number, number]>;
    min_cnr_db: Record<string, number | null>;
    min_tap_isolation_db: number;
    enforce_power_derating: boolean;
  };
  nodes: NodeJson[];
  edges: EdgeJson[];
}

// -- catalog ------------------------------------------------------------------

export interface PortJson {
  id: string;
  direction: "in" | "out";
  lines: string;
  role: string;
}

export interface RegulatorJson {
  positions_db: number[];
  index: number;
}

export interface ComponentJson {
  id: string;
  class: string;
  ports: PortJson[];
  regulators?: Record<string, RegulatorJson>;
  tap_isolation_db?: number | null;
  max_output_power_dbm?: number | null;
  metadata?: Record<string, unknown>;
  transfers?: unknown[];
}

export interface CableJson {
  id: string;
  attenuation_db_per_100m: [number, number][];
}

export interface CatalogJson {
  components: ComponentJson[];
  cables: CableJson[];
}

// -- scenarios ---------------------------------------------------------------

export interface Scenario {
  regulators?: Record<string, Record<string, number>>;
  source_trims_db?: Record<string, Record<string, number>>;
}

// -- reports -----------------------------------------------------------------

export interface ViolationJson {
  kind: string;
  subject: string;
  line: string | null;
  frequency_mhz: number | null;
  measured: number | null;
  limit: number | null;
  message: string;
}

export interface OutputVerdictJson {
  id: string;
  compliant: boolean;
  margin_db: number | null;
  violations: ViolationJson[];
}

export interface ReportJson {
  compliant: boolean;
  compliant_count: number;
  total_outputs: number;
  outputs: OutputVerdictJson[];
  network_violations: ViolationJson[];
}

export interface OutputRow {
  id: string;
  line: string;
  min_level_dbuv: number;
  max_level_dbuv: number;
  min_cnr_db: number | null;
}

export interface SimulateResponse {
  revision: string;
  report: ReportJson;
  outputs: OutputRow[];
}

// -- sweeps and jobs -----------------------------------------------------------

export interface SweepPointJson {
  level_dbuv: number;
  compliant_count: number;
  total_margin_db: number;
}

export interface SweepResponse {
  revision: string;
  line: string;
  total_outputs: number;
  points: SweepPointJson[];
  fine_points: SweepPointJson[];
  optimum_interval: [number, number] | null;
  best_level: number | null;
}

export interface OptimizeResultJson {
  scenario: Scenario;
  objective: [number, number];
  start_objective: [number, number];
  evaluations: number;
  improved: boolean;
  report: ReportJson;
}

export interface JobStarted {
  job_id: string;
  status: string;
}

export interface JobStatus {
  job_id: string;
  status: "running" | "done" | "failed";
  revision: string;
  result?: OptimizeResultJson;
  error?: string;
}

// -- traces --------------------------------------------------------------------

export interface TraceSeriesJson {
  line: string;
  band: Band;
  freqs_mhz: number[];
  levels_dbuv: number[];
  cnr_db: number[] | null;
  min_level_dbuv: number;
  max_level_dbuv: number;
  min_cnr_db: number | null;
}

export interface BandLimitsJson {
  min_level_dbuv: number;
  max_level_dbuv: number;
  min_cnr_db: number | null;
}

export interface TraceResponse {
  revision: string;
  output_id: string;
  series: TraceSeriesJson[];
  limits: Record<string, BandLimitsJson>;
}

// -- misc ----------------------------------------------------------------------

export interface NetworkEnvelope {
  revision: string;
  document: NetworkDocument;
}

export interface PutNetworkResponse {
  revision: string;
  warnings: string[];
}

export interface ValidateResponse {
  ok: boolean;
  diagnostics: string[];
}

export interface ErrorDetail {
  message: string;
  diagnostics?: string[];
  revision?: string;
}
