// Headless orchestration between the API, the store, and user intents.
// main.ts binds DOM events to these methods; tests drive them directly.

import { Api, ApiError } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import type { Store } from "./state.js";
import type {
  JobStatus,
  NetworkDocument,
  OptimizeResultJson,
  Scenario,
  SourceNodeJson,
} from "./types.js";

const JOB_POLL_MS = 250;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function errorMessage(err: unknown): string {
  if (err instanceof ApiError) return err.detail.message;
  return err instanceof Error ? err.message : String(err);
}

/** The terrestrial source node carrying a flat level, if the document has
 * exactly that shape. The what-if slider edits this level. */
export function flatTerrSource(
  document: NetworkDocument,
): { nodeId: string; levelDbuv: number } | null {
  for (const node of document.nodes) {
    if (node.kind !== "source") continue;
    const spectrum = (node as SourceNodeJson).lines["TERR"];
    if (spectrum && typeof spectrum.level_dbuv === "number") {
      return { nodeId: node.id, levelDbuv: spectrum.level_dbuv };
    }
  }
  return null;
}

export class Controller {
  private readonly api: Api;
  private readonly store: Store;
  private readonly debouncedSimulate: Debounced<[]>;
  private simulateRunning = false;
  private simulateQueued = false;
  lastOptimizeResult: OptimizeResultJson | null = null;

  constructor(api: Api, store: Store, debounceMs = 150) {
    this.api = api;
    this.store = store;
    this.debouncedSimulate = debounce(() => {
      void this.simulateNow();
    }, debounceMs);
  }

  async load(): Promise<void> {
    try {
      const [network, catalog] = await Promise.all([
        this.api.getNetwork(),
        this.api.getCatalog(),
      ]);
      this.store.patch({
        revision: network.revision,
        document: network.document,
        catalog,
        scenario: {},
        diagnostics: [],
        conflict: false,
      });
    } catch (err) {
      this.store.patch({
        toast: { kind: "error", message: errorMessage(err) },
      });
      return;
    }
    await this.simulateNow();
  }

  /** Stored flat terrestrial feed level, the slider's neutral point. */
  storedTerrLevel(): number | null {
    const document = this.store.get().document;
    if (!document) return null;
    return flatTerrSource(document)?.levelDbuv ?? null;
  }

  /** Level the slider currently points at: stored level plus active trim. */
  currentTerrLevel(): number | null {
    const document = this.store.get().document;
    if (!document) return null;
    const source = flatTerrSource(document);
    if (!source) return null;
    const trims = this.store.get().scenario.source_trims_db;
    return source.levelDbuv + (trims?.[source.nodeId]?.["TERR"] ?? 0);
  }

  /** Slider handler: an absolute dBuV target becomes a trim override. */
  setTerrLevel(levelDbuv: number): void {
    const document = this.store.get().document;
    if (!document) return;
    const source = flatTerrSource(document);
    if (!source) {
      this.store.patch({
        toast: { kind: "error", message: "no flat terrestrial source to adjust" },
      });
      return;
    }
    const trim = levelDbuv - source.levelDbuv;
    const scenario = this.store.get().scenario;
    const trims = { ...(scenario.source_trims_db ?? {}) };
    if (trim === 0) {
      delete trims[source.nodeId];
    } else {
      trims[source.nodeId] = { ...(trims[source.nodeId] ?? {}), TERR: trim };
    }
    const next: Scenario = { ...scenario };
    if (Object.keys(trims).length) next.source_trims_db = trims;
    else delete next.source_trims_db;
    this.store.patch({ scenario: next });
    this.debouncedSimulate();
  }

  /** Knob handler: index must already be a valid catalog position index. */
  setKnob(nodeId: string, group: string, index: number): void {
    const scenario = this.store.get().scenario;
    const regulators = { ...(scenario.regulators ?? {}) };
    regulators[nodeId] = { ...(regulators[nodeId] ?? {}), [group]: index };
    this.store.patch({ scenario: { ...scenario, regulators } });
    this.debouncedSimulate();
  }

  /** Replace all overrides at once (used when adopting an optimize result). */
  setScenario(scenario: Scenario): void {
    this.store.patch({ scenario });
    this.debouncedSimulate();
  }

  /** One in-flight simulate; a change landing mid-request queues exactly one
   * follow-up so the view always converges on the latest overrides. */
  async simulateNow(): Promise<void> {
    if (this.simulateRunning) {
      this.simulateQueued = true;
      return;
    }
    this.simulateRunning = true;
    const ticket = this.store.openSimulate();
    const scenario = this.store.get().scenario;
    try {
      const response = await this.api.simulate(
        Object.keys(scenario).length ? scenario : undefined,
      );
      this.store.applySimulate(ticket, response);
      if (this.store.get().selectedOutput) {
        await this.refreshTrace();
      }
    } catch (err) {
      this.store.failSimulate(ticket, errorMessage(err));
    } finally {
      this.simulateRunning = false;
    }
    if (this.simulateQueued) {
      this.simulateQueued = false;
      await this.simulateNow();
    }
  }

  async selectOutput(outputId: string | null): Promise<void> {
    this.store.patch({ selectedOutput: outputId, trace: null });
    if (outputId !== null) await this.refreshTrace();
  }

  private async refreshTrace(): Promise<void> {
    const outputId = this.store.get().selectedOutput;
    if (!outputId) return;
    const scenario = this.store.get().scenario;
    try {
      const trace = await this.api.trace(outputId, {
        ...(Object.keys(scenario).length ? { scenario } : {}),
      });
      if (this.store.get().selectedOutput === outputId) {
        this.store.patch({ trace });
      }
    } catch (err) {
      this.store.patch({
        toast: { kind: "error", message: errorMessage(err) },
      });
    }
  }

  async runSweep(levels?: number[]): Promise<void> {
    const scenario = this.store.get().scenario;
    try {
      const sweep = await this.api.sweep({
        ...(levels ? { levels } : {}),
        ...(Object.keys(scenario).length ? { scenario } : {}),
      });
      this.store.patch({ sweep });
    } catch (err) {
      this.store.patch({
        toast: { kind: "error", message: errorMessage(err) },
      });
    }
  }

  /** Kick off a server-side optimize job and poll it to completion. */
  async runOptimize(options: { budget?: number; seed?: number } = {}): Promise<
    JobStatus | null
  > {
    const scenario = this.store.get().scenario;
    this.store.patch({ optimizeRunning: true });
    try {
      const started = await this.api.optimize({
        ...options,
        ...(Object.keys(scenario).length ? { scenario } : {}),
      });
      let status = await this.api.job(started.job_id);
      while (status.status === "running") {
        await sleep(JOB_POLL_MS);
        status = await this.api.job(started.job_id);
      }
      if (status.status === "failed") {
        this.store.patch({
          toast: {
            kind: "error",
            message: `optimize failed: ${status.error ?? "unknown error"}`,
          },
        });
        return status;
      }
      this.lastOptimizeResult = status.result ?? null;
      return status;
    } catch (err) {
      this.store.patch({
        toast: { kind: "error", message: errorMessage(err) },
      });
      return null;
    } finally {
      this.store.patch({ optimizeRunning: false });
    }
  }

  /** Adopt the best scenario the last optimize run found: knobs move to the
   * returned positions and the next simulate confirms the count. */
  applyOptimize(): void {
    const result = this.lastOptimizeResult;
    if (!result) return;
    this.setScenario(result.scenario);
  }

  // -- editing -------------------------------------------------------------

  /** Stage an edited document locally; nothing is sent until save(). */
  stageDocument(document: NetworkDocument): void {
    this.store.patch({ document, diagnostics: [] });
  }

  /** PUT the staged document. A 409 flags the conflict for the reload
   * prompt; a 400 lands its diagnostics in the panel. */
  async save(): Promise<boolean> {
    const { document, revision } = this.store.get();
    if (!document || revision === null) return false;
    try {
      const saved = await this.api.putNetwork(document, revision);
      this.store.patch({
        revision: saved.revision,
        diagnostics: saved.warnings,
        conflict: false,
      });
      await this.simulateNow();
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.store.patch({ conflict: true });
      } else if (err instanceof ApiError && err.status === 400) {
        this.store.patch({
          diagnostics: err.detail.diagnostics ?? [err.detail.message],
        });
      } else {
        this.store.patch({
          toast: { kind: "error", message: errorMessage(err) },
        });
      }
      return false;
    }
  }

  /** Conflict resolution: drop local edits and pull the server's document. */
  async reloadFromServer(): Promise<void> {
    await this.load();
  }
}
