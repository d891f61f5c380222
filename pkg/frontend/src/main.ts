// DOM wiring. Structural panels (tree, knobs, editor selects) rebuild only
// when the document or catalog changes; result panels rebuild on every store
// update so slider drags never recreate the slider under the pointer.

import { Api } from "./api.js";
import { sweepChart, traceChart, type Viewport } from "./charts.js";
import { Controller } from "./controller.js";
import {
  addComponent,
  dropLengthWarnings,
  reconnectEdge,
  removeNode,
  setCableLength,
} from "./editor.js";
import { knobsForDocument } from "./knobs.js";
import { unreachableAfterRemoval } from "./reachability.js";
import { Store, type StoreState } from "./state.js";
import type { NetworkDocument, OutputNodeJson } from "./types.js";

const api = new Api("");
const store = new Store();
const controller = new Controller(api, store);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svg(
  tag: string,
  attrs: Record<string, string | number>,
  ...children: Element[]
): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  for (const child of children) node.appendChild(child);
  return node;
}

function fmt(value: number | null | undefined, digits = 1): string {
  return value === null || value === undefined ? "-" : value.toFixed(digits);
}

// -- structural rendering ------------------------------------------------------

let renderedDocument: NetworkDocument | null = null;

function renderTree(state: StoreState): void {
  const tree = el("tree");
  tree.textContent = "";
  const doc = state.document;
  if (!doc) return;
  const byFloor = new Map<string, OutputNodeJson[]>();
  for (const node of doc.nodes) {
    if (node.kind !== "output") continue;
    const key = node.floor === undefined ? "unassigned" : `floor ${node.floor}`;
    const list = byFloor.get(key);
    if (list) list.push(node);
    else byFloor.set(key, [node]);
  }
  const trunk = document.createElement("details");
  trunk.className = "tree-floor";
  trunk.open = true;
  const trunkLabel = document.createElement("summary");
  trunkLabel.textContent = "trunk and sources";
  trunk.appendChild(trunkLabel);
  for (const node of doc.nodes) {
    if (node.kind === "output") continue;
    const row = document.createElement("div");
    row.className = "tree-node";
    row.textContent =
      node.kind === "source" ? `${node.id} (source)` : `${node.id} (${node.part})`;
    trunk.appendChild(row);
  }
  tree.appendChild(trunk);
  for (const [floor, outputs] of [...byFloor.entries()].sort()) {
    const group = document.createElement("details");
    group.className = "tree-floor";
    group.open = true;
    const label = document.createElement("summary");
    label.textContent = `${floor} (${outputs.length} outputs)`;
    group.appendChild(label);
    for (const output of outputs) {
      const row = document.createElement("div");
      row.className = "tree-node output";
      row.dataset["output"] = output.id;
      row.textContent = `${output.id} [${output.output_kind}]`;
      row.addEventListener("click", () => void controller.selectOutput(output.id));
      group.appendChild(row);
    }
    tree.appendChild(group);
  }
}

function fillSelect(select: HTMLSelectElement, values: string[]): void {
  const previous = select.value;
  select.textContent = "";
  for (const value of values) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.appendChild(option);
  }
  if (values.includes(previous)) select.value = previous;
}

function renderEditorControls(state: StoreState): void {
  const doc = state.document;
  const catalog = state.catalog;
  if (!doc || !catalog) return;
  const edgeIds = doc.edges.map((e) => e.id).sort();
  fillSelect(el<HTMLSelectElement>("length-edge"), edgeIds);
  fillSelect(el<HTMLSelectElement>("reconnect-edge"), edgeIds);
  fillSelect(
    el<HTMLSelectElement>("add-part"),
    catalog.components.map((c) => c.id),
  );
  fillSelect(
    el<HTMLSelectElement>("remove-node"),
    doc.nodes.filter((n) => n.kind !== "source").map((n) => n.id).sort(),
  );
  renderRemovalPreview(state);
}

function renderRemovalPreview(state: StoreState): void {
  const preview = el("removal-preview");
  const doc = state.document;
  const nodeId = el<HTMLSelectElement>("remove-node").value;
  if (!doc || !nodeId) {
    preview.textContent = "";
    return;
  }
  const lost = unreachableAfterRemoval(doc, nodeId);
  preview.textContent = lost.length
    ? `removing ${nodeId} cuts off ${lost.length} outputs:\n${lost.join(", ")}`
    : `removing ${nodeId} cuts off no outputs`;
}

function renderKnobs(state: StoreState): void {
  const container = el("knobs");
  container.textContent = "";
  const doc = state.document;
  const catalog = state.catalog;
  if (!doc || !catalog) return;
  let currentNode = "";
  let groupDiv: HTMLElement | null = null;
  for (const knob of knobsForDocument(catalog, doc)) {
    if (knob.nodeId !== currentNode) {
      currentNode = knob.nodeId;
      groupDiv = document.createElement("div");
      groupDiv.className = "knob-group";
      const title = document.createElement("h4");
      title.textContent = `${knob.nodeId} (${knob.part})`;
      groupDiv.appendChild(title);
      container.appendChild(groupDiv);
    }
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = knob.group;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = "0";
    slider.max = String(knob.positionsDb.length - 1);
    slider.step = "1";
    slider.value = String(knob.index);
    slider.dataset["node"] = knob.nodeId;
    slider.dataset["group"] = knob.group;
    slider.dataset["positions"] = JSON.stringify(knob.positionsDb);
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = `${knob.positionsDb[knob.index]!.toFixed(0)} dB`;
    slider.addEventListener("input", () => {
      const index = Number(slider.value);
      readout.textContent = `${knob.positionsDb[index]!.toFixed(0)} dB`;
      controller.setKnob(knob.nodeId, knob.group, index);
    });
    row.appendChild(label);
    row.appendChild(slider);
    row.appendChild(readout);
    groupDiv!.appendChild(row);
  }
}

function renderStructure(state: StoreState): void {
  renderTree(state);
  renderEditorControls(state);
  renderKnobs(state);
  const terrSlider = el<HTMLInputElement>("terr-slider");
  const level = controller.currentTerrLevel();
  if (level !== null) terrSlider.value = String(level);
}

// -- result rendering ----------------------------------------------------------

function renderSummary(state: StoreState): void {
  el("revision").textContent = state.revision ?? "";
  const summary = el("compliance-summary");
  if (!state.report) {
    summary.textContent = state.simulateInFlight ? "computing..." : "";
    return;
  }
  const { compliant_count, total_outputs } = state.report;
  const cls = compliant_count === total_outputs ? "pass" : "fail";
  summary.innerHTML =
    `<span class="${cls}">${compliant_count}</span> / ${total_outputs} outputs within limits` +
    (state.simulateInFlight ? " (updating...)" : "");
}

function renderOutputsTable(state: StoreState): void {
  const body = el<HTMLTableElement>("outputs-table").tBodies[0]!;
  body.textContent = "";
  if (!state.report) return;
  const verdicts = new Map(state.report.outputs.map((o) => [o.id, o]));
  for (const row of state.outputRows) {
    const verdict = verdicts.get(row.id);
    const tr = document.createElement("tr");
    tr.className = verdict?.compliant ? "pass" : "fail";
    if (row.id === state.selectedOutput) tr.classList.add("selected");
    const cells = [
      row.id,
      row.line,
      fmt(row.min_level_dbuv),
      fmt(row.max_level_dbuv),
      fmt(row.min_cnr_db),
      verdict?.compliant ? "pass" : "FAIL",
    ];
    for (const [i, text] of cells.entries()) {
      const td = document.createElement("td");
      td.textContent = text;
      if (i === cells.length - 1) td.className = "status";
      tr.appendChild(td);
    }
    tr.addEventListener("click", () => void controller.selectOutput(row.id));
    body.appendChild(tr);
  }
  for (const treeRow of el("tree").querySelectorAll<HTMLElement>(".tree-node.output")) {
    const id = treeRow.dataset["output"]!;
    const verdict = verdicts.get(id);
    treeRow.classList.toggle("selected", id === state.selectedOutput);
    let dot = treeRow.querySelector("span.dot");
    if (!dot) {
      dot = document.createElement("span");
      dot.className = "dot";
      treeRow.appendChild(dot);
    }
    dot.className = verdict?.compliant === false ? "dot fail-dot" : "dot pass-dot";
    dot.textContent = verdict ? (verdict.compliant ? " ok" : " FAIL") : "";
  }
}

const TRACE_VIEWPORT: Viewport = { width: 520, height: 140, padding: 24 };
const SWEEP_VIEWPORT: Viewport = { width: 320, height: 160, padding: 24 };

function renderTrace(state: StoreState): void {
  el("trace-title").textContent = state.selectedOutput ?? "";
  const container = el("trace-charts");
  container.textContent = "";
  if (!state.trace) return;
  for (const series of state.trace.series) {
    const limits = state.trace.limits[series.band];
    if (!limits) continue;
    const chart = traceChart(series, limits, TRACE_VIEWPORT);
    const { width, height, padding } = TRACE_VIEWPORT;
    const children: Element[] = [];
    for (const breach of chart.breaches) {
      children.push(
        svg("rect", {
          class: "breach",
          x: Math.min(breach.x0, breach.x1) - 1,
          width: Math.abs(breach.x1 - breach.x0) + 2,
          y: padding,
          height: height - 2 * padding,
        }),
      );
    }
    children.push(
      svg("line", {
        class: "limit-line",
        x1: padding, x2: width - padding,
        y1: chart.minLimitY, y2: chart.minLimitY,
      }),
      svg("line", {
        class: "limit-line",
        x1: padding, x2: width - padding,
        y1: chart.maxLimitY, y2: chart.maxLimitY,
      }),
      svg("path", { class: "series-path", d: chart.path }),
    );
    const caption = document.createElement("div");
    caption.className = "chart-caption";
    caption.textContent =
      `${series.line}: ${fmt(limits.min_level_dbuv)}..${fmt(limits.max_level_dbuv)} dBuV allowed, ` +
      `${chart.breaches.length ? chart.breaches.length + " breach(es)" : "clear"}`;
    const wrapper = document.createElement("div");
    wrapper.className = "chart";
    wrapper.appendChild(caption);
    wrapper.appendChild(
      svg("svg", { width, height, viewBox: `0 0 ${width} ${height}` }, ...children),
    );
    container.appendChild(wrapper);
  }
}

function renderSweep(state: StoreState): void {
  const container = el("sweep-chart");
  const summary = el("sweep-summary");
  container.textContent = "";
  if (!state.sweep) {
    summary.textContent = "";
    return;
  }
  const chart = sweepChart(state.sweep, SWEEP_VIEWPORT);
  const { width, height, padding } = SWEEP_VIEWPORT;
  const children: Element[] = [];
  if (chart.optimumRect) {
    children.push(
      svg("rect", {
        class: "optimum",
        x: chart.optimumRect.x0,
        width: chart.optimumRect.x1 - chart.optimumRect.x0,
        y: padding,
        height: height - 2 * padding,
      }),
    );
  }
  children.push(svg("path", { class: "series-path", d: chart.coarsePath }));
  children.push(svg("path", { class: "fine-path", d: chart.finePath }));
  if (chart.bestX !== null) {
    children.push(
      svg("line", {
        class: "best-line",
        x1: chart.bestX, x2: chart.bestX,
        y1: padding, y2: height - padding,
      }),
    );
  }
  container.appendChild(
    svg("svg", { width, height, viewBox: `0 0 ${width} ${height}` }, ...children),
  );
  const interval = state.sweep.optimum_interval;
  summary.textContent = interval
    ? `optimum interval ${interval[0]}..${interval[1]} dBuV, best ${state.sweep.best_level}`
    : "no level in the sweep satisfies every output";
}

function renderNotices(state: StoreState): void {
  const toast = el("toast");
  toast.classList.toggle("hidden", state.toast === null);
  toast.textContent = state.toast?.message ?? "";
  el("conflict").classList.toggle("hidden", !state.conflict);
  const diagnostics = el("diagnostics");
  diagnostics.textContent = "";
  for (const message of state.diagnostics) {
    const row = document.createElement("div");
    row.textContent = message;
    diagnostics.appendChild(row);
  }
  const warnings = el("drop-warnings");
  warnings.textContent = "";
  if (state.document && state.catalog) {
    for (const warning of dropLengthWarnings(state.document, state.catalog)) {
      const row = document.createElement("div");
      row.textContent = `⚠ ${warning.message}`;
      warnings.appendChild(row);
    }
  }
}

function renderWhatIfReadouts(state: StoreState): void {
  const level = controller.currentTerrLevel();
  el("terr-readout").textContent = level === null ? "-" : `${level.toFixed(0)} dBuV`;
  for (const slider of el("knobs").querySelectorAll<HTMLInputElement>("input[type=range]")) {
    const nodeId = slider.dataset["node"]!;
    const group = slider.dataset["group"]!;
    const index = state.scenario.regulators?.[nodeId]?.[group];
    if (index !== undefined && slider.value !== String(index) && document.activeElement !== slider) {
      slider.value = String(index);
      const positions = JSON.parse(slider.dataset["positions"]!) as number[];
      const readout = slider.parentElement?.querySelector(".readout");
      if (readout) readout.textContent = `${positions[index]!.toFixed(0)} dB`;
    }
  }
  const status = el("optimize-status");
  if (state.optimizeRunning) {
    status.textContent = "optimizing on the server...";
  } else if (controller.lastOptimizeResult) {
    const result = controller.lastOptimizeResult;
    status.textContent =
      `best found: ${result.objective[0]} outputs within limits ` +
      `(margin sum ${result.objective[1].toFixed(1)} dB) after ${result.evaluations} evaluations`;
  } else {
    status.textContent = "";
  }
  el("apply-optimize").classList.toggle(
    "hidden",
    controller.lastOptimizeResult === null || state.optimizeRunning,
  );
}

function render(state: StoreState): void {
  if (state.document !== renderedDocument) {
    renderedDocument = state.document;
    renderStructure(state);
  }
  renderSummary(state);
  renderOutputsTable(state);
  renderTrace(state);
  renderSweep(state);
  renderNotices(state);
  renderWhatIfReadouts(state);
}

// -- event wiring ----------------------------------------------------------------

function stage(edit: (doc: NetworkDocument) => NetworkDocument): void {
  const doc = store.get().document;
  if (!doc) return;
  try {
    controller.stageDocument(edit(doc));
  } catch (err) {
    store.patch({
      toast: { kind: "error", message: err instanceof Error ? err.message : String(err) },
    });
  }
}

el<HTMLInputElement>("terr-slider").addEventListener("input", (event) => {
  controller.setTerrLevel(Number((event.target as HTMLInputElement).value));
});

el<HTMLFormElement>("length-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const edgeId = el<HTMLSelectElement>("length-edge").value;
  const length = Number(el<HTMLInputElement>("length-value").value);
  if (edgeId && Number.isFinite(length)) {
    stage((doc) => setCableLength(doc, edgeId, length));
  }
});

el<HTMLFormElement>("add-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const part = el<HTMLSelectElement>("add-part").value;
  const nodeId = el<HTMLInputElement>("add-id").value.trim();
  const catalog = store.get().catalog;
  if (part && nodeId && catalog) {
    stage((doc) => addComponent(doc, catalog, nodeId, part));
  }
});

el<HTMLFormElement>("remove-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const nodeId = el<HTMLSelectElement>("remove-node").value;
  if (nodeId) stage((doc) => removeNode(doc, nodeId));
});

el<HTMLSelectElement>("remove-node").addEventListener("change", () => {
  renderRemovalPreview(store.get());
});

el<HTMLFormElement>("reconnect-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const edgeId = el<HTMLSelectElement>("reconnect-edge").value;
  const from = el<HTMLInputElement>("reconnect-from").value.trim();
  const to = el<HTMLInputElement>("reconnect-to").value.trim();
  if (!edgeId) return;
  stage((doc) =>
    reconnectEdge(doc, edgeId, {
      ...(from ? { from } : {}),
      ...(to ? { to } : {}),
    }),
  );
});

el("save").addEventListener("click", () => void controller.save());
el("discard").addEventListener("click", () => void controller.reloadFromServer());
el("conflict-reload").addEventListener("click", () => void controller.reloadFromServer());
el("toast").addEventListener("click", () => store.patch({ toast: null }));
el("run-sweep").addEventListener("click", () => void controller.runSweep());

el<HTMLFormElement>("optimize-form").addEventListener("submit", (event) => {
  event.preventDefault();
  const budget = Number(el<HTMLInputElement>("optimize-budget").value) || 300;
  const seed = Number(el<HTMLInputElement>("optimize-seed").value) || 0;
  void controller.runOptimize({ budget, seed });
});

el("apply-optimize").addEventListener("click", () => {
  controller.applyOptimize();
  renderStructure(store.get());
});

store.subscribe(render);
void controller.load();
