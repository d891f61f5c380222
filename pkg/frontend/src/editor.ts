// Pure document edits. Each operation returns a new document; the original is
// never mutated, so an unsaved edit can always be thrown away by reloading.

import { endpointNode } from "./reachability.js";
import { findPart } from "./knobs.js";
import type {
  CatalogJson,
  ComponentNodeJson,
  EdgeJson,
  NetworkDocument,
  NodeJson,
} from "./types.js";

// Mirrors the service's guideline; the warning badge is advisory and the
// server re-derives it on save, so drift here cannot corrupt a plan.
export const DROP_LENGTH_WARNING_M = 80.0;

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function setCableLength(
  document: NetworkDocument,
  edgeId: string,
  lengthM: number,
): NetworkDocument {
  const next = clone(document);
  const edge = next.edges.find((e) => e.id === edgeId);
  if (!edge) throw new Error(`no edge ${edgeId}`);
  edge.length_m = lengthM;
  return next;
}

export function removeNode(
  document: NetworkDocument,
  nodeId: string,
): NetworkDocument {
  const next = clone(document);
  if (!next.nodes.some((n) => n.id === nodeId)) {
    throw new Error(`no node ${nodeId}`);
  }
  next.nodes = next.nodes.filter((n) => n.id !== nodeId);
  next.edges = next.edges.filter(
    (e) => endpointNode(e.from) !== nodeId && endpointNode(e.to) !== nodeId,
  );
  return next;
}

export function addComponent(
  document: NetworkDocument,
  catalog: CatalogJson,
  nodeId: string,
  partId: string,
): NetworkDocument {
  if (!findPart(catalog, partId)) throw new Error(`no catalog part ${partId}`);
  if (document.nodes.some((n) => n.id === nodeId)) {
    throw new Error(`node id ${nodeId} already used`);
  }
  const next = clone(document);
  const node: ComponentNodeJson = { id: nodeId, kind: "component", part: partId };
  next.nodes.push(node);
  return next;
}

export function addEdge(
  document: NetworkDocument,
  edge: EdgeJson,
): NetworkDocument {
  if (document.edges.some((e) => e.id === edge.id)) {
    throw new Error(`edge id ${edge.id} already used`);
  }
  const next = clone(document);
  next.edges.push(clone(edge));
  return next;
}

export function reconnectEdge(
  document: NetworkDocument,
  edgeId: string,
  ends: { from?: string; to?: string },
): NetworkDocument {
  const next = clone(document);
  const edge = next.edges.find((e) => e.id === edgeId);
  if (!edge) throw new Error(`no edge ${edgeId}`);
  if (ends.from !== undefined) edge.from = ends.from;
  if (ends.to !== undefined) edge.to = ends.to;
  return next;
}

export function setRegulatorIndex(
  document: NetworkDocument,
  nodeId: string,
  group: string,
  index: number,
): NetworkDocument {
  const next = clone(document);
  const node = next.nodes.find((n) => n.id === nodeId);
  if (!node || node.kind !== "component") {
    throw new Error(`no component node ${nodeId}`);
  }
  node.regulators = { ...(node.regulators ?? {}), [group]: index };
  return next;
}

export interface DropWarning {
  edgeId: string;
  lengthM: number;
  message: string;
}

/** Long subscriber drops, same rule the server applies at save time: edges
 * leaving a subscriber-role port or feeding an output node, over the limit. */
export function dropLengthWarnings(
  document: NetworkDocument,
  catalog: CatalogJson,
): DropWarning[] {
  const byId = new Map<string, NodeJson>(document.nodes.map((n) => [n.id, n]));
  const warnings: DropWarning[] = [];
  for (const edge of document.edges) {
    if (edge.length_m <= DROP_LENGTH_WARNING_M) continue;
    const srcNode = byId.get(endpointNode(edge.from));
    const dstNode = byId.get(endpointNode(edge.to));
    let fromSubscriber = false;
    if (srcNode?.kind === "component") {
      const part = findPart(catalog, srcNode.part);
      const portId = edge.from.slice(edge.from.lastIndexOf(":") + 1);
      const port = part?.ports.find((p) => p.id === portId);
      fromSubscriber = port?.role === "subscriber";
    }
    if (fromSubscriber || dstNode?.kind === "output") {
      warnings.push({
        edgeId: edge.id,
        lengthM: edge.length_m,
        message:
          `drop ${edge.id} is ${edge.length_m} m, ` +
          `above the ${DROP_LENGTH_WARNING_M.toFixed(0)} m guideline`,
      });
    }
  }
  return warnings;
}
