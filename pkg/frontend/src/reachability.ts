// Client-side reachability over the document graph. Used to preview which
// outputs go dark when a node is removed, before the edit is ever saved.

import type { NetworkDocument } from "./types.js";

/** "node:port" -> node id. Port ids contain no ':', node ids may not either,
 * but split on the last ':' to be safe. */
export function endpointNode(endpoint: string): string {
  const i = endpoint.lastIndexOf(":");
  return i < 0 ? endpoint : endpoint.slice(0, i);
}

export function reachableNodes(
  document: NetworkDocument,
  removed?: string,
): Set<string> {
  const adjacency = new Map<string, string[]>();
  for (const edge of document.edges) {
    const from = endpointNode(edge.from);
    const to = endpointNode(edge.to);
    if (from === removed || to === removed) continue;
    const list = adjacency.get(from);
    if (list) list.push(to);
    else adjacency.set(from, [to]);
  }
  const seen = new Set<string>();
  const queue: string[] = [];
  for (const node of document.nodes) {
    if (node.kind === "source" && node.id !== removed) {
      seen.add(node.id);
      queue.push(node.id);
    }
  }
  while (queue.length) {
    const current = queue.shift()!;
    for (const next of adjacency.get(current) ?? []) {
      if (!seen.has(next)) {
        seen.add(next);
        queue.push(next);
      }
    }
  }
  return seen;
}

export function reachableOutputs(document: NetworkDocument): Set<string> {
  const reachable = reachableNodes(document);
  const out = new Set<string>();
  for (const node of document.nodes) {
    if (node.kind === "output" && reachable.has(node.id)) out.add(node.id);
  }
  return out;
}

/** Output ids that are fed now but would lose their feed if nodeId vanished. */
export function unreachableAfterRemoval(
  document: NetworkDocument,
  nodeId: string,
): string[] {
  const before = reachableOutputs(document);
  const after = reachableNodes(document, nodeId);
  const lost: string[] = [];
  for (const node of document.nodes) {
    if (node.kind !== "output" || node.id === nodeId) continue;
    if (before.has(node.id) && !after.has(node.id)) lost.push(node.id);
  }
  return lost;
}
