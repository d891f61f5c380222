// Regulator knob handling. Positions come straight from the catalog; the UI
// never invents attenuation values, it only picks an index into the list the
// catalog defines for that regulator group.

import type {
  CatalogJson,
  ComponentJson,
  ComponentNodeJson,
  NetworkDocument,
} from "./types.js";

export interface Knob {
  nodeId: string;
  part: string;
  group: string;
  positionsDb: number[];
  index: number;
  defaultIndex: number;
}

export function findPart(
  catalog: CatalogJson,
  partId: string,
): ComponentJson | undefined {
  return catalog.components.find((c) => c.id === partId);
}

export function positionsFor(
  catalog: CatalogJson,
  partId: string,
  group: string,
): number[] {
  const part = findPart(catalog, partId);
  const reg = part?.regulators?.[group];
  return reg ? [...reg.positions_db] : [];
}

/** Nearest catalog position to a raw dB value; ties round toward index 0. */
export function snapToIndex(positionsDb: number[], rawDb: number): number {
  if (positionsDb.length === 0) throw new Error("no positions to snap to");
  let best = 0;
  let bestDist = Math.abs(positionsDb[0]! - rawDb);
  for (let i = 1; i < positionsDb.length; i++) {
    const dist = Math.abs(positionsDb[i]! - rawDb);
    if (dist < bestDist) {
      best = i;
      bestDist = dist;
    }
  }
  return best;
}

/** All knobs for one component node, current index resolved against the document. */
export function knobsForNode(
  catalog: CatalogJson,
  node: ComponentNodeJson,
): Knob[] {
  const part = findPart(catalog, node.part);
  if (!part?.regulators) return [];
  const knobs: Knob[] = [];
  for (const group of Object.keys(part.regulators).sort()) {
    const reg = part.regulators[group]!;
    const override = node.regulators?.[group];
    knobs.push({
      nodeId: node.id,
      part: node.part,
      group,
      positionsDb: [...reg.positions_db],
      index: override ?? reg.index,
      defaultIndex: reg.index,
    });
  }
  return knobs;
}

/** Every knob in the document, grouped by node, document order. */
export function knobsForDocument(
  catalog: CatalogJson,
  document: NetworkDocument,
): Knob[] {
  const knobs: Knob[] = [];
  for (const node of document.nodes) {
    if (node.kind === "component") {
      knobs.push(...knobsForNode(catalog, node));
    }
  }
  return knobs;
}
