import { describe, expect, it } from "vitest";

import {
  endpointNode,
  reachableOutputs,
  unreachableAfterRemoval,
} from "../src/reachability.js";
import type { NetworkEnvelope } from "../src/types.js";
import { loadFixture } from "./fake.js";

const document = loadFixture<NetworkEnvelope>("network.json").document;

describe("endpointNode", () => {
  it("strips the port off a node:port endpoint", () => {
    expect(endpointNode("ms1:sat_out")).toBe("ms1");
    expect(endpointNode("out_f5a2_sat1:in")).toBe("out_f5a2_sat1");
  });
});

describe("reachableOutputs", () => {
  it("reaches all 60 outputs of the intact case study", () => {
    expect(reachableOutputs(document).size).toBe(60);
  });
});

describe("unreachableAfterRemoval", () => {
  it("marks everything behind a mid-trunk multiswitch as cut off", () => {
    const lost = unreachableAfterRemoval(document, "ms3");
    expect(lost.length).toBe(36);
    // ms3 feeds floor 3 and relays the trunk onward to floors 4 and 5
    const floors = new Set(
      lost.map((id) => {
        const node = document.nodes.find((n) => n.id === id)!;
        return node.kind === "output" ? node.floor : undefined;
      }),
    );
    expect(floors).toEqual(new Set([3, 4, 5]));
  });

  it("loses only the local outputs when a wall outlet goes", () => {
    expect(unreachableAfterRemoval(document, "wo_f1a1_1").sort()).toEqual([
      "out_f1a1_sat1",
      "out_f1a1_tv",
    ]);
  });

  it("reports nothing for a leaf output", () => {
    expect(unreachableAfterRemoval(document, "out_f1a1_tv")).toEqual([]);
  });

  it("cuts everything when the only terrestrial path node goes", () => {
    const lost = unreachableAfterRemoval(document, "ms1");
    expect(lost.length).toBe(60);
  });
});
