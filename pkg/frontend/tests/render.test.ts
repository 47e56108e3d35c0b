import { describe, expect, it } from "vitest";
import { ArmStateMsg } from "../src/messages.js";
import { buildScene } from "../src/render.js";
import { RingBuffer } from "../src/trace.js";

const NEUTRAL: ArmStateMsg = {
  x: 90, y: 90, z: 90, fkX: 0, fkY: 0, fkZ: 77, overload: [],
};
const REACHING: ArmStateMsg = {
  x: 0, y: 0, z: 90, fkX: 66, fkY: 0, fkZ: 11, overload: [],
};
const OVERLOADED: ArmStateMsg = {
  x: 45, y: 10, z: 100, fkX: 40, fkY: 40, fkZ: 20, overload: ["shoulder"],
};

describe("buildScene", () => {
  it("is deterministic for fixed states", () => {
    for (const state of [NEUTRAL, REACHING, OVERLOADED]) {
      expect(JSON.stringify(buildScene(state))).toBe(JSON.stringify(buildScene(state)));
    }
  });

  it("dials echo the received angles verbatim", () => {
    for (const state of [NEUTRAL, REACHING, OVERLOADED]) {
      const scene = buildScene(state);
      expect(scene.dials.map((d) => d.degrees)).toEqual([state.x, state.y, state.z]);
    }
  });

  it("effector readout is the wire FK value, not a local computation", () => {
    const crooked: ArmStateMsg = { ...REACHING, fkX: 1.25, fkY: -9, fkZ: 4 };
    const scene = buildScene(crooked);
    expect(scene.effector).toEqual({ x: 1.25, y: -9 });
    expect(scene.height).toBe(4);
  });

  it("marks overloaded joints", () => {
    const scene = buildScene(OVERLOADED);
    expect(scene.torque).toEqual([
      { joint: "shoulder", overloaded: true },
      { joint: "elbow", overloaded: false },
    ]);
  });

  it("upright pose draws a vertical linkage", () => {
    const scene = buildScene(NEUTRAL);
    const tip = scene.side[scene.side.length - 1].to;
    expect(Math.abs(tip.x)).toBeLessThan(1e-9);
    expect(tip.y).toBeCloseTo(77, 9);
  });

  it("straight-out pose reaches along x in the top view", () => {
    const scene = buildScene(REACHING);
    const tip = scene.top[0].to;
    expect(tip.x).toBeCloseTo(66, 9);
    expect(Math.abs(tip.y)).toBeLessThan(1e-9);
  });
});

describe("RingBuffer", () => {
  it("caps at capacity, dropping the oldest", () => {
    const ring = new RingBuffer<number>(3);
    [1, 2, 3, 4, 5].forEach((v) => ring.push(v));
    expect([...ring.values()]).toEqual([3, 4, 5]);
    expect(ring.length).toBe(3);
  });

  it("rejects silly capacities", () => {
    expect(() => new RingBuffer(0)).toThrow();
  });
});
