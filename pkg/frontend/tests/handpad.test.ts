import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { HandPad } from "../src/handpad.js";

describe("HandPad", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  function pad() {
    const sent: string[] = [];
    return { sent, pad: new HandPad((l) => sent.push(l), 30) };
  }

  it("measures displacement from the press point", () => {
    const { sent, pad: p } = pad();
    p.begin(200, 200);
    p.move(240, 190);
    expect(sent).toEqual(["MOVE 40 -10 0"]);
  });

  it("clamps displacement to +-100 px", () => {
    const { sent, pad: p } = pad();
    p.begin(0, 0);
    p.move(400, -350);
    expect(sent).toEqual(["MOVE 100 -100 0"]);
  });

  it("release emits the zero move", () => {
    const { sent, pad: p } = pad();
    p.begin(0, 0);
    p.move(50, 0);
    vi.advanceTimersByTime(40);
    p.release();
    vi.advanceTimersByTime(40);
    expect(sent[sent.length - 1]).toBe("MOVE 0 0 0");
    expect(p.isDragging).toBe(false);
  });

  it("wheel sends the current drag vector with dz", () => {
    const { sent, pad: p } = pad();
    p.wheel(10);
    expect(sent).toEqual(["MOVE 0 0 10"]);
    vi.advanceTimersByTime(40);
    p.begin(0, 0);
    p.move(30, 0);
    vi.advanceTimersByTime(40);
    p.wheel(-5);
    vi.advanceTimersByTime(40);
    expect(sent[sent.length - 1]).toBe("MOVE 30 0 -5");
  });

  it("ignores moves when not dragging", () => {
    const { sent, pad: p } = pad();
    p.move(50, 50);
    expect(sent).toEqual([]);
  });

  it("5 second synthetic drag stays under the 30/s throttle", () => {
    const { sent, pad: p } = pad();
    p.begin(0, 0);
    // pointer events every 5 ms for 5 s, sweeping back and forth
    for (let i = 0; i < 1000; i++) {
      p.move(100 * Math.sin(i / 50), 0);
      vi.advanceTimersByTime(5);
    }
    p.release();
    vi.advanceTimersByTime(100);
    expect(sent.length).toBeLessThanOrEqual(Math.ceil(5.1 * 30) + 1);
    expect(sent.length).toBeGreaterThan(100); // actually streaming, not stalled
    expect(sent[sent.length - 1]).toBe("MOVE 0 0 0");
  });
});
