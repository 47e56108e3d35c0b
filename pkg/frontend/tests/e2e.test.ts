/**
 * End-to-end: a real gestarm server process, spoken to over its WebSocket
 * gateway exactly as the browser console would.
 */
import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { HandPad } from "../src/handpad.js";
import { parseState } from "../src/messages.js";
import { TestWsClient } from "./wsclient.js";

let server: ChildProcess;
let wsPort = 0;

async function nextStates(client: TestWsClient, count: number): Promise<Array<ReturnType<typeof parseState>>> {
  const states = [];
  for (let i = 0; i < count; i++) {
    const line = await client.nextText();
    if (line === null) {
      break;
    }
    states.push(parseState(line));
  }
  return states;
}

beforeAll(async () => {
  server = spawn("python3", [
    "-u",
    "-m",
    "gestarm.cli",
    "serve",
    "--listen",
    "127.0.0.1:0",
    "--ws-listen",
    "127.0.0.1:0",
  ]);
  wsPort = await new Promise<number>((resolve, reject) => {
    let out = "";
    const timer = setTimeout(() => reject(new Error(`server never announced its gateway:\n${out}`)), 10_000);
    server.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const match = out.match(/gateway on ws:\/\/127\.0\.0\.1:(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(Number(match[1]));
      }
    });
    server.on("exit", (code) => reject(new Error(`server exited early (${code}):\n${out}`)));
  });
}, 15_000);

afterAll(async () => {
  server.kill("SIGTERM");
  await new Promise((resolve) => server.on("exit", resolve));
});

describe("gateway end to end", () => {
  it("pushes the neutral state on connect", async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    try {
      const [state] = await nextStates(client, 1);
      expect(state).not.toBeNull();
      expect([state!.x, state!.y, state!.z]).toEqual([90, 90, 90]);
    } finally {
      client.close();
    }
  });

  it("wheel input with empty depth history bumps the elbow by 2 degrees", async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    try {
      await nextStates(client, 1);
      client.sendText("MOVE 0 0 10");
      const states = await nextStates(client, 2);
      expect(states.some((s) => s?.z === 92)).toBe(true);
    } finally {
      client.close();
    }
  });

  it("a +100 px drag from neutral shows base angle 105 within 2 pushes", async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    try {
      await nextStates(client, 1);
      client.sendText("MOVE 100 0 0");
      const states = await nextStates(client, 2);
      const hit = states.find((s) => s?.x === 105);
      expect(hit, `pushes seen: ${JSON.stringify(states)}`).toBeTruthy();
      expect(hit!.y).toBe(90);
    } finally {
      client.close();
    }
  });

  it("a 5 s live drag stays within the 30/s MOVE budget and keeps streaming", { timeout: 20_000 }, async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    const pad = new HandPad((line) => client.sendText(line));
    try {
      let statesSeen = 0;
      const pump = (async () => {
        for (;;) {
          const line = await client.nextText(8000);
          if (line === null) {
            return;
          }
          statesSeen += 1;
        }
      })();
      pad.begin(0, 0);
      const started = Date.now();
      while (Date.now() - started < 5000) {
        const t = (Date.now() - started) / 1000;
        pad.move(100 * Math.sin(t * 2), 50 * Math.cos(t * 3));
        await new Promise((r) => setTimeout(r, 10));
      }
      pad.release();
      await new Promise((r) => setTimeout(r, 200));
      const elapsed = (Date.now() - started) / 1000;
      const budget = Math.ceil(elapsed * 30) + 1; // trailing release flush
      expect(pad.sentCount).toBeLessThanOrEqual(budget);
      expect(pad.sentCount).toBeGreaterThan(50);
      client.close();
      await pump;
      expect(statesSeen).toBeGreaterThan(10); // gateway kept pushing throughout
    } finally {
      pad.dispose();
      client.close();
    }
  });

  it("release zeroes the displacement so the arm holds position", async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    try {
      await nextStates(client, 1);
      client.sendText("MOVE 0 0 0");
      const [settled] = await nextStates(client, 1);
      client.sendText("MOVE 0 0 0");
      const [held] = await nextStates(client, 1);
      expect(held?.x).toBe(settled?.x);
      expect(held?.y).toBe(settled?.y);
    } finally {
      client.close();
    }
  });

  it("grip toggling is accepted without disturbing the pose", async () => {
    const client = await TestWsClient.connect("127.0.0.1", wsPort);
    try {
      await nextStates(client, 1);
      client.sendText("GRIP 1");
      client.sendText("MOVE 0 0 0");
      const states = await nextStates(client, 1);
      expect(states[0]).not.toBeNull();
    } finally {
      client.close();
    }
  });
});
