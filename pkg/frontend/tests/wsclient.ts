/**
 * Minimal RFC 6455 client over node:net for end-to-end tests.
 * Text frames only; client frames are masked as the RFC requires.
 */
import { createHash, randomBytes } from "node:crypto";
import { Socket, connect } from "node:net";

const GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

export class TestWsClient {
  private socket!: Socket;
  private buffer = Buffer.alloc(0);
  private messages: string[] = [];
  private waiters: Array<(line: string | null) => void> = [];
  private closed = false;

  static async connect(host: string, port: number): Promise<TestWsClient> {
    const client = new TestWsClient();
    await client.open(host, port);
    return client;
  }

  private open(host: string, port: number): Promise<void> {
    return new Promise((resolve, reject) => {
      const key = randomBytes(16).toString("base64");
      const expected = createHash("sha1").update(key + GUID).digest("base64");
      this.socket = connect({ host, port, noDelay: true });
      let headerDone = false;
      let headerBuf = Buffer.alloc(0);
      this.socket.on("error", reject);
      this.socket.on("connect", () => {
        this.socket.write(
          `GET / HTTP/1.1\r\nHost: ${host}:${port}\r\n` +
            "Upgrade: websocket\r\nConnection: Upgrade\r\n" +
            `Sec-WebSocket-Key: ${key}\r\nSec-WebSocket-Version: 13\r\n\r\n`,
        );
      });
      this.socket.on("data", (chunk) => {
        if (headerDone) {
          this.buffer = Buffer.concat([this.buffer, chunk]);
          this.drain();
          return;
        }
        headerBuf = Buffer.concat([headerBuf, chunk]);
        const end = headerBuf.indexOf("\r\n\r\n");
        if (end < 0) {
          return;
        }
        const head = headerBuf.subarray(0, end).toString("ascii");
        if (!head.includes("101") || !head.includes(expected)) {
          reject(new Error(`handshake rejected: ${head.split("\r\n")[0]}`));
          return;
        }
        headerDone = true;
        this.buffer = headerBuf.subarray(end + 4);
        this.drain();
        resolve();
      });
      this.socket.on("close", () => {
        this.closed = true;
        for (const waiter of this.waiters.splice(0)) {
          waiter(null);
        }
      });
    });
  }

  sendText(text: string): void {
    const payload = Buffer.from(text, "utf-8");
    const mask = randomBytes(4);
    const head = Buffer.alloc(payload.length < 126 ? 6 : 8);
    head[0] = 0x81;
    if (payload.length < 126) {
      head[1] = 0x80 | payload.length;
      mask.copy(head, 2);
    } else {
      head[1] = 0x80 | 126;
      head.writeUInt16BE(payload.length, 2);
      mask.copy(head, 4);
    }
    const masked = Buffer.from(payload);
    for (let i = 0; i < masked.length; i++) {
      masked[i] ^= mask[i & 3];
    }
    this.socket.write(Buffer.concat([head, masked]));
  }

  /** Next text message, or null on close/timeout. */
  nextText(timeoutMs = 4000): Promise<string | null> {
    const queued = this.messages.shift();
    if (queued !== undefined) {
      return Promise.resolve(queued);
    }
    if (this.closed) {
      return Promise.resolve(null);
    }
    return new Promise((resolve) => {
      const timer = setTimeout(() => {
        const idx = this.waiters.indexOf(waiter);
        if (idx >= 0) {
          this.waiters.splice(idx, 1);
        }
        resolve(null);
      }, timeoutMs);
      const waiter = (line: string | null) => {
        clearTimeout(timer);
        resolve(line);
      };
      this.waiters.push(waiter);
    });
  }

  private drain(): void {
    for (;;) {
      if (this.buffer.length < 2) {
        return;
      }
      const opcode = this.buffer[0] & 0x0f;
      const masked = (this.buffer[1] & 0x80) !== 0;
      let length = this.buffer[1] & 0x7f;
      let offset = 2;
      if (length === 126) {
        if (this.buffer.length < 4) {
          return;
        }
        length = this.buffer.readUInt16BE(2);
        offset = 4;
      } else if (length === 127) {
        if (this.buffer.length < 10) {
          return;
        }
        length = Number(this.buffer.readBigUInt64BE(2));
        offset = 10;
      }
      const maskLen = masked ? 4 : 0;
      if (this.buffer.length < offset + maskLen + length) {
        return;
      }
      let payload = this.buffer.subarray(offset + maskLen, offset + maskLen + length);
      if (masked) {
        const mask = this.buffer.subarray(offset, offset + 4);
        payload = Buffer.from(payload);
        for (let i = 0; i < payload.length; i++) {
          payload[i] ^= mask[i & 3];
        }
      }
      this.buffer = this.buffer.subarray(offset + maskLen + length);
      if (opcode === 0x1) {
        const text = payload.toString("utf-8");
        const waiter = this.waiters.shift();
        if (waiter) {
          waiter(text);
        } else {
          this.messages.push(text);
        }
      } else if (opcode === 0x9) {
        // ping -> pong with the same payload, masked
        const mask = randomBytes(4);
        const head = Buffer.from([0x8a, 0x80 | payload.length, ...mask]);
        const masked2 = Buffer.from(payload);
        for (let i = 0; i < masked2.length; i++) {
          masked2[i] ^= mask[i & 3];
        }
        this.socket.write(Buffer.concat([head, masked2]));
      } else if (opcode === 0x8) {
        this.socket.end();
        return;
      }
    }
  }

  close(): void {
    this.socket.destroy();
  }
}
