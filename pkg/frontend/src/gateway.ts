import { ArmStateMsg, parseState } from "./messages.js";

export type ConnectionStatus =
  | { kind: "connecting" }
  | { kind: "open" }
  | { kind: "reconnecting"; seconds: number };

export interface GatewayEvents {
  onState: (state: ArmStateMsg) => void;
  onStatus: (status: ConnectionStatus) => void;
}

const RECONNECT_DELAY_S = 3;

/**
 * Maintains one WebSocket to the gateway, parsing STATE pushes and
 * reconnecting with a visible countdown when the link drops.
 */
export class GatewayClient {
  private socket: WebSocket | null = null;
  private countdownTimer: ReturnType<typeof setInterval> | null = null;
  private disposed = false;

  constructor(private url: string, private events: GatewayEvents) {}

  connect(): void {
    if (this.disposed) {
      return;
    }
    this.events.onStatus({ kind: "connecting" });
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.addEventListener("open", () => {
      this.events.onStatus({ kind: "open" });
    });
    socket.addEventListener("message", (event) => {
      const state = parseState(String(event.data));
      if (state) {
        this.events.onState(state);
      }
    });
    socket.addEventListener("close", () => this.scheduleReconnect());
    socket.addEventListener("error", () => socket.close());
  }

  send(line: string): void {
    if (this.socket && this.socket.readyState === WebSocket.OPEN) {
      this.socket.send(line);
    }
  }

  private scheduleReconnect(): void {
    if (this.disposed || this.countdownTimer !== null) {
      return;
    }
    let remaining = RECONNECT_DELAY_S;
    this.events.onStatus({ kind: "reconnecting", seconds: remaining });
    this.countdownTimer = setInterval(() => {
      remaining -= 1;
      if (remaining <= 0) {
        clearInterval(this.countdownTimer!);
        this.countdownTimer = null;
        this.connect();
      } else {
        this.events.onStatus({ kind: "reconnecting", seconds: remaining });
      }
    }, 1000);
  }

  dispose(): void {
    this.disposed = true;
    if (this.countdownTimer !== null) {
      clearInterval(this.countdownTimer);
    }
    this.socket?.close();
  }
}
