/**
 * Trailing-edge rate limiter for outbound MOVE lines.
 *
 * Sends immediately when the last send is old enough, otherwise keeps only
 * the newest offered line and flushes it when the rate window reopens.
 * Guarantees: never more than `ratePerSec` sends per second, and the last
 * offered line is always delivered.
 */
export class MoveThrottle {
  private intervalMs: number;
  private lastSent = -Infinity;
  private pending: string | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private sent = 0;

  constructor(
    private send: (line: string) => void,
    ratePerSec = 30,
    private now: () => number = () => Date.now(),
  ) {
    this.intervalMs = 1000 / ratePerSec;
  }

  get sentCount(): number {
    return this.sent;
  }

  offer(line: string): void {
    const wait = this.lastSent + this.intervalMs - this.now();
    if (wait <= 0) {
      this.emit(line);
      return;
    }
    this.pending = line;
    if (this.timer === null) {
      // timers fire on whole milliseconds; round up so the spacing
      // never dips below the rate interval
      this.timer = setTimeout(() => this.flush(), Math.ceil(wait));
    }
  }

  private flush(): void {
    this.timer = null;
    if (this.pending !== null) {
      const line = this.pending;
      this.pending = null;
      this.emit(line);
    }
  }

  private emit(line: string): void {
    this.lastSent = this.now();
    this.sent += 1;
    this.send(line);
  }

  dispose(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }
}
