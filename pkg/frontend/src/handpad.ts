import { formatMove } from "./messages.js";
import { MoveThrottle } from "./throttle.js";

/**
 * Virtual hand pad: displacement is measured from the pad center, the way
 * the camera pipeline measures hand motion between frames.
 *
 * Dragging emits "MOVE dx dy 0" with dx/dy clamped to +-100 px; a wheel
 * tick emits the current drag vector with its delta as dz; releasing the
 * pad emits "MOVE 0 0 0" so the arm stops integrating.  All sends go
 * through a 30 per second throttle.
 */
export const PAD_CLAMP_PX = 100;

function clamp(v: number): number {
  return Math.max(-PAD_CLAMP_PX, Math.min(PAD_CLAMP_PX, v));
}

export class HandPad {
  private throttle: MoveThrottle;
  private centerX = 0;
  private centerY = 0;
  private dragging = false;
  dx = 0;
  dy = 0;

  constructor(
    send: (line: string) => void,
    ratePerSec = 30,
    now?: () => number,
  ) {
    this.throttle = new MoveThrottle(send, ratePerSec, now);
  }

  get isDragging(): boolean {
    return this.dragging;
  }

  get sentCount(): number {
    return this.throttle.sentCount;
  }

  /** Pointer pressed: the press point becomes the pad center. */
  begin(x: number, y: number): void {
    this.centerX = x;
    this.centerY = y;
    this.dragging = true;
    this.dx = 0;
    this.dy = 0;
  }

  /** Pointer moved while pressed. */
  move(x: number, y: number): void {
    if (!this.dragging) {
      return;
    }
    this.dx = clamp(x - this.centerX);
    this.dy = clamp(y - this.centerY);
    this.throttle.offer(formatMove(this.dx, this.dy, 0));
  }

  /** Scroll wheel: depth input, usable with or without an active drag. */
  wheel(delta: number): void {
    this.throttle.offer(formatMove(this.dx, this.dy, delta));
  }

  /** Pointer released: zero the displacement so the arm holds. */
  release(): void {
    if (!this.dragging) {
      return;
    }
    this.dragging = false;
    this.dx = 0;
    this.dy = 0;
    this.throttle.offer(formatMove(0, 0, 0));
  }

  dispose(): void {
    this.throttle.dispose();
  }
}
