import { ArmStateMsg } from "./messages.js";

/**
 * Scene builder for the console views.
 *
 * buildScene is a pure function of the last received state: it lays out the
 * linkage schematic (side + top), the three angle dials, and the torque
 * bars.  The numeric readouts (angles, FK position, overloads) are the
 * server's values verbatim; the schematic only visualizes them.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Segment {
  from: Point;
  to: Point;
  width: number;
}

export interface Dial {
  label: string;
  degrees: number;
}

export interface TorqueBar {
  joint: string;
  overloaded: boolean;
}

export interface Scene {
  side: Segment[];
  top: Segment[];
  dials: Dial[];
  torque: TorqueBar[];
  effector: Point; // top-view projection of the reported FK position
  height: number; // reported FK z
}

// Drawing proportions of the desk arm (cm): base column, lower arm,
// upper arm + claw.  Purely presentational.
const BASE_H = 11;
const LOWER = 40;
const UPPER_AND_CLAW = 26;

const DEG = Math.PI / 180;

export function buildScene(state: ArmStateMsg): Scene {
  const shoulder = state.y * DEG; // 0 = horizontal, 90 = up
  const elbow = (state.z - 90) * DEG; // 0 = aligned with lower arm
  const yaw = state.x * DEG;

  const shoulderJoint: Point = { x: 0, y: BASE_H };
  const elbowJoint: Point = {
    x: shoulderJoint.x + LOWER * Math.cos(shoulder),
    y: shoulderJoint.y + LOWER * Math.sin(shoulder),
  };
  const tip: Point = {
    x: elbowJoint.x + UPPER_AND_CLAW * Math.cos(shoulder + elbow),
    y: elbowJoint.y + UPPER_AND_CLAW * Math.sin(shoulder + elbow),
  };

  const reachLine: Segment[] = [
    { from: { x: 0, y: 0 }, to: { x: 0, y: BASE_H }, width: 6 },
    { from: shoulderJoint, to: elbowJoint, width: 4 },
    { from: elbowJoint, to: tip, width: 3 },
  ];

  const topTip: Point = {
    x: (LOWER + UPPER_AND_CLAW) * Math.cos(yaw),
    y: (LOWER + UPPER_AND_CLAW) * Math.sin(yaw),
  };
  const top: Segment[] = [{ from: { x: 0, y: 0 }, to: topTip, width: 4 }];

  return {
    side: reachLine,
    top,
    dials: [
      { label: "base", degrees: state.x },
      { label: "shoulder", degrees: state.y },
      { label: "elbow", degrees: state.z },
    ],
    torque: [
      { joint: "shoulder", overloaded: state.overload.includes("shoulder") },
      { joint: "elbow", overloaded: state.overload.includes("elbow") },
    ],
    effector: { x: state.fkX, y: state.fkY },
    height: state.fkZ,
  };
}

/** Paint a scene onto the two canvases.  Thin; all layout lives above. */
export function paint(
  scene: Scene,
  sideCtx: CanvasRenderingContext2D,
  topCtx: CanvasRenderingContext2D,
  trace: readonly Point[],
): void {
  paintView(sideCtx, scene.side, (p) => ({
    x: sideCtx.canvas.width / 2 + p.x * 2,
    y: sideCtx.canvas.height - 20 - p.y * 2,
  }));
  paintView(topCtx, scene.top, (p) => ({
    x: topCtx.canvas.width / 2 + p.x * 2,
    y: topCtx.canvas.height / 2 - p.y * 2,
  }));
  // end-effector trace on the top view, newest point highlighted
  const project = (p: Point) => ({
    x: topCtx.canvas.width / 2 + p.x * 2,
    y: topCtx.canvas.height / 2 - p.y * 2,
  });
  topCtx.strokeStyle = "gold";
  topCtx.lineWidth = 1.5;
  topCtx.beginPath();
  trace.forEach((p, i) => {
    const q = project(p);
    if (i === 0) {
      topCtx.moveTo(q.x, q.y);
    } else {
      topCtx.lineTo(q.x, q.y);
    }
  });
  topCtx.stroke();
  if (trace.length) {
    const q = project(trace[trace.length - 1]);
    topCtx.fillStyle = "red";
    topCtx.beginPath();
    topCtx.arc(q.x, q.y, 4, 0, 2 * Math.PI);
    topCtx.fill();
  }
}

function paintView(
  ctx: CanvasRenderingContext2D,
  segments: Segment[],
  project: (p: Point) => Point,
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.strokeStyle = "#cbd5e1";
  ctx.lineCap = "round";
  for (const seg of segments) {
    const a = project(seg.from);
    const b = project(seg.to);
    ctx.lineWidth = seg.width;
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
}
