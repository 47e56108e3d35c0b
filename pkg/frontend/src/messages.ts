/**
 * Gateway text protocol.
 *
 * Inbound:  "STATE <x> <y> <z> <fkX> <fkY> <fkZ> <flags>"
 *           degrees are integers, FK coordinates are floats in cm,
 *           flags is "-" or a comma list of overloaded joints.
 * Outbound: "MOVE <dx> <dy> <dz>" and "GRIP 0|1".
 *
 * The dashboard never derives control values itself; everything rendered
 * comes out of parseState.
 */

export interface ArmStateMsg {
  x: number;
  y: number;
  z: number;
  fkX: number;
  fkY: number;
  fkZ: number;
  overload: string[];
}

export function parseState(line: string): ArmStateMsg | null {
  const parts = line.trim().split(/\s+/);
  if (parts.length !== 8 || parts[0] !== "STATE") {
    return null;
  }
  const nums = parts.slice(1, 7).map(Number);
  if (nums.some((v) => !Number.isFinite(v))) {
    return null;
  }
  const [x, y, z] = nums;
  if (![x, y, z].every((v) => Number.isInteger(v) && v >= 0 && v <= 180)) {
    return null;
  }
  const overload = parts[7] === "-" ? [] : parts[7].split(",");
  if (!overload.every((f) => f === "shoulder" || f === "elbow")) {
    return null;
  }
  return { x, y, z, fkX: nums[3], fkY: nums[4], fkZ: nums[5], overload };
}

export function formatMove(dx: number, dy: number, dz: number): string {
  return `MOVE ${Math.round(dx)} ${Math.round(dy)} ${Math.round(dz)}`;
}

export function formatGrip(closed: boolean): string {
  return `GRIP ${closed ? 1 : 0}`;
}
