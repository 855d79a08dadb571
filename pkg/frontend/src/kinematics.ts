// Five-bar forward kinematics for the live leg overlay.
//
// Must agree with the simulator's kinematics; fixtures/fk_vectors.json
// (exported by the primary package) pins that agreement in the tests.
// Frame: motor 1 at the origin, motor 2 at (d, 0), +x forward, +y down;
// the knees-outward branch takes the larger-y circle intersection.

import { LegGeometry } from "./types";

export interface LegPose {
  knee1: [number, number];
  knee2: [number, number];
  foot: [number, number];
}

export function forwardKinematics(
  geom: LegGeometry,
  theta1: number,
  theta2: number,
): LegPose | null {
  const l1 = geom.proximal_len;
  const l2 = geom.distal_len;
  const k1x = l1 * Math.cos(theta1);
  const k1y = l1 * Math.sin(theta1);
  const k2x = geom.motor_spacing + l1 * Math.cos(theta2);
  const k2y = l1 * Math.sin(theta2);
  const dx = k2x - k1x;
  const dy = k2y - k1y;
  const dist = Math.hypot(dx, dy);
  if (dist < 1e-9 || dist > 2 * l2) {
    return null; // closure degenerate or unreachable
  }
  const half = dist / 2;
  const h = Math.sqrt(Math.max(l2 * l2 - half * half, 0));
  const mx = (k1x + k2x) / 2;
  const my = (k1y + k2y) / 2;
  const ux = -dy / dist;
  const uy = dx / dist;
  const ax = mx + h * ux;
  const ay = my + h * uy;
  const bx = mx - h * ux;
  const by = my - h * uy;
  const foot: [number, number] = ay >= by ? [ax, ay] : [bx, by];
  return { knee1: [k1x, k1y], knee2: [k2x, k2y], foot };
}
