// Scene building and drawing.
//
// buildScene is a pure function from UI state to a flat list of draw ops,
// which keeps rendering deterministic and lets the tests snapshot a
// scripted replay without a canvas. drawScene replays the ops onto a 2D
// context at ~30 Hz.

import { forwardKinematics } from "./kinematics";
import { UiSessionState } from "./state";
import { DEFAULT_GEOMETRY, LegGeometry } from "./types";

export type DrawOp =
  | { op: "clear"; w: number; h: number; color: string }
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { op: "poly"; pts: Array<[number, number]>; color: string; width: number }
  | { op: "circle"; x: number; y: number; r: number; color: string; fill: boolean }
  | { op: "text"; x: number; y: number; text: string; color: string; size: number };

export interface Layout {
  w: number;
  h: number;
}

const COLORS = {
  bg: "#10141a",
  grid: "#222a33",
  trail: "#3fa7ff",
  body: "#e8eef4",
  link: "#9fd356",
  distal: "#56d3b9",
  foot: "#ff5a5f",
  trace: "#705aff",
  speed: "#3fa7ff",
  current: "#ffb648",
  cot: "#ff5a5f",
  label: "#8a97a5",
  stale: "#ff5a5f",
};

const round = (v: number) => Math.round(v * 100) / 100;

export function buildTopDown(state: UiSessionState, layout: Layout): DrawOp[] {
  const ops: DrawOp[] = [
    { op: "clear", w: layout.w, h: layout.h, color: COLORS.bg },
    { op: "text", x: 8, y: 16, text: "top view", color: COLORS.label, size: 12 },
  ];
  const u = state.latest;
  if (!u) {
    return ops;
  }
  // fit the trail plus the robot into the viewport
  const xs = state.trail.map((p) => p.x).concat([u.pose.x]);
  const ys = state.trail.map((p) => p.y).concat([u.pose.y]);
  const span = Math.max(
    0.4,
    Math.max(...xs) - Math.min(...xs),
    Math.max(...ys) - Math.min(...ys),
  );
  const scale = (Math.min(layout.w, layout.h) * 0.8) / span;
  const cx = (Math.max(...xs) + Math.min(...xs)) / 2;
  const cy = (Math.max(...ys) + Math.min(...ys)) / 2;
  const toPx = (x: number, y: number): [number, number] => [
    round(layout.w / 2 + (x - cx) * scale),
    round(layout.h / 2 - (y - cy) * scale),
  ];

  if (state.trail.length > 1) {
    ops.push({
      op: "poly",
      pts: state.trail.map((p) => toPx(p.x, p.y)),
      color: COLORS.trail,
      width: 1.5,
    });
  }
  // body rectangle + heading tick
  const [bx, by] = toPx(u.pose.x, u.pose.y);
  const yaw = u.pose.yaw;
  const len = 0.08 * scale;
  const wid = 0.07 * scale;
  const corners: Array<[number, number]> = [];
  for (const [sx, sy] of [[1, 1], [1, -1], [-1, -1], [-1, 1]] as const) {
    const lx = (sx * len) / 2;
    const ly = (sy * wid) / 2;
    corners.push([
      round(bx + lx * Math.cos(yaw) - ly * Math.sin(-yaw)),
      round(by - (lx * Math.sin(yaw) + ly * Math.cos(-yaw))),
    ]);
  }
  corners.push(corners[0]);
  ops.push({ op: "poly", pts: corners, color: COLORS.body, width: 2 });
  ops.push({
    op: "line",
    x1: bx,
    y1: by,
    x2: round(bx + Math.cos(yaw) * len * 0.8),
    y2: round(by - Math.sin(yaw) * len * 0.8),
    color: COLORS.foot,
    width: 2,
  });
  return ops;
}

export function buildLegView(
  state: UiSessionState,
  layout: Layout,
  geom: LegGeometry = DEFAULT_GEOMETRY,
  footTrace: Array<[number, number]> = [],
): DrawOp[] {
  const ops: DrawOp[] = [
    { op: "clear", w: layout.w, h: layout.h, color: COLORS.bg },
    { op: "text", x: 8, y: 16, text: "front-left leg", color: COLORS.label, size: 12 },
  ];
  const u = state.latest;
  if (!u) {
    return ops;
  }
  const reach = geom.proximal_len + geom.distal_len;
  const scale = (layout.h * 0.8) / (reach * 1.1);
  const ox = layout.w / 2 - (geom.motor_spacing / 2) * scale;
  const oy = layout.h * 0.12;
  const toPx = (x: number, y: number): [number, number] => [
    round(ox + x * scale),
    round(oy + y * scale), // leg +y (down) is screen-down
  ];

  const m1 = toPx(0, 0);
  const m2 = toPx(geom.motor_spacing, 0);
  ops.push({ op: "line", x1: m1[0] - 18, y1: m1[1], x2: m2[0] + 18, y2: m2[1], color: COLORS.grid, width: 4 });

  const pose = forwardKinematics(geom, u.joints[0], u.joints[1]);
  if (pose) {
    const k1 = toPx(pose.knee1[0], pose.knee1[1]);
    const k2 = toPx(pose.knee2[0], pose.knee2[1]);
    const foot = toPx(pose.foot[0], pose.foot[1]);
    ops.push({ op: "line", x1: m1[0], y1: m1[1], x2: k1[0], y2: k1[1], color: COLORS.link, width: 3 });
    ops.push({ op: "line", x1: m2[0], y1: m2[1], x2: k2[0], y2: k2[1], color: COLORS.link, width: 3 });
    ops.push({ op: "line", x1: k1[0], y1: k1[1], x2: foot[0], y2: foot[1], color: COLORS.distal, width: 3 });
    ops.push({ op: "line", x1: k2[0], y1: k2[1], x2: foot[0], y2: foot[1], color: COLORS.distal, width: 3 });
    ops.push({ op: "circle", x: foot[0], y: foot[1], r: 4, color: COLORS.foot, fill: true });
    for (const m of [m1, m2]) {
      ops.push({ op: "circle", x: m[0], y: m[1], r: 3, color: COLORS.body, fill: true });
    }
  }
  if (footTrace.length > 1) {
    ops.push({
      op: "poly",
      pts: footTrace.map(([x, y]) => toPx(x, y)),
      color: COLORS.trace,
      width: 1,
    });
  }
  return ops;
}

function strip(
  ops: DrawOp[],
  label: string,
  values: Array<number | null>,
  y0: number,
  h: number,
  w: number,
  color: string,
): void {
  ops.push({ op: "text", x: 8, y: y0 + 12, text: label, color: COLORS.label, size: 11 });
  const xs = values.filter((v): v is number => v !== null && isFinite(v));
  if (xs.length < 2) {
    return;
  }
  const lo = Math.min(...xs);
  const hi = Math.max(...xs, lo + 1e-9);
  const pts: Array<[number, number]> = [];
  values.forEach((v, i) => {
    if (v === null || !isFinite(v)) {
      return;
    }
    pts.push([
      round(40 + (i / Math.max(values.length - 1, 1)) * (w - 50)),
      round(y0 + h - ((v - lo) / (hi - lo)) * (h - 16) - 2),
    ]);
  });
  if (pts.length > 1) {
    ops.push({ op: "poly", pts, color, width: 1.5 });
  }
  ops.push({
    op: "text", x: 8, y: y0 + 26,
    text: xs[xs.length - 1].toPrecision(3),
    color, size: 11,
  });
}

export function buildStripCharts(state: UiSessionState, layout: Layout): DrawOp[] {
  const ops: DrawOp[] = [
    { op: "clear", w: layout.w, h: layout.h, color: COLORS.bg },
  ];
  const third = layout.h / 3;
  strip(ops, "speed m/s", state.plots.map((p) => p.speed), 0, third, layout.w, COLORS.speed);
  strip(ops, "current A", state.plots.map((p) => p.current), third, third, layout.w, COLORS.current);
  strip(ops, "COT", state.plots.map((p) => p.cot), 2 * third, third, layout.w, COLORS.cot);
  return ops;
}

export function buildHud(state: UiSessionState, layout: Layout, nowMs: number): DrawOp[] {
  const ops: DrawOp[] = [];
  const u = state.latest;
  if (state.stale(nowMs)) {
    ops.push({
      op: "text", x: layout.w - 110, y: 18,
      text: "STALE DATA", color: COLORS.stale, size: 13,
    });
  }
  if (u) {
    const text = `t=${u.t.toFixed(1)}s  bat=${u.battery.pct.toFixed(0)}%  ` +
      `${u.gait}/${u.mode}  drop=${u.link.dropped}/${u.link.sent}`;
    ops.push({ op: "text", x: 8, y: layout.h - 8, text, color: COLORS.label, size: 11 });
  }
  return ops;
}

export function drawScene(ctx: CanvasRenderingContext2D, ops: DrawOp[]): void {
  for (const op of ops) {
    switch (op.op) {
      case "clear":
        ctx.fillStyle = op.color;
        ctx.fillRect(0, 0, op.w, op.h);
        break;
      case "line":
        ctx.strokeStyle = op.color;
        ctx.lineWidth = op.width;
        ctx.beginPath();
        ctx.moveTo(op.x1, op.y1);
        ctx.lineTo(op.x2, op.y2);
        ctx.stroke();
        break;
      case "poly":
        ctx.strokeStyle = op.color;
        ctx.lineWidth = op.width;
        ctx.beginPath();
        op.pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
        break;
      case "circle":
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, 2 * Math.PI);
        if (op.fill) {
          ctx.fillStyle = op.color;
          ctx.fill();
        } else {
          ctx.strokeStyle = op.color;
          ctx.stroke();
        }
        break;
      case "text":
        ctx.fillStyle = op.color;
        ctx.font = `${op.size}px ui-monospace, monospace`;
        ctx.fillText(op.text, op.x, op.y);
        break;
    }
  }
}
