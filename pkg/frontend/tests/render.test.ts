import { describe, expect, it } from "vitest";
import replay from "../fixtures/replay_states.json";
import { forwardKinematics } from "../src/kinematics";
import { buildLegView, buildStripCharts, buildTopDown, DrawOp } from "../src/render";
import { UiSessionState } from "../src/state";
import { StateUpdate } from "../src/types";

// fixtures/replay_states.json is a deterministic scripted-teleop replay
// recorded from the simulator; rendering it must be reproducible.

const GEOM = { motor_spacing: 0.02, proximal_len: 0.055, distal_len: 0.05 };
const LAYOUT = { w: 420, h: 420 };

function renderReplay(): DrawOp[] {
  const state = new UiSessionState();
  const trace: Array<[number, number]> = [];
  const ops: DrawOp[] = [];
  (replay as StateUpdate[]).forEach((update, i) => {
    state.ingest(update, i * 33.3);
    const pose = forwardKinematics(GEOM, update.joints[0], update.joints[1]);
    if (pose) {
      trace.push(pose.foot);
      if (trace.length > 90) trace.shift();
    }
    if (i % 10 === 9) {
      ops.push(...buildTopDown(state, LAYOUT));
      ops.push(...buildLegView(state, { w: 300, h: 420 }, GEOM, trace));
      ops.push(...buildStripCharts(state, LAYOUT));
    }
  });
  return ops;
}

describe("scripted replay rendering", () => {
  it("is byte-stable across two runs", () => {
    const a = JSON.stringify(renderReplay());
    const b = JSON.stringify(renderReplay());
    expect(a).toBe(b);
    expect(a.length).toBeGreaterThan(10_000);
  });

  it("draws a non-trivial trail once the robot moves", () => {
    const state = new UiSessionState();
    (replay as StateUpdate[]).forEach((u, i) => state.ingest(u, i * 33.3));
    const ops = buildTopDown(state, LAYOUT);
    const trail = ops.find((op) => op.op === "poly");
    expect(trail).toBeDefined();
    expect((trail as Extract<DrawOp, { op: "poly" }>).pts.length).toBeGreaterThan(50);
  });

  it("leg view foot marker sits at the FK of the displayed joints", () => {
    const state = new UiSessionState();
    const last = (replay as StateUpdate[])[replay.length - 1];
    state.ingest(last, 0);
    const ops = buildLegView(state, { w: 300, h: 420 }, GEOM);
    const foot = ops.find(
      (op): op is Extract<DrawOp, { op: "circle" }> =>
        op.op === "circle" && op.fill && op.r === 4,
    );
    expect(foot).toBeDefined();
    const pose = forwardKinematics(GEOM, last.joints[0], last.joints[1])!;
    // invert the view transform used by buildLegView
    const reach = GEOM.proximal_len + GEOM.distal_len;
    const scale = (420 * 0.8) / (reach * 1.1);
    const ox = 300 / 2 - (GEOM.motor_spacing / 2) * scale;
    const oy = 420 * 0.12;
    expect(foot!.x).toBeCloseTo(ox + pose.foot[0] * scale, 0);
    expect(foot!.y).toBeCloseTo(oy + pose.foot[1] * scale, 0);
  });

  it("stale badge threshold honours 500 ms", () => {
    const state = new UiSessionState();
    state.ingest((replay as StateUpdate[])[0], 1000);
    expect(state.stale(1400)).toBe(false);
    expect(state.stale(1600)).toBe(true);
  });

  it("plot buffers keep a bounded window", () => {
    const state = new UiSessionState();
    (replay as StateUpdate[]).forEach((u, i) => state.ingest(u, i));
    const span = state.plots[state.plots.length - 1].t - state.plots[0].t;
    expect(span).toBeLessThanOrEqual(30 + 1e-9);
  });
});
