// Cockpit entry point: canvases, input wiring, slider panel, render loop.

import { forwardKinematics } from "./kinematics";
import { CommandSender, InputMap, SEND_RATE_HZ } from "./input";
import {
  buildHud,
  buildLegView,
  buildStripCharts,
  buildTopDown,
  drawScene,
} from "./render";
import { UiSessionState } from "./state";
import { DEFAULT_GEOMETRY, GaitOverrides, LegGeometry } from "./types";
import { Connection } from "./ws";

const state = new UiSessionState();
const input = new InputMap();
const sender = new CommandSender();
const conn = new Connection(state);

let geometry: LegGeometry = { ...DEFAULT_GEOMETRY };
const footTrace: Array<[number, number]> = [];

function canvasCtx(id: string): CanvasRenderingContext2D {
  const canvas = document.getElementById(id) as HTMLCanvasElement;
  return canvas.getContext("2d")!;
}

const SLIDERS: Array<{ key: keyof GaitOverrides; label: string; min: number; max: number; step: number; dflt: number }> = [
  { key: "stride_len", label: "stride (m)", min: 0, max: 0.08, step: 0.002, dflt: 0.03 },
  { key: "frequency", label: "frequency (Hz)", min: 0.25, max: 8, step: 0.25, dflt: 1 },
  { key: "duty", label: "duty", min: 0.2, max: 0.8, step: 0.05, dflt: 0.5 },
  { key: "lift_amp", label: "lift amp (m)", min: 0, max: 0.03, step: 0.001, dflt: 0.015 },
  { key: "ground_amp", label: "ground amp (m)", min: 0, max: 0.006, step: 0.001, dflt: 0.002 },
  { key: "stand_height", label: "stand height (m)", min: 0.04, max: 0.095, step: 0.005, dflt: 0.07 },
];

function buildPanel(): void {
  const panel = document.getElementById("panel")!;
  for (const s of SLIDERS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const name = document.createElement("span");
    name.textContent = s.label;
    const value = document.createElement("span");
    value.textContent = String(s.dflt);
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(s.min);
    slider.max = String(s.max);
    slider.step = String(s.step);
    slider.value = String(s.dflt);
    slider.addEventListener("input", () => {
      const v = Number(slider.value);
      value.textContent = v.toFixed(3);
      input.setOverride(s.key, v === s.dflt ? undefined : v);
    });
    row.append(name, slider, value);
    panel.append(row);
  }
}

async function loadConfig(): Promise<void> {
  try {
    const resp = await fetch("/config");
    const body = await resp.json();
    geometry = {
      motor_spacing: body.params["leg.motor_spacing"],
      proximal_len: body.params["leg.proximal_len"],
      distal_len: body.params["leg.distal_len"],
    };
  } catch {
    // keep defaults; the overlay still renders
  }
}

function pollGamepad(): { forward: number; turn: number } | undefined {
  const pads = navigator.getGamepads ? navigator.getGamepads() : [];
  for (const pad of pads) {
    if (pad) {
      return { forward: -pad.axes[1], turn: pad.axes[0] };
    }
  }
  return undefined;
}

function start(): void {
  buildPanel();
  conn.open();
  void loadConfig();

  document.addEventListener("keydown", (e) => {
    if (!e.repeat) input.keyDown(e.key);
  });
  document.addEventListener("keyup", (e) => input.keyUp(e.key));

  // 20 Hz command loop
  let lastTick = performance.now();
  setInterval(() => {
    const now = performance.now();
    input.tick((now - lastTick) / 1000, pollGamepad());
    lastTick = now;
    const cmd = input.buildCommand();
    if (sender.due(cmd, now / 1000)) {
      conn.send(cmd);
    }
  }, 1000 / SEND_RATE_HZ);

  const top = canvasCtx("topdown");
  const leg = canvasCtx("legview");
  const strips = canvasCtx("strips");
  const status = document.getElementById("status")!;

  function frame(): void {
    const now = performance.now();
    const u = state.latest;
    if (u) {
      const pose = forwardKinematics(geometry, u.joints[0], u.joints[1]);
      if (pose) {
        footTrace.push(pose.foot);
        if (footTrace.length > 90) footTrace.shift();
      }
    }
    drawScene(top, [
      ...buildTopDown(state, { w: 420, h: 420 }),
      ...buildHud(state, { w: 420, h: 420 }, now),
    ]);
    drawScene(leg, buildLegView(state, { w: 300, h: 420 }, geometry, footTrace));
    drawScene(strips, buildStripCharts(state, { w: 420, h: 420 }));
    status.textContent = state.connected
      ? (state.lastError ? `connected — last error: ${state.lastError}` : "connected")
      : "disconnected — retrying";
    status.className = state.connected ? "ok" : "bad";
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

document.addEventListener("DOMContentLoaded", start);
