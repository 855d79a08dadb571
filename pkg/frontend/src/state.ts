// Cockpit session state: latest telemetry, pose trail and rolling plot
// buffers. Rendering never mutates any of this; socket callbacks only
// append.

import { StateUpdate } from "./types";

export const PLOT_WINDOW_S = 30;
export const TRAIL_WINDOW_S = 30;
export const STALE_AFTER_MS = 500;

export interface PlotSample {
  t: number;
  speed: number;
  current: number;
  cot: number | null;
}

export class UiSessionState {
  connected = false;
  latest: StateUpdate | null = null;
  lastReceivedMs = -Infinity;
  trail: Array<{ t: number; x: number; y: number }> = [];
  plots: PlotSample[] = [];
  lastError: string | null = null;

  ingest(update: StateUpdate, nowMs: number): void {
    this.latest = update;
    this.lastReceivedMs = nowMs;
    this.trail.push({ t: update.t, x: update.pose.x, y: update.pose.y });
    const current = update.currents.reduce((a, b) => a + b, 0);
    this.plots.push({
      t: update.t,
      speed: update.speed,
      current,
      cot: update.cot,
    });
    const cutTrail = update.t - TRAIL_WINDOW_S;
    while (this.trail.length > 0 && this.trail[0].t < cutTrail) {
      this.trail.shift();
    }
    const cutPlots = update.t - PLOT_WINDOW_S;
    while (this.plots.length > 0 && this.plots[0].t < cutPlots) {
      this.plots.shift();
    }
  }

  stale(nowMs: number): boolean {
    return nowMs - this.lastReceivedMs > STALE_AFTER_MS;
  }
}
