// Keyboard/gamepad to TeleopCommand mapping.
//
// Axes ramp linearly to full scale in RAMP_S seconds while a key is held
// and decay back to zero at the same rate on release. W/S (or up/down)
// drive forward, A/D (or left/right) drive turn (A = negative). Number
// keys 1-4 pick the gait, J fires a jump, X toggles torque off. Commands
// are produced at 20 Hz but only sent on change or as a 1 s keepalive;
// the caller owns the socket.

import { GaitName, GaitOverrides, ModeName, TeleopCommand } from "./types";

export const RAMP_S = 0.3;
export const SEND_RATE_HZ = 20;
export const KEEPALIVE_S = 1.0;

const GAIT_KEYS: Record<string, GaitName> = {
  "1": "walk",
  "2": "trot",
  "3": "bound",
  "4": "pronk",
};

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

export class InputMap {
  forward = 0;
  turn = 0;
  gait: GaitName = "trot";
  torqueOff = false;
  private jumpPending = false;
  private held = new Set<string>();
  private overrides: GaitOverrides = {};

  keyDown(key: string): void {
    const k = key.toLowerCase();
    if (k in GAIT_KEYS) {
      this.gait = GAIT_KEYS[k];
      return;
    }
    if (k === "j") {
      this.jumpPending = true;
      return;
    }
    if (k === "x") {
      this.torqueOff = !this.torqueOff;
      return;
    }
    this.held.add(k);
  }

  keyUp(key: string): void {
    this.held.delete(key.toLowerCase());
  }

  setOverride(name: keyof GaitOverrides, value: number | undefined): void {
    if (value === undefined) {
      delete this.overrides[name];
    } else {
      this.overrides[name] = value;
    }
  }

  getOverrides(): GaitOverrides {
    return { ...this.overrides };
  }

  /** Advance the axis ramps by dt seconds, folding in an optional gamepad
   * sample (stick axes in [-1, 1], which bypass the ramp). */
  tick(dt: number, pad?: { forward: number; turn: number }): void {
    const step = dt / RAMP_S;
    const fwdTarget =
      (this.held.has("w") || this.held.has("arrowup") ? 1 : 0) +
      (this.held.has("s") || this.held.has("arrowdown") ? -1 : 0);
    const turnTarget =
      (this.held.has("d") || this.held.has("arrowright") ? 1 : 0) +
      (this.held.has("a") || this.held.has("arrowleft") ? -1 : 0);
    this.forward = approach(this.forward, clamp(fwdTarget, -1, 1), step);
    this.turn = approach(this.turn, clamp(turnTarget, -1, 1), step);
    if (pad && (Math.abs(pad.forward) > 0.05 || Math.abs(pad.turn) > 0.05)) {
      this.forward = clamp(pad.forward, -1, 1);
      this.turn = clamp(pad.turn, -1, 1);
    }
  }

  buildCommand(): TeleopCommand {
    let mode: ModeName = "walk";
    if (this.torqueOff) {
      mode = "torque_off";
    } else if (this.jumpPending) {
      mode = "jump";
      this.jumpPending = false;
    } else if (this.forward === 0 && this.turn === 0) {
      mode = "stand";
    }
    const cmd: TeleopCommand = {
      v: 1,
      forward: this.forward,
      turn: this.turn,
      gait: this.gait,
      mode,
    };
    if (Object.keys(this.overrides).length > 0) {
      cmd.params = { ...this.overrides };
    }
    return cmd;
  }
}

function approach(value: number, target: number, step: number): number {
  if (value < target) return Math.min(target, value + step);
  if (value > target) return Math.max(target, value - step);
  return value;
}

/** Decides whether a command is due: send on change or every KEEPALIVE_S. */
export class CommandSender {
  private lastSent: string | null = null;
  private lastTime = -Infinity;

  due(cmd: TeleopCommand, now: number): boolean {
    const encoded = JSON.stringify(cmd);
    if (encoded !== this.lastSent || now - this.lastTime >= KEEPALIVE_S) {
      this.lastSent = encoded;
      this.lastTime = now;
      return true;
    }
    return false;
  }
}
