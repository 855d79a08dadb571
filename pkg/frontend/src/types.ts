// Wire types mirroring ../schemas/*.schema.json (the schemas are normative).

export type GaitName = "walk" | "trot" | "bound" | "pronk";
export type ModeName = "stand" | "walk" | "jump" | "torque_off";

export interface GaitOverrides {
  stride_len?: number;
  frequency?: number;
  duty?: number;
  lift_amp?: number;
  ground_amp?: number;
  stand_height?: number;
}

export interface TeleopCommand {
  v: 1;
  forward: number;
  turn: number;
  gait: GaitName;
  mode: ModeName;
  params?: GaitOverrides;
}

export interface LinkStats {
  sent: number;
  delivered: number;
  dropped: number;
  applied: number;
  rejected_stale: number;
  state_dropped: number;
}

export interface StateUpdate {
  v: 1;
  t: number;
  pose: { x: number; y: number; yaw: number };
  body_height: number;
  joints: number[];
  currents: number[];
  speed: number;
  cot: number | null;
  battery: { pct: number; voltage: number };
  link: LinkStats;
  mode: ModeName;
  gait: GaitName;
}

export interface ErrorPayload {
  v: 1;
  error: { field: string; message: string };
}

export interface LegGeometry {
  motor_spacing: number;
  proximal_len: number;
  distal_len: number;
}

export const DEFAULT_GEOMETRY: LegGeometry = {
  motor_spacing: 0.02,
  proximal_len: 0.055,
  distal_len: 0.05,
};
