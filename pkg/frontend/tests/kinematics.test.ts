import { describe, expect, it } from "vitest";
import fixtures from "../fixtures/fk_vectors.json";
import { forwardKinematics } from "../src/kinematics";

// fixtures/fk_vectors.json is exported by the simulator package
// (frontend/scripts/gen_fixtures.py); the overlay must agree with it.

describe("leg overlay forward kinematics", () => {
  const geom = {
    motor_spacing: fixtures.geometry.motor_spacing,
    proximal_len: fixtures.geometry.proximal_len,
    distal_len: fixtures.geometry.distal_len,
  };

  it("matches every exported vector to 1e-6 m", () => {
    for (const row of fixtures.vectors) {
      const pose = forwardKinematics(geom, row.theta1, row.theta2);
      expect(pose).not.toBeNull();
      expect(Math.abs(pose!.foot[0] - row.foot[0])).toBeLessThan(1e-6);
      expect(Math.abs(pose!.foot[1] - row.foot[1])).toBeLessThan(1e-6);
      expect(Math.abs(pose!.knee1[0] - row.knee1[0])).toBeLessThan(1e-6);
      expect(Math.abs(pose!.knee1[1] - row.knee1[1])).toBeLessThan(1e-6);
      expect(Math.abs(pose!.knee2[0] - row.knee2[0])).toBeLessThan(1e-6);
      expect(Math.abs(pose!.knee2[1] - row.knee2[1])).toBeLessThan(1e-6);
    }
  });

  it("returns null for an unreachable closure", () => {
    const wide = { motor_spacing: 0.08, proximal_len: 0.05, distal_len: 0.03 };
    expect(forwardKinematics(wide, Math.PI - 0.3, 0.3)).toBeNull();
  });

  it("picks the larger-y (knees outward) intersection", () => {
    const pose = forwardKinematics(geom, 2.0, 1.1)!;
    const midY = (pose.knee1[1] + pose.knee2[1]) / 2;
    expect(pose.foot[1]).toBeGreaterThan(midY);
  });
});
