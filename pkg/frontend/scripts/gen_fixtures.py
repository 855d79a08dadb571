"""Regenerate the cockpit's test fixtures from the primary package.

Run from the repo root:  python frontend/scripts/gen_fixtures.py
Writes frontend/fixtures/fk_vectors.json (forward-kinematics test vectors
for the leg overlay) and frontend/fixtures/replay_states.json (a recorded
deterministic teleop replay used as the render-snapshot source).
"""

import json
import random
from pathlib import Path

from microquad import (
    GaitParams,
    JointPair,
    LegGeometry,
    RobotConfig,
    TeleopSession,
    forward_kinematics,
)
from microquad.errors import UnreachableClosure
from microquad.geometry import knee_points
from microquad.link import ChannelModel

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def fk_vectors():
    geom = LegGeometry()
    rng = random.Random(990)
    rows = []
    while len(rows) < 64:
        q = JointPair(
            rng.uniform(geom.joint_min, geom.joint_max),
            rng.uniform(geom.joint_min, geom.joint_max),
        )
        try:
            p = forward_kinematics(geom, q)
        except UnreachableClosure:
            continue
        (k1x, k1y), (k2x, k2y) = knee_points(geom, q)
        rows.append({
            "theta1": q.theta1, "theta2": q.theta2,
            "knee1": [k1x, k1y], "knee2": [k2x, k2y],
            "foot": [p.x, p.y],
        })
    return {
        "geometry": {
            "motor_spacing": geom.motor_spacing,
            "proximal_len": geom.proximal_len,
            "distal_len": geom.distal_len,
            "joint_min": geom.joint_min,
            "joint_max": geom.joint_max,
            "elbow": geom.elbow.value,
        },
        "vectors": rows,
    }


def replay_states():
    timeline = {
        0: '{"forward":1,"gait":"trot","mode":"walk"}',
        600: '{"forward":0.7,"turn":0.5,"gait":"trot","mode":"walk"}',
        1400: '{"forward":0,"turn":0,"mode":"stand"}',
    }
    session = TeleopSession(RobotConfig(), GaitParams(stride_len=0.02),
                            ChannelModel(seed=55))
    updates = session.run_scripted(timeline, 1800)
    return [json.loads(u) for u in updates]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "fk_vectors.json").write_text(
        json.dumps(fk_vectors(), indent=1) + "\n")
    (OUT / "replay_states.json").write_text(
        json.dumps(replay_states()) + "\n")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
