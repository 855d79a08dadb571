"""Planar five-bar leg kinematics.

Mechanism: two motors drive proximal links of length l1; the distal links
(length l2 each) meet at the foot. Motor 1 sits at the origin, motor 2 at
(d, 0) where d is the motor spacing (d = 0 models a coaxial mounting).

Frame convention: +x points forward along the body, +y points *down* toward
the ground, so foot y is the leg extension and is positive for any useful
pose. Joint angles are measured counterclockwise from the +x axis in this
frame, i.e. theta = pi/2 points a proximal link straight down.

Forward kinematics is the intersection of the two circles of radius l2
centered on the knee points; the elbow configuration selects which of the
two intersections is the foot. KNEES_OUTWARD takes the larger-y solution
(foot farther below the motor line), which corresponds to the knees bowing
away from each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    GeometryMismatch,
    JointLimitError,
    SingularPose,
    Unreachable,
    UnreachableClosure,
)

# Reach/closure decisions at double precision on a centimeter-scale mechanism.
REACH_TOL = 1e-9
# |det J| below this is reported as a singular pose (m^2/rad^2).
SINGULARITY_TOL = 1e-9
# Occupancy-grid cell edge for workspace area estimates (m).
OCCUPANCY_CELL = 0.001


class ElbowConfig(Enum):
    KNEES_OUTWARD = "knees_outward"
    KNEES_INWARD = "knees_inward"


@dataclass(frozen=True)
class LegGeometry:
    """Link lengths, motor spacing and joint limits for one leg.

    Defaults are configuration placeholders chosen to be consistent with a
    7 cm standing height and ~5.8 cm ground clearance; they are not claimed
    to match any particular physical robot.
    """

    motor_spacing: float = 0.020
    proximal_len: float = 0.055
    distal_len: float = 0.050
    joint_min: float = 0.10
    joint_max: float = 3.04
    elbow: ElbowConfig = ElbowConfig.KNEES_OUTWARD

    def __post_init__(self):
        if self.motor_spacing < 0:
            raise ValueError("motor_spacing must be >= 0")
        if self.proximal_len <= 0 or self.distal_len <= 0:
            raise ValueError("link lengths must be > 0")
        if not self.joint_min < self.joint_max:
            raise ValueError("joint_min must be < joint_max")
        if not self._reachable_somewhere():
            raise ValueError("no joint-grid pose closes the linkage")

    def _reachable_somewhere(self, n: int = 9) -> bool:
        for i in range(n):
            t1 = self.joint_min + (self.joint_max - self.joint_min) * i / (n - 1)
            for j in range(n):
                t2 = self.joint_min + (self.joint_max - self.joint_min) * j / (n - 1)
                try:
                    forward_kinematics(self, JointPair(t1, t2))
                except UnreachableClosure:
                    continue
                return True
        return False

    @property
    def max_reach(self) -> float:
        return self.proximal_len + self.distal_len

    @property
    def min_reach(self) -> float:
        return abs(self.proximal_len - self.distal_len)


@dataclass(frozen=True)
class JointPair:
    """Motor angles (rad), counterclockwise from +x; motor 1 first."""

    theta1: float
    theta2: float


@dataclass(frozen=True)
class FootPoint:
    """Foot position in the leg plane: x forward (m), y downward (m)."""

    x: float
    y: float


def _check_limits(geom: LegGeometry, q: JointPair) -> None:
    for name, theta in (("theta1", q.theta1), ("theta2", q.theta2)):
        if not (geom.joint_min - 1e-12 <= theta <= geom.joint_max + 1e-12):
            raise JointLimitError(
                f"{name}={theta:.6f} outside [{geom.joint_min}, {geom.joint_max}]"
            )


def knee_points(geom: LegGeometry, q: JointPair):
    """Knee (proximal link tip) positions for both motors."""
    l1 = geom.proximal_len
    k1 = (l1 * math.cos(q.theta1), l1 * math.sin(q.theta1))
    k2 = (geom.motor_spacing + l1 * math.cos(q.theta2), l1 * math.sin(q.theta2))
    return k1, k2


def forward_kinematics(geom: LegGeometry, q: JointPair) -> FootPoint:
    """Foot position for a joint pair, on the configured elbow branch.

    Raises UnreachableClosure when the knees are coincident or farther apart
    than the two distal links can span, JointLimitError outside limits.
    """
    _check_limits(geom, q)
    return _forward_unchecked(geom, q)


def _forward_unchecked(geom: LegGeometry, q: JointPair) -> FootPoint:
    (k1x, k1y), (k2x, k2y) = knee_points(geom, q)
    dx, dy = k2x - k1x, k2y - k1y
    dist = math.hypot(dx, dy)
    l2 = geom.distal_len
    if dist < REACH_TOL:
        raise UnreachableClosure("knee points coincide; closure degenerate")
    if dist > 2.0 * l2 * (1.0 + 1e-12):
        raise UnreachableClosure(
            f"knee separation {dist:.6f} m exceeds distal span {2 * l2:.6f} m"
        )
    half = 0.5 * dist
    h = math.sqrt(max(l2 * l2 - half * half, 0.0))
    mx, my = 0.5 * (k1x + k2x), 0.5 * (k1y + k2y)
    # unit perpendicular to the knee chord
    ux, uy = -dy / dist, dx / dist
    ax, ay = mx + h * ux, my + h * uy
    bx, by = mx - h * ux, my - h * uy
    if geom.elbow is ElbowConfig.KNEES_OUTWARD:
        return FootPoint(ax, ay) if ay >= by else FootPoint(bx, by)
    return FootPoint(ax, ay) if ay < by else FootPoint(bx, by)


def _coincident_limit_foot(geom: LegGeometry, q: JointPair):
    """Branch-limit foot for the degenerate coincident-knees pose (coaxial
    mounting, equal angles): the distal pair folds onto the proximal radial
    line, fully extended outward or retracted inward."""
    (k1x, k1y), (k2x, k2y) = knee_points(geom, q)
    if math.hypot(k2x - k1x, k2y - k1y) >= REACH_TOL:
        return None
    ux, uy = math.cos(q.theta1), math.sin(q.theta1)
    sign = 1.0 if geom.elbow is ElbowConfig.KNEES_OUTWARD else -1.0
    reach = geom.proximal_len + sign * geom.distal_len
    return FootPoint(reach * ux, reach * uy)


def _wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    while theta > math.pi:
        theta -= 2.0 * math.pi
    while theta <= -math.pi:
        theta += 2.0 * math.pi
    return theta


def inverse_kinematics(geom: LegGeometry, p: FootPoint) -> JointPair:
    """Joint pair whose forward kinematics reproduces p to 1e-9 m.

    For each motor the knee lies on an intersection of the circle
    (motor, l1) with (foot, l2), giving two knee angles phi +- alpha per
    motor and four assembly candidates. The forward map resolves the foot
    on its configured branch, so candidates are checked for consistency
    (FK reproduces p) with the elbow configuration's own pairing tried
    first: KNEES_OUTWARD is (phi1 + alpha1, phi2 - alpha2).
    """
    l1, l2 = geom.proximal_len, geom.distal_len
    options = []
    for idx, mx in enumerate((0.0, geom.motor_spacing)):
        rx, ry = p.x - mx, p.y
        r = math.hypot(rx, ry)
        if r > l1 + l2 + REACH_TOL or r < geom.min_reach - REACH_TOL:
            raise Unreachable(
                f"foot ({p.x:.4f}, {p.y:.4f}) outside motor {idx + 1} annulus "
                f"[{geom.min_reach:.4f}, {l1 + l2:.4f}]"
            )
        if r < REACH_TOL:
            raise Unreachable("foot coincides with a motor axis")
        cos_alpha = (l1 * l1 + r * r - l2 * l2) / (2.0 * l1 * r)
        cos_alpha = min(1.0, max(-1.0, cos_alpha))
        alpha = math.acos(cos_alpha)
        phi = math.atan2(ry, rx)
        options.append((_wrap_angle(phi + alpha), _wrap_angle(phi - alpha)))

    if geom.elbow is ElbowConfig.KNEES_OUTWARD:
        order = ((0, 1), (1, 0), (0, 0), (1, 1))
    else:
        order = ((1, 0), (0, 1), (1, 1), (0, 0))

    out_of_limits = None
    for pick1, pick2 in order:
        q = JointPair(options[0][pick1], options[1][pick2])
        try:
            back = _forward_unchecked(geom, q)
        except UnreachableClosure:
            back = _coincident_limit_foot(geom, q)
            if back is None:
                continue
        if math.hypot(back.x - p.x, back.y - p.y) >= REACH_TOL:
            continue
        try:
            _check_limits(geom, q)
        except JointLimitError as exc:
            if out_of_limits is None:
                out_of_limits = exc
            continue
        return q
    if out_of_limits is not None:
        raise out_of_limits
    raise Unreachable(
        f"no {geom.elbow.value} assembly reaches ({p.x:.4f}, {p.y:.4f})"
    )


def _jacobian_terms(geom: LegGeometry, q: JointPair):
    """Closure-constraint terms: rows of A = (p - k_i), diagonal b_i.

    Differentiating |p - k_i|^2 = l2^2 gives A dp = diag(b1, b2) dtheta with
    b_i = (p - k_i) . dk_i/dtheta_i, so J = A^-1 B.
    """
    p = forward_kinematics(geom, q)
    (k1x, k1y), (k2x, k2y) = knee_points(geom, q)
    u1x, u1y = p.x - k1x, p.y - k1y
    u2x, u2y = p.x - k2x, p.y - k2y
    l1 = geom.proximal_len
    b1 = -u1x * l1 * math.sin(q.theta1) + u1y * l1 * math.cos(q.theta1)
    b2 = -u2x * l1 * math.sin(q.theta2) + u2y * l1 * math.cos(q.theta2)
    det_a = u1x * u2y - u1y * u2x
    return u1x, u1y, u2x, u2y, b1, b2, det_a


def jacobian_components(geom: LegGeometry, q: JointPair):
    """Analytic foot Jacobian as four scalars (dx/dt1, dx/dt2, dy/dt1, dy/dt2)."""
    u1x, u1y, u2x, u2y, b1, b2, det_a = _jacobian_terms(geom, q)
    if abs(det_a) < 1e-12:
        raise SingularPose("distal links are parallel; Jacobian undefined")
    return (
        u2y * b1 / det_a,
        -u1y * b2 / det_a,
        -u2x * b1 / det_a,
        u1x * b2 / det_a,
    )


def jacobian(geom: LegGeometry, q: JointPair) -> np.ndarray:
    """Analytic 2x2 foot Jacobian d(x, y)/d(theta1, theta2) in m/rad.

    Derived from the closure constraints (not finite differences), so the
    finite-difference comparison in the tests is an independent check.
    """
    dxdt1, dxdt2, dydt1, dydt2 = jacobian_components(geom, q)
    return np.array([[dxdt1, dxdt2], [dydt1, dydt2]])


def manipulability(geom: LegGeometry, q: JointPair) -> float:
    """|det J|, the planar 2-DOF manipulability measure.

    det J = b1*b2/det A; at a fully extended pose both b terms vanish, which
    is reported as exactly 0 even where A is also degenerate (the coaxial
    straight-down pose).
    """
    _, _, _, _, b1, b2, det_a = _jacobian_terms(geom, q)
    if abs(det_a) < 1e-12:
        if abs(b1) < 1e-9 and abs(b2) < 1e-9:
            return 0.0
        raise SingularPose("distal links are parallel; manipulability diverges")
    return abs(b1 * b2 / det_a)


@dataclass(frozen=True)
class WorkspaceSample:
    """FK evaluated over a uniform joint grid (row-major in theta1, theta2)."""

    joints: tuple
    points: tuple
    manipulability: tuple
    skipped: int


def workspace_sample(geom: LegGeometry, n_per_axis: int) -> WorkspaceSample:
    """Sample the reachable workspace over the n x n joint grid.

    Poses whose closure fails are skipped silently; the count of skips is
    reported. Output order is deterministic (row-major).
    """
    if n_per_axis < 2:
        raise ValueError("n_per_axis must be >= 2")
    lo, hi = geom.joint_min, geom.joint_max
    step = (hi - lo) / (n_per_axis - 1)
    joints, points, manips = [], [], []
    skipped = 0
    for i in range(n_per_axis):
        t1 = lo + step * i
        for j in range(n_per_axis):
            t2 = lo + step * j
            q = JointPair(t1, t2)
            try:
                p = forward_kinematics(geom, q)
            except UnreachableClosure:
                skipped += 1
                continue
            try:
                w = manipulability(geom, q)
            except SingularPose:
                w = math.inf
            joints.append(q)
            points.append(p)
            manips.append(w)
    return WorkspaceSample(tuple(joints), tuple(points), tuple(manips), skipped)


def occupancy_area(points, cell: float = OCCUPANCY_CELL) -> float:
    """Occupancy-grid area estimate: count of distinct cells times cell area.

    Robust to non-convex workspaces, which is why it is the primary
    estimator; see convex_hull_area for the secondary statistic.
    """
    cells = set()
    for p in points:
        cells.add((math.floor(p.x / cell), math.floor(p.y / cell)))
    return len(cells) * cell * cell


def convex_hull_area(points) -> float:
    """Area of the convex hull of the sampled points (monotone chain)."""
    pts = sorted({(p.x, p.y) for p in points})
    if len(pts) < 3:
        return 0.0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for pt in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper = []
    for pt in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    hull = lower[:-1] + upper[:-1]
    area = 0.0
    for i in range(len(hull)):
        x1, y1 = hull[i]
        x2, y2 = hull[(i + 1) % len(hull)]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


@dataclass(frozen=True)
class WorkspaceComparison:
    area_side_by_side: float
    area_coaxial: float
    ratio: float


def workspace_area_compare(
    geom_sbs: LegGeometry, geom_coax: LegGeometry, n: int
) -> WorkspaceComparison:
    """Occupancy-grid areas of both sampled workspaces and their ratio.

    The geometries must differ only in motor spacing, with the coaxial one
    at d = 0.
    """
    if (
        geom_sbs.proximal_len != geom_coax.proximal_len
        or geom_sbs.distal_len != geom_coax.distal_len
        or geom_sbs.joint_min != geom_coax.joint_min
        or geom_sbs.joint_max != geom_coax.joint_max
        or geom_sbs.elbow is not geom_coax.elbow
    ):
        raise GeometryMismatch("geometries must differ only in motor spacing")
    if geom_coax.motor_spacing != 0.0:
        raise GeometryMismatch("coaxial geometry must have motor_spacing = 0")
    area_sbs = occupancy_area(workspace_sample(geom_sbs, n).points)
    area_coax = occupancy_area(workspace_sample(geom_coax, n).points)
    return WorkspaceComparison(area_sbs, area_coax, area_sbs / area_coax)
