"""Planar slicing of watertight meshes into closed layer contours plus infill.

Slicing planes sit half a layer height above z_min so axis-aligned faces do
not land exactly on a plane; any residual vertex-on-plane case is perturbed
by 1e-7 mm. Segment endpoints are interpolated per undirected edge (always
from the lower vertex index), so the two faces sharing an edge produce
bit-identical points and loop stitching is exact; a 1e-6 mm snap grid covers
everything else. Layers are computed sequentially and deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotWatertight, OpenContour
from .mesh import AABB, TriangleMesh, Vec3, bounding_box, validate_mesh

Point2 = tuple[float, float]

# Loop endpoints snap to this grid while stitching.
SNAP_TOLERANCE_MM = 1e-6
# Vertices closer than this to a slicing plane get nudged up by 1e-7 mm.
COPLANAR_EPS_MM = 1e-12
COPLANAR_NUDGE_MM = 1e-7


@dataclass(frozen=True)
class PrinterProfile:
    layer_height_mm: float = 0.2
    line_width_mm: float = 0.4
    filament_diameter_mm: float = 1.75
    print_feed_mm_per_min: float = 1800.0
    travel_feed_mm_per_min: float = 6000.0
    bed_size_mm: Vec3 = (220.0, 220.0, 250.0)
    infill_spacing_mm: float = 2.0

    def __post_init__(self):
        numeric = {
            "layer_height_mm": self.layer_height_mm,
            "line_width_mm": self.line_width_mm,
            "filament_diameter_mm": self.filament_diameter_mm,
            "print_feed_mm_per_min": self.print_feed_mm_per_min,
            "travel_feed_mm_per_min": self.travel_feed_mm_per_min,
            "infill_spacing_mm": self.infill_spacing_mm,
        }
        for name, value in numeric.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if any(c <= 0 for c in self.bed_size_mm):
            raise ValueError(f"bed_size_mm must be positive, got {self.bed_size_mm}")
        if not self.layer_height_mm < self.line_width_mm * 2:
            raise ValueError(
                f"layer height {self.layer_height_mm} must be < 2x line width {self.line_width_mm}"
            )
        object.__setattr__(self, "bed_size_mm", tuple(float(c) for c in self.bed_size_mm))


@dataclass(frozen=True)
class LayerContours:
    z_mm: float
    loops: tuple[tuple[Point2, ...], ...]  # each closed: first point repeated last

    def __post_init__(self):
        for loop in self.loops:
            if len(loop) < 4:
                raise ValueError(f"loop with {len(loop)} points cannot be closed")
            dx = loop[0][0] - loop[-1][0]
            dy = loop[0][1] - loop[-1][1]
            if math.hypot(dx, dy) > SNAP_TOLERANCE_MM:
                raise ValueError(f"loop endpoints {loop[0]} / {loop[-1]} do not coincide")


def polygon_signed_area(points) -> float:
    """Shoelace area; accepts open or closed point sequences."""
    pts = list(points)
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        area += x0 * y1 - x1 * y0
    return area / 2.0


def _snap_key(p: Point2) -> tuple[int, int]:
    return (round(p[0] / SNAP_TOLERANCE_MM), round(p[1] / SNAP_TOLERANCE_MM))


def _stitch_loops(segments: list[tuple[Point2, Point2]], z: float) -> list[tuple[Point2, ...]]:
    """Chain oriented segments end-to-start into closed loops.

    Raises OpenContour when a chain cannot continue or close; that means the
    upstream geometry broke an invariant (the mesh is watertight, so every
    cross-section boundary must close).
    """
    by_start: dict[tuple[int, int], list[int]] = {}
    for i, (p, _q) in enumerate(segments):
        by_start.setdefault(_snap_key(p), []).append(i)
    for bucket in by_start.values():
        bucket.sort(key=lambda i: segments[i])

    used = [False] * len(segments)
    loops: list[tuple[Point2, ...]] = []
    # deterministic walk order: start from the smallest snapped start key
    order = sorted(range(len(segments)), key=lambda i: _snap_key(segments[i][0]))
    for start_idx in order:
        if used[start_idx]:
            continue
        chain = [segments[start_idx][0], segments[start_idx][1]]
        used[start_idx] = True
        start_key = _snap_key(chain[0])
        guard = 0
        while _snap_key(chain[-1]) != start_key:
            guard += 1
            if guard > len(segments) + 1:
                raise OpenContour(f"layer z={z:g}: loop walk did not terminate")
            candidates = [i for i in by_start.get(_snap_key(chain[-1]), []) if not used[i]]
            if not candidates:
                raise OpenContour(f"layer z={z:g}: open chain at {chain[-1]}")
            nxt = candidates[0]
            used[nxt] = True
            chain.append(segments[nxt][1])
        chain[-1] = chain[0]  # close exactly
        distinct = {(x, y) for x, y in chain[:-1]}
        if len(distinct) >= 3:
            loops.append(_canonical_rotation(chain))
    return loops


def _canonical_rotation(closed_loop: list[Point2]) -> tuple[Point2, ...]:
    """Rotate a closed loop so the lexicographically smallest point comes first."""
    body = closed_loop[:-1]
    k = min(range(len(body)), key=lambda i: body[i])
    rotated = body[k:] + body[:k]
    return tuple(rotated + [rotated[0]])


def slice_mesh(mesh: TriangleMesh, profile: PrinterProfile) -> list[LayerContours]:
    """Cut the mesh into per-layer closed contours, outer loops first.

    Planes sit at z_min + layer_height/2 + k*layer_height for k = 0.. while
    the plane stays below z_max. Loop orientation follows the material-on-left
    convention (outer loops CCW, holes CW when seen from +Z).
    """
    report = validate_mesh(mesh)
    if not report.watertight or not report.oriented_consistently or report.signed_volume_mm3 <= 0:
        kinds = sorted({d.kind for d in report.defects})
        raise NotWatertight(
            f"slicing needs a watertight outward-oriented mesh; defects: {kinds or 'none'}, "
            f"signed volume {report.signed_volume_mm3:g} mm^3"
        )

    box = bounding_box(mesh)
    z_min, z_max = box.min[2], box.max[2]
    half = profile.layer_height_mm / 2.0

    verts = mesh.vertex_array()
    faces = mesh.face_array()
    face_z = verts[faces, 2]
    f_lo = face_z.min(axis=1)
    f_hi = face_z.max(axis=1)
    # per-face XY normals fix segment orientation (z_hat x normal points
    # along the boundary with material on the left)
    a, b, c = verts[faces[:, 0]], verts[faces[:, 1]], verts[faces[:, 2]]
    normals = np.cross(b - a, c - a)

    layers: list[LayerContours] = []
    k = 0
    while True:
        z0 = z_min + half + k * profile.layer_height_mm
        if z0 >= z_max:
            break
        layers.append(_slice_plane(mesh, verts, faces, normals, f_lo, f_hi, z0))
        k += 1
    return layers


def _slice_plane(mesh, verts, faces, normals, f_lo, f_hi, z0: float) -> LayerContours:
    d = verts[:, 2] - z0
    d = np.where(np.abs(d) < COPLANAR_EPS_MM, COPLANAR_NUDGE_MM, d)

    crossing = np.nonzero((f_lo <= z0) & (f_hi >= z0))[0]
    cache: dict[tuple[int, int], Point2] = {}
    segments: list[tuple[Point2, Point2]] = []

    for fi in crossing:
        ia, ib, ic = (int(v) for v in faces[fi])
        pts: list[Point2] = []
        for u, w in ((ia, ib), (ib, ic), (ic, ia)):
            du, dw = d[u], d[w]
            if (du > 0) == (dw > 0):
                continue
            lo, hi = (u, w) if u < w else (w, u)
            key = (lo, hi)
            p = cache.get(key)
            if p is None:
                t = d[lo] / (d[lo] - d[hi])
                p = (
                    float(verts[lo, 0] + t * (verts[hi, 0] - verts[lo, 0])),
                    float(verts[lo, 1] + t * (verts[hi, 1] - verts[lo, 1])),
                )
                cache[key] = p
            pts.append(p)
        if len(pts) != 2:
            continue
        p, q = pts
        seg = (q[0] - p[0], q[1] - p[1])
        if math.hypot(*seg) < 1e-9:
            continue
        direction = (-float(normals[fi, 1]), float(normals[fi, 0]))
        if seg[0] * direction[0] + seg[1] * direction[1] < 0:
            p, q = q, p
        segments.append((p, q))

    loops = _stitch_loops(segments, z0)
    loops.sort(key=lambda lp: (-polygon_signed_area(lp), lp[0]))
    return LayerContours(z_mm=z0, loops=tuple(loops))


def _rotate_points(points, angle_deg: float, inverse: bool = False):
    """Rotate 2D points about the origin; right angles are exact."""
    quarter = round(angle_deg / 90.0)
    if math.isclose(angle_deg, quarter * 90.0, abs_tol=1e-12):
        q = (-quarter if inverse else quarter) % 4
        if q == 0:
            return [(x, y) for x, y in points]
        if q == 1:
            return [(-y, x) for x, y in points]
        if q == 2:
            return [(-x, -y) for x, y in points]
        return [(y, -x) for x, y in points]
    theta = math.radians(-angle_deg if inverse else angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return [(x * cos_t - y * sin_t, x * sin_t + y * cos_t) for x, y in points]


def generate_infill(
    layer: LayerContours, spacing_mm: float, angle_deg: float = 0.0
) -> list[tuple[Point2, ...]]:
    """Rectilinear infill: parallel lines clipped to the loops via even-odd rule.

    Scanlines start half a spacing above the rotated bounding box minimum.
    Output polylines alternate direction (serpentine) and every segment lies
    inside the contour region.
    """
    if spacing_mm <= 0:
        raise ValueError(f"infill spacing must be positive, got {spacing_mm}")
    if not layer.loops:
        return []

    rotated_loops = [_rotate_points(loop, angle_deg, inverse=True) for loop in layer.loops]
    ys = [p[1] for loop in rotated_loops for p in loop]
    y_lo, y_hi = min(ys), max(ys)

    polylines: list[tuple[Point2, ...]] = []
    row = 0
    y = y_lo + spacing_mm / 2.0
    while y < y_hi:
        xs: list[float] = []
        for loop in rotated_loops:
            for (x0, y0), (x1, y1) in zip(loop, loop[1:]):
                # half-open rule keeps the crossing count even at vertices
                if (y0 <= y < y1) or (y1 <= y < y0):
                    xs.append(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
        xs.sort()
        spans = list(zip(xs[0::2], xs[1::2]))
        if row % 2:
            spans = [(x1, x0) for x0, x1 in reversed(spans)]
        for x0, x1 in spans:
            if abs(x1 - x0) > 1e-9:
                seg = _rotate_points([(x0, y), (x1, y)], angle_deg)
                polylines.append(tuple(seg))
        row += 1
        y = y_lo + spacing_mm / 2.0 + row * spacing_mm
    return polylines


def point_in_loops(point: Point2, loops) -> bool:
    """Even-odd point-in-region test over a set of closed loops."""
    x, y = point
    inside = False
    for loop in loops:
        for (x0, y0), (x1, y1) in zip(loop, loop[1:]):
            if (y0 <= y < y1) or (y1 <= y < y0):
                if x < x0 + (y - y0) * (x1 - x0) / (y1 - y0):
                    inside = not inside
    return inside
