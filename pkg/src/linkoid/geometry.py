"""Planar polylines to :class:`~linkoid.diagram.PlanarDiagram`.

This is the combinatorial half of projecting curves: given planar polylines
and a depth for every point of them, find all crossings, reject non-generic
configurations and build the rotation system. The placement of disconnected
components is read off the planar geometry with winding numbers.

The module is shared by :func:`linkoid.curves3d.project` (depth along the
projection direction) and by hand-made drawings (:func:`diagram_from_drawing`,
depth given by per-segment layers).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagram import CLASSICAL, ENDPOINT, Dart, PlanarDiagram, Strand, Vertex
from .errors import IrregularProjection

__all__ = ["Drawing", "diagram_from_polylines", "diagram_from_drawing", "signed_area", "winding_number"]

DepthFn = Callable[[int, int, float], float]


@dataclass
class Drawing:
    """A diagram drawn as planar polylines with crossing layers.

    Attributes:
        curves: One ``(m, 2)`` point list per strand.
        layers: Optional per-curve list of per-segment heights; at a crossing
            the segment with the larger layer passes over. Defaults to 0.
        labels: ``(foot, head)`` per curve; defaults to ``(2i-1, 2i)``.
    """

    curves: Sequence[Sequence[Sequence[float]]]
    layers: Sequence[Sequence[float]] | None = None
    labels: Sequence[tuple[int, int]] | None = None


def signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def winding_number(point: np.ndarray, poly: np.ndarray) -> int:
    """Winding number of a closed polygon (vertex list) around ``point``."""
    px, py = float(point[0]), float(point[1])
    wn = 0
    m = len(poly)
    for k in range(m):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % m]
        is_left = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        if y0 <= py:
            if y1 > py and is_left > 0:
                wn += 1
        elif y1 <= py and is_left < 0:
            wn -= 1
    return wn


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``p`` (k, 2) to segments ``a -> b`` (s, 2) as (k, s)."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    ap = p[:, None, :] - a[None, :, :]
    t = np.einsum("ksj,sj->ks", ap, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * ab[None, :, :]
    return np.linalg.norm(p[:, None, :] - closest, axis=-1)


def diagram_from_polylines(
    curves: Sequence[np.ndarray],
    depth: DepthFn,
    labels: Sequence[tuple[int, int]],
    eps: float,
    eps_angle: float,
    point_keys: Sequence[Sequence[tuple]] | None = None,
    with_geometry: bool = False,
) -> PlanarDiagram | tuple[PlanarDiagram, dict[Dart, np.ndarray]]:
    """Build a linkoid diagram from planar polylines.

    Args:
        curves: Planar point arrays, one per strand (at least 2 points each).
        depth: ``depth(curve, segment, s)`` at parameter ``s`` in [0, 1]; the
            larger value passes over.
        labels: ``(foot, head)`` label per curve.
        eps: Distance tolerance for genericity checks.
        eps_angle: Smallest admissible crossing angle (radians).
        point_keys: Optional identity key per point; segments whose end
            points share a key are treated as adjacent (closed curves).
        with_geometry: Also return the polyline of every dart.

    Raises:
        IrregularProjection: Naming the first non-generic feature found.
    """
    seg_curve, seg_index, seg_a, seg_b = [], [], [], []
    for ci, pts in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        if len(pts) < 2:
            raise IrregularProjection("short curve", f"curve {ci} has fewer than 2 points")
        for j in range(len(pts) - 1):
            seg_curve.append(ci)
            seg_index.append(j)
            seg_a.append(pts[j])
            seg_b.append(pts[j + 1])
    sc = np.array(seg_curve)
    sj = np.array(seg_index)
    A = np.array(seg_a, dtype=float).reshape(-1, 2)
    B = np.array(seg_b, dtype=float).reshape(-1, 2)
    D = B - A
    L = np.linalg.norm(D, axis=1)
    S = len(A)
    short = np.nonzero(L < eps)[0]
    if len(short):
        k = int(short[0])
        raise IrregularProjection("degenerate segment", f"curve {sc[k]} segment {sj[k]} projects to a point")

    # keys of segment end points for adjacency exclusions
    if point_keys is None:
        point_keys = [[(ci, j) for j in range(len(c))] for ci, c in enumerate(curves)]
    key_a = [point_keys[sc[k]][sj[k]] for k in range(S)]
    key_b = [point_keys[sc[k]][sj[k] + 1] for k in range(S)]
    key_id: dict = {}
    ka = np.array([key_id.setdefault(k, len(key_id)) for k in key_a])
    kb = np.array([key_id.setdefault(k, len(key_id)) for k in key_b])
    share = (ka[:, None] == ka[None, :]) | (ka[:, None] == kb[None, :])
    share |= (kb[:, None] == ka[None, :]) | (kb[:, None] == kb[None, :])
    consecutive = (sc[:, None] == sc[None, :]) & (np.abs(sj[:, None] - sj[None, :]) <= 1)
    excluded = share | consecutive
    upper = np.triu(np.ones((S, S), dtype=bool), k=1)
    candidate = upper & ~excluded

    R = A[None, :, :] - A[:, None, :]
    denom = D[:, None, 0] * D[None, :, 1] - D[:, None, 1] * D[None, :, 0]
    sin_angle = np.abs(denom) / (L[:, None] * L[None, :])
    safe = np.where(denom == 0, 1.0, denom)
    s_par = (R[..., 0] * D[None, :, 1] - R[..., 1] * D[None, :, 0]) / safe
    t_par = (R[..., 0] * D[:, None, 1] - R[..., 1] * D[:, None, 0]) / safe
    di = (eps / L)[:, None]
    dj = (eps / L)[None, :]
    parallel = sin_angle < eps_angle
    near = (s_par > -di) & (s_par < 1 + di) & (t_par > -dj) & (t_par < 1 + dj)
    interior = (s_par > di) & (s_par < 1 - di) & (t_par > dj) & (t_par < 1 - dj)

    hits = candidate & ~parallel & near
    bad = hits & ~interior
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise IrregularProjection(
            "crossing near a vertex", f"segments ({sc[i]},{sj[i]}) and ({sc[j]},{sj[j]})"
        )
    shallow = candidate & parallel & (denom != 0) & near
    if shallow.any():
        i, j = map(int, np.argwhere(shallow)[0])
        raise IrregularProjection("small crossing angle", f"segments ({sc[i]},{sj[i]}) and ({sc[j]},{sj[j]})")
    par_pairs = np.argwhere(candidate & parallel)
    for i, j in par_pairs:
        pts = np.array([A[i], B[i]])
        d1 = _point_segment_distance(pts, A[j : j + 1], B[j : j + 1]).min()
        pts = np.array([A[j], B[j]])
        d2 = _point_segment_distance(pts, A[i : i + 1], B[i : i + 1]).min()
        if min(d1, d2) < eps:
            raise IrregularProjection("parallel overlap", f"segments ({sc[i]},{sj[i]}) and ({sc[j]},{sj[j]})")
    crossing_pairs = np.argwhere(hits)

    # endpoints near other strands
    ends = []
    for ci, pts in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        ends.append((ci, 0, pts[0]))
        ends.append((ci, len(pts) - 1, pts[-1]))
    end_pts = np.array([e[2] for e in ends])
    dist = _point_segment_distance(end_pts, A, B)
    for e, (ci, j, _) in enumerate(ends):
        key = point_keys[ci][j]
        kid = key_id.get(key)
        incident = (ka == kid) | (kb == kid) if kid is not None else np.zeros(S, dtype=bool)
        own = (sc == ci) & (sj == (0 if j == 0 else j - 1))
        mask = ~(incident | own)
        if np.any(dist[e][mask] < eps):
            raise IrregularProjection("endpoint near a strand", f"endpoint of curve {ci}")
    for e1 in range(len(ends)):
        for e2 in range(e1 + 1, len(ends)):
            k1 = point_keys[ends[e1][0]][ends[e1][1]]
            k2 = point_keys[ends[e2][0]][ends[e2][1]]
            if k1 != k2 and np.linalg.norm(end_pts[e1] - end_pts[e2]) < eps:
                raise IrregularProjection("coincident endpoints", f"curves {ends[e1][0]} and {ends[e2][0]}")

    # collect crossings
    raw = []
    for i, j in crossing_pairs:
        i, j = int(i), int(j)
        s, t = float(s_par[i, j]), float(t_par[i, j])
        zi, zj = depth(int(sc[i]), int(sj[i]), s), depth(int(sc[j]), int(sj[j]), t)
        if abs(zi - zj) < eps:
            raise IrregularProjection("depth tie", f"curves meet at segments ({sc[i]},{sj[i]}) and ({sc[j]},{sj[j]})")
        point = A[i] + s * D[i]
        raw.append((i, s, j, t, zi > zj, point))
    pts_x = np.array([r[5] for r in raw]).reshape(-1, 2)
    if len(pts_x) > 1:
        gaps = np.linalg.norm(pts_x[:, None, :] - pts_x[None, :, :], axis=-1)
        gaps[np.diag_indices(len(pts_x))] = np.inf
        if gaps.min() < eps:
            raise IrregularProjection("close crossings", "two crossings within eps")

    # events along each segment; crossing ids by first encounter
    events: dict[int, list[tuple[float, int, bool]]] = {}
    for idx, (i, s, j, t, i_over, _) in enumerate(raw):
        events.setdefault(i, []).append((s, idx, i_over))
        events.setdefault(j, []).append((t, idx, not i_over))
    order = sorted(events)
    first_seen: dict[int, int] = {}
    for seg in order:
        for s, idx, _ in sorted(events[seg]):
            first_seen.setdefault(idx, len(first_seen) + 1)
    c = len(raw)
    cid = {idx: first_seen[idx] for idx in range(c)}

    vertices: dict[int, Vertex] = {}
    entry_slots: dict[tuple[int, int], int] = {}
    for idx, (i, s, j, t, i_over, _) in enumerate(raw):
        o, u = (i, j) if i_over else (j, i)
        cross = D[o, 0] * D[u, 1] - D[o, 1] * D[u, 0]
        sign = 1 if cross > 0 else -1
        vertices[cid[idx]] = Vertex(CLASSICAL, sign)
        entry_slots[(idx, o)] = 0
        entry_slots[(idx, u)] = 1 if sign > 0 else 3

    strands = []
    geometry: dict[Dart, np.ndarray] = {}
    seg_base = 0
    for ci, pts in enumerate(curves):
        pts = np.asarray(pts, dtype=float)
        foot_label, head_label = labels[ci]
        foot, head = c + foot_label, c + head_label
        vertices[foot] = Vertex(ENDPOINT, label=foot_label)
        vertices[head] = Vertex(ENDPOINT, label=head_label)
        passages: list[Dart] = [(foot, 0)]
        nodes = [(foot, 0, 0)]  # (vertex, entry slot, exit slot)
        polylines: list[list[np.ndarray]] = [[pts[0]]]
        for j in range(len(pts) - 1):
            seg = seg_base + j
            for s, idx, _ in sorted(events.get(seg, [])):
                point = A[seg] + s * D[seg]
                polylines[-1].append(point)
                entry = entry_slots[(idx, seg)]
                v = cid[idx]
                passages.append((v, entry))
                nodes.append((v, entry, (entry + 2) % 4))
                polylines.append([point])
            polylines[-1].append(pts[j + 1])
        passages.append((head, 0))
        nodes.append((head, 0, 0))
        strands.append(Strand(tuple(passages)))
        for k in range(len(nodes) - 1):
            line = np.array(polylines[k])
            geometry[(nodes[k][0], nodes[k][2])] = line
            geometry[(nodes[k + 1][0], nodes[k + 1][1])] = line[::-1]
        seg_base += len(pts) - 1

    d = PlanarDiagram(vertices, tuple(strands))
    if len(d.components) > 1:
        d = PlanarDiagram(d.vertices, d.strands, placement_from_geometry(d, geometry))
    return (d, geometry) if with_geometry else d


def placement_from_geometry(d: PlanarDiagram, geometry: dict[Dart, np.ndarray]) -> dict[int, tuple[Dart, Dart]]:
    """Placement of every component read off planar coordinates.

    The outer face of a component is its face of smallest signed area (faces
    are traced with the face on the left, so bounded faces are
    counterclockwise). A component lies in the smallest bounded face of
    another component whose boundary winds around it; top-level components
    other than the root lie in the root's outer face.
    """
    faces = d.faces
    polys = []
    for face in faces:
        pieces = [geometry[dart][:-1] for dart in face]
        polys.append(np.concatenate(pieces) if pieces else np.zeros((0, 2)))
    areas = [signed_area(p) if len(p) >= 3 else 0.0 for p in polys]
    comps = [min(c) for c in d.components]
    comp_faces: dict[int, list[int]] = {c: [] for c in comps}
    for i, face in enumerate(faces):
        comp_faces[d.component_of[face[0][0]]].append(i)
    outer = {c: min(comp_faces[c], key=lambda i: (areas[i], i)) for c in comps}
    containers: dict[int, tuple[float, int] | None] = {}
    for c in comps:
        probe = geometry[faces[comp_faces[c][0]][0]][0]
        best: tuple[float, int] | None = None
        for other in comps:
            if other == c:
                continue
            for i in comp_faces[other]:
                if i == outer[other] or areas[i] <= 0:
                    continue
                if winding_number(probe, polys[i]) != 0 and (best is None or areas[i] < best[0]):
                    best = (areas[i], i)
        containers[c] = best
    top = [c for c in comps if containers[c] is None]
    root = top[0]
    placement = {}
    for c in comps:
        if c == root:
            continue
        host_face = outer[root] if containers[c] is None else containers[c][1]
        placement[c] = (min(faces[outer[c]]), min(faces[host_face]))
    return placement


def diagram_from_drawing(drawing: Drawing, eps: float = 1e-9, eps_angle: float = 1e-9) -> PlanarDiagram:
    """Diagram of a planar drawing whose crossings are decided by layers."""
    curves = [np.asarray(c, dtype=float) for c in drawing.curves]
    layers = drawing.layers or [[0.0] * (len(c) - 1) for c in curves]
    labels = drawing.labels or [(2 * i + 1, 2 * i + 2) for i in range(len(curves))]
    keys = [[tuple(np.round(p, 12)) for p in c] for c in curves]

    def depth(ci: int, j: int, s: float) -> float:
        return float(layers[ci][j])

    return diagram_from_polylines(curves, depth, labels, eps, eps_angle, point_keys=keys)
