"""Virtual closures of linkoid diagrams and their inverse (arc excision).

Two closure routes are provided:

* :func:`gauss_closure` joins strands at the level of Gauss codes. Closure
  arcs only ever produce virtual crossings, which a Gauss code does not
  record, so this is all the state sums need.
* :func:`virtual_closure` inserts real arcs into the rotation system. Each arc
  from endpoint ``i`` to ``sigma(i)`` follows a shortest path in the dual
  graph of the current arrangement; every edge it crosses becomes a virtual
  crossing. This route gives height bounds and the ribbon-graph genus.

Traversal convention (shared by both routes so their Gauss codes agree): a
closed component starts at the foot of its lowest-numbered strand and walks
forward; on reaching label ``j`` it continues at ``sigma(j)``, walking the
next strand backwards when ``sigma(j)`` is a head.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .diagram import (
    CLASSICAL,
    ENDPOINT,
    JOINT,
    VIRTUAL,
    Dart,
    GaussCode,
    GaussPassage,
    GaussStrand,
    PlanarDiagram,
    Vertex,
    _require_valid,
    build,
    serialize,
    strand_permutation,
    to_gauss,
    with_computed_signs,
)
from .errors import ClosedComponent, InvalidDiagram, NoExcisableArc, SizeMismatch
from .involution import Involution

__all__ = [
    "ClosedVirtualDiagram",
    "gauss_closure",
    "virtual_closure",
    "strand_closure",
    "reduce_virtual",
    "is_link_type",
    "excise_virtual",
    "canonical_closed_code",
    "source_id",
    "EXHAUSTIVE_ORDER_LIMIT",
]

EXHAUSTIVE_ORDER_LIMIT = 4
"""Up to this many strands every arc insertion order is tried."""


def source_id(d: PlanarDiagram) -> str:
    """Short content hash identifying a source linkoid."""
    return hashlib.sha1(serialize(d).encode()).hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class ClosedVirtualDiagram:
    """A virtual closure together with where it came from.

    Attributes:
        base: Closed diagram (joints mark the former endpoints).
        sigma: Closure permutation used, or ``None`` for a diagram that was
            closed to begin with.
        source: The linkoid that was closed, if known.
    """

    base: PlanarDiagram
    sigma: Involution | None = None
    source: PlanarDiagram | None = None

    @property
    def virtual_count(self) -> int:
        return self.base.virtual_count

    @property
    def classical_count(self) -> int:
        return self.base.classical_count

    @property
    def component_count(self) -> int:
        return len(self.base.strands)

    @cached_property
    def provenance(self) -> dict[str, str | None]:
        return {
            "source": source_id(self.source) if self.source is not None else None,
            "sigma": str(self.sigma) if self.sigma is not None else None,
        }

    def gauss(self) -> GaussCode:
        return to_gauss(self.base)

    def serialize(self) -> str:
        return serialize(self.base, {"provenance": self.provenance})


# ---------------------------------------------------------------------------
# Gauss-level closure
# ---------------------------------------------------------------------------


def _closure_walks(tau_pairs: Sequence[tuple[int, int]], sigma: Involution) -> list[list[tuple[int, bool]]]:
    """Order in which strands are traversed, as ``(strand index, reversed)``."""
    where: dict[int, tuple[int, bool]] = {}
    for k, (foot, head) in enumerate(tau_pairs):
        where[foot] = (k, False)
        where[head] = (k, True)
    seen = [False] * len(tau_pairs)
    walks = []
    for k, (foot, _) in enumerate(tau_pairs):
        if seen[k]:
            continue
        walk = []
        label = foot
        while True:
            index, at_head = where[label]
            seen[index] = True
            walk.append((index, at_head))
            f, h = tau_pairs[index]
            exit_label = f if at_head else h
            label = sigma(exit_label)
            if label == foot:
                break
        walks.append(walk)
    return walks


def gauss_closure(g: GaussCode, sigma: Involution) -> GaussCode:
    """Close an open Gauss code by identifying endpoint ``i`` with ``sigma(i)``.

    Signs are recomputed: a crossing changes sign exactly when one of its two
    strands is traversed against its orientation.

    Raises:
        InvalidDiagram: If ``g`` is malformed.
        ClosedComponent: If ``g`` has closed strands.
        SizeMismatch: If ``sigma`` acts on a different number of labels.
    """
    problems = g.violations()
    if problems:
        raise InvalidDiagram(problems)
    if any(s.closed for s in g.strands):
        raise ClosedComponent("gauss_closure needs open strands")
    open_strands = list(g.strands)
    if sigma.size != 2 * len(open_strands):
        raise SizeMismatch(f"sigma acts on {sigma.size} labels, code has {2 * len(open_strands)} endpoints")
    walks = _closure_walks([(s.foot, s.head) for s in open_strands], sigma)
    reversed_flag = {}
    for walk in walks:
        for index, rev in walk:
            reversed_flag[index] = rev
    owner: dict[tuple[int, bool], int] = {}
    for index, s in enumerate(open_strands):
        for p in s.passages:
            owner[(p.crossing, p.over)] = index
    out = []
    for walk in walks:
        passages: list[GaussPassage] = []
        for index, rev in walk:
            seq = open_strands[index].passages
            for p in reversed(seq) if rev else seq:
                flips = reversed_flag[owner[(p.crossing, True)]] ^ reversed_flag[owner[(p.crossing, False)]]
                passages.append(GaussPassage(p.crossing, p.over, -p.sign if flips else p.sign))
        out.append(GaussStrand(tuple(passages), closed=True))
    return GaussCode(tuple(out))


def canonical_closed_code(g: GaussCode) -> tuple[tuple[str, ...], ...]:
    """Rotation-independent form of a closed Gauss code.

    Each component becomes the lexicographically least rotation of its passage
    tokens; components are sorted. Orientation and crossing ids are kept.
    """
    comps = []
    for s in g.strands:
        if not s.closed:
            raise ClosedComponent("canonical form is defined for closed codes")
        tokens = [str(p) for p in s.passages]
        if not tokens:
            comps.append(())
            continue
        comps.append(min(tuple(tokens[i:] + tokens[:i]) for i in range(len(tokens))))
    return tuple(sorted(comps))


# ---------------------------------------------------------------------------
# mutable map used while routing
# ---------------------------------------------------------------------------


class _Map:
    """Mutable rotation system with placement, used during arc insertion."""

    def __init__(self, d: PlanarDiagram):
        self.vertices: dict[int, Vertex] = dict(d.vertices)
        self.adj: dict[Dart, Dart] = dict(d.adjacency)
        self.placement: dict[int, tuple[Dart, Dart]] = dict(d.effective_placement)
        self.root_vertex = d.root_component
        self.next_id = max(self.vertices) + 1 if self.vertices else 1

    def copy(self) -> _Map:
        other = object.__new__(_Map)
        other.vertices = dict(self.vertices)
        other.adj = dict(self.adj)
        other.placement = dict(self.placement)
        other.root_vertex = self.root_vertex
        other.next_id = self.next_id
        return other

    def degree(self, v: int) -> int:
        return self.vertices[v].degree

    def faces(self) -> tuple[dict[Dart, int], list[list[Dart]]]:
        seen: set[Dart] = set()
        faces = []
        for start in sorted(self.adj):
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                w, t = self.adj[d]
                d = (w, (t - 1) % self.degree(w))
            faces.append(walk)
        face_of = {d: i for i, f in enumerate(faces) for d in f}
        return face_of, faces

    def component_of(self) -> dict[int, int]:
        parent = {v: v for v in self.vertices}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (a, _), (b, _) in self.adj.items():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return {v: find(v) for v in self.vertices}

    def face_classes(self) -> tuple[dict[Dart, int], dict[int, int]]:
        """Face of each dart and the region (face class) of each face.

        Faces of different components are merged into one region when the
        placement puts a component's outer face inside a host face. Region
        ids are the smallest member face id.
        """
        face_of, faces = self.faces()
        parent = list(range(len(faces)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for outer, host in self.placement.values():
            a, b = find(face_of[outer]), find(face_of[host])
            if a != b:
                parent[max(a, b)] = min(a, b)
        region = {i: find(i) for i in range(len(faces))}
        return face_of, region

    def refresh_placement(self) -> None:
        """Drop placement entries made redundant by merged components."""
        comp = self.component_of()
        root = comp[self.root_vertex]
        kept: dict[int, tuple[Dart, Dart]] = {}
        for key in sorted(self.placement):
            outer, host = self.placement[key]
            c = comp[outer[0]]
            if c == root or comp[host[0]] == c or c in kept:
                continue
            kept[c] = (outer, host)
        self.placement = kept

    # arc insertion ------------------------------------------------------------------
    def route(self, start_dart: Dart, target_dart: Dart) -> list[Dart]:
        """Darts crossed by a shortest dual path between two corners."""
        face_of, region = self.face_classes()
        src = region[face_of[start_dart]]
        dst = region[face_of[target_dart]]
        if src == dst:
            return []
        neighbours: dict[int, list[tuple[int, Dart]]] = {}
        for d, partner in self.adj.items():
            a, b = region[face_of[d]], region[face_of[partner]]
            if a != b:
                neighbours.setdefault(a, []).append((b, d))
        dist = {dst: 0}
        queue = deque([dst])
        while queue:
            x = queue.popleft()
            for y, _ in neighbours.get(x, []):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if src not in dist:
            raise InvalidDiagram(["closure arc endpoints lie in disconnected regions"])
        path = []
        here = src
        while here != dst:
            options = [(y, d) for y, d in neighbours[here] if dist.get(y) == dist[here] - 1]
            nxt, dart = min(options)
            path.append(dart)
            here = nxt
        return path

    def insert_arc(self, ei: int, ej: int) -> int:
        """Join endpoint vertices ``ei`` and ``ej``; return virtual crossings added."""
        path = self.route((ei, 0), (ej, 0))
        for e in (ei, ej):
            vert = self.vertices[e]
            self.vertices[e] = Vertex(JOINT, label=vert.label)
        prev: Dart = (ei, 1)
        for d in path:
            u_dart = d
            w_dart = self.adj[d]
            v = self.next_id
            self.next_id += 1
            self.vertices[v] = Vertex(VIRTUAL)
            # slots: 0 toward w, 1 arc in (left of d), 2 toward u, 3 arc out
            self.adj[u_dart] = (v, 2)
            self.adj[(v, 2)] = u_dart
            self.adj[w_dart] = (v, 0)
            self.adj[(v, 0)] = w_dart
            self.adj[prev] = (v, 1)
            self.adj[(v, 1)] = prev
            prev = (v, 3)
        self.adj[prev] = (ej, 1)
        self.adj[(ej, 1)] = prev
        self.refresh_placement()
        return len(path)

    # virtual Reidemeister simplification -------------------------------------------------
    def _is_virtual(self, v: int) -> bool:
        return self.vertices[v].kind == VIRTUAL

    def _connect(self, a: Dart, b: Dart) -> None:
        self.adj[a] = b
        self.adj[b] = a

    def _delete(self, v: int) -> None:
        for s in range(self.degree(v)):
            self.adj.pop((v, s), None)
        del self.vertices[v]

    def try_v1(self) -> bool:
        for v in sorted(self.vertices):
            if not self._is_virtual(v):
                continue
            for s in range(4):
                if self.adj[(v, s)] == (v, (s + 1) % 4):
                    a = self.adj[(v, (s + 2) % 4)]
                    b = self.adj[(v, (s + 3) % 4)]
                    if a[0] == v or b[0] == v:
                        continue
                    self._delete(v)
                    self._connect(a, b)
                    return True
        return False

    def try_v2(self) -> bool:
        _, faces = self.faces()
        for face in faces:
            if len(face) != 2:
                continue
            (v, a), (w, b2) = face
            if v == w or not (self._is_virtual(v) and self._is_virtual(w)):
                continue
            partner = self.adj[(v, a)]
            if partner[0] != w:
                continue
            b = partner[1]
            if self.adj[(w, (b - 1) % 4)] != (v, (a + 1) % 4):
                continue
            outer = [
                self.adj[(v, (a + 2) % 4)],
                self.adj[(w, (b + 2) % 4)],
                self.adj[(v, (a + 3) % 4)],
                self.adj[(w, (b + 1) % 4)],
            ]
            if any(x[0] in (v, w) for x in outer):
                continue
            self._delete(v)
            self._delete(w)
            self._connect(outer[0], outer[1])
            self._connect(outer[2], outer[3])
            return True
        return False

    def simplify(self) -> None:
        while self.try_v1() or self.try_v2():
            pass
        self.refresh_placement()


# ---------------------------------------------------------------------------
# routed closure
# ---------------------------------------------------------------------------


def _closed_starts(d: PlanarDiagram, sigma: Involution, m: _Map) -> list[Dart]:
    """Start passage of every closed component (the foot joint, arc side)."""
    tau_pairs = [(d.vertices[s.foot].label, d.vertices[s.head].label) for s in d.strands]
    walks = _closure_walks(tau_pairs, sigma)
    label_to_vertex = {vert.label: v for v, vert in m.vertices.items() if vert.kind == JOINT}
    return [(label_to_vertex[tau_pairs[walk[0][0]][0]], 1) for walk in walks]


def _route_all(d: PlanarDiagram, sigma: Involution, order: Sequence[tuple[int, int]]) -> tuple[_Map, int]:
    m = _Map(d)
    endpoint = d.endpoint_of_label
    total = 0
    for i, j in order:
        total += m.insert_arc(endpoint[i], endpoint[j])
    return m, total


def _finish(d: PlanarDiagram, sigma: Involution, m: _Map) -> ClosedVirtualDiagram:
    starts = _closed_starts(d, sigma, m)
    base = with_computed_signs(build(m.vertices, m.adj, starts, m.placement))
    return ClosedVirtualDiagram(base, sigma, d)


def virtual_closure(d: PlanarDiagram, sigma: Involution) -> ClosedVirtualDiagram:
    """Close ``d`` by routing an arc from every endpoint ``i`` to ``sigma(i)``.

    Arcs are inserted in ascending order of ``min(i, sigma(i))``. With at most
    four strands every insertion order is tried and the first order achieving
    the fewest virtual crossings is kept.

    Raises:
        InvalidDiagram: If ``d`` is invalid.
        ClosedComponent: If ``d`` has a closed strand.
        SizeMismatch: If ``sigma`` does not act on the endpoint labels of ``d``.
    """
    _require_valid(d)
    if any(s.closed for s in d.strands):
        raise ClosedComponent("virtual_closure needs open strands")
    if sigma.size != 2 * d.n_strands:
        raise SizeMismatch(f"sigma acts on {sigma.size} labels, diagram has {2 * d.n_strands} endpoints")
    pairs = sigma.pairs()
    orders = itertools.permutations(pairs) if len(pairs) <= EXHAUSTIVE_ORDER_LIMIT else [pairs]
    best: tuple[int, _Map] | None = None
    for order in orders:
        m, total = _route_all(d, sigma, order)
        if best is None or total < best[0]:
            best = (total, m)
    assert best is not None
    return _finish(d, sigma, best[1])


def strand_closure(d: PlanarDiagram) -> ClosedVirtualDiagram:
    """The closure with ``sigma = tau``; it has one component per strand."""
    return virtual_closure(d, strand_permutation(d))


def reduce_virtual(c: ClosedVirtualDiagram) -> ClosedVirtualDiagram:
    """Remove virtual crossings by rerouting and virtual Reidemeister moves.

    Arcs are rerouted by :func:`virtual_closure` (all insertion orders up to
    four strands) when the source linkoid is known; then V1 loops and V2
    bigons between virtual crossings are removed until none remain. The
    virtual crossing count never increases and classical crossings are kept.
    """
    base = c.base
    if c.source is not None and c.sigma is not None:
        rerouted = virtual_closure(c.source, c.sigma)
        if rerouted.virtual_count < base.virtual_count:
            base = rerouted.base
    m = _Map(base)
    m.simplify()
    starts = [s.passages[0] for s in base.strands]
    reduced = with_computed_signs(build(m.vertices, m.adj, starts, m.placement))
    if reduced.virtual_count > base.virtual_count:  # pragma: no cover - guarded by construction
        reduced = base
    return ClosedVirtualDiagram(reduced, c.sigma, c.source)


def is_link_type(d: PlanarDiagram, sigma: Involution) -> bool:
    """Diagram-level certificate that the closure needs no virtual crossing.

    ``True`` is a certificate; ``False`` only means this diagram's reduced
    closure still has virtual crossings.
    """
    return reduce_virtual(virtual_closure(d, sigma)).virtual_count == 0


# ---------------------------------------------------------------------------
# excision
# ---------------------------------------------------------------------------


def _suppress_joints(d: PlanarDiagram) -> tuple[dict[int, Vertex], dict[Dart, Dart], list[Dart]]:
    """Remove degree-two joints, returning vertices, adjacency and strand starts."""
    vertices = dict(d.vertices)
    adj = dict(d.adjacency)
    starts = []
    for strand in d.strands:
        start = next((p for p in strand.passages if vertices[p[0]].kind != JOINT), None)
        starts.append(start)
    for v, vert in list(vertices.items()):
        if vert.kind != JOINT:
            continue
        a, b = adj[(v, 0)], adj[(v, 1)]
        del adj[(v, 0)], adj[(v, 1)]
        del vertices[v]
        if a[0] == v:  # a loop through the joint only
            continue
        adj[a] = b
        adj[b] = a
    return vertices, adj, starts


def excise_virtual(v: PlanarDiagram | ClosedVirtualDiagram) -> tuple[PlanarDiagram, Involution | None]:
    """Cut closure arcs out of a closed virtual diagram.

    Every virtual crossing lies on two strand segments running between
    classical crossings. A set of such classical-free segments covering all
    virtual crossings is removed; each removed segment leaves a head endpoint
    ``2k - 1`` after the classical crossing where it began and a foot endpoint
    ``2k`` before the one where it ended, and ``sigma`` pairs them back.

    Returns:
        The linkoid and ``sigma``; ``sigma`` is ``None`` when there was no
        virtual crossing (the diagram is returned unchanged).

    Raises:
        NoExcisableArc: If a virtual crossing lies only on components
            without classical crossings.
    """
    d = v.base if isinstance(v, ClosedVirtualDiagram) else v
    _require_valid(d)
    if not d.is_closed:
        raise ClosedComponent("excise_virtual needs a closed diagram")
    if d.virtual_count == 0:
        return d, None
    vertices, adj, starts = _suppress_joints(d)
    if any(s is None for s in starts):
        raise NoExcisableArc("a component consists of joints only")

    # segments between classical crossings, as lists of passages
    segments = []  # (start dart = exit from classical X, passages in between, end entry dart at Y)
    seen_exit: set[Dart] = set()
    for start in starts:
        w, t = start
        # locate a classical passage on this component
        passages = []
        cur = start
        while True:
            passages.append(cur)
            x, s = cur
            cur = adj[(x, (s + 2) % 4)]
            if cur == start:
                break
        classical_positions = [k for k, (x, _) in enumerate(passages) if vertices[x].kind == CLASSICAL]
        if not classical_positions:
            if any(vertices[x].kind == VIRTUAL for x, _ in passages):
                segments.append(None)
            continue
        k0 = classical_positions[0]
        rotated = passages[k0:] + passages[:k0]
        marks = [k for k, (x, _) in enumerate(rotated) if vertices[x].kind == CLASSICAL] + [len(rotated)]
        for a, b in zip(marks, marks[1:]):
            inner = rotated[a + 1 : b]
            x, s = rotated[a]
            exit_dart = (x, (s + 2) % 4)
            if exit_dart in seen_exit:
                continue
            seen_exit.add(exit_dart)
            end = rotated[b % len(rotated)]
            segments.append((exit_dart, inner, end))

    virtuals = {x for x, vert in vertices.items() if vert.kind == VIRTUAL}
    cover_sets = []
    for seg in segments:
        if seg is None:
            continue
        cover_sets.append((seg, {x for x, _ in seg[1] if x in virtuals}))
    uncovered = set(virtuals)
    chosen = []
    while uncovered:
        best = max(
            ((k, item) for k, item in enumerate(cover_sets) if item[1] & uncovered),
            key=lambda ki: (len(ki[1][1] & uncovered), -ki[0]),
            default=None,
        )
        if best is None:
            raise NoExcisableArc(f"virtual crossings {sorted(uncovered)} lie on no classical-free segment")
        chosen.append(best[1][0])
        uncovered -= best[1][1]

    # remove chosen segments, reconnecting the transversal strands
    next_id = max(vertices) + 1
    new_endpoints = []
    removed_inner: set[int] = set()
    for exit_dart, inner, end in chosen:
        for x, s in inner:
            removed_inner.add(x)
    for exit_dart, inner, end in sorted(chosen, key=lambda c: c[0]):
        head_v, foot_v = next_id, next_id + 1
        next_id += 2
        new_endpoints.append((exit_dart, end, head_v, foot_v))
    # reconnect transversals at every removed virtual crossing
    for exit_dart, inner, end in chosen:
        for x, s in inner:
            if x not in vertices:
                continue
            if x in removed_inner and _both_passages_removed(x, chosen):
                continue
            a = adj[(x, (s + 1) % 4)]
            b = adj[(x, (s + 3) % 4)]
            for slot in range(4):
                adj.pop((x, slot), None)
            del vertices[x]
            adj[a] = b
            adj[b] = a
    for x in [x for x in vertices if x in removed_inner]:
        for slot in range(4):
            adj.pop((x, slot), None)
        del vertices[x]
    labels: dict[int, int] = {}
    for k, (exit_dart, end, head_v, foot_v) in enumerate(new_endpoints, start=1):
        labels[head_v] = 2 * k - 1
        labels[foot_v] = 2 * k
        vertices[head_v] = Vertex(ENDPOINT, label=2 * k - 1)
        vertices[foot_v] = Vertex(ENDPOINT, label=2 * k)
        adj[exit_dart] = (head_v, 0)
        adj[(head_v, 0)] = exit_dart
        adj[end] = (foot_v, 0)
        adj[(foot_v, 0)] = end
    for x, vert in vertices.items():
        if vert.kind == CLASSICAL:
            vertices[x] = Vertex(CLASSICAL, None, None)
    foot_starts = sorted(((labels[foot_v], (foot_v, 0)) for *_, foot_v in new_endpoints))
    covered_vertices = set()
    strand_starts = []
    for _, st in foot_starts:
        strand_starts.append(st)
    # components untouched by cuts stay closed
    probe = build(vertices, adj, strand_starts)
    for strand in probe.strands:
        covered_vertices.update(x for x, _ in strand.passages)
    for start in starts:
        if start is not None and start[0] in vertices and start[0] not in covered_vertices:
            strand_starts.append(start)
            probe2 = build(vertices, adj, [start])
            covered_vertices.update(x for x, _ in probe2.strands[0].passages)
    result = with_computed_signs(build(vertices, adj, strand_starts))
    sigma = Involution.from_pairs([(2 * k - 1, 2 * k) for k in range(1, len(new_endpoints) + 1)])
    if result.violations:
        raise NoExcisableArc("; ".join(result.violations))
    return result, sigma


def _both_passages_removed(x: int, chosen) -> bool:
    hits = 0
    for _, inner, _ in chosen:
        hits += sum(1 for y, _ in inner if y == x)
    return hits >= 2
