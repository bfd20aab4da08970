"""Planar linkoid diagrams and their Gauss codes.

A :class:`PlanarDiagram` is a combinatorial map on the sphere. Each vertex has
numbered *slots* arranged counterclockwise:

* classical crossings have four slots; the over strand uses slots 0 and 2,
* virtual crossings have four slots,
* endpoints have one slot,
* joints have two slots. A joint is a former endpoint where a closure arc
  (slot 1) meets the strand (slot 0).

A strand is a sequence of *passages*. For an open strand the first passage is
``(foot, 0)`` and the last is ``(head, 0)``; every other passage is the pair
``(vertex, entry slot)`` and the strand leaves through the opposite slot. A
closed strand lists entry passages only and wraps around.

A *dart* ``(v, s)`` is the edge-end leaving ``v`` through slot ``s``. Faces
are traced by following a dart to its partner ``(w, t)`` and leaving ``w``
through slot ``t - 1``, which keeps the face on the left.

Disconnected diagrams carry a *placement*: for every non-root connected
component, a dart on the face of that component which faces outward, and a
dart (on another component) whose face contains it.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

from .errors import ClosedComponent, InvalidDiagram, ParseError
from .involution import Involution

__all__ = [
    "CLASSICAL",
    "VIRTUAL",
    "ENDPOINT",
    "JOINT",
    "DEGREE",
    "Dart",
    "Vertex",
    "Strand",
    "PlanarDiagram",
    "GaussPassage",
    "GaussStrand",
    "GaussCode",
    "validate",
    "to_gauss",
    "parse",
    "serialize",
    "normalize",
    "load",
    "dump",
    "strand_permutation",
    "walk_strand",
    "crossing_sign",
    "switch_crossings",
    "relabel_vertices",
    "with_computed_signs",
    "from_gauss",
]

CLASSICAL = "classical"
VIRTUAL = "virtual"
ENDPOINT = "endpoint"
JOINT = "joint"
DEGREE = {CLASSICAL: 4, VIRTUAL: 4, ENDPOINT: 1, JOINT: 2}

Dart = tuple[int, int]


@dataclass(frozen=True)
class Vertex:
    """A diagram vertex.

    Attributes:
        kind: One of ``classical``, ``virtual``, ``endpoint`` or ``joint``.
        sign: Declared crossing sign (classical only, optional).
        label: Endpoint label in ``1..2n`` (endpoints and joints).
    """

    kind: str
    sign: int | None = None
    label: int | None = None

    @property
    def degree(self) -> int:
        return DEGREE[self.kind]


@dataclass(frozen=True)
class Strand:
    """One strand as a tuple of ``(vertex, slot)`` passages."""

    passages: tuple[Dart, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "passages", tuple((int(v), int(s)) for v, s in self.passages))

    @property
    def foot(self) -> int | None:
        return None if self.closed else self.passages[0][0]

    @property
    def head(self) -> int | None:
        return None if self.closed else self.passages[-1][0]


def crossing_sign(over_entry: int, under_entry: int) -> int:
    """Sign of a classical crossing from the entry slots of its two strands.

    The crossing is positive when the under strand enters one slot
    counterclockwise after the over strand, i.e. when (over direction, under
    direction) is a positively oriented frame.
    """
    return 1 if (under_entry - over_entry) % 4 == 1 else -1


def walk_strand(vertices: Mapping[int, Vertex], adjacency: Mapping[Dart, Dart], start: Dart) -> tuple[list[Dart], bool]:
    """Follow a strand through an adjacency map, going straight at each vertex.

    Args:
        vertices: Vertex table (for degrees).
        adjacency: Dart partner map.
        start: Either ``(endpoint, 0)`` to walk an open strand from its foot,
            or an entry passage ``(v, s)`` of a closed strand.

    Returns:
        The passage list in strand format and whether the strand is closed.
    """
    v0, s0 = start
    if vertices[v0].kind == ENDPOINT:
        passages = [start]
        current = adjacency[start]
        while True:
            passages.append(current)
            w, t = current
            if vertices[w].kind == ENDPOINT:
                return passages, False
            deg = vertices[w].degree
            current = adjacency[(w, (t + deg // 2) % deg)]
            if len(passages) > 4 * len(adjacency) + 4:
                raise InvalidDiagram(["strand walk does not terminate"])
    passages = []
    current = start
    while True:
        passages.append(current)
        w, t = current
        deg = vertices[w].degree
        current = adjacency[(w, (t + deg // 2) % deg)]
        if current == start:
            return passages, True
        if vertices[current[0]].kind == ENDPOINT or len(passages) > 4 * len(adjacency) + 4:
            raise InvalidDiagram(["closed strand walk reached an endpoint"])


@dataclass(frozen=True, eq=False)
class PlanarDiagram:
    """Embedded linkoid (or closed virtual) diagram.

    Args:
        vertices: Map from vertex id to :class:`Vertex`.
        strands: Strands in user order.
        placement: Map from a component's smallest vertex id to
            ``(outer_dart, host_dart)``; missing components are placed in the
            outer face of the root component.
    """

    vertices: Mapping[int, Vertex]
    strands: tuple[Strand, ...]
    placement: Mapping[int, tuple[Dart, Dart]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", {int(k): v for k, v in sorted(self.vertices.items())})
        object.__setattr__(self, "strands", tuple(self.strands))
        object.__setattr__(
            self,
            "placement",
            {int(k): (tuple(o), tuple(h)) for k, (o, h) in sorted(self.placement.items())},
        )

    # equality ---------------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlanarDiagram):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.strands == other.strands
            and dict(self.placement) == dict(other.placement)
        )

    def __hash__(self) -> int:
        return hash((tuple(self.vertices.items()), self.strands))

    # derived structure ----------------------------------------------------------------
    @cached_property
    def _derived(self) -> tuple[dict[Dart, Dart], list[str]]:
        """Adjacency implied by the strands, with any structural problems found."""
        problems: list[str] = []
        adjacency: dict[Dart, Dart] = {}

        def link(a: Dart, b: Dart) -> None:
            for d in (a, b):
                if d in adjacency:
                    problems.append(f"slot {d[1]} of vertex {d[0]} used twice")
            adjacency[a] = b
            adjacency[b] = a

        for index, strand in enumerate(self.strands):
            ps = strand.passages
            for v, s in ps:
                if v not in self.vertices:
                    problems.append(f"strand {index} passes unknown vertex {v}")
                    return adjacency, problems
                if not 0 <= s < self.vertices[v].degree:
                    problems.append(f"strand {index} uses slot {s} of vertex {v} (degree {self.vertices[v].degree})")
                    return adjacency, problems
            if strand.closed:
                if not ps:
                    problems.append(f"closed strand {index} has no passages")
                    continue
                for (v, s), nxt in zip(ps, ps[1:] + ps[:1]):
                    if self.vertices[v].kind == ENDPOINT:
                        problems.append(f"closed strand {index} passes endpoint {v}")
                        continue
                    deg = self.vertices[v].degree
                    link((v, (s + deg // 2) % deg), nxt)
            else:
                if len(ps) < 2:
                    problems.append(f"open strand {index} needs a foot and a head")
                    continue
                if self.vertices[ps[0][0]].kind != ENDPOINT or self.vertices[ps[-1][0]].kind != ENDPOINT:
                    problems.append(f"open strand {index} must start and end at endpoints")
                for k in range(len(ps) - 1):
                    v, s = ps[k]
                    if k == 0:
                        exit_slot = s
                    else:
                        kind = self.vertices[v].kind
                        if kind == ENDPOINT:
                            problems.append(f"open strand {index} passes endpoint {v} in its interior")
                            continue
                        deg = self.vertices[v].degree
                        exit_slot = (s + deg // 2) % deg
                    link((v, exit_slot), ps[k + 1])
        for v, vert in self.vertices.items():
            for s in range(vert.degree):
                if (v, s) not in adjacency:
                    problems.append(f"slot {s} of vertex {v} is not connected")
        return adjacency, problems

    @property
    def adjacency(self) -> dict[Dart, Dart]:
        """Map from each dart to the dart at the other end of its edge."""
        return self._derived[0]

    @cached_property
    def passages_at(self) -> dict[int, list[tuple[int, int, int]]]:
        """For each vertex, the ``(strand index, position, entry slot)`` visits."""
        out: dict[int, list[tuple[int, int, int]]] = {v: [] for v in self.vertices}
        for index, strand in enumerate(self.strands):
            for pos, (v, s) in enumerate(strand.passages):
                if v in out:
                    out[v].append((index, pos, s))
        return out

    @cached_property
    def signs(self) -> dict[int, int]:
        """Crossing signs computed from the rotation and strand orientations."""
        out: dict[int, int] = {}
        for v, vert in self.vertices.items():
            if vert.kind != CLASSICAL:
                continue
            visits = self.passages_at[v]
            over = [s for _, _, s in visits if s % 2 == 0]
            under = [s for _, _, s in visits if s % 2 == 1]
            if len(over) == 1 and len(under) == 1:
                out[v] = crossing_sign(over[0], under[0])
        return out

    @cached_property
    def faces(self) -> list[tuple[Dart, ...]]:
        """Face boundary walks, ordered by their smallest dart."""
        adjacency = self.adjacency
        seen: set[Dart] = set()
        faces = []
        for start in sorted(adjacency):
            if start in seen:
                continue
            walk = []
            d = start
            while d not in seen:
                seen.add(d)
                walk.append(d)
                w, t = adjacency[d]
                d = (w, (t - 1) % self.vertices[w].degree)
            faces.append(tuple(walk))
        faces.sort(key=min)
        return faces

    @cached_property
    def face_of(self) -> dict[Dart, int]:
        return {d: i for i, face in enumerate(self.faces) for d in face}

    @cached_property
    def components(self) -> list[frozenset[int]]:
        """Connected components as vertex sets, ordered by smallest vertex id."""
        parent = {v: v for v in self.vertices}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (a, _), (b, _) in self.adjacency.items():
            if a in parent and b in parent:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, set[int]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), set()).add(v)
        return sorted((frozenset(g) for g in groups.values()), key=min)

    @cached_property
    def component_of(self) -> dict[int, int]:
        """Map from vertex id to the smallest vertex id of its component."""
        return {v: min(comp) for comp in self.components for v in comp}

    @cached_property
    def effective_placement(self) -> dict[int, tuple[Dart, Dart]]:
        """Explicit placement completed with the default outer-face rule."""
        comps = [min(c) for c in self.components]
        if len(comps) <= 1:
            return {}
        placement = {k: v for k, v in self.placement.items() if k in comps}
        unplaced = [c for c in comps if c not in placement]
        if not unplaced:
            return placement
        root = unplaced[0]
        root_face = self._longest_face(root)
        for comp in unplaced[1:]:
            placement[comp] = (self.faces[self._longest_face(comp)][0], self.faces[root_face][0])
        return placement

    def _longest_face(self, comp: int) -> int:
        candidates = [
            i for i, face in enumerate(self.faces) if self.component_of[face[0][0]] == comp
        ]
        return max(candidates, key=lambda i: (len(self.faces[i]), -i))

    @cached_property
    def root_component(self) -> int:
        comps = [min(c) for c in self.components]
        placement = self.effective_placement
        for c in comps:
            if c not in placement:
                return c
        return comps[0]

    # simple queries -----------------------------------------------------------------------
    @property
    def n_strands(self) -> int:
        return len(self.strands)

    @property
    def is_closed(self) -> bool:
        return all(s.closed for s in self.strands)

    def crossings(self, kind: str = CLASSICAL) -> list[int]:
        return [v for v, vert in self.vertices.items() if vert.kind == kind]

    @property
    def classical_count(self) -> int:
        return len(self.crossings(CLASSICAL))

    @property
    def virtual_count(self) -> int:
        return len(self.crossings(VIRTUAL))

    @cached_property
    def endpoint_of_label(self) -> dict[int, int]:
        return {
            vert.label: v
            for v, vert in self.vertices.items()
            if vert.kind in (ENDPOINT, JOINT) and vert.label is not None
        }

    def labels(self) -> list[int]:
        return sorted(
            vert.label for vert in self.vertices.values() if vert.kind == ENDPOINT and vert.label is not None
        )

    @cached_property
    def violations(self) -> list[str]:
        return _violations(self)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _violations(d: PlanarDiagram) -> list[str]:
    out: list[str] = []
    for v, vert in d.vertices.items():
        if vert.kind not in DEGREE:
            out.append(f"vertex {v} has unknown kind {vert.kind!r}")
    if out:
        return out
    adjacency, problems = d._derived
    out.extend(problems)

    # passage counts at crossings
    for v, vert in d.vertices.items():
        visits = d.passages_at[v]
        if vert.kind == CLASSICAL:
            if len(visits) == 1:
                out.append(f"crossing passed once: {v}")
            elif len(visits) != 2:
                out.append(f"crossing {v} passed {len(visits)} times")
            else:
                parities = sorted(s % 2 for _, _, s in visits)
                if parities != [0, 1]:
                    out.append(f"crossing {v} must be passed once on the over pair and once on the under pair")
                elif vert.sign is not None and d.signs.get(v) != vert.sign:
                    out.append(f"declared sign {vert.sign} of crossing {v} disagrees with computed {d.signs.get(v)}")
        elif vert.kind == VIRTUAL:
            if len(visits) == 1:
                out.append(f"crossing passed once: {v}")
            elif len(visits) != 2:
                out.append(f"virtual crossing {v} passed {len(visits)} times")
            elif sorted(s % 2 for _, _, s in visits) != [0, 1]:
                out.append(f"virtual crossing {v} strands must use opposite slot pairs")
        elif vert.kind in (ENDPOINT, JOINT):
            if vert.label is None:
                out.append(f"{vert.kind} {v} has no label")
            expected = 1 if vert.kind == ENDPOINT else 1
            if len(visits) != expected:
                out.append(f"{vert.kind} {v} appears {len(visits)} times in strands")

    # endpoint labels
    open_strands = [s for s in d.strands if not s.closed]
    labels = d.labels()
    if sorted(labels) != list(range(1, 2 * len(open_strands) + 1)):
        out.append(f"endpoint labels {labels} do not form 1..{2 * len(open_strands)}")
    joint_labels = [vert.label for vert in d.vertices.values() if vert.kind == JOINT]
    if len(set(joint_labels)) != len(joint_labels):
        out.append("joint labels repeat")

    if problems:
        return out

    # planarity per component
    comp_stats: dict[int, list[int]] = {}
    for v in d.vertices:
        comp_stats.setdefault(d.component_of[v], [0, 0, 0])[0] += 1
    for (v, _) in adjacency:
        comp_stats[d.component_of[v]][1] += 1
    for face in d.faces:
        comp_stats[d.component_of[face[0][0]]][2] += 1
    for comp, (nv, darts, nf) in sorted(comp_stats.items()):
        chi = nv - darts // 2 + nf
        if chi != 2:
            out.append(f"non-planar rotation: component {comp} has V - E + F = {chi}")

    # placement
    comps = {min(c) for c in d.components}
    for key, (outer, host) in d.placement.items():
        if key not in comps:
            out.append(f"placement key {key} is not the smallest vertex of a component")
            continue
        for dart in (outer, host):
            if dart not in adjacency:
                out.append(f"placement of {key} references missing dart {list(dart)}")
        if outer in adjacency and d.component_of[outer[0]] != key:
            out.append(f"placement outer dart of {key} lies on another component")
        if host in adjacency and d.component_of[host[0]] == key:
            out.append(f"placement host dart of {key} lies on the same component")
    if len(comps) > 1 and comps and all(c in d.placement for c in comps):
        out.append("placement leaves no root component")
    return out


def validate(d: PlanarDiagram) -> list[str]:
    """Return every violated diagram invariant (empty list when valid)."""
    return list(d.violations)


def _require_valid(d: PlanarDiagram) -> None:
    if d.violations:
        raise InvalidDiagram(d.violations)


# ---------------------------------------------------------------------------
# Gauss codes
# ---------------------------------------------------------------------------

_PASSAGE_TOKEN = re.compile(r"^([OU])(\d+)([+-])$")


@dataclass(frozen=True)
class GaussPassage:
    """One passage of a strand through a classical crossing."""

    crossing: int
    over: bool
    sign: int

    def __str__(self) -> str:
        return f"{'O' if self.over else 'U'}{self.crossing}{'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class GaussStrand:
    """Passages of one strand; open strands carry their endpoint labels."""

    passages: tuple[GaussPassage, ...]
    closed: bool = False
    foot: int | None = None
    head: int | None = None

    def __str__(self) -> str:
        body = " ".join(str(p) for p in self.passages)
        if self.closed:
            return f"[{body}]"
        return " ".join(x for x in (str(self.foot), body, str(self.head)) if x)


@dataclass(frozen=True)
class GaussCode:
    """Embedding-free record of classical passages per strand.

    The text form lists strands separated by ``;``. An open strand is written
    ``foot passages head`` and a closed strand ``[passages]``; a passage is
    ``O`` or ``U``, the crossing id and the sign, e.g. ``"1 O1+ U2+ 2; 3 U1+ O2+ 4"``.
    """

    strands: tuple[GaussStrand, ...]

    @classmethod
    def parse(cls, text: str) -> GaussCode:
        strands = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if chunk.startswith("["):
                if not chunk.endswith("]"):
                    raise ParseError("gauss", f"unterminated closed strand {chunk!r}")
                tokens = chunk[1:-1].split()
                strands.append(GaussStrand(tuple(_parse_passage(t) for t in tokens), closed=True))
            else:
                tokens = chunk.split()
                if len(tokens) < 2:
                    raise ParseError("gauss", f"open strand {chunk!r} needs foot and head labels")
                try:
                    foot, head = int(tokens[0]), int(tokens[-1])
                except ValueError as exc:
                    raise ParseError("gauss", f"bad endpoint labels in {chunk!r}") from exc
                strands.append(
                    GaussStrand(tuple(_parse_passage(t) for t in tokens[1:-1]), closed=False, foot=foot, head=head)
                )
        return cls(tuple(strands))

    def __str__(self) -> str:
        return "; ".join(str(s) for s in self.strands)

    @property
    def n_open(self) -> int:
        return sum(1 for s in self.strands if not s.closed)

    @property
    def is_closed(self) -> bool:
        return all(s.closed for s in self.strands)

    def crossing_ids(self) -> list[int]:
        return sorted({p.crossing for s in self.strands for p in s.passages})

    def signs(self) -> dict[int, int]:
        return {p.crossing: p.sign for s in self.strands for p in s.passages}

    def labels(self) -> list[int]:
        return sorted(x for s in self.strands if not s.closed for x in (s.foot, s.head))

    def violations(self) -> list[str]:
        out = []
        seen: dict[int, list[GaussPassage]] = {}
        for s in self.strands:
            for p in s.passages:
                seen.setdefault(p.crossing, []).append(p)
        for c, ps in sorted(seen.items()):
            if len(ps) != 2:
                out.append(f"crossing {c} appears {len(ps)} times")
            elif ps[0].over == ps[1].over:
                out.append(f"crossing {c} needs one over and one under passage")
            elif ps[0].sign != ps[1].sign:
                out.append(f"crossing {c} has unequal signs")
        labels = self.labels()
        if labels != list(range(1, len(labels) + 1)):
            out.append(f"endpoint labels {labels} do not form 1..{len(labels)}")
        return out

    def mirror(self) -> GaussCode:
        """Swap over and under at every crossing (signs flip)."""
        return GaussCode(
            tuple(
                GaussStrand(
                    tuple(GaussPassage(p.crossing, not p.over, -p.sign) for p in s.passages),
                    s.closed,
                    s.foot,
                    s.head,
                )
                for s in self.strands
            )
        )

    def relabel(self, mapping: Mapping[int, int]) -> GaussCode:
        """Rename crossings (ids absent from ``mapping`` are kept)."""
        return GaussCode(
            tuple(
                GaussStrand(
                    tuple(GaussPassage(mapping.get(p.crossing, p.crossing), p.over, p.sign) for p in s.passages),
                    s.closed,
                    s.foot,
                    s.head,
                )
                for s in self.strands
            )
        )


def _parse_passage(token: str) -> GaussPassage:
    m = _PASSAGE_TOKEN.match(token)
    if not m:
        raise ParseError("gauss", f"bad passage token {token!r}")
    return GaussPassage(int(m.group(2)), m.group(1) == "O", 1 if m.group(3) == "+" else -1)


def to_gauss(d: PlanarDiagram) -> GaussCode:
    """Drop the embedding, keeping classical passages, signs and labels.

    Raises:
        InvalidDiagram: If ``d`` fails validation.
    """
    _require_valid(d)
    signs = d.signs
    strands = []
    for strand in d.strands:
        passages = tuple(
            GaussPassage(v, s % 2 == 0, signs[v])
            for v, s in (strand.passages if strand.closed else strand.passages[1:-1])
            if d.vertices[v].kind == CLASSICAL
        )
        if strand.closed:
            strands.append(GaussStrand(passages, closed=True))
        else:
            strands.append(
                GaussStrand(
                    passages,
                    closed=False,
                    foot=d.vertices[strand.foot].label,
                    head=d.vertices[strand.head].label,
                )
            )
    return GaussCode(tuple(strands))


def from_gauss(g: GaussCode, placement: Mapping[int, tuple[Dart, Dart]] | None = None) -> PlanarDiagram:
    """Realize a signed Gauss code as a diagram with classical crossings only.

    The sign of a crossing fixes its rotation: the over strand enters at slot 0
    and the under strand at slot 1 (positive) or 3 (negative). Crossing ids are
    kept and the endpoint with label ``i`` becomes vertex ``max id + i``. The
    result is a valid diagram exactly when the code is planar.

    Raises:
        InvalidDiagram: If the code is malformed or not planar.
    """
    problems = g.violations()
    if problems:
        raise InvalidDiagram(problems)
    ids = g.crossing_ids()
    offset = max(ids, default=0)
    vertices: dict[int, Vertex] = {c: Vertex(CLASSICAL, s) for c, s in g.signs().items()}
    strands = []
    for s in g.strands:
        passages = [(p.crossing, 0 if p.over else (1 if p.sign > 0 else 3)) for p in s.passages]
        if s.closed:
            strands.append(Strand(tuple(passages), closed=True))
            continue
        foot, head = offset + s.foot, offset + s.head
        vertices[foot] = Vertex(ENDPOINT, label=s.foot)
        vertices[head] = Vertex(ENDPOINT, label=s.head)
        strands.append(Strand(tuple([(foot, 0), *passages, (head, 0)])))
    d = PlanarDiagram(vertices, tuple(strands), dict(placement or {}))
    _require_valid(d)
    return d


def strand_permutation(d: PlanarDiagram | GaussCode) -> Involution:
    """The involution pairing the foot and head label of every strand.

    Raises:
        ClosedComponent: If some strand is closed.
    """
    if isinstance(d, PlanarDiagram):
        if any(s.closed for s in d.strands):
            raise ClosedComponent("strand permutation needs open strands only")
        pairs = [(d.vertices[s.foot].label, d.vertices[s.head].label) for s in d.strands]
    else:
        if any(s.closed for s in d.strands):
            raise ClosedComponent("strand permutation needs open strands only")
        pairs = [(s.foot, s.head) for s in d.strands]
    return Involution.from_pairs(pairs)


# ---------------------------------------------------------------------------
# small transformations
# ---------------------------------------------------------------------------


def switch_crossings(d: PlanarDiagram, crossings: Iterable[int] | None = None) -> PlanarDiagram:
    """Exchange over and under at the given classical crossings (all by default).

    Relabelling the slots of a crossing by one step keeps its rotation while
    moving the over pair to the other strand, so each switched sign flips.
    """
    targets = set(d.crossings(CLASSICAL) if crossings is None else crossings)

    def shift(dart: Dart) -> Dart:
        v, s = dart
        return (v, (s + 1) % 4) if v in targets else dart

    strands = tuple(Strand(tuple(shift(p) for p in st.passages), st.closed) for st in d.strands)
    vertices = {
        v: Vertex(vert.kind, -vert.sign if (v in targets and vert.sign is not None) else vert.sign, vert.label)
        for v, vert in d.vertices.items()
    }
    placement = {k: (shift(o), shift(h)) for k, (o, h) in d.placement.items()}
    return PlanarDiagram(vertices, strands, placement)


def with_computed_signs(d: PlanarDiagram) -> PlanarDiagram:
    """Copy of ``d`` whose classical crossings declare their computed signs."""
    stripped = {
        v: Vertex(vert.kind, None, vert.label) if vert.kind == CLASSICAL else vert for v, vert in d.vertices.items()
    }
    bare = PlanarDiagram(stripped, d.strands, d.placement)
    signs = bare.signs
    vertices = {
        v: Vertex(CLASSICAL, signs.get(v), None) if vert.kind == CLASSICAL else vert for v, vert in stripped.items()
    }
    return PlanarDiagram(vertices, d.strands, d.placement)


def relabel_vertices(d: PlanarDiagram, mapping: Mapping[int, int]) -> PlanarDiagram:
    """Rename vertex ids; ids absent from ``mapping`` are kept."""
    m = lambda v: mapping.get(v, v)  # noqa: E731
    new_ids = [m(v) for v in d.vertices]
    if len(set(new_ids)) != len(new_ids):
        raise ValueError("vertex relabelling is not injective")
    vertices = {m(v): vert for v, vert in d.vertices.items()}
    strands = tuple(Strand(tuple((m(v), s) for v, s in st.passages), st.closed) for st in d.strands)
    placement = {}
    for k, (o, h) in d.placement.items():
        comp = next(c for c in d.components if k in c)
        placement[min(m(v) for v in comp)] = ((m(o[0]), o[1]), (m(h[0]), h[1]))
    return PlanarDiagram(vertices, strands, placement)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _int(value: Any, locus: str) -> int:
    if isinstance(value, bool):
        raise ParseError(locus, "expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and re.fullmatch(r"-?\d+", value.strip()):
        return int(value)
    raise ParseError(locus, "expected an integer")


def _dart(value: Any, locus: str) -> Dart:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(locus, "expected [vertex, slot]")
    return (_int(value[0], locus), _int(value[1], locus))


def to_dict(d: PlanarDiagram, extra: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """JSON-ready dictionary in the normalized key layout."""
    signs = d.signs
    vertices: dict[str, Any] = {}
    for v, vert in d.vertices.items():
        entry: dict[str, Any] = {"kind": vert.kind}
        if vert.kind == CLASSICAL:
            sign = signs.get(v, vert.sign)
            if sign is not None:
                entry["sign"] = sign
        if vert.label is not None:
            entry["label"] = vert.label
        vertices[str(v)] = entry
    adjacency = d.adjacency
    rotation = {
        str(v): [list(adjacency.get((v, s), (None, None))) for s in range(vert.degree)]
        for v, vert in d.vertices.items()
        if vert.degree >= 2
    }
    out: dict[str, Any] = {
        "vertices": vertices,
        "strands": [{"closed": s.closed, "passages": [list(p) for p in s.passages]} for s in d.strands],
        "rotation": rotation,
        "placement": {str(k): {"outer": list(o), "host": list(h)} for k, (o, h) in d.placement.items()},
    }
    if extra:
        out.update(extra)
    return out


def serialize(d: PlanarDiagram, extra: Mapping[str, Any] | None = None) -> str:
    """Normalized JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(to_dict(d, extra), indent=2, sort_keys=True) + "\n"


def from_dict(data: Any) -> PlanarDiagram:
    """Build a diagram from parsed JSON, checking the schema and the rotation.

    Raises:
        ParseError: With the offending field as locus.
    """
    if not isinstance(data, dict):
        raise ParseError("$", "top level must be an object")
    for key in ("vertices", "strands", "rotation"):
        if key not in data:
            raise ParseError(key, "missing field")
    raw_vertices = data["vertices"]
    if not isinstance(raw_vertices, dict):
        raise ParseError("vertices", "expected an object")
    vertices: dict[int, Vertex] = {}
    for key, entry in raw_vertices.items():
        locus = f"vertices.{key}"
        vid = _int(key, locus)
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ParseError(locus, "expected an object with a kind")
        kind = entry["kind"]
        if kind not in DEGREE:
            raise ParseError(f"{locus}.kind", f"unknown kind {kind!r}")
        sign = entry.get("sign")
        if sign is not None:
            sign = _int(sign, f"{locus}.sign")
            if sign not in (1, -1):
                raise ParseError(f"{locus}.sign", "sign must be 1 or -1")
        label = entry.get("label")
        if label is not None:
            label = _int(label, f"{locus}.label")
        if kind in (ENDPOINT, JOINT) and label is None:
            raise ParseError(f"{locus}.label", "endpoints need a label")
        vertices[vid] = Vertex(kind, sign if kind == CLASSICAL else None, label)
    raw_strands = data["strands"]
    if not isinstance(raw_strands, list):
        raise ParseError("strands", "expected a list")
    strands = []
    for i, entry in enumerate(raw_strands):
        locus = f"strands[{i}]"
        if isinstance(entry, list):
            passages, closed = entry, False
        elif isinstance(entry, dict) and "passages" in entry:
            passages, closed = entry["passages"], bool(entry.get("closed", False))
        else:
            raise ParseError(locus, "expected a passage list or an object with passages")
        strands.append(Strand(tuple(_dart(p, f"{locus}.passages[{j}]") for j, p in enumerate(passages)), closed))
    raw_placement = data.get("placement") or {}
    if not isinstance(raw_placement, dict):
        raise ParseError("placement", "expected an object")
    placement = {}
    for key, entry in raw_placement.items():
        locus = f"placement.{key}"
        if not isinstance(entry, dict) or "outer" not in entry or "host" not in entry:
            raise ParseError(locus, "expected {outer, host}")
        placement[_int(key, locus)] = (_dart(entry["outer"], f"{locus}.outer"), _dart(entry["host"], f"{locus}.host"))
    d = PlanarDiagram(vertices, tuple(strands), placement)

    rotation = data["rotation"]
    if not isinstance(rotation, dict):
        raise ParseError("rotation", "expected an object")
    adjacency, problems = d._derived
    if not problems:
        for v, vert in vertices.items():
            if vert.degree < 2:
                continue
            locus = f"rotation.{v}"
            if str(v) not in rotation:
                raise ParseError(locus, "missing rotation entry")
            listed = rotation[str(v)]
            if not isinstance(listed, list) or len(listed) != vert.degree:
                raise ParseError(locus, f"expected {vert.degree} neighbours")
            for s, nb in enumerate(listed):
                if _dart(nb, f"{locus}[{s}]") != adjacency[(v, s)]:
                    raise ParseError(f"{locus}[{s}]", "rotation disagrees with the strands")
    return d


def parse(text: str) -> PlanarDiagram:
    """Parse diagram JSON text.

    Raises:
        ParseError: On malformed JSON (locus ``line N``) or schema errors.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}", exc.msg) from exc
    return from_dict(data)


def normalize(text: str) -> str:
    """Canonical text of a diagram file (what :func:`serialize` writes)."""
    data = json.loads(text)
    d = from_dict(data)
    extra = {k: v for k, v in data.items() if k == "provenance"}
    return serialize(d, extra)


def load(path: str) -> PlanarDiagram:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read())


def dump(d: PlanarDiagram, path: str, extra: Mapping[str, Any] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(serialize(d, extra))


def build(
    vertices: Mapping[int, Vertex],
    adjacency: Mapping[Dart, Dart],
    starts: Sequence[Dart],
    placement: Mapping[int, tuple[Dart, Dart]] | None = None,
) -> PlanarDiagram:
    """Assemble a diagram from an adjacency map and one start dart per strand.

    Args:
        vertices: Vertex table.
        adjacency: Symmetric dart partner map.
        starts: ``(endpoint, 0)`` for open strands or an entry passage of a
            closed strand; strands keep this order and orientation.
        placement: Optional placement entries.
    """
    strands = []
    for start in starts:
        passages, closed = walk_strand(vertices, adjacency, start)
        strands.append(Strand(tuple(passages), closed))
    return PlanarDiagram(dict(vertices), tuple(strands), dict(placement or {}))
