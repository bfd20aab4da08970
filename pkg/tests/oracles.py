"""Independent reference computations used to check the library."""

from __future__ import annotations

from itertools import product

from linkoid.diagram import CLASSICAL, JOINT, VIRTUAL, GaussCode, PlanarDiagram
from linkoid.polynomial import LaurentPoly, loop_value

# A-smoothing joins slots 1-2 and 3-0, B-smoothing joins 0-1 and 2-3 (over strand on slots 0 and 2)
_A_PAIRS = {0: 3, 3: 0, 1: 2, 2: 1}
_B_PAIRS = {0: 1, 1: 0, 2: 3, 3: 2}


def planar_bracket(d: PlanarDiagram) -> LaurentPoly:
    """Kauffman bracket of a closed diagram by smoothing its rotation system."""
    crossings = sorted(d.crossings(CLASSICAL))
    adj = d.adjacency
    darts = list(adj)
    total = LaurentPoly()
    for choice in product((True, False), repeat=len(crossings)):
        smoothing = dict(zip(crossings, choice))

        def inner(v: int, s: int) -> int:
            kind = d.vertices[v].kind
            if kind == CLASSICAL:
                return (_A_PAIRS if smoothing[v] else _B_PAIRS)[s]
            if kind == VIRTUAL:
                return (s + 2) % 4
            if kind == JOINT:
                return 1 - s
            raise ValueError("the oracle needs a closed diagram")

        seen: set[tuple[int, int]] = set()
        loops = 0
        for dart in darts:
            if dart in seen:
                continue
            loops += 1
            cur = dart
            while cur not in seen:
                seen.add(cur)
                w, t = adj[cur]
                seen.add((w, t))
                cur = (w, inner(w, t))
        alpha = sum(1 if c else -1 for c in choice)
        total = total + LaurentPoly({alpha: 1}) * loop_value() ** (loops - 1)
    return total


def chord_index(g: GaussCode) -> dict[int, int]:
    """Gauss-diagram index of every chord of a one-component code.

    The chord of ``c`` runs from its over to its under occurrence. Every other
    chord ``e`` that crosses it contributes ``sign(e)`` when ``e`` starts on the
    arc traversed from the over to the under occurrence of ``c``, and
    ``-sign(e)`` otherwise.
    """
    (strand,) = g.strands
    passages = strand.passages
    where: dict[int, dict[bool, int]] = {}
    for k, p in enumerate(passages):
        where.setdefault(p.crossing, {})[p.over] = k
    sign = g.signs()
    m = len(passages)

    def on_arc(k: int, start: int, end: int) -> bool:
        return 0 < (k - start) % m < (end - start) % m

    out = {}
    for c, pos in where.items():
        o, u = pos[True], pos[False]
        total = 0
        for e, other in where.items():
            if e == c:
                continue
            eo, eu = other[True], other[False]
            if on_arc(eo, o, u) == on_arc(eu, o, u):
                continue
            total += sign[e] if on_arc(eo, o, u) else -sign[e]
        out[c] = total
    return out
