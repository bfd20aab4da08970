"""Invariants of virtual closures of linkoids.

Every invariant ``F`` is evaluated on a pair ``(linkoid, sigma)`` as ``F`` of
the virtual closure. The polynomial invariants only need the Gauss code:

* the generalized bracket sums over smoothings of the open code, closing the
  resulting arcs with ``sigma`` (segment cycles of ``tau_S`` and ``sigma``),
* the arrow polynomial runs the oriented/disoriented state sum on the closed
  code from :func:`~linkoid.closure.gauss_closure`, tracking cusps,
* the affine index polynomial and odd writhe read the closed cyclic code.

Height and genus need the routed closure and are upper bounds.

Smoothing conventions. A crossing has four ports: over-in, over-out,
under-in and under-out. The *oriented* smoothing joins over-in to under-out
and under-in to over-out; the *disoriented* smoothing joins the two incoming
ports and the two outgoing ports. The A-smoothing of a positive crossing is
the oriented one and the A-smoothing of a negative crossing is the
disoriented one.

Cusps. Walking a state loop through a disoriented smoothing deposits one cusp
tag per connection: going from over-in to under-in, or from over-out to
under-out, tags ``+sign``; the reverse directions tag ``-sign``. Adjacent
equal tags cancel cyclically and a loop left with ``2i`` tags contributes
``K_i``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

from .closure import ClosedVirtualDiagram, gauss_closure, reduce_virtual, virtual_closure
from .diagram import CLASSICAL, GaussCode, PlanarDiagram, strand_permutation, to_gauss
from .errors import ClosedComponent, InvalidDiagram, MultiComponent, SizeMismatch, TooLarge
from .involution import Involution, segment_cycles
from .polynomial import AffinePoly, ArrowPoly, LaurentPoly, loop_value

__all__ = [
    "DEFAULT_MAX_CROSSINGS",
    "max_crossings",
    "writhe",
    "bracket",
    "bracket_closed",
    "jones",
    "jones_closed",
    "arrow",
    "arrow_closed",
    "arrow_normalized",
    "affine_index",
    "affine_weights",
    "odd_writhe",
    "odd_crossings",
    "height_bound",
    "genus_bound",
    "InvariantReport",
    "report",
    "State",
    "states",
    "normalization",
    "reduce_cusps",
]

DEFAULT_MAX_CROSSINGS = 28
ENV_MAX_CROSSINGS = "LINKOID_MAX_CROSSINGS"

OI, OO, UI, UO = 0, 1, 2, 3  # port offsets within a crossing


def max_crossings(override: int | None = None) -> int:
    """Crossing limit for state sums: explicit value, environment, or default."""
    if override is not None:
        return override
    env = os.environ.get(ENV_MAX_CROSSINGS)
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_MAX_CROSSINGS


def _guard(g: GaussCode, limit: int | None) -> None:
    problems = g.violations()
    if problems:
        raise InvalidDiagram(problems)
    c = len(g.crossing_ids())
    cap = max_crossings(limit)
    if c > cap:
        raise TooLarge(f"state sum over {c} crossings exceeds the limit of {cap} (set {ENV_MAX_CROSSINGS})")


def writhe(g: GaussCode) -> int:
    """Sum of crossing signs."""
    return sum(g.signs().values())


def normalization(w: int) -> LaurentPoly:
    """``(-A^3)^(-w)``."""
    return LaurentPoly({-3 * w: (-1) ** (w % 2)})


# ---------------------------------------------------------------------------
# port graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _PortGraph:
    crossings: tuple[int, ...]
    signs: tuple[int, ...]
    edge: tuple[int, ...]  # partner of each node along strand edges
    n_ports: int
    endpoint_nodes: tuple[int, ...]  # node of label i at index i-1
    free_loops: int


def _port_graph(g: GaussCode) -> _PortGraph:
    crossings = tuple(g.crossing_ids())
    index = {c: k for k, c in enumerate(crossings)}
    signs_map = g.signs()
    n_ports = 4 * len(crossings)
    labels = g.labels()
    n_nodes = n_ports + len(labels)
    edge = [-1] * n_nodes
    free_loops = 0

    def in_port(p) -> int:
        return 4 * index[p.crossing] + (OI if p.over else UI)

    def out_port(p) -> int:
        return 4 * index[p.crossing] + (OO if p.over else UO)

    def link(a: int, b: int) -> None:
        edge[a] = b
        edge[b] = a

    for s in g.strands:
        ps = s.passages
        if s.closed:
            if not ps:
                free_loops += 1
                continue
            for a, b in zip(ps, ps[1:] + ps[:1]):
                link(out_port(a), in_port(b))
        else:
            foot = n_ports + s.foot - 1
            head = n_ports + s.head - 1
            if not ps:
                link(foot, head)
                continue
            link(foot, in_port(ps[0]))
            for a, b in zip(ps, ps[1:]):
                link(out_port(a), in_port(b))
            link(out_port(ps[-1]), head)
    return _PortGraph(
        crossings,
        tuple(signs_map[c] for c in crossings),
        tuple(edge),
        n_ports,
        tuple(range(n_ports, n_nodes)),
        free_loops,
    )


def _smoothing_partner(port: int, oriented: bool) -> int:
    base, offset = port - port % 4, port % 4
    if oriented:
        return base + (UO, UI, OO, OI)[offset]
    return base + (UI, UO, OI, OO)[offset]


def _cusp_tag(port: int, sign: int) -> int:
    """Tag deposited when a disoriented connection is left from ``port``."""
    offset = port % 4
    return sign if offset in (OI, OO) else -sign


def reduce_cusps(word: list[int]) -> int:
    """Reduced length of a cyclic cusp word (adjacent equal tags cancel)."""
    stack: list[int] = []
    for tag in word:
        if stack and stack[-1] == tag:
            stack.pop()
        else:
            stack.append(tag)
    lo, hi = 0, len(stack)
    while hi - lo >= 2 and stack[lo] == stack[hi - 1]:
        lo += 1
        hi -= 1
    return hi - lo


@dataclass(frozen=True)
class State:
    """One smoothing choice with its resolved data.

    Attributes:
        a_smoothing: Per crossing (in id order), True for the A-smoothing.
        alpha: Number of A-smoothings minus number of B-smoothings.
        circ: Number of loops that avoid the endpoints.
        tau: Endpoint pairing induced by the smoothed arcs, or ``None`` for a
            closed code.
        cusp_counts: Per loop (circles first), the cusp count before reduction.
        reduced: Per loop, the cusp count after cyclic cancellation.
    """

    a_smoothing: tuple[bool, ...]
    alpha: int
    circ: int
    tau: Involution | None
    cusp_counts: tuple[int, ...] = field(default=())
    reduced: tuple[int, ...] = field(default=())


def _resolve(pg: _PortGraph, choice: int, track_cusps: bool) -> tuple[int, list[tuple[int, int]], list[int], list[int]]:
    """Trace one state.

    Returns ``(circ, arcs, raw_cusps, reduced_cusps)``; ``arcs`` are endpoint
    label pairs, cusp lists are per loop (arcs through endpoints included when
    cusps are tracked on an open code; callers use closed codes for cusps).
    """
    k = len(pg.crossings)
    oriented = [((choice >> i) & 1 == 1) == (pg.signs[i] > 0) for i in range(k)]
    n_ports = pg.n_ports
    edge = pg.edge
    visited = bytearray(n_ports)
    arcs: list[tuple[int, int]] = []
    raw: list[int] = []
    red: list[int] = []
    done_end = set()
    for node in pg.endpoint_nodes:
        if node in done_end:
            continue
        cur = edge[node]
        word: list[int] = []
        while cur < n_ports:
            visited[cur] = 1
            c = cur // 4
            nxt = _smoothing_partner(cur, oriented[c])
            if track_cusps and not oriented[c]:
                word.append(_cusp_tag(cur, pg.signs[c]))
            visited[nxt] = 1
            cur = edge[nxt]
        done_end.add(node)
        done_end.add(cur)
        arcs.append((node - n_ports + 1, cur - n_ports + 1))
        if track_cusps:
            raw.append(len(word))
            red.append(len(word))
    circ = pg.free_loops
    for start in range(n_ports):
        if visited[start]:
            continue
        circ += 1
        cur = start
        word = []
        while True:
            visited[cur] = 1
            c = cur // 4
            nxt = _smoothing_partner(cur, oriented[c])
            if track_cusps and not oriented[c]:
                word.append(_cusp_tag(cur, pg.signs[c]))
            visited[nxt] = 1
            cur = edge[nxt]
            if cur == start:
                break
        if track_cusps:
            raw.append(len(word))
            red.append(reduce_cusps(word))
    if track_cusps:
        for _ in range(pg.free_loops):
            raw.append(0)
            red.append(0)
    return circ, arcs, raw, red


def states(g: GaussCode, sigma: Involution | None = None, cusps: bool = False):
    """Iterate over all states of a Gauss code (for inspection and tests)."""
    pg = _port_graph(g)
    k = len(pg.crossings)
    for choice in range(1 << k):
        circ, arcs, raw, red = _resolve(pg, choice, cusps)
        a = tuple((choice >> i) & 1 == 1 for i in range(k))
        alpha = sum(1 if x else -1 for x in a)
        tau = Involution.from_pairs(arcs) if arcs else None
        yield State(a, alpha, circ, tau, tuple(raw), tuple(red))


# ---------------------------------------------------------------------------
# bracket and Jones
# ---------------------------------------------------------------------------


def _check_sigma(g: GaussCode, sigma: Involution | None) -> None:
    if g.n_open == 0:
        return
    if any(s.closed for s in g.strands):
        raise ClosedComponent("mixed open and closed strands are not supported")
    if sigma is None:
        raise SizeMismatch("an open code needs a closure permutation")
    if sigma.size != 2 * g.n_open:
        raise SizeMismatch(f"sigma acts on {sigma.size} labels, code has {2 * g.n_open} endpoints")


@lru_cache(maxsize=4096)
def _bracket_counts(g: GaussCode, sigma: Involution | None) -> tuple[tuple[tuple[int, int], int], ...]:
    pg = _port_graph(g)
    k = len(pg.crossings)
    counts: dict[tuple[int, int], int] = {}
    cycle_cache: dict[tuple, int] = {}
    for choice in range(1 << k):
        circ, arcs, _, _ = _resolve(pg, choice, False)
        if arcs:
            key = tuple(sorted(arcs))
            cycles = cycle_cache.get(key)
            if cycles is None:
                cycles = segment_cycles(Involution.from_pairs(arcs), sigma).count
                cycle_cache[key] = cycles
            loops = circ + cycles
        else:
            loops = circ
        alpha = 2 * bin(choice).count("1") - k
        counts[(alpha, loops)] = counts.get((alpha, loops), 0) + 1
    return tuple(sorted(counts.items()))


def _expand(counts, var: str = "A") -> LaurentPoly:
    d = loop_value(var)
    powers: dict[int, LaurentPoly] = {}
    out: dict[int, Fraction] = {}
    for (alpha, loops), mult in counts:
        e = loops - 1
        if e not in powers:
            powers[e] = d**e if e >= 0 else None  # type: ignore[assignment]
        dp = powers[e]
        if dp is None:
            raise ValueError("state with no loops")
        for exp, coef in dp.terms.items():
            out[alpha + exp] = out.get(alpha + exp, 0) + coef * mult
    return LaurentPoly(out)


def bracket(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> LaurentPoly:
    """Generalized bracket of the closure of ``g`` by ``sigma``.

    Each state contributes ``A^alpha d^(circ + |segment cycles of (tau_S, sigma)| - 1)``.
    For a closed code ``sigma`` is ignored and the exponent is ``circ - 1``.

    Raises:
        SizeMismatch: If ``sigma`` does not match the endpoints.
        TooLarge: If the code exceeds the crossing limit.
    """
    _check_sigma(g, sigma)
    _guard(g, max_crossings)
    return _expand(_bracket_counts(g, sigma if g.n_open else None))


def bracket_closed(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> LaurentPoly:
    """Bracket computed on the closed code from :func:`gauss_closure`.

    This is an independent route to :func:`bracket` (it never forms
    ``tau_S``) and serves as a cross-check.
    """
    if g.n_open:
        _check_sigma(g, sigma)
        g = gauss_closure(g, sigma)
    return bracket(g, None, max_crossings)


def jones(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> LaurentPoly:
    """Normalized bracket ``(-A^3)^(-writhe) * bracket`` (writhe of the linkoid)."""
    return normalization(writhe(g)) * bracket(g, sigma, max_crossings)


def jones_closed(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> LaurentPoly:
    """Jones polynomial of the closed code, normalized with its own writhe."""
    if g.n_open:
        _check_sigma(g, sigma)
        g = gauss_closure(g, sigma)
    return normalization(writhe(g)) * bracket(g, None, max_crossings)


# ---------------------------------------------------------------------------
# arrow polynomial
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _arrow_counts(g: GaussCode) -> tuple:
    pg = _port_graph(g)
    k = len(pg.crossings)
    counts: dict[tuple[int, int, tuple], int] = {}
    for choice in range(1 << k):
        circ, arcs, raw, red = _resolve(pg, choice, True)
        assert not arcs, "arrow state sum runs on closed codes"
        ks: dict[int, int] = {}
        for r in red:
            if r:
                ks[r // 2] = ks.get(r // 2, 0) + 1
        alpha = 2 * bin(choice).count("1") - k
        key = (alpha, circ, tuple(sorted(ks.items())))
        counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items()))


def arrow_closed(g: GaussCode, max_crossings: int | None = None) -> ArrowPoly:
    """Unnormalized arrow polynomial of a closed Gauss code."""
    if g.n_open:
        raise ClosedComponent("arrow_closed needs a closed code")
    _guard(g, max_crossings)
    d = loop_value()
    out = ArrowPoly()
    powers: dict[int, LaurentPoly] = {}
    for (alpha, loops, ks), mult in _arrow_counts(g):
        e = loops - 1
        if e not in powers:
            powers[e] = d**e
        term = ArrowPoly({(0, ks): mult}) * (powers[e] * LaurentPoly({alpha: 1}))
        out = out + term
    return out


def arrow(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> ArrowPoly:
    """Arrow polynomial of the closure of ``g`` by ``sigma`` (unnormalized).

    Its specialization ``K_i = 1`` is :func:`bracket`. Multiply by
    :func:`normalization` of the writhe for the normalized version.
    """
    if g.n_open:
        _check_sigma(g, sigma)
        g = gauss_closure(g, sigma)
    return arrow_closed(g, max_crossings)


def arrow_normalized(g: GaussCode, sigma: Involution | None = None, max_crossings: int | None = None) -> ArrowPoly:
    """``(-A^3)^(-writhe) * arrow``; unlike :func:`arrow` this is unchanged by R1 moves."""
    return normalization(writhe(g)) * arrow(g, sigma, max_crossings)


# ---------------------------------------------------------------------------
# one-component invariants
# ---------------------------------------------------------------------------


def _single_component(g: GaussCode, sigma: Involution | None) -> GaussCode:
    if g.n_open:
        _check_sigma(g, sigma)
        g = gauss_closure(g, sigma)
    components = len(g.strands)
    if components != 1:
        raise MultiComponent(f"closure has {components} components")
    return g


def affine_weights(g: GaussCode, sigma: Involution | None = None) -> dict[int, int]:
    """Weight ``W_K(c)`` of every crossing of a one-component closure.

    Arc labels start at 0 and change at each passage: the strand that enters
    a crossing from the left (over strand at a positive crossing, under
    strand at a negative one) leaves with its label decreased by 1, the other
    with its label increased by 1. With ``a`` the left incoming label and
    ``b`` the right one, ``W_+ = a - b - 1`` and ``W_K = sign * W_+``.

    Raises:
        MultiComponent: If the closure has more than one component.
    """
    g = _single_component(g, sigma)
    label = 0
    left_in: dict[int, int] = {}
    right_in: dict[int, int] = {}
    sign_of: dict[int, int] = {}
    for p in g.strands[0].passages:
        sign_of[p.crossing] = p.sign
        from_left = p.over == (p.sign > 0)
        if from_left:
            left_in[p.crossing] = label
            label -= 1
        else:
            right_in[p.crossing] = label
            label += 1
    assert label == 0, "affine labels must return to their start value"
    return {c: sign_of[c] * (left_in[c] - right_in[c] - 1) for c in sorted(sign_of)}


def affine_index(g: GaussCode, sigma: Involution | None = None) -> AffinePoly:
    """Affine index polynomial ``sum_c sign(c) (t^W(c) - 1)``.

    Raises:
        MultiComponent: If the closure has more than one component.
    """
    g1 = _single_component(g, sigma)
    signs = g1.signs()
    out: dict[int, int] = {}
    for c, w in affine_weights(g1).items():
        out[w] = out.get(w, 0) + signs[c]
        out[0] = out.get(0, 0) - signs[c]
    return AffinePoly(out)


def odd_crossings(g: GaussCode, sigma: Involution | None = None) -> list[int]:
    """Crossings with an odd number of symbols between their two occurrences."""
    g1 = _single_component(g, sigma)
    positions: dict[int, list[int]] = {}
    for k, p in enumerate(g1.strands[0].passages):
        positions.setdefault(p.crossing, []).append(k)
    return sorted(c for c, (i, j) in positions.items() if (j - i - 1) % 2 == 1)


def odd_writhe(g: GaussCode, sigma: Involution | None = None) -> int:
    """Sum of the signs of the odd crossings of a one-component closure."""
    g1 = _single_component(g, sigma)
    signs = g1.signs()
    return sum(signs[c] for c in odd_crossings(g1))


# ---------------------------------------------------------------------------
# routed invariants
# ---------------------------------------------------------------------------


def height_bound(d: PlanarDiagram, sigma: Involution) -> int:
    """Virtual crossings of the reduced routed closure (an upper bound on height)."""
    return reduce_virtual(virtual_closure(d, sigma)).virtual_count


def genus_bound(c: ClosedVirtualDiagram | PlanarDiagram) -> int:
    """Genus of the canonical surface of a closed diagram.

    The ribbon graph has the classical crossings as vertices; bands pass
    straight through virtual crossings and joints. Boundary circles are traced
    with the same face rule as the planar map, and each connected piece
    contributes ``(2 - V + E - F) / 2``. Crossingless loops contribute 0.
    """
    d = c.base if isinstance(c, ClosedVirtualDiagram) else c
    adj = d.adjacency
    classical = set(d.crossings(CLASSICAL))
    if not classical:
        return 0

    def follow(dart):
        w, t = adj[dart]
        while w not in classical:
            deg = d.vertices[w].degree
            w, t = adj[(w, (t + deg // 2) % deg)]
        return (w, t)

    partner = {(v, s): follow((v, s)) for v in classical for s in range(4)}
    parent = {v: v for v in classical}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (v, _), (w, _) in partner.items():
        a, b = find(v), find(w)
        if a != b:
            parent[max(a, b)] = min(a, b)
    stats: dict[int, list[int]] = {}
    for v in classical:
        stats.setdefault(find(v), [0, 0, 0])[0] += 1
        stats[find(v)][1] += 2  # four half-edges per vertex
    seen = set()
    for start in sorted(partner):
        if start in seen:
            continue
        stats[find(start[0])][2] += 1
        dart = start
        while dart not in seen:
            seen.add(dart)
            w, t = partner[dart]
            dart = (w, (t - 1) % 4)
    total = 0
    for nv, ne, nf in stats.values():
        chi = nv - ne + nf
        genus2 = 2 - chi
        assert genus2 >= 0 and genus2 % 2 == 0, "ribbon graph Euler characteristic out of range"
        total += genus2 // 2
    return total


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    """All invariants of one closure (``None`` marks n/a fields)."""

    sigma: Involution | None
    writhe: int
    bracket: LaurentPoly
    jones: LaurentPoly
    arrow: ArrowPoly
    affine: AffinePoly | None
    odd_writhe: int | None
    height_bound: int
    genus_bound: int
    component_count: int

    @property
    def normalized_arrow(self) -> ArrowPoly:
        """The arrow polynomial times ``(-A^3)^(-writhe)``."""
        return normalization(self.writhe) * self.arrow

    def to_json(self) -> dict[str, Any]:
        return {
            "sigma": str(self.sigma) if self.sigma is not None else None,
            "writhe": self.writhe,
            "bracket": str(self.bracket),
            "jones": str(self.jones),
            "arrow": str(self.arrow),
            "normalized_arrow": str(self.normalized_arrow),
            "affine": str(self.affine) if self.affine is not None else "n/a",
            "odd_writhe": self.odd_writhe if self.odd_writhe is not None else "n/a",
            "height_bound": self.height_bound,
            "genus_bound": self.genus_bound,
            "component_count": self.component_count,
        }


def report(
    d: PlanarDiagram,
    sigma: Involution | None = None,
    max_crossings: int | None = None,
    closure: ClosedVirtualDiagram | None = None,
) -> InvariantReport:
    """Evaluate every invariant of the closure of ``d`` by ``sigma``.

    ``sigma`` defaults to the strand permutation (the strand closure). Closed
    diagrams are accepted with ``sigma=None``; their height bound is their own
    reduced virtual crossing count.
    """
    g = to_gauss(d)
    if d.is_closed:
        closed = g
        reduced = reduce_virtual(ClosedVirtualDiagram(d))
    else:
        if sigma is None:
            sigma = strand_permutation(d)
        closed = gauss_closure(g, sigma)
        routed = closure if closure is not None else virtual_closure(d, sigma)
        reduced = reduce_virtual(routed)
    b = bracket(g, sigma if g.n_open else None, max_crossings)
    w = writhe(g)
    components = len(closed.strands)
    affine = odd = None
    if components == 1:
        affine = affine_index(closed)
        odd = odd_writhe(closed)
    return InvariantReport(
        sigma=sigma,
        writhe=w,
        bracket=b,
        jones=normalization(w) * b,
        arrow=arrow_closed(closed, max_crossings),
        affine=affine,
        odd_writhe=odd,
        height_bound=reduced.virtual_count,
        genus_bound=genus_bound(reduced),
        component_count=components,
    )
