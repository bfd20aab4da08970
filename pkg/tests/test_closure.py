from __future__ import annotations

from itertools import permutations, product

import pytest
from conftest import LINKOID_FIXTURES, I, fixture, trivial

from linkoid.closure import (
    ClosedVirtualDiagram,
    _finish,
    _route_all,
    canonical_closed_code,
    excise_virtual,
    gauss_closure,
    is_link_type,
    reduce_virtual,
    strand_closure,
    virtual_closure,
)
from linkoid.diagram import VIRTUAL, GaussCode, PlanarDiagram, Vertex, build, strand_permutation, to_gauss, validate
from linkoid.errors import ClosedComponent, InvalidDiagram, LinkoidError, SizeMismatch
from linkoid.involution import burnside_count, enumerate_hn

PAIRS = [(name, sigma) for name in LINKOID_FIXTURES for sigma in enumerate_hn(fixture(name).n_strands)]
PAIR_IDS = [f"{name}-{sigma}" for name, sigma in PAIRS]


def _canon(d: PlanarDiagram) -> tuple:
    return canonical_closed_code(to_gauss(d))


def _virtual_finger(d: PlanarDiagram) -> PlanarDiagram:
    """Push one edge across another edge of the same face through two virtual crossings."""
    adj = d.adjacency
    x, y = max(d.vertices) + 1, max(d.vertices) + 2
    starts = [s.passages[0] for s in d.strands]
    for face in d.faces:
        edges: list[frozenset] = []
        for dart in face:
            edge = frozenset([dart, adj[dart]])
            if edge not in edges:
                edges.append(edge)
        for i, e1 in enumerate(edges):
            for e2 in edges[i + 1 :]:
                (p, q), (r, s) = sorted(e1), sorted(e2)
                for a, b, swap, dx, dy in product(range(4), range(4), (False, True), (1, 3), (1, 3)):
                    new = {k: v for k, v in adj.items() if k not in (p, q, r, s)}

                    def link(u, v):
                        new[u] = v
                        new[v] = u

                    link(p, (x, a))
                    link((x, (a + 2) % 4), (y, b))
                    link((y, (b + 2) % 4), q)
                    first, second = ((y, dy), (x, dx)) if swap else ((x, dx), (y, dy))
                    link(r, first)
                    link((first[0], (first[1] + 2) % 4), second)
                    link((second[0], (second[1] + 2) % 4), s)
                    vertices = {**d.vertices, x: Vertex(VIRTUAL), y: Vertex(VIRTUAL)}
                    try:
                        out = build(vertices, new, starts, d.placement)
                    except (LinkoidError, KeyError):
                        continue
                    if validate(out):
                        continue
                    if any({v for v, _ in f} == {x, y} and len(f) == 2 for f in out.faces):
                        return out
    raise AssertionError("no finger move found")


def test_fix2_closure_is_one_component_with_two_crossings():
    c = virtual_closure(fixture("fix2"), I("(1 4)(2 3)"))
    assert c.component_count == 1 and c.classical_count == 2
    assert validate(c.base) == []
    assert reduce_virtual(c).virtual_count == 1


def test_fix2_closure_matches_virtual_trefoil_fixture():
    c = reduce_virtual(virtual_closure(fixture("fix2"), I("(1 4)(2 3)")))
    assert _canon(c.base) == _canon(fixture("virtual_trefoil"))
    closed = gauss_closure(to_gauss(fixture("fix2")), I("(1 4)(2 3)"))
    assert canonical_closed_code(closed) == canonical_closed_code(GaussCode.parse("[O1+ U2+ U1+ O2+]"))


def test_fix3_closure_is_kishino_shaped():
    c = virtual_closure(fixture("fix3"), I("(1 2)(3 4)"))
    assert c.component_count == 1 and c.classical_count == 4
    assert _canon(reduce_virtual(c).base) == _canon(fixture("kishino"))


@pytest.mark.parametrize("name", LINKOID_FIXTURES)
def test_strand_closure_keeps_components(name):
    d = fixture(name)
    c = strand_closure(d)
    assert c.component_count == d.n_strands
    assert c.sigma == strand_permutation(d)


def test_crossingless_strand_closes_to_unknot():
    c = strand_closure(trivial(1))
    assert c.component_count == 1 and c.virtual_count == 0 and c.classical_count == 0


def test_gauss_closure_small_cases():
    g = to_gauss(trivial(2))
    assert str(gauss_closure(g, I("(1 2)(3 4)"))) == "[]; []"
    assert str(gauss_closure(g, I("(2 3)(1 4)"))) == "[]"
    fix1 = to_gauss(fixture("fix1"))
    closed = gauss_closure(fix1, strand_permutation(fix1))
    assert [len(s.passages) for s in closed.strands] == [len(s.passages) for s in fix1.strands]


def test_gauss_closure_errors():
    with pytest.raises(InvalidDiagram):
        gauss_closure(GaussCode.parse("1 O1+ 2"), I("(1 2)"))
    with pytest.raises(SizeMismatch):
        gauss_closure(to_gauss(fixture("fix1")), I("(1 2)"))
    with pytest.raises(ClosedComponent):
        gauss_closure(to_gauss(fixture("trefoil")), I("(1 2)"))
    with pytest.raises(SizeMismatch):
        virtual_closure(fixture("fix1"), I("(1 2)(3 4)(5 6)"))


@pytest.mark.parametrize("name, sigma", PAIRS, ids=PAIR_IDS)
def test_component_count_is_segment_cycle_count(name, sigma):
    d = fixture(name)
    c = virtual_closure(d, sigma)
    assert validate(c.base) == []
    assert c.component_count == burnside_count(strand_permutation(d), sigma)


@pytest.mark.parametrize("name, sigma", PAIRS, ids=PAIR_IDS)
def test_combinatorial_closure_matches_routed_closure(name, sigma):
    d = fixture(name)
    routed = virtual_closure(d, sigma)
    assert canonical_closed_code(gauss_closure(to_gauss(d), sigma)) == _canon(routed.base)


@pytest.mark.parametrize("name, sigma", PAIRS, ids=PAIR_IDS)
def test_routing_order_does_not_change_gauss_code(name, sigma):
    d = fixture(name)
    codes = set()
    for order in permutations(sigma.pairs()):
        m, _ = _route_all(d, sigma, order)
        codes.add(_canon(_finish(d, sigma, m).base))
    assert len(codes) == 1


@pytest.mark.parametrize("name, sigma", PAIRS, ids=PAIR_IDS)
def test_reduction_keeps_gauss_code_and_never_adds_virtuals(name, sigma):
    c = virtual_closure(fixture(name), sigma)
    r = reduce_virtual(c)
    assert validate(r.base) == []
    assert r.virtual_count <= c.virtual_count
    assert _canon(r.base) == _canon(c.base)


def test_removable_virtual_bigon_is_removed():
    base = strand_closure(fixture("fix1")).base
    detoured = _virtual_finger(base)
    assert detoured.virtual_count == 2
    reduced = reduce_virtual(ClosedVirtualDiagram(detoured))
    assert reduced.virtual_count == 0
    assert _canon(reduced.base) == _canon(base)


def test_link_type_closure_needs_no_virtuals():
    assert reduce_virtual(virtual_closure(fixture("fix1"), I("(1 2)(3 4)"))).virtual_count == 0


def test_is_link_type_certificates():
    assert is_link_type(trivial(1), I("(1 2)"))
    assert is_link_type(fixture("fix1"), I("(1 3)(2 4)"))
    assert not is_link_type(fixture("fix2"), I("(1 4)(2 3)"))


def test_excise_classical_diagram_is_identity():
    d = fixture("trefoil")
    out, sigma = excise_virtual(d)
    assert out == d and sigma is None


def test_excise_requires_closed_diagram():
    with pytest.raises(ClosedComponent):
        excise_virtual(fixture("fix1"))


@pytest.mark.parametrize("name", ["virtual_trefoil", "kishino"])
def test_excision_round_trip(name):
    v = fixture(name)
    linkoid, sigma = excise_virtual(v)
    assert validate(linkoid) == [] and linkoid.virtual_count == 0
    assert linkoid.classical_count == v.classical_count
    assert _canon(virtual_closure(linkoid, sigma).base) == _canon(v)


def test_excised_virtual_trefoil_is_a_knotoid():
    # one classical-free segment carries the only virtual crossing, so one cut suffices
    linkoid, sigma = excise_virtual(fixture("virtual_trefoil"))
    assert linkoid.n_strands == 1 and str(sigma) == "(1 2)"
    assert linkoid.classical_count == 2


def test_excised_kishino_is_two_strands():
    linkoid, sigma = excise_virtual(fixture("kishino"))
    assert linkoid.n_strands == 2
    assert virtual_closure(linkoid, sigma).component_count == 1
