"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from linkoid.involution import Involution
from linkoid.polynomial import ArrowPoly, LaurentPoly


@st.composite
def involutions(draw: st.DrawFn, n: int | None = None, max_n: int = 6) -> Involution:
    size = 2 * (n if n is not None else draw(st.integers(1, max_n)))
    order = draw(st.permutations(range(1, size + 1)))
    return Involution.from_pairs(zip(order[::2], order[1::2]))


@st.composite
def involution_pairs(draw: st.DrawFn, max_n: int = 6) -> tuple[Involution, Involution]:
    n = draw(st.integers(1, max_n))
    return draw(involutions(n)), draw(involutions(n))


coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda x: x != 0) | st.integers(
    -5, 5
).map(Fraction)

laurent_polys = st.dictionaries(st.integers(-8, 8), coefficients, max_size=12).map(LaurentPoly)

k_monomials = st.dictionaries(st.integers(1, 3), st.integers(1, 2), max_size=2).map(lambda d: tuple(sorted(d.items())))

arrow_polys = st.dictionaries(st.tuples(st.integers(-6, 6), k_monomials), coefficients, max_size=12).map(ArrowPoly)


@st.composite
def gauss_codes(draw: st.DrawFn, max_strands: int = 3, max_crossings: int = 6, closed: bool = False):
    """Random signed Gauss codes (not necessarily planar)."""
    from linkoid.diagram import GaussCode, GaussPassage, GaussStrand

    k = draw(st.integers(0, max_crossings))
    symbols = draw(st.permutations([c for c in range(1, k + 1) for _ in range(2)]))
    first_over = {c: draw(st.booleans()) for c in range(1, k + 1)}
    sign = {c: draw(st.sampled_from([1, -1])) for c in range(1, k + 1)}
    seen: set[int] = set()
    passages = []
    for c in symbols:
        over = first_over[c] if c not in seen else not first_over[c]
        seen.add(c)
        passages.append(GaussPassage(c, over, sign[c]))
    if closed:
        return GaussCode((GaussStrand(tuple(passages), closed=True),))
    n = draw(st.integers(1, max_strands))
    cuts = sorted(draw(st.lists(st.integers(0, len(passages)), min_size=n - 1, max_size=n - 1)))
    bounds = [0, *cuts, len(passages)]
    labels = draw(st.permutations(range(1, 2 * n + 1)))
    strands = tuple(
        GaussStrand(tuple(passages[bounds[i] : bounds[i + 1]]), False, labels[2 * i], labels[2 * i + 1])
        for i in range(n)
    )
    return GaussCode(strands)


@st.composite
def one_component_closures(draw: st.DrawFn, max_crossings: int = 6):
    """A random open code with a closure permutation giving one component."""
    from linkoid.diagram import strand_permutation
    from linkoid.involution import segment_cycles

    g = draw(gauss_codes(max_crossings=max_crossings))
    tau = strand_permutation(g)
    order = draw(st.permutations(range(1, tau.size + 1)))
    # chaining the strands end to end in a random order gives one component
    pairs = []
    ends = []
    for label in order:
        if tau(label) in ends or label in ends:
            continue
        ends.append(label)
    walk = [(x, tau(x)) for x in ends]
    for (_, head), (foot, _) in zip(walk, walk[1:] + walk[:1]):
        pairs.append((head, foot))
    sigma = Involution.from_pairs(pairs)
    assert segment_cycles(tau, sigma).count == 1
    return g, sigma
