from __future__ import annotations

import json
from fractions import Fraction

import pytest
from conftest import LINKOID_FIXTURES, fixture, trivial

from linkoid.diagram import to_gauss
from linkoid.errors import EmptyList, TooLarge, UnsupportedSelector
from linkoid.invariants import jones, report
from linkoid.involution import double_factorial, enumerate_hn
from linkoid.polynomial import LaurentPoly, mean
from linkoid.spectrum import (
    DEDUPED,
    MULTISET,
    SELECTORS,
    avg_spectral,
    compare_spectra,
    min_spectral,
    select,
    spectral_values,
    virtual_spectrum,
)

A = LaurentPoly.variable()


def test_fix1_spectrum_has_three_classes():
    s = virtual_spectrum(fixture("fix1"))
    assert len(s) == 3
    assert [str(e.representative) for e in s.entries] == ["(1 2)(3 4)", "(1 3)(2 4)", "(1 4)(2 3)"]
    assert spectral_values(s, "component_count") == [2, 1, 1]
    assert spectral_values(s, "height_bound") == [0, 0, 1]
    assert avg_spectral(s, "height_bound") == Fraction(1, 3)
    assert min_spectral(s, "height_bound") == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_trivial_linkoid_spectrum_has_n_classes(n):
    s = virtual_spectrum(trivial(n))
    assert len(s) == n
    assert sorted(spectral_values(s, "component_count")) == list(range(1, n + 1))
    assert min_spectral(s, "genus_bound") == 0


def test_single_strand_spectrum():
    s = virtual_spectrum(trivial(1))
    assert spectral_values(s, "jones") == [1]
    for name in SELECTORS:
        assert avg_spectral(s, name) == select(s.entries[0].report, name)


def test_fix3_jones_values_are_distinct():
    s = virtual_spectrum(fixture("fix3"), MULTISET)
    values = spectral_values(s, "jones")
    g = to_gauss(fixture("fix3"))
    assert values == [jones(g, sigma) for sigma in enumerate_hn(2)]
    assert values[0] == 1
    assert len(set(values)) == 3
    assert avg_spectral(virtual_spectrum(fixture("fix3")), "jones") == mean(values)


def test_fix1_and_fix2_are_distinguished():
    a, b = virtual_spectrum(fixture("fix1")), virtual_spectrum(fixture("fix2"))
    assert set(spectral_values(a, "jones")) != set(spectral_values(b, "jones"))
    assert compare_spectra(a, b) == "distinct"
    assert compare_spectra(a, b, "jones") == "distinct"
    assert min_spectral(b, "height_bound") == 0


def test_equal_spectra_are_inconclusive():
    a = virtual_spectrum(fixture("fix1"))
    assert compare_spectra(a, virtual_spectrum(fixture("fix1"))) == "inconclusive"


@pytest.mark.parametrize("name", LINKOID_FIXTURES)
def test_class_sizes_cover_hn(name):
    d = fixture(name)
    s = virtual_spectrum(d)
    assert sum(s.class_sizes) == double_factorial(d.n_strands)
    assert len({e.fingerprint for e in s.entries}) == len(s)
    for e in s.entries:
        for sigma in e.members:
            r = report(d, sigma)
            assert (r.component_count, r.jones, r.normalized_arrow) == e.fingerprint


def test_multiset_mode_has_one_entry_per_sigma():
    s = virtual_spectrum(fixture("fix1"), MULTISET)
    assert len(s) == 3 and s.class_sizes == [1, 1, 1]
    t = virtual_spectrum(trivial(3), MULTISET)
    assert len(t) == 15


def test_multiset_average_weights_every_sigma():
    s = virtual_spectrum(trivial(2), MULTISET)
    assert avg_spectral(s, "component_count") == Fraction(2 + 1 + 1, 3)
    assert avg_spectral(virtual_spectrum(trivial(2)), "component_count") == Fraction(3, 2)


def test_undefined_values_are_skipped():
    s = virtual_spectrum(fixture("fix1"))
    # the Hopf closure has two components; the others are the unknot and the mirrored virtual trefoil
    assert spectral_values(s, "odd_writhe") == [None, 0, -2]
    assert min_spectral(s, "odd_writhe") == -2
    assert avg_spectral(s, "affine") == mean([v for v in spectral_values(s, "affine") if v is not None])


def test_undefined_everywhere_is_an_error():
    s = virtual_spectrum(trivial(2), MULTISET)
    only_links = type(s)(s.tau, s.entries[:1], s.mode)
    with pytest.raises(EmptyList):
        avg_spectral(only_links, "odd_writhe")


def test_selector_errors():
    s = virtual_spectrum(fixture("fix1"))
    with pytest.raises(UnsupportedSelector):
        min_spectral(s, "jones")
    with pytest.raises(UnsupportedSelector):
        spectral_values(s, "khovanov")


def test_size_guard():
    with pytest.raises(TooLarge):
        virtual_spectrum(trivial(7))


def test_threads_do_not_change_the_result():
    d = fixture("fix3")
    assert virtual_spectrum(d, threads=1).to_json() == virtual_spectrum(d, threads=3).to_json()


def test_json_is_serializable():
    data = virtual_spectrum(fixture("fix1")).to_json()
    assert json.loads(json.dumps(data)) == data
    assert data["mode"] == DEDUPED
