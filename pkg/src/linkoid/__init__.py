"""Invariants of linkoids through their virtual closures.

A linkoid is a diagram of ``n`` open strands with ``2n`` labelled endpoints.
Joining the endpoints in pairs with a fixed-point-free involution ``sigma``
and making every new crossing virtual gives a virtual link; invariants of
that link are invariants of the pair (linkoid, ``sigma``).

Modules:
    diagram: planar diagrams, Gauss codes and JSON files.
    involution: closure permutations and segment cycles.
    closure: routed and Gauss-level virtual closures, arc excision.
    polynomial: exact Laurent, arrow and affine polynomials.
    invariants: bracket, Jones, arrow, affine index, odd writhe, bounds.
    spectrum: virtual spectra and spectral invariants.
    curves3d: projections of polygonal curves and Monte Carlo measures.
"""

from __future__ import annotations

from .closure import ClosedVirtualDiagram, excise_virtual, gauss_closure, reduce_virtual, virtual_closure
from .diagram import GaussCode, PlanarDiagram, from_gauss, load, parse, serialize, to_gauss, validate
from .errors import LinkoidError
from .invariants import InvariantReport, affine_index, arrow, bracket, jones, odd_writhe, report
from .involution import Involution, burnside_count, enumerate_hn, segment_cycles
from .polynomial import AffinePoly, ArrowPoly, LaurentPoly, RealPoly
from .spectrum import Spectrum, avg_spectral, min_spectral, spectral_values, virtual_spectrum

__all__ = [
    "AffinePoly",
    "ArrowPoly",
    "ClosedVirtualDiagram",
    "GaussCode",
    "InvariantReport",
    "Involution",
    "LaurentPoly",
    "LinkoidError",
    "PlanarDiagram",
    "RealPoly",
    "Spectrum",
    "affine_index",
    "arrow",
    "avg_spectral",
    "bracket",
    "burnside_count",
    "enumerate_hn",
    "excise_virtual",
    "from_gauss",
    "gauss_closure",
    "jones",
    "load",
    "min_spectral",
    "odd_writhe",
    "parse",
    "reduce_virtual",
    "report",
    "segment_cycles",
    "serialize",
    "spectral_values",
    "to_gauss",
    "validate",
    "virtual_closure",
    "virtual_spectrum",
]
