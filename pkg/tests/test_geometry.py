from __future__ import annotations

import numpy as np
import pytest

from linkoid.diagram import strand_permutation, to_gauss, validate
from linkoid.errors import IrregularProjection
from linkoid.geometry import Drawing, diagram_from_drawing, signed_area, winding_number


def test_signed_area_orientation():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert signed_area(square) == pytest.approx(1.0)
    assert signed_area(square[::-1]) == pytest.approx(-1.0)


def test_winding_number():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
    assert winding_number(np.array([0.5, 0.5]), square) == 1
    assert winding_number(np.array([0.5, 0.5]), square[::-1]) == -1
    assert winding_number(np.array([2.0, 0.5]), square) == 0


def test_single_crossing_sign_follows_layers():
    curves = [[(-1.0, 0.0), (1.0, 0.0)], [(0.0, -1.0), (0.0, 1.0)]]
    up = diagram_from_drawing(Drawing(curves, layers=[[1], [0]]))
    down = diagram_from_drawing(Drawing(curves, layers=[[0], [1]]))
    assert validate(up) == [] and up.classical_count == 1
    # horizontal over, vertical under crossing right to left: positive
    assert list(up.signs.values()) == [1]
    assert list(down.signs.values()) == [-1]
    assert str(to_gauss(up)) == "1 O1+ 2; 3 U1+ 4"


def test_disjoint_curves_have_no_crossings():
    d = diagram_from_drawing(Drawing([[(0, 0), (1, 0)], [(0, 1), (1, 1)]]))
    assert d.classical_count == 0 and len(d.components) == 2
    assert validate(d) == []
    assert str(strand_permutation(d)) == "(1 2)(3 4)"


def test_crossing_through_a_vertex_is_irregular():
    curves = [[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.5)], [(0.0, -1.0), (0.0, 1.0)]]
    with pytest.raises(IrregularProjection):
        diagram_from_drawing(Drawing(curves))


def test_overlapping_segments_are_irregular():
    with pytest.raises(IrregularProjection):
        diagram_from_drawing(Drawing([[(0, 0), (2, 0)], [(1, 0), (3, 0)]]))


def test_custom_labels():
    d = diagram_from_drawing(Drawing([[(0, 0), (1, 0)], [(0, 1), (1, 1)]], labels=[(4, 1), (2, 3)]))
    assert str(strand_permutation(d)) == "(1 4)(2 3)"
