"""Regenerate the fixture files in this directory.

Run ``python tests/fixtures/build.py``. Diagrams come from signed Gauss codes
(realized by :func:`linkoid.diagram.from_gauss`) or from planar drawings;
curve sets come from sampled parametrizations.
"""

from __future__ import annotations

import json
import math
import pathlib

import numpy as np

from linkoid.closure import reduce_virtual, virtual_closure
from linkoid.diagram import GaussCode, dump, from_gauss, switch_crossings
from linkoid.geometry import Drawing, diagram_from_drawing
from linkoid.involution import Involution

HERE = pathlib.Path(__file__).resolve().parent

# Two strands crossing twice, strand 1 over at the first crossing it meets.
HOPF_DRAWING = Drawing(
    curves=[
        [(-1.0, 1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)],
        [(2.0, 2.0), (0.0, 2.0), (0.0, 0.0), (2.0, 0.0)],
    ],
    layers=[[1, 0, 0], [0, 0, 1]],
    labels=[(1, 2), (3, 4)],
)

GAUSS_FIXTURES = {
    # one crossing between two strands; closing each strand on itself gives a virtual Hopf link
    "virtual_hopf": "1 O1+ 2; 3 U1+ 4",
    # closing with (1 2)(3 4) gives the Kishino knot
    "fix3": "1 O1+ O2+ U1+ O3- 4; 2 U2+ O4- U3- U4- 3",
    # closing with (1 2)(3 4) gives a 3-crossing virtual knot with unit Jones polynomial
    "fix5": "1 O1+ U2+ O3- 4; 3 U1+ O2+ U3- 2",
    # closing with (1 3)(2 4) makes crossings 4..7 odd
    "fix6": "1 U4+ O5+ U6+ U7- 2; 3 U5+ O4+ U1+ O2- O3+ U3+ U2- O6+ O7- O1+ 4",
    "trivial2": "1 2; 3 4",
    "trefoil": "[O1+ U2+ O3+ U1+ O2+ U3+]",
}


def trefoil_points(t: np.ndarray) -> np.ndarray:
    return np.stack([np.sin(t) + 2 * np.sin(2 * t), np.cos(t) - 2 * np.cos(2 * t), -np.sin(3 * t)], axis=1)


def closed_trefoil(points: int = 48) -> list[list[float]]:
    t = np.linspace(0.0, 2 * math.pi, points + 1)
    pts = trefoil_points(t)
    pts[-1] = pts[0]
    return pts.tolist()


def open_trefoil(gap: float, points: int = 48) -> list[list[float]]:
    """Trefoil polygon cut open so the endpoints are ``gap`` x diameter apart."""
    closed = trefoil_points(np.linspace(0.0, 2 * math.pi, 2001))
    diameter = float(np.linalg.norm(closed.max(axis=0) - closed.min(axis=0)))
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2
        end = trefoil_points(np.array([2 * math.pi - mid]))[0]
        if np.linalg.norm(end - closed[0]) < gap * diameter:
            lo = mid
        else:
            hi = mid
    t = np.linspace(0.0, 2 * math.pi - lo, points + 1)
    return trefoil_points(t).tolist()


def write_curves(name: str, curves: list, labels: list) -> None:
    path = HERE / f"{name}.json"
    path.write_text(json.dumps({"curves": curves, "labels": labels}, indent=2) + "\n", encoding="utf-8")


def main() -> None:
    fix1 = diagram_from_drawing(HOPF_DRAWING)
    fix2 = switch_crossings(fix1)
    dump(fix1, str(HERE / "fix1.json"), {"description": "open Hopf linkoid"})
    dump(fix2, str(HERE / "fix2.json"), {"description": "FIX-1 with both crossings switched"})
    for name, code in GAUSS_FIXTURES.items():
        dump(from_gauss(GaussCode.parse(code)), str(HERE / f"{name}.json"), {"gauss": code})
    vt = reduce_virtual(virtual_closure(fix2, Involution.parse("(1 4)(2 3)")))
    dump(vt.base, str(HERE / "virtual_trefoil.json"), {"description": "reduced (1 4)(2 3) closure of FIX-2"})
    fix3 = from_gauss(GaussCode.parse(GAUSS_FIXTURES["fix3"]))
    kishino = reduce_virtual(virtual_closure(fix3, Involution.parse("(1 2)(3 4)")))
    dump(kishino.base, str(HERE / "kishino.json"), {"description": "reduced (1 2)(3 4) closure of FIX-3"})

    write_curves("closed_trefoil", [closed_trefoil()], [[1, 2]])
    write_curves("open_trefoil", [open_trefoil(0.01)], [[1, 2]])
    write_curves("segment", [[[0.0, 0.0, 0.0], [1.0, 0.3, -0.2]]], [[1, 2]])


if __name__ == "__main__":
    main()
