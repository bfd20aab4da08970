from __future__ import annotations

import sys
from functools import lru_cache
from pathlib import Path

import pytest

from linkoid.diagram import GaussCode, PlanarDiagram, from_gauss, load
from linkoid.involution import Involution

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"
sys.path.insert(0, str(Path(__file__).resolve().parent))

# open linkoid fixtures used by the all-fixtures x all-sigma laws
LINKOID_FIXTURES = ("fix1", "fix2", "fix3", "fix5", "fix6", "virtual_hopf", "trivial2")
CLOSED_FIXTURES = ("trefoil", "virtual_trefoil", "kishino")


def I(text: str) -> Involution:  # noqa: E743
    return Involution.parse(text)


@lru_cache(maxsize=None)
def fixture(name: str) -> PlanarDiagram:
    return load(str(FIXTURE_DIR / f"{name}.json"))


def fixture_path(name: str) -> str:
    return str(FIXTURE_DIR / name)


def trivial(n: int) -> PlanarDiagram:
    """``n`` crossingless strands ``(1 2), (3 4), ...``."""
    return from_gauss(GaussCode.parse("; ".join(f"{2 * i + 1} {2 * i + 2}" for i in range(n))))


@pytest.fixture(params=LINKOID_FIXTURES)
def linkoid_fixture(request: pytest.FixtureRequest) -> tuple[str, PlanarDiagram]:
    return request.param, fixture(request.param)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        ok, detail = results[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
