"""Virtual spectra: every virtual closure of a linkoid at once.

The spectrum runs :func:`~linkoid.invariants.report` on the closure for every
``sigma`` in ``H_n``. In ``deduped`` mode closures are merged when their
fingerprint ``(component_count, jones, arrow)`` agrees; the arrow polynomial
here (and in the ``arrow`` selector) is normalized by the writhe so that it is
an invariant of the linkoid. Virtual link
equivalence is not decidable here, so the fingerprint is a proxy and a
deduped spectrum has *at most* as many entries as the true set of closures.
``multiset`` mode keeps one entry per ``sigma``.

Example:
    >>> from linkoid.spectrum import virtual_spectrum, spectral_values
    >>> s = virtual_spectrum(fix1)  # doctest: +SKIP
    >>> spectral_values(s, "height_bound")  # doctest: +SKIP
    [0, 0, 1]
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from .closure import ClosedVirtualDiagram, virtual_closure
from .diagram import PlanarDiagram, strand_permutation
from .errors import EmptyList, TooLarge, UnsupportedSelector
from .invariants import InvariantReport, report
from .involution import Involution, enumerate_hn
from .polynomial import mean

__all__ = [
    "MAX_SPECTRUM_STRANDS",
    "DEDUPED",
    "MULTISET",
    "SELECTORS",
    "REAL_SELECTORS",
    "Fingerprint",
    "SpectrumEntry",
    "Spectrum",
    "virtual_spectrum",
    "spectral_values",
    "avg_spectral",
    "min_spectral",
    "compare_spectra",
    "select",
]

MAX_SPECTRUM_STRANDS = 6
DEDUPED = "deduped"
MULTISET = "multiset"

Fingerprint = tuple[int, Any, Any]

SELECTORS: dict[str, Callable[[InvariantReport], Any]] = {
    "jones": lambda r: r.jones,
    "arrow": lambda r: r.normalized_arrow,
    "affine": lambda r: r.affine,
    "odd_writhe": lambda r: r.odd_writhe,
    "height_bound": lambda r: r.height_bound,
    "genus_bound": lambda r: r.genus_bound,
    "component_count": lambda r: r.component_count,
}
"""Invariant selectors by name; ``affine`` and ``odd_writhe`` may be ``None``."""

REAL_SELECTORS = frozenset({"odd_writhe", "height_bound", "genus_bound", "component_count"})


def select(r: InvariantReport, name: str) -> Any:
    """Read one invariant off a report.

    Raises:
        UnsupportedSelector: For an unknown name.
    """
    try:
        return SELECTORS[name](r)
    except KeyError:
        raise UnsupportedSelector(f"unknown invariant {name!r}; choose from {sorted(SELECTORS)}") from None


@dataclass(frozen=True)
class SpectrumEntry:
    """One class of closures sharing a fingerprint.

    Attributes:
        representative: The first member in ``H_n`` order.
        members: Every ``sigma`` in the class, in ``H_n`` order.
        fingerprint: ``(component_count, jones, arrow)``.
        closure: Routed closure of the representative.
        report: Invariants of the representative's closure.
    """

    representative: Involution
    members: tuple[Involution, ...]
    fingerprint: Fingerprint
    closure: ClosedVirtualDiagram
    report: InvariantReport

    def to_json(self) -> dict[str, Any]:
        count, jones, arrow = self.fingerprint
        return {
            "sigma": str(self.representative),
            "members": [str(s) for s in self.members],
            "fingerprint": {"component_count": count, "jones": str(jones), "arrow": str(arrow)},
            "report": self.report.to_json(),
        }


@dataclass(frozen=True)
class Spectrum:
    """The virtual spectrum of a linkoid.

    Attributes:
        tau: Strand permutation of the linkoid.
        entries: Classes in order of their representative's rank in ``H_n``.
        mode: ``deduped`` or ``multiset``.
    """

    tau: Involution
    entries: tuple[SpectrumEntry, ...]
    mode: str = DEDUPED

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def class_sizes(self) -> list[int]:
        return [len(e.members) for e in self.entries]

    def to_json(self) -> dict[str, Any]:
        return {
            "tau": str(self.tau),
            "mode": self.mode,
            "size": len(self.entries),
            "size_note": "at most the number of distinct closures" if self.mode == DEDUPED else "one entry per sigma",
            "entries": [e.to_json() for e in self.entries],
        }


def _fingerprint(r: InvariantReport) -> Fingerprint:
    return (r.component_count, r.jones, r.normalized_arrow)


def virtual_spectrum(
    d: PlanarDiagram,
    mode: str = DEDUPED,
    max_crossings: int | None = None,
    threads: int = 1,
) -> Spectrum:
    """Close ``d`` with every ``sigma`` and collect the reports.

    Args:
        d: Linkoid diagram with ``n <= 6`` strands.
        mode: ``deduped`` merges equal fingerprints, ``multiset`` does not.
        max_crossings: State-sum guard passed to :func:`report`.
        threads: Worker threads; results do not depend on this.

    Raises:
        TooLarge: If ``d`` has more than six strands.
        ValueError: On an unknown mode.
    """
    if mode not in (DEDUPED, MULTISET):
        raise ValueError(f"mode must be {DEDUPED!r} or {MULTISET!r}, got {mode!r}")
    tau = strand_permutation(d)
    if tau.n > MAX_SPECTRUM_STRANDS:
        raise TooLarge(f"spectrum over H_{tau.n} is beyond the guard (n <= {MAX_SPECTRUM_STRANDS})")
    sigmas = enumerate_hn(tau.n)

    def one(sigma: Involution) -> tuple[ClosedVirtualDiagram, InvariantReport]:
        closure = virtual_closure(d, sigma)
        return closure, report(d, sigma, max_crossings, closure=closure)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, sigmas))
    else:
        results = [one(s) for s in sigmas]

    if mode == MULTISET:
        entries = tuple(
            SpectrumEntry(s, (s,), _fingerprint(r), c, r) for s, (c, r) in zip(sigmas, results)
        )
        return Spectrum(tau, entries, mode)

    groups: dict[Fingerprint, list[int]] = {}
    for index, (_, r) in enumerate(results):
        groups.setdefault(_fingerprint(r), []).append(index)
    entries = []
    for fp, indices in groups.items():
        first = indices[0]
        closure, r = results[first]
        entries.append(SpectrumEntry(sigmas[first], tuple(sigmas[i] for i in indices), fp, closure, r))
    return Spectrum(tau, tuple(entries), mode)


def spectral_values(s: Spectrum, name: str) -> list[Any]:
    """Values of one invariant, one per entry, in ``H_n`` order.

    Entries where the invariant is undefined (``affine`` or ``odd_writhe`` of
    a multi-component closure) give ``None``.
    """
    return [select(e.report, name) for e in s.entries]


def _defined(s: Spectrum, name: str) -> list[Any]:
    values = [v for v in spectral_values(s, name) if v is not None]
    if not values:
        raise EmptyList(f"{name} is undefined on every entry of the spectrum")
    return values


def avg_spectral(s: Spectrum, name: str) -> Any:
    """Exact mean of an invariant over the spectrum entries.

    Each deduped class contributes one value (its representative's), so
    selectors outside the fingerprint are averaged per class, not per
    ``sigma``. Entries where the invariant is undefined are skipped.

    Raises:
        UnsupportedSelector: For an unknown name.
        EmptyList: If no entry has a defined value.
    """
    return mean(_defined(s, name))


def min_spectral(s: Spectrum, name: str) -> int:
    """Minimum of a real-valued invariant over the spectrum.

    Raises:
        UnsupportedSelector: For polynomial-valued or unknown selectors.
        EmptyList: If no entry has a defined value.
    """
    if name not in REAL_SELECTORS:
        raise UnsupportedSelector(f"{name!r} is not real-valued; choose from {sorted(REAL_SELECTORS)}")
    return min(_defined(s, name))


def compare_spectra(a: Spectrum, b: Spectrum, name: str | None = None) -> str:
    """Compare two spectra as evidence about the linkoids behind them.

    Different spectra prove the linkoids are distinct. Equal spectra prove
    nothing, so the answer is then ``"inconclusive"``, never ``"equivalent"``.

    Args:
        a: First spectrum.
        b: Second spectrum.
        name: Compare only this invariant's values (as sets); the default
            compares full fingerprints.
    """
    if name is None:
        left = {e.fingerprint for e in a.entries}
        right = {e.fingerprint for e in b.entries}
    else:
        left = {_hashable(v) for v in spectral_values(a, name)}
        right = {_hashable(v) for v in spectral_values(b, name)}
    if a.tau.n != b.tau.n or left != right:
        return "distinct"
    return "inconclusive"


def _hashable(value: Any) -> Any:
    return str(value) if value is not None else None
