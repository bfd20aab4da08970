"""Command-line front end.

Every verb reads its inputs from files and writes JSON to stdout. Exit codes:
0 on success, 1 when the computation fails (a JSON object ``{"error": ...}``
is printed), 2 on a usage error.

Examples::

    linkoid invariants fixtures/fix2.json --sigma "(1 4)(2 3)"
    linkoid enum-involutions 2
    linkoid measure fixtures/open_trefoil.json --sigma "(1 2)" --invariant jones --samples 2000 --seed 7
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Callable, Sequence

from . import closure, curves3d, diagram, invariants, spectrum
from .errors import InvalidDiagram, LinkoidError
from .involution import Involution, burnside_count, enumerate_hn, segment_cycles

__all__ = ["main", "build_parser", "VERBS"]


def _sigma(text: str) -> Involution:
    try:
        return Involution.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(payload: Any, out: io.TextIOBase) -> None:
    if isinstance(payload, str):
        out.write(payload if payload.endswith("\n") else payload + "\n")
    else:
        out.write(json.dumps(payload, indent=2) + "\n")


def _value(value: Any) -> Any:
    if value is None:
        return "n/a"
    if isinstance(value, int):
        return value
    return str(value)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> tuple[int, Any]:
    d = diagram.load(args.file)
    problems = diagram.validate(d)
    payload: dict[str, Any] = {"valid": not problems, "violations": problems}
    if not problems:
        payload.update(
            {
                "strands": len(d.strands),
                "classical": d.classical_count,
                "virtual": d.virtual_count,
                "gauss": str(diagram.to_gauss(d)),
                "tau": str(diagram.strand_permutation(d)) if not any(s.closed for s in d.strands) else None,
            }
        )
    return (0 if not problems else 1), payload


def cmd_invariants(args: argparse.Namespace) -> tuple[int, Any]:
    d = diagram.load(args.file)
    r = invariants.report(d, args.sigma, args.max_crossings)
    return 0, r.to_json()


def cmd_closure(args: argparse.Namespace) -> tuple[int, Any]:
    d = diagram.load(args.file)
    c = closure.virtual_closure(d, args.sigma)
    if args.reduce:
        c = closure.reduce_virtual(c)
    if args.gauss:
        return 0, {
            "gauss": str(c.gauss()),
            "virtual": c.virtual_count,
            "components": c.component_count,
            **c.provenance,
        }
    return 0, c.serialize()


def cmd_excise(args: argparse.Namespace) -> tuple[int, Any]:
    d = diagram.load(args.file)
    linkoid, sigma = closure.excise_virtual(d)
    return 0, diagram.serialize(linkoid, {"sigma": str(sigma) if sigma is not None else None})


def cmd_spectrum(args: argparse.Namespace) -> tuple[int, Any]:
    d = diagram.load(args.file)
    s = spectrum.virtual_spectrum(d, args.mode, args.max_crossings, args.threads)
    if args.csv:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        names = list(spectrum.SELECTORS)
        writer.writerow(["sigma", "members", *names])
        for e in s.entries:
            writer.writerow(
                [str(e.representative), " ".join(str(m) for m in e.members)]
                + [_value(spectrum.select(e.report, n)) for n in names]
            )
        return 0, buffer.getvalue()
    payload = s.to_json()
    if args.invariant:
        values = spectrum.spectral_values(s, args.invariant)
        payload["invariant"] = args.invariant
        payload["values"] = [_value(v) for v in values]
        payload["average"] = _value(spectrum.avg_spectral(s, args.invariant))
        if args.invariant in spectrum.REAL_SELECTORS:
            payload["minimum"] = spectrum.min_spectral(s, args.invariant)
    return 0, payload


def cmd_enum(args: argparse.Namespace) -> tuple[int, Any]:
    if args.n < 1:
        raise LinkoidError("n must be positive")
    sigmas = enumerate_hn(args.n)
    if args.tau is None:
        return 0, "".join(f"{s}\n" for s in sigmas)
    if args.tau.n != args.n:
        raise LinkoidError(f"tau acts on {args.tau.size} labels, expected {2 * args.n}")
    rows = []
    for s in sigmas:
        part = segment_cycles(args.tau, s)
        rows.append(
            {
                "sigma": str(s),
                "segment_cycles": part.count,
                "burnside": burnside_count(args.tau, s),
                "orbits": [list(o) for o in part.orbits],
            }
        )
    return 0, rows


def _curve_kwargs(args: argparse.Namespace) -> dict[str, Any]:
    return {"eps": args.eps, "eps_angle": args.eps_angle, "threads": args.threads}


def cmd_measure(args: argparse.Namespace) -> tuple[int, Any]:
    c = curves3d.load_curves(args.file)
    est = curves3d.measure(
        c, args.sigma, args.invariant, args.samples, args.seed, keep_samples=args.dump_samples, **_curve_kwargs(args)
    )
    return 0, est.to_json()


def cmd_weighted(args: argparse.Namespace) -> tuple[int, Any]:
    c = curves3d.load_curves(args.file)
    ws = curves3d.weighted_spectrum(c, args.invariant, args.samples, args.seed, **_curve_kwargs(args))
    return 0, ws.to_json()


def cmd_spectral_measure(args: argparse.Namespace) -> tuple[int, Any]:
    c = curves3d.load_curves(args.file)
    est = curves3d.spectral_measure(c, args.invariant, args.samples, args.seed, **_curve_kwargs(args))
    return 0, est.to_json()


VERBS: dict[str, Callable[[argparse.Namespace], tuple[int, Any]]] = {
    "validate": cmd_validate,
    "invariants": cmd_invariants,
    "closure": cmd_closure,
    "spectrum": cmd_spectrum,
    "measure": cmd_measure,
    "weighted-spectrum": cmd_weighted,
    "spectral-measure": cmd_spectral_measure,
    "enum-involutions": cmd_enum,
    "excise": cmd_excise,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkoid", description="Invariants of linkoids via virtual closure.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def with_file(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="input file")
        return p

    with_file("validate", "check a diagram file")

    p = with_file("invariants", "invariant report of one closure")
    p.add_argument("--sigma", type=_sigma, help="closure permutation in cycle notation")
    p.add_argument("--max-crossings", type=int, help="state-sum guard (default 28 or $LINKOID_MAX_CROSSINGS)")

    p = with_file("closure", "routed virtual closure")
    p.add_argument("--sigma", type=_sigma, required=True)
    p.add_argument("--reduce", action="store_true", help="apply virtual moves after routing")
    p.add_argument("--gauss", action="store_true", help="print the closed Gauss code instead of the diagram")

    with_file("excise", "cut closure arcs out of a closed virtual diagram")

    p = with_file("spectrum", "virtual spectrum over every closure permutation")
    p.add_argument("--mode", choices=[spectrum.DEDUPED, spectrum.MULTISET], default=spectrum.DEDUPED)
    p.add_argument("--invariant", choices=sorted(spectrum.SELECTORS), help="also report values, average, minimum")
    p.add_argument("--max-crossings", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", action="store_true", help="tabular output")

    p = sub.add_parser("enum-involutions", help="list H_n in cycle notation")
    p.add_argument("n", type=int)
    p.add_argument("--tau", type=_sigma, help="also count segment cycles against this strand permutation")

    curve_invariants = sorted(curves3d.CURVE_INVARIANTS)
    for name, needs_sigma, help_text in (
        ("measure", True, "sphere-averaged invariant of one closure of open curves"),
        ("weighted-spectrum", False, "estimates for every closure with endpoint-distance weights"),
        ("spectral-measure", False, "weighted sum of the estimates over all closures"),
    ):
        p = with_file(name, help_text)
        if needs_sigma:
            p.add_argument("--sigma", type=_sigma, required=True)
        p.add_argument("--invariant", choices=curve_invariants, required=True)
        p.add_argument("--samples", type=int, default=1000, help="number of directions N")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--eps", type=float, help="distance tolerance (default 1e-9 x diameter)")
        p.add_argument("--eps-angle", type=float, default=curves3d.DEFAULT_EPS_ANGLE)
        p.add_argument("--threads", type=int, default=1)
        if name == "measure":
            p.add_argument("--dump-samples", action="store_true", help="include every per-direction value")
    return parser


def main(argv: Sequence[str] | None = None, out: io.TextIOBase | None = None) -> int:
    """Run one command; returns the exit code."""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, payload = VERBS[args.verb](args)
    except InvalidDiagram as exc:
        _emit({"error": "InvalidDiagram", "message": str(exc), "violations": exc.violations}, out)
        return 1
    except (LinkoidError, OSError, ValueError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, out)
        return 1
    _emit(payload, out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
