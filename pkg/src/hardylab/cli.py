"""Command-line entry point.

Exit codes: 0 success, 1 usage or I/O error, 2 a Hardy condition (or a
certificate check) failed, 3 the state is ineligible.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .born import (
    HARDY_EVENTS,
    ZERO_TOL,
    hardy_report,
    sample_outcomes,
    scan_hardy,
    search_best_cut,
)
from .construct import hardy_setup
from .errors import HardyError, IneligibleState, NoEligibleComponent
from .lhv import (
    Scenario,
    contradiction_certificate,
    hardy_constraints,
    hardy_scenario,
    lhv_lp_feasibility,
    parse_number,
    quantum_table,
    verify_certificate,
)
from .multiparty import (
    PeelingPlan,
    npartite_report,
    omega_split,
    search_best_plan,
    tripartite_contradiction,
    tripartite_report,
)
from .state import (
    ELIGIBLE,
    Bipartition,
    classify,
    complex_pairs,
    default_cut,
    load_state,
    schmidt_decompose,
)

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INELIGIBLE = 0, 1, 2, 3

COMMANDS = ("schmidt", "classify", "hardy", "sample", "scan", "lhv", "tripartite", "npartite", "verify-cert")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    cut: str | None = None
    pair: tuple[int, int] | None = None
    tolerance: float = ZERO_TOL
    samples: int = 1
    seed: int = 0
    output_format: str = "json"
    search: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise UsageError("--tol must be positive")
        if self.samples < 1:
            raise UsageError("--n must be at least 1")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardylab", description="Hardy-type nonlocality checks for pure states.")
    parser.add_argument("--version", action="version", version=f"hardylab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, state=True, cut=True):
        if state:
            p.add_argument("--in", dest="input", required=True, help="state file (hardy-state/1 JSON)")
            p.add_argument("--normalize", action="store_true", help="rescale the amplitudes to unit norm")
        if cut:
            p.add_argument("--cut", help="bipartition such as '1,3|2,4' (1-based parties)")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("schmidt", help="Schmidt decomposition across a cut")
    common(p)

    p = sub.add_parser("classify", help="product / uniform spectrum / Hardy-eligible")
    common(p)
    p.add_argument("--rtol", type=float, default=1e-9, help="relative tolerance for distinct weights")

    p = sub.add_parser("hardy", help="six Hardy probabilities for a bipartition")
    common(p)
    p.add_argument("--pair", type=_int_list, help="Schmidt indices i,j (0-based) overriding the default pair")
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    p.add_argument("--search", action="store_true", help="try every bipartition, keep the best")

    p = sub.add_parser("sample", help="Monte-Carlo draws of Hardy observables")
    common(p)
    p.add_argument("--pair", type=_int_list)
    p.add_argument("--settings", default="Y1,Y2", help="one setting per side, e.g. X1,X2")
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunks", type=int, default=1, help="independently seeded sub-streams")

    p = sub.add_parser("scan", help="closed-form Hardy probability over the two-qubit family")
    p.add_argument("--resolution", type=int, default=10000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = sub.add_parser("lhv", help="no-local-model certificates (enumeration and LP)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input", help="state file; its Hardy table is tested")
    src.add_argument("--table", help="JSON with 'scenario' and 'table' to test directly")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--cut")
    p.add_argument("--pair", type=_int_list)
    p.add_argument("--exact", action="store_true", help="force exact rational LP (table entries as 'p/q')")
    p.add_argument("--out")

    p = sub.add_parser("tripartite", help="single-particle Hardy conditions for three parties")
    common(p, cut=False)
    p.add_argument("--component", type=int, help="component index overriding the default choice")
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    p.add_argument("--certificate", action="store_true", help="include the 162-strategy certificate")

    p = sub.add_parser("npartite", help="Hardy conditions via iterated peeling")
    common(p, cut=False)
    p.add_argument("--pair", type=_int_list, help="the two Hardy parties (1-based)")
    p.add_argument("--peel", type=_int_list, help="peel order (1-based parties)")
    p.add_argument("--select", type=_int_list, help="component index per peel (0-based)")
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    p.add_argument("--search", action="store_true", help="try every Hardy pair, keep the best")

    p = sub.add_parser("verify-cert", help="re-check a certificate produced by 'lhv' or 'tripartite'")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    return parser


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _cut(args, state) -> Bipartition:
    return Bipartition.parse(args.cut, state.dims) if args.cut else default_cut(state.dims)


def _pair(args):
    if args.pair is None:
        return None
    if len(args.pair) != 2:
        raise UsageError("--pair needs exactly two indices")
    return args.pair


def _ineligible_doc(exc) -> dict:
    doc = {"error": "IneligibleState", "message": str(exc)}
    cls = getattr(exc, "classification", None)
    if cls is not None:
        doc["classification"] = cls.tag
    return doc


def _cmd_schmidt(args, state):
    cut = _cut(args, state)
    sd = schmidt_decompose(state, cut)
    cls = classify(sd)
    doc = {
        "format": "hardy-schmidt/1",
        "dims": list(state.dims),
        "cut": cut.label(),
        "rank": sd.rank,
        "coefficients": [float(c) for c in sd.coefficients],
        "left": [complex_pairs(v) for v in sd.left],
        "right": [complex_pairs(v) for v in sd.right],
        "classification": cls.tag,
        "witness_pair": list(cls.witness_pair) if cls.witness_pair else None,
    }
    return EXIT_OK, doc


def _cmd_classify(args, state):
    cut = _cut(args, state)
    sd = schmidt_decompose(state, cut)
    cls = classify(sd, args.rtol)
    doc = {
        "cut": cut.label(),
        "coefficients": [float(c) for c in sd.coefficients],
        "classification": cls.tag,
        "witness_pair": list(cls.witness_pair) if cls.witness_pair else None,
    }
    return (EXIT_OK if cls.tag == ELIGIBLE else EXIT_INELIGIBLE), doc


def _report_exit(report) -> int:
    return EXIT_OK if report.passed else EXIT_FAILED


def _cmd_hardy(args, state):
    if args.search:
        report = search_best_cut(state, tol=args.tol)
    else:
        report = hardy_report(state, _cut(args, state), _pair(args), tol=args.tol)
    return _report_exit(report), report.to_dict()


def _hardy_observables(args, state):
    sd = schmidt_decompose(state, _cut(args, state))
    pair = _pair(args)
    if pair is None:
        cls = classify(sd)
        if cls.tag != ELIGIBLE:
            raise IneligibleState(cls)
    _, obs = hardy_setup(sd, pair)
    return {o.name: o for o in obs.as_tuple()}


def _cmd_sample(args, state):
    obs = _hardy_observables(args, state)
    names = [s.strip() for s in args.settings.split(",")]
    if len(names) != 2 or names[0] not in ("X1", "Y1") or names[1] not in ("X2", "Y2"):
        raise UsageError("--settings must name one of X1,Y1 and one of X2,Y2, e.g. 'X1,X2'")
    counts = sample_outcomes(state, [obs[n] for n in names], args.n, args.seed, args.chunks)
    doc = counts.to_dict()
    forbidden = []
    for clauses in HARDY_EVENTS[:-1]:
        if [c[0] for c in clauses] == names:
            outcome = tuple(float(c[1]) for c in clauses)
            forbidden.append({"outcome": list(outcome), "count": counts.count(outcome)})
    doc["forbidden"] = forbidden
    failed = any(f["count"] for f in forbidden)
    return (EXIT_FAILED if failed else EXIT_OK), doc


def _cmd_scan(args, stdout, stderr):
    result = scan_hardy(args.resolution)
    if args.format == "csv":
        _emit(result.to_csv(), args.out, stdout)
        stderr.write(f"max {result.max_probability!r} at theta {result.argmax_theta!r}\n")
        return EXIT_OK
    doc = {
        "format": "hardy-scan/1",
        "resolution": args.resolution,
        "max_probability": result.max_probability,
        "argmax_theta": result.argmax_theta,
        "refined_probability": result.refined_probability,
        "refined_theta": result.refined_theta,
        "curve": [
            {"theta": float(t), "p1": float(a), "p2": float(b), "hardy_probability": float(p)}
            for t, a, b, p in zip(result.theta, result.p1, result.p2, result.probability)
        ],
    }
    _emit(dumps(doc), args.out, stdout)
    return EXIT_OK


def _cmd_lhv(args):
    if args.table:
        with open(args.table, encoding="utf-8") as fh:
            doc = json.load(fh)
        try:
            scenario = Scenario.from_dict(doc["scenario"])
            table = [parse_number(x) for x in doc["table"]]
        except (KeyError, TypeError) as exc:
            raise HardyError(f"table file needs 'scenario' and 'table': {exc}") from None
        result = lhv_lp_feasibility(scenario, table, exact=True if args.exact else None)
        return EXIT_OK, result.to_dict()
    state = load_state(args.input, normalize=args.normalize or None)
    obs = _hardy_observables(args, state)
    scenario = hardy_scenario()
    zeros, target = hardy_constraints()
    cert = contradiction_certificate(scenario, zeros, target)
    table = quantum_table(state, scenario, obs)
    lp = lhv_lp_feasibility(scenario, table)
    enum_ok = cert.conclusion and verify_certificate(cert)
    lp_ok = (not lp.feasible) and verify_certificate(lp)
    doc = {
        "format": "hardy-lhv/1",
        "enumeration": cert.to_dict(),
        "lp": lp.to_dict(),
        "no_local_model": enum_ok and lp_ok,
    }
    return (EXIT_OK if enum_ok and lp_ok else EXIT_FAILED), doc


def _cmd_tripartite(args, state):
    report = tripartite_report(state, tol=args.tol, component=args.component)
    doc = report.to_dict()
    if args.certificate:
        cert = tripartite_contradiction()
        split = omega_split(cert)
        doc["certificate"] = cert.to_dict()
        doc["omega_split"] = {k: len(v) for k, v in split.items()}
    return _report_exit(report), doc


def _cmd_npartite(args, state):
    n = state.n_parties
    if args.search:
        report = search_best_plan(state, tol=args.tol)
        return _report_exit(report), report.to_dict()
    pair = tuple(p - 1 for p in args.pair) if args.pair else (0, 1)
    if len(pair) != 2:
        raise UsageError("--pair needs exactly two parties")
    if args.peel:
        order = tuple(p - 1 for p in args.peel)
    else:
        order = PeelingPlan.for_pair(n, pair).peel_order
    plan = PeelingPlan(tuple(sorted(pair)), order, tuple(args.select) if args.select else None)
    report = npartite_report(state, plan, tol=args.tol)
    doc = report.to_dict()
    doc["peel_order"] = [p + 1 for p in plan.peel_order]
    return _report_exit(report), doc


def _cmd_verify(args):
    with open(args.input, encoding="utf-8") as fh:
        doc = json.load(fh)
    certs = []
    if isinstance(doc, dict) and doc.get("format") == "hardy-lhv/1":
        certs = [("enumeration", doc["enumeration"]), ("lp", doc["lp"])]
    elif isinstance(doc, dict) and "certificate" in doc:
        certs = [("enumeration", doc["certificate"])]
    else:
        certs = [(doc.get("kind", "certificate") if isinstance(doc, dict) else "certificate", doc)]
    results = {name: verify_certificate(c) for name, c in certs}
    out = {"valid": all(results.values()), "checks": results}
    return (EXIT_OK if out["valid"] else EXIT_FAILED), out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        RunConfig(
            command=args.command,
            input=getattr(args, "input", None),
            cut=getattr(args, "cut", None),
            pair=getattr(args, "pair", None),
            tolerance=getattr(args, "tol", ZERO_TOL),
            samples=getattr(args, "n", 1),
            seed=getattr(args, "seed", 0),
            output_format=getattr(args, "format", "json"),
            search=getattr(args, "search", False),
        )
        if args.command == "scan":
            return _cmd_scan(args, stdout, stderr)
        if args.command == "lhv":
            code, doc = _cmd_lhv(args)
        elif args.command == "verify-cert":
            code, doc = _cmd_verify(args)
        else:
            state = load_state(args.input, normalize=args.normalize or None)
            handler = {
                "schmidt": _cmd_schmidt,
                "classify": _cmd_classify,
                "hardy": _cmd_hardy,
                "sample": _cmd_sample,
                "tripartite": _cmd_tripartite,
                "npartite": _cmd_npartite,
            }[args.command]
            code, doc = handler(args, state)
    except UsageError as exc:
        stderr.write(f"hardylab: error: {exc}\n")
        return EXIT_USAGE
    except (IneligibleState, NoEligibleComponent) as exc:
        doc = _ineligible_doc(exc)
        if isinstance(exc, NoEligibleComponent):
            doc["error"] = "NoEligibleComponent"
        _emit(dumps(doc), getattr(args, "out", None), stdout)
        stderr.write(f"hardylab: {doc['error']}: {exc}\n")
        return EXIT_INELIGIBLE
    except (OSError, json.JSONDecodeError, HardyError) as exc:
        stderr.write(f"hardylab: error: {exc}\n")
        return EXIT_USAGE
    _emit(dumps(doc), getattr(args, "out", None), stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
