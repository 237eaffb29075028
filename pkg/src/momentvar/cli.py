"""Command-line interface.

    momentvar analyze FILE   moment spectrum, energy, critical test, structure
    momentvar flow FILE      gradient descent to a critical point
    momentvar tables --dim N reproduce a classification table (exit 0 iff ok)
    momentvar d21            the one-parameter non-criticality law
    momentvar catalog        list or export named algebras

Exit codes: 0 success, 1 I/O or parse errors, 2 validation failures,
3 flow budget exhausted without convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import algebra, catalog, harness
from .algebra import AlgebraJSONError, AlgebraTensor
from .flow import FlowConfig, detect_degeneration, flow_to_critical, orbit_invariants
from .moment import critical_test, f_value, moment_matrix
from .linalg import hermitian_eig
from .structure import nikolayevsky, structure_checks, substructures

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_tensor(path: str) -> AlgebraTensor:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    try:
        return algebra.loads(text)
    except AlgebraJSONError as exc:
        raise CliError(f"cannot parse {path}: {exc}", EXIT_IO) from exc


def _fmt_float(x: float) -> str:
    return f"{x:.10g}"


def cmd_analyze(args) -> int:
    mu = _load_tensor(args.path)
    if mu.is_zero():
        raise CliError("input is the zero tensor; the energy is undefined there", EXIT_IO)
    assoc = algebra.is_associative(mu)
    if args.require_associative and not assoc:
        raise CliError(
            f"input is not associative (violation {assoc.max_violation:.3e})", EXIT_VALIDATION)
    mm = moment_matrix(mu)
    spectrum = hermitian_eig(mm.matrix).eigenvalues
    report = critical_test(mu, tol=args.tol)
    nik = nikolayevsky(mu)
    subs = substructures(mu) if assoc else None
    checks = structure_checks(mu, report) if (assoc and report.is_critical) else None
    if args.json:
        doc = {
            "dim": mu.dim,
            "norm_sq": mu.norm_sq,
            "associative": bool(assoc),
            "associativity_violation": assoc.max_violation,
            "moment_spectrum": [float(x) for x in spectrum],
            "f_value": f_value(mu),
            "critical_report": report.to_json_dict(),
            "nikolayevsky": nik.to_json_dict(),
            "substructures": subs.to_json_dict() if subs else None,
            "structure_checks": checks.to_json_dict() if checks else None,
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"algebra: dim {mu.dim}, |mu|^2 = {_fmt_float(mu.norm_sq)}")
    print(f"relations: {algebra.format_relations(mu)}")
    print(f"associative: {'yes' if assoc else 'no'} (max violation {assoc.max_violation:.3e})")
    print("moment spectrum: [" + ", ".join(_fmt_float(x) for x in spectrum) + "]")
    print(f"energy F = {_fmt_float(f_value(mu))}")
    if report.is_critical:
        print(f"critical: yes (residual {report.residual:.3e} <= {args.tol:g})")
        print(f"  c = {_fmt_float(report.c)}, type {report.type_str()}, "
              f"value {_fmt_float(report.value)}")
    else:
        print(f"critical: no (residual {report.residual:.3e} > {args.tol:g})")
    eigs = ", ".join(f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
                     for f in nik.eigen_rationals)
    print(f"nikolayevsky derivation: eigenvalues [{eigs}], "
          f"semisimple={nik.is_semisimple}, trace residual {nik.trace_residual:.3e}")
    if subs is not None:
        c_dim, a_dim, r_dim = subs.dims
        print(f"substructures: dim center {c_dim}, annihilator {a_dim}, radical {r_dim}")
    if checks is not None:
        print(f"structure checks: {'all pass' if checks.all_pass else 'FAILED'}")
    return EXIT_OK


def cmd_flow(args) -> int:
    mu = _load_tensor(args.path)
    if mu.is_zero():
        raise CliError("input is the zero tensor; no flow from it", EXIT_IO)
    if args.seed_metric is not None:
        rng = np.random.default_rng(args.seed_metric)
        mu = algebra.act_group(algebra.random_invertible(mu.dim, rng), mu)
    cfg = FlowConfig(step0=args.step, grad_tol=args.tol, max_iters=args.max_iter)
    trace = flow_to_critical(mu, cfg)
    doc = trace.to_json_dict()
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"converged: {trace.converged} after {trace.iterations} iterations"
              + (" (stalled)" if trace.stalled else ""))
        print(f"energy: {_fmt_float(trace.f_values[0])} -> {_fmt_float(trace.f_values[-1])}")
        rep = trace.final_report
        status = f"type {rep.type_str()}, value {_fmt_float(rep.value)}" if rep.is_critical \
            else f"not critical (residual {rep.residual:.3e})"
        print(f"final point: {status}")
        print(f"invariants (der, radical, ann, center): "
              f"{trace.start_invariants} -> {trace.final_invariants}")
        if trace.converged:
            print(f"degenerated: {detect_degeneration(trace)}")
    if not trace.converged:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_tables(args) -> int:
    rows = harness.run_table(args.dim, d22_samples=args.samples)
    if args.json:
        print(json.dumps([r.to_json_dict() for r in rows], indent=2))
    else:
        print(harness.format_table(rows))
    return EXIT_OK if harness.all_rows_as_expected(rows) else EXIT_VALIDATION


def cmd_d21(args) -> int:
    report = harness.d21_family(samples=args.samples)
    ok = all(not row["critical"] and row["distinct_eigenvalues"]
             and row["max_rel_err"] <= 1e-8 for row in report)
    if args.json:
        print(json.dumps({"samples": report, "law_verified": ok}, indent=2))
    else:
        for row in report:
            print(f"a = {row['a']:.4g}: spectrum ~ {row['scale']:.4g} * "
                  f"{tuple(round(p, 6) for p in row['predicted_direction'])}, "
                  f"rel err {row['max_rel_err']:.2e}, residual {row['residual']:.3e}, "
                  f"critical={row['critical']}")
        print("three distinct eigenvalues at every sample; never critical"
              if ok else "LAW VIOLATED")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in catalog.catalog_names():
            print(name)
        return EXIT_OK
    try:
        entry = catalog.catalog_get(args.name, dim=args.dim)
    except KeyError as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    if args.json:
        doc = algebra.to_json_dict(entry.tensor)
        doc["name"] = entry.name
        if entry.expected_type is not None:
            doc["expected_type"] = {"ks": list(entry.expected_type[0]),
                                    "ds": list(entry.expected_type[1])}
            doc["expected_value"] = float(entry.expected_value)
        print(json.dumps(doc, indent=2))
    else:
        print(f"{entry.name} (dim {entry.dim}): {algebra.format_relations(entry.tensor)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentvar", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for one algebra file")
    p.add_argument("path")
    p.add_argument("--json", action="store_true")
    p.add_argument("--tol", type=float, default=1e-7, help="criticality residual threshold")
    p.add_argument("--require-associative", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("flow", help="gradient descent from an algebra file")
    p.add_argument("path")
    p.add_argument("--step", type=float, default=None, help="initial step size")
    p.add_argument("--tol", type=float, default=1e-9, help="gradient norm stopping threshold")
    p.add_argument("--max-iter", type=int, default=200_000)
    p.add_argument("--seed-metric", type=int, default=None,
                   help="conjugate the input by a random invertible map first")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("tables", help="reproduce a classification table")
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    p.add_argument("--samples", type=int, default=2, help="extra d22 family samples")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("d21", help="check the d21 non-criticality law")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_d21)

    p = sub.add_parser("catalog", help="list or export named algebras")
    p.add_argument("action", choices=("list", "get"))
    p.add_argument("name", nargs="?")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog" and args.action == "get" and not args.name:
        print("catalog get requires a name", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
