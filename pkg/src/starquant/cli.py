"""Batch front end: load a problem description, orchestrate checks and
constructions, emit JSON and text reports.

Commands: check, star, present, quotient, verify.  Exit codes: 0 all
checks pass, 1 a check failed, 2 inconclusive at the configured bounds,
3 usage or parse error.  Outputs are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import HPoly, Poly, hseries_to_json, multiindices_up_to
from .config import ConfigError, ProblemConfig
from .groebner import buchberger, jacobian_rank_check
from .parsing import ParseError, parse_poly
from .presentation import (
    build_expansion_matrix,
    emit_presentation,
    expand_star_monomial,
    invert_expansion,
    star_basis_coords,
)
from .quotient import (
    QuotientBasis,
    build_reduction_system,
    check_two_sided,
    lift_generators,
    multiplication_table,
    verify_flatness,
)
from .star import (
    check_semiformal_filtration,
    verify_associativity,
    verify_commutator_bracket,
    verify_degree_bound,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3

_GATE_DEGREE = 2  # sweep bound for the structural gates of present/quotient


def _mono_str(mono, variables):
    return Poly.monomial(mono).to_string(variables)


def _index_str(index, variables):
    return "*".join(variables[i] for i in index) if index else "1"


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def run_check(cfg):
    names = cfg.variables
    degree = cfg.degree
    checks = {}

    witness = cfg.structure.check_jacobi()
    if witness is None:
        checks["jacobi"] = {"status": "pass"}
    else:
        i, j, k, jac = witness
        checks["jacobi"] = {"status": "fail", "witness": {
            "triple": [names[i], names[j], names[k]],
            "jacobiator": jac.to_string(names)}}

    spec = None
    skip_reason = None
    try:
        spec = cfg.star_spec(validate=False)
    except ValueError as err:
        skip_reason = str(err)

    engine_checks = ("associativity", "commutator_bracket", "degree_bound",
                     "semiformal_filtration")
    if spec is None:
        for name in engine_checks:
            checks[name] = {"status": "skipped", "reason": skip_reason}
    else:
        bad = verify_associativity(spec, degree)
        if bad is None:
            checks["associativity"] = {"status": "pass"}
        else:
            a, b, c, k = bad
            checks["associativity"] = {"status": "fail", "witness": {
                "triple": [_mono_str(m, names) for m in (a, b, c)],
                "h_order": k}}

        bad = verify_commutator_bracket(spec, degree)
        if bad is None:
            checks["commutator_bracket"] = {"status": "pass"}
        else:
            a, b, comm = bad
            checks["commutator_bracket"] = {"status": "fail", "witness": {
                "pair": [_mono_str(a, names), _mono_str(b, names)],
                "commutator": comm.to_string(names)}}

        violations = verify_degree_bound(spec, degree)
        if not violations:
            checks["degree_bound"] = {"status": "pass"}
        else:
            checks["degree_bound"] = {"status": "fail", "witness": [
                {"order": m, "pair": [_mono_str(a, names), _mono_str(b, names)],
                 "degree": deg, "allowed": allowed}
                for m, a, b, deg, allowed in violations[:5]]}

        bad = check_semiformal_filtration(spec, degree)
        if bad is None:
            checks["semiformal_filtration"] = {"status": "pass"}
        else:
            a, b, k, deg, allowed = bad
            checks["semiformal_filtration"] = {"status": "fail", "witness": {
                "pair": [_mono_str(a, names), _mono_str(b, names)],
                "h_order": k, "degree": deg, "allowed": allowed}}

    failed = sorted(n for n, c in checks.items() if c["status"] == "fail")
    report = {
        "schema": "starquant/check-report/v1",
        "engine": cfg.engine,
        "truncation": cfg.truncation,
        "degree_bound": degree,
        "checks": checks,
        "failed": failed,
    }
    return report, EXIT_FAIL if failed else EXIT_PASS


def _render_check(report):
    lines = [f"check report (engine {report['engine']}, N={report['truncation']},"
             f" degree {report['degree_bound']})"]
    for name in sorted(report["checks"]):
        entry = report["checks"][name]
        lines.append(f"  {name}: {entry['status']}")
        if entry["status"] == "fail":
            lines.append(f"    witness: {json.dumps(entry['witness'], sort_keys=True)}")
        elif entry["status"] == "skipped":
            lines.append(f"    reason: {entry['reason']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# star
# ---------------------------------------------------------------------------

def run_star(cfg, f_text, g_text):
    spec = cfg.star_spec()
    f = parse_poly(f_text, cfg.variables)
    g = parse_poly(g_text, cfg.variables)
    result = spec.star_poly(f, g)
    rendered = result.to_string(cfg.variables, cfg.order)
    report = {
        "schema": "starquant/star-report/v1",
        "engine": cfg.engine,
        "truncation": cfg.truncation,
        "f": f.to_string(cfg.variables, cfg.order),
        "g": g.to_string(cfg.variables, cfg.order),
        "result": rendered,
        "series": hseries_to_json(result, cfg.order),
    }
    return report, EXIT_PASS


# ---------------------------------------------------------------------------
# gating shared by present and quotient
# ---------------------------------------------------------------------------

def _structural_gates(cfg):
    """(spec, None) when the engine is sound, else (None, (name, detail))."""
    witness = cfg.structure.check_jacobi()
    if witness is not None:
        i, j, k, jac = witness
        names = cfg.variables
        return None, ("jacobi-identity",
                      f"Jacobiator of ({names[i]}, {names[j]}, {names[k]}) "
                      f"is {jac.to_string(names)}")
    try:
        spec = cfg.star_spec(validate=False)
    except ValueError as err:
        return None, ("engine-construction", str(err))
    bound = min(cfg.degree, _GATE_DEGREE)
    bad = verify_associativity(spec, bound)
    if bad is not None:
        return None, ("engine-associativity",
                      f"monomial triple {[_mono_str(m, cfg.variables) for m in bad[:3]]} "
                      f"fails at order h^{bad[3]}")
    bad = verify_commutator_bracket(spec, bound)
    if bad is not None:
        return None, ("commutator-bracket",
                      f"commutator of {_mono_str(bad[0], cfg.variables)}, "
                      f"{_mono_str(bad[1], cfg.variables)} does not match the bracket")
    return spec, None


def _refusal(command, name, detail):
    return {
        "schema": f"starquant/{command}-report/v1",
        "status": "refused",
        "failed_hypothesis": name,
        "detail": detail,
    }


# ---------------------------------------------------------------------------
# present
# ---------------------------------------------------------------------------

def run_present(cfg):
    spec, failure = _structural_gates(cfg)
    if failure is not None:
        return _refusal("present", *failure), EXIT_FAIL
    relations = emit_presentation(spec, max(cfg.degree, 2))
    report = {
        "schema": "starquant/present-report/v1",
        "status": "ok",
        "engine": cfg.engine,
        "truncation": cfg.truncation,
        "degree_bound": relations.degree_bound,
        "relation_count": len(relations),
        "relations": relations.to_json(cfg.variables)["relations"],
        "text": relations.render(cfg.variables),
    }
    return report, EXIT_PASS


def _render_present(report):
    if report["status"] != "ok":
        return (f"present: refused ({report['failed_hypothesis']})\n"
                f"  {report['detail']}\n")
    head = (f"presentation mod h^{report['truncation']} up to degree "
            f"{report['degree_bound']} ({report['relation_count']} relations)")
    return head + "\n" + report["text"] + "\n"


# ---------------------------------------------------------------------------
# quotient
# ---------------------------------------------------------------------------

def run_quotient(cfg):
    if cfg.ideal_generators is None:
        raise ConfigError("quotient needs an [ideal] block in the problem file")
    names = cfg.variables
    spec, failure = _structural_gates(cfg)
    if failure is not None:
        return _refusal("quotient", *failure), EXIT_FAIL

    gens = cfg.ideal_generators
    gb = buchberger(gens, cfg.order)
    if not cfg.structure.is_poisson_ideal(gens, gb):
        return _refusal(
            "quotient", "poisson-ideal",
            "the ideal is not closed under the Poisson bracket"), EXIT_FAIL

    rank = jacobian_rank_check(gens, cfg.order)
    if not rank.passed:
        return _refusal(
            "quotient", "maximal-rank",
            "the Jacobian of the generators drops rank on the variety; "
            f"witness ideal basis {[g.to_string(names) for g in rank.witness.basis]}"
        ), EXIT_FAIL

    try:
        lifting = lift_generators(spec, gens, cfg.lifting_strategy)
    except ValueError as err:
        return _refusal("quotient", "central-lifting", str(err)), EXIT_FAIL

    two_sided = check_two_sided(spec, lifting, min(cfg.degree, 3))
    if two_sided.status == "witness":
        return _refusal("quotient", "two-sided-ideal", two_sided.detail), EXIT_FAIL
    if two_sided.status == "inconclusive":
        report = _refusal("quotient", "two-sided-ideal", two_sided.detail)
        report["status"] = "inconclusive"
        return report, EXIT_INCONCLUSIVE

    qbasis = QuotientBasis(gb, cfg.degree)
    system = build_reduction_system(spec, lifting, qbasis)
    table_degree = cfg.table_degree
    if table_degree is None:
        table_degree = cfg.degree // 2
    table = multiplication_table(system, table_degree)
    flatness = verify_flatness(system, cfg.degree)

    table_json = []
    for (a, b), row in sorted(table.items()):
        table_json.append({
            "left": _index_str(a, names),
            "right": _index_str(b, names),
            "product": [{"basis": _index_str(e, names), "coeff": hp.to_string()}
                        for e, hp in sorted(row.items())],
        })
    report = {
        "schema": "starquant/quotient-report/v1",
        "status": "ok" if flatness.passed() else "flatness-failed",
        "engine": cfg.engine,
        "truncation": cfg.truncation,
        "degree_bound": cfg.degree,
        "order": cfg.order.kind,
        "lifting": cfg.lifting_strategy,
        "hypotheses": {
            "jacobi-identity": "pass",
            "poisson-ideal": "pass",
            "maximal-rank": "pass",
            "central-lifting": "pass" if cfg.lifting_strategy == "identity" else "n/a",
            "two-sided-ideal": two_sided.to_json(),
        },
        "classical_basis": gb.to_json(names),
        "basis_counts_per_degree": qbasis.counts_per_degree(),
        "basis_counts_cumulative": qbasis.sms.cumulative_counts(),
        "table_degree": table_degree,
        "multiplication_table": table_json,
        "flatness": flatness.to_json(),
    }
    if not flatness.passed():
        code = EXIT_FAIL if not flatness.independence else EXIT_INCONCLUSIVE
    else:
        code = EXIT_PASS
    return report, code


def _render_quotient(report):
    if report["status"] == "refused" or report.get("failed_hypothesis"):
        return (f"quotient: {report['status']} ({report['failed_hypothesis']})\n"
                f"  {report['detail']}\n")
    lines = [f"quotient report (engine {report['engine']}, N={report['truncation']},"
             f" degree {report['degree_bound']}, order {report['order']})"]
    lines.append(f"  lifting: {report['lifting']}")
    lines.append(f"  basis counts per degree: {report['basis_counts_per_degree']}"
                 f" (cumulative {report['basis_counts_cumulative']})")
    flat = report["flatness"]
    lines.append(f"  flatness: independence={flat['independence']} "
                 f"torsion_free={flat['torsion_free']} counts={flat['counts_match']}")
    lines.append(f"  multiplication table up to degree {report['table_degree']}:")
    for entry in report["multiplication_table"]:
        rhs = " + ".join(f"({t['coeff']})*[{t['basis']}]" for t in entry["product"]) \
            or "0"
        lines.append(f"    [{entry['left']}] * [{entry['right']}] = {rhs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_verify(cfg):
    spec, failure = _structural_gates(cfg)
    if failure is not None:
        return _refusal("verify", *failure), EXIT_FAIL
    names = cfg.variables
    degree = cfg.degree

    indices = multiindices_up_to(cfg.dimension, degree)
    roundtrip_failures = []
    for index in indices:
        coords = star_basis_coords(spec, expand_star_monomial(spec, index))
        if coords != {index: HPoly.one()}:
            roundtrip_failures.append(_index_str(index, names))

    matrix = build_expansion_matrix(spec, degree)
    inverse = invert_expansion(matrix)
    left_identity = matrix.is_identity_product(inverse)
    right_identity = inverse.is_identity_product(matrix)

    classical = None
    if degree >= 2:
        relations = emit_presentation(spec, degree)
        classical = all(r.is_classical_commutator() for r in relations)

    ok = (not roundtrip_failures) and left_identity and right_identity \
        and classical is not False
    report = {
        "schema": "starquant/verify-report/v1",
        "status": "ok" if ok else "fail",
        "engine": cfg.engine,
        "truncation": cfg.truncation,
        "degree_bound": degree,
        "star_basis_roundtrip": {
            "checked": len(indices),
            "failures": roundtrip_failures,
        },
        "expansion_matrix": {
            "rows": len(matrix.rows),
            "working_degree": matrix.working_degree(),
            "max_row_support": max(matrix.row_support_counts().values(), default=0),
            "product_is_identity": left_identity and right_identity,
        },
        "relations_classical_limit": classical,
    }
    return report, EXIT_PASS if ok else EXIT_FAIL


def _render_verify(report):
    lines = [f"verify report (engine {report['engine']}, N={report['truncation']},"
             f" degree {report['degree_bound']}): {report['status']}"]
    rt = report["star_basis_roundtrip"]
    lines.append(f"  star-basis round-trip: {rt['checked']} monomials, "
                 f"{len(rt['failures'])} failures")
    em = report["expansion_matrix"]
    lines.append(f"  expansion matrix: {em['rows']} rows, working degree "
                 f"{em['working_degree']}, max row support {em['max_row_support']}, "
                 f"A*A^-1=Id: {em['product_is_identity']}")
    lines.append(f"  relations classical limit: {report['relations_classical_limit']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _ArgumentParser(
        prog="starquant",
        description="Deformation quantization toolkit: truncated star "
                    "products, presentations, and deformed quotients.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_star_args=False):
        p.add_argument("config", help="problem description (TOML)")
        if with_star_args:
            p.add_argument("f", help="left factor (polynomial expression)")
            p.add_argument("g", help="right factor (polynomial expression)")
        p.add_argument("--degree", type=int, help="override the degree bound")
        p.add_argument("--trunc", type=int, help="override the truncation N")
        p.add_argument("--order", choices=("lex", "grlex", "grevlex"),
                       help="override the monomial order")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker count; results are independent of it")
        p.add_argument("--json", dest="json_path", help="write the JSON report here")
        p.add_argument("--text", dest="text_path", help="write the text report here")

    common(sub.add_parser("check", help="run the deformation axiom checks"))
    common(sub.add_parser("star", help="compute f * g"), with_star_args=True)
    common(sub.add_parser("present", help="emit the relation ideal"))
    common(sub.add_parser("quotient", help="build the deformed quotient"))
    common(sub.add_parser("verify", help="certify the star basis and matrices"))
    return parser


def _apply_overrides(cfg, args):
    if args.trunc is not None:
        if args.trunc < 1:
            raise ConfigError("--trunc must be >= 1")
        cfg.truncation = args.trunc
    if args.degree is not None:
        if args.degree < 0:
            raise ConfigError("--degree must be >= 0")
        cfg.degree = args.degree
    if args.order is not None:
        from .algebra import MonomialOrder
        cfg.order = MonomialOrder(args.order, cfg.order.priority)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")


def _write(path, payload):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(payload)


_RENDERERS = {
    "check": _render_check,
    "present": _render_present,
    "quotient": _render_quotient,
    "verify": _render_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = ProblemConfig.load(args.config)
        _apply_overrides(cfg, args)
        if args.command == "check":
            report, code = run_check(cfg)
        elif args.command == "star":
            report, code = run_star(cfg, args.f, args.g)
        elif args.command == "present":
            report, code = run_present(cfg)
        elif args.command == "quotient":
            report, code = run_quotient(cfg)
        else:
            report, code = run_verify(cfg)
    except (ConfigError, ParseError, OSError) as err:
        print(f"starquant: error: {err}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "star":
        text = report["result"] + "\n"
    else:
        text = _RENDERERS[args.command](report)

    json_payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    json_path = args.json_path or cfg.output_json
    text_path = args.text_path or cfg.output_text
    if json_path:
        _write(json_path, json_payload)
    if text_path:
        _write(text_path, text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
