"""JSON command line front end.

Every input and output is a JSON document carrying "schema": 1 and a
"kind" tag; payloads follow the serialisation helpers of the individual
modules.  Reports go to standard output with sorted keys, diagnostics to
standard error.  Exit codes: 0 for success, 1 for malformed input, 2 for
semantic violations.
"""

import argparse
import json
import sys
from fractions import Fraction

from .cone import hilbert_basis
from .extreal import INF, is_finite
from .multiproj import (EmptyProj, grading_from_data, grading_to_data,
                        proj_system_of_fans)
from .sysfan import (is_separated, product, support_is_full,
                     system_from_data, system_to_data, validate_system)
from .troppre import (chart_polynomial, chart_values_from_data,
                      compare_to_trop, nonneg_point_from_chart_values,
                      nonneg_point_to_data, nonneg_strata,
                      point_from_chart_values, strata, trop_eval,
                      trop_point_from_data, trop_point_to_data)
from .tropembed import (classical_point, forget_refinement,
                        hypersurface_from_data, kapranov_membership,
                        nonneg_trop_point, refine_embedding, refined_trop,
                        valued_scalar_from_data)
from .tropembed import trop_point as classical_trop

SCHEMA = 1


class DocumentError(Exception):
    """Malformed input: unreadable file, bad JSON, or wrong document kind."""


def _read_document(path, kinds):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as err:
        raise DocumentError("cannot read %s: %s" % (path, err)) from None
    except json.JSONDecodeError as err:
        raise DocumentError("%s is not JSON: %s" % (path, err)) from None
    if not isinstance(data, dict):
        raise DocumentError("%s: top level must be an object" % path)
    if data.get("schema") != SCHEMA:
        raise DocumentError("%s: expected \"schema\": %d" % (path, SCHEMA))
    if data.get("kind") not in kinds:
        raise DocumentError("%s: expected kind %s, found %r"
                            % (path, " or ".join(sorted(kinds)),
                               data.get("kind")))
    return data


def _emit(document):
    json.dump(document, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _report(command, **payload):
    document = {"schema": SCHEMA, "kind": "report", "command": command}
    document.update(payload)
    return document


def _value(text):
    text = str(text)
    return INF if text == "inf" else Fraction(text)


def _value_text(value):
    return str(value) if is_finite(value) else "inf"


def _load_system(path):
    return system_from_data(_read_document(path, {"system_of_fans"}))


def _class_by_id(system, value):
    classes = system.omega().classes
    index = int(value)
    if not 0 <= index < len(classes):
        raise ValueError("no chart class with id %d" % index)
    return classes[index]


def _classical_from_data(system, data):
    """Decode {"chart": id, "values": {generator index: scalar}}."""
    chart = _class_by_id(system, data["chart"])
    gens = hilbert_basis(chart.cone).generators
    values = {}
    for key, payload in data["values"].items():
        index = int(key)
        if not 0 <= index < len(gens):
            raise ValueError("no generator with index %d" % index)
        values[gens[index]] = valued_scalar_from_data(payload)
    return classical_point(system, chart, values)


def _point_for(system, data):
    """A classical or canonicalised tropical point from a point document."""
    if data["kind"] == "classical_point":
        return classical_trop(_classical_from_data(system, data))
    chart, values = chart_values_from_data(system, data)
    return point_from_chart_values(system, chart, values)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args):
    data = _read_document(args.file, {"system_of_fans", "grading"})
    if data["kind"] == "grading":
        grading = grading_from_data(data)
        _emit(_report("validate", ok=True, issues=[],
                      variables=grading.n,
                      degrees=[list(d) for d in grading.degrees]))
        return 0
    system = system_from_data(data)
    issues = validate_system(system)
    _emit(_report("validate", ok=not issues,
                  issues=[{"kind": issue.kind,
                           "where": [str(w) for w in issue.where],
                           "detail": issue.detail} for issue in issues]))
    return 0 if not issues else 2


def cmd_omega(args):
    system = _load_system(args.file)
    omega = system.omega()
    classes = [{"id": cls.class_id,
                "rays": [list(r) for r in cls.cone.rays],
                "dim": cls.cone.dim,
                "members": list(cls.members)} for cls in omega.classes]
    trop = [{"class": cls.class_id, "dim": dim}
            for cls, dim in strata(system)]
    nonneg = [{"class": cls.class_id,
               "face": [list(r) for r in face.rays],
               "dim": dim}
              for cls, face, dim in nonneg_strata(system)]
    _emit(_report("omega", classes=classes,
                  order=sorted([a, b] for a, b in omega.order_pairs()),
                  trop_strata=trop, nonneg_strata=nonneg))
    return 0


def cmd_separated(args):
    system = _load_system(args.file)
    ok, witness = is_separated(system)
    payload = {"separated": ok}
    if ok:
        payload["support_is_full"] = support_is_full(system)
        payload["witness"] = None
    else:
        a, b, meet, reason = witness
        payload["witness"] = {"class_a": a.class_id, "class_b": b.class_id,
                              "intersection": [list(r) for r in meet.rays],
                              "reason": reason}
    _emit(_report("separated", **payload))
    return 0


def cmd_proj(args):
    grading = grading_from_data(_read_document(args.file, {"grading"}))
    proj = proj_system_of_fans(grading)
    document = {"schema": SCHEMA, "kind": "system_of_fans"}
    document.update(system_to_data(proj.system))
    document["charts"] = {label: sorted(subset)
                          for label, subset in proj.chart_subsets.items()}
    _emit(document)
    return 0


def cmd_trop(args):
    system = _load_system(args.system)
    data = _read_document(args.point, {"classical_point", "chart_values"})
    point = _point_for(system, data)
    document = {"schema": SCHEMA, "kind": "trop_point"}
    document.update(trop_point_to_data(point))
    _emit(document)
    return 0


def cmd_nonneg(args):
    system = _load_system(args.system)
    data = _read_document(args.point, {"classical_point", "chart_values"})
    if data["kind"] == "classical_point":
        point = nonneg_trop_point(_classical_from_data(system, data))
    else:
        chart, values = chart_values_from_data(system, data)
        point = nonneg_point_from_chart_values(system, chart, values)
    document = {"schema": SCHEMA, "kind": "nonneg_point"}
    document.update(nonneg_point_to_data(point))
    if args.compare:
        document["comparison"] = trop_point_to_data(
            compare_to_trop(system, point))
    _emit(document)
    return 0


def cmd_kapranov(args):
    data = _read_document(args.poly, {"polynomial"})
    if "system" not in data or "chart" not in data:
        raise DocumentError("%s: a chart polynomial needs embedded "
                            "\"system\" and \"chart\" entries" % args.poly)
    system = system_from_data(data["system"])
    chart = _class_by_id(system, data["chart"])
    poly = chart_polynomial(system, chart,
                            [(tuple(term["exp"]), _value(term["val"]))
                             for term in data["terms"]])
    point = trop_point_from_data(
        system, _read_document(args.point, {"trop_point"}))
    values = []
    for s, val in poly.terms:
        if is_finite(val):
            total = trop_eval(point, s)
            if is_finite(total):
                values.append((s, val + total))
    low = min((v for _, v in values), default=None)
    achieving = [{"exp": list(s), "value": _value_text(v)}
                 for s, v in values if v == low]
    _emit(_report("kapranov",
                  member=kapranov_membership(poly, point),
                  achieving_terms=achieving))
    return 0


def cmd_refine(args):
    grading = grading_from_data(_read_document(args.grading, {"grading"}))
    gtilde = hypersurface_from_data(
        grading, _read_document(args.gtilde, {"polynomial"}))
    clearing = None
    if args.clearing is not None:
        clearing = [int(x) for x in args.clearing.split(",")]
    refinement = refine_embedding(grading, gtilde.terms, clearing)
    points = []
    for path in args.point:
        data = _read_document(path, {"classical_point"})
        point = _classical_from_data(refinement.old_proj.system, data)
        refined = refined_trop(refinement, point)
        projected = forget_refinement(refinement, refined)
        points.append({
            "refined": trop_point_to_data(refined),
            "projection": trop_point_to_data(projected),
            "projection_matches_direct":
                projected == classical_trop(point)})
    _emit(_report("refine",
                  grading=grading_to_data(refinement.new_grading),
                  x_degree=list(refinement.x_degree),
                  clearing=list(refinement.clearing),
                  points=points))
    return 0


def cmd_product(args):
    left = _load_system(args.left)
    right = _load_system(args.right)
    combined = product(left, right, separator=args.separator)
    document = {"schema": SCHEMA, "kind": "system_of_fans"}
    document.update(system_to_data(combined))
    _emit(document)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="prevtrop",
        description="Tropicalized toric prevarieties: systems of fans, "
                    "chart posets, valued points, and refinements.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system or grading document")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("omega", help="chart classes, order, and strata")
    p.add_argument("file")
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("separated",
                       help="separation check with witness or support test")
    p.add_argument("file")
    p.set_defaults(func=cmd_separated)

    p = sub.add_parser("proj", help="chart system of a multigrading")
    p.add_argument("file")
    p.set_defaults(func=cmd_proj)

    p = sub.add_parser("trop", help="tropicalize a point document")
    p.add_argument("point")
    p.add_argument("system")
    p.set_defaults(func=cmd_trop)

    p = sub.add_parser("nonneg", help="nonnegative tropicalization")
    p.add_argument("point")
    p.add_argument("system")
    p.add_argument("--compare", action="store_true",
                   help="also emit the image under the comparison map")
    p.set_defaults(func=cmd_nonneg)

    p = sub.add_parser("kapranov", help="tropical hypersurface membership")
    p.add_argument("poly")
    p.add_argument("point")
    p.set_defaults(func=cmd_kapranov)

    p = sub.add_parser("refine",
                       help="adjoin a coordinate for a homogeneous polynomial")
    p.add_argument("grading")
    p.add_argument("--gtilde", required=True,
                   help="polynomial document for the new coordinate")
    p.add_argument("--clearing",
                   help="comma separated exponents of the clearing monomial")
    p.add_argument("--point", action="append", default=[],
                   help="classical point document to push through "
                        "(repeatable)")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("product", help="product of two systems of fans")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--separator", default="|")
    p.set_defaults(func=cmd_product)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as err:
        print("error: %s" % err, file=sys.stderr)
        return 1
    except (ValueError, KeyError, EmptyProj, ZeroDivisionError) as err:
        message = err.args[0] if err.args else err
        print("error: %s" % message, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
