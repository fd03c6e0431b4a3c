"""JSON records for bundles, chains and certificates.

Scalars are written as decimal strings ("num/den" over the rationals) so
records survive any JSON reader without precision loss.
"""

from __future__ import annotations

import json

from .chainbundle import GluedBundle
from .errors import RecordError
from .exactmath import FieldSpec, Matrix
from .projchain import Anchor, Chain, Link, ParamPiece


def dumps(record) -> str:
    """Canonical text form: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(record, sort_keys=True, indent=1) + "\n"


def loads(text: str, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_file(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def _require(rec, key, where):
    if not isinstance(rec, dict) or key not in rec:
        raise RecordError(f"{where}: missing key '{key}'")
    return rec[key]


def _field(rec, where):
    try:
        return FieldSpec.parse(rec.get("field")) if isinstance(rec, dict) else FieldSpec.prime()
    except ValueError as exc:
        raise RecordError(f"{where}.field: {exc}") from exc


def _scalar(F, value, where):
    try:
        return F.parse_scalar(value) if isinstance(value, str) else F(int(value))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise RecordError(f"{where}: not a scalar: {value!r}") from exc


def _scalars(F, values, where):
    if not isinstance(values, list):
        raise RecordError(f"{where}: expected a list")
    return [_scalar(F, v, f"{where}[{i}]") for i, v in enumerate(values)]


# -- bundles -------------------------------------------------------------------

def bundle_to_record(b: GluedBundle):
    F = b.field
    return {
        "field": str(F),
        "components": [list(c.exponents) for c in b.components],
        "gluings": [[F.format_scalar(x) for x in g.flat()] for g in b.gluings],
    }


def bundle_from_record(rec, where="bundle") -> GluedBundle:
    F = _field(rec, where)
    comps = _require(rec, "components", where)
    if not isinstance(comps, list) or not comps:
        raise RecordError(f"{where}.components: expected a nonempty list")
    for i, c in enumerate(comps):
        if not isinstance(c, list) or not c or not all(isinstance(e, int) for e in c):
            raise RecordError(f"{where}.components[{i}]: expected a nonempty list of integers")
    r = len(comps[0])
    glue_rec = rec.get("gluings", [])
    if not isinstance(glue_rec, list):
        raise RecordError(f"{where}.gluings: expected a list")
    gluings = []
    for i, flat in enumerate(glue_rec):
        vals = _scalars(F, flat, f"{where}.gluings[{i}]")
        if len(vals) != r * r:
            raise RecordError(f"{where}.gluings[{i}]: expected {r * r} entries, got {len(vals)}")
        gluings.append(Matrix._raw(F, [vals[k * r:(k + 1) * r] for k in range(r)], r))
    try:
        return GluedBundle(F, comps, gluings)
    except ValueError as exc:
        raise RecordError(f"{where}: {exc}") from exc


# -- chains ----------------------------------------------------------------------

def chain_to_record(c: Chain):
    F = c.field
    fmt = F.format_scalar
    return {
        "field": str(F),
        "r": c.r,
        "links": [
            {
                "pieces": [[[fmt(x) for x in row] for row in p.coeffs.rows] for p in link.pieces],
                "nodes": [[pa, fmt(ta), pb, fmt(tb)] for pa, ta, pb, tb in link.nodes],
            }
            for link in c.links
        ],
        "anchors": [
            [
                {
                    "left_piece": a.left_piece,
                    "left_param": fmt(a.left_param),
                    "right_piece": a.right_piece,
                    "right_param": fmt(a.right_param),
                    "point": [fmt(x) for x in a.point],
                }
                for a in group
            ]
            for group in c.anchors
        ],
    }


def chain_from_record(rec, where="chain") -> Chain:
    F = _field(rec, where)
    r = _require(rec, "r", where)
    if not isinstance(r, int) or r < 1:
        raise RecordError(f"{where}.r: expected a positive integer")
    links = []
    for i, lrec in enumerate(_require(rec, "links", where)):
        lw = f"{where}.links[{i}]"
        pieces = []
        for k, prec in enumerate(_require(lrec, "pieces", lw)):
            rows = [_scalars(F, row, f"{lw}.pieces[{k}][{m}]") for m, row in enumerate(prec)]
            if len(rows) != r + 1 or len({len(row) for row in rows}) != 1:
                raise RecordError(f"{lw}.pieces[{k}]: expected {r + 1} rows of equal length")
            pieces.append(ParamPiece(F, Matrix._raw(F, rows, len(rows[0]))))
        if not 1 <= len(pieces) <= 2:
            raise RecordError(f"{lw}: links have one or two pieces")
        nodes = []
        for m, node in enumerate(lrec.get("nodes", [])):
            if not isinstance(node, list) or len(node) != 4:
                raise RecordError(f"{lw}.nodes[{m}]: expected [piece, param, piece, param]")
            nodes.append((int(node[0]), _scalar(F, node[1], f"{lw}.nodes[{m}]"),
                          int(node[2]), _scalar(F, node[3], f"{lw}.nodes[{m}]")))
        links.append(Link(tuple(pieces), tuple(nodes)))
    anchors = []
    for i, group in enumerate(_require(rec, "anchors", where)):
        out = []
        for m, arec in enumerate(group):
            aw = f"{where}.anchors[{i}][{m}]"
            out.append(Anchor(
                int(_require(arec, "left_piece", aw)),
                _scalar(F, _require(arec, "left_param", aw), aw),
                int(_require(arec, "right_piece", aw)),
                _scalar(F, _require(arec, "right_param", aw), aw),
                tuple(_scalars(F, _require(arec, "point", aw), f"{aw}.point")),
            ))
        anchors.append(tuple(out))
    try:
        return Chain(F, r, tuple(links), tuple(anchors))
    except ValueError as exc:
        raise RecordError(f"{where}: {exc}") from exc
