"""Text serialization: one JSON document per file describing a complex,
named divisors, function spaces, weighted graphs, and limit-series data.
Rationals travel as "p/q" strings so exactness survives round trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import MetrizedComplex
from .curves import EllipticOracle, O_POINT, P1Oracle, TableOracle
from .decomposition import WeightedGraph
from .errors import InputError
from .exact import INF, Fp, Poly, PrimeField, QQ, RationalFunc
from .limitseries import Aspect, FunctionSpace, VanishingTable
from .metric import GraphDivisor, GraphModel

FORMAT_VERSION = 1


def _fail(path, msg):
    raise InputError(f"{path}: {msg}")


def parse_rational(s, path):
    try:
        if isinstance(s, int):
            return Fraction(s)
        if isinstance(s, str):
            return Fraction(s)
    except (ValueError, ZeroDivisionError):
        pass
    _fail(path, f"not a rational: {s!r}")


def rational_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_field(spec, path):
    if spec in ("Q", "QQ", None):
        return QQ
    if isinstance(spec, int):
        return PrimeField(spec)
    _fail(path, f"unknown field {spec!r}")


def parse_curve_point(oracle, obj, path):
    if isinstance(oracle, P1Oracle):
        if obj == {"inf": True}:
            return INF
        if isinstance(obj, dict) and "x" in obj:
            x = parse_rational(obj["x"], path + ".x")
            if isinstance(oracle.field, PrimeField):
                if x.denominator != 1:
                    _fail(path, "prime-field point must be an integer")
                return oracle.field.elem(int(x))
            return x
        _fail(path, "projective-line point wants {'inf': true} or {'x': ...}")
    if isinstance(oracle, EllipticOracle):
        if obj == {"O": True}:
            return O_POINT
        if isinstance(obj, dict) and "x" in obj and "y" in obj:
            try:
                return oracle.point(int(obj["x"]), int(obj["y"]))
            except (ValueError, TypeError):
                _fail(path, "elliptic point coordinates must be integers")
            except InputError as err:
                _fail(path, str(err))
        _fail(path, "elliptic point wants {'O': true} or {'x':.., 'y':..}")
    if isinstance(oracle, TableOracle):
        if isinstance(obj, dict) and "label" in obj:
            lab = str(obj["label"])
            if lab not in oracle.points:
                _fail(path, f"unknown labeled point {lab}")
            return lab
        _fail(path, "table point wants {'label': ...}")
    _fail(path, "cannot parse point for this oracle")


def curve_point_json(oracle, p):
    if isinstance(oracle, P1Oracle):
        if p is INF:
            return {"inf": True}
        if isinstance(p, Fp):
            return {"x": str(p.v)}
        return {"x": rational_str(p)}
    if isinstance(oracle, EllipticOracle):
        if p is O_POINT:
            return {"O": True}
        return {"x": str(p.x.v), "y": str(p.y.v)}
    return {"label": p}


def parse_graph_point(model: GraphModel, obj, path):
    if isinstance(obj, dict) and "vertex" in obj:
        try:
            return model.vertex_point(obj["vertex"])
        except InputError as err:
            _fail(path, str(err))
    if isinstance(obj, dict) and "edge" in obj:
        off = parse_rational(obj.get("offset", 0), path + ".offset")
        try:
            return model.point_on(obj["edge"], off)
        except InputError as err:
            _fail(path, str(err))
    _fail(path, "graph point wants {'vertex': ...} or {'edge':.., 'offset':..}")


def graph_point_json(p):
    if p.kind == "v":
        return {"vertex": p.where}
    return {"edge": p.where, "offset": rational_str(p.offset)}


def parse_oracle(spec, path):
    if spec == "graphical" or spec is None:
        return None
    if not isinstance(spec, dict) or "type" not in spec:
        _fail(path, "oracle wants 'graphical' or an object with a 'type'")
    t = spec["type"]
    if t == "p1":
        return P1Oracle(parse_field(spec.get("field", "Q"), path + ".field"))
    if t == "elliptic":
        for k in ("p", "a", "b"):
            if k not in spec:
                _fail(path, f"elliptic oracle needs '{k}'")
        return EllipticOracle(int(spec["p"]), int(spec["a"]), int(spec["b"]))
    if t == "table":
        try:
            table = {}
            for row in spec["rank_table"]:
                deg, cls, r = row
                table[(int(deg), tuple(cls))] = int(r)
            return TableOracle(
                int(spec["genus"]),
                tuple(spec["moduli"]),
                {k: tuple(v) for k, v in spec["points"].items()},
                table,
                tuple(spec["canonical_class"]),
            )
        except (KeyError, ValueError, TypeError) as err:
            _fail(path, f"bad table oracle: {err}")
    _fail(path, f"unknown oracle type {t!r}")


def parse_ratfunc(field_obj, obj, path):
    def coeff(c):
        q = Fraction(c)
        if isinstance(field_obj, PrimeField):
            if q.denominator != 1:
                raise ValueError(f"prime-field coefficient must be an integer: {c}")
            return q.numerator
        return q

    try:
        num = Poly.make(field_obj, [coeff(c) for c in obj["num"]])
        den = Poly.make(field_obj, [coeff(c) for c in obj.get("den", ["1"])])
        return RationalFunc.make(num, den)
    except (KeyError, ValueError, ZeroDivisionError) as err:
        _fail(path, f"bad rational function: {err}")


def ratfunc_json(f: RationalFunc):
    def coeffs(p):
        return [rational_str(c) if isinstance(c, Fraction) else str(c.v) for c in p.coeffs]

    return {"num": coeffs(f.num), "den": coeffs(f.den)}


@dataclass
class Document:
    """A parsed input file: the complex plus named ancillary objects."""

    complex: MetrizedComplex
    divisors: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)  # name -> (vertex, FunctionSpace)
    weighted: dict = field(default_factory=dict)
    limit_series: dict = field(default_factory=dict)
    complex2: MetrizedComplex | None = None
    glue_spec: dict | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict)


def _parse_model(obj, path):
    if "vertices" not in obj or "edges" not in obj:
        _fail(path, "complex wants 'vertices' and 'edges'")
    names = []
    for i, v in enumerate(obj["vertices"]):
        if "name" not in v:
            _fail(f"{path}.vertices[{i}]", "vertex wants a 'name'")
        names.append(v["name"])
    edges = []
    for i, e in enumerate(obj["edges"]):
        p = f"{path}.edges[{i}]"
        for k in ("name", "ends", "length"):
            if k not in e:
                _fail(p, f"edge wants '{k}'")
        length = parse_rational(e["length"], p + ".length")
        if length <= 0:
            _fail(p + ".length", "edge length must be positive")
        edges.append((e["name"], e["ends"][0], e["ends"][1], length))
    try:
        return GraphModel(names, edges)
    except InputError as err:
        _fail(path, str(err))


def _parse_complex(obj, path):
    model = _parse_model(obj, path)
    oracles = {}
    marks = {}
    for i, v in enumerate(obj["vertices"]):
        p = f"{path}.vertices[{i}]"
        o = parse_oracle(v.get("oracle", "graphical"), p + ".oracle")
        if o is None:
            if v.get("marks"):
                _fail(p, "graphical vertices carry no marked points")
            continue
        name = v["name"]
        oracles[name] = o
        marks[name] = {}
        raw_marks = v.get("marks", {})
        for key, ptobj in raw_marks.items():
            if ":" not in key:
                _fail(f"{p}.marks.{key}", "mark key wants 'edge:end'")
            ename, end = key.rsplit(":", 1)
            if end not in ("0", "1"):
                _fail(f"{p}.marks.{key}", "end must be 0 or 1")
            marks[name][(ename, int(end))] = parse_curve_point(
                o, ptobj, f"{p}.marks.{key}"
            )
    try:
        return MetrizedComplex(model, oracles, marks)
    except InputError as err:
        _fail(path, str(err))


def _parse_divisor(cx, obj, path):
    graph = []
    for i, pair in enumerate(obj.get("graph", [])):
        p = f"{path}.graph[{i}]"
        try:
            pt_obj, coeff = pair
        except (ValueError, TypeError):
            _fail(p, "graph entry wants [point, coeff]")
        graph.append((parse_graph_point(cx.model, pt_obj, p), int(coeff)))
    curves = {}
    for v, pairs in obj.get("curves", {}).items():
        p = f"{path}.curves.{v}"
        if not cx.is_oracle_vertex(v):
            _fail(p, f"vertex {v} carries no curve")
        o = cx.oracles[v]
        d = o.zero_divisor()
        for i, pair in enumerate(pairs):
            pt = parse_curve_point(o, pair[0], f"{p}[{i}]")
            d = d + o.divisor((pt, int(pair[1])))
        curves[v] = d
    try:
        return cx.divisor(graph_pairs=graph, curve_parts=curves)
    except InputError as err:
        _fail(path, str(err))


def divisor_json(cx, d):
    graph = [
        [graph_point_json(p), c]
        for p, c in sorted(d.graph.coeffs.items(), key=lambda kv: repr(kv[0]))
    ]
    curves = {}
    for v, dv in sorted(d.curves.items()):
        o = cx.oracles[v]
        curves[v] = [
            [curve_point_json(o, p), c]
            for p, c in sorted(dv.coeffs.items(), key=lambda kv: o.point_key(kv[0]))
        ]
    return {"graph": graph, "curves": curves}


def parse_document(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"not valid JSON: {err}") from None
    if not isinstance(raw, dict):
        raise InputError("document root must be an object")
    if raw.get("format", FORMAT_VERSION) != FORMAT_VERSION:
        raise InputError(f"unsupported format version {raw.get('format')}")
    if "complex" not in raw:
        _fail("document", "missing 'complex'")
    cx = _parse_complex(raw["complex"], "complex")
    doc = Document(complex=cx, seed=int(raw.get("seed", 0)), raw=raw)
    if "complex2" in raw:
        doc.complex2 = _parse_complex(raw["complex2"], "complex2")
    if "glue" in raw:
        doc.glue_spec = raw["glue"]
    for name, obj in raw.get("divisors", {}).items():
        doc.divisors[name] = _parse_divisor(cx, obj, f"divisors.{name}")
    for name, obj in raw.get("function_spaces", {}).items():
        p = f"function_spaces.{name}"
        v = obj.get("vertex")
        if not cx.is_oracle_vertex(v):
            _fail(p, f"vertex {v!r} carries no curve")
        o = cx.oracles[v]
        if not isinstance(o, P1Oracle):
            _fail(p, "function spaces need a projective-line vertex")
        basis = [
            parse_ratfunc(o.field, b, f"{p}.basis[{i}]")
            for i, b in enumerate(obj.get("basis", []))
        ]
        try:
            doc.spaces[name] = (v, FunctionSpace(o, basis))
        except InputError as err:
            _fail(p, str(err))
    for name, obj in raw.get("weighted_graphs", {}).items():
        p = f"weighted_graphs.{name}"
        model = _parse_model(obj, p)
        weights = {v: int(w) for v, w in obj.get("weights", {}).items()}
        divisors = {}
        for dn, pairs in obj.get("divisors", {}).items():
            dd = {}
            for i, pair in enumerate(pairs):
                pt = parse_graph_point(model, pair[0], f"{p}.divisors.{dn}[{i}]")
                dd[pt] = dd.get(pt, 0) + int(pair[1])
            divisors[dn] = GraphDivisor(dd)
        try:
            doc.weighted[name] = (WeightedGraph(model, weights), divisors)
        except InputError as err:
            _fail(p, str(err))
    for name, obj in raw.get("limit_series", {}).items():
        p = f"limit_series.{name}"
        root = obj.get("root")
        if root not in cx.model.vertices:
            _fail(p, f"unknown root {root!r}")
        d = int(obj.get("degree", 0))
        r = int(obj.get("rank", 0))
        aspects = {}
        for v, a in obj.get("aspects", {}).items():
            pa = f"{p}.aspects.{v}"
            if not cx.is_oracle_vertex(v):
                _fail(pa, f"vertex {v} carries no curve")
            o = cx.oracles[v]
            if "table" in a:
                seqs = {}
                for i, row in enumerate(a["table"]):
                    pt = parse_curve_point(o, row[0], f"{pa}.table[{i}]")
                    seqs[pt] = tuple(int(x) for x in row[1])
                aspects[v] = VanishingTable(seqs)
                continue
            div = o.zero_divisor()
            for i, pair in enumerate(a.get("divisor", [])):
                pt = parse_curve_point(o, pair[0], f"{pa}.divisor[{i}]")
                div = div + o.divisor((pt, int(pair[1])))
            basis = [
                parse_ratfunc(o.field, b, f"{pa}.basis[{i}]")
                for i, b in enumerate(a.get("basis", []))
            ]
            try:
                aspects[v] = Aspect(div, FunctionSpace(o, basis))
            except InputError as err:
                _fail(pa, str(err))
        doc.limit_series[name] = {
            "root": root,
            "degree": d,
            "rank": r,
            "aspects": aspects,
        }
    return doc


def serialize_document(doc: Document) -> str:
    """Round-trip serialization of the raw document (canonical key order)."""
    return json.dumps(doc.raw, indent=2, sort_keys=True)
