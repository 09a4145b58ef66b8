"""Reduced divisors on metrized complexes: generalized burning, saturated
cuts, event-driven cut firing, and base-point reduction with an exact
linear-equivalence witness.

The burning rule: fire lit at the base point spreads along segments; a
graphical point withstands it exactly when the number of burnt incoming
directions stays within its coefficient, and an oracle vertex withstands
it exactly when removing the marked points of the burnt directions leaves
a curve divisor of non-negative rank.  The set of surviving points is the
maximal saturated cut avoiding the base point, and firing it moves every
boundary chip one event step toward the fire's origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import ComplexDivisor, ComplexRationalFunction, MetrizedComplex
from .curves import P1Oracle
from .errors import BudgetError, InputError, McdivError
from .metric import GraphPoint, PLFunction, Refinement

DEFAULT_EVENT_CAP = 10**6


@dataclass
class Cut:
    """A closed region of the graph held by a refinement: surviving nodes
    plus the refined segments joining two surviving nodes."""

    refinement: Refinement
    nodes: set  # surviving GraphPoints
    redges: set  # indices of refined segments inside the region

    def outgoing(self):
        """Segments leaving the region: (redge index, end holding the
        boundary node)."""
        out = []
        for i, re in enumerate(self.refinement.redges):
            if i in self.redges:
                continue
            a, b = re.ends
            if a in self.nodes and b not in self.nodes:
                out.append((i, 0))
            elif b in self.nodes and a not in self.nodes:
                out.append((i, 1))
        return out

    def boundary(self):
        deg = {}
        for i, end in self.outgoing():
            x = self.refinement.redges[i].ends[end]
            deg[x] = deg.get(x, 0) + 1
        return deg


@dataclass
class BurnResult:
    all_burnt: bool
    cut: Cut | None = None
    evidence: dict | None = None  # boundary point -> blocking data


def _marked_point_of_redge(cx, v, redge):
    """Marked point of C_v for the base-edge end a refined segment meets."""
    base = cx.model.edges[redge.base]
    if redge.lo == 0 and redge.ends[0] == cx.model.vertex_point(v):
        return cx.marks[v][(base.name, 0)]
    if redge.hi == base.length and redge.ends[1] == cx.model.vertex_point(v):
        return cx.marks[v][(base.name, 1)]
    raise InputError("segment does not meet the vertex at a base-edge end")


def _check_normalized(cx, d, v0):
    for p, c in d.graph.coeffs.items():
        if c < 0 and p != v0:
            raise InputError(f"unnormalized input: negative coefficient at {p}")
    for v in cx.oracle_vertices():
        if cx.model.vertex_point(v) == v0:
            continue
        if cx.oracles[v].curve_rank(d.curve_part(v)) < 0:
            raise InputError(f"unnormalized input: negative rank part at {v}")


def burn(cx: MetrizedComplex, d: ComplexDivisor, v0: GraphPoint) -> BurnResult:
    """Run the burning pass from v0 on a normalized divisor.

    Returns all-burnt (the divisor is v0-reduced) or the surviving region,
    which is the maximal saturated cut avoiding v0.
    """
    _check_normalized(cx, d, v0)
    extra = [p for p in d.graph.support() if p.kind == "e"]
    if v0.kind == "e":
        extra.append(v0)
    ref = cx.model.refinement(extra)
    if v0 not in ref.adj:
        raise InputError(f"{v0} is not a point of the graph")
    burnt = {v0}
    changed = True
    while changed:
        changed = False
        for x in ref.nodes:
            if x in burnt:
                continue
            incoming = [
                (i, end)
                for i, end in ref.adj[x]
                if ref.redges[i].ends[1 - end] in burnt
            ]
            n = len(incoming)
            if x.kind == "v" and cx.is_oracle_vertex(x.where):
                v = x.where
                o = cx.oracles[v]
                removed = d.curve_part(v)
                for i, _end in incoming:
                    mp = _marked_point_of_redge(cx, v, ref.redges[i])
                    removed = removed - o.divisor((mp, 1))
                if o.curve_rank(removed) < 0:
                    burnt.add(x)
                    changed = True
            else:
                if n > d.graph.get(x):
                    burnt.add(x)
                    changed = True
    if len(burnt) == len(ref.nodes):
        return BurnResult(True)
    nodes = {x for x in ref.nodes if x not in burnt}
    redges = {
        i
        for i, re in enumerate(ref.redges)
        if re.ends[0] in nodes and re.ends[1] in nodes
    }
    cut = Cut(ref, nodes, redges)
    evidence = {}
    for x, outdeg in cut.boundary().items():
        if x.kind == "v" and cx.is_oracle_vertex(x.where):
            v = x.where
            o = cx.oracles[v]
            rem = d.curve_part(v)
            for i, end in cut.outgoing():
                if cut.refinement.redges[i].ends[end] == x:
                    rem = rem - o.divisor(
                        (_marked_point_of_redge(cx, v, cut.refinement.redges[i]), 1)
                    )
            evidence[x] = ("curve", rem, o.curve_rank(rem))
        else:
            evidence[x] = ("graph", d.graph.get(x), outdeg)
    return BurnResult(False, cut, evidence)


def check_saturated(cx, d, cut: Cut) -> bool:
    """Every boundary point absorbs its outgoing firing."""
    for x, outdeg in cut.boundary().items():
        if x.kind == "v" and cx.is_oracle_vertex(x.where):
            v = x.where
            o = cx.oracles[v]
            rem = d.curve_part(v)
            for i, end in cut.outgoing():
                if cut.refinement.redges[i].ends[end] == x:
                    rem = rem - o.divisor(
                        (_marked_point_of_redge(cx, v, cut.refinement.redges[i]), 1)
                    )
            if o.curve_rank(rem) < 0:
                return False
        else:
            if outdeg > d.graph.get(x):
                return False
    return True


def fire_cut(cx, d: ComplexDivisor, cut: Cut, debt_mode=False):
    """Fire the region: one unit of slope on every outgoing segment, with
    the largest event-driven step.

    Returns (new divisor, step, witness increment).  Boundary oracle
    vertices are renormalized to an effective representative when their
    remaining part has non-negative rank.
    """
    if not debt_mode and not check_saturated(cx, d, cut):
        raise McdivError("internal error: firing an unsaturated cut")
    fronts = cut.outgoing()
    if not fronts:
        raise McdivError("internal error: cut has no outgoing segment")
    per_redge = {}
    for i, end in fronts:
        per_redge.setdefault(i, []).append(end)
    eps = None
    for i, ends in per_redge.items():
        length = cut.refinement.redges[i].length
        step = length if len(ends) == 1 else length / 2
        eps = step if eps is None else min(eps, step)
    # landing points of fronts that stop in a segment's interior
    landings = []
    for i, ends in per_redge.items():
        re = cut.refinement.redges[i]
        for end in ends:
            if end == 0:
                off = re.lo + eps
            else:
                off = re.hi - eps
            p = cx.model.point_on(re.base, off)
            if p.kind == "e":
                landings.append(p)
    ref2 = cut.refinement.with_points(landings)
    vals = {}
    front_span = {}
    for i, ends in per_redge.items():
        re = cut.refinement.redges[i]
        for end in ends:
            if end == 0:
                lo, hi = re.lo, re.lo + eps
            else:
                lo, hi = re.hi - eps, re.hi
            front_span.setdefault(re.base, []).append((lo, hi, end))
    for n in ref2.nodes:
        if n in cut.nodes:
            vals[n] = Fraction(0)
            continue
        val = -eps
        if n.kind == "e":
            for lo, hi, end in front_span.get(n.where, []):
                if lo <= n.offset <= hi:
                    dist = (n.offset - lo) if end == 0 else (hi - n.offset)
                    val = -dist
                    break
        vals[n] = val
    f = PLFunction(ref2, vals)
    increment = ComplexRationalFunction(cx, f, {})
    d_new = d + increment.divisor()
    # renormalize boundary oracle vertices inside their curve-divisor class
    witnesses = {}
    for x in cut.boundary():
        if not (x.kind == "v" and cx.is_oracle_vertex(x.where)):
            continue
        v = x.where
        o = cx.oracles[v]
        part = d_new.curve_part(v)
        if o.curve_rank(part) < 0:
            continue
        rep = o.effective_representative(part)
        shift = rep - part
        if shift.coeffs:
            witnesses[v] = shift
            curves = dict(d_new.curves)
            if rep.coeffs:
                curves[v] = rep
            else:
                curves.pop(v, None)
            d_new = ComplexDivisor(cx, d_new.graph, curves)
    increment = ComplexRationalFunction(cx, f, witnesses)
    return d_new, eps, increment


class ReductionWitness:
    """Accumulated proof of linear equivalence: a piecewise-linear graph
    part and one principal divisor per oracle vertex."""

    def __init__(self, cx: MetrizedComplex):
        self.cx = cx
        self.f_gamma = PLFunction.constant(cx.model)
        self.shifts = {}

    def absorb(self, inc: ComplexRationalFunction):
        self.f_gamma = self.f_gamma + inc.f_gamma
        for v in inc.witnesses:
            sh = inc.curve_divisor_shift(v)
            self.shifts[v] = self.shifts.get(v, self.cx.oracles[v].zero_divisor()) + sh

    def as_function(self) -> ComplexRationalFunction:
        wits = {}
        for v, sh in self.shifts.items():
            if not sh.coeffs:
                continue
            o = self.cx.oracles[v]
            if isinstance(o, P1Oracle):
                wits[v] = o.principal_witness(sh)
            else:
                wits[v] = sh
        return ComplexRationalFunction(self.cx, self.f_gamma, wits)

    def divisor(self) -> ComplexDivisor:
        return self.as_function().divisor()


def clear_debt(cx, d: ComplexDivisor, v0: GraphPoint, cap=DEFAULT_EVENT_CAP,
               want_witness=True, check_each_step=False):
    """Make the divisor burnable: every graphical coefficient non-negative
    away from v0 and every other oracle part of non-negative rank.

    Repeatedly fires the maximal region containing v0 and avoiding the
    worst debtor, pushing chips toward it; v0 is the only point allowed to
    go arbitrarily negative.
    """
    start = d
    wit = ReductionWitness(cx) if want_witness else None
    steps = 0
    while True:
        debtors = []
        for p, c in d.graph.coeffs.items():
            if c < 0 and p != v0:
                debtors.append((-c, repr(p), p))
        for v in cx.oracle_vertices():
            vp = cx.model.vertex_point(v)
            if vp == v0:
                continue
            part = d.curve_part(v)
            if cx.oracles[v].curve_rank(part) < 0:
                need = max(cx.oracles[v].genus - part.degree(), 1)
                debtors.append((need, repr(vp), vp))
        if not debtors:
            return d, wit
        debtors.sort(reverse=True)
        z = debtors[0][2]
        extra = [p for p in d.graph.support() if p.kind == "e"]
        for q in (v0, z):
            if q.kind == "e":
                extra.append(q)
        ref = cx.model.refinement(extra)
        # region: component of v0 after deleting the open star of z
        nodes = set()
        stack = [v0]
        while stack:
            x = stack.pop()
            if x in nodes or x == z:
                continue
            nodes.add(x)
            for i, end in ref.adj[x]:
                y = ref.redges[i].ends[1 - end]
                if y != z and y not in nodes:
                    stack.append(y)
        redges = {
            i
            for i, re in enumerate(ref.redges)
            if re.ends[0] in nodes and re.ends[1] in nodes
        }
        cut = Cut(ref, nodes, redges)
        d, _eps, inc = fire_cut(cx, d, cut, debt_mode=True)
        if wit is not None:
            wit.absorb(inc)
            if check_each_step and not (start + wit.divisor() == d):
                raise McdivError("internal error: witness identity failed in debt step")
        steps += 1
        if steps > cap:
            raise BudgetError(f"debt clearing exceeded {cap} events")


def reduce_divisor(cx, d: ComplexDivisor, v0: GraphPoint, cap=DEFAULT_EVENT_CAP,
                   want_witness=True, check_witness=True, check_each_step=False):
    """The v0-reduced representative of the class of d, with a witness.

    The result is effective away from v0, every other curve part has
    non-negative rank, and the burning pass consumes the whole graph.
    With want_witness=False the witness is not accumulated (faster inner
    loops) and None is returned in its place; check_each_step re-verifies
    the witness identity after every firing event.
    """
    if v0.kind == "v" and v0.where not in cx.model.vertices:
        raise InputError(f"unknown base vertex {v0}")
    start = d
    d, wit = clear_debt(cx, d, v0, cap, want_witness=want_witness,
                        check_each_step=check_each_step)
    if wit is not None and check_each_step:
        if not (start + wit.divisor() == d):
            raise McdivError("internal error: witness identity failed after debt")
    steps = 0
    while True:
        res = burn(cx, d, v0)
        if res.all_burnt:
            break
        d, _eps, inc = fire_cut(cx, d, res.cut)
        if wit is not None:
            wit.absorb(inc)
            if check_each_step and not (start + wit.divisor() == d):
                raise McdivError("internal error: witness identity failed mid-run")
        steps += 1
        if steps > cap:
            raise BudgetError(f"reduction exceeded {cap} events")
    if wit is not None and check_witness and not (start + wit.divisor() == d):
        raise McdivError("internal error: witness identity failed")
    return d, wit
