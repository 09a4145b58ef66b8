"""Vanishing sequences, restricted ranks, and the compact-type limit
series checks."""

from fractions import Fraction

import pytest

from mcdiv.complexes import NodalCurveDescription, regularize
from mcdiv.curves import P1Oracle
from mcdiv.errors import InputError
from mcdiv.exact import INF, Poly, QQ, RationalFunc
from mcdiv.limitseries import (
    Aspect,
    FunctionSpace,
    VanishingTable,
    crude_limit_check,
    eqD_divisor,
    limit_equiv_audit,
    not_completable_audit,
    ramification_points,
    restricted_eta,
    restricted_rank,
    vanishing_sequence,
)
from mcdiv.rank import point_divisor, rank


ONE = Poly.const(QQ, 1)
T = Poly.x(QQ)


def rf(num, den=None):
    return RationalFunc.make(num, den or ONE)


def mono(*exps):
    """Span of the given monomials t^e."""
    o = P1Oracle(QQ)
    basis = []
    for e in exps:
        basis.append(rf(Poly.make(QQ, [0] * e + [1])))
    return FunctionSpace(o, basis)


def two_lines():
    return regularize(
        NodalCurveDescription(
            {"Y": P1Oracle(QQ), "Z": P1Oracle(QQ)},
            [("Y", QQ.elem(0), "Z", QQ.elem(0))],
        )
    )


class TestFunctionSpace:
    def test_dependent_basis_rejected(self):
        o = P1Oracle(QQ)
        with pytest.raises(InputError):
            FunctionSpace(o, [rf(T), rf(T.scale(2))])

    def test_dim(self):
        assert mono(0, 1, 2).dim == 3

    def test_contained_in_L(self):
        o = P1Oracle(QQ)
        h = mono(0, 1)
        assert h.contained_in_L(o.divisor((INF, 1)))
        assert not h.contained_in_L(o.zero_divisor())

    def test_constrained_dim(self):
        h = mono(0, 1, 2)
        dim, _ = h.constrained_dim([(QQ.elem(0), 2)])
        assert dim == 1  # only t^2 vanishes doubly at 0


class TestVanishingSequence:
    def test_full_monomials(self):
        o = P1Oracle(QQ)
        h = mono(0, 1, 2)
        d = o.divisor((INF, 2))
        assert vanishing_sequence(o, d, h, QQ.elem(0)) == (0, 1, 2)

    def test_gap_sequence(self):
        o = P1Oracle(QQ)
        h = FunctionSpace(o, [rf(ONE), rf(Poly.make(QQ, [0, 0, 1, 1])), rf(Poly.make(QQ, [0, 0, 0, 0, 1]))])
        d = o.divisor((INF, 4))
        assert vanishing_sequence(o, d, h, QQ.elem(0)) == (0, 2, 4)

    def test_generic_point(self):
        o = P1Oracle(QQ)
        h = FunctionSpace(o, [rf(ONE), rf(Poly.make(QQ, [0, 0, 1, 1])), rf(Poly.make(QQ, [0, 0, 0, 0, 1]))])
        d = o.divisor((INF, 4))
        assert vanishing_sequence(o, d, h, QQ.elem(7)) == (0, 1, 2)

    def test_basis_change_invariance(self):
        o = P1Oracle(QQ)
        d = o.divisor((INF, 4))
        h1 = FunctionSpace(o, [rf(ONE), rf(Poly.make(QQ, [0, 0, 1, 1])), rf(Poly.make(QQ, [0, 0, 0, 0, 1]))])
        mixed = [
            h1.basis[0] + h1.basis[1],
            h1.basis[1],
            h1.basis[2] + h1.basis[0].scale(Fraction(3)),
        ]
        h2 = FunctionSpace(o, mixed)
        for p in (QQ.elem(0), QQ.elem(1), QQ.elem(-2)):
            assert vanishing_sequence(o, d, h1, p) == vanishing_sequence(o, d, h2, p)

    def test_space_outside_L_rejected(self):
        o = P1Oracle(QQ)
        with pytest.raises(InputError):
            vanishing_sequence(o, o.zero_divisor(), mono(0, 1), QQ.elem(0))

    def test_at_infinity(self):
        o = P1Oracle(QQ)
        h = mono(0, 1, 2)
        d = o.divisor((INF, 2))
        assert vanishing_sequence(o, d, h, INF) == (0, 1, 2)

    def test_ramification_points(self):
        h = FunctionSpace(
            P1Oracle(QQ),
            [rf(ONE), rf(Poly.make(QQ, [0, 0, 1, 1])), rf(Poly.make(QQ, [0, 0, 0, 0, 1]))],
        )
        pts = ramification_points(h)
        assert QQ.elem(0) in pts


class TestCrudeCheck:
    def test_single_component_vacuous(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        a = {"Y": Aspect(cx.oracles["Y"].divisor((INF, 1)), mono(0, 1))}
        ok, violations = crude_limit_check(cx, a, 1, 1)
        assert ok and not violations

    def test_two_lines_passing(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        aspects = {
            "Y": Aspect(oy.divisor((INF, 2)), mono(0, 1)),
            "Z": Aspect(oz.divisor((INF, 2)), mono(1, 2)),
        }
        ok, violations = crude_limit_check(cx, aspects, 2, 1)
        assert ok, violations

    def test_two_lines_failing(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        aspects = {
            "Y": Aspect(oy.divisor((INF, 2)), mono(0, 1)),
            "Z": Aspect(oz.divisor((INF, 2)), mono(0, 2)),
        }
        ok, violations = crude_limit_check(cx, aspects, 2, 1)
        assert not ok and violations

    def test_vanishing_table_participation(self):
        cx = two_lines()
        oy = cx.oracles["Y"]
        node_z = cx.marked_point("Z", "n0", 1)
        aspects = {
            "Y": Aspect(oy.divisor((INF, 2)), mono(0, 1)),
            "Z": VanishingTable({node_z: (1, 2)}),
        }
        ok, violations = crude_limit_check(cx, aspects, 2, 1)
        assert ok, violations


class TestEqD:
    def test_single_component(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        o = cx.oracles["Y"]
        d = eqD_divisor(cx, "Y", {"Y": o.divisor((INF, 2))})
        assert d.curve_part("Y") == o.divisor((INF, 2))

    def test_two_components(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        assert d.degree() == 2
        node = cx.marked_point("Z", "n0", 1)
        assert d.curve_part("Z").get(node) == -2

    def test_degree_independent_of_tree_shape(self):
        comps = {f"C{i}": P1Oracle(QQ) for i in range(3)}
        desc = NodalCurveDescription(
            comps,
            [("C0", QQ.elem(0), "C1", QQ.elem(0)), ("C1", QQ.elem(1), "C2", QQ.elem(0))],
        )
        cx = regularize(desc)
        divs = {v: cx.oracles[v].divisor((INF, 3)) for v in comps}
        for root in comps:
            assert eqD_divisor(cx, root, divs).degree() == 3

    def test_degree_mismatch_rejected(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        with pytest.raises(InputError):
            eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 3))})


class TestRestrictedRank:
    def test_constants_cap(self):
        cx = two_lines()
        oy = cx.oracles["Y"]
        d = cx.divisor(curve_parts={"Y": oy.divisor((INF, 2))})
        spaces = {"Y": mono(0), "Z": mono(0)}
        assert restricted_rank(cx, d, spaces) == 0

    def test_bounded_by_unrestricted(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        spaces = {"Y": mono(0, 1), "Z": mono(1, 2)}
        rr = restricted_rank(cx, d, spaces)
        assert rr <= rank(cx, d)
        assert rr <= min(s.dim for s in spaces.values()) - 1

    def test_two_lines_limit_value(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        assert restricted_rank(cx, d, {"Y": mono(0, 1), "Z": mono(1, 2)}) == 1
        assert restricted_rank(cx, d, {"Y": mono(0, 1), "Z": mono(0, 2)}) == 0

    def test_certificate_validation(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        assert restricted_rank(cx, d, {"Y": mono(0, 1), "Z": mono(1, 2)}, validate=True) == 1

    def test_rescaling_invariance(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        spaces = {"Y": mono(0, 1), "Z": mono(1, 2)}
        base = restricted_rank(cx, d, spaces)
        # rescale the Z-space by (t-1) and shift the divisor accordingly
        shift = oz.divisor((QQ.elem(1), 1), (INF, -1))
        f = oz.principal_witness(shift)
        spaces2 = {"Y": spaces["Y"], "Z": spaces["Z"].rescale(f)}
        d2 = cx.divisor(
            curve_parts={"Y": d.curve_part("Y"), "Z": d.curve_part("Z") - shift}
        )
        assert restricted_rank(cx, d2, spaces2) == base


class TestRestrictedEta:
    def test_full_space_reduces_to_plain_eta(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        x = ("Y", INF)  # the monomial spans exhaust L(n(inf))
        spaces = {"Y": mono(0, 1, 2)}
        d = cx.zero_divisor()
        assert restricted_eta(cx, d, x, spaces, 0) == 0
        assert restricted_eta(cx, d, x, spaces, 1) == 1
        assert restricted_eta(cx, d, x, spaces, 2) == 2

    def test_constants_only(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        o = cx.oracles["Y"]
        d = cx.divisor(curve_parts={"Y": o.divisor((QQ.elem(2), -1))})
        spaces = {"Y": mono(0)}
        assert restricted_eta(cx, d, ("Y", QQ.elem(2)), spaces, 0) == 1

    def test_unreachable_k_rejected(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        with pytest.raises(InputError):
            restricted_eta(cx, cx.zero_divisor(), ("Y", QQ.elem(0)), {"Y": mono(0)}, 1)


class TestPrimeFieldRestrictedRank:
    def _two_lines_f(self, p):
        from mcdiv.exact import PrimeField

        f = PrimeField(p)
        desc = NodalCurveDescription(
            {"Y": P1Oracle(f), "Z": P1Oracle(f)},
            [("Y", f.elem(0), "Z", f.elem(0))],
        )
        return regularize(desc), f

    def test_char7_instance_with_certificate(self):
        from mcdiv.exact import Poly as P

        cx, f = self._two_lines_f(7)
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]

        def rf7(coefs):
            return RationalFunc.make(P.make(f, coefs), P.const(f, 1))

        hy = FunctionSpace(oy, [rf7([1]), rf7([0, 1]), rf7([0, 0, 0, 0, 1])])
        hz = FunctionSpace(oz, [rf7([0, 1]), rf7([0, 0, 1]), rf7([0, 0, 1, 1])])
        aspects = {
            "Y": Aspect(oy.divisor((INF, 4)), hy),
            "Z": Aspect(oz.divisor((INF, 4)), hz),
        }
        ok, _ = crude_limit_check(cx, aspects, 4, 2)
        div = eqD_divisor(cx, "Y", {v: aspects[v].divisor for v in ("Y", "Z")})
        rr = restricted_rank(cx, div, {"Y": hy, "Z": hz}, validate=True)
        assert ok == (rr == 2)

    def test_small_field_pool_falls_back_to_all_points(self):
        from mcdiv.exact import Poly as P

        cx, f = self._two_lines_f(5)
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]

        def rf5(coefs):
            return RationalFunc.make(P.make(f, coefs), P.const(f, 1))

        # zeros of the second basis element blanket the field, forcing the
        # fresh-point sampler into the exhaustive fallback
        blanket = rf5([-1, 1]) * rf5([-2, 1]) * rf5([-3, 1])
        hy = FunctionSpace(oy, [rf5([1]), blanket])
        hz = FunctionSpace(oz, [rf5([0, 1]), rf5([0, 0, 1])])
        aspects = {
            "Y": Aspect(oy.divisor((INF, 3)), hy),
            "Z": Aspect(oz.divisor((INF, 3)), hz),
        }
        ok, _ = crude_limit_check(cx, aspects, 3, 1)
        div = eqD_divisor(cx, "Y", {v: aspects[v].divisor for v in ("Y", "Z")})
        rr = restricted_rank(cx, div, {"Y": hy, "Z": hz}, validate=True)
        assert ok == (rr == 1)


class TestRestrictedConnectedSum:
    def test_formula_matches_direct_on_two_components(self):
        # the two-component chain is the connected sum of its vertices;
        # min over k of k + restricted rank of the far side with the twist
        # threshold removed must equal the direct restricted rank
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        d = eqD_divisor(cx, "Y", {"Y": oy.divisor((INF, 2)), "Z": oz.divisor((INF, 2))})
        spaces = {"Y": mono(0, 1), "Z": mono(1, 2)}
        direct = restricted_rank(cx, d, spaces)

        piece_y = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        piece_z = regularize(NodalCurveDescription({"Z": P1Oracle(QQ)}, []))
        d1 = piece_y.divisor(
            curve_parts={"Y": piece_y.oracles["Y"].divisor((INF, 2))}
        )
        d2 = piece_z.divisor(
            curve_parts={
                "Z": piece_z.oracles["Z"].divisor((INF, 2), (QQ.elem(0), -2))
            }
        )
        s1 = {"Y": FunctionSpace(piece_y.oracles["Y"], spaces["Y"].basis)}
        s2 = {"Z": FunctionSpace(piece_z.oracles["Z"], spaces["Z"].basis)}
        x1 = ("Y", QQ.elem(0))
        x2 = ("Z", QQ.elem(0))
        cap = s1["Y"].dim - 1
        best = None
        for k in range(cap + 1):
            n = restricted_eta(piece_y, d1, x1, s1, k)
            term = k + restricted_rank(
                piece_z, d2 - point_divisor(piece_z, x2, n), s2
            )
            best = term if best is None else min(best, term)
        assert best == direct


class TestLimitEquivalence:
    def test_biconditional_positive(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        aspects = {
            "Y": Aspect(oy.divisor((INF, 2)), mono(0, 1)),
            "Z": Aspect(oz.divisor((INF, 2)), mono(1, 2)),
        }
        rep = limit_equiv_audit(cx, aspects, "Y", 2, 1)
        assert rep.passed() and rep.data["crude"] and rep.data["restricted_rank"] == 1

    def test_biconditional_negative_by_fault_injection(self):
        cx = two_lines()
        oy, oz = cx.oracles["Y"], cx.oracles["Z"]
        aspects = {
            "Y": Aspect(oy.divisor((INF, 2)), mono(0, 1)),
            "Z": Aspect(oz.divisor((INF, 2)), mono(0, 2)),
        }
        rep = limit_equiv_audit(cx, aspects, "Y", 2, 1)
        assert rep.passed()
        assert not rep.data["crude"] and rep.data["restricted_rank"] != 1

    def test_single_component(self):
        cx = regularize(NodalCurveDescription({"Y": P1Oracle(QQ)}, []))
        o = cx.oracles["Y"]
        aspects = {"Y": Aspect(o.divisor((INF, 2)), mono(0, 1, 2))}
        rep = limit_equiv_audit(cx, aspects, "Y", 2, 2)
        assert rep.passed() and rep.data["restricted_rank"] == 2


class TestNotCompletable:
    def test_audit_passes(self):
        rep = not_completable_audit(5, 1, 1)
        assert rep.passed(), rep.failures()

    def test_other_field(self):
        rep = not_completable_audit(7, 2, 3)
        assert rep.passed(), rep.failures()
