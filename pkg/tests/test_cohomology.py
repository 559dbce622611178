"""Exact mod-2 ring arithmetic and line-decomposition planner tests."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fragtop.cohomology import (
    DecompositionPlan,
    TotalSW,
    Z2Class,
    complex_normal_form,
    format_z2,
    parse_z2,
    plan_decomposition,
    plan_product,
    sw_product,
    sw_tensor_line,
    sw_total,
)
from fragtop.errors import MissingEuler


def lines(*texts, d):
    return [TotalSW.line(parse_z2(t, d, degree=1)) for t in texts]


class TestRingBasics:
    def test_generator_squares_vanish(self):
        for d in (2, 3):
            for i in range(1, d + 1):
                e = Z2Class.generator(d, i)
                assert e.cup(e).is_zero

    def test_cup_anticommutes_trivially_mod2(self):
        d = 3
        e1, e2 = Z2Class.generator(d, 1), Z2Class.generator(d, 2)
        assert e1.cup(e2) == e2.cup(e1)

    def test_any_degree1_squares_to_zero(self):
        for d in (2, 3):
            for bits in itertools.product((0, 1), repeat=d):
                x = Z2Class(d, 1, bits)
                assert x.cup(x).is_zero

    def test_text_roundtrip(self):
        samples = [
            ("e1", 2), ("e1+e2", 2), ("e1*e2", 2), ("0", 2),
            ("e1*e2+e2*e3", 3), ("e1*e2*e3", 3), ("e1+e2+e3", 3),
        ]
        for text, d in samples:
            cls = parse_z2(text, d, degree=1 if text == "0" else None)
            assert parse_z2(format_z2(cls), d, degree=cls.degree) == cls

    def test_parse_kills_repeated_generator(self):
        assert parse_z2("e1*e1", 2, degree=2).is_zero


class TestFrozenProductIdentities:
    """Line-triple products pinned as exact bit patterns."""

    def test_t2_triple(self):
        total = sw_total(lines("e1", "e2", "e1+e2", d=2))
        assert total.rank == 3
        assert total.w1.is_zero
        assert total.w2 == parse_z2("e1*e2", 2)

    def test_t3_trivial_triple(self):
        total = sw_total(lines("0", "0", "0", d=3))
        assert total.w1.is_zero and total.w2.is_zero

    def test_t3_single_monomial(self):
        total = sw_total(lines("e1", "e2", "e1+e2", d=3))
        assert total.w1.is_zero
        assert total.w2 == parse_z2("e1*e2", 3)

    def test_t3_two_monomials(self):
        total = sw_total(lines("e1+e3", "e2", "e1+e2+e3", d=3))
        assert total.w1.is_zero
        assert total.w2 == parse_z2("e1*e2+e2*e3", 3)

    def test_t3_all_three_monomials(self):
        total = sw_total(lines("e1+e3", "e2+e3", "e1+e2", d=3))
        assert total.w1.is_zero
        assert total.w2 == parse_z2("e1*e2+e2*e3+e1*e3", 3)

    def test_general_pair_identity(self):
        # (1+x)(1+y)(1+x+y) = 1 + x cup y for every degree-1 pair.
        for d in (2, 3):
            for xb in itertools.product((0, 1), repeat=d):
                for yb in itertools.product((0, 1), repeat=d):
                    x, y = Z2Class(d, 1, xb), Z2Class(d, 1, yb)
                    total = sw_total([TotalSW.line(x), TotalSW.line(y), TotalSW.line(x + y)])
                    assert total.w1.is_zero
                    assert total.w2 == x.cup(y)


class TestTensorLine:
    def test_involution(self):
        for d in (2, 3):
            for rank in (1, 2, 3, 4):
                for w1b in itertools.product((0, 1), repeat=d):
                    for cb in itertools.product((0, 1), repeat=d):
                        w1 = Z2Class(d, 1, w1b)
                        c = Z2Class(d, 1, cb)
                        for w2b in itertools.product((0, 1), repeat=len(Z2Class.zero(d, 2).bits)):
                            t = TotalSW(rank, w1, Z2Class(d, 2, w2b))
                            tt = sw_tensor_line(sw_tensor_line(t, c), c)
                            assert tt == t

    def test_w1_shift_parity(self):
        d = 2
        c = Z2Class.generator(d, 1)
        even = TotalSW.trivial(d, 2)
        odd = TotalSW.trivial(d, 3)
        assert sw_tensor_line(even, c).w1.is_zero
        assert sw_tensor_line(odd, c).w1 == c

    def test_line_tensor_adds_classes(self):
        d = 2
        a = TotalSW.line(Z2Class.generator(d, 1))
        c = Z2Class.generator(d, 2)
        out = sw_tensor_line(a, c)
        assert out.w1 == a.w1 + c


class TestPlanner:
    def test_exhaustive_soundness_rank_3_4(self):
        for d in (2, 3):
            n2 = len(Z2Class.zero(d, 2).bits)
            for rank in (3, 4):
                for w1b in itertools.product((0, 1), repeat=d):
                    for w2b in itertools.product((0, 1), repeat=n2):
                        w1 = Z2Class(d, 1, w1b)
                        w2 = Z2Class(d, 2, w2b)
                        plan = plan_decomposition(rank, w1, w2, d=d)
                        assert plan.splits, (d, rank, w1b, w2b)
                        assert len(plan.centers) == rank
                        total = plan_product(plan)
                        assert total.rank == rank
                        assert total.w1 == w1
                        assert total.w2 == w2

    def test_rank2_nonorientable_t2_always_splits(self):
        d = 2
        for w1b in itertools.product((0, 1), repeat=d):
            if not any(w1b):
                continue
            for w2b in itertools.product((0, 1), repeat=1):
                w1 = Z2Class(d, 1, w1b)
                w2 = Z2Class(d, 2, w2b)
                plan = plan_decomposition(2, w1, w2, d=d)
                assert plan.splits
                total = plan_product(plan)
                assert (total.w1, total.w2) == (w1, w2)

    def test_rank2_nonorientable_t3_soundness_and_gaps(self):
        d = 3
        obstructed = []
        for w1b in itertools.product((0, 1), repeat=d):
            if not any(w1b):
                continue
            for w2b in itertools.product((0, 1), repeat=3):
                w1 = Z2Class(d, 1, w1b)
                w2 = Z2Class(d, 2, w2b)
                plan = plan_decomposition(2, w1, w2, d=d)
                if plan.splits:
                    total = plan_product(plan)
                    assert (total.w1, total.w2) == (w1, w2)
                else:
                    assert plan.euler is None
                    obstructed.append((w1b, w2b))
        # A two-line sum containing w1 = e1 can never produce the e2*e3 monomial.
        assert ((1, 0, 0), (0, 0, 1)) in obstructed

    def test_rank2_oriented_requires_euler(self):
        d = 2
        with pytest.raises(MissingEuler):
            plan_decomposition(2, Z2Class.zero(d, 1), Z2Class.zero(d, 2), d=d)

    def test_rank2_oriented_verdicts(self):
        d = 2
        z1, z2 = Z2Class.zero(d, 1), Z2Class.zero(d, 2)
        ok = plan_decomposition(2, z1, z2, euler=0, d=d)
        assert ok.splits and all(c.is_zero for c in ok.centers)
        bad = plan_decomposition(2, z1, parse_z2("e1*e2", 2), euler=1, d=d)
        assert not bad.splits and bad.euler == 1
        even = plan_decomposition(2, z1, z2, euler=2, d=d)
        assert not even.splits and even.euler == 2

    def test_rank2_oriented_t3_tuple_euler(self):
        d = 3
        z1 = Z2Class.zero(d, 1)
        plan = plan_decomposition(2, z1, parse_z2("e1*e2", 3), euler=(1, 0, 0), d=d)
        assert not plan.splits and plan.euler == (1, 0, 0)

    def test_euler_w2_consistency_enforced(self):
        d = 2
        with pytest.raises(ValueError):
            plan_decomposition(2, Z2Class.zero(d, 1), parse_z2("e1*e2", 2), euler=0, d=d)


class TestComplexNormalForm:
    def test_scalar_and_tuple(self):
        assert complex_normal_form(3, -1) == [0, 0, -1]
        assert complex_normal_form(1, 5) == [5]
        assert complex_normal_form(2, (1, 0, -2)) == [(0, 0, 0), (1, 0, -2)]


@given(
    d=st.sampled_from([2, 3]),
    bits1=st.lists(st.integers(0, 1), min_size=3, max_size=3),
    bits2=st.lists(st.integers(0, 1), min_size=3, max_size=3),
    bits3=st.lists(st.integers(0, 1), min_size=3, max_size=3),
)
def test_cup_bilinear_and_associative(d, bits1, bits2, bits3):
    x = Z2Class(d, 1, tuple(bits1[:d]))
    y = Z2Class(d, 1, tuple(bits2[:d]))
    z = Z2Class(d, 1, tuple(bits3[:d]))
    assert (x + y).cup(z) == x.cup(z) + y.cup(z)
    assert x.cup(y.cup(z)) == (x.cup(y)).cup(z)


@given(
    d=st.sampled_from([2, 3]),
    ra=st.integers(1, 4),
    rb=st.integers(1, 4),
    bits=st.lists(st.integers(0, 1), min_size=12, max_size=12),
)
def test_sw_product_commutative(d, ra, rb, bits):
    n2 = 1 if d == 2 else 3
    a = TotalSW(ra, Z2Class(d, 1, tuple(bits[:d])), Z2Class(d, 2, tuple(bits[3:3 + n2])))
    b = TotalSW(rb, Z2Class(d, 1, tuple(bits[6:6 + d])), Z2Class(d, 2, tuple(bits[9:9 + n2])))
    assert sw_product(a, b) == sw_product(b, a)
