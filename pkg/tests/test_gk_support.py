import pytest
from hypothesis import given, strategies as st

from siegel_poincare import exact_terms as et
from siegel_poincare.gk_support import (
    KType, KTypeSupport, Sl2Support, canonical_sl2_support, clebsch_gordan,
    contains_scalar_ktype, has_lowest_weight, point_support, psi_module_support,
    render_sl2, tensor_ktype_support, tensor_sl2, wall_holds,
)
from siegel_poincare.oracles import brute_tensor_min, character_decomposition

ktypes = st.tuples(st.integers(-6, 6), st.integers(0, 6)).map(lambda p: KType(p[0] + p[1], p[0]))


# ------------------------------------------------------------------- SL2

def test_phi_kd_lowest_weight():
    s = canonical_sl2_support("phi_kd", 10, 2)
    assert s.min_weight() == 6 and s.solid_wall == (6, "right") and s.dashed_wall == -6
    assert has_lowest_weight(s)


def test_psi_tilde_walls():
    s = canonical_sl2_support("psi_tilde", -2)
    assert s.dashed_wall == 4 and s.solid_wall == (-4, "left")
    assert not has_lowest_weight(s)
    assert s.contains(-100) and s.contains(2) and not s.contains(4)


def test_psi_and_phi_tilde():
    s = canonical_sl2_support("psi", 4)
    assert s.min_weight() == -4 and s.solid_wall == (6, "right")
    t = canonical_sl2_support("phi_tilde", -4)
    assert t.contains(-4) and not t.contains(-2) and t.extends_below


@pytest.mark.parametrize("args", [("phi_kd", 3, 0), ("phi_kd", 4, -1), ("psi", -2, 0),
                                  ("phi_tilde", 0, 0), ("psi_tilde", 2, 0), ("psi", 2, 1), ("custom", 2, 0)])
def test_canonical_domain(args):
    with pytest.raises(ValueError):
        canonical_sl2_support(*args)


def test_support_validation():
    with pytest.raises(ValueError):
        Sl2Support("custom", 0, 4, frozenset({1}))
    with pytest.raises(ValueError):
        Sl2Support("custom", 0, 4, frozenset({6}))
    with pytest.raises(ValueError):
        Sl2Support("nope", 0, 4, frozenset())


@given(k=st.integers(-4, 8).map(lambda v: 2 * v), d=st.integers(0, 4), l=st.integers(-4, 8).map(lambda v: 2 * v))
def test_tensor_min_weight(k, d, l):
    s1, s2 = canonical_sl2_support("phi_kd", k, d), canonical_sl2_support("phi_kd", l, 0)
    t = tensor_sl2(s1, s2)
    assert t.min_weight() == k - 2 * d + l == brute_tensor_min(s1, s2)
    assert t.solid_wall == (k - 2 * d + l, "right")
    assert has_lowest_weight(t)


def test_depth_matches_support():
    for k, d in ((10, 2), (6, 0), (12, 3)):
        f = et.make_phi(k, d, 1)
        for _ in range(d):
            f = et.lower(f)
        assert not f.is_zero() and f.weight == canonical_sl2_support("phi_kd", k, d).min_weight()
        assert et.lower(f).is_zero()


def test_tensor_with_point():
    s = canonical_sl2_support("psi", 4)
    t = tensor_sl2(s, point_support(0))
    assert t.materialize(-40, 40) == s.materialize(-40, 40)


def test_tensor_psi_tilde_phi_fills_window():
    t = tensor_sl2(canonical_sl2_support("psi_tilde", -2), canonical_sl2_support("phi_kd", 12))
    assert t.occupied == frozenset(range(t.w_min, t.w_max + 1, 2))
    assert t.extends_below and t.extends_above
    assert t.solid_wall is None and not has_lowest_weight(t)


def test_empty_support_has_lowest_weight():
    empty = Sl2Support("custom", 0, 0, frozenset())
    assert has_lowest_weight(empty) and has_lowest_weight(tensor_sl2(empty, canonical_sl2_support("psi_tilde", -2)))


def test_render():
    txt = render_sl2(canonical_sl2_support("phi_kd", 4, 1, radius=4))
    assert "●" in txt and "○" in txt and ">" in txt and txt.count("\n") == 1


# ------------------------------------------------------------------ K-types

def test_ktype_basics():
    with pytest.raises(ValueError):
        KType(0, 1)
    assert KType(3, 3).is_scalar and KType(5, 2).dim == 4
    assert KType.from_classical(2, 3) == KType(5, 2) and KType(5, 2).to_classical() == (2, 3)


@pytest.mark.parametrize("t1,t2,out", [
    ((1, 0), (1, 0), {(2, 0), (1, 1)}),
    ((4, -1), (0, 0), {(4, -1)}),
    ((3, 1), (2, 0), {(5, 1), (4, 2), (3, 3)}),
])
def test_clebsch_gordan_examples(t1, t2, out):
    assert {(t.a, t.b) for t in clebsch_gordan(KType(*t1), KType(*t2))} == out


@given(t1=ktypes, t2=ktypes)
def test_clebsch_gordan_against_characters(t1, t2):
    cg = clebsch_gordan(t1, t2)
    assert {t: 1 for t in cg} == character_decomposition(t1, t2)
    r1, r2 = t1.a - t1.b, t2.a - t2.b
    assert len(cg) == min(r1, r2) + 1
    assert sum(t.dim for t in cg) == t1.dim * t2.dim
    for t in cg:
        assert t.a + t.b == t1.a + t1.b + t2.a + t2.b
        assert abs(r1 - r2) <= t.a - t.b <= r1 + r2


def test_wall_holds_and_validation():
    assert wall_holds(KType(5, 1), ("right", 5)) and not wall_holds(KType(5, 1), ("up", 2))
    with pytest.raises(ValueError):
        wall_holds(KType(1, 0), ("sideways", 0))
    with pytest.raises(ValueError):
        KTypeSupport.of([(3, 0)], [("right", 4)])


def test_wall_example():
    s1 = KTypeSupport.of([(5, 0), (6, 1), (9, -3)], [("right", 5)])
    s2 = KTypeSupport.of([(2, 2), (4, 2), (7, 3)], [("up", 2)])
    out = tensor_ktype_support(s1, s2)
    assert ("right", 7) in out.walls
    assert all(t.a >= 7 for t in out.occupied)


def test_tensor_with_trivial():
    s2 = KTypeSupport.of([(2, 0), (3, 3), (2, 0)])
    out = tensor_ktype_support(KTypeSupport.of([(0, 0)]), s2)
    assert out.counts == s2.counts and out.multiplicity(KType(2, 0)) == 2


_window = st.lists(st.tuples(st.integers(-6, 5), st.integers(0, 11)), min_size=1, max_size=8)


@given(p1=_window, p2=_window, a0=st.integers(-6, 6), b0=st.integers(-6, 6))
def test_right_up_propagates(p1, p2, a0, b0):
    s1 = KTypeSupport.of([KType(max(a0, b + r), b) for b, r in p1], [("right", a0)])
    s2 = KTypeSupport.of([KType(max(b0, b) + r, max(b0, b)) for b, r in p2], [("up", b0)])
    out = tensor_ktype_support(s1, s2)
    assert ("right", a0 + b0) in out.walls
    assert all(t.a >= a0 + b0 for t in out.occupied)


@given(p1=_window, p2=_window, a0=st.integers(-6, 6), b0=st.integers(-6, 6))
def test_left_down_propagates(p1, p2, a0, b0):
    s1 = KTypeSupport.of([KType(min(a0, b + r), min(a0, b + r) - r) for b, r in p1], [("left", a0)])
    s2 = KTypeSupport.of([KType(min(b0, b) + r, min(b0, b)) for b, r in p2], [("down", b0)])
    out = tensor_ktype_support(s1, s2)
    assert ("down", a0 + b0) in out.walls
    assert all(t.b <= a0 + b0 for t in out.occupied)


def test_scalar_detection():
    assert contains_scalar_ktype(KTypeSupport.of([(3, 3)]))
    assert not contains_scalar_ktype(KTypeSupport.of([(4, 2)]))
    s = psi_module_support(4, 5)
    assert contains_scalar_ktype(s) and KType(4, 4) in s.occupied and KType(14, 4) in s.occupied
    assert s.to_dict()["walls"] == [["down", 4], ["right", 4], ["up", 4]]
