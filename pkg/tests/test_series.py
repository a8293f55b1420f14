import pytest
from hypothesis import given, strategies as st

from ltphigamma.errors import CompositionDiverges, NotAUnit, PrecisionExhausted
from ltphigamma.ffield import GF
from ltphigamma.series import TSeries, series_from_ints

F2, F3, F4 = GF(2), GF(3), GF(2, 2)


def ints_of(s: TSeries, upto: int) -> list[int]:
    return [s.coefficient(i).c[0] for i in range(upto)]


def naive_product(a, b, p, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[: n - i]):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def naive_compose(f, g, p, n):
    """Horner with schoolbook products, everything mod t^n."""
    acc = [0] * n
    for c in reversed(f[:n]):
        acc = naive_product(acc, g, p, n)
        acc[0] = (acc[0] + c) % p
    return acc


coeff_lists = st.lists(st.integers(0, 2), min_size=1, max_size=25)


@given(coeff_lists, coeff_lists)
def test_product_matches_schoolbook(a, b):
    n = 20
    x, y = series_from_ints(3, a, n), series_from_ints(3, b, n)
    assert ints_of(x * y, n) == naive_product(a + [0] * n, b + [0] * n, 3, n)


@given(coeff_lists, st.lists(st.integers(0, 2), min_size=2, max_size=12))
def test_composition_matches_horner(f, g):
    n = 18
    g = [0] + g[1:]
    if not any(g):
        g[1] = 1
    x, y = series_from_ints(3, f, n), series_from_ints(3, g, n)
    got = x.compose(y)
    assert got.prec >= n
    assert ints_of(got, n) == naive_compose(f, g + [0] * n, 3, n)


def test_worked_products():
    assert series_from_ints(3, [1, 1], 10) * series_from_ints(3, [1, 2], 10) == series_from_ints(3, [1, 0, 2], 10)
    t_inv = TSeries.monomial(F2, 1, -1, 10)
    assert (t_inv * TSeries.t(F2, 10)).agrees(TSeries.one(F2, 10), 9)
    assert series_from_ints(2, [1, 1], 10) ** 2 == series_from_ints(2, [1, 0, 1], 10)


def test_inverses():
    assert ints_of(series_from_ints(2, [1, 1], 12).invert_unit(), 12) == [1] * 12
    expected = [1, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 0]
    assert ints_of(series_from_ints(2, [1, 1, 1], 12).invert_unit(), 12) == expected
    c = TSeries.monomial(F4, F4.gen, 0, 5)
    assert c.invert_unit().coefficient(0) == F4.gen.inverse()
    with pytest.raises(NotAUnit):
        TSeries.zero(F2, 5).invert_unit()


@given(st.lists(st.integers(0, 2), min_size=1, max_size=30), st.integers(-3, 3))
def test_inverse_multiplies_back(coeffs, v):
    coeffs = [1] + coeffs
    f = series_from_ints(3, coeffs, 30 + v, val=v)
    one = f * f.invert_unit()
    assert one.val == 0 and one.agrees(TSeries.one(F3, 100), one.prec)


def test_composition_examples():
    f = series_from_ints(2, [1, 1, 0, 1], 10)
    assert f.compose(TSeries.t(F2, 10)) == f
    c = F3(2)
    g = TSeries.monomial(F3, c, 1, 12)
    got = TSeries.monomial(F3, 1, -1, 12).compose(g)
    assert got.val == -1 and got.coefficient(-1) == c.inverse()
    assert series_from_ints(2, [1, 1], 10).compose(TSeries.monomial(F2, 1, 2, 20)) == series_from_ints(2, [1, 0, 1], 20)
    with pytest.raises(CompositionDiverges):
        f.compose(TSeries.one(F2, 10))


def test_composition_precision_rule():
    f = series_from_ints(2, [1, 1, 1], 10)
    g = series_from_ints(2, [1, 1], 8, val=2)  # t^2 + t^3 + O(t^8)
    h = f.compose(g)
    assert h.prec == min(10 * 2, 8)
    fl = series_from_ints(2, [1, 1], 6, val=-2)  # t^-2 + t^-1 + O(t^6)
    assert fl.compose(g).prec == min(6 * 2, 8 + (-3) * 2)


@given(coeff_lists, coeff_lists, coeff_lists)
def test_composition_is_associative(f, g, h):
    n = 15
    g, h = [0, 1] + g, [0, 2] + h
    F, G, H = (series_from_ints(3, x, n) for x in (f, g, h))
    lhs = F.compose(G.compose(H))
    rhs = F.compose(G).compose(H)
    assert lhs.agrees(rhs, min(lhs.prec, rhs.prec))


def test_frobenius_substitution():
    assert TSeries.t(F3, 10).frobenius_subst(3) == TSeries.monomial(F3, 1, 3, 30)
    f = series_from_ints(2, [1, 1], 10)
    assert f.frobenius_subst(2).agrees(f**2, 20)
    a = F4.gen
    g = TSeries.from_list(F4, [a, 1], 5)
    assert g.frobenius_subst(2, 1).coefficient(0) == a**2
    assert g.frobenius_subst(2, 0).coefficient(0) == a
    assert g.frobenius_subst(4, 1).coefficient(0) == a


@pytest.mark.parametrize("field,q", [(F4, 2), (F4, 4), (GF(3, 2), 3), (GF(3, 2), 9)])
@given(codes=st.lists(st.integers(0, 8), min_size=1, max_size=64))
def test_full_twist_is_qth_power(field, q, codes):
    f = TSeries.from_list(field, [field.from_code(c % field.order) for c in codes], 64)
    assert f.frobenius_subst(q, 1).agrees(f**q, 64 * q)
    g = TSeries.from_list(field, [field.from_code((c * 5 + 1) % field.order) for c in codes], 64)
    assert (f * g).frobenius_subst(q, 0).agrees(f.frobenius_subst(q, 0) * g.frobenius_subst(q, 0), 64 * q)


@given(st.lists(st.integers(0, 8), min_size=1, max_size=40), st.integers(-4, 4))
def test_invert_unit_is_an_involution(codes, v):
    field = GF(3, 2)
    f = TSeries.from_list(field, [1] + [field.from_code(c) for c in codes], 40 + v, val=v)
    back = f.invert_unit().invert_unit()
    assert back.val == f.val and back.agrees(f, f.prec)


@given(coeff_lists, coeff_lists, st.integers(4, 20))
def test_doubling_precision_reproduces_truncation(f, g, N):
    """A pipeline at precision 2N, truncated to N, equals the pipeline at N."""
    def pipeline(n):
        a = series_from_ints(3, [1] + f, n)
        b = series_from_ints(3, [0, 1] + g, n)
        return (a * a.compose(b)).invert_unit() ** 2

    lo, hi = pipeline(N), pipeline(2 * N)
    assert lo.prec <= hi.prec and hi.truncate(lo.prec) == lo


def test_precision_is_not_overclaimed():
    f = series_from_ints(2, [1, 1], 5)
    g = series_from_ints(2, [1, 0, 1], 9)
    assert (f + g).prec == 5 and (f * g).prec == 5
    with pytest.raises(PrecisionExhausted):
        f.coefficient(5)
    z = TSeries.zero(F2, 4)
    assert (z * TSeries.monomial(F2, 1, 3, 10)).prec == 7


def test_json_round_trip_and_field_map():
    f = TSeries.from_list(F4, [F4.gen, 0, 1], 7, val=-1)
    assert TSeries.from_json(F4, f.to_json()) == f
    F16 = GF(2, 4)
    up = f.map_field(F16)
    assert up.field is F16 and up.prec == 7 and (up * up).map_field(F16) == (f * f).map_field(F16)
