import pytest
from hypothesis import given, strategies as st

from ltphigamma.errors import NotDivisible, PrecisionExhausted
from ltphigamma.ffield import GF
from ltphigamma.padic import LocalFieldSpec, PiadicInteger

from conftest import Q2, Q3, Q4, RAM2, SPECS

ints = st.integers(min_value=-10**12, max_value=10**12)
precs = st.integers(min_value=1, max_value=40)


@given(ints, ints, precs, precs)
def test_unramified_matches_integers_mod_p_power(a, b, k1, k2):
    for spec in (Q2, Q3):
        x, y = spec.from_int(a, k1), spec.from_int(b, k2)
        k = min(k1, k2)
        mod = spec.p**k
        assert (x + y).coeffs[0] == (a + b) % mod
        assert (x - y).coeffs[0] == (a - b) % mod
        assert (x * y).coeffs[0] == (a * b) % mod
        assert (x * y).prec == k


def test_small_sums_and_absorbing_zero():
    s = Q2.from_int(3, 10) + Q2.from_int(5, 10)
    assert s.equals(Q2.from_int(8, 10))
    z = Q2.from_int(7, 12) * Q2.zero(5)
    assert z.prec == 5 and z.valuation() == 5


def test_defining_relation_of_ramified_spec():
    pi = RAM2.pi(20)
    assert (pi * pi).equals(RAM2.from_int(2, 20))
    assert pi.valuation() == 1 and RAM2.from_int(2, 20).valuation() == 2


def test_divide_by_pi():
    x = Q3.from_int(6, 5).divide_by_pi_exact()
    assert x.equals(Q3.from_int(2, 4)) and x.prec == 4
    with pytest.raises(NotDivisible):
        Q2.from_int(1, 5).divide_by_pi_exact()
    y = RAM2.from_int(2, 9).divide_by_pi_exact()
    assert y.equals(RAM2.pi(8)) and y.prec == 8
    with pytest.raises(PrecisionExhausted):
        Q2.zero(0).divide_by_pi_exact()


def test_residues():
    assert Q2.from_int(3, 4).residue() == GF(2).one
    assert Q3.from_int(5, 4).residue() == GF(3)(2)


def test_teichmuller_lifts():
    for a in GF(2, 2).elements():
        assert Q4.teichmuller(a, 20).residue() == a
    assert Q3.teichmuller(GF(3)(0), 8).equals(Q3.zero(8))
    assert Q3.teichmuller(GF(3)(1), 8).equals(Q3.one(8))
    minus_one = Q3.teichmuller(GF(3)(2), 10)
    assert minus_one.equals(Q3.from_int(-1, 10))
    assert [d.c[0] for d in minus_one.digits()] == [2] * 10
    tau = LocalFieldSpec(5).teichmuller(GF(5)(2), 15)
    assert (tau**4).equals(LocalFieldSpec(5).one(15))
    assert tau.residue() == GF(5)(2)


@pytest.mark.parametrize("name", sorted(SPECS))
@given(data=st.data())
def test_inverse_and_ring_axioms(name, data):
    spec = SPECS[name]
    k = data.draw(precs)
    n = spec.e * spec.f
    flat = lambda: [data.draw(st.integers(0, 10**9)) for _ in range(n)]
    x, y, z = (spec.element(flat(), k) for _ in range(3))
    assert ((x * y) * z).equals(x * (y * z))
    assert (x * (y + z)).equals(x * y + x * z)
    assert (x - x).valuation() == k
    if x.is_unit():
        assert (x * x.inverse()).equals(spec.one(k))


@pytest.mark.parametrize("name", sorted(SPECS))
def test_json_round_trip(name, rng):
    spec = SPECS[name]
    from conftest import random_unit

    u = random_unit(spec, rng, 30)
    assert PiadicInteger.from_json(spec, u.to_json()) == u
    assert LocalFieldSpec.from_json(spec.to_json()) == spec


def test_invalid_specs():
    with pytest.raises(ValueError):
        LocalFieldSpec(4)
    with pytest.raises(ValueError):
        LocalFieldSpec(2, e=2)
    with pytest.raises(ValueError):
        LocalFieldSpec(2, e=2, eis=((4,), (0,)))
    with pytest.raises(ValueError):
        LocalFieldSpec(2, e=2, eis=((2,), (1,)))
