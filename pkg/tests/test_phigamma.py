import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ltphigamma import phigamma as pg
from ltphigamma.errors import NotPrimitive, OutOfRange, ZeroLambda
from ltphigamma.ffield import GF
from ltphigamma.lubin_tate import fbar, gamma_series
from ltphigamma.padic import LocalFieldSpec
from ltphigamma.reps import enumerate_classes
from ltphigamma.series import TSeries
from ltphigamma.unit_exp import one_unit_pow

from conftest import Q2, Q3, Q4, Q9, RAM2, random_unit

F2, F3 = GF(2), GF(3)


def mono(field, c, k, prec=40):
    return TSeries.monomial(field, c, k, prec)


def test_phi_matrix_of_smallest_induced_module():
    M = pg.construct_ind(Q2, 2, 1, 32)
    A = M.phi_matrix
    assert A[1][0].agrees(mono(F2, 1, 0), 32) and A[0][0].is_zero() and A[1][1].is_zero()
    assert A[0][1].agrees(mono(F2, 1, -1), 32)


@pytest.mark.parametrize("spec,n,h", [(Q2, 2, 1), (Q3, 2, 5), (Q4, 2, 1), (Q2, 3, 3)])
def test_teichmuller_acts_trivially(spec, n, h):
    M = pg.construct_ind(spec, n, h, 24)
    for a in spec.residue_field.units():
        G = M.gamma(spec.teichmuller(a, 64))
        ident = pg.mat_identity(M.field, n, M.work)
        assert pg.compare_matrices(G, ident, 24) is None


def test_gamma_entry_is_a_cube_root():
    M = pg.construct_ind(Q2, 2, 1, 32)
    g0 = M.gamma(3)[0][0]
    fb = fbar(3, N=M.work, spec=Q2)
    assert g0.agrees(one_unit_pow(fb, Fraction(1, 3), M.work), 32)
    assert (g0**3).agrees(fb, 32)
    # entry 1 carries exponent 2/3
    assert (M.gamma(3)[1][1] ** 3).agrees(fb**2, 32)


def test_rank_one_characters():
    triv = pg.construct_char(Q3, 2, F3(1), 20)
    assert triv.phi_matrix[0][0].agrees(mono(F3, 1, 0), 20)
    assert triv.gamma(5)[0][0].agrees(mono(F3, 1, 0), 20)
    M = pg.construct_char(Q3, 1, F3(1), 20)
    assert M.gamma(5)[0][0].agrees(mono(F3, 2, 0), 20)
    assert pg.construct_char(Q3, 1, F3(-1), 20).phi_matrix[0][0].coefficient(0) == F3(2)
    with pytest.raises(ZeroLambda):
        pg.construct_char(Q3, 1, F3(0), 20)


def test_twisted_examples():
    plain = pg.construct_ind(Q3, 2, 1, 24)
    same = pg.construct_twisted(Q3, 2, 1, 0, F3(1), 24)
    assert pg.modules_agree(plain, same, [4, 7], 24) is None
    M = pg.construct_twisted(Q3, 2, 1, 1, F3(-1), 24)
    assert M.phi_matrix[1][0].agrees(mono(F3, -1, 0), 24)
    assert M.phi_matrix[0][1].agrees(mono(F3, 1, -2), 24)
    with pytest.raises(ZeroLambda):
        pg.construct_twisted(Q3, 2, 1, 1, F3(0), 24)
    with pytest.raises(NotPrimitive):
        pg.construct_ind(Q3, 2, 4, 24)
    with pytest.raises(OutOfRange):
        pg.construct_ind(Q2, 1, 1, 24)


def test_semilinear_maps():
    M = pg.construct_ind(Q3, 2, 1, 24)
    k = M.field
    for j in range(2):
        col = pg.apply_phi(M, M.basis_vector(j))
        assert all(col[i].agrees(M.phi_matrix[i][j], 24) for i in range(2))
    te0 = [mono(k, 1, 1, M.work), TSeries.zero(k, M.work)]
    out = pg.apply_phi(M, te0)
    assert out[1].agrees(mono(k, 1, 3), 24) and out[0].is_zero()
    zero = [TSeries.zero(k, M.work)] * 2
    assert all(x.is_zero() for x in pg.apply_phi(M, zero))
    # gamma: u = 1 fixes everything, t e_0 picks up [u](t) times the entry
    v = [mono(k, 1, 0, M.work) + mono(k, 2, 2, M.work), mono(k, 1, 1, M.work)]
    assert all(a.agrees(b, 24) for a, b in zip(pg.apply_gamma(M, 1, v), v))
    out = pg.apply_gamma(M, 4, te0)
    assert out[0].agrees(M.substitution(4) * M.gamma(4)[0][0], 24)


def test_commutation_and_negative_control():
    M = pg.construct_ind(Q2, 2, 1, 64)
    assert pg.check_commutation(M, 1)["ok"]
    assert pg.check_commutation(M, 3, 64)["ok"]
    bad = pg.corrupt_gamma_sign(pg.construct_ind(Q3, 2, 1, 32), 1)
    rep = pg.check_commutation(bad, 4)
    assert not rep["ok"] and rep["first_failure"]["col"] == 1


def test_cocycle():
    M = pg.construct_ind(Q3, 2, 1, 64)
    assert pg.check_cocycle(M, 4, -2)["ok"]
    assert pg.check_cocycle(M, 4, 1)["ok"]
    tau = Q3.teichmuller(F3(2), 64)
    assert pg.check_cocycle(M, tau, tau)["ok"]


def test_determinant_module():
    M = pg.construct_ind(Q2, 2, 1, 32)
    D = pg.det_module(M)
    assert D.phi_matrix[0][0].agrees(mono(F2, 1, -1), 32)
    R = pg.base_change(D, [[mono(F2, 1, 1, M.work)]])
    assert R.phi_matrix[0][0].agrees(mono(F2, 1, 0), 32)
    M3 = pg.construct_ind(Q3, 2, 1, 32)
    tau = Q3.teichmuller(F3(2), 64)
    R3 = pg.base_change(pg.det_module(M3), [[mono(F3, 1, 1, M3.work)]])
    assert R3.gamma(tau)[0][0].agrees(mono(F3, 2, 0), 32)
    assert pg.check_det_identity(M3, 1, [4, tau])["ok"]
    C = pg.construct_char(Q3, 1, F3(2), 20)
    assert pg.modules_agree(pg.det_module(C), C, [4], 20) is None


def test_base_change():
    M = pg.construct_ind(Q3, 2, 1, 24)
    ident = pg.mat_identity(M.field, 2, M.work)
    assert pg.modules_agree(pg.base_change(M, ident), M, [4, 7], 24) is None
    c = [[mono(F3, 2 if i == j else 0, 0, M.work) for j in range(2)] for i in range(2)]
    assert pg.modules_agree(pg.base_change(M, c), M, [4], 24) is None
    # a non-diagonal change of basis and back
    P = [[mono(F3, 1, 0, M.work), mono(F3, 1, 1, M.work)], [TSeries.zero(F3, M.work), mono(F3, 1, 0, M.work)]]
    there = pg.base_change(M, P)
    back = pg.base_change(there, pg.mat_inverse(P))
    assert pg.modules_agree(back, M, [4], 20) is None
    assert pg.check_commutation(there, 4, 20)["ok"]


@pytest.mark.parametrize("q_spec", [Q3, LocalFieldSpec(5)], ids=["q3", "q5"])
def test_rank_one_equivalence(q_spec):
    q = q_spec.q
    for h in range(1, q - 1):
        M = pg.construct_ind(q_spec, 1, h, 32)
        R = pg.base_change(M, [[mono(q_spec.residue_field, 1, h, M.work)]])
        C = pg.construct_char(q_spec, h, q_spec.residue_field.one, 32)
        assert pg.modules_agree(R, C, [1 + q_spec.p, 2], 32) is None


def test_json_round_trip_is_table_backed():
    M = pg.construct_twisted(Q9, 2, 1, 1, GF(3, 2).gen, 16)
    units = [pg.one_plus_pi(Q9), Q9.from_int(2, 64)]
    data = json.loads(json.dumps(M.to_json(units)))
    back = pg.PhiGammaModule.from_json(data)
    assert pg.modules_agree(back, M, units, 16) is None
    with pytest.raises(KeyError):
        back.gamma(Q9.from_int(7, 64))


classes = [(spec, n, h) for spec in (Q2, Q3, Q4) for n in (2, 3) for _, h in enumerate_classes(spec.q, n)]


@settings(max_examples=15)
@given(st.sampled_from(classes), st.integers(0, 2**32))
def test_identities_for_random_units(cls, seed):
    spec, n, h = cls
    rng = random.Random(seed)
    M = pg.construct_ind(spec, n, h, 20)
    u, v = random_unit(spec, rng), random_unit(spec, rng)
    assert pg.check_commutation(M, u)["ok"]
    assert pg.check_cocycle(M, u, v)["ok"]


def test_ramified_field():
    M = pg.construct_ind(RAM2, 2, 1, 24)
    rng = random.Random(3)
    u, v = random_unit(RAM2, rng), random_unit(RAM2, rng)
    assert pg.check_commutation(M, u)["ok"] and pg.check_cocycle(M, u, v)["ok"]
    assert pg.check_det_identity(M, 1, [u, v])["ok"]


def test_short_precision_is_reported():
    M = pg.construct_ind(Q3, 2, 1, 16)
    rep = pg.check_commutation(M, 4, N=10 * M.work)
    assert not rep["ok"] and "known only" in rep["first_failure"]["reason"]
