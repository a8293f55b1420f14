"""The tame extension F'((y)), y^d = t with d = (q^n-1)/(q-1), and the
vectors that identify the Galois representation of an induced module.

Series in y are plain ``TSeries`` whose variable is read as y.  Coefficients
move along the fixed chain F_q -> F_{q^n} -> F' so that every embedding used
here is compatible with every other one.

Only inertia-type Galois elements are modelled: g is the pair (u, zeta) of
its values under the Lubin-Tate character and the level-nf fundamental
character; g fixes coefficients and sends y to y zeta^q fbar_u^(-(q-1)/(q^n-1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import FieldMismatch, IncompatiblePair, SearchFailed, ShapeMismatch
from .ffield import (
    FFElem,
    FiniteField,
    GF,
    _log_p,
    _prime_of,
    embed,
    embed_via,
    fq_rank,
    multiplication_matrix,
    normal_basis_element,
    relative_basis,
    semilinear_fixed_basis,
)
from .lubin_tate import fbar, gamma_series
from .padic import LocalFieldSpec, PiadicInteger
from .phigamma import PhiGammaModule
from .series import TSeries
from .unit_exp import one_unit_pow


class TameRing:
    """F'((y)) for given (q, n): F' = F_{q^2n} if p is odd and n even, else F_{q^n}."""

    def __init__(self, q: int, n: int):
        p = _prime_of(q)
        f = _log_p(q, p)
        self.q, self.n, self.p, self.f = q, n, p, f
        self.d = (q**n - 1) // (q - 1)
        self.base = GF(p, f)
        self.level = GF(p, f * n)
        wide = p != 2 and n % 2 == 0
        self.field = GF(p, 2 * f * n) if wide else self.level

    def __repr__(self) -> str:
        return f"TameRing(q={self.q}, n={self.n}, field={self.field})"

    def chain(self, field: FiniteField) -> tuple[FiniteField, ...]:
        """Fields to pass through when moving coefficients from ``field`` into F'."""
        if field is self.field:
            return ()
        if field is self.level or field.m == self.level.m:
            return (self.field,)
        if self.level.m % field.m == 0:
            return (self.level, self.field)
        if self.field.m % field.m == 0:
            return (self.field,)
        raise FieldMismatch(f"{field} does not embed in {self.field}")

    def scalar(self, x: FFElem) -> FFElem:
        return embed_via(x, *self.chain(x.field))

    def lift_to_y(self, f: TSeries) -> TSeries:
        """Substitute t = y^d: valuations and precision are multiplied by d."""
        f = f.map_field(*self.chain(f.field))
        d = self.d
        length = d * (f.prec - f.val)
        block = np.zeros((length, self.field.m), dtype=np.int64)
        block[::d][: len(f.coeffs)] = f.coeffs
        return TSeries(self.field, d * f.val, block, d * f.prec)

    def monomial(self, c, k: int, prec: int) -> TSeries:
        if isinstance(c, FFElem):
            c = self.scalar(c)
        return TSeries.monomial(self.field, c, k, prec)

    def frobenius(self, x: TSeries) -> TSeries:
        """q-power Frobenius: coefficients to the q-th power and y -> y^q."""
        return x.frobenius_subst(self.q, 1)


# ---------------------------------------------------------------------------
# inertia


@dataclass(frozen=True)
class InertiaElem:
    """Inertia element with chi_L(g) = u and omega_nf(g) = zeta (in F_{q^n})."""

    u: PiadicInteger
    zeta: FFElem

    def compatible(self, ring: TameRing) -> bool:
        zeta = self.zeta
        ubar = embed(self.u.residue(), ring.level)
        return zeta**ring.d == ubar

    def check(self, ring: TameRing):
        if self.zeta.field is not ring.level:
            raise FieldMismatch(f"zeta must lie in {ring.level}")
        if not self.compatible(ring):
            raise IncompatiblePair("zeta^((q^n-1)/(q-1)) differs from the residue of u")

    def __mul__(self, other: "InertiaElem") -> "InertiaElem":
        return InertiaElem(self.u * other.u, self.zeta * other.zeta)


def identity_elem(spec: LocalFieldSpec, n: int, prec: int = 64) -> InertiaElem:
    return InertiaElem(spec.one(prec), GF(spec.p, spec.f * n).one)


def compatible_zeta(u: PiadicInteger, n: int, nontrivial: bool = True) -> FFElem:
    """Least zeta in F_{q^n} with zeta^d = residue(u), preferring zeta != 1."""
    spec = u.spec
    ring = TameRing(spec.q, n)
    target = embed(u.residue(), ring.level)
    fallback = None
    for z in ring.level.units():
        if z**ring.d == target:
            if not nontrivial or z != ring.level.one:
                return z
            fallback = z
    if fallback is None:  # pragma: no cover - d-th powers are onto F_q^x
        raise SearchFailed("no compatible zeta")
    return fallback


def incompatible_zeta(u: PiadicInteger, n: int) -> FFElem:
    """Least zeta in F_{q^n} violating zeta^d = residue(u) (negative control).

    For q = 2 every unit is compatible, so there is none.
    """
    ring = TameRing(u.spec.q, n)
    target = embed(u.residue(), ring.level)
    for z in ring.level.units():
        if z**ring.d != target:
            return z
    raise SearchFailed(f"every unit of {ring.level} is compatible with {u!r}")


def image_of_y(g: InertiaElem, ring: TameRing, N: int, phi=None) -> TSeries:
    """y zeta^q fbar_u^(-(q-1)/(q^n-1)) as a y-series known modulo y^(1 + d N)."""
    g.check(ring)
    q = ring.q
    fb = fbar(g.u, phi, N)
    c = one_unit_pow(fb, Fraction(-(q - 1), q**ring.n - 1), N)
    zq = ring.scalar(g.zeta) ** q
    unit = ring.lift_to_y(c) * zq
    return TSeries(ring.field, 1, unit.coeffs, unit.prec + 1)


def inertia_act(g: InertiaElem, x: TSeries, ring: TameRing, N: int, phi=None) -> TSeries:
    """g(x) for a y-series x; coefficients are fixed, y goes to image_of_y."""
    return x.compose(image_of_y(g, ring, N, phi))


def _report(check: str, params: dict, failure: dict | None) -> dict:
    return {"check": check, "params": params, "ok": failure is None, "first_failure": failure}


def _diff(a: TSeries, b: TSeries, N: int, where: dict) -> dict | None:
    deg = a.first_difference(b, N)
    if deg is not None:
        return dict(where, degree=deg, lhs=str(a.coefficient(deg)), rhs=str(b.coefficient(deg)))
    known = min(a.prec, b.prec)
    if known < N:
        return dict(where, degree=known, reason=f"known only modulo y^{known}")
    return None


def _gparam(g: InertiaElem) -> dict:
    return {"u": g.u.to_json(), "zeta": g.zeta.to_json()}


def check_y_relation(g: InertiaElem, ring: TameRing, N_t: int, phi=None) -> dict | None:
    """(image of y)^d = lift of [u](t) mod pi, modulo y^(d N_t)."""
    if not g.compatible(ring):
        return {"reason": "incompatible pair: zeta^d differs from the residue of u",
                "zeta_pow_d": (g.zeta**ring.d).to_json(), "u_residue": g.u.residue().to_json()}
    Y = image_of_y(g, ring, N_t, phi)
    lhs = Y**ring.d
    rhs = ring.lift_to_y(gamma_series(g.u, phi, N_t))
    return _diff(lhs, rhs, ring.d * N_t - ring.d, {"relation": "y^d = t"})


def check_action_group_law(g1: InertiaElem, g2: InertiaElem, ring: TameRing, N_t: int, phi=None,
                           test_series: Sequence[TSeries] = ()) -> dict:
    """g1 g2 agrees with g1 o g2 on y and on lifted t-series.

    Since g fixes coefficients, (g1 g2)(y) = g1(g2(y)) = Y_{g2}(Y_{g1}(y)).
    """
    params = {"g1": _gparam(g1), "g2": _gparam(g2), "N_t": N_t, "q": ring.q, "n": ring.n}
    for g in (g1, g2):
        bad = check_y_relation(g, ring, N_t, phi)
        if bad is not None:
            return _report("group_law", params, bad)
    N_y = ring.d * N_t - ring.d
    g12 = g1 * g2
    Y1, Y2, Y12 = (image_of_y(g, ring, N_t, phi) for g in (g1, g2, g12))
    bad = _diff(Y12, Y2.compose(Y1), N_y, {"on": "y", "order": "g1(g2(y))"})
    if bad is None:
        bad = _diff(Y12, Y1.compose(Y2), N_y, {"on": "y", "order": "g2(g1(y))"})
    if bad is None:
        for i, f in enumerate(test_series):
            lhs = inertia_act(g12, ring.lift_to_y(f), ring, N_t, phi)
            rhs = ring.lift_to_y(f.compose(gamma_series(g12.u, phi, N_t)))
            bad = _diff(lhs, rhs, min(N_y, rhs.prec), {"on": f"lifted series {i}"})
            if bad is not None:
                break
    return _report("group_law", params, bad)


# ---------------------------------------------------------------------------
# product model and the vectors v_j


@dataclass
class ProductVector:
    """comps[c][i] = coefficient of e_i in the product component c."""

    comps: list[list[TSeries]]

    @property
    def n(self) -> int:
        return len(self.comps)

    def scale_left(self, kappa: FFElem, q: int) -> "ProductVector":
        """Left k-structure: component c is multiplied by kappa^(q^c)."""
        return ProductVector([[x * kappa ** (q**c) for x in comp] for c, comp in enumerate(self.comps)])

    def to_json(self) -> list:
        return [[x.to_json() for x in comp] for comp in self.comps]


def build_vj(M: PhiGammaModule, alpha: FFElem, h: int, ring: TameRing, N_y: int) -> list[ProductVector]:
    """v_j: the basis vector e_i carries alpha^(q^i) y^(q^i h) in component j + i."""
    n, q = M.n, ring.q
    if ring.n != n or M.q != q:
        raise ShapeMismatch(f"module of rank {n} over q={M.q} vs tame ring {ring}")
    alpha = ring.scalar(alpha)
    # the entries are exact monomials; carry enough precision to survive t^(-h(q-1))
    N_y = N_y + ring.d * (h * (q - 1) + 1)
    out = []
    for j in range(n):
        comps = [[TSeries.zero(ring.field, N_y) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            comps[(j + i) % n][i] = TSeries.monomial(ring.field, alpha ** (q**i), q**i * h, N_y)
        out.append(ProductVector(comps))
    return out


def _lift_matrix(ring: TameRing, A) -> list[list[TSeries]]:
    return [[ring.lift_to_y(x) for x in row] for row in A]


def apply_product_phi(M: PhiGammaModule, v: ProductVector, ring: TameRing) -> ProductVector:
    """phi(sum x_i e_i) = sum rot(phi_q x_i) A e_i: component c of the result uses component c-1."""
    n = v.n
    A = _lift_matrix(ring, M.phi_matrix)
    comps = []
    for c in range(n):
        src = [ring.frobenius(x) for x in v.comps[(c - 1) % n]]
        comps.append([_dot(A[l], src) for l in range(n)])
    return ProductVector(comps)


def apply_product_inertia(M: PhiGammaModule, v: ProductVector, g: InertiaElem, ring: TameRing,
                          N_t: int) -> ProductVector:
    """g acts componentwise on coordinates and through G_u on the basis."""
    n = v.n
    G = _lift_matrix(ring, M.gamma(g.u))
    Y = image_of_y(g, ring, N_t, M.phi)
    comps = []
    for c in range(n):
        src = [x.compose(Y) for x in v.comps[c]]
        comps.append([_dot(G[l], src) for l in range(n)])
    return ProductVector(comps)


def _dot(row: Sequence[TSeries], vec: Sequence[TSeries]) -> TSeries:
    acc = row[0] * vec[0]
    for a, b in zip(row[1:], vec[1:]):
        acc = acc + a * b
    return acc


def _compare_vectors(a: ProductVector, b: ProductVector, N: int) -> dict | None:
    for c in range(a.n):
        for i in range(a.n):
            bad = _diff(a.comps[c][i], b.comps[c][i], N, {"component": c, "basis": i})
            if bad is not None:
                return bad
    return None


def check_phi_fixed(M: PhiGammaModule, v: ProductVector, ring: TameRing, N_y: int, j: int | None = None) -> dict:
    params = {"module": M.label, "j": j, "N_y": N_y}
    return _report("phi_fixed", params, _compare_vectors(apply_product_phi(M, v, ring), v, N_y))


def eigen_exponent(h: int, q: int, n: int, j: int) -> int:
    """Exponent of zeta in the eigenvalue of v_j: h q^(1-j) taken mod q^n - 1."""
    return h * pow(q, (1 - j) % n, q**n - 1) % (q**n - 1)


def check_inertia_eigen(M: PhiGammaModule, v: ProductVector, j: int, h: int, g: InertiaElem, ring: TameRing,
                        N_y: int) -> dict:
    """g(v_j) = zeta^(q^(1-j) h) . v_j for the left k-structure.

    The pair (u, zeta) must define a consistent action: y^d = t is checked first.
    """
    q, n = ring.q, ring.n
    params = {"module": M.label, "j": j, "g": _gparam(g), "N_y": N_y}
    N_t = -(-N_y // ring.d) + 1
    bad = check_y_relation(g, ring, N_t, M.phi)
    if bad is not None:
        return _report("inertia_eigen", params, bad)
    kappa = ring.scalar(g.zeta) ** eigen_exponent(h, q, n, j)
    lhs = apply_product_inertia(M, v, g, ring, N_t)
    rhs = v.scale_left(kappa, q)
    return _report("inertia_eigen", params, _compare_vectors(lhs, rhs, N_y))


# ---------------------------------------------------------------------------
# rank one: the unramified twist


def _trace(x: FFElem, q: int, n: int) -> FFElem:
    acc = x
    y = x
    for _ in range(n - 1):
        y = y**q
        acc = acc + y
    return acc


def _dual_generator(x: FFElem, q: int, n: int) -> FFElem:
    """y_0 with Tr(y_0 x^(q^l)) = delta_{l,0}; its conjugates form the trace-dual basis."""
    conj = [x ** (q**l) for l in range(n)]
    for y in x.field.elements():
        if all(_trace(y * c, q, n) == (x.field.one if l == 0 else x.field.zero) for l, c in enumerate(conj)):
            return y
    raise SearchFailed("no trace-dual element")  # pragma: no cover - the trace form is nondegenerate


def _mult_order(x: FFElem) -> int:
    order = x.field.order - 1
    r = order
    for pr in _prime_factors(order):
        while r % pr == 0 and (x ** (r // pr)) == x.field.one:
            r //= pr
    return r


def _prime_factors(m: int) -> list[int]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def unramified_descent(lam: FFElem, n: int, q: int) -> tuple[dict, dict]:
    """A basis vector e of the rank-one module of mu_lambda, lambda in F_{q^n}.

    Model: Omega ⊗ k with k = F_{q^n} (dimension n over F_q) is split as the
    product of n copies of Omega, Omega = F_{q^(n r)} with r the order of
    lambda^n.  The Galois Frobenius is w_j -> lambda^(-q^j) sigma(w_{j-1}), the
    module Frobenius is w_j -> sigma(w_{j-1}).  We take beta with
    beta^(q^n - 1) = lambda^n, put v = (beta, 0, ..., 0) (obtained from x ⊗ beta
    through the idempotent built from a normal basis x and its trace dual) and
    e = v + phi(v) + ... + phi^(n-1)(v).
    """
    p = _prime_of(q)
    f = _log_p(q, p)
    k = GF(p, f * n)
    if lam.field.p != p or k.m % lam.field.m:
        raise FieldMismatch(f"lambda must lie in F_(q^n) = {k}")
    lam = embed(lam, k)
    if lam.is_zero():
        raise ValueError("lambda must be nonzero")
    c = lam**n
    r = _mult_order(c)
    omega = GF(p, f * n * r)
    c_om = embed(c, omega)
    lam_om = embed(lam, omega)
    tau = omega.frobenius_matrix(f * n)  # q^n-power
    sigma = omega.frobenius_matrix(f)  # q-power

    def frob(x: FFElem, mat) -> FFElem:
        return omega.from_array(mat @ np.asarray(x.c, dtype=np.int64) % p)

    # Hilbert 90: beta = sum_i c^(-i) tau^i(theta) satisfies tau(beta) = c beta
    beta = None
    theta = omega.one
    gen = omega.gen
    for _ in range(omega.order):
        acc, t = omega.zero, theta
        c_inv = c_om.inverse()
        w = omega.one
        for _ in range(r):
            acc = acc + w * t
            t = frob(t, tau)
            w = w * c_inv
        if not acc.is_zero():
            beta = acc
            break
        theta = theta * gen
    if beta is None or beta ** (q**n - 1) != c_om:
        raise SearchFailed("could not solve beta^(q^n - 1) = lambda^n")

    # idempotent of component 0 from a normal basis and its trace dual
    x = normal_basis_element(n, q)
    y0 = _dual_generator(x, q, n)
    ys = [y0 ** (q**i) for i in range(n)]
    xs = [x ** (q**i) for i in range(n)]

    def to_product(pairs) -> list[FFElem]:
        """sum a ⊗ z  ->  (sum sigma^j(a) z)_j."""
        return [sum((embed(a ** (q**j), omega) * z for a, z in pairs), omega.zero) for j in range(n)]

    v = to_product([(yi, embed(xi, omega) * beta) for yi, xi in zip(ys, xs)])

    def phi_gal(w: list[FFElem]) -> list[FFElem]:
        return [lam_om.inverse() ** (q**j) * frob(w[(j - 1) % n], sigma) for j in range(n)]

    def phi_mod(w: list[FFElem]) -> list[FFElem]:
        return [frob(w[(j - 1) % n], sigma) for j in range(n)]

    e = list(v)
    cur = v
    for _ in range(n - 1):
        cur = phi_gal(cur)
        e = [a + b for a, b in zip(e, cur)]

    checks = {}
    checks["idempotent"] = v == [beta] + [omega.zero] * (n - 1)
    checks["e_nonzero"] = any(not z.is_zero() for z in e)
    checks["galois_fixed"] = phi_gal(e) == e
    checks["frobenius_eigen"] = phi_mod(e) == [lam_om ** (q**j) * z for j, z in enumerate(e)]

    # cross-check against the F_q-linear description: M sigma(w) = w, M = mult by 1/lambda
    M = [[embed(a, k) for a in row] for row in multiplication_matrix(lam.inverse(), q)]
    basis = relative_basis(k, q)
    sols = semilinear_fixed_basis(M, q, target=omega)
    ratios = []
    for w in sols:
        z = sum((embed(b, omega) * wi for b, wi in zip(basis, w)), omega.zero)
        ratios.append(z / e[0])
    in_k = all(frob(rat, tau) == rat for rat in ratios)
    checks["matches_semilinear_solver"] = in_k and fq_rank([[rr] for rr in ratios], q) == n

    data = {
        "q": q,
        "n": n,
        "lambda": lam.to_json(),
        "omega_degree": omega.m,
        "beta": beta.to_json(),
        "normal_basis_element": x.to_json(),
        "e": [z.to_json() for z in e],
    }
    failure = None
    for name, ok in checks.items():
        if not ok:
            failure = {"failed": name}
            break
    report = {"check": "unramified_descent", "params": {"q": q, "n": n, "lambda": lam.to_json()},
              "ok": failure is None, "first_failure": failure, "details": checks}
    return data, report
