"""Explicit etale (phi, Gamma)-modules over k((t)) and their identities.

A module of rank n is a phi-matrix A (column j is phi(e_j)) and, for every
unit u of o_F, a Gamma-matrix G_u (column j is gamma_u(e_j)).  Scalars act
semilinearly: phi is t -> t^q with k fixed, gamma_u is t -> [u](t) mod pi.
Hence for a vector v of coordinates

    phi(v) = A . phi(v),    gamma_u(v) = G_u . (v o [u](t))
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from math import lcm
from typing import Callable, Sequence

from .errors import (
    DimensionMismatch,
    FieldMismatch,
    NotAUnit,
    NotInvertible,
    NotPrimitive,
    OutOfRange,
    ZeroLambda,
)
from .ffield import FFElem, FiniteField, GF, embed
from .lubin_tate import FrobeniusSeries, fbar, gamma_series
from .padic import LocalFieldSpec, PiadicInteger
from .reps import is_q_primitive
from .series import TSeries
from .unit_exp import one_unit_pow

Matrix = list[list[TSeries]]
Vector = list[TSeries]

UNIT_PREC = 64


# ---------------------------------------------------------------------------
# matrices of series


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, r = len(a), len(b), len(b[0])
    if len(a[0]) != m:
        raise DimensionMismatch("inner dimensions differ")
    out = []
    for i in range(n):
        row = []
        for j in range(r):
            acc = a[i][0] * b[0][j]
            for k in range(1, m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_apply(a: Matrix, v: Vector) -> Vector:
    return [row[0] for row in mat_mul(a, [[x] for x in v])]


def mat_map(a: Matrix, fn: Callable[[TSeries], TSeries]) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def mat_det(a: Matrix) -> TSeries:
    """Leibniz expansion (ranks here are small)."""
    n = len(a)
    total = None
    for perm in itertools.permutations(range(n)):
        term = a[0][perm[0]]
        for i in range(1, n):
            term = term * a[i][perm[i]]
        if _parity(perm):
            term = -term
        total = term if total is None else total + term
    return total


def _parity(perm: Sequence[int]) -> int:
    seen, parity = set(), 0
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def mat_inverse(a: Matrix) -> Matrix:
    """Adjugate over det; det must be t^v times a unit."""
    n = len(a)
    det = mat_det(a)
    if det.is_zero():
        raise NotInvertible("determinant vanishes to the known precision")
    inv_det = det.invert_unit()
    if n == 1:
        return [[inv_det]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = mat_det(minor)
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof * inv_det
    return out


def mat_identity(field: FiniteField, n: int, prec: int) -> Matrix:
    return [[TSeries.monomial(field, 1 if i == j else 0, 0, prec) for j in range(n)] for i in range(n)]


def matrix_to_json(a: Matrix, prec: int) -> dict:
    field = a[0][0].field
    return {
        "n": len(a),
        "prec": prec,
        "field": {"p": field.p, "m": field.m},
        "rows": [[x.to_json() for x in row] for row in a],
    }


def matrix_from_json(data: dict) -> Matrix:
    field = GF(data["field"]["p"], data["field"]["m"])
    rows = [[TSeries.from_json(field, x) for x in row] for row in data["rows"]]
    if len(rows) != data["n"] or any(len(r) != data["n"] for r in rows):
        raise DimensionMismatch("matrix shape does not match n")
    return rows


# ---------------------------------------------------------------------------
# units


def to_unit(spec: LocalFieldSpec, u, prec: int = UNIT_PREC) -> PiadicInteger:
    if isinstance(u, int):
        u = spec.from_int(u, prec)
    elif isinstance(u, PiadicInteger):
        if u.spec != spec:
            raise FieldMismatch("unit from another local field")
    else:
        raise TypeError(f"cannot read {u!r} as a unit")
    if not u.is_unit():
        raise NotAUnit(f"{u!r} is not a unit")
    return u


def one_plus_pi(spec: LocalFieldSpec, prec: int = UNIT_PREC) -> PiadicInteger:
    return spec.one(prec) + spec.pi(prec)


def sign_power(field: FiniteField, n: int) -> FFElem:
    """(-1)^(n-1) computed in the prime field of k."""
    return field(-1) ** (n - 1)


def ind_exponent(h: int, q: int, n: int, j: int) -> Fraction:
    """h q^j (q-1) / (q^n-1) as an exact rational."""
    return Fraction(h * q**j * (q - 1), q**n - 1)


# ---------------------------------------------------------------------------


class PhiGammaModule:
    """A rank-n (phi, Gamma)-module over k((t)) with explicit matrices.

    ``gamma_fn(u)`` returns the Gamma-matrix of the unit u; results are
    memoized per (u mod pi^prec_u).  ``work`` is the internal t-precision used
    for Gamma-matrices and substitution series; identities are checked modulo
    t^N.
    """

    def __init__(
        self,
        spec: LocalFieldSpec,
        field: FiniteField,
        phi_matrix: Matrix,
        gamma_fn: Callable[[PiadicInteger], Matrix],
        N: int,
        work: int,
        phi: FrobeniusSeries | None = None,
        label: dict | None = None,
    ):
        if field.p != spec.p or field.m % spec.f:
            raise FieldMismatch(f"{field} does not contain the residue field of {spec}")
        n = len(phi_matrix)
        if any(len(row) != n for row in phi_matrix):
            raise DimensionMismatch("phi-matrix is not square")
        self.spec = spec
        self.field = field
        self.phi_matrix = phi_matrix
        self._gamma_fn = gamma_fn
        self.N = N
        self.work = work
        self.phi = phi or FrobeniusSeries.default(spec)
        self.label = label or {}
        self._memo: dict = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return len(self.phi_matrix)

    @property
    def q(self) -> int:
        return self.spec.q

    def gamma(self, u) -> Matrix:
        u = to_unit(self.spec, u)
        key = (u.coeffs, u.prec)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        mat = self._gamma_fn(u)
        with self._lock:
            self._memo[key] = mat
        return mat

    def substitution(self, u) -> TSeries:
        """[u](t) mod pi with coefficients in k."""
        u = to_unit(self.spec, u)
        return gamma_series(u, self.phi, self.work).map_field(self.field)

    def lift(self, x) -> TSeries:
        """Residue-field or k element (or series) as a constant series in k((t))."""
        if isinstance(x, TSeries):
            return x.map_field(self.field)
        return TSeries.monomial(self.field, embed(x, self.field), 0, self.work)

    def basis_vector(self, j: int) -> Vector:
        return [TSeries.monomial(self.field, 1 if i == j else 0, 0, self.work) for i in range(self.n)]

    def to_json(self, units: Sequence = ()) -> dict:
        return {
            "construction": self.label,
            "spec": self.spec.to_json(),
            "n": self.n,
            "prec": self.N,
            "work": self.work,
            "phi_matrix": matrix_to_json(self.phi_matrix, self.N),
            "gamma": [
                {"unit": to_unit(self.spec, u).to_json(), "matrix": matrix_to_json(self.gamma(u), self.N)}
                for u in units
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhiGammaModule":
        """Table-backed module: Gamma-matrices exist only for the stored units."""
        spec = LocalFieldSpec.from_json(data["spec"])
        phi_matrix = matrix_from_json(data["phi_matrix"])
        if len(phi_matrix) != data["n"]:
            raise DimensionMismatch("n does not match the phi-matrix")
        table = {}
        for entry in data.get("gamma", []):
            u = PiadicInteger.from_json(spec, entry["unit"])
            table[(u.coeffs, u.prec)] = matrix_from_json(entry["matrix"])

        def gamma_fn(u: PiadicInteger) -> Matrix:
            try:
                return table[(u.coeffs, u.prec)]
            except KeyError:
                raise KeyError(f"no Gamma-matrix stored for {u!r}") from None

        field = phi_matrix[0][0].field
        return cls(spec, field, phi_matrix, gamma_fn, int(data["prec"]), int(data.get("work", data["prec"])),
                   label=data.get("construction"))

    def __repr__(self) -> str:
        return f"PhiGammaModule(n={self.n}, field={self.field}, N={self.N}, label={self.label})"


def _work_prec(N: int, w: int) -> int:
    return N + 2 * (w + 1)


def _coefficient_field(spec: LocalFieldSpec, lam: FFElem | None = None) -> FiniteField:
    if lam is None:
        return spec.residue_field
    if lam.field.p != spec.p:
        raise FieldMismatch("lambda has the wrong characteristic")
    return GF(spec.p, lcm(spec.f, lam.field.m))


def _check_h(h: int, q: int, n: int):
    if n == 1:
        if not 1 <= h <= q - 2:
            raise OutOfRange(f"rank-1 exponent h = {h} outside 1..{q - 2}")
        return
    if not is_q_primitive(h, q, n):
        raise NotPrimitive(f"h = {h} is not {q}-primitive for n = {n}")


def construct_twisted(
    spec: LocalFieldSpec,
    n: int,
    h: int,
    s: int | None,
    lam: FFElem | None,
    N: int,
    phi: FrobeniusSeries | None = None,
) -> PhiGammaModule:
    """Basis e_0..e_{n-1} with phi(e_j) = lam e_{j+1}, phi(e_{n-1}) = (-1)^(n-1) t^(-h(q-1)) lam e_0,
    gamma(e_j) = u-bar^s fbar_u^(h q^j (q-1)/(q^n-1)) e_j.

    s = None (or a multiple of q-1) and lam = None mean no twist.
    """
    q = spec.q
    _check_h(h, q, n)
    if lam is not None and lam.is_zero():
        raise ZeroLambda("lambda must be nonzero")
    k = _coefficient_field(spec, lam)
    lam_k = k.one if lam is None else embed(lam, k)
    s = 0 if s is None else s
    w = h * (q - 1)
    work = _work_prec(N, w)
    phi = phi or FrobeniusSeries.default(spec)
    zero = TSeries.zero(k, work)
    A = [[zero for _ in range(n)] for _ in range(n)]
    for j in range(n - 1):
        A[j + 1][j] = TSeries.monomial(k, lam_k, 0, work)
    A[0][n - 1] = TSeries.monomial(k, sign_power(k, n) * lam_k, -w, work)
    exponents = [ind_exponent(h, q, n, j) for j in range(n)]

    def gamma_fn(u: PiadicInteger) -> Matrix:
        ubar = embed(u.residue(), k)
        twist = ubar**s
        fb = fbar(u, phi, work).map_field(k)
        G = [[TSeries.zero(k, work) for _ in range(n)] for _ in range(n)]
        for j in range(n):
            G[j][j] = one_unit_pow(fb, exponents[j], work) * twist
        return G

    label = {"kind": "twisted" if (s or lam is not None) else "ind", "n": n, "h": h, "s": s,
             "lambda": None if lam is None else lam.to_json(), "N": N}
    return PhiGammaModule(spec, k, A, gamma_fn, N, work, phi, label)


def construct_ind(spec: LocalFieldSpec, n: int, h: int, N: int, phi: FrobeniusSeries | None = None) -> PhiGammaModule:
    """The module of ind(omega_{nf}^h)."""
    return construct_twisted(spec, n, h, None, None, N, phi)


def construct_char(spec: LocalFieldSpec, s: int, lam: FFElem, N: int, phi: FrobeniusSeries | None = None,
                   field: FiniteField | None = None) -> PhiGammaModule:
    """Rank one: phi(e) = lam e, gamma_u(e) = u-bar^s e."""
    if lam.is_zero():
        raise ZeroLambda("lambda must be nonzero")
    k = field or _coefficient_field(spec, lam)
    lam_k = embed(lam, k)
    work = _work_prec(N, 0)
    A = [[TSeries.monomial(k, lam_k, 0, work)]]

    def gamma_fn(u: PiadicInteger) -> Matrix:
        return [[TSeries.monomial(k, embed(u.residue(), k) ** s, 0, work)]]

    label = {"kind": "char", "n": 1, "s": s, "lambda": lam.to_json(), "N": N}
    return PhiGammaModule(spec, k, A, gamma_fn, N, work, phi, label)


# ---------------------------------------------------------------------------
# semilinear maps


def _check_vector(M: PhiGammaModule, v: Vector):
    if len(v) != M.n:
        raise DimensionMismatch(f"vector of length {len(v)} for a rank-{M.n} module")
    for x in v:
        if x.field is not M.field:
            raise FieldMismatch(f"coordinate over {x.field}, module over {M.field}")


def apply_phi(M: PhiGammaModule, v: Vector) -> Vector:
    _check_vector(M, v)
    return mat_apply(M.phi_matrix, [x.frobenius_subst(M.q, 0) for x in v])


def apply_gamma(M: PhiGammaModule, u, v: Vector) -> Vector:
    _check_vector(M, v)
    g = M.substitution(u)
    return mat_apply(M.gamma(u), [x.compose(g) for x in v])


# ---------------------------------------------------------------------------
# reports


def _report(check: str, params: dict, failure: dict | None) -> dict:
    return {"check": check, "params": params, "ok": failure is None, "first_failure": failure}


def compare_matrices(lhs: Matrix, rhs: Matrix, N: int) -> dict | None:
    """First entry (row, col) where lhs and rhs differ modulo t^N, or None.

    Entries known to less than t^N count as failures.
    """
    for i, (ra, rb) in enumerate(zip(lhs, rhs)):
        for j, (a, b) in enumerate(zip(ra, rb)):
            known = min(a.prec, b.prec)
            deg = a.first_difference(b, N)
            if deg is not None:
                return {"row": i, "col": j, "degree": deg,
                        "lhs": str(a.coefficient(deg)), "rhs": str(b.coefficient(deg))}
            if known < N:
                return {"row": i, "col": j, "degree": known, "reason": f"known only modulo t^{known}"}
    return None


def _unit_param(u) -> object:
    return u.to_json() if isinstance(u, PiadicInteger) else u


def check_commutation(M: PhiGammaModule, u, N: int | None = None) -> dict:
    """gamma_u(phi(e_j)) = phi(gamma_u(e_j)) for every j, modulo t^N."""
    N = M.N if N is None else N
    cols_l, cols_r = [], []
    for j in range(M.n):
        e = M.basis_vector(j)
        cols_l.append(apply_gamma(M, u, apply_phi(M, e)))
        cols_r.append(apply_phi(M, apply_gamma(M, u, e)))
    lhs = [[cols_l[j][i] for j in range(M.n)] for i in range(M.n)]
    rhs = [[cols_r[j][i] for j in range(M.n)] for i in range(M.n)]
    params = {"module": M.label, "unit": _unit_param(u), "N": N}
    return _report("commutation", params, compare_matrices(lhs, rhs, N))


def check_cocycle(M: PhiGammaModule, u, v, N: int | None = None) -> dict:
    """G_{uv} = G_u . (G_v o [u](t)) modulo t^N."""
    N = M.N if N is None else N
    spec = M.spec
    u, v = to_unit(spec, u), to_unit(spec, v)
    g = M.substitution(u)
    lhs = M.gamma(u * v)
    rhs = mat_mul(M.gamma(u), mat_map(M.gamma(v), lambda x: x.compose(g)))
    params = {"module": M.label, "u": u.to_json(), "v": v.to_json(), "N": N}
    return _report("cocycle", params, compare_matrices(lhs, rhs, N))


# ---------------------------------------------------------------------------
# determinants and base change


def det_module(M: PhiGammaModule) -> PhiGammaModule:
    """Top exterior power: phi-scalar det(A), gamma-scalar det(G_u)."""
    A = [[mat_det(M.phi_matrix)]]

    def gamma_fn(u: PiadicInteger) -> Matrix:
        return [[mat_det(M.gamma(u))]]

    label = {"kind": "det", "of": M.label}
    return PhiGammaModule(M.spec, M.field, A, gamma_fn, M.N, M.work, M.phi, label)


def base_change(M: PhiGammaModule, P: Matrix) -> PhiGammaModule:
    """New basis e'_j = sum_i P_ij e_i."""
    if len(P) != M.n or any(len(r) != M.n for r in P):
        raise DimensionMismatch("change-of-basis matrix has the wrong shape")
    P_inv = mat_inverse(P)
    A = mat_mul(P_inv, mat_mul(M.phi_matrix, mat_map(P, lambda x: x.frobenius_subst(M.q, 0))))

    def gamma_fn(u: PiadicInteger) -> Matrix:
        g = M.substitution(u)
        return mat_mul(P_inv, mat_mul(M.gamma(u), mat_map(P, lambda x: x.compose(g))))

    label = {"kind": "base_change", "of": M.label}
    return PhiGammaModule(M.spec, M.field, A, gamma_fn, M.N, M.work, M.phi, label)


def fold_exponent(h: int, q: int) -> int:
    """h mod (q-1) represented in 1..q-1."""
    return (h - 1) % (q - 1) + 1


def check_det_identity(M: PhiGammaModule, h: int, units: Sequence, N: int | None = None,
                       s: int | None = None, lam: FFElem | None = None) -> dict:
    """After rescaling by t^h, det M has phi = lam^n and gamma_u = u-bar^(h + n s).

    Compared entrywise with the corresponding rank-one module; for the
    untwisted module this is phi = 1 and gamma_u = u-bar^h.
    """
    N = M.N if N is None else N
    k = M.field
    n, q = M.n, M.q
    D = base_change(det_module(M), [[TSeries.monomial(k, 1, h, M.work)]])
    lam_n = k.one if lam is None else embed(lam, k) ** n
    C = construct_char(M.spec, fold_exponent(h + n * (s or 0), q), lam_n, N, M.phi, field=k)
    params = {"module": M.label, "h": h, "N": N, "units": [_unit_param(u) for u in units]}
    return _report("det_identity", params, modules_agree(D, C, units, N))


def modules_agree(M1: PhiGammaModule, M2: PhiGammaModule, units: Sequence, N: int) -> dict | None:
    failure = compare_matrices(M1.phi_matrix, M2.phi_matrix, N)
    if failure is not None:
        failure["map"] = "phi"
        return failure
    for u in units:
        failure = compare_matrices(M1.gamma(u), M2.gamma(u), N)
        if failure is not None:
            failure["map"] = "gamma"
            failure["unit"] = _unit_param(u)
            return failure
    return None


# ---------------------------------------------------------------------------
# negative controls


def corrupt_gamma_exponent(M: PhiGammaModule, j: int = 0) -> PhiGammaModule:
    """Raise the fbar-exponent of the diagonal Gamma-entry j by one."""

    def gamma_fn(u: PiadicInteger) -> Matrix:
        G = [row[:] for row in M.gamma(u)]
        G[j][j] = G[j][j] * fbar(u, M.phi, M.work).map_field(M.field)
        return G

    label = dict(M.label, corrupted=f"gamma_exponent[{j}]+1")
    return PhiGammaModule(M.spec, M.field, M.phi_matrix, gamma_fn, M.N, M.work, M.phi, label)


def corrupt_gamma_sign(M: PhiGammaModule, j: int = 0) -> PhiGammaModule:
    """Negate the Gamma-entry (j, j)."""

    def gamma_fn(u: PiadicInteger) -> Matrix:
        G = [row[:] for row in M.gamma(u)]
        G[j][j] = -G[j][j]
        return G

    label = dict(M.label, corrupted=f"gamma_sign[{j}]")
    return PhiGammaModule(M.spec, M.field, M.phi_matrix, gamma_fn, M.N, M.work, M.phi, label)


def corrupt_phi_sign(M: PhiGammaModule, i: int | None = None, j: int | None = None) -> PhiGammaModule:
    """Negate one phi-matrix entry (default: the wrap-around entry (0, n-1))."""
    i = 0 if i is None else i
    j = M.n - 1 if j is None else j
    A = [row[:] for row in M.phi_matrix]
    A[i][j] = -A[i][j]
    label = dict(M.label, corrupted=f"phi_sign[{i},{j}]")
    return PhiGammaModule(M.spec, M.field, A, M._gamma_fn, M.N, M.work, M.phi, label)
