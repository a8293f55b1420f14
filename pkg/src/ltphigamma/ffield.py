"""Finite fields F_{p^m} over the prime field, with deterministic moduli.

Elements are coefficient vectors over F_p (lowest degree first) modulo the
lowest monic irreducible polynomial of degree ``m``.  Candidates are ordered
by the integer code ``sum(c_i * p**i)`` of their non-leading coefficients,
and elements are searched in the same code order.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .errors import DivisionByZero, NoEmbedding, SingularMatrix


# ---------------------------------------------------------------------------
# polynomials over F_p (lists, lowest degree first)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], g: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    dg = len(g) - 1
    inv_lead = pow(g[-1], -1, p)
    for k in range(len(a) - 1, dg - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            for i in range(dg + 1):
                a[k - dg + i] = (a[k - dg + i] - c * g[i]) % p
    return _trim(a[:dg] if len(a) > dg else a)


def _pmulmod(a: list[int], b: list[int], g: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    c = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p
    return _pmod(c.tolist(), g, p)


def _ppowmod(a: list[int], e: int, g: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(list(a), g, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, g, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, g, p)
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible(g: Sequence[int], p: int) -> bool:
    """Ben-Or test for a monic polynomial over F_p."""
    m = len(g) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if g[0] % p == 0:
        return False
    h = [0, 1]
    for _ in range(m // 2):
        h = _ppowmod(h, p, g, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        d = _pgcd(list(g), _trim(diff), p)
        if len(d) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def lowest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lowest monic irreducible of degree m over F_p, coefficients lowest first."""
    for code in range(p**m):
        tail = [(code // p**i) % p for i in range(m)]
        g = tail + [1]
        if is_irreducible(g, p):
            return tuple(g)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# linear algebra over F_p


def row_reduce_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod_p(a: np.ndarray, p: int) -> int:
    if np.size(a) == 0:
        return 0
    return len(row_reduce_mod_p(a, p)[1])


def nullspace_mod_p(a: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {x : a @ x = 0 mod p}."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    rref, pivots = row_reduce_mod_p(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for fc in free:
        x = np.zeros(cols, dtype=np.int64)
        x[fc] = 1
        for i, pc in enumerate(pivots):
            x[pc] = (-rref[i, fc]) % p
        basis.append(x)
    return basis


# ---------------------------------------------------------------------------
# fields and elements


class FiniteField:
    """The field F_{p^m} = F_p[x]/(modulus)."""

    def __init__(self, p: int, m: int):
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        if m < 1:
            raise ValueError("degree must be >= 1")
        self.p = p
        self.m = m
        self.order = p**m
        self.modulus = lowest_irreducible(p, m)
        # row k holds x^(m+k) reduced to the basis 1, x, ..., x^(m-1)
        red = np.zeros((max(m - 1, 0), m), dtype=np.int64)
        cur = [(-c) % p for c in self.modulus[:m]]
        for k in range(m - 1):
            red[k] = cur
            lead = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(cur[i] - lead * self.modulus[i]) % p for i in range(m)]
        self.reduction = red
        self._frob_cache: dict[int, np.ndarray] = {}
        self._embed_cache: dict[tuple[int, int], FFElem] = {}

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (GF, (self.p, self.m))

    # construction ------------------------------------------------------

    def __call__(self, x) -> "FFElem":
        if isinstance(x, FFElem):
            if x.field is self:
                return x
            return embed(x, self)
        if isinstance(x, int):
            return FFElem(self, (x % self.p,) + (0,) * (self.m - 1))
        coeffs = [int(c) % self.p for c in x]
        if len(coeffs) > self.m:
            raise ValueError(f"{len(coeffs)} coefficients for a degree-{self.m} field")
        return FFElem(self, tuple(coeffs) + (0,) * (self.m - len(coeffs)))

    def from_code(self, code: int) -> "FFElem":
        return FFElem(self, tuple((code // self.p**i) % self.p for i in range(self.m)))

    def from_array(self, arr) -> "FFElem":
        return FFElem(self, tuple(int(c) % self.p for c in arr))

    @property
    def zero(self) -> "FFElem":
        return self(0)

    @property
    def one(self) -> "FFElem":
        return self(1)

    @property
    def gen(self) -> "FFElem":
        """The class of x (the root of the modulus)."""
        if self.m == 1:
            return self(-self.modulus[0])
        return self([0, 1])

    def elements(self, start: int = 0) -> Iterator["FFElem"]:
        for code in range(start, self.order):
            yield self.from_code(code)

    def units(self) -> Iterator["FFElem"]:
        return self.elements(1)

    # raw arithmetic on coefficient arrays -----------------------------

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        c = np.convolve(a, b)
        if self.m == 1:
            return c % self.p
        return (c[: self.m] + c[self.m :] @ self.reduction) % self.p

    def frobenius_matrix(self, e: int) -> np.ndarray:
        """Matrix F with coeffs(c^(p^e)) = F @ coeffs(c)."""
        e %= self.m
        if e not in self._frob_cache:
            if e == 0:
                mat = np.eye(self.m, dtype=np.int64)
            else:
                one_step = self._frob_cache.get(1)
                if one_step is None:
                    cols = [np.asarray(_pow_basis(self, i), dtype=np.int64) for i in range(self.m)]
                    one_step = np.stack(cols, axis=1) % self.p
                    self._frob_cache[1] = one_step
                mat = np.eye(self.m, dtype=np.int64)
                for _ in range(e):
                    mat = one_step @ mat % self.p
            self._frob_cache[e] = mat
        return self._frob_cache[e]

    def contains_degree(self, m: int) -> bool:
        return self.m % m == 0


def _pow_basis(field: FiniteField, i: int) -> tuple[int, ...]:
    x = FFElem(field, tuple(1 if k == i else 0 for k in range(field.m)))
    return (x**field.p).c


def GF(p: int, m: int = 1) -> FiniteField:
    """Cached field constructor; one object per (p, m)."""
    return _gf(int(p), int(m))


@lru_cache(maxsize=None)
def _gf(p: int, m: int) -> FiniteField:
    return FiniteField(p, m)


class FFElem:
    __slots__ = ("field", "c")

    def __init__(self, field: FiniteField, c: tuple[int, ...]):
        self.field = field
        self.c = c

    # arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "FFElem":
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FFElem(self.field, tuple((a + b) % p for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FFElem(self.field, tuple((-a) % p for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.field
        if f.m == 1:
            return FFElem(f, (self.c[0] * other.c[0] % f.p,))
        prod = f.mul_arrays(np.asarray(self.c, dtype=np.int64), np.asarray(other.c, dtype=np.int64))
        return FFElem(f, tuple(int(x) for x in prod))

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in " + repr(self.field))
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, e: int) -> "FFElem":
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        if self.is_zero():
            return f.one if e == 0 else self
        e %= f.order - 1
        if f.m == 1:
            return FFElem(f, (pow(self.c[0], e, f.p),))
        result = f.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frobenius_power(self, j: int, q: int) -> "FFElem":
        """x^(q^j); q must be a power of the characteristic."""
        f = self.field
        k = _log_p(q, f.p)
        e = (k * j) % f.m
        if e == 0:
            return self
        v = f.frobenius_matrix(e) @ np.asarray(self.c, dtype=np.int64) % f.p
        return FFElem(f, tuple(int(x) for x in v))

    # comparison --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.field(other)
        if not isinstance(other, FFElem):
            return NotImplemented
        return self.field is other.field and self.c == other.c

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.m, self.c))

    @property
    def code(self) -> int:
        p = self.field.p
        return sum(a * p**i for i, a in enumerate(self.c))

    def to_json(self) -> list[int]:
        return list(self.c)

    def __repr__(self) -> str:
        if self.field.m == 1:
            return str(self.c[0])
        terms = [f"{a}*x^{i}" if i else str(a) for i, a in enumerate(self.c) if a]
        return "(" + (" + ".join(terms) or "0") + ")"


def _log_p(q: int, p: int) -> int:
    k = 0
    while q > 1:
        if q % p:
            raise ValueError(f"{q} is not a power of {p}")
        q //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# field maps


def subfield_basis(source_degree: int, target: FiniteField) -> list[np.ndarray]:
    """F_p-basis of the unique subfield of degree source_degree in target."""
    frob = target.frobenius_matrix(source_degree)
    return nullspace_mod_p((frob - np.eye(target.m, dtype=np.int64)) % target.p, target.p)


def _eval_poly(coeffs: Sequence[int], x: FFElem) -> FFElem:
    acc = x.field.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def embedding_image(source: FiniteField, target: FiniteField) -> FFElem:
    """Image of source.gen: the root of source.modulus in target with least code."""
    if source.p != target.p or target.m % source.m:
        raise NoEmbedding(f"no embedding {source} -> {target}")
    key = (source.p, source.m)
    if key not in target._embed_cache:
        if source.m == target.m and source is target:
            root = target.gen
        else:
            basis = subfield_basis(source.m, target)
            best = None
            for digits in product(range(target.p), repeat=len(basis)):
                vec = sum((d * b for d, b in zip(digits, basis)), np.zeros(target.m, dtype=np.int64)) % target.p
                y = target.from_array(vec)
                if _eval_poly(source.modulus, y).is_zero() and (best is None or y.code < best.code):
                    best = y
            if best is None:  # pragma: no cover
                raise NoEmbedding(f"no root of {source.modulus} in {target}")
            root = best
        target._embed_cache[key] = root
    return target._embed_cache[key]


def embed(x: FFElem, target: FiniteField) -> FFElem:
    """Ring homomorphism F_{p^a} -> F_{p^b} for a | b, fixing F_p."""
    src = x.field
    if src is target:
        return x
    if src.p != target.p or target.m % src.m:
        raise NoEmbedding(f"no embedding {src} -> {target}")
    if src.m == 1:
        return target(x.c[0])
    return _eval_poly(x.c, embedding_image(src, target))


def embed_via(x: FFElem, *fields: FiniteField) -> FFElem:
    """Embed along an explicit chain of fields (keeps towers compatible)."""
    for f in fields:
        x = embed(x, f)
    return x


# ---------------------------------------------------------------------------
# searches


def fq_rank(vectors: Sequence[Sequence[FFElem]], q: int) -> int:
    """F_q-dimension of the span of vectors with entries in one field containing F_q."""
    if not vectors:
        return 0
    field = vectors[0][0].field
    f = _log_p(q, field.p)
    fq = GF(field.p, f)
    scalars = [embed(fq.from_code(field.p**r), field) for r in range(f)]
    rows = []
    for v in vectors:
        for s in scalars:
            rows.append(np.concatenate([np.asarray((s * x).c, dtype=np.int64) for x in v]))
    return rank_mod_p(np.stack(rows), field.p) // f


def solve_root_of_sign(n: int, q: int) -> FFElem:
    """Least alpha (in code order) with alpha^(q^n - 1) = (-1)^(n-1).

    Lives in F_{q^n} when the sign is 1 in F_p, else in F_{q^(2n)}.
    """
    p = _prime_of(q)
    f = _log_p(q, p)
    sign = 1 if (n % 2 == 1 or p == 2) else -1
    field = GF(p, f * n) if sign == 1 else GF(p, 2 * f * n)
    target = field(sign)
    e = q**n - 1
    for a in field.units():
        if a**e == target:
            return a
    raise AssertionError("unreachable: the equation is solvable")  # pragma: no cover


def normal_basis_element(n: int, q: int) -> FFElem:
    """Least x in F_{q^n} whose q-power conjugates are F_q-independent."""
    p = _prime_of(q)
    field = GF(p, _log_p(q, p) * n)
    for x in field.units():
        conj = [[x.frobenius_power(j, q)] for j in range(n)]
        if fq_rank(conj, q) == n:
            return x
    raise AssertionError("normal basis theorem violated")  # pragma: no cover


def _prime_of(q: int) -> int:
    if q < 2:
        raise ValueError(f"bad prime power {q}")
    d = 2
    while d * d <= q:
        if q % d == 0:
            return d
        d += 1
    return q


# ---------------------------------------------------------------------------
# matrices over a finite field (lists of rows)


Matrix = list[list[FFElem]]


def mat_identity(field: FiniteField, n: int) -> Matrix:
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    field = a[0][0].field
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), field.zero) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def mat_det(a: Matrix) -> FFElem:
    field = a[0][0].field
    m = [row[:] for row in a]
    n = len(m)
    det = field.one
    for c in range(n):
        piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
        if piv is None:
            return field.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for r in range(c + 1, n):
            if not m[r][c].is_zero():
                factor = m[r][c] * inv
                m[r] = [x - factor * y for x, y in zip(m[r], m[c])]
    return det


def mat_frobenius(a: Matrix, q: int, j: int = 1) -> Matrix:
    return [[x.frobenius_power(j, q) for x in row] for row in a]


def multiplication_matrix(lam: FFElem, q: int) -> Matrix:
    """Matrix over F_q of y -> lam * y on F_{q^n} in the basis 1, x, x^2, ...

    Requires the field of lam to be F_{q^n} with basis taken from its own
    generator powers; the F_q-coordinates come from a change of basis over F_p.
    """
    field = lam.field
    n = field.m // _log_p(q, field.p)
    basis = relative_basis(field, q)
    coords = _relative_coordinates(field, q, basis)
    cols = [coords(lam * b) for b in basis]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def relative_basis(field: FiniteField, q: int) -> list[FFElem]:
    """F_q-basis 1, x, ..., x^(n-1) of field = F_{q^n} (x = field generator)."""
    f = _log_p(q, field.p)
    n = field.m // f
    return [field.gen**i for i in range(n)]


def _relative_coordinates(field: FiniteField, q: int, basis: Sequence[FFElem]):
    p = field.p
    f = _log_p(q, p)
    fq = GF(p, f)
    scalars = [embed(fq.from_code(p**r), field) for r in range(f)]
    cols = [np.asarray((s * b).c, dtype=np.int64) for b in basis for s in scalars]
    mat = np.stack(cols, axis=1) % p  # columns indexed by (basis i, scalar r)
    if rank_mod_p(mat, p) != field.m:
        raise ValueError("not a relative basis")

    def coords(y: FFElem) -> list[FFElem]:
        aug = np.concatenate([mat, np.asarray(y.c, dtype=np.int64)[:, None]], axis=1)
        rref, piv = row_reduce_mod_p(aug, p)
        sol = np.zeros(mat.shape[1], dtype=np.int64)
        for i, pc in enumerate(piv):
            sol[pc] = rref[i, -1]
        return [fq(sol[i * f : (i + 1) * f].tolist()) for i in range(len(basis))]

    return coords


def matrix_order(a: Matrix, cap: int = 1_000_000) -> int:
    field = a[0][0].field
    ident = mat_identity(field, len(a))
    cur = a
    for k in range(1, cap + 1):
        if cur == ident:
            return k
        cur = mat_mul(cur, a)
    raise ValueError("matrix order exceeds cap")


def semilinear_fixed_basis(M: Matrix, q: int, target: FiniteField | None = None) -> list[list[FFElem]]:
    """F_q-basis of {v : M * sigma(v) = v}, sigma the coordinatewise q-power.

    Solutions are sought in ``target`` (a field containing the entries of M);
    when omitted, the smallest field containing all solutions is used, found
    from the order of M * sigma(M) * ... * sigma^(d-1)(M).
    """
    src = M[0][0].field
    p = src.p
    f = _log_p(q, p)
    if src.m % f:
        raise ValueError("matrix entries must lie in an extension of F_q")
    n = len(M)
    if mat_det(M).is_zero():
        raise SingularMatrix("semilinear fixed points need an invertible matrix")
    d = src.m // f
    if target is None:
        norm = M
        for j in range(1, d):
            norm = mat_mul(norm, mat_frobenius(M, q, j))
        r = matrix_order(norm)
        target = GF(p, src.m * r)
    Mt = [[embed(x, target) for x in row] for row in M]
    m = target.m
    frob = target.frobenius_matrix(f)
    # M sigma(v) - v as an F_p-linear map on F_p^(n*m)
    cols = []
    for i in range(n):
        for k in range(m):
            basis_elem = FFElem(target, tuple(1 if t == k else 0 for t in range(m)))
            sig = target.from_array(frob[:, k])
            image = []
            for r in range(n):
                val = Mt[r][i] * sig
                if r == i:
                    val = val - basis_elem
                image.append(np.asarray(val.c, dtype=np.int64))
            cols.append(np.concatenate(image))
    lin = np.stack(cols, axis=1) % p
    kernel = nullspace_mod_p(lin, p)
    vectors = [[target.from_array(vec[r * m : (r + 1) * m]) for r in range(n)] for vec in kernel]
    chosen: list[list[FFElem]] = []
    for v in vectors:
        if fq_rank(chosen + [v], q) == len(chosen) + 1:
            chosen.append(v)
        if len(chosen) == n:
            break
    if len(chosen) != n:  # pragma: no cover
        raise AssertionError(f"fixed space has F_q-dimension {len(chosen)}, expected {n}")
    return chosen
