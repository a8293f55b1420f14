"""Labels of irreducible mod p representations ind(omega_{nf}^h) (x) omega_f^s (x) mu_lambda.

Only integer bookkeeping lives here: q-primitivity, Frobenius orbits of
exponents, the canonical label and the isomorphism test.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, NotPrimitive, OutOfRange, TooLarge, ZeroLambda
from .ffield import FFElem, GF, _log_p, _prime_of, embed

ENUMERATION_LIMIT = 2**20


def _check_q(q: int) -> int:
    p = _prime_of(q)
    _log_p(q, p)
    return p


def _check_range(h: int, q: int, n: int):
    if n < 1:
        raise OutOfRange("n must be positive")
    if not 1 <= h <= q**n - 2:
        raise OutOfRange(f"h = {h} outside 1..{q**n - 2}")


def orbit(h: int, q: int, n: int) -> list[int]:
    """{h q^j mod (q^n - 1) : 0 <= j < n}, sorted."""
    _check_range(h, q, n)
    mod = q**n - 1
    return sorted({h * pow(q, j, mod) % mod for j in range(n)})


def _primitive_by_divisibility(h: int, q: int, n: int) -> bool:
    mod = q**n - 1
    for d in range(1, n):
        if n % d == 0 and h % (mod // (q**d - 1)) == 0:
            return False
    return True


def _primitive_by_orbit(h: int, q: int, n: int) -> bool:
    mod = q**n - 1
    return len({h * pow(q, j, mod) % mod for j in range(n)}) == n


def is_q_primitive(h: int, q: int, n: int) -> bool:
    """No d < n with (q^n-1)/(q^d-1) dividing h; equivalently the orbit has n elements."""
    _check_q(q)
    _check_range(h, q, n)
    a = _primitive_by_divisibility(h, q, n)
    b = _primitive_by_orbit(h, q, n)
    if a != b:  # pragma: no cover - the two criteria are equivalent
        raise AssertionError(f"primitivity criteria disagree for h={h}, q={q}, n={n}")
    return a


def canonical_h(h: int, q: int, n: int) -> int:
    return orbit(h, q, n)[0]


def enumerate_classes(q: int, n: int) -> list[tuple[list[int], int]]:
    """(orbit, minimum) for every orbit of q-primitive exponents in 1..q^n-2."""
    _check_q(q)
    if n < 1:
        raise OutOfRange("n must be positive")
    if q**n > ENUMERATION_LIMIT:
        raise TooLarge(f"q^n = {q**n} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    mod = q**n - 1
    seen: set[int] = set()
    out = []
    for h in range(1, mod):
        if h in seen:
            continue
        orb = sorted({h * pow(q, j, mod) % mod for j in range(n)})
        seen.update(orb)
        primitive = len(orb) == n
        if primitive != _primitive_by_divisibility(h, q, n):  # pragma: no cover
            raise AssertionError(f"primitivity criteria disagree for h={h}, q={q}, n={n}")
        if primitive:
            out.append((orb, orb[0]))
    return out


def count_primitive(q: int, n: int) -> int:
    return sum(1 for h in range(1, q**n - 1) if _primitive_by_divisibility(h, q, n))


# ---------------------------------------------------------------------------


def _common_field(a: FFElem, b: FFElem):
    fa, fb = a.field, b.field
    if fa is fb:
        return a, b
    if fb.m % fa.m == 0:
        return embed(a, fb), b
    if fa.m % fb.m == 0:
        return a, embed(b, fa)
    from math import lcm

    big = GF(fa.p, lcm(fa.m, fb.m))
    return embed(a, big), embed(b, big)


@dataclass(frozen=True)
class RepClass:
    """ind(omega_{nf}^h) (x) omega_f^s (x) mu_lambda.

    s lives in 1..q-1 (s = q-1 is the trivial omega_f-twist).  The invariant
    of the unramified part is lambda^n.
    """

    q: int
    n: int
    h: int
    s: int
    lam: FFElem

    def __post_init__(self):
        p = _check_q(self.q)
        if self.lam.field.p != p:
            raise ValueError("lambda lives in a field of the wrong characteristic")
        if self.lam.is_zero():
            raise ZeroLambda("lambda must be nonzero")
        if not 1 <= self.s <= self.q - 1:
            raise OutOfRange(f"s = {self.s} outside 1..{self.q - 1}")
        if self.n == 1:
            if not 0 <= self.h <= max(self.q - 2, 0):
                raise OutOfRange(f"h = {self.h} outside 0..{self.q - 2}")
            return
        _check_range(self.h, self.q, self.n)
        H = self.combined
        if H == self.q**self.n - 1 or not is_q_primitive(H, self.q, self.n):
            raise NotPrimitive(f"exponent {self.combined} is not {self.q}-primitive for n={self.n}")

    @property
    def d(self) -> int:
        return (self.q**self.n - 1) // (self.q - 1)

    @property
    def combined(self) -> int:
        """h + s (q^n-1)/(q-1) reduced mod q^n - 1, folded into 1..q^n-1."""
        mod = self.q**self.n - 1
        return (self.h + self.s * self.d - 1) % mod + 1

    @property
    def lam_pow_n(self) -> FFElem:
        return self.lam**self.n

    def canonical(self) -> "RepClass":
        """Least orbit representative with h in 1..d-1 and omega_f part in s.

        For n = 1 everything folds into s and h = 0.
        """
        q, n = self.q, self.n
        mod = q**n - 1
        d = self.d
        best = None
        for j in range(n):
            H = self.combined * pow(q, j, mod) % mod
            h, s = H % d, (H // d) % (q - 1)
            s = s or q - 1
            if best is None or (h, s) < best:
                best = (h, s)
        h, s = best
        return RepClass(q, n, h, s, self.lam)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "h": self.h,
            "s": self.s,
            "lambda": self.lam.to_json(),
            "lambda_pow_n": self.lam_pow_n.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RepClass":
        q = int(data["q"])
        p = _prime_of(q)
        coeffs = list(data["lambda"])
        field = GF(p, max(len(coeffs), 1))
        return cls(q, int(data["n"]), int(data["h"]), int(data["s"]), field(coeffs))


def is_isomorphic(a: RepClass, b: RepClass) -> bool:
    """Same orbit of the combined exponent and equal lambda^n."""
    if (a.q, a.n) != (b.q, b.n):
        raise DimensionMismatch(f"(q, n) = {(a.q, a.n)} vs {(b.q, b.n)}")
    q, n = a.q, a.n
    mod = q**n - 1
    orb_a = {a.combined * pow(q, j, mod) % mod for j in range(n)}
    if b.combined % mod not in orb_a:
        return False
    x, y = _common_field(a.lam_pow_n, b.lam_pow_n)
    return x == y
