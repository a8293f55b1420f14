"""p-adic powers f^s of 1-units f in F[[t]], s a p-integral rational."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DenominatorDivisibleByP, NotAOneUnit
from .series import TSeries


@dataclass(frozen=True)
class PExponent:
    """Reduced fraction num/den with p not dividing den."""

    num: int
    den: int
    p: int

    def __post_init__(self):
        if self.den == 0:
            raise ZeroDivisionError("zero denominator")
        num, den = self.num, self.den
        if den < 0:
            num, den = -num, -den
        g = gcd(num, den)
        num, den = num // g, den // g
        if den % self.p == 0:
            raise DenominatorDivisibleByP(f"{num}/{den} is not {self.p}-integral")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def of(cls, s, p: int) -> "PExponent":
        if isinstance(s, PExponent):
            return s
        s = Fraction(s)
        return cls(s.numerator, s.denominator, p)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __add__(self, other: "PExponent") -> "PExponent":
        s = self.as_fraction() + PExponent.of(other, self.p).as_fraction()
        return PExponent.of(s, self.p)

    def __mul__(self, other) -> "PExponent":
        s = self.as_fraction() * PExponent.of(other, self.p).as_fraction()
        return PExponent.of(s, self.p)

    def __neg__(self) -> "PExponent":
        return PExponent(-self.num, self.den, self.p)

    def to_json(self) -> dict:
        return {"num": self.num, "den": self.den}

    @classmethod
    def from_json(cls, data: dict, p: int) -> "PExponent":
        return cls(int(data["num"]), int(data["den"]), p)


def padic_digits(s: PExponent, count: int) -> list[int]:
    """Base-p digits d_i with num = den * sum d_i p^i modulo p^count."""
    if count < 1:
        raise ValueError("count must be positive")
    p = s.p
    if s.den % p == 0:
        raise DenominatorDivisibleByP(f"denominator {s.den} divisible by {p}")
    mod = p**count
    x = s.num * pow(s.den, -1, mod) % mod
    digits = []
    for _ in range(count):
        x, d = divmod(x, p)
        digits.append(d)
    return digits


def _digit_count(p: int, N: int) -> int:
    k, pk = 0, 1
    while pk < N:
        k += 1
        pk *= p
    return max(k, 1)


def one_unit_pow(f: TSeries, s, N: int | None = None) -> TSeries:
    """f^s for a 1-unit f, computed modulo t^N (default: the precision of f).

    f^s = prod_i (f^(p^i))^(d_i) with f^(p^i) obtained by t -> t^(p^i) and
    coefficients raised to p^i; terms with p^i >= N are 1 modulo t^N.
    """
    field = f.field
    p = field.p
    if f.val != 0 or f.is_zero() or f.leading() != field.one:
        raise NotAOneUnit("series does not have constant term 1")
    s = PExponent.of(s, p)
    N = f.prec if N is None else min(N, f.prec)
    f = f.truncate(N)
    result = TSeries.one(field, N)
    if s.num == 0:
        return result
    if s.den == 1 and 0 < s.num < p:
        return f ** s.num
    digits = padic_digits(s, _digit_count(p, N))
    pi_pow = f
    for i, d in enumerate(digits):
        if i:
            pi_pow = pi_pow.frobenius_subst(p, 1).truncate(N)
        if d:
            result = (result * pi_pow ** d).truncate(N)
    return result
