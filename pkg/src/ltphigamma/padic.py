"""Elements of o_F / pi^k for a finite extension F of Q_p.

o_F is modelled as W[pi] / (pi^e - r_{e-1} pi^{e-1} - ... - r_0) where W is
the unramified ring Z_p[x]/(P) and P lifts the deterministic degree-f modulus
of the residue field.  An element is the flat integer tuple of its W-coefficients
in the basis pi^0, ..., pi^{e-1}; the coefficient of pi^i is reduced modulo
p^ceil((k - i)/e), which is exactly reduction modulo pi^k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

from .errors import DivisionByZero, NotDivisible, PrecisionExhausted, SpecMismatch
from .ffield import FFElem, FiniteField, GF, lowest_irreducible


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class LocalFieldSpec:
    """F/Q_p with residue degree f and ramification index e.

    ``eis`` holds r_0, ..., r_{e-1} with pi^e = r_0 + r_1 pi + ... + r_{e-1} pi^{e-1};
    each r_i is a tuple of f integers (coefficients in W, lowest degree first).
    Empty ``eis`` is only allowed for e = 1 and means pi = p.
    """

    p: int
    f: int = 1
    e: int = 1
    eis: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        p, f, e = self.p, self.f, self.e
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        if f < 1 or e < 1:
            raise ValueError("f and e must be positive")
        eis = self.eis
        if not eis:
            if e != 1:
                raise ValueError("an Eisenstein relation is required when e > 1")
            eis = ((p,) + (0,) * (f - 1),)
        eis = tuple(tuple(int(c) for c in r) + (0,) * (f - len(r)) for r in eis)
        if len(eis) != e or any(len(r) != f for r in eis):
            raise ValueError("eis needs e coefficients of f integers each")
        r0 = eis[0]
        if any(c % p for c in r0) or not any((c // p) % p for c in r0):
            raise ValueError("constant Eisenstein coefficient must have p-valuation exactly 1")
        if any(c % p for r in eis[1:] for c in r):
            raise ValueError("non-constant Eisenstein coefficients must be divisible by p")
        object.__setattr__(self, "eis", eis)

    # ------------------------------------------------------------------

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def residue_field(self) -> FiniteField:
        return GF(self.p, self.f)

    @cached_property
    def modulus(self) -> tuple[int, ...]:
        return lowest_irreducible(self.p, self.f)

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "e": self.e, "eis": [list(r) for r in self.eis]}

    @classmethod
    def from_json(cls, data: dict | str) -> "LocalFieldSpec":
        if isinstance(data, str):
            data = json.loads(data)
        eis = data.get("eis")
        e = data.get("e", len(eis) if eis else 1)
        return cls(
            p=int(data["p"]),
            f=int(data.get("f", 1)),
            e=int(e),
            eis=tuple(tuple(r) for r in eis) if eis else (),
        )

    def __repr__(self) -> str:
        return f"LocalFieldSpec(p={self.p}, f={self.f}, e={self.e})"

    # constructors -----------------------------------------------------

    def element(self, coeffs: Sequence, prec: int) -> "PiadicInteger":
        """Element from W-coefficients of pi^0, ..., pi^{e-1}.

        ``coeffs`` is either a flat sequence of e*f ints, or e sequences of f ints,
        or (when e = f = 1) a single int.
        """
        if isinstance(coeffs, int):
            flat = [coeffs] + [0] * (self.e * self.f - 1)
        else:
            flat = []
            items = list(coeffs)
            if items and not isinstance(items[0], int):
                for r in items:
                    r = list(r)
                    flat.extend(r + [0] * (self.f - len(r)))
            else:
                flat = items
            flat = flat + [0] * (self.e * self.f - len(flat))
        if len(flat) != self.e * self.f:
            raise ValueError("wrong number of coefficients")
        return PiadicInteger(self, _ring(self, prec).reduce(flat), prec)

    def from_int(self, n: int, prec: int) -> "PiadicInteger":
        return self.element(n, prec)

    def zero(self, prec: int) -> "PiadicInteger":
        return self.element(0, prec)

    def one(self, prec: int) -> "PiadicInteger":
        return self.element(1, prec)

    def pi(self, prec: int) -> "PiadicInteger":
        if self.e == 1:
            return self.element(self.eis[0], prec)
        flat = [0] * (self.e * self.f)
        flat[self.f] = 1
        return self.element(flat, prec)

    def lift(self, a: FFElem, prec: int) -> "PiadicInteger":
        """Lift with coefficients in {0, ..., p-1}."""
        self._check_residue(a)
        return self.element(list(a.c), prec)

    def teichmuller(self, a: FFElem, prec: int) -> "PiadicInteger":
        """The (q-1)-st root of unity (or 0) with residue a."""
        self._check_residue(a)
        if prec < 1:
            raise PrecisionExhausted("Teichmuller lift needs prec >= 1")
        mod = self.p ** _ceil_div(prec, self.e)
        w = _wring(self)
        x = [c % mod for c in a.c]
        while True:
            y = w.pow(x, self.q, mod)
            if y == x:
                break
            x = y
        return self.element(x + [0] * (self.f * (self.e - 1)), prec)

    def _check_residue(self, a: FFElem):
        if a.field is not self.residue_field:
            raise SpecMismatch(f"{a!r} is not in {self.residue_field}")


# ---------------------------------------------------------------------------
# raw arithmetic


class _WRing:
    """Z[x]/(P) with P monic: exact integer polynomial arithmetic."""

    def __init__(self, spec: LocalFieldSpec):
        f = spec.f
        self.f = f
        mod = spec.modulus
        # xred[k] = x^(f+k) in the basis 1..x^(f-1), exact over Z
        xred = []
        cur = [-c for c in mod[:f]]
        for _ in range(max(f - 1, 0)):
            xred.append(cur)
            lead = cur[-1]
            cur = [0] + cur[:-1]
            cur = [cur[i] - lead * mod[i] for i in range(f)]
        self.xred = xred

    def mul(self, a: Sequence[int], b: Sequence[int], mod: int) -> list[int]:
        f = self.f
        if f == 1:
            return [a[0] * b[0] % mod]
        c = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    c[i + j] += ai * bj
        res = c[:f]
        for k, ck in enumerate(c[f:]):
            if ck:
                row = self.xred[k]
                for i in range(f):
                    res[i] += ck * row[i]
        return [x % mod for x in res]

    def pow(self, a: Sequence[int], n: int, mod: int) -> list[int]:
        result = [1] + [0] * (self.f - 1)
        base = list(a)
        while n:
            if n & 1:
                result = self.mul(result, base, mod)
            n >>= 1
            if n:
                base = self.mul(base, base, mod)
        return result


@lru_cache(maxsize=None)
def _wring(spec: LocalFieldSpec) -> _WRing:
    return _WRing(spec)


class _Ring:
    """o_F / pi^K on flat coefficient lists."""

    def __init__(self, spec: LocalFieldSpec, K: int):
        self.spec = spec
        self.K = K
        e, f, p = spec.e, spec.f, spec.p
        self.e, self.f, self.p = e, f, p
        self.mods = [p ** max(0, _ceil_div(K - i, e)) for i in range(e)]
        self.big = p ** max(1, _ceil_div(K, e))
        self.w = _wring(spec)
        self.fast = e == 1 and f == 1

    def reduce(self, a: Sequence[int]) -> tuple[int, ...]:
        f = self.f
        return tuple(int(a[i]) % self.mods[i // f] for i in range(len(a)))

    def add(self, a, b):
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.reduce([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.reduce([-x for x in a])

    def mul(self, a, b) -> tuple[int, ...]:
        if self.fast:
            return (a[0] * b[0] % self.mods[0],)
        e, f, big = self.e, self.f, self.big
        w = self.w
        c = [[0] * f for _ in range(2 * e - 1)]
        for i in range(e):
            ai = a[i * f : (i + 1) * f]
            if not any(ai):
                continue
            for j in range(e):
                bj = b[j * f : (j + 1) * f]
                if not any(bj):
                    continue
                prod = w.mul(ai, bj, big)
                ck = c[i + j]
                for r in range(f):
                    ck[r] += prod[r]
        eis = self.spec.eis
        for k in range(2 * e - 2, e - 1, -1):
            top = [x % big for x in c[k]]
            if not any(top):
                continue
            for i in range(e):
                prod = w.mul(top, eis[i], big)
                ck = c[k - e + i]
                for r in range(f):
                    ck[r] += prod[r]
        flat = [x for i in range(e) for x in c[i]]
        return self.reduce(flat)

    def is_zero_mod_pi(self, a) -> bool:
        return all(x % self.p == 0 for x in a[: self.f])

    def div_pi(self, a) -> tuple[int, ...]:
        """Exact division by pi; the caller guarantees divisibility."""
        f, e = self.f, self.e
        if not self.is_zero_mod_pi(a):
            raise NotDivisible("element is not divisible by pi")
        b = [x // self.p for x in a[:f]] + [0] * (f * (e - 1))
        shifted = list(a[f:]) + [0] * f
        q = self.mul(tuple(b), p_over_pi(self.spec, self.K))
        return self.reduce([x + y for x, y in zip(q, shifted)])

    def one(self):
        return self.reduce([1] + [0] * (self.e * self.f - 1))

    def inv(self, a) -> tuple[int, ...]:
        """Inverse of a unit by Newton iteration from the residue inverse."""
        spec = self.spec
        res = FFElem(spec.residue_field, tuple(x % self.p for x in a[: self.f]))
        if res.is_zero():
            raise DivisionByZero("not a unit")
        y = self.reduce(list(res.inverse().c) + [0] * (self.f * (self.e - 1)))
        two = self.reduce([2] + [0] * (self.e * self.f - 1))
        correct = 1
        while correct < self.K:
            y = self.mul(y, self.sub(two, self.mul(a, y)))
            correct *= 2
        return y


@lru_cache(maxsize=None)
def _ring(spec: LocalFieldSpec, K: int) -> _Ring:
    return _Ring(spec, max(K, 0))


@lru_cache(maxsize=None)
def p_over_pi(spec: LocalFieldSpec, K: int) -> tuple[int, ...]:
    """p / pi as a flat element modulo pi^K (exact up to that precision)."""
    e, f, p = spec.e, spec.f, spec.p
    ring = _ring(spec, K + e)
    w_unit = [c // p for c in spec.eis[0]] + [0] * (f * (e - 1))
    w_inv = ring.inv(ring.reduce(w_unit))
    # pi^(e-1) - sum_{i>=1} r_i pi^(i-1)
    poly = [0] * (e * f)
    poly[(e - 1) * f] += 1
    for i in range(1, e):
        for r in range(f):
            poly[(i - 1) * f + r] -= spec.eis[i][r]
    val = ring.mul(w_inv, ring.reduce(poly))
    return _ring(spec, K).reduce(val)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiadicInteger:
    """An element of o_F known modulo pi^prec."""

    spec: LocalFieldSpec
    coeffs: tuple[int, ...]
    prec: int

    def _other(self, other) -> "PiadicInteger":
        if isinstance(other, int):
            return self.spec.from_int(other, self.prec)
        if isinstance(other, PiadicInteger):
            if other.spec != self.spec:
                raise SpecMismatch("operands live in different local fields")
            return other
        return NotImplemented

    def _binop(self, other, op):
        other = self._other(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        ring = _ring(self.spec, prec)
        return PiadicInteger(self.spec, getattr(ring, op)(ring.reduce(self.coeffs), ring.reduce(other.coeffs)), prec)

    def __add__(self, other):
        return self._binop(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, "sub")

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binop(other, "mul")

    __rmul__ = __mul__

    def __neg__(self):
        ring = _ring(self.spec, self.prec)
        return PiadicInteger(self.spec, ring.neg(self.coeffs), self.prec)

    def __pow__(self, n: int) -> "PiadicInteger":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.spec.one(self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "PiadicInteger":
        if self.prec < 1:
            raise PrecisionExhausted("cannot invert an element with no known digits")
        ring = _ring(self.spec, self.prec)
        return PiadicInteger(self.spec, ring.inv(self.coeffs), self.prec)

    def divide_by_pi_exact(self) -> "PiadicInteger":
        if self.prec < 1:
            raise PrecisionExhausted("no digits left to divide by pi")
        ring = _ring(self.spec, self.prec)
        if not ring.is_zero_mod_pi(self.coeffs):
            raise NotDivisible(f"{self!r} is not divisible by pi")
        out = ring.div_pi(self.coeffs)
        return PiadicInteger(self.spec, _ring(self.spec, self.prec - 1).reduce(out), self.prec - 1)

    def residue(self) -> FFElem:
        if self.prec < 1:
            raise PrecisionExhausted("residue needs prec >= 1")
        F = self.spec.residue_field
        return FFElem(F, tuple(c % self.spec.p for c in self.coeffs[: self.spec.f]))

    def is_unit(self) -> bool:
        return self.prec >= 1 and not self.residue().is_zero()

    def valuation(self) -> int:
        """pi-adic valuation, capped at prec."""
        e, f, p = self.spec.e, self.spec.f, self.spec.p
        best = self.prec
        for i in range(e):
            block = self.coeffs[i * f : (i + 1) * f]
            if any(block):
                v = min(_vp(c, p) for c in block if c)
                best = min(best, e * v + i)
        return best

    def with_prec(self, prec: int) -> "PiadicInteger":
        """Truncate to a lower precision (never raises claimed precision)."""
        prec = min(prec, self.prec)
        return PiadicInteger(self.spec, _ring(self.spec, prec).reduce(self.coeffs), prec)

    def equals(self, other: "PiadicInteger") -> bool:
        """Equality modulo the common precision."""
        other = self._other(other)
        k = min(self.prec, other.prec)
        ring = _ring(self.spec, k)
        return ring.reduce(self.coeffs) == ring.reduce(other.coeffs)

    def digits(self) -> list[FFElem]:
        """pi-adic digits with representatives that are lifts with coefficients in [0, p)."""
        out = []
        x = self
        for _ in range(self.prec):
            d = x.residue()
            out.append(d)
            x = (x - self.spec.lift(d, x.prec)).divide_by_pi_exact()
        return out

    def to_json(self) -> dict:
        f = self.spec.f
        return {
            "coeffs": [list(self.coeffs[i * f : (i + 1) * f]) for i in range(self.spec.e)],
            "prec": self.prec,
        }

    @classmethod
    def from_json(cls, spec: LocalFieldSpec, data: dict) -> "PiadicInteger":
        return spec.element(data["coeffs"], int(data["prec"]))

    def __repr__(self) -> str:
        if self.spec.e == 1 and self.spec.f == 1:
            return f"{self.coeffs[0]} + O({self.spec.p}^{self.prec})"
        return f"PiadicInteger({list(self.coeffs)}, prec={self.prec})"


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v
