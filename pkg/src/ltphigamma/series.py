"""Truncated Laurent series over a finite field.

A ``TSeries`` is ``t^val * (c_0 + c_1 t + ...)`` known modulo ``t^prec``.  The
coefficient block is an integer array of shape ``(prec - val, m)`` holding
coefficient vectors over F_p.  The leading row is nonzero unless the block is
empty, in which case the series is the zero marker ``O(t^prec)``.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import CompositionDiverges, FieldMismatch, NotAUnit, PrecisionExhausted
from .ffield import FFElem, FiniteField, GF, _log_p, embed


def _mul_arrays(field: FiniteField, a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """Product of two power-series blocks truncated to ``length`` rows."""
    m, p = field.m, field.p
    out = np.zeros((max(length, 0), m), dtype=np.int64)
    if length <= 0 or len(a) == 0 or len(b) == 0:
        return out
    a = a[:length]
    b = b[:length]
    if m == 1:
        c = np.convolve(a[:, 0], b[:, 0])[:length]
        out[: len(c), 0] = c % p
        return out
    acc = np.zeros((length, 2 * m - 1), dtype=np.int64)
    for i in range(m):
        ai = a[:, i]
        if not ai.any():
            continue
        for j in range(m):
            bj = b[:, j]
            if not bj.any():
                continue
            c = np.convolve(ai, bj)[:length]
            acc[: len(c), i + j] += c
    acc %= p
    out[:] = (acc[:, :m] + acc[:, m:] @ field.reduction) % p
    return out


def _inv_array(field: FiniteField, a: np.ndarray, length: int) -> np.ndarray:
    """Inverse of a power-series block with nonzero constant term."""
    p = field.p
    c0 = field.from_array(a[0])
    if c0.is_zero():
        raise NotAUnit("constant term vanishes")
    b = np.zeros((1, field.m), dtype=np.int64)
    b[0] = c0.inverse().c
    n = 1
    while n < length:
        n = min(2 * n, length)
        ab = _mul_arrays(field, a, b, n)
        two_minus = (-ab) % p
        two_minus[0] = (two_minus[0] + np.asarray(field(2).c)) % p
        b = _mul_arrays(field, b, two_minus, n)
    return b[:length]


def _pow_array(field: FiniteField, a: np.ndarray, k: int, length: int) -> np.ndarray:
    result = np.zeros((length, field.m), dtype=np.int64)
    if length <= 0:
        return result
    result[0, 0] = 1
    base = a[:length]
    while k:
        if k & 1:
            result = _mul_arrays(field, result, base, length)
        k >>= 1
        if k:
            base = _mul_arrays(field, base, base, length)
    return result


class TSeries:
    """Truncated Laurent series ``sum c_i t^i + O(t^prec)`` over a finite field."""

    __slots__ = ("field", "val", "coeffs", "prec")

    def __init__(self, field: FiniteField, val: int, coeffs: np.ndarray, prec: int):
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, field.m) % field.p
        if len(coeffs) != prec - val:
            if val >= prec:
                coeffs = coeffs[:0]
                val = prec
            else:
                raise ValueError(f"block has {len(coeffs)} rows, expected {prec - val}")
        nz = np.nonzero(coeffs.any(axis=1))[0]
        if nz.size == 0:
            val, coeffs = prec, coeffs[:0]
        elif nz[0] > 0:
            val += int(nz[0])
            coeffs = coeffs[int(nz[0]) :]
        self.field = field
        self.val = int(val)
        self.coeffs = coeffs
        self.prec = int(prec)

    # constructors -----------------------------------------------------

    @classmethod
    def from_list(cls, field: FiniteField, coeffs: Iterable, prec: int, val: int = 0) -> "TSeries":
        """Series with the given coefficients starting at t^val; missing terms are 0."""
        rows = [field(c).c for c in coeffs]
        rows = rows[: max(prec - val, 0)]
        block = np.zeros((max(prec - val, 0), field.m), dtype=np.int64)
        if rows:
            block[: len(rows)] = np.asarray(rows, dtype=np.int64)
        return cls(field, val, block, prec)

    @classmethod
    def zero(cls, field: FiniteField, prec: int) -> "TSeries":
        return cls(field, prec, np.zeros((0, field.m), dtype=np.int64), prec)

    @classmethod
    def monomial(cls, field: FiniteField, c, k: int, prec: int) -> "TSeries":
        c = field(c)
        if k >= prec or c.is_zero():
            return cls.zero(field, prec)
        return cls.from_list(field, [c], prec, val=k)

    @classmethod
    def one(cls, field: FiniteField, prec: int) -> "TSeries":
        return cls.monomial(field, 1, 0, prec)

    @classmethod
    def t(cls, field: FiniteField, prec: int) -> "TSeries":
        return cls.monomial(field, 1, 1, prec)

    # inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no nonzero coefficient is known (zero modulo t^prec)."""
        return len(self.coeffs) == 0

    def coefficient(self, i: int) -> FFElem:
        if i >= self.prec:
            raise PrecisionExhausted(f"coefficient of t^{i} unknown (prec {self.prec})")
        if i < self.val:
            return self.field.zero
        return self.field.from_array(self.coeffs[i - self.val])

    def leading(self) -> FFElem:
        if self.is_zero():
            raise NotAUnit("zero series has no leading coefficient")
        return self.field.from_array(self.coeffs[0])

    def coefficients(self, start: int | None = None, stop: int | None = None) -> list[FFElem]:
        start = self.val if start is None else start
        stop = self.prec if stop is None else stop
        return [self.coefficient(i) for i in range(start, stop)]

    def is_one_unit(self) -> bool:
        return self.val == 0 and self.leading() == self.field.one

    def truncate(self, prec: int) -> "TSeries":
        """Forget everything from t^prec on (never raises the claimed precision)."""
        prec = min(prec, self.prec)
        if prec <= self.val:
            return TSeries.zero(self.field, prec)
        return TSeries(self.field, self.val, self.coeffs[: prec - self.val], prec)

    def agrees(self, other: "TSeries", prec: int | None = None) -> bool:
        """Equality modulo t^min(prec_self, prec_other[, prec])."""
        self._check(other)
        k = min(self.prec, other.prec)
        if prec is not None:
            k = min(k, prec)
        a, b = self.truncate(k), other.truncate(k)
        return a.val == b.val and np.array_equal(a.coeffs, b.coeffs)

    def first_difference(self, other: "TSeries", prec: int | None = None) -> int | None:
        """Least exponent where the two series differ below the common precision."""
        self._check(other)
        k = min(self.prec, other.prec)
        if prec is not None:
            k = min(k, prec)
        lo = min(self.val, other.val)
        for i in range(lo, k):
            if self.coefficient(i) != other.coefficient(i):
                return i
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return (
            self.field is other.field
            and self.val == other.val
            and self.prec == other.prec
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.val, self.prec, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        terms = []
        for i in range(self.val, min(self.prec, self.val + 8)):
            c = self.coefficient(i)
            if c:
                terms.append(f"{c!r}*t^{i}")
        more = " + ..." if self.prec - self.val > 8 else ""
        return " + ".join(terms or ["0"]) + more + f" + O(t^{self.prec})"

    # arithmetic -------------------------------------------------------

    def _check(self, other: "TSeries"):
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def _coerce(self, other) -> "TSeries":
        if isinstance(other, TSeries):
            self._check(other)
            return other
        if isinstance(other, (int, FFElem)):
            return TSeries.monomial(self.field, self.field(other), 0, max(self.prec, 1))
        return NotImplemented

    def __add__(self, other) -> "TSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        val = min(self.val, other.val, prec)
        block = np.zeros((prec - val, self.field.m), dtype=np.int64)
        for s in (self, other):
            n = max(0, min(len(s.coeffs), prec - s.val))
            if n:
                block[s.val - val : s.val - val + n] += s.coeffs[:n]
        return TSeries(self.field, val, block, prec)

    __radd__ = __add__

    def __neg__(self) -> "TSeries":
        return TSeries(self.field, self.val, (-self.coeffs) % self.field.p, self.prec)

    def __sub__(self, other) -> "TSeries":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "TSeries":
        return (-self) + other

    def __mul__(self, other) -> "TSeries":
        if isinstance(other, (int, FFElem)):
            c = self.field(other)
            if c.is_zero():
                return TSeries.zero(self.field, self.prec)
            block = _mul_arrays_scalar(self.field, self.coeffs, c)
            return TSeries(self.field, self.val, block, self.prec)
        if not isinstance(other, TSeries):
            return NotImplemented
        self._check(other)
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        block = _mul_arrays(self.field, self.coeffs, other.coeffs, prec - val)
        return TSeries(self.field, val, block, prec)

    __rmul__ = __mul__

    def invert_unit(self) -> "TSeries":
        """Inverse of t^v * (unit); relative precision is preserved."""
        if self.is_zero():
            raise NotAUnit("leading coefficient is zero or unknown")
        length = self.prec - self.val
        block = _inv_array(self.field, self.coeffs, length)
        return TSeries(self.field, -self.val, block, -self.val + length)

    def __truediv__(self, other) -> "TSeries":
        if isinstance(other, (int, FFElem)):
            return self * self.field(other).inverse()
        return self * other.invert_unit()

    def __pow__(self, k: int) -> "TSeries":
        if k < 0:
            return self.invert_unit() ** (-k)
        if k == 0:
            return TSeries.one(self.field, self.prec - self.val)
        if self.is_zero():
            return TSeries.zero(self.field, min(self.prec + (k - 1) * self.val, k * self.prec))
        length = self.prec - self.val
        block = _pow_array(self.field, self.coeffs, k, length)
        return TSeries(self.field, k * self.val, block, k * self.val + length)

    # substitutions ----------------------------------------------------

    def frobenius_subst(self, q: int, coeff_twist: int = 1) -> "TSeries":
        """t -> t^q with coefficients raised to q^coeff_twist.

        coeff_twist = 0 is pure substitution (the Frobenius of k((t)) with k
        acting trivially); coeff_twist = 1 gives f^q.
        """
        field = self.field
        k = _log_p(q, field.p)
        block = self.coeffs
        e = (k * coeff_twist) % field.m
        if e:
            block = block @ field.frobenius_matrix(e).T % field.p
        length = q * (self.prec - self.val)
        out = np.zeros((length, field.m), dtype=np.int64)
        out[::q][: len(block)] = block
        return TSeries(field, q * self.val, out, q * self.prec)

    def compose(self, g: "TSeries") -> "TSeries":
        """self(g) for g of positive valuation.

        Precision: the truncation of self contributes O(g^prec); the
        truncation of g contributes O(t^(prec_g + e*val_g)) with e = val - 1 for
        negative val and e = 0 otherwise.
        """
        self._check(g)
        if g.val < 1:
            raise CompositionDiverges("substituted series must have positive valuation")
        vg = g.val
        vf = self.val
        e_min = vf - 1 if vf < 0 else 0
        prec = min(self.prec * vg, g.prec + e_min * vg)
        if self.is_zero() or prec <= vf * vg:
            return TSeries.zero(self.field, prec)
        length = prec - vf * vg
        field = self.field
        # g = t^vg * U; work with power-series blocks of the given length
        G = np.zeros((length, field.m), dtype=np.int64)
        n = min(len(g.coeffs), max(length - vg, 0))
        G[vg : vg + n] = g.coeffs[:n]
        support = [k for k in range(len(self.coeffs)) if self.coeffs[k].any()]
        powers: dict[int, np.ndarray] = {}

        def gpow(k: int) -> np.ndarray:
            if k not in powers:
                powers[k] = _pow_array(field, G, k, length)
            return powers[k]

        acc = np.zeros((length, field.m), dtype=np.int64)
        acc[0] = self.coeffs[support[-1]]
        for hi, lo in zip(reversed(support), reversed(support[:-1])):
            acc = _mul_arrays(field, acc, gpow(hi - lo), length)
            acc[0] = (acc[0] + self.coeffs[lo]) % field.p
        if support[0] > 0:
            acc = _mul_arrays(field, acc, gpow(support[0]), length)
        # multiply by g^vf = t^(vf*vg) * U^vf
        if vf != 0:
            U = np.zeros((length, field.m), dtype=np.int64)
            n = min(len(g.coeffs), length)
            U[:n] = g.coeffs[:n]
            Upow = _pow_array(field, U, abs(vf), length)
            if vf < 0:
                Upow = _inv_array(field, Upow, length)
            acc = _mul_arrays(field, acc, Upow, length)
        return TSeries(field, vf * vg, acc, prec)

    def map_field(self, *fields: FiniteField) -> "TSeries":
        """Coefficientwise embedding along an explicit chain of fields."""
        series = self
        for target in fields:
            series = series._embed(target)
        return series

    def _embed(self, target: FiniteField) -> "TSeries":
        src = self.field
        if src is target:
            return self
        basis = [FFElem(src, tuple(1 if k == i else 0 for k in range(src.m))) for i in range(src.m)]
        E = np.stack([np.asarray(embed(b, target).c, dtype=np.int64) for b in basis], axis=1)
        block = self.coeffs @ E.T % target.p
        return TSeries(target, self.val, block, self.prec)

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"val": self.val, "prec": self.prec, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, field: FiniteField, data: dict) -> "TSeries":
        block = np.asarray(data["coeffs"], dtype=np.int64).reshape(-1, field.m)
        return cls(field, int(data["val"]), block, int(data["prec"]))


def _mul_arrays_scalar(field: FiniteField, block: np.ndarray, c: FFElem) -> np.ndarray:
    if field.m == 1:
        return block * c.c[0] % field.p
    # multiplication by c is F_p-linear: column i is c * x^i
    cols = [np.asarray((c * FFElem(field, tuple(1 if k == i else 0 for k in range(field.m)))).c) for i in range(field.m)]
    mat = np.stack(cols, axis=1)
    return block @ mat.T % field.p


def series_from_ints(p: int, coeffs: Sequence[int], prec: int, val: int = 0) -> TSeries:
    """Convenience constructor over the prime field."""
    return TSeries.from_list(GF(p), coeffs, prec, val)
