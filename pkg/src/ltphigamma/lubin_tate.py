"""Lubin-Tate endomorphisms [a](t) and their reductions modulo pi.

[a](t) = sum c_m t^m is the unique series with c_1 = a commuting with the
Frobenius series phi.  Comparing coefficients of t^m in phi([a]) = [a](phi)
gives

    (pi - pi^m) c_m = sum_{j<m} c_j [t^m] phi^j - sum_{k>=2} phi_k [t^m] [a]^k

and both sums only involve c_j with j < m.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import NotAUnit, NotDivisible, PrecisionExhausted, SpecMismatch
from .padic import LocalFieldSpec, PiadicInteger, _ring
from .series import TSeries

MAX_RETRIES = 3
SLACK = 8


@dataclass(frozen=True)
class FrobeniusSeries:
    """phi(t) = sum_k terms[k] t^k with phi = pi t mod deg 2 and phi = t^q mod pi.

    ``terms`` maps degrees to flat coefficient tuples.  ``prec`` is None when
    the coefficients are exact integers (the default pi t + t^q), otherwise the
    pi-adic precision to which they are known.
    """

    spec: LocalFieldSpec
    terms: tuple[tuple[int, tuple[int, ...]], ...]
    prec: int | None = None

    @classmethod
    def default(cls, spec: LocalFieldSpec) -> "FrobeniusSeries":
        one = (1,) + (0,) * (spec.e * spec.f - 1)
        return cls(spec, ((1, _exact_pi(spec)), (spec.q, one)))

    @classmethod
    def from_coefficients(cls, spec: LocalFieldSpec, coeffs: Sequence[PiadicInteger]) -> "FrobeniusSeries":
        """User-supplied phi from its coefficient list (index = degree)."""
        coeffs = list(coeffs)
        for c in coeffs:
            if c.spec != spec:
                raise SpecMismatch("coefficient from another local field")
        prec = min(c.prec for c in coeffs)
        terms = tuple((k, c.coeffs) for k, c in enumerate(coeffs) if any(c.with_prec(prec).coeffs))
        phi = cls(spec, terms, prec)
        phi.validate()
        return phi

    def coefficient(self, k: int, K: int) -> PiadicInteger:
        if self.prec is not None:
            K = min(K, self.prec)
        for deg, c in self.terms:
            if deg == k:
                return PiadicInteger(self.spec, _ring(self.spec, K).reduce(c), K)
        return self.spec.zero(K)

    @property
    def degree(self) -> int:
        return max(k for k, _ in self.terms)

    def validate(self):
        spec = self.spec
        K = 2 if self.prec is None else min(self.prec, spec.e + 1)
        if K < 1:
            raise PrecisionExhausted("Frobenius series coefficients carry no information")
        if not self.coefficient(0, K).equals(spec.zero(K)):
            raise ValueError("Frobenius series must have zero constant term")
        if not self.coefficient(1, K).equals(spec.pi(K)):
            raise ValueError("linear coefficient of the Frobenius series must be pi")
        for k in range(self.degree + 1):
            r = self.coefficient(k, K).residue()
            want = 1 if k == spec.q else 0
            if r != spec.residue_field(want):
                raise ValueError(f"Frobenius series is not t^q modulo pi (degree {k})")


def _exact_pi(spec: LocalFieldSpec) -> tuple[int, ...]:
    if spec.e == 1:
        return spec.eis[0]
    flat = [0] * (spec.e * spec.f)
    flat[spec.f] = 1
    return tuple(flat)


def working_precision(q: int, N: int) -> int:
    """K = ceil(log_q N) + slack."""
    k = 0
    while q**k < N:
        k += 1
    return k + SLACK


# ---------------------------------------------------------------------------

_lock = threading.Lock()
_power_tables: dict = {}
_lt_cache: dict = {}
_gamma_cache: dict = {}


def _phi_power_table(phi: FrobeniusSeries, N: int, K: int) -> list[dict[int, tuple]]:
    """table[j][m] = [t^m] phi^j modulo pi^K for j < N, m < N (sparse)."""
    key = (phi, N, K)
    with _lock:
        if key in _power_tables:
            return _power_tables[key]
    ring = _ring(phi.spec, K)
    phi_terms = [(k, ring.reduce(c)) for k, c in phi.terms if k < N]
    phi_terms = [(k, c) for k, c in phi_terms if any(c)]
    table: list[dict[int, tuple]] = [{0: ring.one()}]
    for j in range(1, N):
        prev = table[-1]
        cur: dict[int, tuple] = {}
        for m0, a in prev.items():
            for k, c in phi_terms:
                m = m0 + k
                if m >= N:
                    continue
                prod = ring.mul(a, c)
                cur[m] = ring.add(cur[m], prod) if m in cur else prod
        table.append({m: v for m, v in cur.items() if any(v)})
    with _lock:
        _power_tables[key] = table
    return table


def _addition_chain(targets: Sequence[int]) -> list[tuple[int, int, int]]:
    """Steps (c, a, b) with c = a + b building every target from 1."""
    have = {1}
    steps = []
    for k in sorted(targets):
        if k in have:
            continue
        # binary method: k = 2^i1 + 2^i2 + ...
        pw = 1
        while 2 * pw <= k:
            if 2 * pw not in have:
                steps.append((2 * pw, pw, pw))
                have.add(2 * pw)
            pw *= 2
        acc = pw
        rest = k - pw
        bit = pw // 2
        while rest:
            if rest >= bit:
                if acc + bit not in have:
                    steps.append((acc + bit, acc, bit))
                    have.add(acc + bit)
                acc += bit
                rest -= bit
            bit //= 2
    return steps


def _as_element(a, spec: LocalFieldSpec, K: int) -> tuple[tuple[int, ...], int]:
    """Flat coefficients of a modulo pi^K and the precision actually known."""
    if isinstance(a, int):
        return _ring(spec, K).reduce(spec.from_int(a, K).coeffs), K
    if isinstance(a, PiadicInteger):
        if a.spec != spec:
            raise SpecMismatch("element from another local field")
        k = min(K, a.prec)
        return _ring(spec, k).reduce(a.coeffs), k
    raise TypeError(f"cannot interpret {a!r} as an element of o_F")


def _recursion(a, phi: FrobeniusSeries, N: int, K: int) -> list[PiadicInteger]:
    spec = phi.spec
    q = spec.q
    if phi.prec is not None:
        K = min(K, phi.prec)
    ring = _ring(spec, K)
    c1, K1 = _as_element(a, spec, K)
    c1 = ring.reduce(c1)
    table = _phi_power_table(phi, N, K)
    phi_hi = {k: ring.reduce(c) for k, c in phi.terms if k >= 2 and k < N}
    phi_hi = {k: c for k, c in phi_hi.items() if any(c)}
    chain = _addition_chain(list(phi_hi))
    pi = ring.reduce(_exact_pi(spec))
    zero = ring.reduce([0] * (spec.e * spec.f))

    c = [zero, c1]
    err = [K, K1]  # c_m is correct modulo pi^err[m]
    run_min = K1
    # powers[k][m] = [t^m] [a]^k, filled as c_m become known
    powers: dict[int, list] = {1: c}
    for s, _, _ in chain:
        powers[s] = [zero, zero]
    pi_pow = pi  # pi^(m-1)
    for m in range(2, N):
        for s, x, y in chain:
            A, B = powers[x], powers[y]
            acc = zero
            for i in range(x, m - y + 1):
                ai = A[i]
                if any(ai):
                    bj = B[m - i]
                    if any(bj):
                        acc = ring.add(acc, ring.mul(ai, bj))
            powers[s].append(acc)
        rhs = zero
        for j in range(1, m):
            pj = table[j].get(m)
            if pj is not None and any(c[j]):
                rhs = ring.add(rhs, ring.mul(c[j], pj))
        for k, ck in phi_hi.items():
            if k <= m:
                rhs = ring.sub(rhs, ring.mul(ck, powers[k][m]))
        if not ring.is_zero_mod_pi(rhs):
            raise NotDivisible(f"recursion not divisible by pi at degree {m}")
        num = ring.div_pi(rhs)
        unit = ring.sub(ring.one(), pi_pow)
        cm = ring.mul(num, ring.inv(unit))
        pi_pow = ring.mul(pi_pow, pi)
        e = min(K, run_min + 1)
        if m % q == 0:
            e = min(e, err[m // q])
        e -= 1
        if e < 1:
            raise PrecisionExhausted(f"coefficient of t^{m} has no known digits at K={K}")
        c.append(cm)
        err.append(e)
        run_min = min(run_min, e)
        powers[1] = c
    while len(c) < N:
        c.append(zero)
        err.append(K)
    return [PiadicInteger(spec, _ring(spec, err[m]).reduce(c[m]), err[m]) for m in range(N)]


def lt_multiplication(a, phi: FrobeniusSeries | None = None, N: int = 32, spec: LocalFieldSpec | None = None) -> list[PiadicInteger]:
    """Coefficients c_0, ..., c_{N-1} of [a](t).

    ``a`` is a PiadicInteger or an int (treated as exact).  The working
    precision starts at ceil(log_q N) + 8 and is doubled on exhaustion, at most
    three times.
    """
    if phi is None:
        spec = spec or getattr(a, "spec", None)
        if spec is None:
            raise ValueError("a LocalFieldSpec is needed when a is an int")
        phi = FrobeniusSeries.default(spec)
    spec = phi.spec
    key = (phi, _cache_key(a), N)
    with _lock:
        if key in _lt_cache:
            return _lt_cache[key]
    K = working_precision(spec.q, N)
    for attempt in range(MAX_RETRIES + 1):
        try:
            result = _recursion(a, phi, N, K)
            break
        except (PrecisionExhausted, NotDivisible) as exc:
            if attempt == MAX_RETRIES:
                raise PrecisionExhausted(f"[a](t) to t^{N} failed after {MAX_RETRIES} retries: {exc}") from exc
            K *= 2
    with _lock:
        _lt_cache[key] = result
    return result


def _cache_key(a):
    if isinstance(a, PiadicInteger):
        return (a.coeffs, a.prec)
    return a


def reduce_mod_pi(coeffs: Sequence[PiadicInteger], N: int | None = None) -> TSeries:
    """Reduction of sum c_m t^m modulo pi, known modulo t^N."""
    coeffs = list(coeffs)
    if not coeffs:
        raise ValueError("empty coefficient list")
    N = len(coeffs) if N is None else min(N, len(coeffs))
    spec = coeffs[0].spec
    F = spec.residue_field
    vals = []
    for m in range(N):
        if coeffs[m].prec < 1:
            raise PrecisionExhausted(f"coefficient {m} has no known digits")
        vals.append(coeffs[m].residue())
    return TSeries.from_list(F, vals, N)


def _unit(u, spec: LocalFieldSpec | None):
    if isinstance(u, int):
        if spec is None:
            raise ValueError("a LocalFieldSpec is needed when u is an int")
        if u % spec.p == 0:
            raise NotAUnit(f"{u} is not a unit")
        return u, spec
    if not u.is_unit():
        raise NotAUnit(f"{u!r} is not a unit")
    return u, u.spec


def gamma_series(u, phi: FrobeniusSeries | None = None, N: int = 32, spec: LocalFieldSpec | None = None) -> TSeries:
    """[u](t) modulo pi, known modulo t^N."""
    u, spec = _unit(u, phi.spec if phi is not None else spec)
    phi = phi or FrobeniusSeries.default(spec)
    key = (phi, _cache_key(u), N)
    with _lock:
        if key in _gamma_cache:
            return _gamma_cache[key]
    g = reduce_mod_pi(lt_multiplication(u, phi, N), N)
    with _lock:
        _gamma_cache[key] = g
    return g


def residue_of(u, spec: LocalFieldSpec):
    if isinstance(u, int):
        return spec.residue_field(u % spec.p)
    return u.residue()


def fbar(u, phi: FrobeniusSeries | None = None, N: int = 32, spec: LocalFieldSpec | None = None) -> TSeries:
    """The 1-unit  u-bar * t / [u](t)  modulo pi, known modulo t^N."""
    u, spec = _unit(u, phi.spec if phi is not None else spec)
    g = gamma_series(u, phi, N + 1, spec)
    ubar = residue_of(u, spec)
    unit_part = TSeries(g.field, 0, g.coeffs, g.prec - g.val)
    return unit_part.invert_unit() * ubar


def compose_reduced(u, v, phi: FrobeniusSeries | None = None, N: int = 32, spec: LocalFieldSpec | None = None) -> TSeries:
    """([u] o [v])(t) modulo pi, via composition of the reductions."""
    return gamma_series(u, phi, N, spec).compose(gamma_series(v, phi, N, spec))


def clear_caches():
    with _lock:
        _power_tables.clear()
        _lt_cache.clear()
        _gamma_cache.clear()
