"""Minimal multivariate polynomials over Q / Q(i) plus exact root finding.

Only what the graded-map solver needs: a handful of variables (the entries
of a 2x2 matrix), ring arithmetic, per-variable coefficient extraction,
scalar substitution, and complete rational / Gaussian-rational root
enumeration for univariate polynomials (rational root theorem; over Q(i)
via Gaussian-integer divisor enumeration).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

from .scalars import FIELD_Q, FIELD_QI, GaussianRational, as_scalar, is_zero


class Poly:
    """Sparse polynomial: monomial exponent tuple -> scalar coefficient."""

    __slots__ = ("nvars", "field", "terms")

    def __init__(self, nvars: int, field: str, terms: dict):
        clean = {}
        for mono, c in terms.items():
            c = as_scalar(c, field)
            if not is_zero(c):
                clean[tuple(mono)] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Poly is immutable")

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, nvars, field, value):
        return cls(nvars, field, {(0,) * nvars: value})

    @classmethod
    def var(cls, nvars, field, idx):
        mono = [0] * nvars
        mono[idx] = 1
        return cls(nvars, field, {tuple(mono): 1})

    # predicates ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in m) for m in self.terms)

    def const_value(self):
        return self.terms.get((0,) * self.nvars, as_scalar(0, self.field))

    def vars_present(self):
        out = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    out.add(i)
        return out

    def degree_in(self, idx):
        return max((m[idx] for m in self.terms), default=0)

    def total_degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly.const(self.nvars, self.field, other)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, as_scalar(0, self.field)) + c
        return Poly(self.nvars, self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, self.field, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                prod = c1 * c2
                if m in out:
                    out[m] = out[m] + prod
                else:
                    out[m] = prod
        return Poly(self.nvars, self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        acc = Poly.const(self.nvars, self.field, 1)
        for _ in range(n):
            acc = acc * self
        return acc

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self.is_constant() and self.const_value() == other

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items(), key=lambda t: t[0]))))

    # structure ----------------------------------------------------------
    def coeffs_in(self, idx):
        """Coefficients of powers of variable idx, as polynomials."""
        deg = self.degree_in(idx)
        buckets = [dict() for _ in range(deg + 1)]
        for m, c in self.terms.items():
            rest = list(m)
            e = rest[idx]
            rest[idx] = 0
            buckets[e][tuple(rest)] = buckets[e].get(tuple(rest), as_scalar(0, self.field)) + c
        return [Poly(self.nvars, self.field, b) for b in buckets]

    def substitute_scalar(self, idx, value):
        value = as_scalar(value, self.field)
        out = {}
        for m, c in self.terms.items():
            e = m[idx]
            coeff = c
            for _ in range(e):
                coeff = coeff * value
            rest = list(m)
            rest[idx] = 0
            key = tuple(rest)
            out[key] = out.get(key, as_scalar(0, self.field)) + coeff
        return Poly(self.nvars, self.field, out)

    def evaluate(self, point):
        acc = as_scalar(0, self.field)
        for m, c in self.terms.items():
            val = c
            for i, e in enumerate(m):
                for _ in range(e):
                    val = val * point[i]
            acc = acc + val
        return acc

    def normalized(self):
        """Divide by the leading coefficient (deterministic monomial order);
        used to dedupe scalar multiples of the same equation."""
        if not self.terms:
            return self
        lead = max(self.terms)
        lc = self.terms[lead]
        return Poly(self.nvars, self.field, {m: c / lc for m, c in self.terms.items()})

    def univariate_coeffs(self, idx):
        """Scalar coefficient list in variable idx, or None if other
        variables occur."""
        if self.vars_present() - {idx}:
            return None
        out = [as_scalar(0, self.field)] * (self.degree_in(idx) + 1)
        for m, c in self.terms.items():
            out[m[idx]] = c
        return out

    def __repr__(self):
        names = "abcdefgh"
        parts = []
        for m, c in sorted(self.terms.items(), reverse=True):
            mono = "".join(
                f"{names[i]}^{e}" if e > 1 else (names[i] if e == 1 else "")
                for i, e in enumerate(m)
            )
            parts.append(f"{c}{('*' + mono) if mono else ''}")
        return " + ".join(parts) if parts else "0"


# --- integer and Gaussian-integer divisors --------------------------------

def _int_divisors(n: int):
    n = abs(n)
    if n == 0:
        return []
    divs = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            divs.append(d)
            if d != n // d:
                divs.append(n // d)
        d += 1
    return sorted(divs)


def q_roots(coeffs):
    """All rational roots of a univariate polynomial with Fraction
    coefficients (constant term first)."""
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial has all roots")
    roots = set()
    while len(coeffs) > 1 and coeffs[0] == 0:
        roots.add(Fraction(0))
        coeffs.pop(0)
    if len(coeffs) == 1:
        return sorted(roots)
    den = 1
    for c in coeffs:
        den = den * c.denominator // int_gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    a0, an = ints[0], ints[-1]
    for p in _int_divisors(a0):
        for q in _int_divisors(an):
            for sgn in (1, -1):
                cand = Fraction(sgn * p, q)
                if _eval_univ(coeffs, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def _eval_univ(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


# Gaussian integers as (a, b) int pairs -------------------------------------

def _gmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gnorm(x):
    return x[0] * x[0] + x[1] * x[1]


def _gdivmod(x, y):
    n = _gnorm(y)
    num = _gmul(x, (y[0], -y[1]))
    q = (_round_div(num[0], n), _round_div(num[1], n))
    r = (x[0] - _gmul(q, y)[0], x[1] - _gmul(q, y)[1])
    return q, r


def _round_div(a, b):
    # nearest integer to a/b, exact arithmetic
    q, r = divmod(a, b)
    if 2 * r >= b:
        q += 1
    return q


def _ggcd(x, y):
    while y != (0, 0):
        _, r = _gdivmod(x, y)
        x, y = y, r
    return x


def _gaussian_prime_above(p):
    """A Gaussian prime dividing the rational prime p (p = 2 or 1 mod 4)."""
    if p == 2:
        return (1, 1)
    # find x with x^2 = -1 mod p, then gcd(p, x + i)
    for n in range(2, p):
        x = pow(n, (p - 1) // 4, p)
        if (x * x + 1) % p == 0:
            return _ggcd((p, 0), (x, 1))
    raise ArithmeticError(f"no sqrt(-1) mod {p}")  # pragma: no cover


def _factor_int(n):
    n = abs(n)
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def gaussian_divisors(z):
    """All Gaussian-integer divisors of z up to units (z != 0)."""
    assert z != (0, 0)
    primes = []
    for p, e in _factor_int(_gnorm(z)).items():
        if p == 2:
            primes.append(((1, 1), e))
        elif p % 4 == 3:
            primes.append(((p, 0), e // 2))
        else:
            pi = _gaussian_prime_above(p)
            # multiplicities of pi and its conjugate in z
            for cand in (pi, (pi[0], -pi[1])):
                m = 0
                w = z
                while True:
                    q, r = _gdivmod(w, cand)
                    if r != (0, 0):
                        break
                    w = q
                    m += 1
                if m:
                    primes.append((cand, m))
    divs = [(1, 0)]
    for pi, e in primes:
        new = []
        for d in divs:
            cur = d
            for _ in range(e + 1):
                new.append(cur)
                cur = _gmul(cur, pi)
        divs = new
    # dedupe up to units
    seen = set()
    out = []
    for d in divs:
        canon = max(
            (d, _gmul(d, (0, 1)), _gmul(d, (-1, 0)), _gmul(d, (0, -1)))
        )
        if canon not in seen:
            seen.add(canon)
            out.append(canon)
    return out


_GAUSS_DIVISOR_NORM_LIMIT = 10**10


def qi_roots(coeffs):
    """All Gaussian-rational roots, or None when coefficients are too large
    for divisor enumeration (caller treats None as undecided)."""
    coeffs = [as_scalar(c, FIELD_QI) for c in coeffs]
    while coeffs and is_zero(coeffs[-1]):
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial has all roots")
    roots = set()
    while len(coeffs) > 1 and is_zero(coeffs[0]):
        roots.add(GaussianRational(0, 0))
        coeffs.pop(0)
    if len(coeffs) == 1:
        return sorted(roots, key=lambda g: (g.re, g.im))
    den = 1
    for c in coeffs:
        for f in (c.re, c.im):
            den = den * f.denominator // int_gcd(den, f.denominator)
    ints = [(int(c.re * den), int(c.im * den)) for c in coeffs]
    a0, an = ints[0], ints[-1]
    if _gnorm(a0) > _GAUSS_DIVISOR_NORM_LIMIT or _gnorm(an) > _GAUSS_DIVISOR_NORM_LIMIT:
        return None
    units = ((1, 0), (0, 1), (-1, 0), (0, -1))
    qi_coeffs = [GaussianRational(Fraction(x), Fraction(y)) for (x, y) in ints]
    for p in gaussian_divisors(a0):
        for q in gaussian_divisors(an):
            base = GaussianRational(Fraction(p[0]), Fraction(p[1])) / GaussianRational(
                Fraction(q[0]), Fraction(q[1])
            )
            for u in units:
                cand = base * GaussianRational(u[0], u[1])
                if is_zero(_eval_univ(qi_coeffs, cand)):
                    roots.add(cand)
    return sorted(roots, key=lambda g: (g.re, g.im))


def univariate_roots(coeffs, field):
    """Roots in the given field; None means undecided (Q(i) size guard)."""
    if field == FIELD_Q:
        return q_roots(coeffs)
    return qi_roots(coeffs)
