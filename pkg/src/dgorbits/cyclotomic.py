"""Exact arithmetic in cyclotomic fields Q(zeta_m).

An element is a polynomial in zeta_m with Fraction coefficients, kept in the
canonical form of degree < phi(m) obtained by reducing modulo the m-th
cyclotomic polynomial.  Equality is coefficient comparison after promoting
both operands to the lcm conductor; complex conjugation is exponent negation.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[Fraction, ...]:
    """Coefficients (low degree first) of the m-th cyclotomic polynomial."""
    if m == 1:
        return (Fraction(-1), Fraction(1))
    # (x^m - 1) / prod_{d | m, d < m} Phi_d
    poly = [Fraction(0)] * (m + 1)
    poly[0], poly[m] = Fraction(-1), Fraction(1)
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_div_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _poly_div_exact(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    num = list(num)
    out = [Fraction(0)] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] / den[-1]
        out[k] = c
        if c:
            for i, dc in enumerate(den):
                num[k + i] -= c * dc
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


def _phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@lru_cache(maxsize=None)
def _power_reduction(m: int) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical coefficients of zeta_m^e for e = 0..m-1."""
    phi = _phi(m)
    poly = cyclotomic_polynomial(m)
    rows: list[tuple[Fraction, ...]] = []
    cur = [Fraction(0)] * phi
    cur[0] = Fraction(1)
    for _ in range(m):
        rows.append(tuple(cur))
        nxt = [Fraction(0)] + cur[:]
        if nxt[phi]:
            lead = nxt[phi]
            for i in range(phi):
                nxt[i] -= lead * poly[i]
        cur = nxt[:phi]
    return tuple(rows)


class Cyclotomic:
    """An element of Q(zeta_m) in canonical reduced form."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs):
        self.conductor = conductor
        phi = _phi(conductor)
        c = list(coeffs) + [Fraction(0)] * (phi - len(coeffs))
        self.coeffs = tuple(Fraction(v) for v in c[:phi])

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(conductor: int = 1) -> "Cyclotomic":
        return Cyclotomic(conductor, [])

    @staticmethod
    def from_rational(value: Scalar, conductor: int = 1) -> "Cyclotomic":
        return Cyclotomic(conductor, [Fraction(value)])

    @staticmethod
    def root_of_unity(conductor: int, exponent: int) -> "Cyclotomic":
        row = _power_reduction(conductor)[exponent % conductor]
        return Cyclotomic(conductor, row)

    # -- structure -----------------------------------------------------------

    def promoted(self, conductor: int) -> "Cyclotomic":
        if conductor == self.conductor:
            return self
        if conductor % self.conductor != 0:
            raise ValueError("can only promote to a multiple conductor")
        scale = conductor // self.conductor
        rows = _power_reduction(conductor)
        out = [Fraction(0)] * _phi(conductor)
        powers = _power_reduction(self.conductor)
        # write self as sum over zeta_self^e then map e -> e*scale
        for e, coeff in enumerate(self._as_power_sums()):
            if coeff:
                row = rows[(e * scale) % conductor]
                for i, v in enumerate(row):
                    out[i] += coeff * v
        return Cyclotomic(conductor, out)

    def _as_power_sums(self) -> list[Fraction]:
        """Coefficients over zeta^0..zeta^(m-1); canonical form is already a
        polynomial of degree < phi(m) <= m, so this is just padding."""
        out = [Fraction(0)] * self.conductor
        for i, v in enumerate(self.coeffs):
            out[i] = v
        return out

    @staticmethod
    def _pair(a: "Cyclotomic", b: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        if a.conductor == b.conductor:
            return a, b
        m = math.lcm(a.conductor, b.conductor)
        return a.promoted(m), b.promoted(m)

    # -- ring operations ---------------------------------------------------------

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.from_rational(other, 1)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Cyclotomic._pair(self, other)
        return Cyclotomic(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Cyclotomic._pair(self, other)
        m = a.conductor
        prod = [Fraction(0)] * m
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    prod[(i + j) % m] += x * y
        rows = _power_reduction(m)
        out = [Fraction(0)] * _phi(m)
        for e, coeff in enumerate(prod):
            if coeff:
                for i, v in enumerate(rows[e]):
                    out[i] += coeff * v
        return Cyclotomic(m, out)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        """Field inverse via the extended Euclidean algorithm mod Phi_m."""
        if not any(self.coeffs):
            raise ZeroDivisionError("cyclotomic division by zero")
        m = self.conductor
        phi_poly = [Fraction(v) for v in cyclotomic_polynomial(m)]
        a = list(self.coeffs)
        # extended gcd of a and Phi_m in Q[x]
        r0, r1 = phi_poly, _trim(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _degree(r1) > 0:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if _degree(r1) != 0 or not r1:
            raise ZeroDivisionError("element is a zero divisor; not a field element")
        c = r1[0]
        inv_coeffs = [v / c for v in s1]
        return Cyclotomic(m, _poly_mod_phi(inv_coeffs, m))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Cyclotomic._pair(self, other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    # -- involutions and predicates ----------------------------------------------

    def conjugate(self) -> "Cyclotomic":
        m = self.conductor
        rows = _power_reduction(m)
        out = [Fraction(0)] * _phi(m)
        for e, coeff in enumerate(self.coeffs):
            if coeff:
                for i, v in enumerate(rows[(-e) % m]):
                    out[i] += coeff * v
        return Cyclotomic(m, out)

    def galois(self, k: int) -> "Cyclotomic":
        """The automorphism zeta -> zeta^k (k coprime to the conductor)."""
        if math.gcd(k, self.conductor) != 1:
            raise ValueError("galois exponent must be coprime to the conductor")
        m = self.conductor
        rows = _power_reduction(m)
        out = [Fraction(0)] * _phi(m)
        for e, coeff in enumerate(self.coeffs):
            if coeff:
                for i, v in enumerate(rows[(e * k) % m]):
                    out[i] += coeff * v
        return Cyclotomic(m, out)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def reduced(self) -> "Cyclotomic":
        """Smallest-conductor representation (descend through divisors)."""
        cur = self
        changed = True
        while changed and cur.conductor > 1:
            changed = False
            for p in sorted({f for f in _prime_factors(cur.conductor)}):
                target = cur.conductor // p
                try:
                    cand = _try_descend(cur, target)
                except ValueError:
                    cand = None
                if cand is not None:
                    cur = cand
                    changed = True
                    break
        return cur

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.conductor)
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs))

    # -- dunder plumbing ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.rational_value() == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = Cyclotomic._pair(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        r = self.reduced()
        return hash((r.conductor, r.coeffs))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Cyc({self.rational_value()})"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*z{self.conductor}^{i}" if i else f"{c}")
        return "Cyc(" + " + ".join(terms) + ")"


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _degree(p: list[Fraction]) -> int:
    return len(_trim(list(p))) - 1


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1 if a and b else 0)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else Fraction(0)) - (b[i] if i < len(b) else Fraction(0)) for i in range(n)]


def _poly_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = _trim(list(num))
    den = _trim(list(den))
    if not den:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and num:
        c = num[-1] / den[-1]
        k = len(num) - len(den)
        q[k] = c
        for i, dc in enumerate(den):
            num[k + i] -= c * dc
        num = _trim(num)
    return q, num


def _poly_mod_phi(p: list[Fraction], m: int) -> list[Fraction]:
    _, r = _poly_divmod(p, [Fraction(v) for v in cyclotomic_polynomial(m)])
    return r + [Fraction(0)] * (_phi(m) - len(r))


def _prime_factors(k: int) -> list[int]:
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def _try_descend(x: Cyclotomic, target: int) -> "Cyclotomic":
    """Rewrite x in Q(zeta_target) if possible, else raise ValueError."""
    m = x.conductor
    scale = m // target
    # x lies in Q(zeta_target) iff it is fixed by the Galois automorphisms
    # acting trivially on zeta_target; test by re-expanding on the subfield.
    rows = _power_reduction(target)
    # Solve greedily: expand x over zeta_m powers, each power zeta_m^e maps
    # into the subfield only when e is a multiple of scale.
    out = [Fraction(0)] * _phi(target)
    rem = x
    expansion = list(rem.coeffs)
    # try to express: x == sum_j c_j zeta_m^(j*scale) with c_j rational.
    # Build the matrix lazily: subtract candidate terms and check for zero.
    basis = [Cyclotomic.root_of_unity(m, j * scale) for j in range(target)]
    coeffs = _solve_rational_combination(x, basis)
    if coeffs is None:
        raise ValueError("not in the subfield")
    for j, c in enumerate(coeffs):
        if c:
            for i, v in enumerate(rows[j % target]):
                out[i] += c * v
    return Cyclotomic(target, out)


def _solve_rational_combination(x: Cyclotomic, basis: list[Cyclotomic]):
    """Rational coefficients writing x in the span of basis, or None."""
    m = x.conductor
    phi = _phi(m)
    rows = [list(b.promoted(m).coeffs) for b in basis]
    target = list(x.coeffs)
    # Gaussian elimination on the transposed system.
    cols = len(rows)
    aug = [[rows[j][i] for j in range(cols)] + [target[i]] for i in range(phi)]
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, phi) if aug[i][c]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][c]
        aug[r] = [v / pv for v in aug[r]]
        for i in range(phi):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == phi:
            break
    sol = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    for i in range(r, phi):
        if aug[i][-1]:
            return None
    # residual check
    acc = Cyclotomic.zero(m)
    for c, b in zip(sol, basis):
        if c:
            acc = acc + Cyclotomic.from_rational(c) * b.promoted(m)
    if acc != x:
        return None
    return sol
