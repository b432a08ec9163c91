"""Exact arithmetic in cyclotomic fields with fixed-branch rational powers.

Two value classes:

``Cyclotomic``
    An element of Q(w_n), stored on the power basis 1, w, ..., w^{phi(n)-1}
    modulo the n-th cyclotomic polynomial.  Mixed-conductor arithmetic lifts
    both operands into Q(w_lcm).  Rationals always normalize to conductor 1,
    so the common all-rational case stays on a fast path.

``Scalar``
    A Cyclotomic times a finite product of radical factors base^tau with tau
    rational, under the principal branch -pi < arg <= pi.  Canonicalization
    folds integer exponents, extracts rational roots, splits off root-of-unity
    phases, and merges conjugate pairs; whatever survives is genuinely
    irrational and equality falls back to certified interval evaluation.

Scalars are immutable and safe to share.
"""

from __future__ import annotations

import functools

from mpmath import iv

try:
    from gmpy2 import mpq as _rat
except ImportError:  # pragma: no cover - gmpy2 is a hard dep, this is a dev fallback
    from fractions import Fraction as _rat


def Q(a=0, b=None):
    """Exact rational from ints, 'num/den' strings, or another rational."""
    if b is None:
        if isinstance(a, str):
            return _rat(a)
        return _rat(a)
    return _rat(a, b)


QZERO = Q(0)
QONE = Q(1)


def as_int(q):
    q = Q(q)
    if q.denominator != 1:
        raise ValueError(f"not an integer: {q}")
    return int(q.numerator)


def _factor(n: int) -> dict:
    # trial division; every input here is tiny
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    r = 1
    for p, e in _factor(n).items():
        r *= (p - 1) * p ** (e - 1)
    return r


def _polydiv_exact(num, den):
    """Exact quotient of dense ascending-coefficient polynomials."""
    num = list(num)
    dd = len(den) - 1
    out = [QZERO] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] / den[dd]
        out[i - dd] = c
        if c:
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@functools.lru_cache(maxsize=None)
def cyclo_poly(n: int):
    """Coefficients of the n-th cyclotomic polynomial, ascending, monic."""
    if n == 1:
        return (Q(-1), QONE)
    num = [Q(-1)] + [QZERO] * (n - 1) + [QONE]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, cyclo_poly(d))
    return tuple(num)


@functools.lru_cache(maxsize=None)
def _red_rows(n: int):
    """x^e mod cyclo_poly(n) for e in [phi(n), n), as dense coefficient rows."""
    phi = cyclo_poly(n)
    d = len(phi) - 1
    rows = {}
    cur = [-c for c in phi[:d]]
    for e in range(d, n):
        rows[e] = tuple(cur)
        top = cur[d - 1]
        cur = [QZERO] + cur[:-1]
        if top:
            base = rows[d]
            cur = [cur[j] + top * base[j] for j in range(d)]
    return rows


def _canonical(n: int, c: dict):
    """Reduce an exponent->rational dict to the power basis of Q(w_n)."""
    d = euler_phi(n)
    folded = {}
    for e, v in c.items():
        if not v:
            continue
        e %= n
        folded[e] = folded.get(e, QZERO) + v
    if n > 1:
        rows = _red_rows(n)
        out = {}
        for e, v in folded.items():
            if not v:
                continue
            if e < d:
                out[e] = out.get(e, QZERO) + v
            else:
                for j, r in enumerate(rows[e]):
                    if r:
                        out[j] = out.get(j, QZERO) + v * r
        folded = out
    folded = {e: v for e, v in folded.items() if v}
    if not folded or set(folded) == {0}:
        # value is rational regardless of the ambient field
        return 1, folded
    return n, folded


class Cyclotomic:
    """Immutable element of Q(w_n) on the power basis."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, c: dict, _reduced=False):
        if not _reduced:
            n, c = _canonical(n, {e: Q(v) for e, v in c.items()})
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", c)

    def __setattr__(self, *a):
        raise AttributeError("Cyclotomic is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(v) -> "Cyclotomic":
        v = Q(v)
        return Cyclotomic(1, {0: v} if v else {}, _reduced=True)

    @staticmethod
    def root(n: int, k: int = 1) -> "Cyclotomic":
        """w_n^k, a primitive n-th root of unity for k=1."""
        if n < 1:
            raise ValueError("conductor must be positive")
        return Cyclotomic(n, {k: QONE})

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.c

    def is_rational(self) -> bool:
        return self.n == 1

    def as_rational(self):
        if self.n != 1:
            raise ValueError(f"not rational: {self!r}")
        return self.c.get(0, QZERO)

    def key(self):
        """Hashable canonical key (conductor plus sorted coefficients)."""
        return (self.n, tuple(sorted((e, int(v.numerator), int(v.denominator))
                                     for e, v in self.c.items())))

    def lift(self, m: int) -> "Cyclotomic":
        """Image under Q(w_n) -> Q(w_m), n | m, w_n = w_m^{m/n}."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"no embedding of conductor {self.n} into {m}")
        s = m // self.n
        return Cyclotomic(m, {e * s: v for e, v in self.c.items()})

    # -- arithmetic --------------------------------------------------------

    def _raw_lift(self, m: int) -> dict:
        # exponent map only; caller canonicalizes at conductor m
        s = m // self.n
        return {e * s: v for e, v in self.c.items()}

    def _pair(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        if self.n == other.n:
            return self.n, self.c, other.c
        m = _lcm(self.n, other.n)
        return m, self._raw_lift(m), other._raw_lift(m)

    def __add__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(other)
            except TypeError:
                return NotImplemented
        n, ca, cb = self._pair(other)
        c = dict(ca)
        for e, v in cb.items():
            c[e] = c.get(e, QZERO) + v
        return Cyclotomic(n, c)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, {e: -v for e, v in self.c.items()}, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        return self + (-other)

    def __rsub__(self, other):
        return Cyclotomic.rational(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(other)
            except TypeError:
                return NotImplemented
        if self.n == 1 or other.n == 1:
            # rational scaling preserves canonical form
            if self.n == 1:
                s, big = self.c.get(0, QZERO), other
            else:
                s, big = other.c.get(0, QZERO), self
            if not s:
                return Cyclotomic(1, {}, _reduced=True)
            return Cyclotomic(big.n, {e: v * s for e, v in big.c.items()},
                              _reduced=True)
        n, ca, cb = self._pair(other)
        c = {}
        for e1, v1 in ca.items():
            for e2, v2 in cb.items():
                e = e1 + e2
                c[e] = c.get(e, QZERO) + v1 * v2
        return Cyclotomic(n, c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("Cyclotomic powers take integer exponents")
        if k < 0:
            return self.inv() ** (-k)
        out = Cyclotomic.rational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inv(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("cyclotomic inverse of zero")
        if self.n == 1:
            return Cyclotomic.rational(QONE / self.c[0])
        # extended Euclid against the defining polynomial
        d = euler_phi(self.n)
        f = [QZERO] * d
        for e, v in self.c.items():
            f[e] = v
        g, u = _poly_invert(f, list(cyclo_poly(self.n)))
        del g
        return Cyclotomic(self.n, {e: v for e, v in enumerate(u) if v})

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        return self * other.inv()

    def __rtruediv__(self, other):
        return Cyclotomic.rational(other) * self.inv()

    def conj(self) -> "Cyclotomic":
        """Complex conjugate (w -> w^{-1})."""
        if self.n == 1:
            return self
        c = {}
        for e, v in self.c.items():
            e2 = (-e) % self.n
            c[e2] = c.get(e2, QZERO) + v
        return Cyclotomic(self.n, c)

    def __eq__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                other = Cyclotomic.rational(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.n == other.n:
            return self.c == other.c
        n, ca, cb = self._pair(other)
        a = Cyclotomic(n, ca)
        b = Cyclotomic(n, cb)
        return a.n == b.n and a.c == b.c

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            return "0"
        if self.n == 1:
            return str(self.c[0])
        terms = []
        for e in sorted(self.c):
            v = self.c[e]
            if e == 0:
                terms.append(str(v))
            else:
                terms.append(f"{v}*w{self.n}^{e}")
        return " + ".join(terms)

    # -- numerics ----------------------------------------------------------

    def interval(self, prec: int):
        """Complex interval enclosure at the given binary precision."""
        with _iv_prec(prec):
            tot = iv.mpc(0, 0)
            for e, v in self.c.items():
                coeff = iv.mpf(int(v.numerator)) / iv.mpf(int(v.denominator))
                if self.n == 1:
                    tot += coeff
                else:
                    ang = 2 * iv.pi * iv.mpf(e) / iv.mpf(self.n)
                    tot += coeff * iv.exp(iv.mpc(0, 1) * ang)
            return tot


def _lcm(a, b):
    import math
    return a * b // math.gcd(a, b)


def _poly_invert(f, mod):
    """Return (gcd, u) with u*f == gcd (a nonzero constant) mod `mod`."""
    r0, r1 = list(mod), list(f)
    s0, s1 = [QZERO], [QONE]
    while True:
        r1 = _trim(r1)
        if len(r1) == 1:
            if not r1[0]:
                raise ZeroDivisionError("not invertible")
            c = r1[0]
            return r1, [v / c for v in _trim(s1)]
        q, r = _polydivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _polysub(s0, _polymul(q, s1))


def _trim(p):
    while len(p) > 1 and not p[-1]:
        p = p[:-1]
    return p


def _polydivmod(a, b):
    a = list(a)
    b = _trim(list(b))
    db = len(b) - 1
    if len(a) - 1 < db:
        return [QZERO], a
    q = [QZERO] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        if i >= len(a) or not a[i]:
            continue
        c = a[i] / b[db]
        q[i - db] += c
        for j in range(db + 1):
            a[i - db + j] -= c * b[j]
    return q, _trim(a)


def _polymul(a, b):
    out = [QZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _polysub(a, b):
    n = max(len(a), len(b))
    a = a + [QZERO] * (n - len(a))
    b = b + [QZERO] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


class _iv_prec:
    """Temporarily set the mpmath interval precision."""

    def __init__(self, prec):
        self.prec = prec

    def __enter__(self):
        self.saved = iv.prec
        iv.prec = self.prec

    def __exit__(self, *a):
        iv.prec = self.saved


class UndecidableEquality(Exception):
    """Interval certification hit the precision cap without a verdict."""


DEFAULT_PREC_CAP = 4096


class Scalar:
    """Cyclotomic number times radical factors base^tau, principal branch."""

    __slots__ = ("cyc", "rad")

    def __init__(self, cyc, rad=(), _canon=False):
        if not isinstance(cyc, Cyclotomic):
            cyc = Cyclotomic.rational(cyc)
        if not _canon:
            cyc, rad = _canon_rad(cyc, rad)
        object.__setattr__(self, "cyc", cyc)
        object.__setattr__(self, "rad", rad)

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    @staticmethod
    def of(v) -> "Scalar":
        if isinstance(v, Scalar):
            return v
        if isinstance(v, Cyclotomic):
            return Scalar(v)
        return Scalar(Cyclotomic.rational(v))

    def is_cyclotomic(self) -> bool:
        return not self.rad

    def as_cyclotomic(self) -> Cyclotomic:
        if self.rad:
            raise ValueError(f"irrational scalar: {self!r}")
        return self.cyc

    def is_zero(self) -> bool:
        return self.cyc.is_zero()

    def __mul__(self, other):
        try:
            other = Scalar.of(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.cyc * other.cyc, self.rad + other.rad)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.cyc, self.rad, _canon=True)

    def __add__(self, other):
        other = Scalar.of(other)
        if self.rad == other.rad:
            return Scalar(self.cyc + other.cyc, self.rad, _canon=True)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        raise ValueError("sum of scalars with unlike radical parts "
                         "leaves the supported value domain")

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Scalar.of(other))

    def inv(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("scalar inverse of zero")
        return Scalar(self.cyc.inv(), tuple((b, -t) for b, t in self.rad))

    def __truediv__(self, other):
        return self * Scalar.of(other).inv()

    def __rtruediv__(self, other):
        return Scalar.of(other) * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("use branch_power for fractional exponents")
        if k < 0:
            return self.inv() ** (-k)
        out = Scalar.of(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            return scalar_eq(self, other)
        except UndecidableEquality:
            return NotImplemented

    __hash__ = None

    def interval(self, prec: int):
        """Complex interval enclosure; radical factors via exp(tau*log base)."""
        with _iv_prec(prec):
            tot = self.cyc.interval(prec)
            for b, t in self.rad:
                bi = b.interval(prec)
                if 0 in bi:
                    raise UndecidableEquality(
                        f"radical base interval contains 0 at prec {prec}")
                ti = iv.mpf(int(t.numerator)) / iv.mpf(int(t.denominator))
                tot *= iv.exp(ti * iv.log(bi))
            return tot

    def __repr__(self):
        if not self.rad:
            return repr(self.cyc)
        rads = " * ".join(f"({b!r})^({t})" for b, t in self.rad)
        return f"{self.cyc!r} * {rads}"


def _real_sign(x: Cyclotomic, cap=DEFAULT_PREC_CAP) -> int:
    """Sign of a known-real nonzero cyclotomic, by interval escalation."""
    prec = 128
    while prec <= cap:
        box = x.interval(prec)
        if box.real > 0:
            return 1
        if box.real < 0:
            return -1
        prec *= 2
    raise UndecidableEquality(f"sign of {x!r} unresolved at prec cap {cap}")


def _rational_power_split(base, num: int, den: int):
    """(rational, parts) with base^(num/den) = rational * prod p^frac.

    base is a positive rational; parts lists (prime, exponent) with each
    exponent in (0, 1), one entry per prime, so the form is canonical.
    """
    out = QONE
    parts = []
    for intval, inv in ((int(base.numerator), False), (int(base.denominator), True)):
        for p, e in _factor(intval).items():
            tot = e * num * (-1 if inv else 1)
            q0, r0 = divmod(tot, den)
            out *= Q(p) ** q0 if q0 >= 0 else QONE / Q(p) ** (-q0)
            if r0:
                parts.append((p, Q(r0, den)))
    return out, parts


def _canon_rad(cyc: Cyclotomic, entries):
    """Canonicalize radical entries, folding exact parts into `cyc`."""
    if cyc.is_zero():
        return cyc, ()
    work = [(b, Q(t)) for b, t in entries]
    for _ in range(16):  # fixpoint loop; passes only ever simplify
        snapshot = sorted((b.key() if isinstance(b, Cyclotomic) else b, str(t))
                          for b, t in work)
        # fold exact entries
        pending = []
        for b, t in work:
            if not isinstance(b, Cyclotomic):
                b = Cyclotomic.rational(b)
            if b.is_zero():
                raise ZeroDivisionError("radical with zero base")
            if t == 0 or b == 1:
                continue
            if t.denominator == 1:
                cyc = cyc * b ** int(t.numerator)
                continue
            num, den = int(t.numerator), int(t.denominator)
            if b.is_rational():
                v = b.as_rational()
                if v < 0:
                    # arg = pi exactly: (-x)^t = x^t * w_{2 den}^{num}
                    cyc = cyc * Cyclotomic.root(2 * den, num % (2 * den))
                    v = -v
                rat, parts = _rational_power_split(v, num, den)
                cyc = cyc * Cyclotomic.rational(rat)
                for prime, ex in parts:
                    pending.append((Cyclotomic.rational(prime), ex))
                continue
            ru = _as_root_of_unity(b)
            if ru is not None:
                m, k = ru
                # normalize the angle into (-pi, pi]
                k %= m
                if 2 * k > m:
                    k -= m
                cyc = cyc * Cyclotomic.root(m * den, (k * num) % (m * den))
                continue
            if b.conj() == b and _real_sign(b) < 0:
                cyc = cyc * Cyclotomic.root(2 * den, num % (2 * den))
                pending.append((-b, t))
                continue
            pending.append((b, t))
        # merge identical bases
        merged = {}
        for b, t in pending:
            k = b.key()
            if k in merged:
                merged[k] = (b, merged[k][1] + t)
            else:
                merged[k] = (b, t)
        pending = [bt for bt in merged.values() if bt[1] != 0]
        # product rules within an exponent class: conjugate pairs, positive reals
        by_exp = {}
        for b, t in pending:
            by_exp.setdefault(t, []).append(b)
        out = []
        for t, bases in by_exp.items():
            pos = []
            rest = []
            for b in bases:
                if b.is_rational() and b.as_rational() > 0:
                    pos.append(b)
                elif b.conj() == b and _real_sign(b) > 0:
                    pos.append(b)
                else:
                    rest.append(b)
            used = [False] * len(rest)
            for i, b in enumerate(rest):
                if used[i]:
                    continue
                cb = b.conj()
                if cb == b:
                    continue  # real negatives were split off above
                for j in range(i + 1, len(rest)):
                    if not used[j] and rest[j] == cb:
                        pos.append(b * cb)  # |b|^2 > 0
                        used[i] = used[j] = True
                        break
            for i, b in enumerate(rest):
                if not used[i]:
                    out.append((b, t))
            if pos:
                prod = pos[0]
                for b in pos[1:]:
                    prod = prod * b
                out.append((prod, t))
        work = out
        if snapshot == sorted((b.key(), str(t)) for b, t in work):
            break
    work.sort(key=lambda bt: (str(bt[1]), bt[0].key()))
    return cyc, tuple(work)


def _as_root_of_unity(b: Cyclotomic):
    """(m, k) with b = w_m^k if b is a root of unity, else None."""
    if b * b.conj() != 1:
        return None
    m = _lcm(2, b.n)
    w = Cyclotomic.root(m)
    cur = Cyclotomic.rational(1)
    for k in range(m):
        if b == cur:
            return m, k
        cur = cur * w
    return None


def interval_bounds(box):
    """Exact endpoints of a complex interval as mp-context mpf pairs."""
    from mpmath import mp
    rlo, rhi = box.real._mpi_
    ilo, ihi = box.imag._mpi_
    return ((mp.make_mpf(rlo), mp.make_mpf(rhi)),
            (mp.make_mpf(ilo), mp.make_mpf(ihi)))


# -- public operations -----------------------------------------------------


def omega(n: int) -> Scalar:
    """A primitive n-th root of unity, compatible across conductors."""
    if n < 1:
        raise ValueError("order must be positive")
    return Scalar(Cyclotomic.root(n))


def branch_power(base, tau) -> Scalar:
    """base^tau under the principal branch -pi < arg <= pi.

    Exact for integer tau, rational bases, and root-of-unity bases; other
    bases keep a canonical radical factor.  Satisfies a^(s+t) = a^s * a^t.
    """
    tau = Q(tau)
    base = Scalar.of(base)
    if base.is_zero():
        raise ZeroDivisionError("0 has no fixed-branch power")
    if tau.denominator == 1:
        return base ** int(tau.numerator)
    if base.rad:
        # only positive-real composites keep exponents multiplicative
        for b, t in base.rad:
            real = b.conj() == b
            if not (real and _real_sign(b) > 0):
                raise ValueError("fractional power of a non-positive radical")
        if not (base.cyc.is_rational() and base.cyc.as_rational() > 0):
            raise ValueError("fractional power of a mixed-sign scalar")
        rads = tuple((b, t * tau) for b, t in base.rad)
        return branch_power(Scalar(base.cyc), tau) * Scalar(Cyclotomic.rational(1), rads)
    return Scalar(Cyclotomic.rational(1), ((base.cyc, tau),))


def scalar_eq(a, b, prec_cap: int = DEFAULT_PREC_CAP) -> bool:
    """Exact scalar equality, with certified interval fallback.

    Pure cyclotomic comparisons are decided algebraically.  When radical
    parts survive canonicalization, escalating interval arithmetic can
    certify inequality; an equality that resists canonicalization raises
    UndecidableEquality rather than guessing.
    """
    a = Scalar.of(a)
    b = Scalar.of(b)
    if a.rad == b.rad:
        return a.cyc == b.cyc
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    r = a / b
    if not r.rad:
        return r.cyc == 1
    prec = 256
    while prec <= prec_cap:
        try:
            box = r.interval(prec)
        except UndecidableEquality:
            prec *= 2
            continue
        if 1 not in box:
            return False
        prec *= 2
    raise UndecidableEquality(
        f"equality of {a!r} and {b!r} unresolved at precision cap {prec_cap}")


def root_product(p: int, tau) -> Scalar:
    """prod_{r=1}^{p-1} (1 - w_p^r)^tau, canonicalized; equals p^tau."""
    if p < 1:
        raise ValueError("p must be positive")
    tau = Q(tau)
    out = Scalar.of(1)
    for r in range(1, p):
        out = out * branch_power(Scalar(1 - Cyclotomic.root(p, r)), tau)
    return out
