"""Windowed sparse formal Laurent series with fractional exponents.

A series lives in a fixed sorted tuple of variables.  Exponents of a
variable are rationals with denominator dividing that variable's ``den``
entry and are stored as scaled integers.  Two per-variable closed
intervals accompany the data:

  window   exponent range on which the stored coefficients are complete:
           inside the window an absent key means exactly zero;
  support  range guaranteed to contain every exponent of the untruncated
           series, known region or not.

Products narrow windows against the partner's support bounds, so any
coefficient reported inside a window is exact regardless of how the
inputs were truncated.  Coefficients may be rationals, Cyclotomics,
Scalars, or any additive payload supporting +, scalar *, and is_zero().
"""

import math

from .scalar import Cyclotomic, Q, QONE, QZERO

INF = float("inf")


class WindowError(ValueError):
    """Requested coefficient lies outside the complete region."""


def _lcm(a, b):
    a = int(a)
    b = int(b)
    return a * b // math.gcd(a, b)


def _is_zero(c):
    probe = getattr(c, "is_zero", None)
    if probe is not None:
        return probe()
    return not c


def _ceil_q(x):
    return int(-((-x.numerator) // x.denominator))


def _floor_q(x):
    return int(x.numerator // x.denominator)


def _zpow(z, n):
    # integer power of an invertible Cyclotomic, n of either sign
    if n >= 0:
        return z ** n
    return z.inv() ** (-n)


def binomial(c, k):
    """Generalized binomial coefficient C(c, k) for rational c, k >= 0."""
    c = Q(c)
    b = QONE
    for i in range(k):
        b = b * (c - i) / (i + 1)
    return b


class FormalSeries:

    __slots__ = ("vars", "den", "terms", "window", "support")

    def __init__(self, variables, den, terms, window, support):
        variables = tuple(variables)
        if list(variables) != sorted(variables):
            raise ValueError("variables must be sorted")
        den = tuple(den)
        window = tuple(self._norm_win(w) for w in window)
        support = tuple(support)
        n = len(variables)
        if not (len(den) == len(window) == len(support) == n):
            raise ValueError("frame length mismatch")
        for d in den:
            if not (isinstance(d, int) and d > 0):
                raise ValueError("denominators must be positive integers")
        for lo, hi in support:
            if lo == INF or hi == -INF:
                raise ValueError("degenerate support bound")
        clean = {}
        for key, c in terms.items():
            if _is_zero(c):
                continue
            if len(key) != n:
                raise ValueError("key length mismatch")
            for i, e in enumerate(key):
                if not (window[i][0] <= e <= window[i][1]):
                    raise ValueError("stored term outside window")
                if not (support[i][0] <= e <= support[i][1]):
                    raise ValueError("stored term outside declared support")
            clean[key] = c
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "support", support)

    def __setattr__(self, *a):
        raise AttributeError("FormalSeries is immutable")

    @staticmethod
    def _norm_win(w):
        lo, hi = w
        if lo > hi:
            return (INF, -INF)
        return (lo, hi)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def build(variables, terms, window=None, support=None, dens=None):
        """Series from {exponent-tuple: coeff} with rational exponents.

        Every coefficient of an exact expression should be supplied:
        the default window is unbounded and the default support is the
        extent of the given terms.
        """
        variables = tuple(variables)
        order = sorted(range(len(variables)), key=lambda i: variables[i])
        names = tuple(variables[i] for i in order)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable")
        exps = {}
        for key, c in terms.items():
            exps[tuple(Q(key[i]) for i in order)] = c
        den = []
        for i, v in enumerate(names):
            d = (dens or {}).get(v, 1)
            for key in exps:
                d = _lcm(d, int(key[i].denominator))
            if window and v in window:
                d = _lcm(d, _bound_den(window[v]))
            if support and v in support:
                d = _lcm(d, _bound_den(support[v]))
            den.append(d)
        scaled = {}
        for key, c in exps.items():
            scaled[tuple(int(key[i] * den[i]) for i in range(len(names)))] = c
        win = []
        sup = []
        for i, v in enumerate(names):
            win.append(_scale_bounds((window or {}).get(v), den[i], (-INF, INF)))
            if support and v in support:
                sup.append(_scale_bounds(support[v], den[i], (-INF, INF)))
            else:
                comps = [k[i] for k in scaled]
                sup.append((min(comps), max(comps)) if comps else (0, 0))
        return FormalSeries(names, den, scaled, win, sup)

    @staticmethod
    def monomial(coeff, exps=None, dens=None):
        exps = dict(exps or {})
        return FormalSeries.build(tuple(exps), {tuple(exps.values()): coeff},
                                  dens=dens)

    @staticmethod
    def one():
        return FormalSeries.monomial(QONE)

    @staticmethod
    def zero():
        return FormalSeries((), (), {}, (), ())

    # -- frame bookkeeping -------------------------------------------------

    def index(self, var):
        try:
            return self.vars.index(var)
        except ValueError:
            raise KeyError(f"no variable {var!r}") from None

    def window_of(self, var):
        i = self.index(var)
        lo, hi = self.window[i]
        d = self.den[i]
        return (lo if lo in (INF, -INF) else Q(lo, d),
                hi if hi in (INF, -INF) else Q(hi, d))

    def window_empty(self):
        return any(lo > hi for lo, hi in self.window)

    def coefficient(self, exps=None):
        """Exact coefficient at the given exponents (absent vars: 0).

        Raises WindowError outside the complete region.
        """
        exps = dict(exps or {})
        key = []
        for i, v in enumerate(self.vars):
            e = Q(exps.pop(v, 0))
            lo, hi = self.window[i]
            s = e * self.den[i]
            if not (lo <= s <= hi):
                raise WindowError(f"{v}^{e} outside window")
            if s.denominator != 1:
                return QZERO
            key.append(int(s))
        for v, e in exps.items():
            if Q(e) != 0:
                return QZERO
        return self.terms.get(tuple(key), QZERO)

    def __repr__(self):
        w = ", ".join(f"{v}:[{lo},{hi}]/{d}" for v, (lo, hi), d
                      in zip(self.vars, self.window, self.den))
        return f"<FormalSeries {len(self.terms)} terms {w}>"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        return series_add(self, other)

    def __sub__(self, other):
        return series_add(self, other.scale(Q(-1)))

    def __neg__(self):
        return self.scale(Q(-1))

    def __mul__(self, other):
        return series_mul(self, other)

    def scale(self, c):
        if _is_zero(c):
            return FormalSeries(self.vars, self.den, {},
                                self.window, self.support)
        terms = {k: c * v for k, v in self.terms.items()}
        return FormalSeries(self.vars, self.den, terms,
                            self.window, self.support)

    def __pow__(self, n):
        if not (isinstance(n, int) and n >= 0):
            raise ValueError("series power must be a nonnegative integer")
        out = FormalSeries.one()
        for _ in range(n):
            out = series_mul(out, self)
        return out

    def as_exact(self):
        """Promote the stored terms to an exact finite series.

        Windows become unbounded and the support shrinks to the stored
        extent.  Sound only when the discarded tail cannot reach any
        coefficient later read off a product: the caller owns that
        argument, typically because tail exponents in a variable with
        nonnegative support exceed everything the final window admits.
        """
        if self.terms:
            comps = list(zip(*self.terms))
            sup = tuple((min(cs), max(cs)) for cs in comps)
        else:
            sup = tuple((0, 0) for _ in self.vars)
        win = tuple((-INF, INF) for _ in self.vars)
        return FormalSeries(self.vars, self.den, dict(self.terms), win, sup)

    def clip(self, window):
        """Restrict to the intersection with the given rational window."""
        win = list(self.window)
        for v, bounds in window.items():
            i = self.index(v)
            lo, hi = _scale_bounds(bounds, self.den[i], win[i])
            win[i] = (max(win[i][0], lo), min(win[i][1], hi))
        terms = {k: c for k, c in self.terms.items()
                 if all(win[i][0] <= k[i] <= win[i][1] for i in range(len(k)))}
        return FormalSeries(self.vars, self.den, terms, win, self.support)


def _bound_den(bounds):
    d = 1
    for b in bounds:
        if b is not None and b not in (INF, -INF):
            d = _lcm(d, Q(b).denominator)
    return d


def _scale_bounds(bounds, den, default):
    if bounds is None:
        return default
    lo, hi = bounds
    if lo is None or lo == -INF:
        lo = -INF
    else:
        lo = _ceil_q(Q(lo) * den)
    if hi is None or hi == INF:
        hi = INF
    else:
        hi = _floor_q(Q(hi) * den)
    return (lo, hi)


def _common_frame(f, g):
    names = tuple(sorted(set(f.vars) | set(g.vars)))
    dens = []
    for v in names:
        d = 1
        if v in f.vars:
            d = _lcm(d, f.den[f.vars.index(v)])
        if v in g.vars:
            d = _lcm(d, g.den[g.vars.index(v)])
        dens.append(d)
    return names, tuple(dens)


def _embed(s, names, dens):
    if s.vars == names and s.den == dens:
        return s
    pos = [s.vars.index(v) if v in s.vars else None for v in names]
    fac = [dens[i] // s.den[pos[i]] if pos[i] is not None else 1
           for i in range(len(names))]

    def scale(b, i):
        return b if b in (INF, -INF) else b * fac[i]

    terms = {}
    for key, c in s.terms.items():
        terms[tuple(key[pos[i]] * fac[i] if pos[i] is not None else 0
                    for i in range(len(names)))] = c
    window = tuple((scale(s.window[pos[i]][0], i), scale(s.window[pos[i]][1], i))
                   if pos[i] is not None else (-INF, INF)
                   for i in range(len(names)))
    support = tuple((scale(s.support[pos[i]][0], i), scale(s.support[pos[i]][1], i))
                    if pos[i] is not None else (0, 0)
                    for i in range(len(names)))
    return FormalSeries(names, dens, terms, window, support)


def series_add(f, g):
    names, dens = _common_frame(f, g)
    a = _embed(f, names, dens)
    b = _embed(g, names, dens)
    win = tuple((max(wa[0], wb[0]), min(wa[1], wb[1]))
                for wa, wb in zip(a.window, b.window))
    sup = tuple((min(sa[0], sb[0]), max(sa[1], sb[1]))
                for sa, sb in zip(a.support, b.support))
    terms = {}
    for src in (a.terms, b.terms):
        for k, c in src.items():
            if all(win[i][0] <= k[i] <= win[i][1] for i in range(len(k))):
                acc = terms.get(k)
                terms[k] = c if acc is None else acc + c
    return FormalSeries(names, dens, terms, win, sup)


def series_mul(f, g, target=None):
    """Exact convolution on the soundly narrowed window.

    A variable's result window excludes every exponent that could receive
    a contribution from a truncated (outside-window, inside-support)
    region of either factor.  ``target`` optionally intersects a further
    rational window to keep only coefficients a caller will use.
    """
    names, dens = _common_frame(f, g)
    a = _embed(f, names, dens)
    b = _embed(g, names, dens)
    win = []
    sup = []
    for i in range(len(names)):
        fa, fb = a.window[i]
        fsl, fsh = a.support[i]
        ga, gb = b.window[i]
        gsl, gsh = b.support[i]
        lo, hi = -INF, INF
        if fsl < fa:
            lo = max(lo, fa + gsh)
        if gsl < ga:
            lo = max(lo, ga + fsh)
        if fb < fsh:
            hi = min(hi, fb + gsl)
        if gb < gsh:
            hi = min(hi, gb + fsl)
        win.append((lo, hi))
        sup.append((fsl + gsl, fsh + gsh))
    keep = list(win)
    if target:
        for v, bounds in target.items():
            if v in names:
                i = names.index(v)
                lo, hi = _scale_bounds(bounds, dens[i], keep[i])
                keep[i] = (max(keep[i][0], lo), min(keep[i][1], hi))
    nv = len(names)
    out = {}
    outer, inner = a.terms, b.terms
    if len(outer) < len(inner):
        outer, inner = inner, outer
    for k1, c1 in outer.items():
        for k2, c2 in inner.items():
            key = []
            for i in range(nv):
                s = k1[i] + k2[i]
                lo, hi = keep[i]
                if not (lo <= s <= hi):
                    key = None
                    break
                key.append(s)
            if key is None:
                continue
            key = tuple(key)
            prod = c1 * c2
            acc = out.get(key)
            out[key] = prod if acc is None else acc + prod
    return FormalSeries(names, dens, out, keep, sup)


def shift_sub(f, var, shift_var, sign=1, order=None):
    """Apply e^(sign*z0*d/d(var)), substituting var -> var + sign*z0.

    The substitution is expanded in nonnegative integral powers of the
    shift variable up to the given order; the var-window shrinks from
    above by the same amount.  The input must not involve the shift
    variable.
    """
    if shift_var in f.vars:
        raise ValueError(f"series already involves {shift_var!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not (isinstance(order, int) and order >= 0):
        raise ValueError("a nonnegative integer shift order is required")
    iv = f.index(var)
    D = f.den[iv]
    names = tuple(sorted(f.vars + (shift_var,)))
    js = names.index(shift_var)
    pos = [None if v == shift_var else f.vars.index(v) for v in names]
    dens = tuple(1 if i == js else f.den[pos[i]] for i in range(len(names)))
    # the slot (x, k) is exact iff x + k*D lay in the source window; only
    # the inscribed rectangle of that diagonal region is representable,
    # so terms above the shrunken var window are dropped
    var_hi = f.window[iv][1]
    if var_hi != INF:
        var_hi -= order * D
    out = {}
    for key, c in f.terms.items():
        e = Q(key[iv], D)
        b = QONE
        for k in range(order + 1):
            if k:
                b = b * (e - (k - 1)) / k
                if not b:
                    break
            if not (f.window[iv][0] <= key[iv] - k * D <= var_hi):
                continue
            fac = b if (sign == 1 or k % 2 == 0) else -b
            nk = []
            for i in range(len(names)):
                if i == js:
                    nk.append(k)
                elif f.vars[pos[i]] == var:
                    nk.append(key[pos[i]] - k * D)
                else:
                    nk.append(key[pos[i]])
            nk = tuple(nk)
            term = c if fac == 1 else c * fac
            acc = out.get(nk)
            out[nk] = term if acc is None else acc + term
    win = []
    sup = []
    for i in range(len(names)):
        if i == js:
            win.append((-INF, order))
            sup.append((0, INF))
        elif f.vars[pos[i]] == var:
            win.append((f.window[pos[i]][0], var_hi))
            sup.append((-INF, f.support[pos[i]][1]))
        else:
            win.append(f.window[pos[i]])
            sup.append(f.support[pos[i]])
    return FormalSeries(names, dens, out, win, sup)


def delta_series(zeta, p, lo, hi, var1="z1", var2="z2"):
    """Sum of zeta^n * var1^(n/p) * var2^(-n/p) over the finite window.

    lo and hi bound the var1 exponent n/p; the var2 window mirrors it.
    """
    if not (isinstance(p, int) and p >= 1):
        raise ValueError("period must be a positive integer")
    z = zeta if isinstance(zeta, Cyclotomic) else Cyclotomic.rational(zeta)
    n_lo = _ceil_q(Q(lo) * p)
    n_hi = _floor_q(Q(hi) * p)
    names = tuple(sorted((var1, var2)))
    i1 = names.index(var1)
    terms = {}
    for n in range(n_lo, n_hi + 1):
        key = [0, 0]
        key[i1] = n
        key[1 - i1] = -n
        terms[tuple(key)] = _zpow(z, n)
    win = [None, None]
    win[i1] = (n_lo, n_hi)
    win[1 - i1] = (-n_hi, -n_lo)
    return FormalSeries(names, (p, p), terms, win, ((-INF, INF), (-INF, INF)))


def binom_expand(x, y, c, root=1, zeta=1, plus=False, ymax=None):
    """Expansion of (x^(1/m) - zeta*y^(1/m))^c in nonnegative powers of y.

    ``root`` is the radial exponent 1/m (a rational with numerator 1, or
    1).  With plus=True the shape is (x + y)^c, expanded in nonnegative
    integral powers of the second argument.  Nonterminating expansions
    need ymax, an upper bound for the y exponent.
    """
    r = Q(root)
    if r.numerator != 1:
        raise ValueError("root must be of shape 1/m")
    m = int(r.denominator)
    if plus and m != 1:
        raise ValueError("(x + y)^c takes integral exponents")
    c = Q(c)
    zc = zeta if isinstance(zeta, Cyclotomic) else Cyclotomic.rational(zeta)
    step = -zc if not plus else Cyclotomic.rational(1)
    finite = c.denominator == 1 and c >= 0
    if finite:
        kmax = int(c)
    elif ymax is None:
        raise ValueError("nonterminating expansion requires ymax")
    else:
        kmax = _floor_q(Q(ymax) * m)
        if kmax < 0:
            raise ValueError("empty expansion window")
    Dx = int(c.denominator) * m
    names = tuple(sorted((x, y)))
    ix = names.index(x)
    dens = [0, 0]
    dens[ix] = Dx
    dens[1 - ix] = m
    terms = {}
    b = QONE
    zfac = Cyclotomic.rational(1)
    for k in range(kmax + 1):
        if k:
            b = b * (c - (k - 1)) / k
            zfac = zfac * step
            if not b:
                break
        coeff = zfac * b
        if coeff.is_zero():
            continue
        key = [0, 0]
        key[ix] = int(c.numerator) - k * int(c.denominator)
        key[1 - ix] = k
        terms[tuple(key)] = coeff
    if finite:
        comps_x = [k[ix] for k in terms] or [0]
        comps_y = [k[1 - ix] for k in terms] or [0]
        win = [(-INF, INF), (-INF, INF)]
        sup = [None, None]
        sup[ix] = (min(comps_x), max(comps_x))
        sup[1 - ix] = (min(comps_y), max(comps_y))
    else:
        win = [None, None]
        win[ix] = (-INF, INF)
        win[1 - ix] = (-INF, kmax)
        sup = [None, None]
        sup[ix] = (-INF, int(c.numerator))
        sup[1 - ix] = (0, INF)
    return FormalSeries(names, dens, terms, win, sup)


def residue(f, var):
    """Coefficient of var^(-1) as a series in the remaining variables."""
    iv = f.index(var)
    D = f.den[iv]
    lo, hi = f.window[iv]
    if not (lo <= -D <= hi):
        raise WindowError(f"exponent -1 of {var!r} outside window")
    names = tuple(v for v in f.vars if v != var)
    drop = [i for i in range(len(f.vars)) if i != iv]
    terms = {}
    for key, c in f.terms.items():
        if key[iv] == -D:
            terms[tuple(key[i] for i in drop)] = c
    return FormalSeries(names,
                        tuple(f.den[i] for i in drop),
                        terms,
                        tuple(f.window[i] for i in drop),
                        tuple(f.support[i] for i in drop))


def compare(f, g, window=None):
    """Coefficientwise comparison on the shared complete region.

    Returns (checked, mismatches) where mismatches lists
    (exponent-tuple-in-common-frame, left, right).  ``window`` optionally
    intersects a further rational region of interest.
    """
    names, dens = _common_frame(f, g)
    a = _embed(f, names, dens)
    b = _embed(g, names, dens)
    win = [(max(wa[0], wb[0]), min(wa[1], wb[1]))
           for wa, wb in zip(a.window, b.window)]
    if window:
        for v, bounds in window.items():
            if v in names:
                i = names.index(v)
                lo, hi = _scale_bounds(bounds, dens[i], win[i])
                win[i] = (max(win[i][0], lo), min(win[i][1], hi))

    def inside(k):
        return all(win[i][0] <= k[i] <= win[i][1] for i in range(len(k)))

    keys = sorted({k for k in a.terms if inside(k)}
                  | {k for k in b.terms if inside(k)})
    checked = 0
    mismatches = []
    for k in keys:
        ca = a.terms.get(k)
        cb = b.terms.get(k)
        checked += 1
        if ca is None:
            ok = _is_zero(cb)
        elif cb is None:
            ok = _is_zero(ca)
        else:
            ok = ca == cb
        if not ok:
            exps = tuple(Q(k[i], dens[i]) for i in range(len(k)))
            mismatches.append((exps, ca, cb))
    return checked, mismatches


def delta_shift_sides(a_terms, s, p, zeta_exp, delta_halfwidth, z0_order):
    """Both renderings of the delta-function substitution identity.

    a_terms is a finite {(m, n): coeff} family with exponent denominators
    dividing p; the underlying two-variable series carries an overall
    z1^s prefactor.  Returns (lhs, rhs):

      lhs   A(z1, z2) * shift(delta)
      rhs   the substituted form A evaluated at the zeta-twisted root of
            z2 - z0, phases included, times shift((z1/z2)^s delta)

    The two agree coefficientwise on the shared window.  The per-term
    phase zeta^(-p*m) on fractional exponents is essential: dropping it
    breaks the identity whenever m is not an integer.
    """
    s = Q(s)
    zeta = Cyclotomic.root(p, zeta_exp % p) if p > 1 else Cyclotomic.rational(1)
    amap = {(Q(m), Q(n)): c for (m, n), c in a_terms.items()}
    for (m, n) in amap:
        if (m * p).denominator != 1 or (n * p).denominator != 1:
            raise ValueError("exponent denominators must divide the period")

    a_series = FormalSeries.build(
        ("z1", "z2"), {(s + m, n): c for (m, n), c in amap.items()})
    delta = delta_series(zeta, p, -Q(delta_halfwidth), Q(delta_halfwidth))
    lhs = series_mul(a_series, shift_sub(delta, "z1", "z0", 1, z0_order))

    inner = series_mul(delta, FormalSeries.monomial(QONE, {"z1": s, "z2": -s}))
    shifted = shift_sub(inner, "z1", "z0", 1, z0_order)

    # (z2-z0)^(s+m) truncated at the z0 order and promoted to an exact
    # polynomial: the dropped tail only feeds z0 exponents beyond the
    # product's z0 window, so no reported coefficient can see it.
    total = None
    for (m, n), c in amap.items():
        part = binom_expand("z2", "z0", s + m, ymax=z0_order).as_exact()
        coeff = c * _zpow(zeta, -int(m * p))
        part = series_mul(part, FormalSeries.monomial(coeff, {"z2": n}))
        total = part if total is None else series_add(total, part)
    rhs = series_mul(total, shifted)
    return lhs, rhs
