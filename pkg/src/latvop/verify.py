"""Executable identity suites over the lattice operator engine.

Every check here expands both sides of an operator identity on an
explicit exponent window, applies them to probe vectors, and compares
state-vector coefficients exactly; nothing is sampled, and every cap is
chosen so that no contribution inside the compared box can be missed.
Results come back as IdentityReports.

The module also hosts the named preset bundles (lattice system, hat
group, untwisted and twisted spaces) that the command-line runner and
the test suites share.
"""

import math
from dataclasses import dataclass, field

from .formal import (INF, FormalSeries, WindowError, binom_expand, binomial,
                     series_mul)
from .gext import TWISTED, HatGroup
from .lattice import LatticeSystem
from .scalar import Cyclotomic, Q, as_int
from .state import (StateVector, TwistedSpace, UntwistedSpace, _cadd, _cmul,
                    build_T)
from .tvop import (_momentum, _root, delta_coeffs, orthogonal_basis, tau,
                   y_nu_apply)
from .vop import _series_terms, elem_state, y_star_apply

__all__ = [
    "IdentityReport",
    "PRESETS",
    "Preset",
    "axiom_suite",
    "ck_constant",
    "ck_direct",
    "conformal_state",
    "contraction_identity_check",
    "f_series",
    "g_series",
    "jacobi_flm_check",
    "jacobi_fpf_check",
    "jacobi_twisted_check",
    "jacobi_untwisted_check",
    "load_preset",
    "make_preset",
    "virasoro_suite",
    "weight_shift",
]


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one expanded identity: exact coefficient comparison."""

    identity: str
    preset: str
    probe: str
    window: tuple
    coefficients_checked: int
    mismatches: tuple
    status: str


def _report(identity, preset_id, probe, window, checked, mismatches):
    status = "pass" if (checked > 0 and not mismatches) else "fail"
    return IdentityReport(identity, preset_id, probe, tuple(window),
                          int(checked), tuple(mismatches), status)


def _state_label(sv):
    if sv.is_zero():
        return "0"
    keys = sorted(str(bv.skey()) for bv in sv.terms)
    return "; ".join(keys)[:200]


# -- presets ----------------------------------------------------------------


PRESETS = {
    "rank1-untwisted": {
        "gram": [[2]], "nu": [[1]], "p": 1, "q": 2, "h_star": [],
        "box": 2, "floor": 5,
        "summary": "rank-1 even lattice with the identity twist",
    },
    "rank2-relative": {
        "gram": [[2, 0], [0, 2]], "nu": [[1, 0], [0, 1]], "p": 1, "q": 2,
        "h_star": [(1, 1)], "box": 2, "floor": 5,
        "summary": "rank-2 orthogonal lattice, distinguished diagonal line",
    },
    "a1-minus1": {
        "gram": [[2]], "nu": [[-1]], "p": 2, "q": 2, "h_star": [],
        "box": 2, "floor": 5,
        "summary": "rank-1 root lattice with the sign twist",
    },
    "a2-coxeter": {
        "gram": [[2, -1], [-1, 2]], "nu": [[0, -1], [1, -1]], "p": 3, "q": 6,
        "h_star": [], "box": 2, "floor": 5,
        "summary": "rank-2 root lattice with its rotation of order three",
    },
    "a1-relative-minus1": {
        "gram": [[2, 0], [0, 2]], "nu": [[-1, 0], [0, -1]], "p": 2, "q": 2,
        "h_star": [(0, 1)], "box": 2, "floor": 5,
        "summary": "rank-2 sign twist with a distinguished axis",
    },
}


@dataclass
class Preset:
    """A lattice system with its spaces, caches, and bookkeeping."""

    ident: str
    system: LatticeSystem
    hat: HatGroup
    untwisted: UntwistedSpace
    twisted: TwistedSpace
    box: int = 2
    checked_floor: int = 5
    _coeffs: object = None
    _memo: dict = field(default_factory=dict)

    def coeffs(self):
        if self._coeffs is None:
            order = int(math.ceil(self.untwisted.max_weight)) + 2
            self._coeffs = delta_coeffs(self.system.p, order)
        return self._coeffs


def make_preset(ident, system, max_weight=8, box=2, floor=5):
    """Bundle a lattice system with freshly built spaces and caches."""
    hat = HatGroup(system)
    untw = UntwistedSpace(system, hat, max_weight=max_weight)
    tw = TwistedSpace(system, hat, build_T(system, hat), max_weight=max_weight)
    return Preset(ident, system, hat, untw, tw, box=box, checked_floor=floor)


def load_preset(ident, max_weight=8):
    """Build one of the named presets at the requested weight ceiling."""
    try:
        raw = PRESETS[ident]
    except KeyError:
        raise ValueError(f"unknown preset {ident!r}") from None
    system = LatticeSystem(raw["gram"], raw["nu"], raw["p"], raw["q"],
                           h_star_basis=list(raw["h_star"]))
    return make_preset(ident, system, max_weight=max_weight,
                       box=raw["box"], floor=raw["floor"])


# -- window and grid helpers -------------------------------------------------


def _window1(window):
    lo, hi = window
    lo, hi = Q(lo), Q(hi)
    if lo > hi:
        raise WindowError("empty window")
    return lo, hi


def _window3(window):
    """One (lo, hi) pair per formal variable; a single pair is shared."""
    seq = tuple(window)
    if len(seq) == 2 and not isinstance(seq[0], (tuple, list)):
        return (_window1(seq),) * 3
    if len(seq) != 3:
        raise WindowError("need one window or one per variable")
    return tuple(_window1(w) for w in seq)


def _grid_count(wins, dens):
    total = 1
    for (lo, hi), d in zip(wins, dens):
        n = math.floor(hi * d) - math.ceil(lo * d) + 1
        total *= max(n, 0)
    return total


def _require_weight(preset, need):
    have = min(preset.untwisted.max_weight, preset.twisted.max_weight)
    if have < need:
        raise ValueError(f"preset {preset.ident!r} was built at weight "
                         f"ceiling {have}; this check needs {need}")


# -- state accumulation ------------------------------------------------------


def _acc(table, key, sv, c=None):
    slot = table.get(key)
    if slot is None:
        slot = {}
        table[key] = slot
    for bv, cf in sv.terms.items():
        v = cf if c is None else _cmul(cf, c)
        prev = slot.get(bv)
        if prev is not None:
            v = _cadd(prev, v)
        if v.is_zero():
            slot.pop(bv, None)
        else:
            slot[bv] = v


def _finalize(table):
    out = {}
    for key, slot in table.items():
        sv = StateVector(slot)
        if not sv.is_zero():
            out[key] = sv
    return out


def _diff(lhs, rhs):
    mismatches = []
    for key in sorted(set(lhs) | set(rhs)):
        a = lhs.get(key, StateVector.zero())
        b = rhs.get(key, StateVector.zero())
        if a != b:
            mismatches.append((key, a, b))
    return mismatches


def _pair_series(preset, kind, bo, bt, hi):
    """Exponent map of one operator/target basis pair, complete <= hi.

    Cached per pair; a cached map may extend beyond the requested
    ceiling, so callers must filter on their own ceiling.
    """
    hi = Q(hi)
    key = (kind, bo, bt)
    hit = preset._memo.get(key)
    if hit is None or hit[0] < hi:
        if kind == "nu":
            f = y_nu_apply(StateVector.of(bo), StateVector.of(bt), (-INF, hi),
                           preset.untwisted, preset.twisted, preset.coeffs())
        else:
            f = y_star_apply(StateVector.of(bo), StateVector.of(bt),
                             (-INF, hi), preset.untwisted)
        hit = (hi, dict(_series_terms(f)))
        preset._memo[key] = hit
    return hit[1]


def _series_map(preset, kind, op, tgt, hi):
    """Exponent map of the operator series of op applied to tgt."""
    hi = Q(hi)
    out = {}
    for bo, co in op.terms.items():
        for bt, ct in tgt.terms.items():
            c = _cmul(co, ct)
            for e, sv in _pair_series(preset, kind, bo, bt, hi).items():
                if e <= hi:
                    _acc(out, e, sv, c)
    return _finalize(out)


def _group_coords(v):
    groups = {bv.group for bv in v.terms}
    if len(groups) != 1:
        raise ValueError("operator state must carry a single group component")
    return groups.pop()


# -- kernel series -----------------------------------------------------------


def _factor_exponents(system, alpha, beta, inverted):
    """Per-factor exponents of the pair kernel for the vectors alpha, beta.

    Factor r carries minus the twisted pairing of step r for the
    inverted kernel, and the plain pairing minus the step-r pairing for
    the regularized one; all pairings go through the orthogonal
    projection away from the distinguished subspace.
    """
    bperp = system.project(system.embed(beta), "perp")
    plain = system.form_q(system.project(system.embed(alpha), "perp"), bperp)
    out = []
    for r in range(system.p):
        ar = system.project(system.embed(system.nu_lattice(alpha, r)), "perp")
        pr = system.form_q(ar, bperp)
        out.append(-pr if inverted else plain - pr)
    return out


def _kernel_terms(system, exps, ymax):
    """{(ex, ey): coeff} for the product of the root factors.

    Factor r is (x^(1/p) - w^(-r) y^(1/p))^exps[r], expanded in
    nonnegative powers of y up to ymax; the product is complete there.
    """
    p = system.p
    ymax = Q(ymax)
    prod = None
    for r, c in enumerate(exps):
        if c == 0:
            continue
        finite = Q(c).denominator == 1 and c >= 0
        f = binom_expand("x", "y", c, root=Q(1, p), zeta=_root(p, -r),
                         ymax=None if finite else ymax)
        prod = f if prod is None else series_mul(
            prod, f, target={"y": (Q(0), ymax)})
    if prod is None:
        return {(Q(0), Q(0)): Cyclotomic.rational(1)}
    ix = prod.index("x")
    iy = prod.index("y")
    out = {}
    for key, c in prod.terms.items():
        ey = Q(key[iy], prod.den[iy])
        if ey <= ymax:
            out[(Q(key[ix], prod.den[ix]), ey)] = c
    return out


def _kadd(table, key, v):
    cur = table.get(key)
    v = v if cur is None else _cadd(cur, v)
    if v.is_zero():
        table.pop(key, None)
    else:
        table[key] = v


def _series_pow(coeffs, c, prec):
    """Integral power of a unit one-variable series, truncated at prec.

    ``coeffs`` maps exponent -> rational with a nonzero constant term.
    """
    base = {n: v for n, v in coeffs.items() if n <= prec and v}
    if c < 0:
        c0 = base[0]
        recip = {0: 1 / c0}
        for n in range(1, prec + 1):
            acc = Q(0)
            for i in range(1, n + 1):
                if i in base and (n - i) in recip:
                    acc += base[i] * recip[n - i]
            recip[n] = -acc / c0
        base = recip
        c = -c
    out = {0: Q(1)}
    for _ in range(c):
        nxt = {}
        for i, a in out.items():
            for j, b in base.items():
                if i + j <= prec:
                    nxt[i + j] = nxt.get(i + j, Q(0)) + a * b
        out = nxt
    return out


def _shifted_kernel(system, exps, nmax):
    """Shifted-argument kernel evaluated at (second + aux, second).

    Returns (base, terms): the product of the root factors at the
    shifted arguments equals second^base times the sum of terms[n] *
    (aux/second)^n over integers n up to nmax.  Defined only for
    integral factor exponents; the identity-step factor sets the order
    floor.
    """
    p = system.p
    ints = []
    for c in exps:
        cq = Q(c)
        if cq.denominator != 1:
            raise ValueError("shifted kernel expansion needs integral "
                             "factor exponents")
        ints.append(int(cq))
    base = Q(sum(ints), p)
    c0 = ints[0]
    if nmax < c0:
        return base, {}
    prec = nmax - min(c0, 0)
    # s(t) = ((1+t)^(1/p) - 1)/t is a unit series with constant term 1/p
    unit = {}
    for n in range(prec + 1):
        b = binomial(Q(1, p), n + 1)
        if b:
            unit[n] = b
    terms = {}
    for n, cf in _series_pow(unit, c0, prec).items():
        if c0 + n <= nmax:
            terms[c0 + n] = Cyclotomic.rational(cf)
    for r in range(1, p):
        c = ints[r]
        if c == 0:
            continue
        w = Cyclotomic.rational(1) - _root(p, -r)
        winv = w.inv()
        pw = w ** c
        part = {}
        upow = {0: Q(1)}
        k = 0
        while k <= prec and (c < 0 or k <= c):
            bk = binomial(c, k)
            if bk:
                sc = _cmul(Cyclotomic.rational(bk), pw)
                for n, cf in upow.items():
                    if k + n <= prec:
                        _kadd(part, k + n, _cmul(sc, Cyclotomic.rational(cf)))
            k += 1
            pw = _cmul(pw, winv)
            if k <= prec and (c < 0 or k <= c):
                nxt = {}
                for i, a in upow.items():
                    for j, b in unit.items():
                        if i + j <= prec - k:
                            nxt[i + j] = nxt.get(i + j, Q(0)) + a * b
                upow = nxt
        merged = {}
        for i, a in terms.items():
            for j, b in part.items():
                if i + j <= nmax:
                    _kadd(merged, i + j, _cmul(a, b))
        terms = merged
    return base, terms


def _spec_vars(first, second):
    if isinstance(first, (tuple, list)):
        if len(first) != 2 or str(first[0]) != str(second):
            raise ValueError("shifted arguments take the form "
                             "(second, offset)")
        return True, str(first[1])
    return False, str(first)


def _kernel_series(system, alpha, beta, first, second, window, inverted):
    shifted, aux = _spec_vars(first, second)
    second = str(second)
    exps = _factor_exponents(system, alpha, beta, inverted)
    if shifted:
        if isinstance(window, dict):
            zlo, zhi = _window1(window[aux])
        else:
            zlo, zhi = _window1(window)
        base, terms = _shifted_kernel(system, exps, int(math.floor(zhi)))
        data = {}
        for n, c in terms.items():
            if zlo <= n <= zhi:
                data[(base - n, Q(n))] = c
        win = {aux: (zlo, zhi)}
        if isinstance(window, dict) and second in window:
            win[second] = _window1(window[second])
        return FormalSeries.build((second, aux), data, window=win,
                                  dens={second: system.p, aux: 1})
    if isinstance(window, dict):
        ywin = _window1(window[second])
    else:
        ywin = _window1(window)
    if ywin[1] < 0:
        raise WindowError("the second-variable window must reach 0")
    pairs = _kernel_terms(system, exps, ywin[1])
    data = {}
    first = str(first)
    for (ex, ey), c in pairs.items():
        if ey >= ywin[0]:
            data[(ex, ey)] = c
    win = {second: (max(Q(0), ywin[0]), ywin[1])}
    if isinstance(window, dict) and first in window:
        win[first] = _window1(window[first])
    return FormalSeries.build((first, second), data, window=win,
                              dens={first: system.p, second: system.p})


def f_series(alpha, beta, first, second, window, system=None, preset=None):
    """Pair kernel with inverted twisted-pairing exponents.

    Factor r is (first^(1/p) - w^(-r)*second^(1/p)) raised to minus the
    step-r pairing of the two vectors, expanded in nonnegative powers of
    the second variable.  Passing first = (second, aux) expands the
    kernel at (second + aux, second) in integral powers of aux.
    """
    system = system if system is not None else preset.system
    return _kernel_series(system, tuple(alpha), tuple(beta), first, second,
                          window, True)


def g_series(alpha, beta, first, second, window, system=None, preset=None):
    """Regularized pair kernel; factor r carries the plain pairing minus
    the step-r pairing, so the identity step drops out.  Conventions
    match f_series."""
    system = system if system is not None else preset.system
    return _kernel_series(system, tuple(alpha), tuple(beta), first, second,
                          window, False)


# -- scalar constants --------------------------------------------------------


def ck_direct(p, k):
    """Class constant as the root-of-unity sum over nonzero classes."""
    p = as_int(p)
    if p < 2:
        raise ValueError("need p >= 2")
    one = Cyclotomic.rational(1)
    total = Cyclotomic.rational(0)
    for r in range(1, p):
        d = one - Cyclotomic.root(p, r)
        total = total + Cyclotomic.root(p, (k * r) % p) * (d * d).inv()
    return total.as_rational()


def ck_constant(p, k):
    """Closed form of the class constants, extended by periodicity.

    The quadratic expression is exact on one period of positive
    representatives; every index reduces to that period first.
    """
    p = as_int(p)
    k = as_int(k)
    if p < 2:
        raise ValueError("need p >= 2")
    if k < 0:
        raise ValueError("need k >= 0")
    kk = ((k - 1) % p) + 1
    return Q((kk - 1) * (p + 1 - kk), 2) - Q(p * p - 1, 12)


def contraction_identity_check(p):
    """Order-(1,1) contraction constants against their closed forms.

    Checks the tabulated constants against closed expressions, and for
    every class k that the symmetrized table sum equals k(p-k)/(2p^2),
    which must also match the combination of class constants
    (c_(k+1) + c_(p-k+1) - 2c_1)/(2p^2).
    """
    p = as_int(p)
    table = delta_coeffs(p, 2)
    one = Cyclotomic.rational(1)
    mismatches = []
    checked = 0
    den = Q(1, 2 * p * p)
    c110 = table.get(1, 1, 0)
    want0 = Cyclotomic.rational(-ck_direct(p, 1) * den)
    checked += 1
    if not (c110 - want0).is_zero():
        mismatches.append(((0, "table"), c110, want0))
    for r in range(1, p):
        c11r = table.get(1, 1, r)
        wr = Cyclotomic.root(p, (-r) % p)
        d = one - wr
        wantr = wr * (d * d).inv() * Cyclotomic.rational(den)
        checked += 1
        if not (c11r - wantr).is_zero():
            mismatches.append(((r, "table"), c11r, wantr))
    for k in range(p):
        acc = c110 + c110
        for i in range(1, p):
            pair = Cyclotomic.root(p, (k * i) % p) + \
                Cyclotomic.root(p, (-k * i) % p)
            acc = acc + table.get(1, 1, i) * pair
        want = Q(k * (p - k)) * den
        alt = (ck_constant(p, k + 1) + ck_constant(p, p - k + 1)
               - 2 * ck_constant(p, 1)) * den
        checked += 2
        if not (acc - Cyclotomic.rational(want)).is_zero():
            mismatches.append(((k, "sum"), acc, want))
        if alt != want:
            mismatches.append(((k, "closed"), alt, want))
    return _report("contraction-constants", f"p={p}", "-", ((0, 0),),
                   checked, mismatches)


# -- conformal structure -----------------------------------------------------


def conformal_state(preset):
    """Degree-two quadratic state over an orthogonal complement basis."""
    space = preset.untwisted
    out = StateVector.zero()
    for b, norm in orthogonal_basis(preset.system):
        s = space.osc_act(b, -1, space.osc_act(b, -1, space.vacuum()))
        out = out + s.scale(Q(1, 2) / norm)
    return out


def weight_shift(preset):
    """The twist energy, computed three independent ways.

    Returns (grading attribute, conformal zero-mode eigenvalue above
    the sector ground energy, Bernoulli-polynomial sum over eigenvalue
    multiplicities).
    """
    system = preset.system
    tw = preset.twisted
    _require_weight(preset, 2)
    route1 = tw.weight_shift
    # engine route: the conformal zero mode on the sector vacuum
    vac = tw.vacuum()
    vac_bv = next(iter(vac.terms))
    f = y_nu_apply(conformal_state(preset), vac, (-INF, Q(0)),
                   preset.untwisted, tw, preset.coeffs())
    comp = StateVector.zero()
    for e, sv in _series_terms(f):
        if e == Q(-2):
            comp = sv
    lam = comp.coefficient(vac_bv).as_rational()
    if not (comp - vac.scale(lam)).is_zero():
        raise ValueError("the sector vacuum is not an eigenvector of the "
                         "conformal zero mode")
    route2 = lam - tw.sector.weight(vac_bv.sector)
    # combinatorial route over eigenvalue multiplicities from traces
    p = system.p
    l = system.rank
    mat = [[Q(1) if i == j else Q(0) for j in range(l)] for i in range(l)]
    traces = []
    star = list(system.h_star_basis)
    duals = system.dual_basis(star) if star else []
    for r in range(p):
        full = sum(mat[i][i] for i in range(l))
        part = Q(0)
        for dvec, h in zip(duals, star):
            part += system.form_q(dvec, system.nu_apply(h, r))
        traces.append(full - part)
        mat = [[sum(mat[i][t] * system.nu[t][j] for t in range(l))
                for j in range(l)] for i in range(l)]
    route3 = Q(0)
    dim_perp = Q(0)
    for k in range(p):
        acc = Cyclotomic.rational(0)
        for r in range(p):
            acc = acc + Cyclotomic.root(p, (-k * r) % p) * \
                Cyclotomic.rational(traces[r])
        dim_k = acc.as_rational() / p
        dim_perp += dim_k
        x = Q(k, p)
        route3 += -Q(1, 4) * (x * x - x + Q(1, 6)) * dim_k
    route3 += dim_perp / 24
    return route1, route2, route3


# -- shared position-identity assembly ---------------------------------------


def _lhs_kernel(preset, ga, gb, n, ymax, with_f):
    """Cached (x - y)^n times the inverted pair kernel of (ga, gb).

    Every surviving term is homogeneous of total degree hom; returns
    (hom, {ey: coeff}) with the x-exponent hom - ey implicit.
    """
    key = ("lhsk", ga, gb, n, ymax, with_f)
    hit = preset._memo.get(key)
    if hit is not None:
        return hit
    system = preset.system
    prod = binom_expand("x", "y", n, ymax=None if n >= 0 else ymax)
    c_f = Q(0)
    if with_f:
        exps = _factor_exponents(system, ga, gb, True)
        c_f = sum(Q(c, system.p) for c in exps)
        for r, c in enumerate(exps):
            if c == 0:
                continue
            cfin = Q(c).denominator == 1 and c >= 0
            f = binom_expand("x", "y", c, root=Q(1, system.p),
                             zeta=_root(system.p, -r),
                             ymax=None if cfin else ymax)
            prod = series_mul(prod, f, target={"y": (Q(0), Q(ymax))})
    iy = prod.index("y")
    kern = {}
    for kk, c in prod.terms.items():
        ey = Q(kk[iy], prod.den[iy])
        if ey <= ymax:
            _kadd(kern, ey, c)
    hit = (n + c_f, kern)
    preset._memo[key] = hit
    return hit


def _lhs_half(preset, acc, op_outer, op_inner, probe, wins, kind,
              ga, gb, swap, with_f, cscale):
    """One operator ordering of a position-identity left side.

    The inner series attaches to its own position variable; each
    first-variable power n contributes the binomial slice times,
    optionally, the inverted pair kernel.  ``swap`` exchanges the roles
    of the two position variables (second ordering).  ``cscale`` maps n
    to the scalar in front of that slice.
    """
    (lo0, hi0), w1, w2 = wins
    wi = w1 if swap else w2
    wo = w2 if swap else w1
    cap_sum = hi0 + w1[1] + w2[1] + 1
    inner = _series_map(preset, kind, op_inner, probe, wi[1])
    if not inner:
        return
    ymax = Q(math.ceil(wi[1] - min(inner)))
    if with_f:
        exps = _factor_exponents(preset.system, ga, gb, True)
        c_f = sum(Q(c, preset.system.p) for c in exps)
    else:
        c_f = Q(0)
    joint = {}
    for ei in sorted(inner):
        cap = cap_sum - c_f - ei
        for bvi, ci in inner[ei].terms.items():
            for bo, co in op_outer.terms.items():
                c = _cmul(co, ci)
                for eo, sv in _pair_series(preset, kind, bo, bvi,
                                           cap).items():
                    if eo <= cap:
                        _acc(joint, (eo, ei), sv, c)
    cells = _finalize(joint)
    n_lo = -int(math.floor(hi0)) - 1
    n_hi = -int(math.ceil(lo0)) - 1
    for n in range(n_lo, n_hi + 1):
        hom, kern = _lhs_kernel(preset, ga, gb, n, ymax, with_f)
        sc = cscale(n)
        e0 = Q(-n - 1)
        for (eo, ei), sv in cells.items():
            for ky, ck in kern.items():
                eif = ei + ky
                if not wi[0] <= eif <= wi[1]:
                    continue
                eof = eo + hom - ky
                if not wo[0] <= eof <= wo[1]:
                    continue
                key = (e0, eif, eof) if swap else (e0, eof, eif)
                _acc(acc, key, sv, _cmul(sc, ck))


def _lhs_sides(preset, acc, u, v, probe, wins, kind, with_f, cnu):
    """Both operator orderings of a position-identity left side.

    The second ordering carries the locality scalar and the expansion
    sign of the reversed delta argument: slice k gets -cnu * (-1)^k.
    """
    ga = _group_coords(u) if with_f else None
    gb = _group_coords(v) if with_f else None
    one = Cyclotomic.rational(1)
    cfac = one if cnu is None else cnu
    _lhs_half(preset, acc, u, v, probe, wins, kind, ga, gb,
              swap=False, with_f=with_f, cscale=lambda n: one)
    _lhs_half(preset, acc, v, u, probe, wins, kind, gb, ga,
              swap=True, with_f=with_f,
              cscale=lambda k: _cmul(cfac, Cyclotomic.rational(
                  Q(-1) ** (k + 1))))


def _twist_conjugate(preset, ga, r):
    """The group element comparing a label with its r-step twist."""
    hat = preset.hat
    a = hat.elem(tuple(ga))
    return hat.mul(hat.nu_hat(hat.inverse(a, TWISTED), r), a, TWISTED)


def _rhs_kernel(preset, ga, gb, r, dg, w1, kmax, a_r, use_g, use_scalars):
    """Merged scalar kernel of one twist step of the iterated side.

    Combines the fractional delta expansion, the monomial exponent dg,
    the binomial slicing of the shifted first variable, the optional
    regularized pair kernel at shifted arguments, and the optional
    scalar corrections.  Returns (hom, {(k0, k1): coeff}) where k0 is
    the shift added to the inner exponent, k1 the final second-variable
    exponent, and the third-variable shift is hom - k0 - k1.
    """
    key = ("rhsk", ga, gb, r, dg, w1, kmax, use_g, use_scalars)
    hit = preset._memo.get(key)
    if hit is not None:
        return hit
    system = preset.system
    p = system.p
    lo1, hi1 = w1
    scal = Cyclotomic.rational(Q(1, p))
    if use_scalars:
        lam = tuple(x - y for x, y in zip(ga, system.nu_lattice(ga, r)))
        scal = _cmul(scal, _root(system.q, system.c0_nu(lam, tuple(gb))))
        scal = _cmul(scal, tau(system.nu_lattice(ga, r), gb,
                               system).as_cyclotomic())
    if use_g:
        gexps = _factor_exponents(system, system.nu_lattice(ga, r), gb, False)
        gbase, gterms = _shifted_kernel(system, gexps, int(math.floor(kmax)))
        gpairs = [(Q(n), c) for n, c in gterms.items()]
    else:
        gbase = Q(0)
        gpairs = [(Q(0), Cyclotomic.rational(1))]
    kern = {}
    mlo = math.ceil(p * (lo1 - dg))
    mhi = math.floor(p * (hi1 - dg + kmax))
    for m in range(mlo, mhi + 1):
        e = Q(m, p) + dg
        klo = max(0, math.ceil(e - hi1))
        khi = min(math.floor(e - lo1), math.floor(kmax))
        if khi < klo:
            continue
        ph = _cmul(scal, _root(p, r * m))
        for k in range(klo, khi + 1):
            cb = _cmul(ph, Cyclotomic.rational(binomial(e, k) * Q(-1) ** k))
            k1 = e - k
            for g0, cg in gpairs:
                _kadd(kern, (g0 - a_r + k, k1), _cmul(cb, cg))
    hit = (gbase - a_r - 1, kern)
    preset._memo[key] = hit
    return hit


def _rhs_sum(preset, acc, u, v, probe, wins, use_g, use_scalars,
             use_kelt, use_xpow):
    """Iterated-operator side: the twist-average of nested series.

    Twist step r feeds the plain series of the r-rotated operator state
    into the twisted series at the second position; the flags switch on
    the regularized kernel at shifted arguments, the scalar
    corrections, the twist-comparison group element on the probe, and
    the fractional monomial driven by the probe grade.
    """
    system = preset.system
    p = system.p
    (lo0, hi0), w1, (lo2, hi2) = wins
    total_hi = hi0 + w1[1] + hi2
    need_ga = use_g or use_scalars or use_kelt or use_xpow
    ga = _group_coords(u) if need_ga else None
    gb = _group_coords(v) if (use_g or use_scalars) else None
    if use_xpow:
        _ap, ap0, extra = _momentum(system, ga)
    if use_g:
        bperp = system.project(system.embed(gb), "perp")
    for r in range(p):
        ur = preset.untwisted.nu_state(u, r)
        if use_g:
            arv = system.project(
                system.embed(system.nu_lattice(ga, r)), "perp")
            a_r = system.form_q(arv, bperp)
        else:
            a_r = Q(0)
        inner = _series_map(preset, "star", ur, v, hi0 + a_r)
        if not inner:
            continue
        kmax = hi0 + a_r - min(inner)
        if kmax < 0:
            continue
        kelt = _twist_conjugate(preset, ga, r) if (use_kelt and r) else None
        for bvp, cp in probe.terms.items():
            if use_xpow:
                dg = system.form_q(
                    ap0, preset.twisted.sector.grade(bvp.sector)) + extra
            else:
                dg = Q(0)
            hom, kern = _rhs_kernel(preset, ga, gb, r, dg, w1, kmax, a_r,
                                    use_g, use_scalars)
            if not kern:
                continue
            tgt = StateVector.of(bvp, cp)
            if kelt is not None:
                tgt = preset.twisted.group_act(kelt, tgt)
            joint = {}
            for e0i in sorted(inner):
                cap2 = total_hi - hom - e0i
                for bvi, ci in inner[e0i].terms.items():
                    for bvt, ct in tgt.terms.items():
                        c = _cmul(ci, ct)
                        for e2i, sv in _pair_series(preset, "nu", bvi, bvt,
                                                    cap2).items():
                            if e2i <= cap2:
                                _acc(joint, (e0i, e2i), sv, c)
            for (e0i, e2i), sv in _finalize(joint).items():
                for (k0, k1), ck in kern.items():
                    e0 = e0i + k0
                    if not lo0 <= e0 <= hi0:
                        continue
                    e2 = e2i + hom - k0 - k1
                    if not lo2 <= e2 <= hi2:
                        continue
                    _acc(acc, (e0, k1, e2), sv, ck)


def _probe_weight(preset, probe):
    bv = next(iter(probe.terms))
    space = preset.twisted if hasattr(bv, "sector") else preset.untwisted
    return space.weight_of(probe)


def _jacobi_budget(preset, u, v, probe, wins, slack):
    wtu = preset.untwisted.weight_of(u)
    wtv = preset.untwisted.weight_of(v)
    wtp = _probe_weight(preset, probe)
    total = sum(hi for _, hi in wins)
    _require_weight(preset, wtu + wtv + wtp + total + 1 + max(Q(0), slack))


def _jacobi_dens(preset, probe, extra=()):
    dens = [1, preset.system.p, preset.system.p]
    for x in extra:
        for i in range(3):
            dens[i] = math.lcm(dens[i], Q(x).denominator)
    return dens


def _observed_dens(dens, lhs, rhs):
    for key in set(lhs) | set(rhs):
        for i in range(3):
            dens[i] = math.lcm(dens[i], key[i].denominator)
    return dens


def _commutator_entries(lhs, rhs, wins, powers):
    """Slice views of the assembled sides, one per integral power."""
    mismatches = []
    checked = 0
    lo0, hi0 = wins[0]
    for n in powers:
        e0 = Q(-n - 1)
        if not lo0 <= e0 <= hi0:
            raise WindowError(f"commutator power {n} leaves the window")
        keys = {k for k in set(lhs) | set(rhs) if k[0] == e0}
        for k in sorted(keys):
            a = lhs.get(k, StateVector.zero())
            b = rhs.get(k, StateVector.zero())
            checked += 1
            if a != b:
                mismatches.append((("comm", n, k[1], k[2]), a, b))
    return checked, mismatches


def jacobi_twisted_check(u, v, probe, window, preset, commutator_powers=None):
    """Three-variable position identity with pair kernels and twist sum.

    Both sides act on the twisted probe over the boxed window and the
    exact coefficients are compared; the optional commutator powers
    re-read the assembled sides slice by slice.
    """
    wins = _window3(window)
    system = preset.system
    ga = _group_coords(u)
    gb = _group_coords(v)
    _ap, ap0, extra = _momentum(system, ga)
    bperp = system.project(system.embed(gb), "perp")
    _jacobi_budget(preset, u, v, probe, wins, system.form_q(ap0, bperp))
    cnu = _root(system.q, system.c0_nu(tuple(ga), tuple(gb)))
    lhs_acc, rhs_acc = {}, {}
    _lhs_sides(preset, lhs_acc, u, v, probe, wins, "nu", True, cnu)
    _rhs_sum(preset, rhs_acc, u, v, probe, wins, True, True, True, True)
    lhs = _finalize(lhs_acc)
    rhs = _finalize(rhs_acc)
    mismatches = _diff(lhs, rhs)
    grades = [system.form_q(ap0, preset.twisted.sector.grade(bv.sector))
              + extra for bv in probe.terms]
    dens = _observed_dens(_jacobi_dens(preset, probe, grades), lhs, rhs)
    checked = _grid_count(wins, dens)
    if commutator_powers:
        extra_c, extra_m = _commutator_entries(lhs, rhs, wins,
                                               commutator_powers)
        checked += extra_c
        mismatches.extend(extra_m)
    return _report("jacobi-twisted", preset.ident, _state_label(probe),
                   wins, checked, mismatches)


def _flm_reduction_checks(preset, ga, gb, mismatches, nmax=4):
    """The two exact reductions behind the kernel-free form.

    For each twist step r: the central exponent attached to the twist
    difference of the first vector must match the orbit-sum pairing,
    and the regularized kernel at shifted arguments must reduce to the
    inverted kernel after shifting by the step pairing.
    """
    system = preset.system
    p = system.p
    checked = 0
    orbit = [0] * system.rank
    for s in range(p):
        img = system.nu_lattice(ga, s)
        orbit = [x + y for x, y in zip(orbit, img)]
    orbit_h = system.embed(tuple(orbit))
    for r in range(p):
        lam = tuple(x - y for x, y in zip(ga, system.nu_lattice(ga, r)))
        lhs = _root(system.q, system.c0_nu(lam, tuple(gb)))
        val = Q(r) * system.form_q(orbit_h, system.embed(gb))
        checked += 1
        if val.denominator != 1:
            mismatches.append((("central", r), lhs, val))
        else:
            rhs = _root(p, as_int(val) % p)
            if not (lhs - rhs).is_zero():
                mismatches.append((("central", r), lhs, rhs))
        gar = system.nu_lattice(ga, r)
        fexps = _factor_exponents(system, gar, gb, True)
        gexps = _factor_exponents(system, gar, gb, False)
        if any(Q(c).denominator != 1 for c in fexps):
            continue
        a_r = as_int(-Q(fexps[0]))
        fbase, fterms = _shifted_kernel(system, fexps, nmax)
        gbase, gterms = _shifted_kernel(system, gexps, nmax + a_r)
        checked += 1
        if fbase != gbase - a_r:
            mismatches.append((("reduction-base", r), fbase, gbase - a_r))
        zero = Cyclotomic.rational(0)
        exps = set(fterms) | {n - a_r for n in gterms}
        for n in sorted(exps):
            if n > nmax:
                continue
            a = fterms.get(n, zero)
            b = gterms.get(n + a_r, zero)
            checked += 1
            if not (a - b).is_zero():
                mismatches.append((("reduction", r, n), a, b))
    return checked


def jacobi_flm_check(u, v, probe, window, preset):
    """Kernel-free twisted position identity with the plain twist sum.

    No pair kernels and no scalar corrections: the two operator
    orderings against the bare twist-average of iterated series.  When
    both operator states carry a single group component, the two exact
    reductions that remove the kernels are checked as well.
    """
    wins = _window3(window)
    _jacobi_budget(preset, u, v, probe, wins, Q(0))
    lhs_acc, rhs_acc = {}, {}
    _lhs_sides(preset, lhs_acc, u, v, probe, wins, "nu", False, None)
    _rhs_sum(preset, rhs_acc, u, v, probe, wins, False, False, False, False)
    lhs = _finalize(lhs_acc)
    rhs = _finalize(rhs_acc)
    mismatches = _diff(lhs, rhs)
    dens = _observed_dens(_jacobi_dens(preset, probe), lhs, rhs)
    checked = _grid_count(wins, dens)
    try:
        single = (_group_coords(u), _group_coords(v))
    except ValueError:
        single = None
    if single is not None:
        checked += _flm_reduction_checks(preset, single[0], single[1],
                                         mismatches)
    return _report("jacobi-flm", preset.ident, _state_label(probe),
                   wins, checked, mismatches)


def jacobi_fpf_check(u, v, probe, window, preset):
    """Twist-sum identity retaining the comparison group element.

    Requires an odd prime twist order acting without nonzero fixed
    vectors and no distinguished subspace; the iterated side keeps the
    twist-comparison element acting on the probe.
    """
    system = preset.system
    p = system.p
    if p < 3 or any(p % d == 0 for d in range(2, p)):
        raise ValueError("need an odd prime twist order")
    if system.h_star_basis:
        raise ValueError("need a preset without a distinguished subspace")
    for i in range(system.rank):
        unit = tuple(1 if j == i else 0 for j in range(system.rank))
        if not system.eigencomponent(system.embed(unit), 0).is_zero():
            raise ValueError("the twist must have no nonzero fixed vectors")
    wins = _window3(window)
    _jacobi_budget(preset, u, v, probe, wins, Q(0))
    lhs_acc, rhs_acc = {}, {}
    _lhs_sides(preset, lhs_acc, u, v, probe, wins, "nu", False, None)
    _rhs_sum(preset, rhs_acc, u, v, probe, wins, False, False, True, False)
    lhs = _finalize(lhs_acc)
    rhs = _finalize(rhs_acc)
    mismatches = _diff(lhs, rhs)
    dens = _observed_dens(_jacobi_dens(preset, probe), lhs, rhs)
    checked = _grid_count(wins, dens)
    # the identity step must reproduce the plain summand shape: its
    # comparison element is the group identity and acts trivially
    ga = _group_coords(u)
    ident = _twist_conjugate(preset, ga, 0)
    got = preset.twisted.group_act(ident, probe)
    checked += 1
    if not (got - probe).is_zero():
        mismatches.append((("identity-step",), got, probe))
    return _report("jacobi-fpf", preset.ident, _state_label(probe),
                   wins, checked, mismatches)


def jacobi_untwisted_check(u, v, probe, window, preset):
    """Three-variable identity for the plain position series.

    Both sides act on an untwisted probe.  The first-variable powers
    ride the pairing of the two group components, and the iterated side
    carries the monomial driven by the probe's group pairing.
    """
    wins = _window3(window)
    (lo0, hi0), (lo1, hi1), (lo2, hi2) = wins
    system = preset.system
    if system.p != 1:
        raise ValueError("the untwisted identity needs an untwisted preset")
    ga = _group_coords(u)
    gb = _group_coords(v)
    wtu = preset.untwisted.weight_of(u)
    wtv = preset.untwisted.weight_of(v)
    wtp = preset.untwisted.weight_of(probe)
    total_hi = hi0 + hi1 + hi2
    _require_weight(preset, wtu + wtv + wtp + total_hi + 1)
    aperp = system.project(system.embed(ga), "perp")
    bperp = system.project(system.embed(gb), "perp")
    d = system.form_q(aperp, bperp)
    cab = _root(system.q, system.c0(tuple(ga), tuple(gb)))
    lhs_acc = {}
    inner2 = _series_map(preset, "star", v, probe, hi2)
    inner1 = _series_map(preset, "star", u, probe, hi1)
    for swap, inner, opo in ((False, inner2, u), (True, inner1, v)):
        if not inner:
            continue
        wi = (lo1, hi1) if swap else (lo2, hi2)
        wo = (lo2, hi2) if swap else (lo1, hi1)
        ymax = wi[1] - min(inner)
        joint = {}
        for ei in sorted(inner):
            cap = total_hi + 1 - ei
            for bvi, ci in inner[ei].terms.items():
                for bo, co in opo.terms.items():
                    c = _cmul(co, ci)
                    for eo, sv in _pair_series(preset, "star", bo, bvi,
                                               cap).items():
                        if eo <= cap:
                            _acc(joint, (eo, ei), sv, c)
        cells = _finalize(joint)
        e0 = d - 1 + math.ceil(lo0 - (d - 1))
        while e0 <= hi0:
            j = -1 - e0
            key = ("ujk", j, ymax)
            hit = preset._memo.get(key)
            if hit is None:
                fin = Q(j).denominator == 1 and j >= 0
                f = binom_expand("x", "y", j, ymax=None if fin else ymax)
                iy = f.index("y")
                hit = {}
                for kk, c in f.terms.items():
                    ey = Q(kk[iy], f.den[iy])
                    if ey <= ymax:
                        _kadd(hit, ey, c)
                preset._memo[key] = hit
            if swap:
                kint = as_int(d - 1 - e0)
                sc = _cmul(cab, Cyclotomic.rational(Q(-1) ** (kint + 1)))
            else:
                sc = Cyclotomic.rational(1)
            for (eo, ei), sv in cells.items():
                for ky, ck in hit.items():
                    eif = ei + ky
                    if not wi[0] <= eif <= wi[1]:
                        continue
                    eof = eo + j - ky
                    if not wo[0] <= eof <= wo[1]:
                        continue
                    key3 = (e0, eif, eof) if swap else (e0, eof, eif)
                    _acc(lhs_acc, key3, sv, _cmul(sc, ck))
            e0 += 1
    rhs_acc = {}
    inner = _series_map(preset, "star", u, v, hi0)
    if inner:
        kmax = hi0 - min(inner)
        for bvp, cp in probe.terms.items():
            dg = system.form_q(aperp, system.embed(bvp.group))
            key = ("ujrk", dg, (lo1, hi1), kmax)
            hit = preset._memo.get(key)
            if hit is None:
                hit = {}
                mlo = math.ceil(lo1 - dg)
                mhi = math.floor(hi1 - dg + kmax)
                for m in range(mlo, mhi + 1):
                    e = m + dg
                    klo = max(0, math.ceil(e - hi1))
                    khi = min(math.floor(e - lo1), math.floor(kmax))
                    for k in range(klo, khi + 1):
                        _kadd(hit, (Q(k), e - k), Cyclotomic.rational(
                            binomial(e, k) * Q(-1) ** k))
                preset._memo[key] = hit
            joint = {}
            for e0i in sorted(inner):
                cap2 = total_hi + 1 - e0i
                for bvi, ci in inner[e0i].terms.items():
                    c = _cmul(ci, cp)
                    for e2i, sv in _pair_series(preset, "star", bvi, bvp,
                                                cap2).items():
                        if e2i <= cap2:
                            _acc(joint, (e0i, e2i), sv, c)
            for (e0i, e2i), sv in _finalize(joint).items():
                for (k0, k1), ck in hit.items():
                    e0 = e0i + k0
                    if not lo0 <= e0 <= hi0:
                        continue
                    e2 = e2i - k0 - k1 - 1
                    if not lo2 <= e2 <= hi2:
                        continue
                    _acc(rhs_acc, (e0, k1, e2), sv, ck)
    lhs = _finalize(lhs_acc)
    rhs = _finalize(rhs_acc)
    mismatches = _diff(lhs, rhs)
    grades = [system.form_q(aperp, system.embed(bv.group))
              for bv in probe.terms]
    dens = _observed_dens(_jacobi_dens(preset, probe, [d] + list(grades)),
                          lhs, rhs)
    checked = _grid_count(wins, dens)
    return _report("jacobi-untwisted", preset.ident, _state_label(probe),
                   wins, checked, mismatches)


# -- virasoro suite ----------------------------------------------------------


class _ModeTable:
    """Cached integral modes of a quadratic operator state."""

    def __init__(self, preset, state, hi=Q(2)):
        self.preset = preset
        self.state = state
        self.hi = Q(hi)
        self.cache = {}

    def _table(self, bv):
        hit = self.cache.get(bv)
        if hit is None:
            hit = {}
            for bo, co in self.state.terms.items():
                for e, sv in _pair_series(self.preset, "nu", bo, bv,
                                          self.hi).items():
                    if e <= self.hi:
                        _acc(hit, e, sv, co)
            hit = _finalize(hit)
            self.cache[bv] = hit
        return hit

    def mode(self, n, sv):
        """Quadratic mode n (the coefficient at exponent -n-2) on sv."""
        key = Q(-n - 2)
        out = {}
        for bv, c in sv.terms.items():
            comp = self._table(bv).get(key)
            if comp is not None:
                _acc(out, 0, comp, c)
        return _finalize(out).get(0, StateVector.zero())


def virasoro_suite(preset, window):
    """Quadratic-mode structure over the twisted space.

    Checks the bracket with its cubic central term, the commutator with
    the linear modes, the action of the quadratic state on itself, the
    translation property of the twisted series, and the commutator
    shape on lowest-weight operator states.
    """
    lo, hi = _window1(window)
    _require_weight(preset, 7)
    system = preset.system
    tw = preset.twisted
    om = conformal_state(preset)
    charge = Q(len(orthogonal_basis(system)))
    ltab = _ModeTable(preset, om)
    mismatches = []
    checked = 0
    box = preset.box
    basis3 = tw.basis(3, box=box)
    basis2 = tw.basis(2, box=box)
    # bracket with the cubic central term
    for m in range(-2, 3):
        for n in range(-2, 3):
            for i, bv in enumerate(basis3):
                w = StateVector.of(bv)
                lhs = ltab.mode(m, ltab.mode(n, w)) - \
                    ltab.mode(n, ltab.mode(m, w))
                rhs = ltab.mode(m + n, w).scale(Q(m - n))
                if m + n == 0:
                    rhs = rhs + w.scale(Q(m ** 3 - m, 12) * charge)
                checked += 1
                if not (lhs - rhs).is_zero():
                    mismatches.append((("bracket", m, n, i), lhs, rhs))
    # commutator with the linear modes, one eigenvalue class at a time
    for k in range(system.p):
        for bi, beta in enumerate(system.eigenspace_basis(k, sub="perp")):
            step = Q(k, system.p)
            nn = step + math.ceil(-Q(3, 2) - step)
            nmodes = []
            while nn <= Q(3, 2):
                nmodes.append(nn)
                nn += 1
            for m in range(-2, 3):
                for nm in nmodes:
                    for i, bv in enumerate(basis2):
                        w = StateVector.of(bv)
                        lhs = ltab.mode(m, tw.osc_act(beta, nm, w)) - \
                            tw.osc_act(beta, nm, ltab.mode(m, w))
                        rhs = tw.osc_act(beta, m + nm, w).scale(-nm)
                        checked += 1
                        if not (lhs - rhs).is_zero():
                            mismatches.append(
                                (("linear", k, bi, m, nm, i), lhs, rhs))
    # action of the quadratic state on itself
    smap = dict(_series_terms(y_star_apply(om, om, (-INF, Q(0)),
                                           preset.untwisted)))
    vac = preset.untwisted.vacuum()
    expect = {
        Q(-2): om.scale(2),
        Q(-3): StateVector.zero(),
        Q(-4): vac.scale(charge / 2),
    }
    for e in sorted(set(smap) | set(expect)):
        got = smap.get(e, StateVector.zero())
        want = expect.get(e, StateVector.zero())
        checked += 1
        if not (got - want).is_zero():
            mismatches.append((("self-action", e), got, want))
    # translation property of the twisted series
    for v in preset.untwisted.basis(2, box=box):
        vsv = StateVector.of(v)
        fv = y_star_apply(om, vsv, (-INF, Q(0)), preset.untwisted)
        lv = dict(_series_terms(fv)).get(Q(-1), StateVector.zero())
        for bv in basis2:
            w = StateVector.of(bv)
            amap = _series_map(preset, "nu", vsv, w, hi)
            bmap = _series_map(preset, "nu", lv, w, hi - 1) if not \
                lv.is_zero() else {}
            exps = set(amap) | {e + 1 for e in bmap}
            for e in sorted(exps):
                if not (lo <= e <= hi):
                    continue
                da = amap.get(e, StateVector.zero()).scale(e)
                db = bmap.get(e - 1, StateVector.zero())
                checked += 1
                if not (da - db).is_zero():
                    mismatches.append((("translation", str(v.skey()),
                                        str(bv.skey()), e), db, da))
    # commutator shape on lowest-weight operator states
    unit = tuple(1 if j == 0 else 0 for j in range(system.rank))
    iv = elem_state(preset.hat.elem(unit), preset.untwisted)
    aperp = system.project(system.embed(unit), "perp")
    pairs = [(iv, system.form_q(aperp, aperp) / 2)]
    blist = orthogonal_basis(system)
    if blist:
        pairs.append((preset.untwisted.osc_act(blist[0][0], -1, vac), Q(1)))
    for vi, (vst, h) in enumerate(pairs):
        for m in range(-2, 3):
            for wi, bv in enumerate(basis2):
                w = StateVector.of(bv)
                amap = _series_map(preset, "nu", vst, w, hi)
                bmap = _series_map(preset, "nu", vst, ltab.mode(m, w), hi)
                cap = hi + min(m, 0)
                exps = {e for e in set(amap) | set(bmap) if e <= cap}
                exps |= {e + m for e in amap if e + m <= cap}
                for e in sorted(exps):
                    if e < lo:
                        continue
                    lhs = ltab.mode(m, amap.get(e, StateVector.zero())) - \
                        bmap.get(e, StateVector.zero())
                    rhs = amap.get(e - m, StateVector.zero()).scale(
                        e - m + h * (m + 1))
                    checked += 1
                    if not (lhs - rhs).is_zero():
                        mismatches.append((("lowest", vi, m, wi, e),
                                           lhs, rhs))
    return _report("virasoro", preset.ident, "weight<=3 truncation",
                   ((lo, hi),), checked, mismatches)


# -- axiom suite -------------------------------------------------------------


def axiom_suite(preset, window):
    """Structural axioms of the operator assignment on both spaces.

    Vacuum operator, creation, exponent truncation, the twist
    automorphism property, eigenvector decomposition, mode support per
    eigenvalue class, grading by the quadratic zero mode, the
    translation property, the order of the iterated twist, and the
    kernel-free position identity on eigenvector inputs.
    """
    if preset.system.h_star_basis:
        raise ValueError("the axiom suite needs a preset without a "
                         "distinguished subspace")
    lo, hi = _window1(window)
    _require_weight(preset, Q(4) + max(hi, Q(0)))
    system = preset.system
    p = system.p
    tw = preset.twisted
    un = preset.untwisted
    box = preset.box
    mismatches = []
    checked = 0
    vac = un.vacuum()
    ubasis = un.basis(2, box=box)
    tbasis = tw.basis(2, box=box)
    # the vacuum operator is the identity on both spaces
    for bv in tbasis:
        w = StateVector.of(bv)
        amap = _series_map(preset, "nu", vac, w, hi)
        for e in sorted(set(amap) | {Q(0)}):
            want = w if e == 0 else StateVector.zero()
            got = amap.get(e, StateVector.zero())
            checked += 1
            if not (got - want).is_zero():
                mismatches.append((("vacuum-op-tw", str(bv.skey()), e),
                                   got, want))
    for bv in ubasis[:6]:
        w = StateVector.of(bv)
        amap = _series_map(preset, "star", vac, w, hi)
        for e in sorted(set(amap) | {Q(0)}):
            want = w if e == 0 else StateVector.zero()
            got = amap.get(e, StateVector.zero())
            checked += 1
            if not (got - want).is_zero():
                mismatches.append((("vacuum-op-un", str(bv.skey()), e),
                                   got, want))
    # creation from the vacuum
    for bv in ubasis:
        v = StateVector.of(bv)
        amap = _series_map(preset, "star", v, vac, max(hi, Q(1)))
        low = [e for e in amap if e < 0]
        got0 = amap.get(Q(0), StateVector.zero())
        checked += 1
        if low or not (got0 - v).is_zero():
            mismatches.append((("creation", str(bv.skey())), got0, v))
    # exponent floor from the grading
    for bv in ubasis[:4]:
        v = StateVector.of(bv)
        wtv = un.weight_of(v)
        for tb in tbasis[:4]:
            w = StateVector.of(tb)
            amap = _series_map(preset, "nu", v, w, hi)
            floor = -(wtv + tw.weight_of(w))
            bad = [e for e in amap if e < floor]
            checked += 1
            if bad:
                mismatches.append((("truncation", str(bv.skey()),
                                    str(tb.skey())), min(bad), floor))
    # twist automorphism property of the twisted series
    for bv in ubasis:
        v = StateVector.of(bv)
        vrot = un.nu_state(v, 1)
        for tb in tbasis[:4]:
            w = StateVector.of(tb)
            wback = tw.nu_state(w, p - 1) if p > 1 else w
            amap = _series_map(preset, "nu", v, wback, hi)
            bmap = _series_map(preset, "nu", vrot, w, hi)
            for e in sorted(set(amap) | set(bmap)):
                got = tw.nu_state(amap.get(e, StateVector.zero()), 1)
                want = bmap.get(e, StateVector.zero())
                checked += 1
                if not (got - want).is_zero():
                    mismatches.append((("automorphism", str(bv.skey()),
                                        str(tb.skey()), e), got, want))
    # eigenvector decomposition and per-class mode support
    tvac = tw.vacuum()
    for bv in ubasis:
        v = StateVector.of(bv)
        parts = []
        for j in range(p):
            part = StateVector.zero()
            for r in range(p):
                part = part + un.nu_state(v, r).scale(_root(p, (-r * j) % p))
            parts.append(part)
        total = StateVector.zero()
        for part in parts:
            total = total + part
        checked += 1
        if not (total - v.scale(p)).is_zero():
            mismatches.append((("decomposition", str(bv.skey())),
                               total, v.scale(p)))
        for j, part in enumerate(parts):
            rot = un.nu_state(part, 1)
            want = part.scale(_root(p, j))
            checked += 1
            if not (rot - want).is_zero():
                mismatches.append((("eigenvector", str(bv.skey()), j),
                                   rot, want))
            if part.is_zero():
                continue
            amap = _series_map(preset, "nu", part, tvac, hi)
            bad = [e for e in amap if (as_int(e * p) + j) % p != 0]
            checked += 1
            if bad:
                mismatches.append((("mode-support", str(bv.skey()), j),
                                   sorted(bad)[0], Q(-j, p)))
    # grading by the quadratic zero mode on both spaces
    om = conformal_state(preset)
    for tb in tbasis:
        w = StateVector.of(tb)
        got = _series_map(preset, "nu", om, w, Q(0)).get(
            Q(-2), StateVector.zero())
        want = w.scale(tw.wt(tb))
        checked += 1
        if not (got - want).is_zero():
            mismatches.append((("grading-tw", str(tb.skey())), got, want))
    for bv in ubasis:
        v = StateVector.of(bv)
        got = _series_map(preset, "star", om, v, Q(0)).get(
            Q(-2), StateVector.zero())
        want = v.scale(un.wt(bv))
        checked += 1
        if not (got - want).is_zero():
            mismatches.append((("grading-un", str(bv.skey())), got, want))
    # translation property of the plain series
    for bv in ubasis[:4]:
        v = StateVector.of(bv)
        fv = y_star_apply(om, v, (-INF, Q(0)), un)
        lv = dict(_series_terms(fv)).get(Q(-1), StateVector.zero())
        for tb in ubasis[:4]:
            w = StateVector.of(tb)
            amap = _series_map(preset, "star", v, w, hi)
            bmap = _series_map(preset, "star", lv, w, hi - 1) if not \
                lv.is_zero() else {}
            exps = set(amap) | {e + 1 for e in bmap}
            for e in sorted(exps):
                if not (lo <= e <= hi):
                    continue
                da = amap.get(e, StateVector.zero()).scale(e)
                db = bmap.get(e - 1, StateVector.zero())
                checked += 1
                if not (da - db).is_zero():
                    mismatches.append((("translation-un", str(bv.skey()),
                                        str(tb.skey()), e), db, da))
    # the iterated twist has the stated order on the twisted space
    for tb in tbasis:
        w = StateVector.of(tb)
        cur = w
        for _ in range(p):
            cur = tw.nu_state(cur, 1)
        checked += 1
        if not (cur - w).is_zero():
            mismatches.append((("twist-order", str(tb.skey())), cur, w))
    # kernel-free position identity on eigenvector operator inputs
    unit = tuple(1 if j == 0 else 0 for j in range(system.rank))
    base_u = elem_state(preset.hat.elem(unit), un)
    vv = elem_state(preset.hat.elem(unit), un)
    for j in range(p):
        uj = StateVector.zero()
        for r in range(p):
            uj = uj + un.nu_state(base_u, r).scale(_root(p, (-r * j) % p))
        if uj.is_zero():
            continue
        rep = jacobi_flm_check(uj, vv, tvac, ((lo, hi),) * 3, preset)
        checked += rep.coefficients_checked
        for key, a, b in rep.mismatches:
            tail = key if isinstance(key, tuple) else (key,)
            mismatches.append((("jacobi", j) + tail, a, b))
    return _report("axioms", preset.ident, "weight<=2 truncation",
                   ((lo, hi),), checked, mismatches)
