"""Relative untwisted vertex operators on the lattice Fock space.

An operator state acts on a target state and yields a formal series in
one variable whose coefficients are states.  A pure group element
contributes three blocks: an exponential of creation modes, the group
translation, and an exponential of annihilation modes next to a
diagonal power of the variable that pairs the projected momentum with
the target's momentum.  Creation modes and the translation stand to the
left, annihilation and zero modes to the right.  Oscillator entries of
the operator state dress this with derivative currents of their
direction vectors, each split across the same two blocks; an operator
state carrying an oscillator along the distinguished subspace acts as
zero.

Truncation policy: a returned series is complete at every exponent up
to the window ceiling, so its frame window reaches down to -inf.
Creation sums are cut at the ceiling (sound because later stages only
raise the exponent), and states past the space's weight cap are dropped
and counted on ``space.clipped_terms``; check reports carry the clip
delta so exactness can be asserted.
"""

from .scalar import Q, Cyclotomic
from .formal import (INF, FormalSeries, WindowError, binom_expand, binomial,
                     compare, series_mul)
from .gext import UNTWISTED
from .state import StateVector, UntwistedBasisVector

__all__ = [
    "elem_state", "y_star_apply", "y_star_product_check",
    "heisenberg_commute_check",
]


def _floor(x):
    x = Q(x)
    return int(x.numerator // x.denominator)


def _norm_window(window):
    lo, hi = window
    if hi == INF:
        raise WindowError("creation modes need a finite window ceiling")
    hi = Q(hi)
    if lo != -INF:
        lo = Q(lo)
        if lo > hi:
            raise WindowError("empty window")
    return lo, hi


def _bump(key, axis, d):
    return key[:axis] + (key[axis] + d,) + key[axis + 1:]


def _smadd(smap, key, sv):
    cur = smap.get(key)
    acc = sv if cur is None else cur + sv
    if acc.is_zero():
        smap.pop(key, None)
    else:
        smap[key] = acc


def _ann_bound(sv):
    b = 0
    for bv in sv.terms:
        for _lab, mode in bv.osc:
            if -mode > b:
                b = int(-mode)
    return b


# -- pipeline stages ---------------------------------------------------------
#
# A "seriesmap" is {exponent-key-tuple: StateVector}; stages transform one
# into the next, touching a single exponent axis.


def _zpow(space, hvec, smap, axis):
    sys_ = space.system
    out = {}
    for key, sv in smap.items():
        for bv, c in sv.terms.items():
            sh = sys_.form_q(hvec, sys_.embed(bv.group))
            _smadd(out, _bump(key, axis, sh), StateVector(((bv, c),)))
    return out


def _exp_ann(space, hvec, smap, axis):
    if hvec.is_zero():
        return dict(smap)
    total = dict(smap)
    layer = smap
    k = 0
    while layer:
        k += 1
        nxt = {}
        for key, sv in layer.items():
            for m in range(1, _ann_bound(sv) + 1):
                hit = space.osc_act(hvec, m, sv)
                if not hit.is_zero():
                    _smadd(nxt, _bump(key, axis, -m), Q(-1, m * k) * hit)
        layer = nxt
        for key, sv in layer.items():
            _smadd(total, key, sv)
    return total


def _exp_cre(space, hvec, smap, zcap, axis):
    if hvec.is_zero():
        return dict(smap)
    total = dict(smap)
    layer = smap
    k = 0
    while layer:
        k += 1
        nxt = {}
        for key, sv in layer.items():
            tmax = _floor(zcap - key[axis])
            for t in range(1, tmax + 1):
                hit = space.osc_act(hvec, -t, sv)
                if not hit.is_zero():
                    _smadd(nxt, _bump(key, axis, t), Q(1, t * k) * hit)
        layer = nxt
        for key, sv in layer.items():
            _smadd(total, key, sv)
    return total


def _dress_ann(space, beta, n, smap, axis):
    out = {}
    for key, sv in smap.items():
        for m in range(0, _ann_bound(sv) + 1):
            hit = space.osc_act(beta, m, sv)
            if hit.is_zero():
                continue
            _smadd(out, _bump(key, axis, -m - n),
                   binomial(Q(-m - 1), n - 1) * hit)
    return out


def _dress_cre(space, beta, n, smap, zcap, axis):
    out = {}
    for key, sv in smap.items():
        # binomial(t-1, n-1) vanishes below t = n
        tmax = _floor(zcap - key[axis]) + n
        for t in range(n, tmax + 1):
            hit = space.osc_act(beta, -t, sv)
            if hit.is_zero():
                continue
            _smadd(out, _bump(key, axis, t - n),
                   binomial(Q(t - 1), n - 1) * hit)
    return out


def _group(space, a, smap):
    return {key: space.group_act(a, sv) for key, sv in smap.items()}


def _one_term(space, bv, w, zcap):
    """Action of a single operator basis monomial, as a seriesmap."""
    sys_ = space.system
    if any(lab[0] == "s" for lab, _m in bv.osc):
        return {}
    a = space.hat.elem(bv.group, 0)
    aprime = sys_.project(sys_.embed(bv.group), "perp")
    dress = [(space.label_vector(lab), int(-m)) for lab, m in bv.osc]
    smap = _zpow(space, aprime, {(Q(0),): w}, 0)
    smap = _exp_ann(space, aprime, smap, 0)
    variants = [(smap, ())]
    for beta, n in dress:
        variants = [pair
                    for prior, pend in variants
                    for pair in ((_dress_ann(space, beta, n, prior, 0), pend),
                                 (prior, pend + ((beta, n),)))]
    out = {}
    for prior, pend in variants:
        cur = _group(space, a, prior)
        cur = _exp_cre(space, aprime, cur, zcap, 0)
        for beta, n in pend:
            cur = _dress_cre(space, beta, n, cur, zcap, 0)
        for key, sv in cur.items():
            _smadd(out, key, sv)
    return out


# -- public operators --------------------------------------------------------


def elem_state(a, space):
    """The state of a single extension element, phase folded in."""
    k = a.kpow % space.q
    phase = Cyclotomic.root(space.q, k) if k else 1
    return StateVector.of(UntwistedBasisVector((), a.base), phase)


def _series_terms(f):
    d = f.den[0]
    for key, sv in f.terms.items():
        yield Q(key[0], d), sv


def _build1(smap, cap):
    if smap:
        smin = min(k[0] for k in smap)
    else:
        smin = cap
    return FormalSeries.build(("z",), smap, window={"z": (-INF, cap)},
                              support={"z": (smin, INF)})


def _build2(smap, cap1, cap2):
    m1 = min((k[0] for k in smap), default=cap1)
    m2 = min((k[1] for k in smap), default=cap2)
    return FormalSeries.build(("z1", "z2"), smap,
                              window={"z1": (-INF, cap1),
                                      "z2": (-INF, cap2)},
                              support={"z1": (m1, INF), "z2": (m2, INF)})


def y_star_apply(v, w, window, space):
    """Formal series of the operator of v applied to w.

    ``window`` is an (lo, hi) exponent pair with finite ceiling.  The
    result is complete at every exponent <= hi; the floor only marks
    the region a caller intends to read.
    """
    _lo, hi = _norm_window(window)
    total = {}
    for bv, c in v.terms.items():
        for key, sv in _one_term(space, bv, w, hi).items():
            _smadd(total, key, c * sv)
    return _build1(total, hi)


def _map_series(f, fn):
    terms = {}
    for key, sv in f.terms.items():
        out = fn(sv)
        if not out.is_zero():
            terms[key] = out
    return FormalSeries(f.vars, f.den, terms, f.window, f.support)


def y_star_product_check(a, b, window, space, probe=None):
    """Iterated application of two group-element operators against the
    normal-ordered product times the binomial power of the variable
    difference, compared coefficientwise on the window."""
    lo, hi = _norm_window(window)
    sys_ = space.system
    if probe is None:
        probe = space.vacuum()
    clip0 = space.clipped_terms
    aprime = sys_.project(sys_.embed(a.base), "perp")
    bprime = sys_.project(sys_.embed(b.base), "perp")
    cpow = sys_.form_q(aprime, bprime)
    if cpow.denominator != 1:
        raise ValueError("projected pairing must be an integer exponent")
    cpow = int(cpow)

    lmap = {}
    inner = y_star_apply(elem_state(b, space), probe, (lo, hi), space)
    for e2, sv in _series_terms(inner):
        outer = y_star_apply(elem_state(a, space), sv, (lo, hi), space)
        for e1, sv1 in _series_terms(outer):
            _smadd(lmap, (e1, e2), sv1)
    lhs = _build2(lmap, hi, hi)

    def normal(cap1):
        smap = _zpow(space, aprime, {(Q(0), Q(0)): probe}, 0)
        smap = _zpow(space, bprime, smap, 1)
        smap = _exp_ann(space, aprime, smap, 0)
        smap = _exp_ann(space, bprime, smap, 1)
        smap = _group(space, space.hat.mul(a, b, UNTWISTED), smap)
        smap = _exp_cre(space, aprime, smap, cap1, 0)
        return _exp_cre(space, bprime, smap, hi, 1)

    nmap = normal(hi)
    if cpow >= 0:
        kmax = cpow
    elif nmap:
        kmax = _floor(hi - min(k[1] for k in nmap))
    else:
        kmax = -1
    if kmax < 0:
        rhs = _build2({}, hi, hi)
    else:
        cap1 = hi - cpow + kmax
        if cap1 != hi:
            nmap = normal(cap1)
        kern = binom_expand("z1", "z2", cpow,
                            ymax=None if cpow >= 0 else kmax)
        if cpow < 0:
            # dropped kernel tail has second exponent > kmax, which lands
            # past the ceiling against every true term of the product
            kern = kern.as_exact()
        rhs = series_mul(_build2(nmap, cap1, hi), kern,
                         target={"z1": (lo, hi), "z2": (lo, hi)})

    checked, bad = compare(lhs, rhs,
                           window={"z1": (lo, hi), "z2": (lo, hi)})
    return {"identity": "normal-ordered product",
            "checked": checked, "mismatches": bad,
            "status": "pass" if checked and not bad else "fail",
            "clipped": space.clipped_terms - clip0}


def heisenberg_commute_check(v, w, window, space, modes=(-2, -1, 0, 1, 2)):
    """Modes along the distinguished subspace commute with the operator
    of v; conjugating the operator by the lifted isometry transports it
    to the operator of the transformed state."""
    lo, hi = _norm_window(window)
    clip0 = space.clipped_terms
    base = y_star_apply(v, w, (lo, hi), space)
    checked = 0
    bad = []
    for hvec in space.system.h_star_basis:
        for n in modes:
            left = _map_series(base, lambda sv: space.osc_act(hvec, n, sv))
            right = y_star_apply(v, space.osc_act(hvec, n, w),
                                 (lo, hi), space)
            got, miss = compare(left, right, window={"z": (lo, hi)})
            checked += got
            bad.extend(miss)

    p = space.system.p
    winv = space.nu_state(w, p - 1) if p > 1 else w
    if p > 1 and space.nu_state(winv) != w:
        raise ValueError("lifted isometry is not of order p on the target")
    left = _map_series(y_star_apply(v, winv, (lo, hi), space),
                       lambda sv: space.nu_state(sv))
    right = y_star_apply(space.nu_state(v), w, (lo, hi), space)
    got, miss = compare(left, right, window={"z": (lo, hi)})
    checked += got
    bad.extend(miss)
    return {"identity": "distinguished-mode and isometry commutation",
            "checked": checked, "mismatches": bad,
            "status": "pass" if checked and not bad else "fail",
            "clipped": space.clipped_terms - clip0}
