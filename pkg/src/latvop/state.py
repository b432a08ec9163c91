"""Graded state spaces underneath the vertex-operator machinery.

Two Fock-style spaces share one sparse container:

* ``UntwistedSpace`` -- integer-mode oscillators over the ambient
  rational span, tensored with the section basis of the central
  extension.  The grading is relative: oscillators along the
  distinguished subspace weigh nothing, and the group part weighs half
  the norm of its component orthogonal to that subspace.
* ``TwistedSpace`` -- fractional-mode oscillators over the eigenspaces
  of the isometry, tensored with a sector module produced by
  ``build_T``.  For a trivial isometry the sector is the whole group
  algebra and the twisted space is the untwisted one in disguise.

Basis monomials are immutable and hashable; linear data lives in
``StateVector`` dictionaries with exact cyclotomic (or, when radicals
enter, ``Scalar``) coefficients.  Creation operators that would raise a
state past a space's ``max_weight`` drop the offending term and bump
the space's ``clipped_terms`` counter, so callers can tell a truncated
answer from an exact one.
"""

import itertools
from math import isqrt

from .scalar import Q, Cyclotomic, Scalar, as_int
from .lattice import HVector, LatticeSystem, _mat_inverse, independent_subset
from .gext import HatElement, HatGroup, UNTWISTED, TWISTED

__all__ = [
    "StateVector", "UntwistedBasisVector", "TwistedBasisVector",
    "UntwistedSpace", "TwistedSpace", "TwistedSector", "GroupSector",
    "TableSector", "oscillator_act", "group_act", "nu_hat_state",
    "weight", "omega_split", "build_T",
]


def _cf(x):
    if isinstance(x, (Cyclotomic, Scalar)):
        return x
    return Cyclotomic.rational(x)


def _cadd(a, b):
    if isinstance(a, Scalar) or isinstance(b, Scalar):
        return Scalar.of(a) + Scalar.of(b)
    return a + b


def _cmul(a, b):
    if isinstance(a, Scalar) or isinstance(b, Scalar):
        return Scalar.of(a) * Scalar.of(b)
    return a * b


def _root(n, k):
    return Cyclotomic.root(n, k % n) if n > 1 else Cyclotomic.rational(1)


# -- basis monomials --------------------------------------------------------


class UntwistedBasisVector:
    """Oscillator monomial times a section basis element iota(a).

    ``osc`` is a sorted tuple of ``(label, mode)`` pairs with integer
    modes < 0; labels are ``("s", j)`` or ``("p", j)`` naming basis
    vectors of the distinguished subspace and its orthogonal
    complement.  ``group`` is the integer coordinate tuple of a.
    """

    __slots__ = ("osc", "group")

    def __init__(self, osc, group):
        object.__setattr__(self, "osc", tuple(sorted(osc)))
        object.__setattr__(self, "group", tuple(int(x) for x in group))

    def __setattr__(self, *a):
        raise AttributeError("basis vectors are immutable")

    def with_osc(self, label, mode):
        return UntwistedBasisVector(self.osc + ((label, mode),), self.group)

    def drop_osc(self, index):
        return UntwistedBasisVector(
            self.osc[:index] + self.osc[index + 1:], self.group)

    def skey(self):
        return (self.group, self.osc)

    def __eq__(self, other):
        return (isinstance(other, UntwistedBasisVector)
                and self.osc == other.osc and self.group == other.group)

    def __hash__(self):
        return hash((self.osc, self.group))

    def __repr__(self):
        parts = [f"{lab[0]}{lab[1]}({m})" for lab, m in self.osc]
        parts.append("i" + repr(tuple(self.group)).replace(" ", ""))
        return ".".join(parts)


class TwistedBasisVector:
    """Fractional-mode oscillator monomial times a sector basis label.

    Labels are ``("s", k, j)`` or ``("p", k, j)`` naming basis vectors
    of the eigenspace with eigenvalue exp(2 pi i k/p); the paired mode
    lies in k/p + Z and is < 0.
    """

    __slots__ = ("osc", "sector")

    def __init__(self, osc, sector):
        object.__setattr__(self, "osc", tuple(sorted(osc)))
        object.__setattr__(self, "sector", sector)

    def __setattr__(self, *a):
        raise AttributeError("basis vectors are immutable")

    def with_osc(self, label, mode):
        return TwistedBasisVector(self.osc + ((label, mode),), self.sector)

    def drop_osc(self, index):
        return TwistedBasisVector(
            self.osc[:index] + self.osc[index + 1:], self.sector)

    def skey(self):
        return (self.sector, self.osc)

    def __eq__(self, other):
        return (isinstance(other, TwistedBasisVector)
                and self.osc == other.osc and self.sector == other.sector)

    def __hash__(self):
        return hash((self.osc, self.sector))

    def __repr__(self):
        parts = [f"{lab[0]}{lab[1]}.{lab[2]}({m})" for lab, m in self.osc]
        parts.append(f"t[{self.sector}]")
        return ".".join(parts)


class StateVector:
    """Finitely supported linear combination of basis monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        data = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for bv, c in items:
            c = _cf(c)
            if c.is_zero():
                continue
            if bv in data:
                c = _cadd(data[bv], c)
                if c.is_zero():
                    del data[bv]
                    continue
            data[bv] = c
        object.__setattr__(self, "terms", data)

    def __setattr__(self, *a):
        raise AttributeError("state vectors are immutable")

    @staticmethod
    def of(bv, coeff=1):
        return StateVector(((bv, coeff),))

    @staticmethod
    def zero():
        return StateVector()

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        out = dict(self.terms)
        for bv, c in other.terms.items():
            if bv in out:
                s = _cadd(out[bv], c)
                if s.is_zero():
                    del out[bv]
                else:
                    out[bv] = s
            else:
                out[bv] = c
        sv = StateVector()
        object.__setattr__(sv, "terms", out)
        return sv

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _cf(c)
        if c.is_zero():
            return StateVector()
        out = {}
        for bv, v in self.terms.items():
            w = _cmul(c, v)
            if not w.is_zero():
                out[bv] = w
        sv = StateVector()
        object.__setattr__(sv, "terms", out)
        return sv

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, c):
        if isinstance(c, StateVector):
            return NotImplemented
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return (self - other).is_zero()

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0].skey()))

    def coefficient(self, bv):
        return self.terms.get(bv, Cyclotomic.rational(0))

    def map_basis(self, fn):
        """Linear extension of ``fn: basis vector -> StateVector``."""
        out = StateVector()
        for bv, c in self.terms.items():
            out = out + fn(bv).scale(c)
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = [f"({c!r})*{bv!r}" for bv, c in self]
        return " + ".join(bits)


# -- shared oscillator bookkeeping ------------------------------------------


def _dual_family(system, vecs, partner):
    """dual[j] with form(dual[j], vecs[i]) = delta_ij, built in the span
    of ``partner`` (the eigenspace pairing nondegenerately with vecs)."""
    d = len(vecs)
    if d == 0:
        return []
    M = [[system.form(partner[i], vecs[j]) for j in range(d)] for i in range(d)]
    inv = _mat_inverse(M)
    out = []
    for j in range(d):
        v = HVector.zero(system.rank)
        for i in range(d):
            v = v + partner[i].scale(inv[j][i])
        out.append(v)
    return out


def _coord_bound(system, level):
    """Box radius covering all lattice points of norm <= 2*level."""
    l = system.rank
    G = [[Cyclotomic.rational(Q(system.gram[i][j])) for j in range(l)]
         for i in range(l)]
    inv = _mat_inverse(G)
    bound = 0
    for i in range(l):
        dii = inv[i][i].as_rational()
        if dii <= 0:
            raise ValueError("basis enumeration needs a definite form")
        top = 2 * Q(level) * dii
        bound = max(bound, isqrt(int(top.numerator // top.denominator)) + 1)
    return bound


def _multisets(slots, budget):
    """Nondecreasing tuples from ``slots`` (pairs (cost, item)) with
    total cost <= budget."""
    out = [()]
    def rec(start, left, acc):
        for idx in range(start, len(slots)):
            cost, item = slots[idx]
            if cost > left:
                continue
            nxt = acc + (item,)
            out.append(nxt)
            rec(idx, left - cost, nxt)
    rec(0, budget, ())
    return out


# -- the untwisted space ----------------------------------------------------


class UntwistedSpace:
    """Oscillator algebra on the full span, with the relative grading."""

    def __init__(self, system: LatticeSystem, hat: HatGroup, max_weight=4):
        self.system = system
        self.hat = hat
        self.q = system.q
        self.max_weight = Q(max_weight)
        self.clipped_terms = 0
        star = list(system.h_star_basis)
        unit = lambda i: tuple(1 if j == i else 0 for j in range(system.rank))
        perp_gens = [system.project(system.embed(unit(i)), "perp")
                     for i in range(system.rank)]
        perp = independent_subset([v for v in perp_gens if not v.is_zero()])
        self._entries = [(("s", j), v) for j, v in enumerate(star)] + \
                        [(("p", j), v) for j, v in enumerate(perp)]
        self._vec = dict(self._entries)
        self._dual = {}
        for flag, vecs in (("s", star), ("p", perp)):
            duals = _dual_family(system, vecs, vecs)
            for j, d in enumerate(duals):
                self._dual[(flag, j)] = d
        self._dec_cache = {}

    def vacuum(self, coords=None):
        coords = (0,) * self.system.rank if coords is None else tuple(coords)
        return StateVector.of(UntwistedBasisVector((), coords))

    def label_vector(self, label) -> HVector:
        return self._vec[label]

    def decompose(self, alpha):
        """alpha as [(label, coeff)] over the star+perp basis."""
        x = self.system.embed(alpha) if not isinstance(alpha, HVector) else alpha
        key = x.key()
        hit = self._dec_cache.get(key)
        if hit is None:
            hit = []
            for lab, _v in self._entries:
                c = self.system.form(self._dual[lab], x)
                if not c.is_zero():
                    hit.append((lab, c))
            self._dec_cache[key] = hit
        return hit

    def wt(self, bv) -> "Q":
        w = Q(0)
        for lab, m in bv.osc:
            if lab[0] == "p":
                w += Q(-m)
        ap = self.system.project(self.system.embed(bv.group), "perp")
        return w + self.system.form_q(ap, ap) / 2

    def osc_act(self, alpha, m, v: StateVector) -> StateVector:
        m = as_int(Q(m)) if not isinstance(m, int) else m
        x = self.system.embed(alpha) if not isinstance(alpha, HVector) else alpha
        out = StateVector()
        if m < 0:
            comps = self.decompose(x)
            bucket = []
            for bv, c in v.terms.items():
                for lab, cl in comps:
                    nb = bv.with_osc(lab, m)
                    if self.wt(nb) > self.max_weight:
                        self.clipped_terms += 1
                        continue
                    bucket.append((nb, _cmul(c, cl)))
            return StateVector(bucket)
        if m == 0:
            xp = self.system.project(x, "perp")
            bucket = []
            for bv, c in v.terms.items():
                pair = self.system.form(xp, self.system.embed(bv.group))
                if not pair.is_zero():
                    bucket.append((bv, _cmul(c, pair)))
            return StateVector(bucket)
        bucket = []
        for bv, c in v.terms.items():
            for idx, (lab, mode) in enumerate(bv.osc):
                if mode != -m:
                    continue
                br = self.system.form(x, self._vec[lab]) * Q(m)
                if br.is_zero():
                    continue
                bucket.append((bv.drop_osc(idx), _cmul(c, br)))
        return StateVector(bucket)

    def group_act(self, a: HatElement, v: StateVector) -> StateVector:
        bucket = []
        for bv, c in v.terms.items():
            prod = self.hat.mul(a, self.hat.elem(bv.group, 0), UNTWISTED)
            phase = _root(self.q, prod.kpow)
            bucket.append((UntwistedBasisVector(bv.osc, prod.base),
                           _cmul(c, phase)))
        return StateVector(bucket)

    def nu_state(self, v: StateVector, power: int = 1) -> StateVector:
        sys_ = self.system
        out = StateVector()
        for bv, c in v.terms.items():
            nh = self.hat.nu_hat(self.hat.elem(bv.group, 0), power)
            base_c = _cmul(c, _root(self.q, nh.kpow))
            choices = []
            for lab, mode in bv.osc:
                w = sys_.nu_apply(self._vec[lab], power)
                choices.append([(lab2, mode, c2)
                                for lab2, c2 in self.decompose(w)])
            bucket = []
            for combo in itertools.product(*choices):
                cf = base_c
                osc = []
                for lab2, mode, c2 in combo:
                    cf = _cmul(cf, c2)
                    osc.append((lab2, mode))
                bucket.append((UntwistedBasisVector(osc, nh.base), cf))
            out = out + StateVector(bucket)
        return out

    def weight_of(self, v: StateVector) -> "Q":
        if v.is_zero():
            raise ValueError("weight of the zero vector is undefined")
        vals = {self.wt(bv) for bv in v.terms}
        if len(vals) > 1:
            raise ValueError(f"not homogeneous: weights {sorted(vals)}")
        return vals.pop()

    def basis(self, level, box=None):
        """Monomials with group weight plus total oscillator degree
        <= level; group coordinates scanned over a box when given."""
        level = Q(level)
        l = self.system.rank
        if box is None:
            if self.system.h_star_basis:
                raise ValueError("relative grading is not definite; "
                                 "pass an explicit coordinate box")
            box = _coord_bound(self.system, level)
        coords = itertools.product(range(-box, box + 1), repeat=l)
        out = []
        for g in coords:
            gw = self.wt(UntwistedBasisVector((), g))
            if gw > level:
                continue
            budget = level - gw
            slots = []
            for lab, _v in self._entries:
                n = 1
                while Q(n) <= budget:
                    slots.append((Q(n), (lab, -n)))
                    n += 1
            for ms in _multisets(slots, budget):
                out.append(UntwistedBasisVector(ms, g))
        out.sort(key=lambda bv: (self.wt(bv), bv.skey()))
        return out


# -- sector modules ---------------------------------------------------------


class TwistedSector:
    """Interface shared by the sector implementations.

    A sector provides, per basis label: the grading vector (an element
    of the zero-eigenspace orthogonal to the distinguished subspace),
    the sector weight, the action of extension elements, and the action
    of the lifted isometry.
    """

    dim = None

    def default_label(self):
        raise NotImplementedError

    def labels(self, level, box=None):
        raise NotImplementedError

    def grade(self, label) -> HVector:
        raise NotImplementedError

    def weight(self, label):
        raise NotImplementedError

    def act(self, a: HatElement, label):
        raise NotImplementedError

    def nu_act(self, label):
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class GroupSector(TwistedSector):
    """The whole group algebra as a sector; only valid for a trivial
    isometry, where the commutator maps of the two extensions agree."""

    def __init__(self, system: LatticeSystem, hat: HatGroup):
        if system.p != 1:
            raise ValueError("group-algebra sector needs a trivial isometry")
        l = system.rank
        unit = lambda i: tuple(1 if j == i else 0 for j in range(l))
        for i in range(l):
            for j in range(l):
                if system.c0(unit(i), unit(j)) != system.c0_nu(unit(i), unit(j)):
                    raise ValueError("commutator maps disagree; the group "
                                     "algebra does not carry the sector")
        self.system = system
        self.hat = hat
        self.q = system.q

    def default_label(self):
        return (0,) * self.system.rank

    def labels(self, level, box=None):
        level = Q(level)
        l = self.system.rank
        if box is None:
            if self.system.h_star_basis:
                raise ValueError("relative sector grading is not definite; "
                                 "pass an explicit coordinate box")
            box = _coord_bound(self.system, level)
        out = []
        for g in itertools.product(range(-box, box + 1), repeat=l):
            if self.weight(g) <= level:
                out.append(tuple(g))
        out.sort()
        return out

    def grade(self, label) -> HVector:
        v = self.system.project(self.system.embed(label), "perp")
        return self.system.eigencomponent(v, 0)

    def weight(self, label):
        g = self.grade(label)
        return self.system.form_q(g, g) / 2

    def act(self, a: HatElement, label):
        prod = self.hat.mul(a, self.hat.elem(label, 0), TWISTED)
        return _root(self.q, prod.kpow), prod.base

    def nu_act(self, label):
        nh = self.hat.nu_hat(self.hat.elem(label, 0))
        return _root(self.q, nh.kpow), nh.base

    def describe(self) -> dict:
        return {"kind": "group-algebra", "dim": None,
                "rank": self.system.rank}


def _section_kpow(hat: HatGroup, coords, flavor) -> int:
    """kappa-exponent of the generator-power product landing on coords."""
    l = hat.system.rank
    acc = hat.identity()
    for i, x in enumerate(coords):
        if x:
            gi = hat.elem(tuple(1 if j == i else 0 for j in range(l)), 0)
            acc = hat.mul(acc, hat.power(gi, x, flavor), flavor)
    return acc.kpow


class TableSector(TwistedSector):
    """One-dimensional sector given by a character of the extension.

    ``phase`` lists, per lattice generator, the kappa-exponent of its
    action; arbitrary elements act through the section factorization.
    The lifted isometry acts trivially, which is the unique choice
    compatible with its operator identity when the isometry has no
    nonzero fixed vectors.
    """

    dim = 1

    def __init__(self, system, hat, phase, lambda_used, all_solutions):
        self.system = system
        self.hat = hat
        self.q = system.q
        self.phase = tuple(int(t) % self.q for t in phase)
        self.lambda_used = tuple(lambda_used)
        self.all_solutions = tuple(tuple(s) for s in all_solutions)

    def default_label(self):
        return 0

    def labels(self, level, box=None):
        return [0]

    def grade(self, label) -> HVector:
        return HVector.zero(self.system.rank)

    def weight(self, label):
        return Q(0)

    def char_exponent(self, a: HatElement) -> int:
        s0 = _section_kpow(self.hat, a.base, TWISTED)
        e = a.kpow - s0
        for j, x in enumerate(a.base):
            e += x * self.phase[j]
        return e % self.q

    def act(self, a: HatElement, label):
        return _root(self.q, self.char_exponent(a)), 0

    def nu_act(self, label):
        return Cyclotomic.rational(1), 0

    def describe(self) -> dict:
        l = self.system.rank
        gens = {}
        for i in range(l):
            gens[f"e{i}"] = self.char_exponent(
                self.hat.elem(tuple(1 if j == i else 0 for j in range(l)), 0))
        return {"kind": "character", "dim": 1,
                "grades": [[0] * l],
                "hat_action": gens,
                "nu_hat_action": 0,
                "kappa_order": self.q,
                "lambda": list(self.lambda_used),
                "solutions": len(self.all_solutions)}


def build_T(system: LatticeSystem, hat: HatGroup, character=None,
            validate: bool = True) -> TwistedSector:
    """Construct the sector module acted on by the nu-twisted extension.

    For a trivial isometry this returns the group-algebra sector.
    Otherwise the nu-commutator map must vanish identically mod q (all
    presets satisfy this); the sector is then a one-dimensional
    character fixed on the distinguished central elements a^-1 nuhat(a),
    and the lexicographically least consistent choice of remaining
    phases is taken.  ``character`` optionally forces that choice.

    Raises ValueError when no phase assignment is consistent, or when
    the descended commutator form does not vanish (such sectors must be
    supplied as explicit tables; none of the presets needs one).
    """
    if system.p == 1:
        return GroupSector(system, hat)
    if not system.even_mode:
        raise ValueError("sector construction requires even-lattice mode")
    l, q, p = system.rank, system.q, system.p
    unit = lambda i: tuple(1 if j == i else 0 for j in range(l))
    for i in range(l):
        for j in range(l):
            if system.c0_nu(unit(i), unit(j)) % q:
                raise ValueError(
                    "nu-commutator map does not vanish on the lattice; "
                    "this sector must be supplied as explicit tables")
    # target character on the elements a^-1 nuhat(a), as kappa-exponents
    chi = []
    for i in range(l):
        s = (0,) * l
        for r in range(p):
            s = tuple(x + y for x, y in zip(s, system.nu_lattice(unit(i), r)))
        val = system.form_q(s, unit(i))
        e = Q(-q) * val / (2 * p)
        if e.denominator != 1:
            raise ValueError("character inconsistent with commutators: "
                             "half-integral kappa-exponent")
        chi.append(int(e) % q)

    lams = hat.nu_hat_solutions
    saved = hat._lambda
    chosen = None
    for lam in lams:
        hat._lambda = lam
        rows = []
        rhs = []
        ok = True
        for i in range(l):
            a = hat.elem(unit(i), 0)
            kelt = hat.mul(hat.inverse(a, TWISTED), hat.nu_hat(a), TWISTED)
            s0 = _section_kpow(hat, kelt.base, TWISTED)
            rows.append(kelt.base)
            rhs.append((chi[i] - (kelt.kpow - s0)) % q)
        sols = []
        for t in itertools.product(range(q), repeat=l):
            if all(sum(g * tt for g, tt in zip(row, t)) % q == r
                   for row, r in zip(rows, rhs)):
                sols.append(t)
        if sols:
            pick = tuple(character) if character is not None else sols[0]
            if pick not in sols:
                raise ValueError("requested character is not consistent")
            chosen = TableSector(system, hat, pick, lam, sols)
            break
    if chosen is None:
        hat._lambda = saved
        raise ValueError("character inconsistent with commutators: no phase "
                         "assignment matches the distinguished central "
                         "elements for any admissible lifting")
    if validate:
        _validate_table_sector(chosen)
    return chosen


def _validate_table_sector(sec: TableSector):
    system, hat, q, p = sec.system, sec.hat, sec.q, sec.system.p
    l = system.rank
    probe = list(itertools.product(range(-1, 2), repeat=l))
    for xa in probe:
        a = hat.elem(xa, 0)
        for xb in probe:
            b = hat.elem(xb, 0)
            lhsp = sec.char_exponent(hat.mul(a, b, TWISTED))
            rhsp = (sec.char_exponent(a) + sec.char_exponent(b)) % q
            if lhsp != rhsp:
                raise ValueError("sector character is not multiplicative")
        # a^-1 nuhat(a) must act by the prescribed root of unity
        kelt = hat.mul(hat.inverse(a, TWISTED), hat.nu_hat(a), TWISTED)
        s = (0,) * l
        for r in range(p):
            s = tuple(x + y for x, y in zip(s, system.nu_lattice(xa, r)))
        e = Q(-q) * system.form_q(s, xa) / (2 * p)
        if sec.char_exponent(kelt) != int(e) % q:
            raise ValueError("sector character misses the distinguished "
                             "central elements")
    if sec.char_exponent(hat.kappa()) != 1 % q:
        raise ValueError("kappa does not act as the primitive root")


# -- the twisted space ------------------------------------------------------


class TwistedSpace:
    """Fractional-mode oscillators over the eigenspace decomposition,
    tensored with a sector module."""

    def __init__(self, system: LatticeSystem, hat: HatGroup,
                 sector: TwistedSector, max_weight=4):
        self.system = system
        self.hat = hat
        self.sector = sector
        self.p = system.p
        self.q = system.q
        self.max_weight = Q(max_weight)
        self.clipped_terms = 0
        self._entries = {}
        self._classes = {k: [] for k in range(self.p)}
        raw = {}
        for k in range(self.p):
            for flag, sub in (("s", "star"), ("p", "perp")):
                vecs = system.eigenspace_basis(k, sub=sub)
                raw[(flag, k)] = vecs
                for j, v in enumerate(vecs):
                    lab = (flag, k, j)
                    self._entries[lab] = v
                    self._classes[k].append(lab)
        self._dual = {}
        for (flag, k), vecs in raw.items():
            partner = raw[(flag, (-k) % self.p)]
            if len(partner) != len(vecs):
                raise ValueError("eigenspace pairing is unbalanced")
            duals = _dual_family(system, vecs, partner)
            for j, d in enumerate(duals):
                self._dual[(flag, k, j)] = d
        shift = Q(0)
        for k in range(1, self.p):
            shift += Q(k * (self.p - k)) * len(raw[("p", k)])
        self.weight_shift = shift / (4 * self.p * self.p)

    def vacuum(self, label=None):
        label = self.sector.default_label() if label is None else label
        return StateVector.of(TwistedBasisVector((), label))

    def label_vector(self, label) -> HVector:
        return self._entries[label]

    def mode_class(self, m) -> int:
        pm = Q(m) * self.p
        if pm.denominator != 1:
            raise ValueError(f"mode {m} is not a multiple of 1/{self.p}")
        return int(pm) % self.p

    def decompose_class(self, alpha, k):
        """Class-k component of alpha as [(label, coeff)]."""
        x = self.system.embed(alpha) if not isinstance(alpha, HVector) else alpha
        out = []
        for lab in self._classes[k]:
            c = self.system.form(self._dual[lab], x)
            if not c.is_zero():
                out.append((lab, c))
        return out

    def wt(self, bv) -> "Q":
        w = Q(0)
        for lab, m in bv.osc:
            if lab[0] == "p":
                w += -Q(m)
        return w + self.sector.weight(bv.sector) + self.weight_shift

    def osc_act(self, alpha, m, v: StateVector) -> StateVector:
        m = Q(m)
        k = self.mode_class(m)
        x = self.system.embed(alpha) if not isinstance(alpha, HVector) else alpha
        if m < 0:
            comps = self.decompose_class(x, k)
            bucket = []
            for bv, c in v.terms.items():
                for lab, cl in comps:
                    nb = bv.with_osc(lab, m)
                    if self.wt(nb) > self.max_weight:
                        self.clipped_terms += 1
                        continue
                    bucket.append((nb, _cmul(c, cl)))
            return StateVector(bucket)
        if m == 0:
            bucket = []
            for bv, c in v.terms.items():
                pair = self.system.form(x, self.sector.grade(bv.sector))
                if not pair.is_zero():
                    bucket.append((bv, _cmul(c, pair)))
            return StateVector(bucket)
        bucket = []
        for bv, c in v.terms.items():
            for idx, (lab, mode) in enumerate(bv.osc):
                if mode != -m:
                    continue
                br = self.system.form(x, self._entries[lab]) * m
                if br.is_zero():
                    continue
                bucket.append((bv.drop_osc(idx), _cmul(c, br)))
        return StateVector(bucket)

    def group_act(self, a: HatElement, v: StateVector) -> StateVector:
        bucket = []
        for bv, c in v.terms.items():
            phase, lab = self.sector.act(a, bv.sector)
            bucket.append((TwistedBasisVector(bv.osc, lab), _cmul(c, phase)))
        return StateVector(bucket)

    def nu_state(self, v: StateVector, power: int = 1) -> StateVector:
        bucket = []
        for bv, c in v.terms.items():
            e = sum(lab[1] for lab, _m in bv.osc) * power
            cf = _cmul(c, _root(self.p, e))
            lab = bv.sector
            for _ in range(power % self.p):
                phase, lab = self.sector.nu_act(lab)
                cf = _cmul(cf, phase)
            bucket.append((TwistedBasisVector(bv.osc, lab), cf))
        return StateVector(bucket)

    def weight_of(self, v: StateVector) -> "Q":
        if v.is_zero():
            raise ValueError("weight of the zero vector is undefined")
        vals = {self.wt(bv) for bv in v.terms}
        if len(vals) > 1:
            raise ValueError(f"not homogeneous: weights {sorted(vals)}")
        return vals.pop()

    def basis(self, level, box=None):
        """Monomials with sector weight, twist shift, and total
        oscillator degree together <= level."""
        level = Q(level)
        out = []
        for sl in self.sector.labels(level, box=box):
            base = self.sector.weight(sl) + self.weight_shift
            if base > level:
                continue
            budget = level - base
            slots = []
            for k in range(self.p):
                for lab in self._classes[k]:
                    # modes for class k lie in k/p + Z; least creation
                    # cost is (p-k)/p
                    m = Q(1) if k == 0 else Q(self.p - k, self.p)
                    while m <= budget:
                        slots.append((m, (lab, -m)))
                        m += 1
            for ms in _multisets(slots, budget):
                out.append(TwistedBasisVector(ms, sl))
        out.sort(key=lambda bv: (self.wt(bv), bv.skey()))
        return out


# -- module-level operations ------------------------------------------------


def oscillator_act(alpha, m, v: StateVector, space) -> StateVector:
    """alpha(m) applied to v; creation for m < 0, annihilation for
    m > 0, and the zero mode acting through the group or sector part."""
    return space.osc_act(alpha, m, v)


def group_act(a: HatElement, v: StateVector, space) -> StateVector:
    return space.group_act(a, v)


def nu_hat_state(v: StateVector, space, power: int = 1) -> StateVector:
    return space.nu_state(v, power)


def weight(v: StateVector, space):
    """Weight of a homogeneous state (raises when mixed or zero)."""
    return space.weight_of(v)


def omega_split(v: StateVector):
    """(no-star-oscillator part, rest); the second factor spans the
    image of the distinguished subspace's creation operators."""
    plain, starred = [], []
    for bv, c in v.terms.items():
        if any(lab[0] == "s" for lab, _m in bv.osc):
            starred.append((bv, c))
        else:
            plain.append((bv, c))
    return StateVector(plain), StateVector(starred)
