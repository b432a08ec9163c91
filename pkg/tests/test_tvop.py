import pytest

from latvop.scalar import Q, Cyclotomic, Scalar, scalar_eq
from latvop.lattice import LatticeSystem
from latvop.gext import HatGroup
from latvop.formal import WindowError, compare
from latvop.state import (
    StateVector, UntwistedBasisVector, UntwistedSpace, TwistedSpace, build_T,
)
from latvop.tvop import (
    DeltaCoefficients, sigma, eps1, eps2, tau, delta_coeffs, delta_z_apply,
    y_nu_apply, nu_limit_check, y_nu_product_check, y_nu_exchange_check,
    y_nu_commute_check, y_nu_translate_check, orthogonal_basis,
)
from latvop.vop import elem_state, _build1


def a1_minus1():
    return LatticeSystem(gram=[[2]], nu=[[-1]], p=2, q=2)


def rank1_untwisted():
    return LatticeSystem(gram=[[2]], nu=[[1]], p=1, q=2)


def rank2_relative():
    return LatticeSystem(gram=[[2, 0], [0, 2]], nu=[[1, 0], [0, 1]], p=1, q=2,
                         h_star_basis=[(1, 1)])


def a2_coxeter():
    return LatticeSystem(gram=[[2, -1], [-1, 2]], nu=[[0, -1], [1, -1]], p=3, q=6)


def a1_relative_minus1():
    return LatticeSystem(gram=[[2, 0], [0, 2]], nu=[[-1, 0], [0, -1]], p=2, q=2,
                         h_star_basis=[(0, 1)])


def pair(mk, max_weight=8):
    sys_ = mk()
    hat = HatGroup(sys_)
    u = UntwistedSpace(sys_, hat, max_weight=max_weight)
    t = TwistedSpace(sys_, hat, build_T(sys_, hat), max_weight=max_weight)
    return sys_, hat, u, t


def unit(sys_, i):
    return tuple(1 if j == i else 0 for j in range(sys_.rank))


def one():
    return Scalar.of(Cyclotomic.rational(1))


def ddz(f, hi):
    d = f.den[0]
    terms = {}
    for key, sv in f.terms.items():
        e = Q(key[0], d)
        if e != 0:
            terms[(e - 1,)] = e * sv
    return _build1(terms, Q(hi) - 1)


class TestScalarFactors:
    @pytest.mark.parametrize("mk", [rank1_untwisted, rank2_relative])
    def test_sigma_trivial_for_identity_isometry(self, mk):
        sys_ = mk()
        assert scalar_eq(sigma(unit(sys_, 0), sys_), one())

    def test_sigma_minus_one(self):
        sys_ = a1_minus1()
        assert scalar_eq(sigma((1,), sys_), Scalar.of(Q(1, 2)))
        assert scalar_eq(sigma((2,), sys_), Scalar.of(Q(1, 16)))

    def test_sigma_coxeter(self):
        sys_ = a2_coxeter()
        want = (Cyclotomic.rational(1) - Cyclotomic.root(3, 2)).inv()
        assert scalar_eq(sigma((1, 0), sys_), Scalar.of(want))

    @pytest.mark.parametrize("mk", [a1_minus1, a2_coxeter, a1_relative_minus1])
    def test_sigma_isometry_invariant(self, mk):
        sys_ = mk()
        vecs = [unit(sys_, i) for i in range(sys_.rank)]
        vecs.append(tuple(sum(v[j] for v in vecs) for j in range(sys_.rank)))
        for al in vecs:
            assert scalar_eq(sigma(sys_.nu_lattice(al, 1), sys_),
                             sigma(al, sys_))

    def test_tau_is_one_on_a1(self):
        sys_ = a1_minus1()
        for a in [(1,), (-1,), (2,)]:
            for b in [(1,), (-1,), (2,)]:
                assert scalar_eq(tau(a, b, sys_), one())

    def test_tau_is_one_on_a2(self):
        sys_ = a2_coxeter()
        vecs = [(1, 0), (0, 1), (1, 1), (-1, 0)]
        for a in vecs:
            for b in vecs:
                assert scalar_eq(tau(a, b, sys_), one())

    def test_trivial_order_has_unit_factors(self):
        sys_ = rank1_untwisted()
        assert scalar_eq(eps1((1,), (1,), sys_), one())
        assert scalar_eq(eps2((1,), (1,), sys_), one())
        assert scalar_eq(tau((1,), (1,), sys_), one())

    def test_eps2_trivial_at_order_two(self):
        # the section cocycle vanishes identically for order two
        sys_ = a1_minus1()
        assert scalar_eq(eps2((1,), (1,), sys_), one())
        assert scalar_eq(eps2((1,), (-1,), sys_), one())


class TestDeltaCoefficients:
    @pytest.mark.parametrize("p", [1, 2, 3, 5])
    def test_constant_entries_vanish(self, p):
        dc = delta_coeffs(p, 3)
        for i in range(p):
            assert dc.get(0, 0, i).is_zero()

    def test_frozen_order_two_entries(self):
        dc = delta_coeffs(2, 2)
        assert dc.get(1, 1, 0) == Cyclotomic.rational(Q(1, 32))
        assert dc.get(1, 1, 1) == Cyclotomic.rational(Q(-1, 32))

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_first_order_closed_forms(self, p):
        dc = delta_coeffs(p, 2)
        s10 = Cyclotomic.rational(0)
        s01 = Cyclotomic.rational(0)
        s11 = Cyclotomic.rational(0)
        for i in range(1, p):
            w = Cyclotomic.root(p, (-i) % p)
            u = (Cyclotomic.rational(1) - w).inv()
            c10 = u * Q(1, 2 * p)
            c01 = (w * u) * Q(-1, 2 * p)
            c11 = (w * u * u) * Q(1, 2 * p * p)
            assert dc.get(1, 0, i) == c10
            assert dc.get(0, 1, i) == c01
            assert dc.get(1, 1, i) == c11
            s10 = s10 + c10
            s01 = s01 + c01
            s11 = s11 + c11
        assert dc.get(1, 0, 0) == -s10
        assert dc.get(0, 1, 0) == -s01
        assert dc.get(1, 1, 0) == -s11

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_variable_swap_symmetry(self, p):
        # exchanging the two variables flips the eigenvalue index
        dc = delta_coeffs(p, 4)
        for (m, n, i), c in dc.table.items():
            assert dc.get(n, m, (p - i) % p) == c

    def test_trivial_order_is_empty(self):
        dc = delta_coeffs(1, 4)
        assert dc.get(2, 1, 0).is_zero()

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            delta_coeffs(2, -1)


class TestDeltaDressing:
    @pytest.mark.parametrize("mk", [a1_minus1, a2_coxeter])
    def test_group_states_are_fixed(self, mk):
        sys_, hat, u, t = pair(mk)
        v = elem_state(hat.elem(unit(sys_, 0), 0), u)
        f = delta_z_apply(v, u)
        assert sorted(f.terms) == [(0,)]
        assert f.terms[(0,)] == v

    def test_squared_oscillator_example(self):
        sys_, hat, u, t = pair(a1_minus1)
        al = sys_.embed((1,))
        v = u.osc_act(al, -1, u.osc_act(al, -1, u.vacuum()))
        f = delta_z_apply(v, u)
        assert sorted(f.terms) == [(-2,), (0,)]
        assert f.terms[(0,)] == v
        assert f.terms[(-2,)] == Q(1, 4) * u.vacuum()

    def test_trivial_for_identity_isometry(self):
        sys_, hat, u, t = pair(rank1_untwisted)
        v = u.osc_act(sys_.embed((1,)), -2, u.vacuum((1,)))
        f = delta_z_apply(v, u)
        assert sorted(f.terms) == [(0,)]

    def test_basis_independence(self):
        sys_, hat, u, t = pair(a2_coxeter)
        al = sys_.embed((1, 0))
        be = sys_.embed((0, 1))
        states = [
            u.osc_act(al, -1, elem_state(hat.elem((0, 1), 0), u)),
            u.osc_act(al, -1, u.osc_act(be, -2, u.vacuum())),
            u.osc_act(al, -3, u.vacuum((1, 1))),
        ]
        flipped = orthogonal_basis(sys_, order=(1, 0))
        for v in states:
            f = delta_z_apply(v, u)
            g = delta_z_apply(v, u, basis=flipped)
            assert not compare(f, g)[1]

    def test_shared_table_matches_fresh_one(self):
        sys_, hat, u, t = pair(a1_minus1)
        al = sys_.embed((1,))
        v = u.osc_act(al, -2, u.vacuum((1,)))
        table = delta_coeffs(2, 8)
        f = delta_z_apply(v, u, coeffs=table)
        g = delta_z_apply(v, u)
        assert not compare(f, g)[1]

    def test_undersized_table_rejected(self):
        sys_, hat, u, t = pair(a1_minus1)
        v = u.osc_act(sys_.embed((1,)), -3, u.vacuum())
        with pytest.raises(ValueError):
            delta_z_apply(v, u, coeffs=delta_coeffs(2, 2))
        with pytest.raises(ValueError):
            delta_z_apply(v, u, coeffs=delta_coeffs(3, 12))


class TestApplyBasics:
    def test_distinguished_group_state_acts_as_constant(self):
        sys_, hat, u, t = pair(a1_relative_minus1)
        psi = hat.elem((0, 1), 0)
        f = y_nu_apply(elem_state(psi, u), t.vacuum(), (-2, 2), u, t)
        assert sorted(f.terms) == [(0,)]
        assert f.terms[(0,)] == t.group_act(psi, t.vacuum())

    def test_star_dressed_state_acts_as_zero(self):
        sys_, hat, u, t = pair(a1_relative_minus1)
        v = StateVector.of(
            UntwistedBasisVector(((("s", 0), -1),), (1, 0)))
        f = y_nu_apply(v, t.vacuum(), (-2, 2), u, t)
        assert not f.terms

    def test_lowest_term_carries_the_prefactor(self):
        sys_, hat, u, t = pair(a1_minus1)
        v = elem_state(hat.elem((1,), 0), u)
        f = y_nu_apply(v, t.vacuum(), (-2, 2), u, t)
        assert f.den == (2,)
        low = min(f.terms)
        assert Q(low[0], 2) == -1
        assert f.terms[low] == Q(1, 4) * t.vacuum()

    def test_exponents_live_on_the_fractional_lattice(self):
        sys_, hat, u, t = pair(a2_coxeter)
        v = elem_state(hat.elem((1, 0), 0), u)
        f = y_nu_apply(v, t.vacuum(), (-2, 2), u, t)
        assert f.den == (3,)
        assert f.terms

    @pytest.mark.parametrize("mk", [a1_minus1, a2_coxeter])
    def test_grading_law(self, mk):
        sys_, hat, u, t = pair(mk, max_weight=9)
        v = u.osc_act(sys_.embed(unit(sys_, 0)), -1,
                      elem_state(hat.elem(unit(sys_, 0), 0), u))
        wv = u.weight_of(v)
        w = t.vacuum()
        ww = t.weight_of(w)
        f = y_nu_apply(v, w, (-3, 3), u, t)
        assert f.terms
        for key, sv in f.terms.items():
            e = Q(key[0], f.den[0])
            for bv, _c in sv.terms.items():
                assert t.wt(bv) == wv + ww + e

    def test_mismatched_systems_rejected(self):
        _s1, hat1, u, _t1 = pair(a1_minus1)
        _s2, hat2, _u2, t2 = pair(a1_minus1)
        v = elem_state(hat1.elem((1,), 0), u)
        with pytest.raises(ValueError):
            y_nu_apply(v, t2.vacuum(), (-2, 2), u, t2)

    def test_infinite_ceiling_rejected(self):
        from latvop.formal import INF
        sys_, hat, u, t = pair(a1_minus1)
        v = elem_state(hat.elem((1,), 0), u)
        with pytest.raises(WindowError):
            y_nu_apply(v, t.vacuum(), (-2, INF), u, t)

    def test_result_complete_below_smaller_ceiling(self):
        sys_, hat, u, t = pair(a1_minus1, max_weight=10)
        al = sys_.embed((1,))
        v = u.osc_act(al, -2, elem_state(hat.elem((1,), 0), u))
        w = t.osc_act(al, Q(-1, 2), t.vacuum())
        f2 = y_nu_apply(v, w, (-2, 2), u, t)
        f4 = y_nu_apply(v, w, (-4, 4), u, t)
        checked, bad = compare(f2, f4, window={"z": (-2, 2)})
        assert checked > 0
        assert not bad


class TestDerivativeRule:
    @pytest.mark.parametrize("mk", [a1_minus1, a2_coxeter])
    def test_oscillator_prepend_is_differentiation(self, mk):
        # for a pure group state the dressing correction makes the
        # derivative of the series match the operator of the
        # once-dressed state
        sys_, hat, u, t = pair(mk, max_weight=9)
        coords = unit(sys_, 0)
        v = elem_state(hat.elem(coords, 0), u)
        va = u.osc_act(sys_.embed(coords), -1, v)
        lhs = ddz(y_nu_apply(v, t.vacuum(), (-3, 3), u, t), 3)
        rhs = y_nu_apply(va, t.vacuum(), (-3, 2), u, t)
        checked, bad = compare(lhs, rhs, window={"z": (-3, 2)})
        assert checked >= 8
        assert not bad


class TestLimitSubstitution:
    @pytest.mark.parametrize("r", [0, 1, 2])
    def test_a1_all_powers(self, r):
        sys_, hat, u, t = pair(a1_minus1)
        v = elem_state(hat.elem((1,), 0), u)
        rep = nu_limit_check(v, r, (-2, 2), u, t)
        assert rep["status"] == "pass"
        assert rep["checked"] > 0

    @pytest.mark.parametrize("mk", [rank1_untwisted, a2_coxeter,
                                    a1_relative_minus1])
    def test_presets_first_power(self, mk):
        sys_, hat, u, t = pair(mk)
        v = elem_state(hat.elem(unit(sys_, 0), 0), u)
        rep = nu_limit_check(v, 1, (-2, 2), u, t)
        assert rep["status"] == "pass"

    def test_dressed_state(self):
        sys_, hat, u, t = pair(a1_minus1, max_weight=9)
        v = u.osc_act(sys_.embed((1,)), -1,
                      elem_state(hat.elem((1,), 0), u))
        rep = nu_limit_check(v, 1, (-2, 2), u, t)
        assert rep["status"] == "pass"

    def test_mixed_momenta_rejected(self):
        sys_, hat, u, t = pair(a1_minus1)
        v = elem_state(hat.elem((1,), 0), u) \
            + elem_state(hat.elem((-1,), 0), u)
        with pytest.raises(ValueError):
            nu_limit_check(v, 1, (-2, 2), u, t)


class TestProductIdentity:
    @pytest.mark.parametrize("mk,ca,cb", [
        (a1_minus1, (1,), (-1,)),
        (a1_minus1, (1,), (1,)),
        (rank1_untwisted, (1,), (-1,)),
        (a2_coxeter, (1, 0), (0, 1)),
        (a1_relative_minus1, (1, 0), (-1, 0)),
    ])
    def test_presets(self, mk, ca, cb):
        sys_, hat, u, t = pair(mk)
        rep = y_nu_product_check(hat.elem(ca, 0), hat.elem(cb, 0),
                                 (-2, 2), u, t)
        assert rep["status"] == "pass"
        assert rep["checked"] > 0

    def test_oscillator_probe(self):
        sys_, hat, u, t = pair(a1_minus1, max_weight=10)
        probe = t.osc_act(sys_.embed((1,)), Q(-1, 2), t.vacuum())
        rep = y_nu_product_check(hat.elem((1,), 0), hat.elem((-1,), 0),
                                 (-2, 2), u, t, probe=probe)
        assert rep["status"] == "pass"


class TestExchange:
    @pytest.mark.parametrize("mk,ca,cb", [
        (a1_minus1, (1,), (1,)),
        (a1_minus1, (1,), (-1,)),
        (a2_coxeter, (1, 0), (0, 1)),
        (rank1_untwisted, (1,), (1,)),
    ])
    def test_presets(self, mk, ca, cb):
        sys_, hat, u, t = pair(mk)
        rep = y_nu_exchange_check(hat.elem(ca, 0), hat.elem(cb, 0),
                                  (-2, 2), u, t)
        assert rep["status"] == "pass"
        assert rep["checked"] > 0


class TestCommutation:
    def test_distinguished_modes_and_isometry(self):
        sys_, hat, u, t = pair(a1_relative_minus1)
        v = elem_state(hat.elem((1, 0), 0), u)
        rep = y_nu_commute_check(v, t.vacuum(), (-2, 2), u, t)
        assert rep["status"] == "pass"
        assert rep["checked"] > 0

    @pytest.mark.parametrize("mk", [a1_minus1, a2_coxeter])
    def test_isometry_leg_alone(self, mk):
        sys_, hat, u, t = pair(mk)
        v = elem_state(hat.elem(unit(sys_, 0), 0), u)
        rep = y_nu_commute_check(v, t.vacuum(), (-2, 2), u, t)
        assert rep["status"] == "pass"


class TestTranslate:
    def test_relative_preset(self):
        sys_, hat, u, t = pair(a1_relative_minus1)
        psi = hat.elem((0, 1), 0)
        v = elem_state(hat.elem((1, 0), 0), u)
        rep = y_nu_translate_check(psi, v, (-2, 2), u, t)
        assert rep["status"] == "pass"
        assert rep["checked"] > 0

    def test_rank2_trivial_order(self):
        sys_, hat, u, t = pair(rank2_relative)
        psi = hat.elem((1, 1), 0)
        v = elem_state(hat.elem((1, 0), 0), u)
        rep = y_nu_translate_check(psi, v, (-2, 2), u, t)
        assert rep["status"] == "pass"

    def test_nondistinguished_element_rejected(self):
        sys_, hat, u, t = pair(a1_relative_minus1)
        with pytest.raises(ValueError):
            y_nu_translate_check(hat.elem((1, 0), 0),
                                 elem_state(hat.elem((1, 0), 0), u),
                                 (-2, 2), u, t)
