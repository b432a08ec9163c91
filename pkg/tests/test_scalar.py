import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from latvop.scalar import (
    Cyclotomic, Q, Scalar, UndecidableEquality, branch_power, cyclo_poly,
    interval_bounds, omega, root_product, scalar_eq,
)


def test_omega_small():
    assert scalar_eq(omega(1), 1)
    assert scalar_eq(omega(2), -1)
    assert scalar_eq(omega(4) ** 2, -1)


def test_omega_inverse_pairs():
    for n in range(1, 25):
        w = omega(n)
        for k in range(n + 1):
            assert scalar_eq(w ** k * w ** (n - k), 1)


def test_omega_conductor_compatibility():
    # w_n = w_m^{m/n} whenever n | m
    for m in range(1, 25):
        for n in range(1, m + 1):
            if m % n == 0:
                assert scalar_eq(omega(n), omega(m) ** (m // n))


def test_cyclo_poly_values():
    assert cyclo_poly(1) == (Q(-1), Q(1))
    assert cyclo_poly(2) == (Q(1), Q(1))
    assert cyclo_poly(4) == (Q(1), Q(0), Q(1))
    assert cyclo_poly(6) == (Q(1), Q(-1), Q(1))
    assert cyclo_poly(12) == (Q(1), Q(0), Q(-1), Q(0), Q(1))


small_rat = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def cyclotomics(draw):
    n = draw(st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12]))
    terms = draw(st.dictionaries(st.integers(0, n - 1), small_rat, max_size=3))
    return Cyclotomic(n, {e: Q(v.numerator, v.denominator) for e, v in terms.items()})


@settings(max_examples=60, deadline=None)
@given(cyclotomics(), cyclotomics(), cyclotomics())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(cyclotomics())
def test_multiplicative_inverse(a):
    if not a.is_zero():
        assert a * a.inv() == 1


def test_reduction_idempotent():
    w = Cyclotomic.root(12, 7)
    again = Cyclotomic(w.n, w.c)
    assert again.n == w.n and again.c == w.c


def test_minimal_polynomial_relation():
    w = Cyclotomic.root(3)
    assert w + w ** 2 == -1
    assert 1 + w + w ** 2 == 0


def test_conjugate():
    w = Cyclotomic.root(5)
    assert w.conj() == w ** 4
    assert (w * w.conj()) == 1


def test_branch_power_positive_reals():
    assert scalar_eq(branch_power(4, Q(1, 2)), 2)
    assert scalar_eq(branch_power(2, -1), Q(1, 2))
    assert scalar_eq(branch_power(27, Q(2, 3)), 9)


def test_branch_power_minus_one_half():
    # principal branch: arg(-1) = pi, so the square root is e^{i pi/2} = i
    val = branch_power(-1, Q(1, 2))
    assert scalar_eq(val, omega(4))
    # frozen numeric confirmation at 100 digits
    mp.dps = 120
    expect = mp.expjpi(mp.mpf(1) / 2)
    (rlo, rhi), (ilo, ihi) = interval_bounds(val.interval(512))
    mid = mp.mpc((rlo + rhi) / 2, (ilo + ihi) / 2)
    assert abs(mid - expect) < mp.mpf(10) ** -100


def test_branch_power_partial_extraction():
    v = branch_power(8, Q(1, 2))
    assert scalar_eq(v * v, 8)
    assert scalar_eq(v, branch_power(2, Q(3, 2)))


def test_branch_power_additivity():
    samples = [
        Scalar.of(Cyclotomic.rational(Q(7, 3))),
        Scalar.of(-3),
        Scalar(1 - Cyclotomic.root(7)),
        Scalar(Cyclotomic.root(8, 3)),
    ]
    taus = [Q(1, 2), Q(1, 3), Q(-1, 2), Q(2)]
    for a in samples:
        for s in taus:
            for t in taus:
                lhs = branch_power(a, s) * branch_power(a, t)
                rhs = branch_power(a, s + t)
                assert scalar_eq(lhs, rhs)


def test_scalar_eq_cyclotomic_cases():
    w = omega(3)
    assert scalar_eq(w + w ** 2, -1)
    v = branch_power(2, Q(1, 2))
    assert scalar_eq(v * v, 2)
    prod = Scalar.of(1)
    for r in range(1, 5):
        prod = prod * Scalar(1 - Cyclotomic.root(5, r))
    assert scalar_eq(prod, 5)


def test_scalar_eq_certifies_inequality():
    assert not scalar_eq(branch_power(2, Q(1, 2)), branch_power(3, Q(1, 2)))
    assert not scalar_eq(branch_power(2, Q(1, 2)), Q(3, 2))


def test_scalar_eq_undecidable_reported():
    # (1-w7)^(1/2) (1-w7^2)^(1/2) equals ((1-w7)(1-w7^2))^(1/2) since the
    # args sum inside (-pi, pi], but the bases are not conjugate so the
    # canonical forms stay apart; intervals can never separate equal values
    b1 = Scalar(1 - Cyclotomic.root(7))
    b2 = Scalar(1 - Cyclotomic.root(7, 2))
    lhs = branch_power(b1, Q(1, 2)) * branch_power(b2, Q(1, 2))
    rhs = branch_power(b1 * b2, Q(1, 2))
    with pytest.raises(UndecidableEquality):
        scalar_eq(lhs, rhs, prec_cap=512)


def test_root_product_integer_tau():
    assert scalar_eq(root_product(2, 1), 2)
    assert scalar_eq(root_product(3, 1), 3)
    for p in range(1, 8):
        assert scalar_eq(root_product(p, 1), p)
        assert scalar_eq(root_product(p, 2), p * p)


def test_root_product_matches_branch_power():
    for p in range(1, 8):
        for tau in (Q(1), Q(2), Q(1, 2), Q(-1, 2)):
            assert scalar_eq(root_product(p, tau), branch_power(p, tau))


def test_root_product_half_certified_50_digits():
    # numeric certification of prod (1 - w_p^r)^(1/2) = sqrt(p)
    mp.dps = 80
    for p in (2, 3, 5, 7):
        (rlo, rhi), (ilo, ihi) = interval_bounds(root_product(p, Q(1, 2)).interval(384))
        assert (rhi - rlo) + (ihi - ilo) < mp.mpf(10) ** -50
        mid = mp.mpc((rlo + rhi) / 2, (ilo + ihi) / 2)
        assert abs(mid - mp.sqrt(p)) < mp.mpf(10) ** -50


def test_scalar_addition_rules():
    w = omega(6)
    assert scalar_eq(w + w, 2 * w)
    r = branch_power(2, Q(1, 2))
    assert scalar_eq(r + r, 2 * r)
    with pytest.raises(ValueError):
        (r + omega(4))


def test_zero_base_rejected():
    with pytest.raises(ZeroDivisionError):
        branch_power(Scalar.of(0), Q(1, 2))
