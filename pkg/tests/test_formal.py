import random

import pytest

from latvop.scalar import Cyclotomic, Q, QONE
from latvop.formal import (
    INF,
    FormalSeries,
    WindowError,
    binom_expand,
    binomial,
    compare,
    delta_series,
    delta_shift_sides,
    residue,
    series_add,
    series_mul,
    shift_sub,
)


def poly(terms, variables=("z1", "z2")):
    return FormalSeries.build(variables, terms)


class TestBasics:

    def test_binomial_values(self):
        assert binomial(Q(1, 2), 1) == Q(1, 2)
        assert binomial(Q(1, 2), 2) == Q(-1, 8)
        assert binomial(-1, 3) == -1
        assert binomial(4, 2) == 6
        assert binomial(2, 5) == 0

    def test_one_times_g_is_g(self):
        d = delta_series(1, 2, -3, 3)
        prod = series_mul(FormalSeries.one(), d)
        checked, bad = compare(prod, d)
        assert checked == 13 and not bad
        assert prod.window == d.window

    def test_poly_product(self):
        f = poly({(1, 0): QONE, (0, 1): Q(-1)})
        g = poly({(1, 0): QONE, (0, 1): QONE})
        prod = series_mul(f, g)
        assert prod.coefficient({"z1": 2}) == 1
        assert prod.coefficient({"z2": 2}) == -1
        assert prod.coefficient({"z1": 1, "z2": 1}) == 0
        assert not prod.window_empty()
        assert prod.window == ((-INF, INF), (-INF, INF))

    def test_coefficient_outside_window(self):
        g = binom_expand("z1", "z2", Q(-1), ymax=4)
        with pytest.raises(WindowError):
            g.coefficient({"z1": -6, "z2": 5})

    def test_scale_and_sub(self):
        f = poly({(2, 0): QONE})
        g = poly({(2, 0): Q(1, 3)})
        diff = f - g.scale(3)
        assert diff.coefficient({"z1": 2}) == 0

    def test_immutability(self):
        f = poly({(1, 0): QONE})
        with pytest.raises(AttributeError):
            f.terms = {}


class TestBinomExpand:

    def test_geometric_inverse(self):
        g = binom_expand("z1", "z2", Q(-1), ymax=5)
        for k in range(6):
            assert g.coefficient({"z1": -1 - k, "z2": k}) == 1
        lo, hi = g.window_of("z2")
        assert hi == 5 and lo == -INF

    def test_square_is_exact(self):
        g = binom_expand("z1", "z2", 2)
        assert g.coefficient({"z1": 2}) == 1
        assert g.coefficient({"z1": 1, "z2": 1}) == -2
        assert g.coefficient({"z2": 2}) == 1
        assert g.window == ((-INF, INF), (-INF, INF))

    def test_half_power_shift_head(self):
        # ((z2+z0)^(1/2) - z2^(1/2)) starts (1/2)z2^(-1/2)z0 - (1/8)z2^(-3/2)z0^2
        s = binom_expand("z2", "z0", Q(1, 2), plus=True, ymax=4)
        head = s - FormalSeries.monomial(QONE, {"z2": Q(1, 2)})
        assert head.coefficient({"z2": Q(-1, 2), "z0": 1}) == Q(1, 2)
        assert head.coefficient({"z2": Q(-3, 2), "z0": 2}) == Q(-1, 8)
        assert head.coefficient({"z0": 0, "z2": Q(1, 2)}) == 0

    def test_half_power_squares_back(self):
        s = binom_expand("z2", "z0", Q(1, 2), plus=True, ymax=4)
        sq = series_mul(s, s)
        lin = poly({(1, 0): QONE, (0, 1): QONE}, variables=("z0", "z2"))
        checked, bad = compare(sq, lin)
        assert not bad
        # everything beyond z2 + z0 cancelled inside a window this wide
        assert sq.window_of("z0")[1] == 4
        assert checked == 2

    def test_root_of_unity_factor(self):
        w = Cyclotomic.root(3)
        g = binom_expand("z1", "z2", Q(-1), root=Q(1, 3), zeta=w, ymax=Q(4, 3))
        # (z1^(1/3) - w z2^(1/3))^(-1) = sum w^k z1^(-(k+1)/3) z2^(k/3)
        for k in range(5):
            got = g.coefficient({"z1": Q(-(k + 1), 3), "z2": Q(k, 3)})
            assert got == w ** k

    def test_inverse_pairs_give_one(self):
        for c in (Q(1, 2), Q(1), Q(2)):
            f = binom_expand("z1", "z2", c, ymax=6)
            g = binom_expand("z1", "z2", -c, ymax=6)
            prod = series_mul(f, g)
            checked, bad = compare(prod, FormalSeries.one())
            assert not bad
            assert checked >= 1
            assert prod.window_of("z2")[1] == 6
            assert prod.coefficient({}) == 1

    def test_nonterminating_needs_ymax(self):
        with pytest.raises(ValueError):
            binom_expand("z1", "z2", Q(1, 2))


class TestDelta:

    def test_terms_and_window(self):
        d = delta_series(-1, 2, -2, 2)
        assert d.coefficient({"z1": Q(3, 2), "z2": Q(-3, 2)}) == -1
        assert d.coefficient({"z1": -1, "z2": 1}) == 1
        assert d.coefficient({"z1": Q(1, 2), "z2": Q(1, 2)}) == 0
        assert d.window_of("z1") == (-2, 2)
        assert d.window_of("z2") == (-2, 2)

    def test_multiplication_reindexes(self):
        # z1 * delta = z2 * delta on the shared window
        d = delta_series(1, 1, -5, 5)
        left = series_mul(FormalSeries.monomial(QONE, {"z1": 1}), d)
        right = series_mul(FormalSeries.monomial(QONE, {"z2": 1}), d)
        checked, bad = compare(left, right)
        assert not bad
        assert checked >= 9

    def test_twisted_reindex(self):
        # z1^(1/2) * delta(-(z1/z2)^(1/2)) = -z2^(1/2) * same delta
        d = delta_series(-1, 2, -3, 3)
        left = series_mul(FormalSeries.monomial(QONE, {"z1": Q(1, 2)}), d)
        right = series_mul(FormalSeries.monomial(Q(-1), {"z2": Q(1, 2)}), d)
        checked, bad = compare(left, right)
        assert not bad
        assert checked >= 9

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_root_of_unity_filter(self, p):
        H = 4
        total = None
        for r in range(p):
            d = delta_series(Cyclotomic.root(p, r), p, -H, H)
            total = d if total is None else series_add(total, d)
        total = total.scale(Q(1, p))
        plain = delta_series(1, 1, -H, H)
        checked, bad = compare(total, plain)
        assert not bad
        assert checked == 2 * H + 1

    def test_residue_of_delta(self):
        d = delta_series(1, 1, -4, 4)
        r = residue(d, "z1")
        assert r.coefficient({"z2": 1}) == 1
        assert r.vars == ("z2",)
        assert len(r.terms) == 1


class TestResidue:

    def test_inverse_power(self):
        f = FormalSeries.monomial(QONE, {"z": -1})
        assert residue(f, "z").coefficient({}) == 1

    def test_cube_has_no_residue(self):
        f = FormalSeries.monomial(QONE, {"z": 3})
        assert residue(f, "z").coefficient({}) == 0

    def test_window_guard(self):
        f = FormalSeries.build(("z",), {(3,): QONE},
                               window={"z": (0, 3)}, support={"z": (None, None)})
        with pytest.raises(WindowError):
            residue(f, "z")


class TestShiftSub:

    def test_linear(self):
        f = FormalSeries.monomial(QONE, {"z1": 1})
        s = shift_sub(f, "z1", "z0", 1, 2)
        assert s.coefficient({"z1": 1}) == 1
        assert s.coefficient({"z0": 1}) == 1
        assert s.coefficient({"z0": 1, "z1": 1}) == 0

    def test_inverse_power_truncated(self):
        f = FormalSeries.monomial(QONE, {"z1": -1})
        s = shift_sub(f, "z1", "z0", 1, 2)
        assert s.coefficient({"z1": -1}) == 1
        assert s.coefficient({"z1": -2, "z0": 1}) == -1
        assert s.coefficient({"z1": -3, "z0": 2}) == 1

    def test_negative_direction_square(self):
        f = FormalSeries.monomial(QONE, {"z1": 2})
        s = shift_sub(f, "z1", "z0", -1, 3)
        assert s.coefficient({"z1": 2}) == 1
        assert s.coefficient({"z1": 1, "z0": 1}) == -2
        assert s.coefficient({"z0": 2}) == 1

    def test_window_shrinks_from_above(self):
        d = delta_series(1, 1, -6, 6)
        s = shift_sub(d, "z1", "z0", 1, 2)
        assert s.window_of("z1") == (-6, 4)
        assert s.window_of("z0")[1] == 2

    def test_shift_var_collision(self):
        f = FormalSeries.monomial(QONE, {"z0": 1, "z1": 1})
        with pytest.raises(ValueError):
            shift_sub(f, "z1", "z0", 1, 2)


def random_family(rng, p, nterms):
    fam = {}
    grid = [Q(k, p) for k in range(-p, p + 1)]
    while len(fam) < nterms:
        m = rng.choice(grid)
        n = rng.choice(grid)
        c = Q(rng.randint(-4, 4))
        if c:
            fam[(m, n)] = c
    return fam


class TestDeltaShiftIdentity:

    def test_fixed_example(self):
        # s = 1/2, p = 2, zeta = -1, two-term family
        fam = {(Q(1, 2), Q(-1, 2)): Q(2), (0, 1): Q(-1)}
        lhs, rhs = delta_shift_sides(fam, Q(1, 2), 2, 1, 6, 2)
        checked, bad = compare(lhs, rhs)
        assert not bad
        assert checked >= 20

    def test_phase_is_load_bearing(self):
        # dropping the zeta^(-p*m) phase on a fractional exponent must
        # produce mismatches, not a silent pass
        fam = {(Q(1, 2), 0): QONE}
        lhs, rhs = delta_shift_sides(fam, Q(0), 2, 1, 6, 2)
        flipped = rhs.scale(Q(-1))
        _, bad_ok = compare(lhs, rhs)
        _, bad_flip = compare(lhs, flipped)
        assert not bad_ok
        assert bad_flip

    def test_randomized(self):
        rng = random.Random(20260822)
        for p in (2, 3):
            for j in range(p):
                for s in (Q(0), Q(1, 2), Q(1)):
                    fam = random_family(rng, p, rng.randint(1, 3))
                    lhs, rhs = delta_shift_sides(fam, s, p, j, 5, 2)
                    c1, bad1 = compare(lhs, rhs)
                    assert not bad1
                    assert c1 >= 5

    def test_window_soundness_plus_two(self):
        fam = {(Q(1, 2), 0): Q(3), (Q(-1, 2), Q(1, 2)): Q(1)}
        small = delta_shift_sides(fam, Q(1, 2), 2, 1, 5, 2)
        big = delta_shift_sides(fam, Q(1, 2), 2, 1, 7, 4)
        for a, b in zip(small, big):
            checked, bad = compare(a, b)
            assert not bad
            assert checked >= 10


class TestWindowNarrowing:

    def test_product_window_uses_support(self):
        f = poly({(1, 0): QONE, (0, 1): Q(-1)})
        g = binom_expand("z1", "z2", Q(-1), ymax=4)
        prod = series_mul(f, g)
        # complete in z2 exactly up to the truncation order plus g's
        # lowest z2 support exponent (= 0)
        assert prod.window_of("z2")[1] == 4
        checked, bad = compare(prod, FormalSeries.one())
        assert not bad
        assert prod.coefficient({}) == 1
        assert prod.coefficient({"z1": -2, "z2": 3}) == 0

    def test_incomplete_region_never_reported(self):
        g = binom_expand("z1", "z2", Q(-1), ymax=3)
        h = series_mul(g, g)
        # z2 window of the square cannot exceed the factor windows
        assert h.window_of("z2")[1] <= 3
        for key in h.terms:
            i = h.vars.index("z2")
            assert key[i] <= 3 * h.den[i]

    def test_clip(self):
        d = delta_series(1, 1, -5, 5)
        c = d.clip({"z1": (-2, 2)})
        assert c.window_of("z1") == (-2, 2)
        assert len(c.terms) == 5
