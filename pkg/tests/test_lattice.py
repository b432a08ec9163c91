import pytest

from latvop.lattice import HVector, LatticeSystem, independent_subset
from latvop.scalar import Cyclotomic, Q


def a1_minus1():
    return LatticeSystem(gram=[[2]], nu=[[-1]], p=2, q=2)


def a2_coxeter():
    # Coxeter rotation on the hexagonal root system: e1 -> e2 -> -e1-e2
    return LatticeSystem(gram=[[2, -1], [-1, 2]], nu=[[0, -1], [1, -1]], p=3, q=6)


def rank2_relative():
    return LatticeSystem(gram=[[2, 0], [0, 2]], nu=[[1, 0], [0, 1]], p=1, q=2,
                         h_star_basis=[(1, 1)])


def rank1_untwisted():
    return LatticeSystem(gram=[[2]], nu=[[1]], p=1, q=2)


ALL = [a1_minus1, a2_coxeter, rank2_relative, rank1_untwisted]


def basis_vectors(sys):
    return [tuple(1 if j == i else 0 for j in range(sys.rank))
            for i in range(sys.rank)]


def test_validation_rejects_bad_input():
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[2, 1], [0, 2]], nu=[[1, 0], [0, 1]], p=1, q=2)
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[0]], nu=[[1]], p=1, q=2)  # singular
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[2]], nu=[[2]], p=1, q=2)  # not an isometry
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[2]], nu=[[-1]], p=3, q=6)  # nu^p != 1
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[1]], nu=[[1]], p=1, q=2)  # odd diagonal
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[2, 0], [0, 2]], nu=[[1, 0], [0, 1]], p=1, q=2,
                      h_star_basis=[(1, 1), (2, 2)])  # dependent h_* basis


def test_project_trivial_cases():
    sys = a1_minus1()
    a = sys.embed((1,))
    assert sys.project(a, "perp") == a
    assert sys.project(a, "star").is_zero()
    full = LatticeSystem(gram=[[2]], nu=[[1]], p=1, q=2, h_star_basis=[(1,)])
    assert full.project(full.embed((1,)), "perp").is_zero()
    assert full.project(full.embed((1,)), "star") == full.embed((1,))


def test_project_rank2_relative():
    sys = rank2_relative()
    v = sys.project(sys.embed((1, 0)), "perp")
    assert v == HVector((Q(1, 2), Q(-1, 2)))
    # complementarity and orthogonality
    star = sys.project(sys.embed((1, 0)), "star")
    assert star + v == sys.embed((1, 0))
    assert sys.form(v, sys.h_star_basis[0]).is_zero()


def test_project_nu_equivariance():
    for make in ALL:
        sys = make()
        for e in basis_vectors(sys):
            x = sys.embed(e)
            lhs = sys.project(sys.nu_apply(x), "perp")
            rhs = sys.nu_apply(sys.project(x, "perp"))
            assert lhs == rhs


def test_eigencomponent_reconstruction():
    for make in ALL:
        sys = make()
        for e in basis_vectors(sys):
            x = sys.embed(e)
            total = HVector.zero(sys.rank)
            for n in range(sys.p):
                c = sys.eigencomponent(x, n)
                total = total + c
                # eigenvalue property: nu c = w_p^n c
                w = Cyclotomic.root(sys.p, n) if sys.p > 1 else Cyclotomic.rational(1)
                assert sys.nu_apply(c) == c.scale(w)
            assert total == x


def test_eigencomponent_examples():
    triv = rank1_untwisted()
    assert triv.eigencomponent(triv.embed((1,)), 0) == triv.embed((1,))
    a1 = a1_minus1()
    assert a1.eigencomponent(a1.embed((1,)), 0).is_zero()
    assert a1.eigencomponent(a1.embed((1,)), 1) == a1.embed((1,))
    a2 = a2_coxeter()
    assert a2.eigencomponent(a2.embed((1, 0)), 0).is_zero()


def test_c0_values():
    a1 = a1_minus1()
    for m in range(-2, 3):
        for n in range(-2, 3):
            assert a1.c0((m,), (n,)) == 0  # 2*2mn/2 mod 2
            assert a1.c0_nu((m,), (n,)) == a1.c0((m,), (n,))
    a2 = a2_coxeter()
    assert a2.c0((1, 0), (0, 1)) == 3
    assert a2.c0((1, 0), (1, 0)) == 0
    assert a2.c0_nu((1, 0), (1, 0)) == 0


def test_c0_nu_direct_sum_a2():
    a2 = a2_coxeter()
    # brute-force the r-sum for a pair of generators
    e1, e2 = (1, 0), (0, 1)
    acc = Q(0)
    for r in range(3):
        acc += (Q(6, 2) + Q(6 * r, 3)) * a2.form_q(a2.embed(a2.nu_lattice(e1, r)),
                                                   a2.embed(e2))
    assert a2.c0_nu(e1, e2) == int(acc) % 6


def test_eps0_values():
    assert a1_minus1().eps0((1,), (1,)) == 0
    assert rank1_untwisted().eps0((1,), (1,)) == 0
    a2 = a2_coxeter()
    # single term r=1: (q/2 + q/p) <nu^{-1} a1, a2>
    assert a2.eps0((1, 0), (0, 1)) == (5 * -1) % 6
    assert a2.eps0((1, 0), (1, 0)) == 1


def test_eps0_antisymmetrization():
    for make in ALL:
        sys = make()
        for a in basis_vectors(sys):
            for b in basis_vectors(sys):
                lhs = (sys.eps0(a, b) - sys.eps0(b, a)) % sys.q
                rhs = (sys.c0(a, b) - sys.c0_nu(a, b)) % sys.q
                assert lhs == rhs


def test_c0_nu_invariance():
    for make in ALL:
        sys = make()
        for a in basis_vectors(sys):
            for b in basis_vectors(sys):
                na, nb = sys.nu_lattice(a), sys.nu_lattice(b)
                assert sys.c0(na, nb) == sys.c0(a, b)
                assert sys.c0_nu(na, nb) == sys.c0_nu(a, b)


def test_general_mode_tables():
    # same A2 system, maps supplied as explicit tables
    a2 = a2_coxeter()
    l, q = 2, 6
    bs = [(1, 0), (0, 1)]
    tab = lambda f: [[f(bs[i], bs[j]) for j in range(l)] for i in range(l)]
    gen = LatticeSystem(gram=[[2, -1], [-1, 2]], nu=[[0, -1], [1, -1]], p=3, q=6,
                        even_mode=False, c0_table=tab(a2.c0),
                        c0_nu_table=tab(a2.c0_nu), eps0_table=tab(a2.eps0))
    for a in bs:
        for b in bs:
            assert gen.c0(a, b) == a2.c0(a, b)
            assert gen.c0_nu(a, b) == a2.c0_nu(a, b)
    with pytest.raises(ValueError):
        LatticeSystem(gram=[[2, -1], [-1, 2]], nu=[[0, -1], [1, -1]], p=3, q=6,
                      even_mode=False, c0_table=[[0, 1], [1, 0]],
                      c0_nu_table=tab(a2.c0_nu), eps0_table=tab(a2.eps0))


def test_eigenspace_bases():
    a1 = a1_minus1()
    assert a1.eigenspace_basis(0) == []
    assert len(a1.eigenspace_basis(1)) == 1
    a2 = a2_coxeter()
    assert a2.eigenspace_basis(0) == []
    assert len(a2.eigenspace_basis(1)) == 1
    assert len(a2.eigenspace_basis(2)) == 1
    rel = rank2_relative()
    assert len(rel.eigenspace_basis(0, sub="perp")) == 1
    assert len(rel.eigenspace_basis(0, sub="star")) == 1
    assert len(rel.eigenspace_basis(0, sub="full")) == 2


def test_dual_basis():
    for make in ALL:
        sys = make()
        basis = sys.eigenspace_basis(0, sub="full")
        if not basis:
            continue
        dual = sys.dual_basis(basis)
        for i, d in enumerate(dual):
            for j, b in enumerate(basis):
                assert sys.form(d, b) == (1 if i == j else 0)


def test_independent_subset():
    vs = [HVector((1, 1)), HVector((2, 2)), HVector((0, 1))]
    sub = independent_subset(vs)
    assert len(sub) == 2
