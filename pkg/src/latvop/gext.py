"""Central extensions of the lattice by a cyclic group of order q.

Both extension groups (the plain one and the twisted one) are realized on
the same underlying set: pairs (base, kpow) with base a lattice vector and
kpow an exponent of the central generator kappa, multiplied through a fixed
bilinear section cocycle.  On the ordered lattice basis the cocycle is
  eps_hat(e_i, e_j) = c0(e_i, e_j)  for i > j,  0 otherwise,
extended bilinearly; its antisymmetrization is c0, and subtracting eps0
gives the section of the twisted group, so the two multiplications differ
by exactly kappa^{eps0} on identified elements.

The lifting nu_hat of the isometry acts as (x, j) -> (nu x, j + phi(x))
where phi is a quadratic refinement whose polarization is forced by the
cocycle and whose linear part lambda is solved for, requiring nu_hat^p = 1
and nu_hat a = a on nu-fixed vectors.  All admissible lambda are kept; the
lexicographically smallest is used.
"""

from __future__ import annotations

from typing import NamedTuple

from .lattice import LatticeSystem

UNTWISTED = "untwisted"
TWISTED = "twisted"


class HatElement(NamedTuple):
    base: tuple
    kpow: int


def integer_kernel_basis(A):
    """Basis of {x integral : A x = 0} via column reduction (exact)."""
    m = len(A)
    n = len(A[0]) if m else 0
    A = [list(row) for row in A]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(j, k, f):
        # col_j += f * col_k
        for r in range(m):
            A[r][j] += f * A[r][k]
        for r in range(n):
            U[r][j] += f * U[r][k]

    def colswap(j, k):
        for r in range(m):
            A[r][j], A[r][k] = A[r][k], A[r][j]
        for r in range(n):
            U[r][j], U[r][k] = U[r][k], U[r][j]

    lead = 0
    for row in range(m):
        while True:
            nz = [j for j in range(lead, n) if A[row][j]]
            if not nz:
                break
            piv = min(nz, key=lambda j: abs(A[row][j]))
            if piv != lead:
                colswap(piv, lead)
            done = True
            for j in range(lead + 1, n):
                if A[row][j]:
                    colop(j, lead, -(A[row][j] // A[row][lead]))
                    if A[row][j]:
                        done = False
            if done:
                lead += 1
                break
    return [tuple(U[r][j] for r in range(n)) for j in range(lead, n)]


class HatGroup:
    """The two central extensions over one LatticeSystem."""

    def __init__(self, system: LatticeSystem):
        self.system = system
        self.q = system.q
        l = system.rank
        basis = [tuple(1 if j == i else 0 for j in range(l)) for i in range(l)]
        self._eps_table = [[system.c0(basis[i], basis[j]) if i > j else 0
                            for j in range(l)] for i in range(l)]
        nb = [system.nu_lattice(b) for b in basis]
        self._delta = [[(self._bil(self._eps_table, nb[i], nb[j])
                         - self._eps_table[i][j]) % self.q
                        for j in range(l)] for i in range(l)]
        self._lambda = None
        self._lambda_all = None

    # -- section cocycles ---------------------------------------------------

    def _bil(self, table, x, y) -> int:
        acc = 0
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if b:
                    acc += a * b * table[i][j]
        return acc % self.q

    def eps_hat(self, x, y, group: str = UNTWISTED) -> int:
        """Section cocycle value on lattice vectors, mod q."""
        v = self._bil(self._eps_table, x, y)
        if group == TWISTED:
            v = (v - self.system.eps0(x, y)) % self.q
        elif group != UNTWISTED:
            raise ValueError(f"unknown group {group!r}")
        return v

    # -- group structure ----------------------------------------------------

    def elem(self, base, kpow: int = 0) -> HatElement:
        base = tuple(int(v) for v in base)
        if len(base) != self.system.rank:
            raise ValueError("wrong rank")
        return HatElement(base, kpow % self.q)

    def identity(self) -> HatElement:
        return self.elem((0,) * self.system.rank, 0)

    def kappa(self, power: int = 1) -> HatElement:
        return self.elem((0,) * self.system.rank, power)

    def mul(self, a: HatElement, b: HatElement, group: str = UNTWISTED) -> HatElement:
        k = (a.kpow + b.kpow + self.eps_hat(a.base, b.base, group)) % self.q
        return HatElement(tuple(x + y for x, y in zip(a.base, b.base)), k)

    def inverse(self, a: HatElement, group: str = UNTWISTED) -> HatElement:
        neg = tuple(-x for x in a.base)
        # (x,j)(-x, k) = (0, j+k+eps(x,-x)); eps(x,-x) = -eps(x,x)
        k = (-a.kpow + self.eps_hat(a.base, a.base, group)) % self.q
        return HatElement(neg, k)

    def commutator(self, a: HatElement, b: HatElement, group: str = UNTWISTED) -> int:
        """kappa-exponent of a b a^-1 b^-1 (the base parts cancel)."""
        ab = self.mul(a, b, group)
        ba = self.mul(b, a, group)
        return (ab.kpow - ba.kpow) % self.q

    def power(self, a: HatElement, k: int, group: str = UNTWISTED) -> HatElement:
        if k < 0:
            return self.power(self.inverse(a, group), -k, group)
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, a, group)
        return out

    def identify(self, a: HatElement) -> HatElement:
        """Set-theoretic identification between the two extensions.

        The same (base, kpow) pair names an element of either group; the
        products then differ by kappa^{eps0} (see identify_defect).
        """
        return a

    def identify_defect(self, a: HatElement, b: HatElement) -> int:
        """kappa-exponent by which the plain product exceeds the twisted one."""
        u = self.mul(a, b, UNTWISTED)
        t = self.mul(a, b, TWISTED)
        return (u.kpow - t.kpow) % self.q

    # -- the lifting of nu --------------------------------------------------

    def _phi(self, x, lam) -> int:
        l = self.system.rank
        acc = 0
        for i in range(l):
            xi = x[i]
            if not xi:
                continue
            acc += lam[i] * xi
            acc += self._delta[i][i] * (xi * (xi - 1) // 2)
            for j in range(i + 1, l):
                if x[j]:
                    acc += self._delta[i][j] * xi * x[j]
        return acc % self.q

    def _lambda_candidates(self):
        system = self.system
        if not system.even_mode:
            raise ValueError("nu_hat requires even-lattice mode")
        l, q, p = system.rank, self.q, system.p
        basis = [tuple(1 if j == i else 0 for j in range(l)) for i in range(l)]
        # eps0 must be nu-invariant for one phi to serve both groups
        for a in basis:
            for b in basis:
                if system.eps0(system.nu_lattice(a), system.nu_lattice(b)) \
                        != system.eps0(a, b):
                    raise ValueError("eps0 is not nu-invariant; no shared lifting")
        one_minus_nu = [[(1 if i == j else 0) - system.nu[i][j] for j in range(l)]
                        for i in range(l)]
        fixed = integer_kernel_basis(one_minus_nu)
        probes = [tuple(v) for v in basis]
        probes += [tuple(2 * x for x in v) for v in basis]
        probes += [tuple(x + y for x, y in zip(basis[i], basis[j]))
                   for i in range(l) for j in range(i + 1, l)]
        fixed_probes = list(fixed)
        fixed_probes += [tuple(2 * x for x in v) for v in fixed]
        fixed_probes += [tuple(x + y for x, y in zip(fixed[i], fixed[j]))
                         for i in range(len(fixed)) for j in range(i + 1, len(fixed))]

        def admissible(lam):
            for x in fixed_probes:
                if self._phi(x, lam) % q:
                    return False
            for x in probes:
                tot = 0
                for r in range(p):
                    tot += self._phi(system.nu_lattice(x, r), lam)
                if tot % q:
                    return False
            return True

        out = []
        tup = [0] * l
        while True:
            if admissible(tuple(tup)):
                out.append(tuple(tup))
            i = l - 1
            while i >= 0 and tup[i] == q - 1:
                tup[i] = 0
                i -= 1
            if i < 0:
                break
            tup[i] += 1
        return out

    @property
    def nu_hat_solutions(self):
        """All admissible lambda-corrections, lexicographically ordered."""
        if self._lambda_all is None:
            self._lambda_all = self._lambda_candidates()
            if not self._lambda_all:
                raise ValueError(
                    "no lambda-correction lifts nu with nu_hat^p = 1; "
                    "the configured section cocycle admits no valid lifting")
            self._lambda = self._lambda_all[0]
        return self._lambda_all

    def nu_hat(self, a: HatElement, power: int = 1) -> HatElement:
        """The lifted isometry (an automorphism of both extensions)."""
        _ = self.nu_hat_solutions  # resolve lambda on first use
        out = a
        for _r in range(power % self.system.p if self.system.p > 1 else 0):
            k = (out.kpow + self._phi(out.base, self._lambda)) % self.q
            out = HatElement(self.system.nu_lattice(out.base), k)
        return out
