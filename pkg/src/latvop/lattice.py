"""Rational lattices with a finite-order isometry.

A ``LatticeSystem`` packages the Gram matrix of a rank-l lattice, an isometry
``nu`` with nu^p = 1, the modulus q (p | q, q even), and an optional
nu-stable subspace h_* on which the form stays nonsingular.  It derives the
projections onto h_* and its orthogonal complement, the omega_p-eigenspace
decomposition, and the three Z/qZ-valued bilinear maps (commutator maps for
the two central extensions and the exponent eps0 comparing their
multiplications).

Vectors of the ambient space h = C (x) L carry cyclotomic coordinates;
lattice elements are plain integer coordinate tuples on the fixed basis.
"""

from __future__ import annotations

from .scalar import Cyclotomic, Q, QZERO, as_int


class HVector:
    """Element of h on the lattice basis, cyclotomic coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        self.coords = tuple(
            c if isinstance(c, Cyclotomic) else Cyclotomic.rational(c)
            for c in coords)

    @staticmethod
    def zero(rank: int) -> "HVector":
        return HVector((Cyclotomic.rational(0),) * rank)

    def __add__(self, other):
        return HVector(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        return HVector(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return HVector(-a for a in self.coords)

    def scale(self, s) -> "HVector":
        return HVector(a * s for a in self.coords)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)

    def __eq__(self, other):
        return self.coords == tuple(other.coords)

    __hash__ = None

    def key(self):
        return tuple(c.key() for c in self.coords)

    def __repr__(self):
        return "(" + ", ".join(repr(c) for c in self.coords) + ")"


def _as_hvector(x, rank: int) -> HVector:
    if isinstance(x, HVector):
        return x
    x = tuple(x)
    if len(x) != rank:
        raise ValueError(f"expected {rank} coordinates, got {len(x)}")
    return HVector(x)


def _mat_inverse(rows):
    """Exact inverse of a square matrix of Cyclotomic entries."""
    n = len(rows)
    aug = [list(rows[i]) + [Cyclotomic.rational(1 if j == i else 0)
                            for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inv()
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def independent_subset(vectors):
    """Reduce a list of HVectors to a maximal linearly independent subset."""
    basis = []
    rows = []
    for v in vectors:
        row = list(v.coords)
        for prow in rows:
            lead = next((i for i, c in enumerate(prow) if not c.is_zero()))
            if not row[lead].is_zero():
                f = row[lead] / prow[lead]
                row = [a - f * b for a, b in zip(row, prow)]
        if any(not c.is_zero() for c in row):
            rows.append(row)
            basis.append(v)
    return basis


class LatticeSystem:
    """Immutable lattice + isometry + relativizing-subspace bundle."""

    def __init__(self, gram, nu, p, q, h_star_basis=(), even_mode=True,
                 c0_table=None, c0_nu_table=None, eps0_table=None):
        self.rank = len(gram)
        self.gram = tuple(tuple(Q(v) for v in row) for row in gram)
        self.nu = tuple(tuple(int(v) for v in row) for row in nu)
        self.p = int(p)
        self.q = int(q)
        self.even_mode = bool(even_mode)
        self._c0_table = c0_table
        self._c0_nu_table = c0_nu_table
        self._eps0_table = eps0_table
        self.h_star_basis = tuple(_as_hvector(v, self.rank) for v in h_star_basis)
        self._validate()
        self._nu_pows = [self._nu_power(r) for r in range(self.p)]
        self._validate_hstar()
        self._proj_star = self._projection_matrix()

    # -- validation --------------------------------------------------------

    def _validate(self):
        l, G, N = self.rank, self.gram, self.nu
        if any(len(row) != l for row in G) or any(len(row) != l for row in N):
            raise ValueError("gram and nu must be square of the same rank")
        if self.p < 1 or self.q < 1 or self.q % self.p:
            raise ValueError("need p >= 1 and p | q")
        if self.q % 2:
            raise ValueError("modulus q must be even")
        for i in range(l):
            for j in range(l):
                if G[i][j] != G[j][i]:
                    raise ValueError("gram matrix is not symmetric")
        if self._det_rational(G) == 0:
            raise ValueError("gram matrix is singular (form must be nondegenerate)")
        # nu preserves the form
        for i in range(l):
            for j in range(l):
                acc = QZERO
                for a in range(l):
                    for b in range(l):
                        acc += Q(N[a][i]) * G[a][b] * Q(N[b][j])
                if acc != G[i][j]:
                    raise ValueError("nu is not an isometry of the form")
        # nu^p = 1
        M = self._nu_power(self.p)
        if any(M[i][j] != (1 if i == j else 0) for i in range(l) for j in range(l)):
            raise ValueError("nu^p is not the identity")
        if self.even_mode:
            for i in range(l):
                if as_int(G[i][i]) % 2:
                    raise ValueError("even mode requires even diagonal")
                if any(G[i][j].denominator != 1 for j in range(l)):
                    raise ValueError("even mode requires an integral form")
            if self.p % 2 == 0:
                H = self._nu_power(self.p // 2)
                for i in range(l):
                    acc = QZERO
                    for a in range(l):
                        acc += Q(H[a][i]) * G[a][i]
                    if as_int(acc) % 2:
                        raise ValueError("even mode with even period requires "
                                         "even half-turn diagonal values")
        else:
            if self._c0_table is None or self._c0_nu_table is None \
                    or self._eps0_table is None:
                raise ValueError("general mode requires explicit c0/c0_nu/eps0 tables")
            self._validate_tables()

    def _validate_hstar(self):
        # h_* must be nu-stable with a nonsingular restricted form
        if not self.h_star_basis:
            return
        k = len(self.h_star_basis)
        if len(independent_subset(list(self.h_star_basis))) != k:
            raise ValueError("h_* basis is linearly dependent")
        for v in self.h_star_basis:
            w = self.nu_apply(v)
            if not self._in_span(w, self.h_star_basis):
                raise ValueError("h_* is not nu-stable")
        sub = [[self.form(a, b) for b in self.h_star_basis]
               for a in self.h_star_basis]
        try:
            _mat_inverse([[x for x in row] for row in sub])
        except ValueError:
            raise ValueError("form restricted to h_* is singular") from None

    def _validate_tables(self):
        l, q = self.rank, self.q
        for name, tab, alt in (("c0", self._c0_table, False),
                               ("c0_nu", self._c0_nu_table, False),
                               ("eps0", self._eps0_table, True)):
            if len(tab) != l or any(len(row) != l for row in tab):
                raise ValueError(f"{name} table must be {l}x{l}")
        e = lambda i, j: self._eps0_table[i][j] % q
        c = lambda i, j: self._c0_table[i][j] % q
        cn = lambda i, j: self._c0_nu_table[i][j] % q
        for i in range(l):
            for j in range(l):
                if c(i, j) != (-c(j, i)) % q or cn(i, j) != (-cn(j, i)) % q:
                    raise ValueError("commutator tables must be alternating")
                if (e(i, j) - e(j, i)) % q != (c(i, j) - cn(i, j)) % q:
                    raise ValueError("eps0 table must antisymmetrize to c0 - c0_nu")

    def _det_rational(self, G):
        rows = [list(row) for row in G]
        n = len(rows)
        det = Q(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
            if piv is None:
                return Q(0)
            if piv != col:
                rows[col], rows[piv] = rows[piv], rows[col]
                det = -det
            det *= rows[col][col]
            inv = Q(1) / rows[col][col]
            for r in range(col + 1, n):
                f = rows[r][col] * inv
                if f:
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
        return det

    def _nu_power(self, k: int):
        l = self.rank
        M = [[1 if i == j else 0 for j in range(l)] for i in range(l)]
        for _ in range(k):
            M = [[sum(self.nu[i][a] * M[a][j] for a in range(l))
                  for j in range(l)] for i in range(l)]
        return M

    # -- basic geometry ----------------------------------------------------

    def embed(self, alpha) -> HVector:
        """Lattice vector (integer tuple) as an element of h."""
        return _as_hvector(alpha, self.rank)

    def form(self, x, y) -> Cyclotomic:
        """The symmetric bilinear form, extended bilinearly over scalars."""
        x = _as_hvector(x, self.rank)
        y = _as_hvector(y, self.rank)
        acc = Cyclotomic.rational(0)
        for i, xi in enumerate(x.coords):
            if xi.is_zero():
                continue
            row = self.gram[i]
            for j, yj in enumerate(y.coords):
                if not yj.is_zero() and row[j]:
                    acc = acc + xi * yj * Cyclotomic.rational(row[j])
        return acc

    def form_q(self, x, y):
        """The form as an exact rational (raises if the value is not)."""
        v = self.form(x, y)
        return v.as_rational()

    def nu_apply(self, x, power: int = 1) -> HVector:
        x = _as_hvector(x, self.rank)
        l = self.rank
        M = self._nu_pows[power % self.p]
        out = []
        for i in range(l):
            acc = Cyclotomic.rational(0)
            for j in range(l):
                if M[i][j]:
                    acc = acc + x.coords[j] * M[i][j]
            out.append(acc)
        return HVector(out)

    def nu_lattice(self, alpha, power: int = 1) -> tuple:
        """nu^power on an integer lattice vector, staying integral."""
        l = self.rank
        M = self._nu_pows[power % self.p]
        return tuple(sum(M[i][j] * alpha[j] for j in range(l)) for i in range(l))

    # -- projections and eigencomponents -----------------------------------

    def _projection_matrix(self):
        """Matrix of the projection h -> h_* on the lattice basis."""
        l = self.rank
        if not self.h_star_basis:
            return None
        basis = self.h_star_basis
        k = len(basis)
        sub = [[self.form(a, b) for b in basis] for a in basis]
        inv = _mat_inverse(sub)
        cols = []
        for i in range(l):
            e_i = HVector([1 if j == i else 0 for j in range(l)])
            rhs = [self.form(e_i, b) for b in basis]
            coeffs = [sum((inv[r][s] * rhs[s] for s in range(k)),
                          Cyclotomic.rational(0)) for r in range(k)]
            v = HVector.zero(l)
            for cf, b in zip(coeffs, basis):
                v = v + b.scale(cf)
            cols.append(v)
        return cols

    def project(self, x, which: str) -> HVector:
        """x' (``perp``) or x'' (``star``) with x = x' + x''."""
        x = _as_hvector(x, self.rank)
        if which not in ("perp", "star"):
            raise ValueError("which must be 'perp' or 'star'")
        if self._proj_star is None:
            return x if which == "perp" else HVector.zero(self.rank)
        star = HVector.zero(self.rank)
        for i, xi in enumerate(x.coords):
            if not xi.is_zero():
                star = star + self._proj_star[i].scale(xi)
        return x - star if which == "perp" else star

    def eigencomponent(self, x, n: int) -> HVector:
        """Component of x in the omega_p^n eigenspace of nu."""
        x = _as_hvector(x, self.rank)
        p = self.p
        acc = HVector.zero(self.rank)
        for r in range(p):
            w = Cyclotomic.root(p, (-n * r) % p) if p > 1 else Cyclotomic.rational(1)
            acc = acc + self.nu_apply(x, r).scale(w)
        return acc.scale(Q(1, p))

    def eigenspace_basis(self, n: int, sub: str = "perp"):
        """Basis of the omega_p^n eigenspace of h_*^perp (or h_*, or h)."""
        if sub == "perp":
            gens = [self.project(self.embed(tuple(1 if j == i else 0
                                                  for j in range(self.rank))), "perp")
                    for i in range(self.rank)]
        elif sub == "star":
            gens = list(self.h_star_basis)
        elif sub == "full":
            gens = [self.embed(tuple(1 if j == i else 0 for j in range(self.rank)))
                    for i in range(self.rank)]
        else:
            raise ValueError("sub must be 'perp', 'star', or 'full'")
        comps = [self.eigencomponent(g, n) for g in gens]
        return independent_subset([c for c in comps if not c.is_zero()])

    def dual_basis(self, basis):
        """Dual family wrt the form: form(dual[i], basis[j]) = delta_ij."""
        k = len(basis)
        sub = [[self.form(a, b) for b in basis] for a in basis]
        inv = _mat_inverse(sub)
        out = []
        for i in range(k):
            v = HVector.zero(self.rank)
            for j in range(k):
                v = v + basis[j].scale(inv[j][i])
            out.append(v)
        return out

    def _in_span(self, v, basis) -> bool:
        return len(independent_subset(list(basis) + [v])) == \
            len(independent_subset(list(basis)))

    # -- the three Z/q-valued maps ------------------------------------------

    def _bilinear_table(self, table, alpha, beta) -> int:
        acc = 0
        for i, a in enumerate(alpha):
            if not a:
                continue
            for j, b in enumerate(beta):
                if b:
                    acc += a * b * table[i][j]
        return acc % self.q

    def c0(self, alpha, beta) -> int:
        """Commutator exponent of the plain central extension, mod q."""
        if not self.even_mode:
            return self._bilinear_table(self._c0_table, alpha, beta)
        v = Q(self.q) * self.form_q(self.embed(alpha), self.embed(beta)) / 2
        return as_int(v) % self.q

    def c0_nu(self, alpha, beta) -> int:
        """Commutator exponent of the twisted central extension, mod q."""
        if not self.even_mode:
            return self._bilinear_table(self._c0_nu_table, alpha, beta)
        q, p = self.q, self.p
        acc = Q(0)
        for r in range(p):
            acc += (Q(q, 2) + Q(q * r, p)) * \
                self.form_q(self.embed(self.nu_lattice(alpha, r)), self.embed(beta))
        return as_int(acc) % q

    def eps0(self, alpha, beta) -> int:
        """Exponent relating the two multiplications, mod q."""
        if not self.even_mode:
            return self._bilinear_table(self._eps0_table, alpha, beta)
        q, p = self.q, self.p
        acc = Q(0)
        for r in range(1, (p + 1) // 2 if p % 2 else p // 2):
            acc += (Q(q, 2) + Q(q * r, p)) * \
                self.form_q(self.embed(self.nu_lattice(alpha, -r)), self.embed(beta))
        return as_int(acc) % q
