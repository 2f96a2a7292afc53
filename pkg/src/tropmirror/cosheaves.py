"""The five cosheaves on the cell posets and their chain complexes.

Tags:

* ``multitangent``  F_p: sum over edges of sigma of Lambda^p of the edge
  annihilator modulo the stratum span; on refined cells off infinity the
  value is pulled back from the collapsed cell (0, sigma).
* ``kernel``        R_p: stratum span wedge F_{p-1} of the boundary part of
  sigma; supported off infinity.
* ``mirror_ext``    the extension of the mirror cosheaf: the quotient of
  F_p(0, sigma) by R_p off infinity and F_p itself at infinity.
* ``mirror``        M_p: mirror_ext restricted to the sphere part; rank-1
  constant when p = 0 there.
* ``quotient``      Q_p: mirror_ext restricted to cells with sigma on the
  boundary (the unbounded part).

Values are FreeQuotient presentations with canonical HNF bases; values on a
stratum tau live in Lambda^p of explicit unimodular quotient coordinates, so
every cosheaf map is a literal integer matrix (and reduces mod 2 for F2
complexes).  Zero values outside a support are materialized as rank-0 blocks
so that one assembly routine serves every complex.
"""

from itertools import combinations

from .chains import ChainComplex
from .errors import FreenessError, UnsupportedCell
from .exterior import (
    dim_wedge,
    index_pos,
    index_sets,
    shuffle_sign,
    wedge_matrix,
    wedge_rows,
)
from .intlinalg import (
    hnf_basis,
    identity,
    inverse_unimodular,
    left_kernel,
    mat_mul,
    smith,
    vec_mat,
)
from .modules import FreeQuotient

ZERO_STRATUM = ()


class Frame:
    """Unimodular coordinates on the quotient of Z^m by a stratum span.

    Q (m x (m-k)) projects, R ((m-k) x m) lifts; the generators must be part
    of a lattice basis (they are, for unimodular central triangulations).
    """

    __slots__ = ("gens", "m", "k", "Q", "R")

    def __init__(self, gens, m):
        self.gens = tuple(gens)
        self.m = m
        self.k = len(self.gens)
        if not self.gens:
            self.Q = identity(m)
            self.R = identity(m)
            return
        G = [list(g) for g in self.gens]
        # unimodular completion via Smith form: U G V = [I | 0] exactly when
        # the span is a direct summand, and then [G; inv(V)[k:]] is unimodular
        S, U, V = smith(G)
        if any(S[i][i] != 1 for i in range(self.k)):
            raise FreenessError(
                f"stratum span {self.gens} is not a direct summand of the lattice"
            )
        W = inverse_unimodular(V)
        E = G + W[self.k :]
        Einv = inverse_unimodular(E)
        self.Q = [row[self.k :] for row in Einv]
        self.R = E[self.k :]


class CosheafEvaluator:
    """Memoized cosheaf values and maps for one orientation of a pair.

    Values and maps are pure functions of their keys; the caches fill on
    first use (warm them single-threaded before sharing across threads,
    after which all access is read-only).
    """

    TAGS = ("multitangent", "kernel", "mirror", "mirror_ext", "quotient")

    def __init__(self, ambient_tri, newton_tri):
        self.ambient = ambient_tri
        self.newton = newton_tri
        self.m = newton_tri.rank
        self.origin = (0,) * self.m
        self._frames = {}
        self._edge_basis = {}
        self._values = {}
        self._zero_values = {}
        self._maps = {}

    # -- frames and edge data ---------------------------------------------------
    def frame(self, gens):
        if gens not in self._frames:
            self._frames[gens] = Frame(gens, self.m)
        return self._frames[gens]

    def stratum_gens(self, tau):
        """Generators of the cone span: nonzero vertices of tau."""
        return tuple(p for p in tau if p != self.origin)

    def edge_annihilator_basis(self, stratum, a, b):
        """HNF basis of (edge direction)-perp / (stratum span), in frame coords."""
        d = tuple(x - y for x, y in zip(b, a))
        key = (stratum, d if d > tuple(-x for x in d) else tuple(-x for x in d))
        if key not in self._edge_basis:
            fr = self.frame(stratum)
            perp = left_kernel([[x] for x in d])
            proj = [vec_mat(list(r), fr.Q) for r in perp]
            self._edge_basis[key] = hnf_basis(proj)
        return self._edge_basis[key]

    # -- values -----------------------------------------------------------------
    def _zero(self, ambient_dim):
        if ambient_dim not in self._zero_values:
            self._zero_values[ambient_dim] = FreeQuotient(ambient_dim, [])
        return self._zero_values[ambient_dim]

    def _multitangent_rows(self, p, stratum, sigma):
        fr = self.frame(stratum)
        q = self.m - fr.k
        rows = []
        for a, b in combinations(sigma, 2):
            B = self.edge_annihilator_basis(stratum, a, b)
            for sub in combinations(B, p):
                rows.append(wedge_rows(list(sub), q))
        return rows

    def multitangent_value(self, p, stratum, sigma):
        key = ("F", p, stratum, sigma)
        if key not in self._values:
            fr = self.frame(stratum)
            q = self.m - fr.k
            amb = dim_wedge(q, p)
            if len(sigma) < 2 or amb == 0:
                self._values[key] = self._zero(max(amb, 1))
            elif p == 0:
                self._values[key] = FreeQuotient(1, [(1,)])
            else:
                self._values[key] = FreeQuotient(
                    amb, self._multitangent_rows(p, stratum, sigma)
                )
        return self._values[key]

    def kernel_rows(self, p, tau, sigma):
        """Span rows of (stratum span) wedge F_{p-1}(0, boundary part of sigma)."""
        if p == 0:
            return []
        sigma_inf = tuple(x for x in sigma if x != self.origin)
        prev = self.multitangent_value(p - 1, ZERO_STRATUM, sigma_inf)
        rows = []
        for u in self.stratum_gens(tau):
            for i in range(prev.rank):
                rows.append(self._wedge_vector(u, prev.rep(i), p - 1))
        return rows

    def _wedge_vector(self, u, w, pw):
        """u wedge w for a vector u and a degree-pw Pluecker vector w."""
        m = self.m
        out = [0] * dim_wedge(m, pw + 1)
        pos = index_pos(m, pw + 1)
        sets = index_sets(m, pw)
        for t, I in enumerate(sets):
            c = w[t]
            if not c:
                continue
            si = set(I)
            for i in range(m):
                if u[i] and i not in si:
                    K = tuple(sorted((i,) + I))
                    out[pos[K]] += shuffle_sign((i,), I) * u[i] * c
        return out

    def kernel_value(self, p, cell):
        tau, sigma = cell.tau, cell.sigma
        amb = dim_wedge(self.m, p)
        if self.origin in tau or amb == 0:
            return self._zero(max(amb, 1))
        key = ("R", p, self.stratum_gens(tau), tuple(x for x in sigma if x != self.origin))
        if key not in self._values:
            rows = self.kernel_rows(p, tau, sigma)
            self._values[key] = FreeQuotient(amb, rows)
        return self._values[key]

    def mirror_ext_value(self, p, cell):
        tau, sigma = cell.tau, cell.sigma
        if self.origin in tau:
            return self.multitangent_value(p, self.stratum_gens(tau), sigma)
        key = ("MD", p, self.stratum_gens(tau), sigma)
        if key not in self._values:
            base = self.multitangent_value(p, ZERO_STRATUM, sigma)
            if base.rank == 0:
                self._values[key] = base
            else:
                self._values[key] = FreeQuotient(
                    base.ambient, base.sub, self.kernel_rows(p, tau, sigma)
                )
        return self._values[key]

    def value(self, tag, p, cell):
        if tag == "multitangent":
            tau, sigma = cell.tau, cell.sigma
            stratum = self.stratum_gens(tau) if self.origin in tau else ZERO_STRATUM
            return self.multitangent_value(p, stratum, sigma)
        if tag == "kernel":
            return self.kernel_value(p, cell)
        if tag == "mirror_ext":
            return self.mirror_ext_value(p, cell)
        if tag == "mirror":
            if self.origin in cell.sigma and self.origin not in cell.tau:
                return self.mirror_ext_value(p, cell)
            return self._zero(max(dim_wedge(self.m, p), 1))
        if tag == "quotient":
            if self.origin not in cell.sigma:
                return self.mirror_ext_value(p, cell)
            return self._zero(max(dim_wedge(self.m, p), 1))
        raise UnsupportedCell(f"unknown cosheaf tag {tag!r}")

    def value_stratum(self, tag, cell):
        """The frame whose wedge coordinates carry the value on this cell."""
        if tag in ("kernel", "mirror"):
            return ZERO_STRATUM
        if self.origin in cell.tau:
            return self.stratum_gens(cell.tau)
        return ZERO_STRATUM

    # -- maps -------------------------------------------------------------------
    def map_matrix(self, tag, p, ycell, xcell):
        """Matrix of the cosheaf map value(x) -> value(y) for a cover y below x."""
        key = (tag, p, ycell.key, xcell.key)
        if key in self._maps:
            return self._maps[key]
        Vx = self.value(tag, p, xcell)
        Vy = self.value(tag, p, ycell)
        if Vx.rank == 0 or Vy.rank == 0:
            m = [[0] * Vy.rank for _ in range(Vx.rank)]
            self._maps[key] = m
            return m
        sx = self.value_stratum(tag, xcell)
        sy = self.value_stratum(tag, ycell)
        W = None
        if sx != sy:
            P = mat_mul(self.frame(sx).R, self.frame(sy).Q)
            W = wedge_matrix(P, p)
        rows = []
        for i in range(Vx.rank):
            a = list(Vx.rep(i))
            if W is not None:
                a = vec_mat(a, W)
            rows.append(list(Vy.reduce(a)))
        self._maps[key] = rows
        return rows

    # -- complexes ----------------------------------------------------------------
    def chain_complex(self, poset, tag, p, sign=None, check=True):
        ranks = [self.value(tag, p, c).rank for c in poset.cells]
        blocks = {}
        for (yi, xi) in poset.covers:
            if ranks[yi] and ranks[xi]:
                blocks[(yi, xi)] = self.map_matrix(
                    tag, p, poset.cells[yi], poset.cells[xi]
                )
        return ChainComplex(poset, ranks, blocks, sign or poset.sign, check=check)
