"""Graded thin cell posets for a dual pair of central triangulations.

A cell is a pair (tau, sigma) of simplices, tau from the triangulation that
generates the ambient fan, sigma from the Newton-side triangulation.  The
base poset consists of pairs with 0 in tau and sigma inside the face of the
Newton polytope normal to the smallest coarse cone containing the cone over
tau; the refined poset splits the cells at infinity along the sphere of
bounded cells and drops the single interior top cell.  The order is reverse
inclusion in both coordinates and the grading is

    dim(tau, sigma) = (rank - dim tau) - dim sigma.

Cover relations grow exactly one coordinate by one vertex.  The default
signature on the covers is deterministic and orientation-coherent: each
coordinate carries simplicial coboundary signs (position of the new vertex
in the sorted vertex list) and sigma-covers pick up the Koszul factor
(-1)^(rank - dim tau).  It satisfies the diamond condition on every length-2
interval, which is re-verified at build time together with gradedness and
thinness.  balanced_signature solves the diamond system afresh over F2 when
an independent solution is wanted.
"""

from .errors import NotAtInfinity, NotDualPair, NotInJ, PosetInvalid, Unsolvable


class Cell:
    """A poset element: simplices stored as sorted tuples of lattice points."""

    __slots__ = ("tau", "sigma", "dim", "index")

    def __init__(self, tau, sigma, rank):
        self.tau = tau
        self.sigma = sigma
        self.dim = (rank - (len(tau) - 1)) - (len(sigma) - 1)
        self.index = None

    @property
    def key(self):
        return (self.tau, self.sigma)

    def __repr__(self):
        return f"Cell(tau={list(self.tau)}, sigma={list(self.sigma)}, dim={self.dim})"


def _min_face(newton_polytope, tau, origin):
    """The face of the Newton polytope normal to min(C(tau)).

    Computed as the intersection of the maximizing faces of the cone
    generators; the empty generator set (tau = {0}) gives the whole polytope.
    """
    face = None
    for u in tau:
        if u == origin:
            continue
        fu = newton_polytope.face_maximizing(u)
        if face is None:
            face = fu
        else:
            pts = face.point_set & fu.point_set
            if not pts:
                return None
            face = newton_polytope.min_face_containing(pts)
    if face is None:
        return newton_polytope.min_face_containing(newton_polytope.vertices)
    return face


class CellPoset:
    """Cells with covers, grading, flags and the default signature."""

    def __init__(self, ambient_tri, newton_tri, kind):
        if kind not in ("base", "refined"):
            raise ValueError(kind)
        self.ambient = ambient_tri
        self.newton = newton_tri
        self.kind = kind
        self.rank = ambient_tri.rank
        self.n = self.rank - 1
        self._origin_a = ambient_tri.origin
        self._origin_n = newton_tri.origin
        self._min_face_cache = {}
        self._build_cells()
        self._build_covers()
        self._verify()

    # -- membership ----------------------------------------------------------
    def min_face(self, tau):
        """min(C(tau)) dual face inside the Newton polytope (None if absent)."""
        if tau not in self._min_face_cache:
            self._min_face_cache[tau] = _min_face(
                self.newton.polytope, tau, self._origin_a
            )
        return self._min_face_cache[tau]

    def _build_cells(self):
        amb, newt = self.ambient, self.newton
        o_a, o_n = self._origin_a, self._origin_n
        cells = []
        if self.kind == "base":
            for tau in amb.simplices:
                if o_a not in tau:
                    continue
                face = self.min_face(tau)
                assert face is not None, "ambient cone escapes the coarse fan"
                fpts = face.point_set
                for sigma in newt.simplices:
                    if all(p in fpts for p in sigma):
                        cells.append(Cell(tau, sigma, self.rank))
        else:
            for sigma in newt.simplices:
                if o_n in sigma and len(sigma) > 1:
                    sigma_inf = tuple(p for p in sigma if p != o_n)
                    for tau in amb.simplices:
                        if o_a in tau:
                            continue
                        face = self.min_face(tau)
                        if face is not None and all(
                            p in face.point_set for p in sigma_inf
                        ):
                            cells.append(Cell(tau, sigma, self.rank))
                elif o_n not in sigma:
                    for tau in amb.simplices:
                        if tau == (o_a,):
                            continue
                        face = self.min_face(tau)
                        if face is not None and all(
                            p in face.point_set for p in sigma
                        ):
                            cells.append(Cell(tau, sigma, self.rank))
        cells.sort(key=lambda c: (c.dim, c.tau, c.sigma))
        for i, c in enumerate(cells):
            c.index = i
        self.cells = cells
        self.cell_index = {c.key: c.index for c in cells}
        self.max_dim = max((c.dim for c in cells), default=-1)

    def _build_covers(self):
        """Covers (y below x) by single-vertex growth, with default signs."""
        covers = []
        sign = {}
        below = {c.index: [] for c in self.cells}
        above = {c.index: [] for c in self.cells}
        for x in self.cells:
            for tau2 in self.ambient.cofaces.get(x.tau, ()):
                j = self.cell_index.get((tau2, x.sigma))
                if j is not None:
                    covers.append((j, x.index))
            for sigma2 in self.newton.cofaces.get(x.sigma, ()):
                j = self.cell_index.get((x.tau, sigma2))
                if j is not None:
                    covers.append((j, x.index))
        for (yi, xi) in covers:
            s = self.default_sign(self.cells[yi], self.cells[xi])
            sign[(yi, xi)] = s
            below[xi].append(yi)
            above[yi].append(xi)
        self.covers = covers
        self.sign = sign
        self.below = below
        self.above = above

    def default_sign(self, y, x):
        """Koszul/coboundary sign of the cover y below x."""
        if y.tau != x.tau:
            new = next(iter(set(y.tau) - set(x.tau)))
            pos = y.tau.index(new)
            return -1 if pos & 1 else 1
        new = next(iter(set(y.sigma) - set(x.sigma)))
        pos = y.sigma.index(new)
        s = -1 if pos & 1 else 1
        codim_tau = self.rank - (len(x.tau) - 1)
        return s if codim_tau % 2 == 0 else -s

    # -- flags ---------------------------------------------------------------
    def in_support(self, cell):
        """dim sigma >= 1: the support of the multitangent cosheaves."""
        return len(cell.sigma) >= 2

    def at_infinity(self, cell):
        if self.kind == "base":
            return cell.tau != (self._origin_a,)
        return self._origin_a in cell.tau

    def on_sphere(self, cell):
        """Cells of the bounded sphere part."""
        if self.kind == "base":
            return (
                cell.tau == (self._origin_a,)
                and self._origin_n in cell.sigma
                and len(cell.sigma) >= 2
            )
        return self._origin_n in cell.sigma and len(cell.sigma) >= 2

    def first_kind(self, cell):
        """Refined poset: sphere-part cells (0 in sigma)."""
        return self._origin_n in cell.sigma

    def in_j0ub(self, cell):
        return self._origin_n not in cell.sigma and self._origin_a not in cell.tau

    def phi(self, cell_key):
        """Collapse to the base poset: (tau, sigma) -> (0, sigma) off infinity."""
        tau, sigma = cell_key
        if self._origin_a in tau:
            return cell_key
        return ((self._origin_a,), sigma)

    # -- structural checks -----------------------------------------------------
    def _verify(self):
        sets = [
            (frozenset(c.tau), frozenset(c.sigma), c.dim, c.index) for c in self.cells
        ]
        between_count = {}
        for xi, lows in self.below.items():
            for zi in lows:
                for yi in self.below[zi]:
                    between_count[(yi, xi)] = between_count.get((yi, xi), 0) + 1
        for (ty, sy, dy, yi) in sets:
            for (tx, sx, dx, xi) in sets:
                if dx - dy < 2:
                    continue
                if not (tx <= ty and sx <= sy) or (tx == ty and sx == sy):
                    continue
                if dx - dy == 2:
                    cnt = between_count.get((yi, xi), 0)
                    if cnt != 2:
                        raise PosetInvalid(
                            f"interval [{self.cells[yi]}, {self.cells[xi]}] "
                            f"has {cnt} interior elements, expected 2"
                        )
                else:
                    if not any(
                        (frozenset(self.cells[zi].tau) <= ty)
                        and (frozenset(self.cells[zi].sigma) <= sy)
                        for zi in self.below[xi]
                    ):
                        raise PosetInvalid(
                            f"no chain between {self.cells[yi]} and {self.cells[xi]}"
                        )
        # the default signature must satisfy the diamond condition
        for (yi, xi), cnt in between_count.items():
            mids = [zi for zi in self.below[xi] if yi in self.below[zi]]
            prod = 1
            for zi in mids:
                prod *= self.sign[(yi, zi)] * self.sign[(zi, xi)]
            if prod != -1:
                raise PosetInvalid(
                    f"default signature unbalanced on [{self.cells[yi]}, {self.cells[xi]}]"
                )

    def to_debug_dict(self):
        """Cells with flags and covers, for the independent test oracles."""
        cells = []
        for c in self.cells:
            flags = {
                "support": self.in_support(c),
                "infinity": self.at_infinity(c),
                "sphere": self.on_sphere(c),
            }
            if self.kind == "refined":
                flags["first_kind"] = self.first_kind(c)
                flags["finite_unbounded"] = self.in_j0ub(c)
            cells.append(
                {
                    "tau": [list(p) for p in c.tau],
                    "sigma": [list(p) for p in c.sigma],
                    "dim": c.dim,
                    "flags": flags,
                }
            )
        return {
            "kind": self.kind,
            "cells": cells,
            "covers": [[yi, xi] for (yi, xi) in sorted(self.covers)],
        }

    def __repr__(self):
        return (
            f"CellPoset(kind={self.kind}, {len(self.cells)} cells, "
            f"{len(self.covers)} covers, max_dim={self.max_dim})"
        )


def build_base_poset(ambient_tri, newton_tri):
    """The cell poset of the ambient subdivision induced by the hypersurface."""
    _check_dual_pair(ambient_tri, newton_tri)
    return CellPoset(ambient_tri, newton_tri, "base")


def build_refined_poset(ambient_tri, newton_tri):
    """The refinement that splits cells along the sphere of bounded cells."""
    _check_dual_pair(ambient_tri, newton_tri)
    return CellPoset(ambient_tri, newton_tri, "refined")


def _check_dual_pair(ambient_tri, newton_tri):
    P = newton_tri.polytope
    Q = ambient_tri.polytope
    if not (P.is_reflexive() and Q.is_reflexive()) or P.dual() != Q:
        raise NotDualPair("the two triangulated polytopes are not a dual pair")


# ---------------------------------------------------------------------------
# mirror cell maps

def mirror_cell_base(poset, cell_key):
    """(tau, sigma) -> (sigma_hat, tau_inf) on the part at infinity."""
    tau, sigma = cell_key
    if tau == (poset._origin_a,):
        raise NotAtInfinity(f"{cell_key} is not at infinity")
    return (poset.newton.sigma_hat(sigma), poset.ambient.sigma_infty(tau))


def mirror_cell_refined(poset, cell_key):
    """The three-case mirror map on the refined poset."""
    tau, sigma = cell_key
    if cell_key not in poset.cell_index:
        raise NotInJ(f"{cell_key} is not a refined-poset cell")
    o_a, o_n = poset._origin_a, poset._origin_n
    if o_a in tau and o_n not in sigma:
        return (poset.newton.sigma_hat(sigma), poset.ambient.sigma_infty(tau))
    if o_a not in tau and o_n in sigma:
        return (poset.newton.sigma_infty(sigma), poset.ambient.sigma_hat(tau))
    return (sigma, tau)


# ---------------------------------------------------------------------------
# balanced signatures

def is_balanced(poset, sig):
    for xi, lows in poset.below.items():
        for zi in lows:
            for yi in poset.below[zi]:
                mids = [m for m in poset.below[xi] if yi in poset.below[m]]
                prod = 1
                for m in mids:
                    prod *= sig[(yi, m)] * sig[(m, xi)]
                if prod != -1:
                    return False
    return True


def balanced_signature(poset, variable_order=None):
    """Solve the diamond system over F2: one equation per length-2 interval.

    Variables are cover relations (indicator 1 = sign -1); each diamond
    imposes that its four covers carry an odd number of -1.  Deterministic
    for a fixed variable order; free variables are set to 0.  Raises
    Unsolvable when the system has no solution (the poset is then not the
    face poset of a regular CW complex).
    """
    covers = list(poset.covers)
    if variable_order is not None:
        covers = [covers[i] for i in variable_order]
    var_pos = {c: i for i, c in enumerate(covers)}
    diamonds = {}
    for xi, lows in poset.below.items():
        for zi in lows:
            for yi in poset.below[zi]:
                key = (yi, xi)
                if key in diamonds:
                    continue
                mids = [m for m in poset.below[xi] if yi in poset.below[m]]
                diamonds[key] = mids
    # build equations: sum of 4 indicators = 1
    rows = []
    for (yi, xi), mids in sorted(diamonds.items()):
        mask = 0
        for m in mids:
            mask ^= 1 << var_pos[(yi, m)]
            mask ^= 1 << var_pos[(m, xi)]
        rows.append(mask)
    pivots = {}  # leading bit -> (mask, rhs)
    for mask in rows:
        rhs = 1
        while mask:
            lead = mask.bit_length() - 1
            if lead in pivots:
                pm, pr = pivots[lead]
                mask ^= pm
                rhs ^= pr
            else:
                pivots[lead] = (mask, rhs)
                break
        else:
            if rhs:
                raise Unsolvable("diamond system is inconsistent: not a CW poset")
    # leads are the highest bits of their rows, so ascending order only ever
    # consults bits that are already decided (earlier pivots or free = 0)
    x = 0
    for lead in sorted(pivots):
        mask, rhs = pivots[lead]
        acc = rhs
        rest = mask & ~(1 << lead)
        while rest:
            low = rest & (-rest)
            if (x >> (low.bit_length() - 1)) & 1:
                acc ^= 1
            rest ^= low
        if acc:
            x |= 1 << lead
    sig = {c: -1 if (x >> i) & 1 else 1 for i, c in enumerate(covers)}
    if not is_balanced(poset, sig):
        raise Unsolvable("solver produced an unbalanced signature")
    return sig


def gauge_twist(poset, sig, gauge):
    """Twist a signature by a function cell index -> +-1 (stays balanced)."""
    return {
        (yi, xi): sig[(yi, xi)] * gauge[yi] * gauge[xi] for (yi, xi) in poset.covers
    }
