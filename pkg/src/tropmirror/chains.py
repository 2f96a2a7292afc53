"""Cellular chain complexes of cosheaves on graded thin posets.

The complex in degree q is the direct sum of the cosheaf values on the
dimension-q cells; the boundary assembles the cosheaf maps of the cover
relations times the signature signs into one sparse integer matrix per
degree.  Chains are row vectors acting on the left (boundary of v is v.D),
so ranks and kernels of the boundary matrices are row-space computations.

The same integer matrices serve all rings: Q uses their ranks, Z adds the
elementary divisors of the next boundary for torsion, F2 reduces them to
packed bit rows.  The square of the boundary is verified to vanish over Z
at construction (hence over every ring).
"""

from .errors import BoundarySquareNonzero, NotAClosedChain
from .intlinalg import (
    F2Space,
    f2_left_kernel,
    f2_pack,
    sparse_elementary_divisors,
    sparse_rank,
)

RINGS = ("z", "q", "f2")


class HomologySummary:
    """Per-degree free rank and, over Z, the torsion invariants d1 | d2 |..."""

    def __init__(self, data, ring):
        self.ring = ring
        self.data = {q: (int(r), tuple(t)) for q, (r, t) in data.items()}

    def rank(self, q):
        return self.data.get(q, (0, ()))[0]

    def torsion(self, q):
        return list(self.data.get(q, (0, ()))[1])

    @property
    def degrees(self):
        return sorted(self.data)

    def ranks(self):
        top = max(self.degrees, default=-1)
        return [self.rank(q) for q in range(top + 1)]

    def has_torsion(self):
        return any(t for (_, t) in self.data.values())

    def __eq__(self, other):
        return (
            isinstance(other, HomologySummary)
            and self.ring == other.ring
            and self.data == other.data
        )

    def to_dict(self):
        return {
            str(q): {"rank": r, "torsion": list(t)}
            for q, (r, t) in sorted(self.data.items())
        }

    def __repr__(self):
        parts = []
        for q in self.degrees:
            r, t = self.data[q]
            parts.append(f"H_{q}={r}" + (f"+{list(t)}" if t else ""))
        return f"HomologySummary({self.ring}: " + ", ".join(parts) + ")"


class ChainComplex:
    """Boundary matrices of a cosheaf on a poset, with homology caches.

    ``ranks``: value rank per cell index.  ``blocks``: for each cover
    (y below x) an integer matrix taking x-coordinates to y-coordinates.
    ``sign``: signature on the covers.
    """

    def __init__(self, poset, ranks, blocks, sign, check=True):
        self.poset = poset
        self.ranks = list(ranks)
        self.degrees = list(range(0, poset.max_dim + 1))
        self.offset = {}
        self.dim_q = {}
        self.cells_q = {}
        for q in self.degrees:
            cells = [c.index for c in poset.cells if c.dim == q]
            self.cells_q[q] = cells
            off = 0
            for ci in cells:
                self.offset[ci] = off
                off += self.ranks[ci]
            self.dim_q[q] = off
        self.D = {}
        for q in self.degrees:
            if q == 0:
                continue
            self.D[q] = [dict() for _ in range(self.dim_q[q])]
        for (yi, xi) in poset.covers:
            rx = self.ranks[xi]
            ry = self.ranks[yi]
            if rx == 0 or ry == 0:
                continue
            q = poset.cells[xi].dim
            s = sign[(yi, xi)]
            m = blocks[(yi, xi)]
            ox, oy = self.offset[xi], self.offset[yi]
            rows = self.D[q]
            for i in range(rx):
                mi = m[i]
                row = rows[ox + i]
                for j in range(ry):
                    if mi[j]:
                        v = row.get(oy + j, 0) + s * mi[j]
                        if v:
                            row[oy + j] = v
                        else:
                            row.pop(oy + j, None)
        self._rank_cache = {}
        self._f2_cache = {}
        self._f2_space_cache = {}
        if check:
            self._check_square_zero()

    # -- structure -------------------------------------------------------------
    def _check_square_zero(self):
        for q in self.degrees:
            if q < 2 or q not in self.D or (q - 1) not in self.D:
                continue
            Dq, Dq1 = self.D[q], self.D[q - 1]
            for i, row in enumerate(Dq):
                acc = {}
                for k, v in row.items():
                    for j, w in Dq1[k].items():
                        t = acc.get(j, 0) + v * w
                        if t:
                            acc[j] = t
                        else:
                            acc.pop(j, None)
                if acc:
                    raise BoundarySquareNonzero(
                        f"boundary squared nonzero in degree {q}, row {i}"
                    )

    def dim(self, q):
        return self.dim_q.get(q, 0)

    def boundary_rows(self, q):
        return self.D.get(q, [])

    # -- ranks and homology ------------------------------------------------------
    def rank_boundary(self, q, ring):
        if q not in self.D or self.dim(q) == 0 or self.dim(q - 1) == 0:
            return 0
        key = (q, "f2" if ring == "f2" else "q")
        if key not in self._rank_cache:
            if ring == "f2":
                self._rank_cache[key] = self._f2_image_space(q).rank
            else:
                rows = [dict(r) for r in self.D[q]]
                self._rank_cache[key] = sparse_rank(rows)
        return self._rank_cache[key]

    def homology(self, ring):
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        data = {}
        for q in self.degrees:
            rank = self.dim(q) - self.rank_boundary(q, ring) - self.rank_boundary(
                q + 1, ring
            )
            torsion = ()
            if ring == "z" and (q + 1) in self.D:
                key = (q + 1, "tor")
                if key not in self._rank_cache:
                    rows = [dict(r) for r in self.D[q + 1]]
                    divisors = sparse_elementary_divisors(rows)
                    self._rank_cache[key] = tuple(d for d in divisors if d > 1)
                torsion = self._rank_cache[key]
            data[q] = (rank, torsion)
        return HomologySummary(data, ring)

    def euler_characteristic(self):
        return sum((-1) ** q * self.dim(q) for q in self.degrees)

    # -- F2 chain operations -------------------------------------------------------
    def f2_rows(self, q):
        if q not in self._f2_cache:
            self._f2_cache[q] = [
                f2_pack([row.get(j, 0) for j in range(self.dim(q - 1))])
                for row in self.D.get(q, [])
            ]
        return self._f2_cache[q]

    def _f2_image_space(self, q):
        if q not in self._f2_space_cache:
            self._f2_space_cache[q] = F2Space(self.f2_rows(q))
        return self._f2_space_cache[q]

    def f2_boundary(self, vec, q):
        """Boundary of a packed degree-q chain, as a packed degree-q-1 chain."""
        rows = self.f2_rows(q)
        if not rows:
            return 0
        out = 0
        v = vec
        while v:
            low = v & (-v)
            out ^= rows[low.bit_length() - 1]
            v ^= low
        return out

    def f2_is_cycle(self, vec, q):
        return q == 0 or self.f2_boundary(vec, q) == 0

    def f2_is_boundary(self, vec, q):
        if not self.f2_is_cycle(vec, q):
            raise NotAClosedChain(f"chain in degree {q} is not closed")
        if vec == 0:
            return True
        if q + 1 not in self.D:
            return False
        return self._f2_image_space(q + 1).contains(vec)

    def f2_homology_generators(self, q):
        """Packed cycle representatives of a basis of H_q over F2."""
        rows = self.f2_rows(q) if q in self.D else []
        if q in self.D and self.dim(q - 1) > 0:
            kernel_masks = f2_left_kernel(rows)
        else:
            kernel_masks = [1 << i for i in range(self.dim(q))]
        space = F2Space(self.f2_rows(q + 1) if (q + 1) in self.D else [])
        reps = []
        for v in kernel_masks:
            if space.add(v):
                reps.append(v)
        return reps

    # -- chain <-> cell-dict conversion ---------------------------------------------
    def chain_to_packed(self, chain, q):
        """{cell key: 0/1 coordinate tuple} -> packed vector in degree q."""
        vec = 0
        for key, coords in chain.items():
            ci = self.poset.cell_index[key]
            assert self.poset.cells[ci].dim == q, "chain mixes degrees"
            off = self.offset[ci]
            for j, c in enumerate(coords):
                if c & 1:
                    vec |= 1 << (off + j)
        return vec

    def packed_to_chain(self, vec, q):
        out = {}
        for ci in self.cells_q[q]:
            r = self.ranks[ci]
            if r == 0:
                continue
            off = self.offset[ci]
            coords = tuple((vec >> (off + j)) & 1 for j in range(r))
            if any(coords):
                out[self.poset.cells[ci].key] = coords
        return out

    def __repr__(self):
        dims = ", ".join(f"C_{q}={self.dim(q)}" for q in self.degrees)
        return f"ChainComplex({dims})"
