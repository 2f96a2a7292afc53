"""Mirror pairs of triangulated reflexive polytopes and their sides.

A Side fixes one orientation: the Newton-side triangulation T carries the
hypersurface combinatorics and the ambient-side triangulation of the dual
polytope provides the toric fan.  The mirror side swaps the two roles.
Posets, cosheaf complexes and homology summaries are built lazily and cached
on the side.
"""

from .cosheaves import CosheafEvaluator
from .errors import InputError
from .posets import build_base_poset, build_refined_poset, _check_dual_pair
from .triangulate import validate


class Side:
    def __init__(self, ambient_tri, newton_tri):
        self.ambient = ambient_tri
        self.newton = newton_tri
        self.rank = newton_tri.rank
        self.n = self.rank - 1
        self.evaluator = CosheafEvaluator(ambient_tri, newton_tri)
        self.mirror = None  # wired by MirrorPair
        self._posets = {}
        self._complexes = {}
        self._homology = {}

    def poset(self, kind):
        if kind not in self._posets:
            builder = build_base_poset if kind == "base" else build_refined_poset
            self._posets[kind] = builder(self.ambient, self.newton)
        return self._posets[kind]

    @property
    def base_poset(self):
        return self.poset("base")

    @property
    def refined_poset(self):
        return self.poset("refined")

    def complex(self, kind, tag, p):
        key = (kind, tag, p)
        if key not in self._complexes:
            self._complexes[key] = self.evaluator.chain_complex(
                self.poset(kind), tag, p
            )
        return self._complexes[key]

    def homology(self, kind, tag, p, ring):
        key = (kind, tag, p, ring)
        if key not in self._homology:
            self._homology[key] = self.complex(kind, tag, p).homology(ring)
        return self._homology[key]

    def hodge_table(self, ring):
        """dim H_q of the multitangent cosheaves on the base poset.

        Returns {"ranks": table[p][q], "torsion": table[p][q] list} with
        0 <= p, q <= n; torsion only for ring 'z'.
        """
        ranks = []
        torsion = []
        for p in range(self.n + 1):
            summary = self.homology("base", "multitangent", p, ring)
            ranks.append([summary.rank(q) for q in range(self.n + 1)])
            torsion.append([summary.torsion(q) for q in range(self.n + 1)])
        out = {"ring": ring, "ranks": ranks}
        if ring == "z":
            out["torsion"] = torsion
        return out

    def __repr__(self):
        return (
            f"Side(newton={self.newton.polytope.vertices[:2]}..., "
            f"rank={self.rank})"
        )


class MirrorPair:
    """A dual pair (Delta, T), (Delta_dual, T_dual) with both orientations."""

    def __init__(self, newton_tri, dual_tri):
        _check_dual_pair(dual_tri, newton_tri)
        for tri in (newton_tri, dual_tri):
            report = validate(tri)
            if not report.ok:
                raise InputError(
                    f"triangulation of {tri.polytope} is invalid: {report.codes()}"
                )
        self.side_a = Side(dual_tri, newton_tri)
        self.side_b = Side(newton_tri, dual_tri)
        self.side_a.mirror = self.side_b
        self.side_b.mirror = self.side_a
        self.n = newton_tri.rank - 1

    @property
    def sides(self):
        return (self.side_a, self.side_b)

    def __repr__(self):
        return f"MirrorPair(n={self.n})"


def hodge_table(dual_tri, newton_tri, ring):
    """Tropical homology table of the pair (one orientation)."""
    return MirrorPair(newton_tri, dual_tri).side_a.hodge_table(ring)
