"""Exact lattice-polytope, face, cone and fan calculus for reflexive pairs.

Points are tuples of ints ("LatticeVector"); a polytope stores its vertices,
all lattice points, and the full face lattice built by closing vertex/facet
incidence under intersection.  Facets are found by exhaustive enumeration of
rank-subsets of the defining points, which is cheap at desk scale (rank <= 4,
a few dozen points) and has no floating point anywhere.

For a reflexive polytope every facet inequality normalizes to <v, x> <= 1
with v integral; the dual polytope is the convex hull of those facet
normals.  Normal fans store one cone per face, generated by the primitive
normals of the facets containing it; face fans of reflexive polytopes are
materialized as the normal fan of the dual, which is the same fan on the
nose and keeps cone identities canonical.
"""

from itertools import combinations

from .errors import FaceNotFound, NotContained, NotInFan, NotReflexive
from .intlinalg import dot, left_kernel, primitive, rank_int, solve_left

LatticeVector = tuple  # tuple of ints, length = rank


def _as_point(p):
    t = tuple(int(a) for a in p)
    if any(a != b for a, b in zip(t, p)):
        raise ValueError(f"non-integer coordinate in {p}")
    return t


class Face:
    """A face of a lattice polytope: vertex set, lattice points, dimension."""

    __slots__ = ("vertices", "lattice_points", "dim", "facet_indices")

    def __init__(self, vertices, lattice_points, dim, facet_indices):
        self.vertices = tuple(sorted(vertices))
        self.lattice_points = tuple(sorted(lattice_points))
        self.dim = dim
        self.facet_indices = frozenset(facet_indices)

    @property
    def point_set(self):
        return frozenset(self.lattice_points)

    def __repr__(self):
        return f"Face(dim={self.dim}, vertices={list(self.vertices)})"

    def __eq__(self, other):
        return isinstance(other, Face) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)


def _affine_rank(points):
    if not points:
        return -1
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return rank_int(diffs)


class LatticePolytope:
    """Full-dimensional lattice polytope with exact face data."""

    def __init__(self, points, rank=None):
        pts = sorted({_as_point(p) for p in points})
        if not pts:
            raise ValueError("empty point set")
        self.rank = rank if rank is not None else len(pts[0])
        if any(len(p) != self.rank for p in pts):
            raise ValueError("points of mixed rank")
        if _affine_rank(pts) != self.rank:
            raise ValueError("polytope is not full-dimensional")
        self._facets = self._find_facets(pts)
        self.vertices = self._find_vertices(pts)
        self._lattice_points = None
        self._faces = None
        self._face_by_vertices = None

    # -- construction -------------------------------------------------------
    def _find_facets(self, pts):
        """All facet inequalities (normal, offset) with primitive normals."""
        facets = {}
        for sub in combinations(pts, self.rank):
            base = sub[0]
            diffs = [[a - b for a, b in zip(p, base)] for p in sub[1:]]
            ker = left_kernel([list(col) for col in zip(*diffs)]) if diffs else []
            if len(ker) != 1:
                continue
            v = primitive(ker[0])
            c = dot(v, base)
            lo = min(dot(v, p) for p in pts)
            hi = max(dot(v, p) for p in pts)
            if hi == c and lo < c:
                facets[(v, c)] = True
            elif lo == c and hi > c:
                facets[(tuple(-a for a in v), -c)] = True
        if not facets:
            raise ValueError("no facets found (degenerate input)")
        return sorted(facets)

    def _find_vertices(self, pts):
        verts = []
        for p in pts:
            active = [v for (v, c) in self._facets if dot(v, p) == c]
            if rank_int([list(v) for v in active]) == self.rank:
                verts.append(p)
        return tuple(sorted(verts))

    # -- basic queries -------------------------------------------------------
    @property
    def facets(self):
        """List of (primitive normal, offset) inequalities <v, x> <= c."""
        return list(self._facets)

    def contains(self, p):
        return all(dot(v, p) <= c for (v, c) in self._facets)

    @property
    def lattice_points(self):
        if self._lattice_points is None:
            lo = [min(v[i] for v in self.vertices) for i in range(self.rank)]
            hi = [max(v[i] for v in self.vertices) for i in range(self.rank)]
            out = []

            def scan(prefix):
                i = len(prefix)
                if i == self.rank:
                    if self.contains(prefix):
                        out.append(tuple(prefix))
                    return
                for a in range(lo[i], hi[i] + 1):
                    scan(prefix + [a])

            scan([])
            self._lattice_points = tuple(sorted(out))
        return self._lattice_points

    def interior_lattice_points(self):
        return [
            p
            for p in self.lattice_points
            if all(dot(v, p) < c for (v, c) in self._facets)
        ]

    # -- face lattice --------------------------------------------------------
    def _build_faces(self):
        pts = self.lattice_points
        vset = set(self.vertices)
        facet_pts = []
        for (v, c) in self._facets:
            facet_pts.append(frozenset(p for p in pts if dot(v, p) == c))
        seen = {}
        whole = frozenset(pts)
        seen[whole] = frozenset()
        frontier = []
        for i, fp in enumerate(facet_pts):
            key = fp
            seen.setdefault(key, frozenset())
            seen[key] = seen[key] | {i}
            frontier.append(key)
        # close under intersection
        queue = list(seen)
        while queue:
            a = queue.pop()
            for b in list(seen):
                inter = a & b
                if inter and inter not in seen:
                    seen[inter] = seen[a] | seen[b]
                    queue.append(inter)
        faces = []
        for ptset, fidx in seen.items():
            fverts = tuple(sorted(p for p in ptset if p in vset))
            if not fverts:
                continue
            dim = _affine_rank(list(ptset))
            # recompute the exact facet index set (intersections may undercount)
            full_idx = {
                i
                for i, (v, c) in enumerate(self._facets)
                if all(dot(v, p) == c for p in ptset)
            }
            faces.append(Face(fverts, ptset, dim, full_idx))
        faces.sort(key=lambda f: (f.dim, f.vertices))
        self._faces = faces
        self._face_by_vertices = {f.vertices: f for f in faces}

    @property
    def faces(self):
        if self._faces is None:
            self._build_faces()
        return list(self._faces)

    def faces_of_dim(self, d):
        return [f for f in self.faces if f.dim == d]

    @property
    def whole_face(self):
        return self._face_by_vertex_lookup(self.vertices)

    def _face_by_vertex_lookup(self, verts):
        if self._faces is None:
            self._build_faces()
        f = self._face_by_vertices.get(tuple(sorted(verts)))
        if f is None:
            raise FaceNotFound(f"no face with vertices {verts}")
        return f

    def min_face_containing(self, points):
        """Smallest face containing the given lattice points."""
        pts = [_as_point(p) for p in points]
        for p in pts:
            if not self.contains(p):
                raise FaceNotFound(f"{p} is outside the polytope")
        best = None
        for f in self.faces:
            fp = f.point_set
            if all(p in fp for p in pts):
                if best is None or f.dim < best.dim:
                    best = f
        if best is None:
            raise FaceNotFound(f"no face contains {points}")
        return best

    def face_maximizing(self, u):
        """The face on which <u, .> attains its maximum over the polytope."""
        vals = [dot(u, p) for p in self.vertices]
        m = max(vals)
        verts = tuple(
            sorted(p for p, val in zip(self.vertices, vals) if val == m)
        )
        return self._face_by_vertex_lookup(verts)

    # -- reflexivity and duality ---------------------------------------------
    def is_reflexive(self):
        return all(c == 1 for (_, c) in self._facets)

    def dual(self):
        """The dual reflexive polytope {u : <u, x> <= 1 for all x}."""
        if not self.is_reflexive():
            raise NotReflexive(f"{self} is not reflexive")
        return LatticePolytope([v for (v, _) in self._facets], rank=self.rank)

    # -- fans ------------------------------------------------------------------
    def normal_fan(self):
        """One cone per face, generated by the normals of incident facets."""
        cones = []
        face_to_cone = {}
        for f in self.faces:
            gens = tuple(sorted(self._facets[i][0] for i in f.facet_indices))
            cone = Cone(gens)
            cones.append(cone)
            face_to_cone[f.vertices] = cone
        return Fan(cones, polytope=self, face_to_cone=face_to_cone, complete=True)

    def face_fan(self):
        """Cones over the proper faces; for reflexive polytopes this equals
        the normal fan of the dual, which is how it is materialized."""
        return self.dual().normal_fan()

    def __eq__(self, other):
        return (
            isinstance(other, LatticePolytope)
            and self.rank == other.rank
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash((self.rank, self.vertices))

    def __repr__(self):
        return f"LatticePolytope(rank={self.rank}, vertices={list(self.vertices)})"


class Cone:
    """Strongly convex rational cone, canonically keyed by its primitive rays."""

    __slots__ = ("generators", "dim")

    def __init__(self, generators):
        gens = tuple(sorted({primitive(g) for g in generators if any(g)}))
        self.generators = gens
        self.dim = rank_int([list(g) for g in gens]) if gens else 0

    def is_zero(self):
        return not self.generators

    def __eq__(self, other):
        return isinstance(other, Cone) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return f"Cone(dim={self.dim}, rays={list(self.generators)})"


class Fan:
    """A fan as a set of cones with canonical ray-set lookup.

    Fans produced by ``normal_fan`` know their polytope, which gives exact
    membership tests via maximizing faces; simplicial fans (cones over
    unimodular simplices) fall back to coordinate solving.
    """

    def __init__(self, cones, polytope=None, face_to_cone=None, complete=False):
        self.cones = list(cones)
        self.lookup = {c.generators: c for c in self.cones}
        self.polytope = polytope
        self._face_to_cone = face_to_cone or {}
        self._cone_to_face = {
            cone.generators: verts for verts, cone in self._face_to_cone.items()
        }
        self.complete = complete

    def __contains__(self, cone):
        return cone.generators in self.lookup

    def cone_of_face(self, face):
        try:
            return self._face_to_cone[face.vertices]
        except KeyError:
            raise NotInFan(f"no cone for face {face}") from None

    def face_of_cone(self, cone):
        """Inverse of the face -> cone map of a normal fan."""
        if cone.generators not in self._cone_to_face:
            raise NotInFan(f"{cone} is not a cone of this fan")
        return self.polytope._face_by_vertex_lookup(self._cone_to_face[cone.generators])

    def member(self, cone, x):
        """Exact membership of a lattice point in a cone of this fan."""
        if self.polytope is not None:
            face = self.face_of_cone(cone)
            maxface = self.polytope.face_maximizing(x)
            return face.point_set <= maxface.point_set
        sol = solve_left([list(g) for g in cone.generators], list(x)) if cone.generators else None
        if not any(x):
            return True
        return sol is not None and all(c >= 0 for c in sol)

    def min_cone(self, rho):
        """Smallest cone of this fan containing the cone rho."""
        if self.polytope is not None:
            face = None
            for u in rho.generators:
                fu = self.polytope.face_maximizing(u)
                face = fu if face is None else self._intersect_faces(face, fu)
                if face is None:
                    raise NotContained(f"{rho} is not contained in any cone")
            if face is None:  # rho is the zero cone
                face = self.polytope.whole_face
            return self.cone_of_face(face)
        containing = [c for c in self.cones if all(self.member(c, g) for g in rho.generators)]
        if not containing:
            raise NotContained(f"{rho} is not contained in any cone")
        best = min(containing, key=lambda c: (c.dim, c.generators))
        for c in containing:
            assert all(self.member(c, g) for g in best.generators), (
                "containing cones are not nested; fan intersections broken"
            )
        return best

    def _intersect_faces(self, f1, f2):
        pts = f1.point_set & f2.point_set
        if not pts:
            return None
        return self.polytope.min_face_containing(pts)

    def normal_face(self, rho):
        """The face of the fan's polytope on which every generator of rho is
        maximized; requires rho to be a cone of the fan."""
        if rho.generators not in self.lookup:
            raise NotInFan(f"{rho} is not a cone of this fan")
        return self.face_of_cone(self.lookup[rho.generators])

    def same_cones(self, other):
        return set(self.lookup) == set(other.lookup)

    def __repr__(self):
        return f"Fan({len(self.cones)} cones, complete={self.complete})"


def dual_polytope(P):
    return P.dual()


def is_reflexive(P):
    return P.is_reflexive()


def min_cone(rho, fan):
    return fan.min_cone(rho)


def normal_face(rho, P):
    return P.normal_fan().normal_face(rho)
