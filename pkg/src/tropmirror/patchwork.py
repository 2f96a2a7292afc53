"""Combinatorial patchworking: signs, phases, the real complex and the
connectedness criterion.

A sign distribution on the lattice points of the Newton polytope, an F2
toric divisor on its fan, and a real phase structure on the edges of its
triangulation are three encodings of the same datum (up to one global sign
flip, pinned by giving the origin sign 1).  The sign cosheaf assigns to a
cell the free F2 module on its phase set; its homology computes the F2
homology of the patchworked real hypersurface, and is filtered with
multitangent graded pieces.  The first differential of that filtration,
applied to the fundamental class of the sphere, is mirror to the divisor
restriction class, which decides connectedness.

Phase sets live in quotient coordinates mod 2 of the same frames the
cosheaf evaluator uses, packed into small ints; cells off infinity pull
their phase data back from the collapsed cell, matching the cosheaf side.
"""

from itertools import combinations

from .chains import ChainComplex
from .errors import (
    HypothesisFails,
    InputError,
    InternalCheckError,
    InvalidPhaseStructure,
    NotAClosedChain,
)
from .intlinalg import F2Space, f2_pack, f2_solve_rows, dot
from .exterior import wedge_rows
from .mirror import chain_degree, divisor_restriction, f2_apply, is_null_class


# ---------------------------------------------------------------------------
# signs <-> phases <-> divisors

def signs_from_divisor(side, rays):
    """Sign distribution with origin sign 1 and boundary signs = coefficients."""
    support = {tuple(r) for r in rays}
    boundary = set(side.newton.rays())
    bad = support - boundary
    if bad:
        from .errors import RayNotInFan

        raise RayNotInFan(f"{sorted(bad)} are not rays of the Newton fan")
    eps = {p: 0 for p in side.newton.polytope.lattice_points}
    eps[side.newton.origin] = 1
    for v in support:
        eps[v] = 1
    return eps


def divisor_from_signs(side, eps):
    """Rays whose sign matches the origin's."""
    o = side.newton.origin
    return sorted(v for v in side.newton.rays() if eps[v] == eps[o])


def phase_from_signs(side, eps):
    """Same-sign indicator per edge: 1 iff the endpoints agree."""
    t = {}
    for s in side.newton.by_dim.get(1, ()):
        a, b = s
        t[s] = 1 ^ (eps[a] ^ eps[b])
    return t


def validate_phase(side, t):
    """The two-dimensional simplex rule: 0 or 2 edges with zero class."""
    for tri in side.newton.by_dim.get(2, ()):
        zero = 0
        for e in combinations(tri, 2):
            if t[tuple(sorted(e))] == 0:
                zero += 1
        if zero not in (0, 2):
            raise InvalidPhaseStructure(
                f"simplex {tri} has {zero} edges with zero phase class"
            )


def signs_from_phase(side, t):
    """Propagate signs from the origin (sign 1) along edges."""
    validate_phase(side, t)
    o = side.newton.origin
    eps = {o: 1}
    queue = [o]
    adjacency = {}
    for s in side.newton.by_dim.get(1, ()):
        a, b = s
        adjacency.setdefault(a, []).append((b, t[s]))
        adjacency.setdefault(b, []).append((a, t[s]))
    while queue:
        a = queue.pop()
        for b, te in adjacency.get(a, ()):
            val = eps[a] ^ 1 ^ te
            if b in eps:
                if eps[b] != val:
                    raise InvalidPhaseStructure(
                        f"inconsistent phase structure at {b}"
                    )
            else:
                eps[b] = val
                queue.append(b)
    missing = set(side.newton.polytope.lattice_points) - set(eps)
    if missing:
        raise InvalidPhaseStructure(f"edge graph does not reach {sorted(missing)}")
    return eps


# ---------------------------------------------------------------------------
# divisor classes

def _pairing_rows(side):
    rays = side.newton.rays()
    m = side.rank
    rows = []
    for i in range(m):
        e = tuple(1 if j == i else 0 for j in range(m))
        rows.append(f2_pack([dot(e, v) & 1 for v in rays]))
    return rays, rows


def divisor_mask(side, rays_subset):
    rays = side.newton.rays()
    pos = {v: i for i, v in enumerate(rays)}
    mask = 0
    for r in rays_subset:
        mask ^= 1 << pos[tuple(r)]
    return mask


def mask_to_rays(side, mask):
    rays = side.newton.rays()
    return [rays[i] for i in range(len(rays)) if (mask >> i) & 1]


def divisors_equivalent(side, d1, d2):
    """Linear equivalence over F2: difference in the image of the pairing."""
    _, rows = _pairing_rows(side)
    space = F2Space(rows)
    return space.contains(divisor_mask(side, d1) ^ divisor_mask(side, d2))


def divisor_class_representatives(side):
    """Canonical representative masks of all F2 divisor classes."""
    rays, rows = _pairing_rows(side)
    space = F2Space(rows)
    if len(rays) > 16:
        raise InputError(
            f"{2 ** len(rays)} divisors is too many to enumerate; sample instead"
        )
    return sorted({space.reduce(mask) for mask in range(1 << len(rays))})


def sample_divisor_classes(side, count, seed):
    """Deterministic sample of distinct divisor class representatives."""
    import random

    rays, rows = _pairing_rows(side)
    space = F2Space(rows)
    rng = random.Random(seed)
    seen = set()
    budget = 100 * count
    while len(seen) < count and budget:
        budget -= 1
        seen.add(space.reduce(rng.getrandbits(len(rays))))
    return sorted(seen)


# ---------------------------------------------------------------------------
# phase data on a poset

class PhaseCell:
    __slots__ = ("stratum", "qd", "edges", "points", "index")

    def __init__(self):
        self.edges = []


class PhaseData:
    """Phase sets and sign-cosheaf structure for one sign distribution."""

    def __init__(self, side, poset, eps):
        self.side = side
        self.poset = poset
        self.eps = dict(eps)
        self.m = side.rank
        self.t = phase_from_signs(side, eps)
        self._cells = {}
        self._proj = {}
        self._filtration = {}
        self._complex = None

    # -- per-cell phase sets -------------------------------------------------
    def _stratum(self, cell):
        ev = self.side.evaluator
        if self.side.ambient.origin in cell.tau:
            return ev.stratum_gens(cell.tau)
        return ()

    def phase_cell(self, ci):
        if ci in self._cells:
            return self._cells[ci]
        cell = self.poset.cells[ci]
        ev = self.side.evaluator
        pc = PhaseCell()
        pc.stratum = self._stratum(cell)
        fr = ev.frame(pc.stratum)
        pc.qd = self.m - fr.k
        if len(cell.sigma) < 2:
            pc.points = []
            pc.index = {}
            self._cells[ci] = pc
            return pc
        seen = set()
        for a, b in combinations(cell.sigma, 2):
            d = tuple(x - y for x, y in zip(b, a))
            rdm = 0
            for j in range(pc.qd):
                if dot(fr.R[j], d) & 1:
                    rdm |= 1 << j
            te = self.t[tuple(sorted((a, b)))]
            pc.edges.append(((a, b), rdm, te))
            for s in range(1 << pc.qd):
                if bin(s & rdm).count("1") % 2 == te:
                    seen.add(s)
        pc.points = sorted(seen)
        pc.index = {s: i for i, s in enumerate(pc.points)}
        self._cells[ci] = pc
        return pc

    def projection_masks(self, sx, sy):
        """Images of the V_x basis bits in V_y, as packed masks."""
        key = (sx, sy)
        if key not in self._proj:
            ev = self.side.evaluator
            frx, fry = ev.frame(sx), ev.frame(sy)
            masks = []
            for j in range(self.m - frx.k):
                row = frx.R[j]
                mask = 0
                for i in range(self.m - fry.k):
                    # coordinate i of proj(lift of bit j)
                    if sum(row[t] * fry.Q[t][i] for t in range(self.m)) & 1:
                        mask |= 1 << i
                masks.append(mask)
            self._proj[key] = masks
        return self._proj[key]

    def transport(self, s, sx, sy):
        if sx == sy:
            return s
        masks = self.projection_masks(sx, sy)
        out = 0
        v = s
        while v:
            low = v & (-v)
            out ^= masks[low.bit_length() - 1]
            v ^= low
        return out

    # -- the sign-cosheaf complex ------------------------------------------------
    def sign_complex(self, check=True):
        if self._complex is None:
            poset = self.poset
            ranks = [len(self.phase_cell(c.index).points) for c in poset.cells]
            blocks = {}
            for (yi, xi) in poset.covers:
                if not ranks[yi] or not ranks[xi]:
                    continue
                px, py = self.phase_cell(xi), self.phase_cell(yi)
                rows = []
                for s in px.points:
                    s2 = self.transport(s, px.stratum, py.stratum)
                    row = [0] * len(py.points)
                    j = py.index.get(s2)
                    if j is None:
                        raise InternalCheckError(
                            "phase transport escaped the target phase set"
                        )
                    row[j] = 1
                    rows.append(row)
                blocks[(yi, xi)] = rows
            self._complex = ChainComplex(
                poset, ranks, blocks, poset.sign, check=check
            )
        return self._complex

    # -- filtration generators ------------------------------------------------------
    def filtration_generators(self, ci, p):
        """(indicator, multitangent coords) pairs spanning level p on a cell."""
        key = (ci, p)
        if key in self._filtration:
            return self._filtration[key]
        cell = self.poset.cells[ci]
        ev = self.side.evaluator
        pc = self.phase_cell(ci)
        gens = []
        if pc.points:
            value = ev.value("multitangent", p, cell)
            for (a, b), rdm, te in pc.edges:
                B = ev.edge_annihilator_basis(pc.stratum, a, b)
                w = len(B)
                if p > w:
                    continue
                B2 = [f2_pack([x & 1 for x in row]) for row in B]
                # the wedge image of each p-subset of B in value coordinates
                if value.rank:
                    T = [
                        list(value.reduce(wedge_rows(list(sub), pc.qd)))
                        for sub in combinations(B, p)
                    ]
                else:
                    T = []
                s0 = 0
                if te == 1:
                    s0 = rdm & (-rdm)  # lowest bit of rdm pairs to 1
                for U in _subspaces(w, p):
                    # wedge coordinates of the subspace basis over p-subsets
                    wedge = [
                        x & 1
                        for x in wedge_rows(
                            [[(u >> j) & 1 for j in range(w)] for u in U], w
                        )
                    ]
                    fcoords = f2_apply(tuple(wedge), T) if T else ()
                    U_V = [_span_apply(u, B2) for u in U]
                    span = _span(U_V)
                    coset_reps = set()
                    Wspan = _span(B2)
                    for wv in Wspan:
                        pt = s0 ^ wv
                        rep = min(pt ^ u for u in span)
                        coset_reps.add(rep)
                    for rep in sorted(coset_reps):
                        ind = 0
                        for u in span:
                            ind |= 1 << pc.index[rep ^ u]
                        gens.append((ind, tuple(fcoords)))
        self._filtration[key] = gens
        return gens

    def filtration_space(self, ci, p):
        return F2Space(ind for ind, _ in self.filtration_generators(ci, p))


def _span(vectors):
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return sorted(out)


def _span_apply(u, basis):
    out = 0
    v = u
    while v:
        low = v & (-v)
        out ^= basis[low.bit_length() - 1]
        v ^= low
    return out


def _subspaces(w, p):
    """All dimension-p subspaces of F2^w as canonical echelon bases."""
    if p == 0:
        return [()]
    seen = {}
    vectors = list(range(1, 1 << w))
    for combo in combinations(vectors, p):
        space = F2Space(combo)
        if space.rank != p:
            continue
        key = tuple(_span(list(combo)))
        if key not in seen:
            seen[key] = combo
    return sorted(seen.values())


# ---------------------------------------------------------------------------
# the real CW complex

class RealComplex:
    """Cells (poset cell, phase) with constant F2 coefficients."""

    def __init__(self, phase_data):
        pd = phase_data
        poset = pd.poset
        self.n = pd.side.n
        self.cells = []
        index = {}
        for c in poset.cells:
            pc = pd.phase_cell(c.index)
            for s in pc.points:
                index[(c.index, s)] = len(self.cells)
                self.cells.append((c.index, s, c.dim))
        self.index = index
        self.covers = []
        for (yi, xi) in poset.covers:
            px, py = pd.phase_cell(xi), pd.phase_cell(yi)
            if not px.points or not py.points:
                continue
            for s in px.points:
                s2 = pd.transport(s, px.stratum, py.stratum)
                self.covers.append((index[(yi, s2)], index[(xi, s)]))
        self._poset = poset

    def component_count(self):
        """Connected components of the top-cell adjacency graph."""
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tops = [i for i, (_, _, d) in enumerate(self.cells) if d == self.n]
        for i in tops:
            parent[i] = i
        facet_tops = {}
        for (yi, xi) in self.covers:
            if self.cells[xi][2] == self.n and self.cells[yi][2] == self.n - 1:
                facet_tops.setdefault(yi, []).append(xi)
        for tops_here in facet_tops.values():
            a = tops_here[0]
            for b in tops_here[1:]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
        return len({find(i) for i in tops})

    def betti(self):
        """F2 Betti numbers of the realization, via the cellular complex."""
        dims = {}
        offs = []
        for (_, _, d) in self.cells:
            offs.append(dims.get(d, 0))
            dims[d] = dims.get(d, 0) + 1
        top = max(dims) if dims else -1
        rows = {q: [0] * dims.get(q, 0) for q in dims}
        for (yi, xi) in self.covers:
            q = self.cells[xi][2]
            rows[q][offs[xi]] ^= 1 << offs[yi]
        from .intlinalg import f2_rank

        ranks = {q: f2_rank(list(rows[q])) for q in rows}
        out = []
        for q in range(top + 1):
            r_q = ranks.get(q, 0) if q > 0 else 0
            r_q1 = ranks.get(q + 1, 0)
            out.append(dims.get(q, 0) - r_q - r_q1)
        return out


# ---------------------------------------------------------------------------
# betti numbers, two ways

def real_betti(side, eps, kind="base"):
    """F2 Betti numbers of the patchworked hypersurface, computed both from
    the sign-cosheaf complex and from the real CW complex; the b0 values and
    full vectors must agree and are returned once."""
    pd = PhaseData(side, side.poset(kind), eps)
    cx = pd.sign_complex()
    h = cx.homology("f2")
    betti_cosheaf = [h.rank(q) for q in range(side.n + 1)]
    rc = RealComplex(pd)
    betti_real = rc.betti()[: side.n + 1]
    betti_real += [0] * (side.n + 1 - len(betti_real))
    if betti_cosheaf != betti_real:
        raise InternalCheckError(
            f"sign-cosheaf betti {betti_cosheaf} != real-complex betti {betti_real}"
        )
    b0 = rc.component_count()
    if b0 != betti_real[0]:
        raise InternalCheckError(
            f"component count {b0} != b0 {betti_real[0]}"
        )
    return betti_cosheaf


# ---------------------------------------------------------------------------
# the filtration differential

def delta1(side, eps, chain, p, kind="refined"):
    """First filtration differential on a closed multitangent F2 chain.

    Lift the chain into filtration level p of the sign complex, take the
    boundary there, and read the result in level p+1 through the graded
    identification.  The output class is independent of the lift.
    """
    poset = side.poset(kind)
    pd = PhaseData(side, poset, eps)
    CF = side.complex(kind, "multitangent", p)
    q = chain_degree(poset, chain)
    if q is None:
        return {}
    if not CF.f2_is_cycle(CF.chain_to_packed(chain, q), q):
        raise NotAClosedChain("filtration differential input is not closed")
    Scx = pd.sign_complex()
    lift = {}
    for key, fcoords in chain.items():
        ci = poset.cell_index[key]
        gens = pd.filtration_generators(ci, p)
        rows = [g[1] for g in gens]
        sol = f2_solve_rows(
            [f2_pack(r) for r in rows], f2_pack([c & 1 for c in fcoords])
        )
        if sol is None:
            raise InternalCheckError(
                "chain coefficient is not in the filtration image"
            )
        ind = 0
        for i, take in enumerate(sol):
            if take:
                ind ^= gens[i][0]
        pc = pd.phase_cell(ci)
        coords = tuple((ind >> i) & 1 for i in range(len(pc.points)))
        if any(coords):
            lift[key] = coords
    lvec = Scx.chain_to_packed(lift, q)
    bchain = Scx.packed_to_chain(Scx.f2_boundary(lvec, q), q - 1)
    out = {}
    for key, scoords in bchain.items():
        ci = poset.cell_index[key]
        pc = pd.phase_cell(ci)
        ind = 0
        for i, c in enumerate(scoords):
            if c:
                ind |= 1 << i
        gens = pd.filtration_generators(ci, p + 1)
        sol = f2_solve_rows([g[0] for g in gens], ind)
        if sol is None:
            raise InternalCheckError(
                "boundary of the lift escaped the next filtration level"
            )
        fcoords = None
        for i, take in enumerate(sol):
            if take:
                fc = gens[i][1]
                fcoords = fc if fcoords is None else tuple(
                    a ^ b for a, b in zip(fcoords, fc)
                )
        if fcoords and any(fcoords):
            out[key] = fcoords
    CF1 = side.complex(kind, "multitangent", p + 1)
    if out:
        vec = CF1.chain_to_packed(out, q - 1)
        if not CF1.f2_is_cycle(vec, q - 1):
            raise InternalCheckError("filtration differential output not closed")
    return out


# ---------------------------------------------------------------------------
# connectedness

def check_vanishing_hypothesis(side):
    """H_n of the middle multitangent cosheaves must vanish mod 2."""
    for k in range(1, side.n):
        dim = side.homology("base", "multitangent", k, "f2").rank(side.n)
        if dim:
            raise HypothesisFails(k, dim)


def connectedness_verdict(side, rays):
    """'connected' iff the mirror divisor restriction class is nonzero.

    The worked cubic example fixes the orientation: a nonzero class means
    one component.  Raises HypothesisFails when the homology-vanishing
    hypothesis is violated (exit code 3 in the CLI).
    """
    check_vanishing_hypothesis(side)
    chain = divisor_restriction(side, rays)
    if not chain or is_null_class(side.mirror, chain, side.n - 1):
        return "two_components"
    return "connected"


def sweep_rows(side, masks, with_betti=True):
    """Sweep divisor classes: verdict, component count and optional betti."""
    rows = []
    for mask in masks:
        rays = mask_to_rays(side, mask)
        eps = signs_from_divisor(side, rays)
        verdict = connectedness_verdict(side, rays)
        chain = divisor_restriction(side, rays)
        nonzero = bool(chain) and not is_null_class(
            side.mirror, chain, side.n - 1
        )
        pd = PhaseData(side, side.base_poset, eps)
        rc = RealComplex(pd)
        b0 = rc.component_count()
        row = {
            "divisor": [list(v) for v in rays],
            "class_nonzero": nonzero,
            "b0": b0,
            "verdict": verdict,
        }
        if with_betti:
            row["betti"] = real_betti(side, eps)
        rows.append(row)
    return rows


def raw_sign_sweep(side):
    """Betti vectors for every sign distribution (for the equivalence test)."""
    points = list(side.newton.polytope.lattice_points)
    rows = []
    for mask in range(1 << len(points)):
        eps = {p: (mask >> i) & 1 for i, p in enumerate(points)}
        rows.append((eps, real_betti(side, eps)))
    return rows
