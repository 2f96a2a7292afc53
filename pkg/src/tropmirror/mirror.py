"""Explicit chain-level mirror transfer and divisor restriction classes.

All chain surgery here is over F2 (the ring every acceptance check uses);
chains are dicts {cell key: coordinate tuple} in the canonical bases of the
cosheaf values.  The pipeline realizing the mirror isomorphism on a closed
multitangent chain is:

1. push through the surjection onto the extended mirror cosheaf;
2. kill the unbounded part: the part at infinity is inverted cellwise
   through the block-triangular correction operator (no global solve) and
   one boundary makes the chain supported on the sphere part;
3. apply the contraction against the volume form cellwise along the mirror
   cell bijection;
4. lift back through the kernel sequence on the mirror side, using the
   same correction operator for the kernel cosheaf.

The output is a closed multitangent chain of complementary wedge degree on
the mirror side whose class is independent of every choice made (tested).
"""

from .errors import (
    NotAClosedChain,
    RayNotInFan,
    SupportViolation,
    UnsupportedCell,
)
from .exterior import (
    coeffs_to_vector,
    contract_multivector,
    top_form,
    vector_to_coeffs,
    wedge_coeffs,
)
from .intlinalg import f2_pack, f2_solve_rows
from .posets import mirror_cell_refined


def contraction_sign(n):
    """The sign of the double contraction round trip, (-1)^(n(n+5)/2)."""
    return -1 if (n * (n + 5) // 2) % 2 else 1


def f2_apply(coords, rows):
    """coords . rows over F2 for a 0/1 tuple and an integer matrix."""
    if not rows:
        return ()
    ncols = len(rows[0])
    out = [0] * ncols
    for i, c in enumerate(coords):
        if c & 1:
            row = rows[i]
            for j in range(ncols):
                out[j] ^= row[j] & 1
    return tuple(out)


def f2_solve_matrix(rows, target):
    """x with x.rows = target over F2, coords as 0/1 tuples; None if none."""
    if not rows:
        return None if any(target) else ()
    packed = [f2_pack([a & 1 for a in r]) for r in rows]
    sol = f2_solve_rows(packed, f2_pack([a & 1 for a in target]))
    return None if sol is None else tuple(sol)


def chain_degree(poset, chain):
    degs = {poset.cells[poset.cell_index[k]].dim for k in chain}
    if len(degs) > 1:
        raise NotAClosedChain(f"chain mixes degrees {sorted(degs)}")
    return degs.pop() if degs else None


# ---------------------------------------------------------------------------
# sphere cycles

def sphere_cycle(side, kind="refined"):
    """The fundamental degree-n cycle of the sphere part, over F2."""
    poset = side.poset(kind)
    chain = {}
    for c in poset.cells:
        if poset.on_sphere(c) and len(c.sigma) == 2 and c.dim == side.n:
            chain[c.key] = (1,)
    return chain


# ---------------------------------------------------------------------------
# the block-triangular correction operator

def correction_operator(side, chain, p, tag="quotient"):
    """Cellwise inverse of (project . boundary) on the unbounded complexes.

    For the quotient cosheaf the input lives at infinity and the output on
    the finite unbounded part, matched through (tau, sigma) -> (tau minus 0,
    sigma).  For the kernel cosheaf the input lives on the sphere part and
    is matched through (tau, sigma) -> (tau, sigma minus 0).  Each
    coefficient is pulled back through the invertible cellwise cosheaf map.
    """
    poset = side.refined_poset
    ev = side.evaluator
    out = {}
    for key, coords in chain.items():
        ci = poset.cell_index.get(key)
        if ci is None:
            raise SupportViolation(f"{key} is not a refined-poset cell")
        zcell = poset.cells[ci]
        if tag == "quotient":
            if not poset.at_infinity(zcell):
                raise SupportViolation(f"{key} is not at infinity")
            xkey = (side.ambient.sigma_infty(zcell.tau), zcell.sigma)
        elif tag == "kernel":
            if not poset.on_sphere(zcell):
                raise SupportViolation(f"{key} is not on the sphere part")
            xkey = (zcell.tau, side.newton.sigma_infty(zcell.sigma))
        else:
            raise UnsupportedCell(tag)
        xi = poset.cell_index[xkey]
        xcell = poset.cells[xi]
        A = ev.map_matrix(tag, p, zcell, xcell)
        v = f2_solve_matrix(A, coords)
        assert v is not None, "cellwise transition map is not invertible mod 2"
        if any(v):
            out[xkey] = v
    return out


# ---------------------------------------------------------------------------
# contraction isomorphism

def contraction_matrix(side, p, cell, vertex=None):
    """Integer matrix of [z] -> [contraction of v wedge z against the volume
    form] from the mirror value at a sphere cell to the complementary-degree
    mirror value at the mirrored cell.  v defaults to the smallest vertex."""
    poset = side.refined_poset
    if not poset.on_sphere(cell):
        raise UnsupportedCell(f"{cell} is not a sphere-part cell")
    n = side.n
    m = side.rank
    v = cell.tau[0] if vertex is None else vertex
    Vx = side.evaluator.value("mirror", p, cell)
    mkey = mirror_cell_refined(poset, cell.key)
    mirror_poset = side.mirror.refined_poset
    mcell = mirror_poset.cells[mirror_poset.cell_index[mkey]]
    Vy = side.mirror.evaluator.value("mirror", n - p, mcell)
    omega = top_form(m)
    v1 = {(j,): c for j, c in enumerate(v) if c}
    rows = []
    for i in range(Vx.rank):
        z = vector_to_coeffs(list(Vx.rep(i)), m, p)
        vz = wedge_coeffs(v1, z)
        image = contract_multivector(vz, m, omega)
        rows.append(list(Vy.reduce(coeffs_to_vector(image, m, n - p))))
    return rows, mkey


# ---------------------------------------------------------------------------
# divisor restriction

def divisor_restriction(side, rays):
    """The mirror-side cycle cut out by an F2 toric divisor.

    ``side`` is the patchworking side (the divisor lives on the fan of its
    Newton triangulation); the output chain lives on the mirror side's
    posets, supported at infinity, with the rank-one generator of each
    incident cell as coefficient.  Degree n-1; closed over F2.
    """
    support = set()
    boundary_points = set(side.newton.rays())
    for r in rays:
        v = tuple(r)
        if v not in boundary_points:
            raise RayNotInFan(f"{v} is not a ray of the Newton fan")
        support.symmetric_difference_update({v})
    mirror = side.mirror
    poset = mirror.base_poset
    o = mirror.ambient.origin
    n = side.n
    chain = {}
    for v in sorted(support):
        tau = tuple(sorted((o, v)))
        for cell in poset.cells:
            if cell.tau == tau and len(cell.sigma) == 2:
                val = mirror.evaluator.value("multitangent", n - 1, cell)
                assert val.rank == 1, "divisor cell coefficient is not rank one"
                prev = chain.get(cell.key, (0,))
                new = (prev[0] ^ 1,)
                if new[0]:
                    chain[cell.key] = new
                else:
                    chain.pop(cell.key, None)
    return chain


def is_null_class(side, chain, p, kind="base", tag="multitangent"):
    """True iff the closed F2 chain bounds in the given complex."""
    cx = side.complex(kind, tag, p)
    poset = side.poset(kind)
    q = chain_degree(poset, chain)
    if q is None:
        return True
    vec = cx.chain_to_packed(chain, q)
    return cx.f2_is_boundary(vec, q)


# ---------------------------------------------------------------------------
# the full transfer

def transfer_class(side, chain, p):
    """Transfer a closed F2 multitangent chain to the mirror side.

    Input: degree-q cycle with degree-p multitangent coefficients on the
    refined poset of ``side``.  Output: degree-q cycle with degree-(n-p)
    multitangent coefficients on the refined poset of the mirror side,
    representing the mirror class.
    """
    poset = side.refined_poset
    ev = side.evaluator
    n = side.n
    CF = side.complex("refined", "multitangent", p)
    q = chain_degree(poset, chain)
    if q is None:
        return {}
    if not CF.f2_is_cycle(CF.chain_to_packed(chain, q), q):
        raise NotAClosedChain("transfer input is not closed")
    CMD = side.complex("refined", "mirror_ext", p)

    # 1. push into the extended mirror cosheaf
    md = {}
    for key, coords in chain.items():
        cell = poset.cells[poset.cell_index[key]]
        Vf = ev.value("multitangent", p, cell)
        Vmd = ev.value("mirror_ext", p, cell)
        if Vf is Vmd:
            out = coords
        else:
            proj = [list(Vmd.reduce(Vf.rep(i))) for i in range(Vf.rank)]
            out = f2_apply(coords, proj)
        if any(out):
            md[key] = out

    # 2. cancel the unbounded part through the correction operator
    inf_part = {
        k: v
        for k, v in md.items()
        if poset.at_infinity(poset.cells[poset.cell_index[k]])
    }
    if inf_part:
        beta = correction_operator(side, inf_part, p, tag="quotient")
        bvec = CMD.chain_to_packed(beta, q + 1)
        corrected_vec = CMD.chain_to_packed(md, q) ^ CMD.f2_boundary(bvec, q + 1)
        md = CMD.packed_to_chain(corrected_vec, q)
    for key in md:
        cell = poset.cells[poset.cell_index[key]]
        assert poset.on_sphere(cell), "correction left unbounded coefficients"

    # 3. contract cellwise along the mirror bijection
    mirror = side.mirror
    out = {}
    for key, coords in md.items():
        cell = poset.cells[poset.cell_index[key]]
        rows, mkey = contraction_matrix(side, p, cell)
        w = f2_apply(coords, rows)
        if any(w):
            out[mkey] = w
    CMm = mirror.complex("refined", "mirror", n - p)
    assert CMm.f2_is_cycle(CMm.chain_to_packed(out, q), q), (
        "mirrored chain is not closed"
    )

    # 4. lift back through the kernel sequence on the mirror side
    mposet = mirror.refined_poset
    mev = mirror.evaluator
    lift = {}
    for key, w in out.items():
        cell = mposet.cells[mposet.cell_index[key]]
        Vf = mev.value("multitangent", n - p, cell)
        Vmd = mev.value("mirror_ext", n - p, cell)
        proj = [list(Vmd.reduce(Vf.rep(i))) for i in range(Vf.rank)]
        u = f2_solve_matrix(proj, w)
        assert u is not None, "surjection onto the mirror cosheaf failed to lift"
        lift[key] = u
    CFm = mirror.complex("refined", "multitangent", n - p)
    uvec = CFm.chain_to_packed(lift, q)
    cvec = CFm.f2_boundary(uvec, q)
    if cvec:
        c_chain = CFm.packed_to_chain(cvec, q - 1)
        # express the defect in kernel-cosheaf coordinates (it lives there)
        c_kernel = {}
        for key, coords in c_chain.items():
            cell = mposet.cells[mposet.cell_index[key]]
            assert mposet.on_sphere(cell), "lift defect escapes the sphere part"
            VR = mev.value("kernel", n - p, cell)
            VF = mev.value("multitangent", n - p, cell)
            incl = [list(VF.reduce(VR.rep(i))) for i in range(VR.rank)]
            e = f2_solve_matrix(incl, coords)
            assert e is not None, "lift defect is not a kernel chain"
            c_kernel[key] = e
        r = correction_operator(mirror, c_kernel, n - p, tag="kernel")
        iota_r = {}
        for key, coords in r.items():
            cell = mposet.cells[mposet.cell_index[key]]
            VR = mev.value("kernel", n - p, cell)
            VF = mev.value("multitangent", n - p, cell)
            incl = [list(VF.reduce(VR.rep(i))) for i in range(VR.rank)]
            w = f2_apply(coords, incl)
            if any(w):
                iota_r[key] = w
        uvec ^= CFm.chain_to_packed(iota_r, q)
    if not CFm.f2_is_cycle(uvec, q):
        raise NotAClosedChain("transfer output failed to close")
    return CFm.packed_to_chain(uvec, q)
