import random

import pytest

from tropmirror.errors import InvalidPhaseStructure
from tropmirror.mirror import divisor_restriction, is_null_class, sphere_cycle, transfer_class
from tropmirror.patchwork import (
    PhaseData,
    connectedness_verdict,
    delta1,
    divisor_class_representatives,
    divisor_from_signs,
    divisors_equivalent,
    mask_to_rays,
    phase_from_signs,
    real_betti,
    sample_divisor_classes,
    signs_from_divisor,
    signs_from_phase,
    sweep_rows,
    validate_phase,
)

D7 = (-1, 2)   # a vertex ray of the cubic Newton triangle
D8 = (-1, 1)   # the adjacent interior boundary point of the same facet


# -- conversions ---------------------------------------------------------------

def test_all_equal_signs_give_full_divisor(cubic_pair):
    side = cubic_pair.side_a
    eps = {p: 1 for p in side.newton.polytope.lattice_points}
    assert divisor_from_signs(side, eps) == sorted(side.newton.rays())


def test_sign_phase_roundtrip(cubic_pair):
    side = cubic_pair.side_a
    rng = random.Random(5)
    pts = side.newton.polytope.lattice_points
    for _ in range(10):
        eps = {p: rng.randint(0, 1) for p in pts}
        t = phase_from_signs(side, eps)
        validate_phase(side, t)
        back = signs_from_phase(side, t)
        flip = 1 ^ eps[side.newton.origin]
        assert all(back[p] == eps[p] ^ flip for p in pts)


def test_divisor_sign_roundtrip(cubic_pair):
    side = cubic_pair.side_a
    rays = [D7, D8, (1, 0)]
    eps = signs_from_divisor(side, rays)
    assert sorted(divisor_from_signs(side, eps)) == sorted(rays)


def test_invalid_phase_structure_rejected(cubic_pair):
    side = cubic_pair.side_a
    eps = {p: 0 for p in side.newton.polytope.lattice_points}
    t = phase_from_signs(side, eps)
    # breaking one edge makes some triangle carry exactly one zero edge
    bad = dict(t)
    first = next(iter(bad))
    bad[first] ^= 1
    with pytest.raises(InvalidPhaseStructure):
        signs_from_phase(side, bad)


def test_linear_shift_gives_equivalent_divisors(cubic_pair):
    side = cubic_pair.side_a
    rng = random.Random(11)
    pts = side.newton.polytope.lattice_points
    for _ in range(10):
        eps = {p: rng.randint(0, 1) for p in pts}
        xi = [rng.randint(0, 1) for _ in range(side.rank)]
        shifted = {
            p: eps[p] ^ (sum(x * a for x, a in zip(xi, p)) & 1) for p in pts
        }
        d1 = divisor_from_signs(side, eps)
        d2 = divisor_from_signs(side, shifted)
        assert divisors_equivalent(side, d1, d2)


def test_cubic_has_128_divisor_classes(cubic_pair):
    reps = divisor_class_representatives(cubic_pair.side_a)
    assert len(reps) == 128


def test_sampling_is_deterministic(k3_pair):
    side = k3_pair.side_a
    a = sample_divisor_classes(side, 20, seed=7)
    b = sample_divisor_classes(side, 20, seed=7)
    assert a == b and len(a) == 20


# -- phase sets and the sign complex ------------------------------------------------

def test_phase_set_sizes_on_edges(cubic_pair, k3_pair):
    # for dim sigma = 1 the phase set is an affine space of dimension n - dim tau
    for pair in (cubic_pair, k3_pair):
        side = pair.side_a
        poset = side.base_poset
        eps = signs_from_divisor(side, [])
        pd = PhaseData(side, poset, eps)
        for c in poset.cells:
            if len(c.sigma) != 2:
                continue
            pc = pd.phase_cell(c.index)
            assert len(pc.points) == 1 << (side.n - (len(c.tau) - 1))


def test_filtration_rank_identity_and_preservation(cubic_pair):
    # rank K_p/K_{p+1} = rank F_p mod 2 on every cell, and the boundary of a
    # level-p chain stays in level p
    side = cubic_pair.side_a
    poset = side.base_poset
    eps = signs_from_divisor(side, [D7, D8])
    pd = PhaseData(side, poset, eps)
    for c in poset.cells:
        pc = pd.phase_cell(c.index)
        if not pc.points:
            continue
        spaces = {}
        for p in range(side.n + 2):
            spaces[p] = pd.filtration_space(c.index, p)
        # K_{n+1} = 0 and K_0 is everything
        assert spaces[side.n + 1].rank == 0
        assert spaces[0].rank == len(pc.points)
        for p in range(side.n + 1):
            f_rank = side.evaluator.value("multitangent", p, c).rank
            assert spaces[p].rank - spaces[p + 1].rank == f_rank, (c, p)
            # nesting
            for ind, _ in pd.filtration_generators(c.index, p + 1):
                assert spaces[p].contains(ind)
    # preservation by the cosheaf maps: image of level-p generators stays
    # in level p on every cover
    for (yi, xi) in poset.covers:
        px, py = pd.phase_cell(xi), pd.phase_cell(yi)
        if not px.points or not py.points:
            continue
        for p in range(side.n + 1):
            target = pd.filtration_space(yi, p)
            for ind, _ in pd.filtration_generators(xi, p):
                out = 0
                v = ind
                while v:
                    low = v & (-v)
                    s = px.points[low.bit_length() - 1]
                    out ^= 1 << py.index[pd.transport(s, px.stratum, py.stratum)]
                    v ^= low
                assert target.contains(out), (xi, yi, p)


def test_well_defined_graded_identification(cubic_pair):
    # generators whose indicator lies in K_{p+1} must carry zero F-coords
    # modulo the image of level p+1: combination check per cell
    side = cubic_pair.side_a
    poset = side.base_poset
    eps = signs_from_divisor(side, [D7])
    pd = PhaseData(side, poset, eps)
    for c in poset.cells:
        pc = pd.phase_cell(c.index)
        if not pc.points:
            continue
        for p in range(side.n + 1):
            gens = pd.filtration_generators(c.index, p)
            if not gens:
                continue
            rows = [g[0] for g in gens]
            # the graded identification must kill level-(p+1) indicators:
            # express each in level-p generators and check zero wedge image
            for ind, fc in pd.filtration_generators(c.index, p + 1):
                from tropmirror.intlinalg import f2_solve_rows

                sol = f2_solve_rows(rows, ind)
                assert sol is not None
                acc = None
                for i, take in enumerate(sol):
                    if take:
                        acc = (
                            gens[i][1]
                            if acc is None
                            else tuple(a ^ b for a, b in zip(acc, gens[i][1]))
                        )
                assert acc is None or not any(acc), (c, p)


# -- real complex and betti -----------------------------------------------------------

def test_cubic_connected_example(cubic_pair):
    side = cubic_pair.side_a
    eps = signs_from_divisor(side, [D7, D8])
    assert real_betti(side, eps) == [1, 1]


def test_cubic_disconnected_example(cubic_pair):
    side = cubic_pair.side_a
    eps = signs_from_divisor(side, [D8])
    betti = real_betti(side, eps)
    assert betti[0] == 2


def test_diamond_pair_always_disconnected(diamond_pair):
    # every patchworking of this pair splits: all dual edges have even length
    side = diamond_pair.side_a
    pts = list(side.newton.polytope.lattice_points)
    for mask in range(1 << len(pts)):
        eps = {p: (mask >> i) & 1 for i, p in enumerate(pts)}
        assert real_betti(side, eps)[0] == 2


def test_verdicts_match_figures(cubic_pair):
    side = cubic_pair.side_a
    assert connectedness_verdict(side, [D7, D8]) == "connected"
    assert connectedness_verdict(side, [D8]) == "two_components"
    # divisors supported in facet interiors always disconnect
    verts = set(side.newton.polytope.vertices)
    interior = [v for v in side.newton.rays() if v not in verts]
    assert connectedness_verdict(side, interior) == "two_components"


# -- delta1 and the connectedness criterion ----------------------------------------------

def test_delta1_of_boundary_class_is_null(cubic_pair):
    side = cubic_pair.side_a
    eps = signs_from_divisor(side, [D7, D8])
    cx = side.complex("refined", "multitangent", 0)
    n = side.n
    rows = cx.f2_rows(n + 1) if (n + 1) in cx.D else []
    rng = random.Random(3)
    for r in rows[:5]:
        if not r:
            continue
        chain = cx.packed_to_chain(r, n)
        out = delta1(side, eps, chain, 0)
        if out:
            assert is_null_class(
                side, out, 1, kind="refined", tag="multitangent"
            )


def test_delta1_lift_independence(cubic_pair):
    # two different solves (different generator orders) give homologous output
    side = cubic_pair.side_a
    eps = signs_from_divisor(side, [D7])
    S = sphere_cycle(side)
    out1 = delta1(side, eps, S, 0)
    # perturb the input by a boundary: class output must stay homologous
    cx = side.complex("refined", "multitangent", 0)
    n = side.n
    rows = cx.f2_rows(n + 1) if (n + 1) in cx.D else []
    vec = cx.chain_to_packed(S, n)
    for r in rows[:3]:
        pert = cx.packed_to_chain(vec ^ r, n)
        out2 = delta1(side, eps, pert, 0)
        cx1 = side.complex("refined", "multitangent", 1)
        v1 = cx1.chain_to_packed(out1, n - 1) if out1 else 0
        v2 = cx1.chain_to_packed(out2, n - 1) if out2 else 0
        assert cx1.f2_is_boundary(v1 ^ v2, n - 1)


def test_delta1_on_base_poset_matches_verdict(cubic_pair):
    # the first differential of the fundamental class vanishes exactly when
    # the patchworking splits, computed on the unrefined poset as well
    side = cubic_pair.side_a
    for rays, connected in (([D7], True), ([D8], False), ([D7, D8], True)):
        eps = signs_from_divisor(side, rays)
        S = sphere_cycle(side, kind="base")
        out = delta1(side, eps, S, 0, kind="base")
        if out:
            nonzero = not is_null_class(
                side, out, 1, kind="base", tag="multitangent"
            )
        else:
            nonzero = False
        assert nonzero == connected, rays


def test_delta1_mirror_is_divisor_class_cubic(cubic_pair):
    # the first differential of the fundamental class transfers to the
    # divisor restriction class, for every divisor class
    side = cubic_pair.side_a
    n = side.n
    cxm = side.mirror.complex("refined", "multitangent", n - 1)
    for mask in divisor_class_representatives(side)[:16]:
        rays = mask_to_rays(side, mask)
        eps = signs_from_divisor(side, rays)
        d1S = delta1(side, eps, sphere_cycle(side), 0)
        transferred = transfer_class(side, d1S, 1) if d1S else {}
        dx = divisor_restriction(side, rays)
        v1 = cxm.chain_to_packed(transferred, n - 1) if transferred else 0
        v2 = cxm.chain_to_packed(dx, n - 1) if dx else 0
        assert cxm.f2_is_boundary(v1 ^ v2, n - 1), mask


def test_delta1_middle_degree_k3(k3_pair):
    # the differential out of the 20-dimensional middle group runs and
    # lands in closed chains of the next wedge degree
    side = k3_pair.side_a
    rays = side.newton.rays()[:3]
    eps = signs_from_divisor(side, rays)
    cx = side.complex("refined", "multitangent", 1)
    gens = cx.f2_homology_generators(1)
    assert len(gens) == 20
    for rep in gens[:3]:
        out = delta1(side, eps, cx.packed_to_chain(rep, 1), 1)
        if out:
            cx2 = side.complex("refined", "multitangent", 2)
            vec = cx2.chain_to_packed(out, 0)
            assert cx2.f2_is_cycle(vec, 0)


def test_cubic_sweep_exhaustive(cubic_pair):
    side = cubic_pair.side_a
    masks = divisor_class_representatives(side)
    rows = sweep_rows(side, masks, with_betti=False)
    assert len(rows) == 128
    for row in rows:
        assert row["b0"] in (1, 2)
        expected = "connected" if row["b0"] == 1 else "two_components"
        assert row["verdict"] == expected
        assert row["class_nonzero"] == (row["b0"] == 1)


def test_equivalent_divisors_same_betti(cubic_pair):
    side = cubic_pair.side_a
    rng = random.Random(13)
    rays = side.newton.rays()
    for _ in range(6):
        d = [v for v in rays if rng.random() < 0.5]
        xi = [rng.randint(0, 1) for _ in range(side.rank)]
        eps = signs_from_divisor(side, d)
        shifted = {
            p: eps[p] ^ (sum(x * a for x, a in zip(xi, p)) & 1)
            for p in eps
        }
        assert real_betti(side, eps) == real_betti(side, shifted)
