import pytest

from tropmirror.lattice import LatticePolytope
from tropmirror.triangulate import generate_central
from tropmirror.pairs import MirrorPair

# the corpus: a plane cubic pair, its all-even companion, and the 3d K3 pair
CUBIC_VERTS = [(-1, -1), (-1, 2), (2, -1)]
CUBIC_DUAL_VERTS = [(1, 1), (-1, 0), (0, -1)]
DIAMOND_VERTS = [(1, 0), (0, 1), (-1, 0), (0, -1)]
SQUARE_VERTS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
CUBE_VERTS = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
OCTA_VERTS = [
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
]


@pytest.fixture(scope="session")
def cubic():
    return LatticePolytope(CUBIC_VERTS)


@pytest.fixture(scope="session")
def cubic_dual():
    return LatticePolytope(CUBIC_DUAL_VERTS)


@pytest.fixture(scope="session")
def cube():
    return LatticePolytope(CUBE_VERTS)


@pytest.fixture(scope="session")
def octahedron():
    return LatticePolytope(OCTA_VERTS)


@pytest.fixture(scope="session")
def cubic_pair():
    """Pair (Delta=cubic triangle, Delta_dual=small triangle), n = 1."""
    T = generate_central(LatticePolytope(CUBIC_VERTS))
    Tdual = generate_central(LatticePolytope(CUBIC_DUAL_VERTS))
    return MirrorPair(T, Tdual)


@pytest.fixture(scope="session")
def diamond_pair():
    """Pair (Delta=diamond, Delta_dual=square): every patchworking splits."""
    T = generate_central(LatticePolytope(DIAMOND_VERTS))
    Tdual = generate_central(LatticePolytope(SQUARE_VERTS))
    return MirrorPair(T, Tdual)


@pytest.fixture(scope="session")
def k3_pair():
    """Pair (Delta=cube with 48 tetrahedra, Delta_dual=octahedron with 8)."""
    T = generate_central(LatticePolytope(CUBE_VERTS))
    Tdual = generate_central(LatticePolytope(OCTA_VERTS))
    return MirrorPair(T, Tdual)


@pytest.fixture(scope="session")
def quartic_pair():
    """The 35-point quartic simplex and its 5-point dual."""
    quartic = LatticePolytope([(-1, -1, -1), (3, -1, -1), (-1, 3, -1), (-1, -1, 3)])
    T = generate_central(quartic)
    Tdual = generate_central(quartic.dual())
    return MirrorPair(T, Tdual)
