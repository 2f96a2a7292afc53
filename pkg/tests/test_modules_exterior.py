import random

import pytest

from tropmirror.errors import DegreeOverflow, FreenessError, MembershipViolation
from tropmirror.exterior import (
    Multivector,
    annihilator_wedge,
    contract_vector,
    dim_wedge,
    index_sets,
    wedge_matrix,
    wedge_rows,
)
from tropmirror.intlinalg import vec_mat
from tropmirror.modules import FreeQuotient, PresentedModule


# -- presented modules --------------------------------------------------------

def test_sum_of_lines_is_plane():
    a = PresentedModule(2, [(1, 0)])
    b = PresentedModule(2, [(0, 1)])
    assert a.sum(b).rank() == 2


def test_index_two_sublattice_membership():
    m = PresentedModule(2, [(2, 0)])
    assert not m.contains((1, 0))
    assert m.contains((4, 0))


def test_quotient_by_diagonal_is_free_rank_one():
    m = PresentedModule(2, [(1, 0), (0, 1)]).quotient_by([(1, 1)])
    free, torsion = m.normalized()
    assert free == 1 and torsion == []


def test_quotient_torsion_detected():
    m = PresentedModule(2, [(1, 0), (0, 1)]).quotient_by([(2, 0)])
    free, torsion = m.normalized()
    assert free == 1 and torsion == [2]


def test_quotient_escape_raises():
    with pytest.raises(MembershipViolation):
        PresentedModule(2, [(2, 0)], [(1, 0)])


def test_intersection():
    a = PresentedModule(2, [(1, 0), (0, 2)])
    b = PresentedModule(2, [(0, 1)])
    inter = a.intersection(b)
    assert inter.canonical_basis() == [(0, 2)]


def test_free_quotient_reduce_rep_roundtrip():
    fq = FreeQuotient(2, [(1, 0), (0, 1)], [(1, 1)])
    assert fq.rank == 1
    for i in range(fq.rank):
        coords = fq.reduce(fq.rep(i))
        expected = tuple(1 if j == i else 0 for j in range(fq.rank))
        assert coords == expected
    # (1, 1) dies in the quotient
    assert fq.reduce((1, 1)) == (0,)


def test_free_quotient_torsion_rejected():
    with pytest.raises(FreenessError):
        FreeQuotient(2, [(1, 0), (0, 1)], [(2, 0)])


# -- exterior algebra ----------------------------------------------------------

def test_wedge_basis_vectors():
    e0 = Multivector.from_vector((1, 0, 0))
    e1 = Multivector.from_vector((0, 1, 0))
    assert e0.wedge(e1).coeffs == {(0, 1): 1}
    assert e1.wedge(e0).coeffs == {(0, 1): -1}
    v = e0 + e1
    assert v.wedge(v).is_zero()


def test_wedge_degree_overflow():
    top = Multivector.volume_form(2)
    with pytest.raises(DegreeOverflow):
        top.wedge(Multivector.from_vector((1, 0)))


def test_contraction_leibniz_degree_two():
    # iota_{f1*}(f1 ^ f2) = f2
    f1f2 = Multivector(3, 2, {(0, 1): 1})
    e0 = Multivector.from_vector((1, 0, 0))
    assert e0.contract(f1f2).coeffs == {(1,): 1}


def test_contraction_round_trip_sign_n1():
    # iota_{f1* ^ f2*}(f1 ^ f2) = -1 at rank 2: matches (-1)^(n(n+5)/2), n=1
    w = Multivector(2, 2, {(0, 1): 1})
    one = w.contract(Multivector.volume_form(2))
    assert one.scalar() == -1


def test_contraction_word_order():
    # iota_{a ^ b} = iota_a . iota_b (rightmost first)
    omega = Multivector.volume_form(3)
    a = Multivector.from_vector((1, 0, 0))
    b = Multivector.from_vector((0, 1, 0))
    ab = a.wedge(b)
    assert ab.contract(omega) == a.contract(b.contract(omega))


def test_kernel_of_contraction_is_annihilator_wedge():
    # brute force over rank 3: iota_v w = 0 for all v in S iff w in wedge(S-perp)
    rng = random.Random(2)
    for _ in range(10):
        v = [rng.randint(-2, 2) for _ in range(3)]
        if not any(v):
            continue
        ann = annihilator_wedge([tuple(v)], 2, 3)
        basis = ann.canonical_basis()
        # every element of the annihilator wedge contracts to zero
        for row in basis:
            w = dict(zip(index_sets(3, 2), row))
            w = {k: c for k, c in w.items() if c}
            assert not contract_vector(v, w)
        # and the kernel has no more: the integral kernel of the contraction
        # matrix on Pluecker coordinates must span the same module
        from tropmirror.intlinalg import hnf_basis, left_kernel

        lhs = hnf_basis([list(r) for r in basis])
        columns = index_sets(3, 1)
        rows = []
        for I in index_sets(3, 2):
            image = contract_vector(v, {I: 1})
            rows.append([image.get(J, 0) for J in columns])
        assert left_kernel(rows) == lhs


def test_annihilator_wedge_examples():
    # vectors {e0*}, p=1, rank 2 -> span of e1
    m = annihilator_wedge([(1, 0)], 1, 2)
    assert m.canonical_basis() == [(0, 1)]
    # empty vector set, p=1 -> everything
    m = annihilator_wedge([], 1, 3)
    assert m.rank() == 3


def test_wedge_matrix_cauchy_binet():
    rng = random.Random(9)
    for _ in range(10):
        A = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(4)]
        W = wedge_matrix(A, 2)
        u = [rng.randint(-2, 2) for _ in range(4)]
        v = [rng.randint(-2, 2) for _ in range(4)]
        lhs = wedge_rows([vec_mat(u, A), vec_mat(v, A)], 3)
        rhs = vec_mat(wedge_rows([u, v], 4), W)
        assert lhs == rhs


def test_dim_wedge():
    assert dim_wedge(4, 2) == 6
    assert dim_wedge(3, 0) == 1
    assert dim_wedge(2, 3) == 0
