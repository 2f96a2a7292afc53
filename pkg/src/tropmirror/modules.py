"""Presented modules: submodules of Z^m and their free quotients.

A PresentedModule is a span of rows inside a fixed free ambient module,
optionally modulo a second span that must sit inside the first.  Over Z the
row spans are exact submodules (never saturated), so membership means
integral membership.  FreeQuotient is the computational form used by the
cosheaf machinery: it fixes a canonical basis of sub/quo once and turns
"reduce an ambient vector to quotient coordinates" into fast exact
back-substitution.  Quotients with torsion raise FreenessError; every
cosheaf value in this artifact is free, and that fact is load-bearing
(tensoring with any ring preserves the presentations), so it is checked
rather than assumed.
"""

from .errors import FreenessError, MembershipViolation
from .intlinalg import (
    F2Space,
    _pivots,
    f2_pack,
    hnf_basis,
    left_kernel,
    rank_int,
    smith_diagonal,
    solve_hnf,
)


class FreeQuotient:
    """sub/quo presentation of a free quotient module with a fixed basis.

    ``sub_rows`` span a submodule S of Z^ambient, ``quo_rows`` a submodule Q
    of S; the object models S/Q.  Writing Q in S-coordinates and taking a
    Smith decomposition U C V = D, freeness means every nonzero divisor in D
    is 1; the rows of inv(V) then split S-coordinates into Q and a canonical
    complement, which becomes the basis of the quotient.  Quotients with
    torsion raise FreenessError.
    """

    __slots__ = ("ambient", "sub", "sub_pivots", "rank", "_V", "_reps_sub")

    def __init__(self, ambient, sub_rows, quo_rows=()):
        from .intlinalg import inverse_unimodular, smith

        self.ambient = ambient
        self.sub = hnf_basis(list(sub_rows))
        self.sub_pivots = _pivots(self.sub)
        r = len(self.sub)
        coords = []
        for row in quo_rows:
            c = solve_hnf(self.sub, self.sub_pivots, row)
            if c is None:
                raise MembershipViolation("quotient span escapes the submodule")
            coords.append(c)
        coords = hnf_basis(coords)
        if not coords:
            self._V = None
            self._reps_sub = [
                [1 if j == i else 0 for j in range(r)] for i in range(r)
            ]
            self.rank = r
            return
        D, U, V = smith(coords)
        s = len(coords)  # full row rank after the HNF pass
        for i in range(s):
            if D[i][i] != 1:
                raise FreenessError(
                    f"quotient has torsion: invariant factor {D[i][i]}"
                )
        W = inverse_unimodular(V)
        self._V = V
        self._reps_sub = W[s:]
        self.rank = r - s

    def contains(self, vec):
        return solve_hnf(self.sub, self.sub_pivots, vec) is not None

    def _sub_coords(self, vec):
        c = solve_hnf(self.sub, self.sub_pivots, vec)
        if c is None:
            raise MembershipViolation("vector is not in the submodule")
        return c

    def reduce(self, vec):
        """Quotient coordinates of an ambient vector in the submodule."""
        c = self._sub_coords(vec)
        if self._V is None:
            return tuple(c)
        r = len(self.sub)
        t = [sum(c[i] * self._V[i][j] for i in range(r)) for j in range(r)]
        return tuple(t[r - self.rank :])

    def rep(self, i):
        """Ambient representative of the i-th canonical basis class."""
        w = self._reps_sub[i]
        out = [0] * self.ambient
        for j, a in enumerate(w):
            if a:
                row = self.sub[j]
                for t in range(self.ambient):
                    out[t] += a * row[t]
        return tuple(out)

    def reps(self):
        return [self.rep(i) for i in range(self.rank)]

    def zero(self):
        return (0,) * self.rank


class PresentedModule:
    """Submodule-or-quotient presentation over Z, Q or F2.

    ``ring`` is one of 'z', 'q', 'f2'.  Over Z all spans are exact
    submodules.  Over Q the same integral rows are read as a Q-span.  Over
    F2 rows are reduced mod 2.
    """

    def __init__(self, ambient_rank, sub_basis, quo_basis=None, ring="z"):
        if ring not in ("z", "q", "f2"):
            raise ValueError(f"unknown ring {ring!r}")
        self.ambient_rank = ambient_rank
        self.ring = ring
        self.sub_basis = [tuple(r) for r in sub_basis]
        self.quo_basis = [tuple(r) for r in quo_basis] if quo_basis else []
        for r in self.sub_basis + self.quo_basis:
            if len(r) != ambient_rank:
                raise MembershipViolation("span row has wrong length")
        if self.quo_basis:
            for r in self.quo_basis:
                if not self._span_contains(self.sub_basis, r):
                    raise MembershipViolation("quotient span escapes the submodule")

    # -- helpers -----------------------------------------------------------
    def _span_contains(self, rows, vec):
        if self.ring == "z":
            H = hnf_basis(list(rows))
            return solve_hnf(H, _pivots(H), vec) is not None
        if self.ring == "q":
            return rank_int(list(rows)) == rank_int(list(rows) + [list(vec)])
        space = F2Space(f2_pack(r) for r in rows)
        return space.contains(f2_pack(vec))

    def _rank_of(self, rows):
        if self.ring == "f2":
            space = F2Space(f2_pack(r) for r in rows)
            return space.rank
        return rank_int(list(rows))

    # -- operations --------------------------------------------------------
    def contains(self, vec):
        return self._span_contains(self.sub_basis, vec)

    def canonical_basis(self):
        if self.ring == "f2":
            space = F2Space()
            out = []
            for r in self.sub_basis:
                if space.add(f2_pack(r)):
                    out.append(tuple(a & 1 for a in r))
            return out
        return [tuple(r) for r in hnf_basis(list(self.sub_basis))]

    def sum(self, other):
        self._check_compatible(other)
        return PresentedModule(
            self.ambient_rank, self.sub_basis + other.sub_basis, ring=self.ring
        )

    def intersection(self, other):
        self._check_compatible(other)
        if self.ring == "f2":
            raise NotImplementedError("intersection over F2 is not needed")
        A = [list(r) for r in self.sub_basis]
        B = [list(r) for r in other.sub_basis]
        stacked = A + B
        ker = left_kernel(stacked)
        rows = []
        for k in ker:
            v = [0] * self.ambient_rank
            for i, c in enumerate(k[: len(A)]):
                if c:
                    for j in range(self.ambient_rank):
                        v[j] += c * A[i][j]
            rows.append(v)
        return PresentedModule(self.ambient_rank, hnf_basis(rows), ring=self.ring)

    def quotient_by(self, rows):
        return PresentedModule(self.ambient_rank, self.sub_basis, rows, ring=self.ring)

    def normalized(self):
        """(free_rank, torsion invariants d1 | d2 | ...) of the presentation."""
        basis = hnf_basis(list(self.sub_basis))
        if not self.quo_basis:
            if self.ring == "f2":
                return self._rank_of(self.sub_basis), []
            return len(basis), []
        if self.ring == "f2":
            return self._rank_of(self.sub_basis) - self._rank_of(self.quo_basis), []
        piv = _pivots(basis)
        coords = [solve_hnf(basis, piv, r) for r in self.quo_basis]
        divisors = smith_diagonal(coords)
        free_rank = len(basis) - len(divisors)
        torsion = [d for d in divisors if d not in (0, 1)]
        if self.ring == "q":
            return free_rank, []
        return free_rank, torsion

    def rank(self):
        return self.normalized()[0]

    def _check_compatible(self, other):
        if self.ambient_rank != other.ambient_rank or self.ring != other.ring:
            raise MembershipViolation("incompatible presentations")

    def __repr__(self):
        tag = f" / {len(self.quo_basis)} relations" if self.quo_basis else ""
        return (
            f"PresentedModule(ambient={self.ambient_rank}, "
            f"span={len(self.sub_basis)}{tag}, ring={self.ring})"
        )
