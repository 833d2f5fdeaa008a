"""Finite posets (finite T0-spaces) and their integral incidence algebras.

Order convention: x <= y (written leq) iff y lies in the minimal open set of
x.  Hasse arrows point downward, y -> x when y covers x, and a chain from y
down to x witnesses y >= x.  A unique path space is a poset in which that
chain is unique for every comparable pair.

The incidence algebra Z[X] is free on the comparable pairs; for unique path
spaces it is the integral path algebra of the Hasse quiver, and it has an
explicit length-one projective bimodule resolution which is materialized and
checked here on marked-path bases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import IntMatrix, lattices_equal, lattice_basis, matrix_rank


class FinitePoset:
    """A finite partial order with precomputed Hasse arrows.

    Built either from the full relation or from cover pairs.  Points keep
    their given labels; iteration order is the given point order.
    """

    def __init__(self, points, leq_pairs):
        self.points = list(points)
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate point labels")
        self.index = {p: i for i, p in enumerate(self.points)}
        n = len(self.points)
        rel = [[False] * n for _ in range(n)]
        for i in range(n):
            rel[i][i] = True
        for a, b in leq_pairs:
            rel[self.index[a]][self.index[b]] = True
        # transitive closure
        for k in range(n):
            for i in range(n):
                if rel[i][k]:
                    row_i, row_k = rel[i], rel[k]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        for i in range(n):
            for j in range(n):
                if i != j and rel[i][j] and rel[j][i]:
                    raise ValueError(
                        f"not antisymmetric: {self.points[i]} and {self.points[j]}"
                    )
        self._leq = rel
        self._hasse = self._compute_hasse()

    @classmethod
    def from_covers(cls, points, covers):
        """covers: pairs (y, x) meaning y covers x (arrow y -> x, so x <= y)."""
        return cls(points, [(x, y) for y, x in covers])

    def _compute_hasse(self):
        n = len(self.points)
        arrows = []
        for yi in range(n):
            for xi in range(n):
                if yi == xi or not self._leq[xi][yi]:
                    continue
                # y covers x iff no z strictly between
                if not any(
                    zi != xi and zi != yi and self._leq[xi][zi] and self._leq[zi][yi]
                    for zi in range(n)
                ):
                    arrows.append((self.points[yi], self.points[xi]))
        return arrows

    def leq(self, a, b):
        return self._leq[self.index[a]][self.index[b]]

    @property
    def hasse_arrows(self):
        """Arrows (y, x) with y covering x."""
        return list(self._hasse)

    def up_set(self, x):
        """Minimal open set of x: all y with x <= y."""
        return [p for p in self.points if self.leq(x, p)]

    def comparable_pairs(self):
        """All (y, x) with y > x."""
        return [
            (y, x)
            for y in self.points
            for x in self.points
            if y != x and self.leq(x, y)
        ]

    def hasse_children(self, y):
        return [x for (yy, x) in self._hasse if yy == y]

    def downward_chains(self, y, x, cap=None):
        """All Hasse chains y -> ... -> x, as point lists; cap limits count."""
        chains = []

        def walk(cur, path):
            if cap is not None and len(chains) >= cap:
                return
            if cur == x:
                chains.append(list(path))
                return
            for nxt in self.hasse_children(cur):
                if self.leq(x, nxt):
                    walk(nxt, path + [nxt])

        walk(y, [y])
        return chains

    def linear_extension(self):
        """Points ordered so that larger elements come first."""
        return sorted(self.points, key=lambda p: (len(self.up_set(p)), self.index[p]))

    def is_isomorphic_under(self, mapping, other):
        """Does the point bijection `mapping` carry this order onto `other`?"""
        for a in self.points:
            for b in self.points:
                if self.leq(a, b) != other.leq(mapping[a], mapping[b]):
                    return False
        return True

    def isomorphisms(self, other, limit=None):
        """All order isomorphisms onto `other` (backtracking search)."""
        if len(self.points) != len(other.points):
            return []

        def profile(poset, p):
            ups = len(poset.up_set(p))
            downs = sum(1 for q in poset.points if poset.leq(q, p))
            return (ups, downs)

        mine = self.linear_extension()
        theirs_by_profile = {}
        for q in other.points:
            theirs_by_profile.setdefault(profile(other, q), []).append(q)
        out = []

        def extend(i, mapping, used):
            if limit is not None and len(out) >= limit:
                return
            if i == len(mine):
                if self.is_isomorphic_under(mapping, other):
                    out.append(dict(mapping))
                return
            p = mine[i]
            for q in theirs_by_profile.get(profile(self, p), []):
                if q in used:
                    continue
                mapping[p] = q
                ok = all(
                    self.leq(p, r) == other.leq(q, mapping[r])
                    and self.leq(r, p) == other.leq(mapping[r], q)
                    for r in mine[:i]
                )
                if ok:
                    used.add(q)
                    extend(i + 1, mapping, used)
                    used.discard(q)
                del mapping[p]

        extend(0, {}, set())
        return out

    def __repr__(self):
        return f"FinitePoset({self.points}, arrows={self._hasse})"


def is_unique_path_space(x: FinitePoset):
    """(True, None) or (False, (two distinct chains for some pair))."""
    for y, z in x.comparable_pairs():
        chains = x.downward_chains(y, z, cap=2)
        if len(chains) > 1:
            return False, tuple(chains[:2])
        if len(chains) == 0:
            raise AssertionError("comparable pair without a Hasse chain")
    return True, None


# ---------------------------------------------------------------------------
# Incidence algebra and its bimodule resolution (unique path spaces)
# ---------------------------------------------------------------------------


def hasse_paths(x: FinitePoset):
    """All downward Hasse paths (as point tuples), including length zero."""
    paths = [(p,) for p in x.points]
    frontier = list(paths)
    while frontier:
        new = []
        for path in frontier:
            for child in x.hasse_children(path[-1]):
                new.append(path + (child,))
        paths.extend(new)
        frontier = new
    return paths


@dataclass
class BimoduleResolutionReport:
    poset_points: list
    algebra_rank: int
    middle_module_rank: int
    left_module_rank: int
    middle_map_rank: int
    left_map_rank: int
    exact: bool

    def summary(self):
        status = "exact" if self.exact else "NOT exact"
        return (
            f"bimodule resolution over {len(self.poset_points)} points: {status}; "
            f"module ranks (left, middle, right) = "
            f"({self.left_module_rank}, {self.middle_module_rank}, {self.algebra_rank}); "
            f"map ranks (left, middle) = ({self.left_map_rank}, {self.middle_map_rank})"
        )


def verify_bimodule_resolution(x: FinitePoset) -> BimoduleResolutionReport:
    """Materialize 0 -> (sum over arrows) -> (sum over points) -> Z[X] -> 0
    on marked-path bases and verify exactness by integer linear algebra.

    Basis of Z[X]: downward Hasse paths (for a unique path space these are
    the comparable pairs).  Middle: paths with one marked vertex.  Left:
    paths with two consecutive marked vertices.  The right map forgets the
    mark; the left map sends a doubly marked path to the difference of its
    two single markings.
    """
    ups, witness = is_unique_path_space(x)
    if not ups:
        raise ValueError(f"not a unique path space; two chains: {witness}")

    paths = hasse_paths(x)
    path_index = {p: i for i, p in enumerate(paths)}
    middle = [(p, l) for p in paths for l in range(len(p))]
    middle_index = {m: i for i, m in enumerate(middle)}
    left = [(p, l) for p in paths for l in range(len(p) - 1)]

    # right map: forget the marked position
    mu = IntMatrix.zeros(len(paths), len(middle))
    for j, (p, _l) in enumerate(middle):
        mu.data[path_index[p]][j] += 1

    # left map: doubly marked (l, l+1) |-> marked l minus marked l+1
    lam = IntMatrix.zeros(len(middle), len(left))
    for j, (p, l) in enumerate(left):
        lam.data[middle_index[(p, l)]][j] += 1
        lam.data[middle_index[(p, l + 1)]][j] -= 1

    # exactness: mu surjective onto Z^paths, ker(mu) = im(lam), lam injective
    surjective = lattices_equal(lattice_basis(mu), IntMatrix.identity(len(paths)))
    from .intlinalg import kernel_basis

    middle_exact = lattices_equal(kernel_basis(mu), lattice_basis(lam))
    injective = kernel_basis(lam).cols == 0
    return BimoduleResolutionReport(
        poset_points=list(x.points),
        algebra_rank=len(paths),
        middle_module_rank=len(middle),
        left_module_rank=len(left),
        middle_map_rank=matrix_rank(mu),
        left_map_rank=matrix_rank(lam),
        exact=surjective and middle_exact and injective,
    )


# ---------------------------------------------------------------------------
# Standard small posets and exhaustive enumeration
# ---------------------------------------------------------------------------


def point_poset():
    return FinitePoset(["*"], [])


def sierpinski_poset():
    """Two comparable points a < b (one Hasse arrow b -> a)."""
    return FinitePoset(["a", "b"], [("a", "b")])


def chain_poset(n):
    pts = [f"c{i}" for i in range(n)]
    return FinitePoset(pts, [(pts[i], pts[i + 1]) for i in range(n - 1)])


def antichain_poset(n):
    return FinitePoset([f"a{i}" for i in range(n)], [])


def diamond_poset():
    """min < two incomparable middles < max."""
    return FinitePoset(
        ["bot", "l", "r", "top"],
        [("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
    )


def all_posets_up_to_iso(n):
    """All isomorphism classes of posets on n points.

    Every finite poset admits a linear extension, so it suffices to
    enumerate strict relations contained in the natural order on 0..n-1,
    filter for transitivity, and deduplicate by canonical relabeling.
    """
    import itertools

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    out = []
    for bits in itertools.product([0, 1], repeat=len(pairs)):
        rel = {p for p, b in zip(pairs, bits) if b}
        if not _transitive(rel):
            continue
        canon = _canonical_relation(rel, n)
        if canon in seen:
            continue
        seen.add(canon)
        out.append(FinitePoset(list(range(n)), [(i, j) for i, j in rel]))
    return out


def _transitive(rel):
    return all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c)


def _canonical_relation(rel, n):
    import itertools

    best = None
    for perm in itertools.permutations(range(n)):
        mapped = frozenset((perm[a], perm[b]) for a, b in rel)
        key = tuple(sorted(mapped))
        if best is None or key < best:
            best = key
    return best
