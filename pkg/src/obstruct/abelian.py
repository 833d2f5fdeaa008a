"""Finitely generated abelian groups as presentations, with Hom and Ext^1.

A group is Z^n modulo the column lattice of a relation matrix.  Groups are
never silently canonicalized: the presentation and its generator basis are
kept so that morphism matrices stay meaningful; the canonical decomposition
into cyclic factors is a derived view (via the cached Smith normal form of
the relations).

Hom and Ext^1 carry explicit representing bases (morphisms, respectively
cocycles against a fixed free resolution), so induced maps and connecting
maps can be computed on the nose rather than up to isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .intlinalg import (
    ColumnLattice,
    IntMatrix,
    kernel_basis,
    lattice_basis,
    smith_normal_form,
    solve,
)


class IllDefinedMorphism(ValueError):
    """A candidate matrix does not map source relations into target relations.

    Carries a violating relation as witness.
    """

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"matrix does not respect relations; violating relation {witness}")


class FgAbGroup:
    """Z^ngens modulo the column span of `relations` (ngens x k)."""

    __slots__ = ("ngens", "relations", "_snf", "_canon_positions")

    def __init__(self, ngens, relations=None):
        if relations is None:
            relations = IntMatrix.zeros(ngens, 0)
        if relations.rows != ngens:
            raise ValueError(f"relation matrix has {relations.rows} rows, expected {ngens}")
        self.ngens = ngens
        self.relations = relations
        self._snf = None
        self._canon_positions = None

    @classmethod
    def free(cls, n):
        return cls(n)

    @classmethod
    def cyclic(cls, d):
        return cls(1, IntMatrix.from_rows([[d]]))

    @classmethod
    def from_invariant_factors(cls, factors):
        """Direct sum of Z/d over the given list; d = 0 means a Z summand."""
        n = len(factors)
        cols = [
            [factors[i] if j == i else 0 for j in range(n)]
            for i in range(n)
            if factors[i] != 0
        ]
        return cls(n, IntMatrix.from_columns(cols, rows=n) if cols else None)

    @classmethod
    def trivial(cls):
        return cls(0)

    @property
    def snf(self):
        if self._snf is None:
            self._snf = smith_normal_form(self.relations)
        return self._snf

    def _diag_padded(self):
        return self.snf.diagonal_padded(self.ngens)

    @property
    def canon_positions(self):
        """Generator slots of the canonical form whose factor is not 1."""
        if self._canon_positions is None:
            diag = self._diag_padded()
            self._canon_positions = [i for i, d in enumerate(diag) if d != 1]
        return self._canon_positions

    @property
    def invariant_factors(self):
        """Nonunit invariant factors, divisibility chain first, 0 = free factor."""
        diag = self._diag_padded()
        return [diag[i] for i in self.canon_positions]

    def order(self):
        """Group order, or None if infinite."""
        total = 1
        for d in self.invariant_factors:
            if d == 0:
                return None
            total *= d
        return total

    @property
    def rank(self):
        return sum(1 for d in self.invariant_factors if d == 0)

    @property
    def torsion_factors(self):
        return [d for d in self.invariant_factors if d != 0]

    def is_trivial(self):
        return not self.invariant_factors

    def is_free(self):
        return all(d == 0 for d in self.invariant_factors)

    def contains_relation(self, vec) -> bool:
        """Is the vector zero in the group (i.e. in the relation lattice)?"""
        s = self.snf
        y = s.U.apply(vec)
        diag = self._diag_padded()
        for i in range(self.ngens):
            if diag[i] == 0:
                if y[i] != 0:
                    return False
            elif y[i] % diag[i] != 0:
                return False
        return True

    def element_equal(self, v, w):
        return self.contains_relation([a - b for a, b in zip(v, w)])

    def canon_coords(self, vec):
        """Coordinates of the class of vec in the canonical cyclic decomposition."""
        y = self.snf.U.apply(vec)
        diag = self._diag_padded()
        out = []
        for i in self.canon_positions:
            out.append(y[i] % diag[i] if diag[i] != 0 else y[i])
        return tuple(out)

    def from_canon(self, coords):
        """A generator-basis representative of the given canonical coordinates."""
        y = [0] * self.ngens
        for c, i in zip(coords, self.canon_positions):
            y[i] = c
        return self.snf.Uinv.apply(y)

    def elements(self):
        """Iterate canonical coordinates of all elements (finite groups only)."""
        facs = self.invariant_factors
        if any(d == 0 for d in facs):
            raise ValueError("cannot enumerate an infinite group")
        return itertools.product(*[range(d) for d in facs])

    def zero(self):
        return [0] * self.ngens

    def describe(self):
        """Human-readable shape, e.g. 'Z/2 + Z/6 + Z^2'."""
        facs = self.invariant_factors
        if not facs:
            return "0"
        tors = [d for d in facs if d != 0]
        parts = [f"Z/{d}" for d in tors]
        r = len(facs) - len(tors)
        if r == 1:
            parts.append("Z")
        elif r > 1:
            parts.append(f"Z^{r}")
        return " + ".join(parts)

    def __repr__(self):
        return f"FgAbGroup({self.describe()}, ngens={self.ngens})"


class GroupMorphism:
    """A homomorphism given by an integer matrix on chosen generators.

    Column j is the image of generator j of the source.  Well-definedness
    (source relations land in the target relation lattice) is checked on
    construction unless `trusted=True`.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, trusted=False):
        if matrix.rows != target.ngens or matrix.cols != source.ngens:
            raise ValueError(
                f"matrix is {matrix.rows}x{matrix.cols}, expected {target.ngens}x{source.ngens}"
            )
        self.source = source
        self.target = target
        self.matrix = matrix
        if not trusted:
            witness = self._find_violation()
            if witness is not None:
                raise IllDefinedMorphism(witness)

    def _find_violation(self):
        for j in range(self.source.relations.cols):
            r = self.source.relations.column(j)
            if not self.target.contains_relation(self.matrix.apply(r)):
                return r
        return None

    @classmethod
    def identity(cls, group):
        return cls(group, group, IntMatrix.identity(group.ngens), trusted=True)

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens), trusted=True)

    def __matmul__(self, other):
        """self after other."""
        if other.target.ngens != self.source.ngens:
            raise ValueError("composition mismatch")
        return GroupMorphism(other.source, self.target, self.matrix @ other.matrix, trusted=True)

    def __add__(self, other):
        return GroupMorphism(self.source, self.target, self.matrix + other.matrix, trusted=True)

    def __sub__(self, other):
        return GroupMorphism(self.source, self.target, self.matrix - other.matrix, trusted=True)

    def __neg__(self):
        return GroupMorphism(self.source, self.target, -self.matrix, trusted=True)

    def scaled(self, c):
        return GroupMorphism(self.source, self.target, self.matrix.scaled(c), trusted=True)

    def __call__(self, vec):
        return self.matrix.apply(vec)

    def equals(self, other):
        """Equality as homomorphisms (matrices may differ by target relations)."""
        d = self.matrix - other.matrix
        return all(self.target.contains_relation(d.column(j)) for j in range(d.cols))

    def is_zero(self):
        return all(
            self.target.contains_relation(self.matrix.column(j)) for j in range(self.matrix.cols)
        )

    def preimage_lattice_basis(self) -> IntMatrix:
        """Basis of {x in Z^n_src : f(x) = 0 in target}, the kernel as a lattice.

        Contains the source relation lattice whenever f is well defined.
        """
        stacked = self.matrix.hstack(self.target.relations)
        full = kernel_basis(stacked)
        proj = full.submatrix(range(self.source.ngens), range(full.cols))
        return lattice_basis(proj)

    def kernel(self):
        """(K, incl) with K presented on a basis of the preimage lattice."""
        b = self.preimage_lattice_basis()
        blat = ColumnLattice(b)
        rel_cols = []
        for j in range(self.source.relations.cols):
            c = blat.solve(self.source.relations.column(j))
            assert c is not None, "source relations must lie in the kernel lattice"
            rel_cols.append(c)
        k = FgAbGroup(b.cols, IntMatrix.from_columns(rel_cols, rows=b.cols))
        incl = GroupMorphism(k, self.source, b, trusted=True)
        return k, incl

    def cokernel(self):
        """(C, proj) with C presented on the target generators."""
        c = FgAbGroup(self.target.ngens, self.matrix.hstack(self.target.relations))
        proj = GroupMorphism(self.target, c, IntMatrix.identity(self.target.ngens), trusted=True)
        return c, proj

    def is_iso(self):
        k, _ = self.kernel()
        if not k.is_trivial():
            return False
        c, _ = self.cokernel()
        return c.is_trivial()

    def inverse(self):
        """Two-sided inverse morphism; raises if not an isomorphism."""
        stacked = self.matrix.hstack(self.target.relations)
        s = smith_normal_form(stacked)
        cols = []
        n = self.source.ngens
        for j in range(self.target.ngens):
            e = [1 if i == j else 0 for i in range(self.target.ngens)]
            z = solve(stacked, e, snf=s)
            if z is None:
                raise ValueError("morphism is not surjective")
            cols.append(z[:n])
        inv = GroupMorphism(self.target, self.source, IntMatrix.from_columns(cols, rows=n))
        if not (inv @ self).equals(GroupMorphism.identity(self.source)):
            raise ValueError("morphism is not injective")
        return inv

    def __repr__(self):
        return f"GroupMorphism({self.source.describe()} -> {self.target.describe()})"


def kernel_cokernel(f: GroupMorphism):
    """Kernel with inclusion and cokernel with projection, per the contract
    0 -> ker -> source -> target -> coker -> 0."""
    k, incl = f.kernel()
    c, proj = f.cokernel()
    return k, incl, c, proj


def is_exact_at(f: GroupMorphism, g: GroupMorphism) -> bool:
    """Is im(f) = ker(g) inside the middle group (as subgroups)?"""
    if f.target is not g.source and f.target.ngens != g.source.ngens:
        raise ValueError("maps are not composable around a middle group")
    mid = g.source
    image_gens = f.matrix.hstack(mid.relations)
    kernel_gens = g.preimage_lattice_basis()
    from .intlinalg import lattices_equal

    return lattices_equal(lattice_basis(image_gens), kernel_gens)


def iso_groups(v: FgAbGroup, w: FgAbGroup):
    """(True, witness isomorphism) iff invariant factors agree, else (False, None)."""
    if v.invariant_factors != w.invariant_factors:
        return False, None
    e = IntMatrix.zeros(w.ngens, v.ngens)
    for pv, pw in zip(v.canon_positions, w.canon_positions):
        e.data[pw][pv] = 1
    mat = w.snf.Uinv @ e @ v.snf.U
    f = GroupMorphism(v, w, mat)
    return True, f


# ---------------------------------------------------------------------------
# Subquotients with representative bases
# ---------------------------------------------------------------------------


@dataclass
class SubquotientData:
    """ker(g)/im(f) at the middle of A --f--> B --g--> C, with coordinates.

    `group` is presented on a basis of the kernel-of-g lattice in B's
    generator coordinates; `rep` maps its generators to those ambient
    vectors.  `coords` sends an ambient vector representing a class (it must
    be killed by g) to canonical coordinates of that class.
    """

    group: FgAbGroup
    ambient: FgAbGroup
    rep: IntMatrix
    _rep_lattice: ColumnLattice

    def coords(self, ambient_vec):
        c = self._rep_lattice.solve(ambient_vec)
        if c is None:
            raise ValueError("vector does not represent a class (not killed by the outgoing map)")
        return self.group.canon_coords(c)

    def rep_of(self, coords):
        return self.rep.apply(self.group.from_canon(coords))

    @property
    def basis_reps(self):
        """One ambient representative per canonical generator of the group."""
        n = len(self.group.invariant_factors)
        out = []
        for l in range(n):
            coords = tuple(1 if i == l else 0 for i in range(n))
            out.append(self.rep_of(coords))
        return out


def homology_at(f: GroupMorphism | None, g: GroupMorphism | None, middle=None) -> SubquotientData:
    """Homology ker(g)/im(f) of a two-step complex of presented groups.

    Either map may be None (treated as zero).  Requires g(f(x)) = 0 in C for
    all x, which is asserted.
    """
    if middle is not None:
        mid = middle
    elif g is not None:
        mid = g.source
    elif f is not None:
        mid = f.target
    else:
        raise ValueError("need at least one map or an explicit middle group")
    if g is not None:
        if f is not None:
            assert (g @ f).is_zero(), "not a complex: g∘f != 0"
        b = g.preimage_lattice_basis()
    else:
        b = IntMatrix.identity(mid.ngens)
    blat = ColumnLattice(b)
    rel_cols = []
    if f is not None:
        for j in range(f.matrix.cols):
            c = blat.solve(f.matrix.column(j))
            assert c is not None, "image of f must lie in the kernel lattice of g"
            rel_cols.append(c)
    for j in range(mid.relations.cols):
        c = blat.solve(mid.relations.column(j))
        assert c is not None, "middle relations must lie in the kernel lattice of g"
        rel_cols.append(c)
    group = FgAbGroup(b.cols, IntMatrix.from_columns(rel_cols, rows=b.cols))
    return SubquotientData(group, mid, b, blat)


# ---------------------------------------------------------------------------
# Hom and Ext^1 with bases
# ---------------------------------------------------------------------------


def _power_group(w: FgAbGroup, copies: int) -> FgAbGroup:
    """W^copies with block-diagonal relations; generators grouped per copy."""
    rel = IntMatrix.identity(copies).kron(w.relations)
    return FgAbGroup(copies * w.ngens, rel)


def _flatten(matrix: IntMatrix):
    """Column-stacked vector of a matrix (vec), matching kron identities."""
    out = []
    for j in range(matrix.cols):
        out.extend(matrix.column(j))
    return out


def _unflatten(vec, rows, cols):
    data = [[vec[j * rows + i] for j in range(cols)] for i in range(rows)]
    return IntMatrix(rows, cols, data)


class HomGroup:
    """Hom_Z(V, W) with a representing morphism per canonical generator."""

    def __init__(self, source: FgAbGroup, target: FgAbGroup):
        self.source = source
        self.target = target
        n, m = source.ngens, target.ngens
        ambient = _power_group(target, n)
        if source.relations.cols:
            # N |-> N @ R_V lands in W^(#relations); vec form is kron(R^T, I)
            gmat = source.relations.transpose().kron(IntMatrix.identity(m))
            g = GroupMorphism(ambient, _power_group(target, source.relations.cols), gmat, trusted=True)
        else:
            g = None
        self.data = homology_at(None, g, middle=ambient)
        self.group = self.data.group

    @property
    def basis(self):
        return [
            GroupMorphism(self.source, self.target, _unflatten(v, self.target.ngens, self.source.ngens), trusted=True)
            for v in self.data.basis_reps
        ]

    def coords(self, f: GroupMorphism):
        return self.data.coords(_flatten(f.matrix))

    def from_coords(self, coords) -> GroupMorphism:
        v = self.data.rep_of(coords)
        return GroupMorphism(
            self.source, self.target, _unflatten(v, self.target.ngens, self.source.ngens), trusted=True
        )

    def elements(self):
        """All morphisms (finite Hom groups only)."""
        return (self.from_coords(c) for c in self.group.elements())


class Ext1Group:
    """Ext^1_Z(V, W) as cocycles against the free resolution
    0 -> Z^r --B--> Z^n -> V -> 0, where B is a basis of V's relation lattice.

    A cocycle is a map Z^r -> W, stored as a (target.ngens x r) matrix;
    coboundaries are precompositions N @ B of maps Z^n -> W.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup):
        self.source = source
        self.target = target
        self.res = lattice_basis(source.relations)  # n x r, injective
        n, m = source.ngens, target.ngens
        r = self.res.cols
        ambient = _power_group(target, r)
        if n:
            fmat = self.res.transpose().kron(IntMatrix.identity(m))
            f = GroupMorphism(_power_group(target, n), ambient, fmat, trusted=True)
        else:
            f = None
        self.data = homology_at(f, None, middle=ambient)
        self.group = self.data.group

    @property
    def basis(self):
        return [_unflatten(v, self.target.ngens, self.res.cols) for v in self.data.basis_reps]

    def coords(self, cocycle: IntMatrix):
        return self.data.coords(_flatten(cocycle))

    def from_coords(self, coords) -> IntMatrix:
        return _unflatten(self.data.rep_of(coords), self.target.ngens, self.res.cols)


def hom_z(v: FgAbGroup, w: FgAbGroup) -> HomGroup:
    return HomGroup(v, w)


def ext1_z(v: FgAbGroup, w: FgAbGroup) -> Ext1Group:
    return Ext1Group(v, w)


def resolution_lift(f: GroupMorphism, res_src: IntMatrix, res_tgt: IntMatrix) -> IntMatrix:
    """Chain lift F^1(src) -> F^1(tgt) of f over the generator-level lift.

    Solves res_tgt @ f1 = f.matrix @ res_src column by column; unique since
    res_tgt is injective, hence strictly functorial.
    """
    rhs = f.matrix @ res_src
    s = smith_normal_form(res_tgt)
    cols = []
    for j in range(rhs.cols):
        c = solve(res_tgt, rhs.column(j), snf=s)
        assert c is not None, "resolution lift must exist for a well-defined morphism"
        cols.append(c)
    return IntMatrix.from_columns(cols, rows=res_tgt.cols)


def _canonical_group(factors):
    return FgAbGroup.from_invariant_factors(list(factors))


def hom_induced(pre: GroupMorphism | None, post: GroupMorphism | None,
                hsrc: HomGroup, htgt: HomGroup) -> GroupMorphism:
    """Map Hom(V,W) -> Hom(V',W') sending b to post∘b∘pre, in canonical coords."""
    cols = []
    for b in hsrc.basis:
        g = b
        if pre is not None:
            g = g @ pre
        if post is not None:
            g = post @ g
        cols.append(list(htgt.coords(g)))
    n = len(htgt.group.invariant_factors)
    mat = IntMatrix.from_columns(cols, rows=n) if cols else IntMatrix.zeros(n, 0)
    return GroupMorphism(
        _canonical_group(hsrc.group.invariant_factors),
        _canonical_group(htgt.group.invariant_factors),
        mat,
        trusted=True,
    )


def _ext1_induced_matrix(pre: GroupMorphism | None, post: GroupMorphism | None,
                         esrc: Ext1Group, etgt: Ext1Group):
    lift = None
    if pre is not None:
        lift = resolution_lift(pre, etgt.res, esrc.res)
    cols = []
    for c in esrc.basis:
        m = c
        if lift is not None:
            m = m @ lift
        if post is not None:
            m = post.matrix @ m
        cols.append(list(etgt.coords(m)))
    n = len(etgt.group.invariant_factors)
    return IntMatrix.from_columns(cols, rows=n) if cols else IntMatrix.zeros(n, 0)


def ext1_induced(pre: GroupMorphism | None, post: GroupMorphism | None,
                 esrc: Ext1Group, etgt: Ext1Group) -> GroupMorphism:
    """Map Ext^1(V,W) -> Ext^1(V',W'): cocycle c to post∘c∘(lift of pre).

    pre must be a morphism V' -> V (contravariant slot), post W -> W'.
    """
    mat = _ext1_induced_matrix(pre, post, esrc, etgt)
    return GroupMorphism(
        _canonical_group(esrc.group.invariant_factors),
        _canonical_group(etgt.group.invariant_factors),
        mat,
        trusted=True,
    )


def induced_map(f: GroupMorphism, functor: str, other: FgAbGroup) -> GroupMorphism:
    """Induced map on Hom/Ext^1 in canonical coordinates.

    functor: 'hom-covariant'      Hom(other, src) -> Hom(other, tgt)
             'hom-contravariant'  Hom(tgt, other) -> Hom(src, other)
             'ext1-covariant'     Ext^1(other, src) -> Ext^1(other, tgt)
             'ext1-contravariant' Ext^1(tgt, other) -> Ext^1(src, other)
    """
    if functor == "hom-covariant":
        return hom_induced(None, f, hom_z(other, f.source), hom_z(other, f.target))
    if functor == "hom-contravariant":
        return hom_induced(f, None, hom_z(f.target, other), hom_z(f.source, other))
    if functor == "ext1-covariant":
        return ext1_induced(None, f, ext1_z(other, f.source), ext1_z(other, f.target))
    if functor == "ext1-contravariant":
        return ext1_induced(f, None, ext1_z(f.target, other), ext1_z(f.source, other))
    raise ValueError(f"unknown functor {functor!r}")


# ---------------------------------------------------------------------------
# Helpers used across modules and tests
# ---------------------------------------------------------------------------


def direct_sum(groups):
    """(G, injections, projections) for a finite direct sum."""
    n = sum(g.ngens for g in groups)
    rel = IntMatrix.block_diag([g.relations for g in groups], rows=n, cols=0)
    total = FgAbGroup(n, rel)
    injections, projections = [], []
    offset = 0
    for g in groups:
        inj = IntMatrix.zeros(n, g.ngens)
        proj = IntMatrix.zeros(g.ngens, n)
        for i in range(g.ngens):
            inj.data[offset + i][i] = 1
            proj.data[i][offset + i] = 1
        injections.append(GroupMorphism(g, total, inj, trusted=True))
        projections.append(GroupMorphism(total, g, proj, trusted=True))
        offset += g.ngens
    return total, injections, projections


def image_subgroup(f: GroupMorphism):
    """(H, embed) with H presented on the generator images of f."""
    n = f.source.ngens
    rel = GroupMorphism(
        FgAbGroup.free(n), f.target, f.matrix, trusted=True
    ).preimage_lattice_basis()
    h = FgAbGroup(n, rel)
    embed = GroupMorphism(h, f.target, f.matrix, trusted=True)
    return h, embed


def eventual_image(phi: GroupMorphism):
    """(H, embed, tau) for the stable image of an endomorphism of a finite group.

    H = im(phi^k) for stabilized k, with tau the induced automorphism.
    """
    g = phi.source
    if g.order() is None:
        raise ValueError("eventual image requires a finite group")
    power = phi
    h, embed = image_subgroup(power)
    prev = h.order()
    while True:
        power = phi @ power
        h2, embed2 = image_subgroup(power)
        if h2.order() == prev:
            h, embed = h2, embed2
            break
        h, embed, prev = h2, embed2, h2.order()
    # induced map on H: solve embed∘tau = phi∘embed
    stacked = embed.matrix.hstack(phi.target.relations)
    s = smith_normal_form(stacked)
    cols = []
    for j in range(h.ngens):
        rhs = phi.matrix.apply(embed.matrix.column(j))
        z = solve(stacked, rhs, snf=s)
        assert z is not None, "endomorphism must preserve its eventual image"
        cols.append(z[: h.ngens])
    tau = GroupMorphism(h, h, IntMatrix.from_columns(cols, rows=h.ngens))
    return h, embed, tau


def torsion_subgroup(g: FgAbGroup):
    """(T, embed) for the torsion subgroup of g."""
    sat = ColumnLattice(g.relations).saturation_basis()
    blat = ColumnLattice(sat)
    rel_cols = []
    for j in range(g.relations.cols):
        c = blat.solve(g.relations.column(j))
        assert c is not None
        rel_cols.append(c)
    t = FgAbGroup(sat.cols, IntMatrix.from_columns(rel_cols, rows=sat.cols))
    embed = GroupMorphism(t, g, sat, trusted=True)
    return t, embed
