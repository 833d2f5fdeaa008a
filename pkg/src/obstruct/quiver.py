"""Representations of finite posets (modules over the incidence algebra).

A representation assigns a finitely generated abelian group to every point
and a map along every Hasse arrow y -> x; composites along longer chains are
derived, and for posets that are not unique path spaces the module law
demands that all chain composites between the same endpoints agree (checked
on construction via `check_coherence`).

Projectives are the downset representations: P(x) carries Z at every z <= x
with identity transports.  Covers pick minimal generators per point modulo
the images of covering arrows, so resolutions terminate exactly at the
projective dimension.  Ext^n over the incidence algebra is the n-th
cohomology of the Hom complex of such a resolution; on unique path spaces an
independent route through the bimodule resolution is available as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (
    FgAbGroup,
    GroupMorphism,
    SubquotientData,
    _canonical_group,
    direct_sum,
    homology_at,
    iso_groups,
)
from .intlinalg import (
    ColumnLattice,
    IntMatrix,
    kernel_basis,
    lattice_basis,
    lattices_equal,
    smith_normal_form,
    solve,
)
from .posets import FinitePoset, is_unique_path_space


class ExactnessError(ValueError):
    """A sequence that must be exact is not; names the failing node."""


class QuiverRep:
    """Groups per point plus maps along Hasse arrows."""

    def __init__(self, poset: FinitePoset, groups, arrows, check=True):
        self.poset = poset
        self.groups = dict(groups)
        self.arrows = dict(arrows)
        for p in poset.points:
            if p not in self.groups:
                raise ValueError(f"missing group at point {p!r}")
        for y, x in poset.hasse_arrows:
            if (y, x) not in self.arrows:
                raise ValueError(f"missing arrow map for {y!r} -> {x!r}")
        if check:
            witness = self.check_coherence()
            if witness is not None:
                raise ValueError(f"chain composites disagree between {witness}")

    def group_at(self, p) -> FgAbGroup:
        return self.groups[p]

    def arrow_map(self, y, x) -> GroupMorphism:
        return self.arrows[(y, x)]

    def transport(self, y, x) -> GroupMorphism:
        """Composite map V_y -> V_x along any Hasse chain (x <= y)."""
        if x == y:
            return GroupMorphism.identity(self.groups[y])
        chains = self.poset.downward_chains(y, x, cap=1)
        if not chains:
            raise ValueError(f"{x!r} is not below {y!r}")
        chain = chains[0]
        f = GroupMorphism.identity(self.groups[y])
        for a, b in zip(chain, chain[1:]):
            f = self.arrows[(a, b)] @ f
        return f

    def check_coherence(self):
        """None if all chain composites agree, else the offending pair."""
        for y, x in self.poset.comparable_pairs():
            chains = self.poset.downward_chains(y, x)
            if len(chains) < 2:
                continue
            composites = []
            for chain in chains:
                f = GroupMorphism.identity(self.groups[y])
                for a, b in zip(chain, chain[1:]):
                    f = self.arrows[(a, b)] @ f
                composites.append(f)
            for other in composites[1:]:
                if not composites[0].equals(other):
                    return (y, x)
        return None

    def is_zero(self):
        return all(g.is_trivial() for g in self.groups.values())

    @classmethod
    def zero(cls, poset):
        t = FgAbGroup.trivial()
        groups = {p: t for p in poset.points}
        arrows = {(y, x): GroupMorphism.identity(t) for y, x in poset.hasse_arrows}
        return cls(poset, groups, arrows, check=False)

    def __repr__(self):
        shape = ", ".join(f"{p}:{self.groups[p].describe()}" for p in self.poset.points)
        return f"QuiverRep({shape})"


class RepMorphism:
    """A morphism of representations: one group map per point, commuting
    with the arrow maps (verified unless trusted)."""

    def __init__(self, source: QuiverRep, target: QuiverRep, maps, trusted=False):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if not trusted:
            bad = self.find_noncommuting_arrow()
            if bad is not None:
                raise ValueError(f"morphism does not commute with arrow {bad}")

    def find_noncommuting_arrow(self):
        for y, x in self.source.poset.hasse_arrows:
            lhs = self.target.arrow_map(y, x) @ self.maps[y]
            rhs = self.maps[x] @ self.source.arrow_map(y, x)
            if not lhs.equals(rhs):
                return (y, x)
        return None

    def map_at(self, p) -> GroupMorphism:
        return self.maps[p]

    @classmethod
    def identity(cls, rep):
        return cls(rep, rep, {p: GroupMorphism.identity(rep.groups[p]) for p in rep.poset.points},
                   trusted=True)

    @classmethod
    def zero(cls, source, target):
        return cls(
            source, target,
            {p: GroupMorphism.zero(source.groups[p], target.groups[p]) for p in source.poset.points},
            trusted=True,
        )

    def __matmul__(self, other):
        return RepMorphism(
            other.source, self.target,
            {p: self.maps[p] @ other.maps[p] for p in self.maps},
            trusted=True,
        )

    def __sub__(self, other):
        return RepMorphism(
            self.source, self.target,
            {p: self.maps[p] - other.maps[p] for p in self.maps},
            trusted=True,
        )

    def equals(self, other):
        return all(self.maps[p].equals(other.maps[p]) for p in self.maps)

    def is_zero(self):
        return all(m.is_zero() for m in self.maps.values())

    def is_iso(self):
        return all(m.is_iso() for m in self.maps.values())


def rep_kernel(f: RepMorphism):
    """(K, incl) with K the pointwise kernel carrying induced arrows."""
    poset = f.source.poset
    groups, incls = {}, {}
    for p in poset.points:
        k, incl = f.maps[p].kernel()
        groups[p] = k
        incls[p] = incl
    arrows = {}
    for y, x in poset.hasse_arrows:
        lat = ColumnLattice(incls[x].matrix)
        cols = []
        for j in range(groups[y].ngens):
            v = f.source.arrow_map(y, x).matrix.apply(incls[y].matrix.column(j))
            c = lat.solve(v)
            assert c is not None, "arrow must map kernel into kernel"
            cols.append(c)
        arrows[(y, x)] = GroupMorphism(
            groups[y], groups[x],
            IntMatrix.from_columns(cols, rows=groups[x].ngens),
        )
    k = QuiverRep(poset, groups, arrows, check=False)
    incl = RepMorphism(k, f.source, incls, trusted=True)
    return k, incl


def rep_cokernel(f: RepMorphism):
    """(C, proj) with C the pointwise cokernel carrying the target's arrows."""
    poset = f.source.poset
    groups, projs = {}, {}
    for p in poset.points:
        c, proj = f.maps[p].cokernel()
        groups[p] = c
        projs[p] = proj
    arrows = {}
    for y, x in poset.hasse_arrows:
        arrows[(y, x)] = GroupMorphism(
            groups[y], groups[x], f.target.arrow_map(y, x).matrix
        )
    c = QuiverRep(poset, groups, arrows, check=False)
    proj = RepMorphism(f.target, c, projs, trusted=True)
    return c, proj


def rep_direct_sum(reps):
    poset = reps[0].poset
    groups, injections, projections = {}, {}, {}
    for p in poset.points:
        total, injs, projs = direct_sum([r.groups[p] for r in reps])
        groups[p] = total
        injections[p] = injs
        projections[p] = projs
    arrows = {}
    for y, x in poset.hasse_arrows:
        arrows[(y, x)] = GroupMorphism(
            groups[y], groups[x],
            IntMatrix.block_diag(
                [r.arrow_map(y, x).matrix for r in reps],
                rows=groups[x].ngens, cols=groups[y].ngens,
            ),
            trusted=True,
        )
    total = QuiverRep(poset, groups, arrows, check=False)
    injs = [
        RepMorphism(r, total, {p: injections[p][i] for p in poset.points}, trusted=True)
        for i, r in enumerate(reps)
    ]
    projs = [
        RepMorphism(total, r, {p: projections[p][i] for p in poset.points}, trusted=True)
        for i, r in enumerate(reps)
    ]
    return total, injs, projs


def rep_is_exact_at(f: RepMorphism, g: RepMorphism) -> bool:
    """Pointwise im(f) = ker(g) in the middle representation."""
    from .abelian import is_exact_at

    return all(is_exact_at(f.maps[p], g.maps[p]) for p in f.source.poset.points)


# ---------------------------------------------------------------------------
# Projective representations and resolutions
# ---------------------------------------------------------------------------


class ProjectiveRep:
    """A finite direct sum of downset projectives, one generator per entry
    of `gen_points`; generator i sits at point gen_points[i]."""

    def __init__(self, poset: FinitePoset, gen_points):
        self.poset = poset
        self.gen_points = list(gen_points)

    def indices_at(self, z):
        return [i for i, p in enumerate(self.gen_points) if self.poset.leq(z, p)]

    def rank_at(self, z):
        return len(self.indices_at(z))

    @property
    def num_gens(self):
        return len(self.gen_points)

    def is_zero(self):
        return not self.gen_points

    def as_rep(self) -> QuiverRep:
        poset = self.poset
        groups = {p: FgAbGroup.free(self.rank_at(p)) for p in poset.points}
        arrows = {}
        for y, x in poset.hasse_arrows:
            rows = self.indices_at(x)
            cols = self.indices_at(y)
            m = IntMatrix.zeros(len(rows), len(cols))
            pos = {g: i for i, g in enumerate(rows)}
            for j, g in enumerate(cols):
                m.data[pos[g]][j] = 1
            arrows[(y, x)] = GroupMorphism(groups[y], groups[x], m, trusted=True)
        return QuiverRep(poset, groups, arrows, check=False)

    def point_matrix_of_coeffs(self, coeffs: IntMatrix, target: "ProjectiveRep", z):
        """Per-point matrix at z of the morphism self -> target given by a
        coefficient matrix (target.num_gens x self.num_gens)."""
        rows = target.indices_at(z)
        cols = self.indices_at(z)
        return coeffs.submatrix(rows, cols)

    def __repr__(self):
        return f"ProjectiveRep({self.gen_points})"


@dataclass
class ProjIntoRep:
    """A morphism from a projective into a representation: one target
    element per generator, at that generator's point."""

    source: ProjectiveRep
    target: QuiverRep
    vectors: list  # vectors[i] lives in Z^(target group at gen_points[i])

    def point_matrix(self, z) -> IntMatrix:
        cols = []
        tgt = self.target.groups[z]
        for i in self.source.indices_at(z):
            t = self.target.transport(self.source.gen_points[i], z)
            cols.append(t.matrix.apply(self.vectors[i]))
        return IntMatrix.from_columns(cols, rows=tgt.ngens)

    def as_rep_morphism(self) -> RepMorphism:
        src = self.source.as_rep()
        maps = {
            p: GroupMorphism(src.groups[p], self.target.groups[p], self.point_matrix(p),
                             trusted=True)
            for p in self.source.poset.points
        }
        return RepMorphism(src, self.target, maps, trusted=True)

    def is_surjective(self):
        for p in self.source.poset.points:
            g = self.target.groups[p]
            m = self.point_matrix(p).hstack(g.relations)
            if not lattices_equal(lattice_basis(m), IntMatrix.identity(g.ngens)):
                return False
        return True


def minimal_cover(v: QuiverRep, rng=None):
    """(P, phi) with P projective and phi: P -> V surjective.

    Generators at x are canonical lifts of generators of V_x modulo the
    images of the covering arrows, so covers of projectives are
    isomorphisms.  An optional rng shuffles generator order and may add
    redundant generators (used by resolution-independence tests).
    """
    poset = v.poset
    gens = []  # (point, vector)
    for x in poset.points:
        incoming = [v.arrow_map(y, xx).matrix for y, xx in poset.hasse_arrows if xx == x]
        g = v.groups[x]
        stacked = g.relations
        for m in incoming:
            stacked = stacked.hstack(m)
        quotient = FgAbGroup(g.ngens, stacked)
        for pos in quotient.canon_positions:
            gens.append((x, quotient.snf.Uinv.column(pos)))
        if rng is not None and g.ngens and rng.random() < 0.4:
            extra = [rng.randint(-2, 2) for _ in range(g.ngens)]
            gens.append((x, extra))
    if rng is not None:
        rng.shuffle(gens)
    p = ProjectiveRep(poset, [g[0] for g in gens])
    phi = ProjIntoRep(p, v, [g[1] for g in gens])
    assert phi.is_surjective(), "cover must be surjective"
    return p, phi


@dataclass
class SubLatticeRep:
    """A subrepresentation of a projective with free entries, stored as a
    lattice basis per point (columns in the ambient point coordinates)."""

    ambient: ProjectiveRep
    bases: dict

    def is_zero(self):
        return all(b.cols == 0 for b in self.bases.values())

    def as_rep(self) -> QuiverRep:
        poset = self.ambient.poset
        groups = {p: FgAbGroup.free(self.bases[p].cols) for p in poset.points}
        arrows = {}
        for y, x in poset.hasse_arrows:
            # ambient transport is an index inclusion: reuse indices
            rows_x = self.ambient.indices_at(x)
            cols_y = self.ambient.indices_at(y)
            pos = {g: i for i, g in enumerate(rows_x)}
            lat = ColumnLattice(self.bases[x])
            cols = []
            for j in range(self.bases[y].cols):
                vec_y = self.bases[y].column(j)
                vec_x = [0] * len(rows_x)
                for jj, g in enumerate(cols_y):
                    vec_x[pos[g]] += vec_y[jj]
                c = lat.solve(vec_x)
                assert c is not None, "transport must preserve the syzygy lattice"
                cols.append(c)
            arrows[(y, x)] = GroupMorphism(
                groups[y], groups[x],
                IntMatrix.from_columns(cols, rows=self.bases[x].cols),
                trusted=True,
            )
        return QuiverRep(poset, groups, arrows, check=False)


@dataclass
class ProjResolution:
    """... -> P_2 -> P_1 -> P_0 -> V -> 0 with explicit projectives.

    diffs[i] is the coefficient matrix of P_{i+1} -> P_i
    (rows: generators of P_i, columns: generators of P_{i+1}).
    `complete` records that the final syzygy vanished, i.e. the resolution
    ends at its true length.
    """

    module: QuiverRep
    projectives: list
    aug: ProjIntoRep
    diffs: list
    complete: bool

    @property
    def length(self):
        return len(self.projectives) - 1

    def projective_at(self, i) -> ProjectiveRep:
        if i < len(self.projectives):
            return self.projectives[i]
        return ProjectiveRep(self.module.poset, [])

    def diff_coeffs(self, i) -> IntMatrix:
        """Coefficient matrix of P_i -> P_{i-1} (zero past the end)."""
        if 1 <= i <= len(self.diffs):
            return self.diffs[i - 1]
        return IntMatrix.zeros(self.projective_at(i - 1).num_gens, self.projective_at(i).num_gens)

    def fingerprint(self):
        """Stable hash of the resolution's combinatorial data."""
        import hashlib

        h = hashlib.sha256()
        for p in self.projectives:
            h.update(repr([str(x) for x in p.gen_points]).encode())
        for d in self.diffs:
            h.update(d.to_text().encode())
        return h.hexdigest()[:16]


def resolve_projective(v: QuiverRep, length: int, rng=None) -> ProjResolution:
    """Iterated syzygies to the requested length (stops early at completion)."""
    p0, aug = minimal_cover(v, rng)
    projectives = [p0]
    diffs = []
    # first syzygy: preimage lattice of the augmentation, pointwise
    bases = {}
    for z in v.poset.points:
        m = aug.point_matrix(z)
        stacked = m.hstack(v.groups[z].relations)
        full = kernel_basis(stacked)
        proj = full.submatrix(range(m.cols), range(full.cols))
        bases[z] = lattice_basis(proj)
    kernel = SubLatticeRep(p0, bases)
    complete = kernel.is_zero()
    while len(projectives) <= length and not complete:
        krep = kernel.as_rep()
        p_next, cover = minimal_cover(krep, rng)
        prev = projectives[-1]
        coeffs = IntMatrix.zeros(prev.num_gens, p_next.num_gens)
        for i, x in enumerate(p_next.gen_points):
            amb = kernel.bases[x] @ IntMatrix.from_columns([cover.vectors[i]],
                                                           rows=kernel.bases[x].cols)
            idx = prev.indices_at(x)
            for pos, g in enumerate(idx):
                coeffs.data[g][i] = amb.data[pos][0]
        projectives.append(p_next)
        diffs.append(coeffs)
        # next syzygy: plain pointwise kernel of the cover into the free rep
        bases = {}
        for z in v.poset.points:
            m = cover.point_matrix(z)
            bases[z] = kernel_basis(m)
        kernel = SubLatticeRep(p_next, bases)
        complete = kernel.is_zero()
    return ProjResolution(v, projectives, aug, diffs, complete)


def verify_resolution(res: ProjResolution):
    """Exactness of the resolution at V and at every P_i, pointwise.

    At the last recorded projective there is nothing to check unless the
    resolution is complete, in which case the final kernel must vanish.
    """
    v = res.module
    poset = v.poset
    if not res.aug.is_surjective():
        raise ExactnessError("augmentation is not surjective")
    last = len(res.projectives) - 1
    for i in range(last + 1):
        pi = res.projective_at(i)
        for z in poset.points:
            if i == 0:
                m = res.aug.point_matrix(z)
                stacked = m.hstack(v.groups[z].relations)
                full = kernel_basis(stacked)
                ker = lattice_basis(full.submatrix(range(m.cols), range(full.cols)))
            else:
                pm = pi.point_matrix_of_coeffs(res.diff_coeffs(i), res.projective_at(i - 1), z)
                ker = kernel_basis(pm)
            if i == last:
                if res.complete and ker.cols != 0:
                    raise ExactnessError(f"nonzero final syzygy at P_{i}, point {z!r}")
                continue
            img = res.projective_at(i + 1).point_matrix_of_coeffs(res.diff_coeffs(i + 1), pi, z)
            if not lattices_equal(lattice_basis(img), ker):
                raise ExactnessError(f"resolution not exact at P_{i}, point {z!r}")
    return True


# ---------------------------------------------------------------------------
# Hom complexes and Ext over the incidence algebra
# ---------------------------------------------------------------------------


def _hom_block_group(p: ProjectiveRep, w: QuiverRep) -> FgAbGroup:
    """Hom(P, W) as a presented group: one block W_{x_g} per generator g."""
    rels = [w.groups[x].relations for x in p.gen_points]
    n = sum(w.groups[x].ngens for x in p.gen_points)
    return FgAbGroup(n, IntMatrix.block_diag(rels, rows=n, cols=0))


def _hom_block_offsets(p: ProjectiveRep, w: QuiverRep):
    offsets = []
    acc = 0
    for x in p.gen_points:
        offsets.append(acc)
        acc += w.groups[x].ngens
    return offsets, acc


def _hom_differential(p_hi: ProjectiveRep, p_lo: ProjectiveRep, coeffs: IntMatrix,
                      w: QuiverRep) -> IntMatrix:
    """Matrix of Hom(P_lo, W) -> Hom(P_hi, W), psi |-> psi∘(coeffs map)."""
    off_hi, dim_hi = _hom_block_offsets(p_hi, w)
    off_lo, dim_lo = _hom_block_offsets(p_lo, w)
    out = IntMatrix.zeros(dim_hi, dim_lo)
    for g_hi, x_hi in enumerate(p_hi.gen_points):
        for g_lo, x_lo in enumerate(p_lo.gen_points):
            c = coeffs.data[g_lo][g_hi]
            if c == 0:
                continue
            t = w.transport(x_lo, x_hi).matrix
            for i in range(t.rows):
                row = out.data[off_hi[g_hi] + i]
                trow = t.data[i]
                base = off_lo[g_lo]
                for j in range(t.cols):
                    if trow[j]:
                        row[base + j] += c * trow[j]
    return out


@dataclass
class HomComplex:
    """The cochain complex Hom(P_*, W) of a resolution."""

    resolution: ProjResolution
    w: QuiverRep
    groups: list
    diffs: list  # diffs[i]: groups[i] -> groups[i+1]

    @classmethod
    def build(cls, res: ProjResolution, w: QuiverRep, degrees: int):
        groups = [_hom_block_group(res.projective_at(i), w) for i in range(degrees + 1)]
        diffs = []
        for i in range(degrees):
            mat = _hom_differential(
                res.projective_at(i + 1), res.projective_at(i), res.diff_coeffs(i + 1), w
            )
            diffs.append(GroupMorphism(groups[i], groups[i + 1], mat, trusted=True))
        for a, b in zip(diffs, diffs[1:]):
            assert (b @ a).is_zero(), "hom complex differentials must square to zero"
        return cls(res, w, groups, diffs)

    def cohomology_at(self, n) -> SubquotientData:
        f = self.diffs[n - 1] if n >= 1 else None
        g = self.diffs[n] if n < len(self.diffs) else None
        return homology_at(f, g, middle=self.groups[n])


class ExtPosetGroup:
    """Ext^n over the incidence algebra, with cochain-level coordinates.

    Cochains in degree n are one vector per generator of P_n, living in the
    group of W at that generator's point.
    """

    def __init__(self, v: QuiverRep, w: QuiverRep, n: int, resolution=None, rng=None,
                 length=None):
        self.v = v
        self.w = w
        self.n = n
        if resolution is None:
            resolution = resolve_projective(v, length if length is not None else max(n + 1, 3), rng)
        self.resolution = resolution
        self.complex = HomComplex.build(resolution, w, n + 1)
        self.data = self.complex.cohomology_at(n)
        self.group = self.data.group

    def _flatten(self, cochain):
        out = []
        for vec, x in zip(cochain, self.resolution.projective_at(self.n).gen_points):
            assert len(vec) == self.w.groups[x].ngens
            out.extend(vec)
        return out

    def _unflatten(self, flat):
        p = self.resolution.projective_at(self.n)
        out = []
        pos = 0
        for x in p.gen_points:
            k = self.w.groups[x].ngens
            out.append(flat[pos:pos + k])
            pos += k
        return out

    def class_of_cochain(self, cochain):
        return self.data.coords(self._flatten(cochain))

    def cochain_of_class(self, coords):
        return self._unflatten(self.data.rep_of(coords))

    def zero_class(self):
        return tuple(0 for _ in self.group.invariant_factors)


def ext_poset(v: QuiverRep, w: QuiverRep, n: int, rng=None) -> ExtPosetGroup:
    """Ext^n_{Z[X]}(V, W) via a projective resolution of V."""
    if n not in (0, 1, 2):
        raise ValueError("degree must be 0, 1 or 2")
    return ExtPosetGroup(v, w, n, length=n + 1, rng=rng)


def ext_poset_all_degrees(v: QuiverRep, w: QuiverRep, rng=None):
    res = resolve_projective(v, 3, rng)
    cx = HomComplex.build(res, w, 3)
    return [cx.cohomology_at(n).group for n in range(4)]


def sierpinski_ext2(phi: GroupMorphism, psi: GroupMorphism) -> FgAbGroup:
    """Independent oracle for Ext^2 over the two-point space: for
    representations with arrow maps phi (source) and psi (target), the group
    is Ext^1_Z(ker(phi), coker(psi))."""
    from .abelian import ext1_z

    k, _ = phi.kernel()
    c, _ = psi.cokernel()
    return ext1_z(k, c).group


# ---------------------------------------------------------------------------
# UPS oracle: total complex of the bimodule resolution
# ---------------------------------------------------------------------------


def _free_presentation(g: FgAbGroup):
    """(rank0, basis) with 0 -> Z^r --basis--> Z^rank0 -> G -> 0."""
    return g.ngens, lattice_basis(g.relations)


def ext_poset_ups_oracle(v: QuiverRep, w: QuiverRep):
    """Ext^0/1/2 through the double complex built from the length-one
    bimodule resolution (unique path spaces only)."""
    poset = v.poset
    ups, witness = is_unique_path_space(poset)
    if not ups:
        raise ValueError(f"not a unique path space: {witness}")

    # free Z-resolutions of each entry group
    rank0 = {x: v.groups[x].ngens for x in poset.points}
    basis = {x: lattice_basis(v.groups[x].relations) for x in poset.points}
    arrows = poset.hasse_arrows

    # lifts of the arrow maps to the free resolutions
    lift0 = {}
    lift1 = {}
    for y, x in arrows:
        f = v.arrow_map(y, x)
        lift0[(y, x)] = f.matrix
        rhs = f.matrix @ basis[y]
        s = smith_normal_form(basis[x])
        cols = []
        for j in range(rhs.cols):
            c = solve(basis[x], rhs.column(j), snf=s)
            assert c is not None
            cols.append(c)
        lift1[(y, x)] = IntMatrix.from_columns(cols, rows=basis[x].cols)

    # total complex generator bookkeeping: T0 = sum_x P(x) x F0_x,
    # T1 = sum_x P(x) x F1_x  +  sum_{y->x} P(x) x F0_y,
    # T2 = sum_{y->x} P(x) x F1_y
    t0_points, t0_slots = [], []
    for x in poset.points:
        for k in range(rank0[x]):
            t0_points.append(x)
            t0_slots.append(("pt", x, k))
    t1_points, t1_slots = [], []
    for x in poset.points:
        for k in range(basis[x].cols):
            t1_points.append(x)
            t1_slots.append(("vert", x, k))
    for y, x in arrows:
        for k in range(rank0[y]):
            t1_points.append(x)
            t1_slots.append(("horiz", (y, x), k))
    t2_points, t2_slots = [], []
    for y, x in arrows:
        for k in range(basis[y].cols):
            t2_points.append(x)
            t2_slots.append(("arrow", (y, x), k))

    t0 = ProjectiveRep(poset, t0_points)
    t1 = ProjectiveRep(poset, t1_points)
    t2 = ProjectiveRep(poset, t2_points)
    idx0 = {s: i for i, s in enumerate(t0_slots)}
    idx1 = {s: i for i, s in enumerate(t1_slots)}

    d1 = IntMatrix.zeros(t0.num_gens, t1.num_gens)
    for j, slot in enumerate(t1_slots):
        kind = slot[0]
        if kind == "vert":
            _, x, k = slot
            for i in range(rank0[x]):
                d1.data[idx0[("pt", x, i)]][j] = basis[x].data[i][k]
        else:
            _, (y, x), k = slot
            for i in range(rank0[x]):
                d1.data[idx0[("pt", x, i)]][j] = lift0[(y, x)].data[i][k]
            d1.data[idx0[("pt", y, k)]][j] += -1

    d2 = IntMatrix.zeros(t1.num_gens, t2.num_gens)
    for j, slot in enumerate(t2_slots):
        _, (y, x), k = slot
        for i in range(rank0[y]):
            d2.data[idx1[("horiz", (y, x), i)]][j] = basis[y].data[i][k]
        for i in range(basis[x].cols):
            d2.data[idx1[("vert", x, i)]][j] = -lift1[(y, x)].data[i][k]
        for i in range(basis[y].cols):
            d2.data[idx1[("vert", y, i)]][j] += 1 if i == k else 0

    assert (d1 @ d2).is_zero(), "total complex must be a complex"

    # augmentation for sanity: generators of T0 map to the entry generators
    aug = ProjIntoRep(
        t0, v,
        [[1 if i == k else 0 for i in range(rank0[x])] for (_kind, x, k) in t0_slots],
    )
    res = ProjResolution(v, [t0, t1, t2], aug, [d1, d2], complete=True)
    verify_resolution(res)
    cx = HomComplex.build(res, w, 3)
    return [cx.cohomology_at(n).group for n in range(3)]


# ---------------------------------------------------------------------------
# Two-step extensions and Yoneda classes
# ---------------------------------------------------------------------------


@dataclass
class TwoExtension:
    """0 -> M1 --d2--> Q1 --d1--> Q0 --eps--> M0 -> 0 of representations."""

    m1: QuiverRep
    q1: QuiverRep
    q0: QuiverRep
    m0: QuiverRep
    d2: RepMorphism
    d1: RepMorphism
    eps: RepMorphism

    def verify_exact(self):
        """Raises ExactnessError naming the failing node."""
        from .abelian import is_exact_at

        for p in self.m0.poset.points:
            k, _ = self.d2.maps[p].kernel()
            if not k.is_trivial():
                raise ExactnessError(f"first map not injective at point {p!r}")
            c, _ = self.eps.maps[p].cokernel()
            if not c.is_trivial():
                raise ExactnessError(f"last map not surjective at point {p!r}")
            if not is_exact_at(self.d2.maps[p], self.d1.maps[p]):
                raise ExactnessError(f"not exact at the inner node Q1, point {p!r}")
            if not is_exact_at(self.d1.maps[p], self.eps.maps[p]):
                raise ExactnessError(f"not exact at the inner node Q0, point {p!r}")
        return True


@dataclass
class Ext2Class:
    """An element of a computed Ext^2 group: ambient group with coordinates,
    plus the resolution fingerprint the coordinates refer to."""

    ambient: ExtPosetGroup
    coords: tuple
    provenance: str

    def is_zero(self):
        return all(c == 0 for c in self.coords)


def _solve_through(mor: GroupMorphism, target_vec):
    """Some u with mor(u) = target_vec in the target group, or None."""
    stacked = mor.matrix.hstack(mor.target.relations)
    z = solve(stacked, target_vec)
    if z is None:
        return None
    return z[: mor.source.ngens]


def _random_kernel_shift(mor: GroupMorphism, rng):
    """A random element of ker(mor) to vary lift choices."""
    b = mor.preimage_lattice_basis()
    if b.cols == 0:
        return [0] * mor.source.ngens
    coeffs = [rng.randint(-2, 2) for _ in range(b.cols)]
    return b.apply(coeffs)


def yoneda_class(ext: TwoExtension, ambient: ExtPosetGroup = None, rng=None) -> Ext2Class:
    """Class of a two-step extension in Ext^2(M0, M1).

    Lifts the identity of M0 through the extension against a projective
    resolution of M0; the middle terms need not be projective.  The class is
    independent of the resolution and of all lift choices.
    """
    ext.verify_exact()
    if ambient is None:
        ambient = ExtPosetGroup(ext.m0, ext.m1, 2, rng=rng)
    res = ambient.resolution
    p0, p1, p2 = res.projective_at(0), res.projective_at(1), res.projective_at(2)

    # phi0: P0 -> Q0 lifting the augmentation through eps
    phi0 = []
    for i, x in enumerate(p0.gen_points):
        target = res.aug.vectors[i]
        u = _solve_through(ext.eps.maps[x], target)
        assert u is not None, "augmentation must lift through a surjection"
        if rng is not None:
            u = [a + b for a, b in zip(u, _random_kernel_shift(ext.eps.maps[x], rng))]
        phi0.append(u)

    # phi1: P1 -> Q1 with d1∘phi1 = phi0∘(P1 -> P0)
    c1 = res.diff_coeffs(1)
    phi1 = []
    for i, x in enumerate(p1.gen_points):
        target = [0] * ext.q0.groups[x].ngens
        for g0, x0 in enumerate(p0.gen_points):
            c = c1.data[g0][i]
            if c == 0:
                continue
            moved = ext.q0.transport(x0, x).matrix.apply(phi0[g0])
            target = [a + c * b for a, b in zip(target, moved)]
        u = _solve_through(ext.d1.maps[x], target)
        assert u is not None, "boundary must lift through the middle map"
        if rng is not None:
            u = [a + b for a, b in zip(u, _random_kernel_shift(ext.d1.maps[x], rng))]
        phi1.append(u)

    # phi2: P2 -> M1 with d2∘phi2 = phi1∘(P2 -> P1); unique mod relations
    c2 = res.diff_coeffs(2)
    phi2 = []
    for i, x in enumerate(p2.gen_points):
        target = [0] * ext.q1.groups[x].ngens
        for g1, x1 in enumerate(p1.gen_points):
            c = c2.data[g1][i]
            if c == 0:
                continue
            moved = ext.q1.transport(x1, x).matrix.apply(phi1[g1])
            target = [a + c * b for a, b in zip(target, moved)]
        u = _solve_through(ext.d2.maps[x], target)
        assert u is not None, "cocycle value must exist by exactness"
        phi2.append(u)

    coords = ambient.class_of_cochain(phi2)
    return Ext2Class(ambient, coords, provenance=res.fingerprint())


def chain_lift(f: RepMorphism, res_src: ProjResolution, res_tgt: ProjResolution, degrees=3):
    """Coefficient matrices of a chain map res_src -> res_tgt lifting f."""
    lifts = []
    prev = None
    for deg in range(degrees):
        p_s = res_src.projective_at(deg)
        p_t = res_tgt.projective_at(deg)
        coeffs = IntMatrix.zeros(p_t.num_gens, p_s.num_gens)
        for i, x in enumerate(p_s.gen_points):
            if deg == 0:
                target_vec = f.maps[x].matrix.apply(res_src.aug.vectors[i])
                # solve aug_tgt(u) = target_vec at point x
                m = res_tgt.aug.point_matrix(x)
                stacked = m.hstack(f.target.groups[x].relations)
                z = solve(stacked, target_vec)
                assert z is not None, "chain lift in degree 0 must exist"
                u = z[: m.cols]
            else:
                # target = prev ∘ d_src(gen i), a vector in P_tgt(deg-1) at x
                d_s = res_src.diff_coeffs(deg)
                pt_prev = res_tgt.projective_at(deg - 1)
                acc = [0] * pt_prev.rank_at(x)
                idx_prev = pt_prev.indices_at(x)
                pos_prev = {g: t for t, g in enumerate(idx_prev)}
                for g_lo, x_lo in enumerate(res_src.projective_at(deg - 1).gen_points):
                    c = d_s.data[g_lo][i]
                    if c == 0:
                        continue
                    # prev coefficients of generator g_lo, transported to x
                    for g_t in range(pt_prev.num_gens):
                        val = prev.data[g_t][g_lo]
                        if val and pt_prev.poset.leq(x, pt_prev.gen_points[g_t]):
                            acc[pos_prev[g_t]] += c * val
                d_t = pt_prev  # target's P_{deg-1}
                m = res_tgt.projective_at(deg).point_matrix_of_coeffs(
                    res_tgt.diff_coeffs(deg), d_t, x
                )
                z = solve(m, acc)
                assert z is not None, "chain lift must exist by exactness"
                u = z
            idx = p_t.indices_at(x)
            for pos, g in enumerate(idx):
                coeffs.data[g][i] = u[pos]
        lifts.append(coeffs)
        prev = coeffs
    return lifts


def transport_class(cls: Ext2Class, ambient_tgt: ExtPosetGroup) -> tuple:
    """Coordinates of the same class against another resolution of M0."""
    lifts = chain_lift(
        RepMorphism.identity(cls.ambient.v), ambient_tgt.resolution, cls.ambient.resolution
    )
    return _pullback_cochain(cls, ambient_tgt, lifts)


def _pullback_cochain(cls: Ext2Class, ambient_tgt: ExtPosetGroup, lifts):
    """Pull a degree-2 cochain back along a chain map (lifts in coefficients)."""
    src_cochain = cls.ambient.cochain_of_class(cls.coords)
    p_src2 = cls.ambient.resolution.projective_at(2)
    p_tgt2 = ambient_tgt.resolution.projective_at(2)
    psi2 = lifts[2]
    w = ambient_tgt.w
    out = []
    for i, x in enumerate(p_tgt2.gen_points):
        acc = [0] * w.groups[x].ngens
        for g, xg in enumerate(p_src2.gen_points):
            c = psi2.data[g][i]
            if c == 0:
                continue
            moved = w.transport(xg, x).matrix.apply(src_cochain[g])
            acc = [a + c * b for a, b in zip(acc, moved)]
        out.append(acc)
    return ambient_tgt.class_of_cochain(out)


def ext2_compatible(f: RepMorphism, c: Ext2Class, cprime: Ext2Class, g: RepMorphism) -> bool:
    """Does g_* c equal f^* c' in Ext^2(M0, M1')?

    f: M0 -> M0', g: M1 -> M1', with c over (M0, M1) and c' over (M0', M1').
    """
    if c.ambient.v is not f.source and c.ambient.v.poset is not f.source.poset:
        raise ValueError("class c must live over the source of f")
    ambient = ExtPosetGroup(f.source, g.target, 2, resolution=c.ambient.resolution)
    # push forward c along g at the cochain level
    src_cochain = c.ambient.cochain_of_class(c.coords)
    p2 = c.ambient.resolution.projective_at(2)
    pushed = [g.maps[x].matrix.apply(vec) for vec, x in zip(src_cochain, p2.gen_points)]
    lhs = ambient.class_of_cochain(pushed)
    # pull back c' along the chain lift of f
    lifts = chain_lift(f, c.ambient.resolution, cprime.ambient.resolution)
    rhs = _pullback_cochain(cprime, ambient, lifts)
    return lhs == rhs


# ---------------------------------------------------------------------------
# Baer sum of two-step extensions
# ---------------------------------------------------------------------------


def _rep_add(f: RepMorphism, g: RepMorphism) -> RepMorphism:
    return RepMorphism(
        f.source, f.target,
        {p: f.maps[p] + g.maps[p] for p in f.maps},
        trusted=True,
    )


def rep_corestrict(f: RepMorphism, incl: RepMorphism) -> RepMorphism:
    """g with incl∘g = f, for incl injective and im(f) inside its image."""
    maps = {}
    for p in f.source.poset.points:
        m = incl.maps[p]
        stacked = m.matrix.hstack(m.target.relations)
        s = smith_normal_form(stacked)
        cols = []
        for j in range(f.source.groups[p].ngens):
            z = solve(stacked, f.maps[p].matrix.column(j), snf=s)
            assert z is not None, "corestriction must exist"
            cols.append(z[: m.source.ngens])
        maps[p] = GroupMorphism(
            f.source.groups[p], incl.source.groups[p],
            IntMatrix.from_columns(cols, rows=incl.source.groups[p].ngens),
        )
    return RepMorphism(f.source, incl.source, maps, trusted=True)


def rep_descend(f: RepMorphism, proj: RepMorphism) -> RepMorphism:
    """g with g∘proj = f, for proj a cokernel projection killing ker(proj).

    Cokernel groups share their generators with proj's source, so the same
    matrices work; well-definedness is verified on construction.
    """
    maps = {
        p: GroupMorphism(proj.target.groups[p], f.target.groups[p], f.maps[p].matrix)
        for p in f.source.poset.points
    }
    return RepMorphism(proj.target, f.target, maps, trusted=True)


def baer_sum(e1: TwoExtension, e2: TwoExtension) -> TwoExtension:
    """Explicit Baer sum of two 2-extensions of M0 by M1: direct sum, pulled
    back along the diagonal of M0, pushed out along the fold map of M1."""
    m0, m1 = e1.m0, e1.m1
    poset = m0.poset

    q0_sum, _, q0_projs = rep_direct_sum([e1.q0, e2.q0])
    q1_sum, _, q1_projs = rep_direct_sum([e1.q1, e2.q1])
    m1_sum, _, m1_projs = rep_direct_sum([m1, m1])
    m0_sq, m0_injs, _ = rep_direct_sum([m0, m0])

    eps_pair = rep_compose_into_sum(e1.eps, e2.eps, m0_sq, q0_projs)
    diag = _rep_add(m0_injs[0], m0_injs[1])
    d1_sum = rep_compose_into_sum(e1.d1, e2.d1, q0_sum, q1_projs)
    d2_sum = rep_compose_into_sum(e1.d2, e2.d2, q1_sum, m1_projs)

    # pull back along the diagonal M0 -> M0 + M0
    amb, _, amb_projs = rep_direct_sum([q0_sum, m0])
    diag_defect = RepMorphism(
        amb, m0_sq,
        {p: (eps_pair.maps[p] @ amb_projs[0].maps[p]) - (diag.maps[p] @ amb_projs[1].maps[p])
         for p in poset.points},
        trusted=True,
    )
    q0_new, incl_fp = rep_kernel(diag_defect)
    eps_new = amb_projs[1] @ incl_fp
    # Q1+Q1' -> Q0'' through ((d1+d1'), 0)
    into_amb = RepMorphism(
        q1_sum, amb,
        {p: _stack_maps(d1_sum.maps[p], GroupMorphism.zero(q1_sum.groups[p], m0.groups[p]),
                        amb.groups[p]) for p in poset.points},
        trusted=True,
    )
    d1_new = rep_corestrict(into_amb, incl_fp)

    # push out along the fold map M1 + M1 -> M1
    push_amb, push_injs, _ = rep_direct_sum([m1, q1_sum])
    fold = _rep_add(RepMorphism.identity(m1) @ m1_projs[0],
                    RepMorphism.identity(m1) @ m1_projs[1])
    theta = RepMorphism(
        m1_sum, push_amb,
        {p: (push_injs[0].maps[p] @ fold.maps[p]) - (push_injs[1].maps[p] @ d2_sum.maps[p])
         for p in poset.points},
        trusted=True,
    )
    q1_new, proj_push = rep_cokernel(theta)
    d2_new = proj_push @ push_injs[0]
    d1_on_amb = RepMorphism(
        push_amb, q0_new,
        {p: _glue_sum_map(GroupMorphism.zero(m1.groups[p], q0_new.groups[p]),
                          d1_new.maps[p], push_amb.groups[p]) for p in poset.points},
        trusted=True,
    )
    d1_final = rep_descend(d1_on_amb, proj_push)

    return TwoExtension(m1, q1_new, q0_new, m0, d2_new, d1_final, eps_new)


def rep_compose_into_sum(f1: RepMorphism, f2: RepMorphism, target_sum: QuiverRep, projs):
    """(f1, f2) as a map A1+A2 -> B1+B2, or A -> B1+B2 when projs is None.

    With projs given (projections of the source sum), the blocks act
    independently; without, both maps share the source.
    """
    if projs is not None:
        poset = target_sum.poset
        maps = {}
        for p in poset.points:
            maps[p] = GroupMorphism(
                projs[0].source.groups[p], target_sum.groups[p],
                IntMatrix.block_diag(
                    [f1.maps[p].matrix, f2.maps[p].matrix],
                    rows=target_sum.groups[p].ngens,
                    cols=projs[0].source.groups[p].ngens,
                ),
                trusted=True,
            )
        return RepMorphism(projs[0].source, target_sum, maps, trusted=True)
    poset = target_sum.poset
    maps = {}
    for p in poset.points:
        maps[p] = GroupMorphism(
            f1.source.groups[p], target_sum.groups[p],
            f1.maps[p].matrix.vstack(f2.maps[p].matrix),
            trusted=True,
        )
    return RepMorphism(f1.source, target_sum, maps, trusted=True)


def _stack_maps(f: GroupMorphism, g: GroupMorphism, target_group: FgAbGroup):
    return GroupMorphism(
        f.source, target_group, f.matrix.vstack(g.matrix), trusted=True
    )


def _glue_sum_map(f: GroupMorphism, g: GroupMorphism, source_group: FgAbGroup):
    """(f, g) on a two-block direct-sum source, as one morphism."""
    return GroupMorphism(
        source_group, f.target, f.matrix.hstack(g.matrix), trusted=True
    )


# ---------------------------------------------------------------------------
# Bounded isomorphism search for representations
# ---------------------------------------------------------------------------


@dataclass
class RepSearchOutcome:
    verdict: str  # 'yes' | 'no' | 'unknown'
    witness: object = None
    reason: str = ""


def _group_iso_candidates(src: FgAbGroup, tgt: FgAbGroup, bound, cap):
    """(isos, exhausted): bounded enumeration of isomorphisms src -> tgt.

    Candidates are matrices in canonical coordinates whose columns satisfy
    the order constraints; free coordinates range over [-bound, bound].
    """
    import itertools
    import math

    if src.invariant_factors != tgt.invariant_factors:
        return [], True
    ds = src.invariant_factors
    if not ds:
        return [GroupMorphism.zero(src, tgt)], True
    entry_ranges = []
    for i, d in enumerate(ds):  # column index: generator of src
        for j, h in enumerate(ds):  # row index: generator of tgt
            if d == 0:
                entry_ranges.append(range(-bound, bound + 1) if h == 0 else range(h))
            elif h == 0:
                entry_ranges.append(range(0, 1))
            else:
                step = h // math.gcd(h, d)
                entry_ranges.append(range(0, h, step))
    exhausted = all(d != 0 for d in ds)
    total = 1
    for r in entry_ranges:
        total *= len(r)
        if total > cap:
            break
    if total > cap:
        exhausted = False
    out = []
    count = 0
    n = len(ds)
    for flat in itertools.product(*entry_ranges):
        count += 1
        if count > cap:
            break
        e = IntMatrix.zeros(tgt.ngens, src.ngens)
        for i in range(n):  # src generator
            for j in range(n):  # tgt generator
                val = flat[i * n + j]
                if val:
                    e.data[tgt.canon_positions[j]][src.canon_positions[i]] = val
        mat = tgt.snf.Uinv @ e @ src.snf.U
        try:
            f = GroupMorphism(src, tgt, mat)
        except Exception:
            continue
        if f.is_iso():
            out.append(f)
    return out, exhausted


def rep_iso_bounded_multi(sources, targets, bound=8, budget=20000) -> RepSearchOutcome:
    """Simultaneous isomorphism search for parallel representations over one
    poset (used for graded representations); sound, bounded-complete."""
    poset = sources[0].poset
    per_point = {}
    all_exhausted = True
    for p in poset.points:
        lists = []
        for v, w in zip(sources, targets):
            cands, done = _group_iso_candidates(
                v.groups[p], w.groups[p], bound, max(64, budget // (len(poset.points) + 1))
            )
            all_exhausted = all_exhausted and done
            if not cands:
                if done:
                    return RepSearchOutcome("no", reason=f"groups differ at point {p!r}")
                return RepSearchOutcome("unknown", reason=f"no candidates at point {p!r} within bounds")
            lists.append(cands)
        import itertools

        per_point[p] = [list(t) for t in itertools.product(*lists)]
    order = sources[0].poset.linear_extension()
    assignment = {}
    steps = 0

    def compatible(p):
        for k, (v, w) in enumerate(zip(sources, targets)):
            for y, x in poset.hasse_arrows:
                if y not in assignment or x not in assignment:
                    continue
                if y != p and x != p:
                    continue
                lhs = w.arrow_map(y, x) @ assignment[y][k]
                rhs = assignment[x][k] @ v.arrow_map(y, x)
                if not lhs.equals(rhs):
                    return False
        return True

    def backtrack(i):
        nonlocal steps
        if i == len(order):
            return True
        p = order[i]
        for combo in per_point[p]:
            steps += 1
            if steps > budget:
                return None
            assignment[p] = combo
            if compatible(p):
                result = backtrack(i + 1)
                if result:
                    return True
                if result is None:
                    return None
            del assignment[p]
        return False

    found = backtrack(0)
    if found:
        witnesses = [
            RepMorphism(v, w, {p: assignment[p][k] for p in poset.points}, trusted=True)
            for k, (v, w) in enumerate(zip(sources, targets))
        ]
        return RepSearchOutcome("yes", witness=witnesses)
    if found is None or not all_exhausted:
        return RepSearchOutcome("unknown", reason="search budget exhausted")
    return RepSearchOutcome("no", reason="no arrow-compatible family of pointwise isomorphisms")


def rep_iso_bounded(v: QuiverRep, w: QuiverRep, bound=8, budget=20000) -> RepSearchOutcome:
    """Bounded search for an isomorphism of representations."""
    out = rep_iso_bounded_multi([v], [w], bound, budget)
    if out.verdict == "yes":
        out = RepSearchOutcome("yes", witness=out.witness[0])
    return out
