"""Z/2-graded modules over the Laurent ring R = Z[x, 1/x].

Two representations are supported, matching how such modules actually turn
up: a finitely-generated-over-Z group with a chosen automorphism (the action
of x), and a presentation coker(x*I - T) over R for an integer matrix T.
The second covers gauge modules of non-negative integer matrices, whose
underlying groups (like Z[1/n]) need not be finitely generated over Z.

Ext groups over R are computed two ways:
  * Hom_R and Ext^2_R as kernel/cokernel of f |-> x_W f - f x_V acting on
    Hom_Z(V, W), respectively Ext^1_Z(V, W);
  * Ext^1_R as degree-1 cohomology of the explicit two-term total complex
    obtained from a free Z-presentation of V, which avoids the extension
    ambiguity of reading it off an exact sequence.
For presentations coker(x*I - T) a length-one free R-resolution applies, so
Ext^2_R vanishes and Hom/Ext^1 are kernel and cokernel of a single operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import (
    FgAbGroup,
    GroupMorphism,
    Ext1Group,
    HomGroup,
    SubquotientData,
    _canonical_group,
    _flatten,
    _power_group,
    _unflatten,
    direct_sum,
    eventual_image,
    ext1_z,
    hom_z,
    homology_at,
    iso_groups,
    resolution_lift,
)
from .intlinalg import (
    ColumnLattice,
    IntMatrix,
    is_unimodular,
    kernel_basis,
    lattice_basis,
    smith_normal_form,
    solve,
)


class UnsupportedShape(ValueError):
    """Module shape outside the computable regime of an operation."""


# ---------------------------------------------------------------------------
# Laurent polynomials and presentation matrices
# ---------------------------------------------------------------------------


def lp_normalize(d):
    return {int(k): int(v) for k, v in d.items() if v != 0}


def lp_x_minus(c):
    return lp_normalize({1: 1, 0: -c})


def lp_constant(c):
    return lp_normalize({0: c})


def lp_format(d):
    """Deterministic text form, sum of `c*x^k` terms by descending exponent."""
    d = lp_normalize(d)
    if not d:
        return "0"
    terms = [f"{d[k]}*x^{k}" for k in sorted(d, reverse=True)]
    return " + ".join(terms)


def lp_parse(text):
    text = text.strip()
    if text == "0":
        return {}
    out = {}
    for term in text.split("+"):
        term = term.strip()
        if "*x^" not in term:
            raise ValueError(f"bad Laurent term {term!r}, expected c*x^k")
        c_str, k_str = term.split("*x^")
        k = int(k_str)
        out[k] = out.get(k, 0) + int(c_str)
    return lp_normalize(out)


class LaurentMatrix:
    """Matrix of finitely supported integer Laurent polynomials."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries):
        self.rows = rows
        self.cols = cols
        self.entries = [[lp_normalize(e) for e in row] for row in entries]
        if len(self.entries) != rows or any(len(r) != cols for r in self.entries):
            raise ValueError("entry grid does not match declared shape")

    @classmethod
    def x_identity_minus(cls, t: IntMatrix):
        n = t.rows
        if t.cols != n:
            raise ValueError("x*I - T needs square T")
        entries = [
            [
                lp_normalize({1: 1, 0: -t.data[i][j]}) if i == j else lp_constant(-t.data[i][j])
                for j in range(n)
            ]
            for i in range(n)
        ]
        return cls(n, n, entries)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"LaurentMatrix({self.rows}x{self.cols})"

    def canonical_shift_matrix(self):
        """T if this matrix is exactly x*I - T, else None."""
        if self.rows != self.cols:
            return None
        t = IntMatrix.zeros(self.rows, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                e = dict(self.entries[i][j])
                if i == j:
                    if e.get(1) != 1:
                        return None
                    e.pop(1)
                if set(e) - {0}:
                    return None
                t.data[i][j] = -e.get(0, 0)
        return t


# ---------------------------------------------------------------------------
# Module representations
# ---------------------------------------------------------------------------


class RModuleFg:
    """A Z-finitely-generated R-module: group plus automorphism x."""

    __slots__ = ("group", "x", "x_inv")

    def __init__(self, group: FgAbGroup, x: GroupMorphism):
        if x.source is not group or x.target is not group:
            if x.source.ngens != group.ngens or x.target.ngens != group.ngens:
                raise ValueError("x must be an endomorphism of the group")
        self.group = group
        self.x = x
        try:
            self.x_inv = x.inverse()
        except ValueError as exc:
            raise UnsupportedShape(f"x-action is not invertible: {exc}") from exc

    @classmethod
    def zero(cls):
        g = FgAbGroup.trivial()
        return cls(g, GroupMorphism.identity(g))

    @classmethod
    def with_identity_action(cls, group):
        return cls(group, GroupMorphism.identity(group))

    def is_zero(self):
        return self.group.is_trivial()

    kind = "fg"

    def __repr__(self):
        return f"RModuleFg({self.group.describe()})"


class RModulePres:
    """R-module presented as the cokernel of a Laurent matrix on R^rows.

    The canonical gauge-module shape is x*I - T; that shape admits a
    length-one free R-resolution, so Ext^2 out of it vanishes.
    """

    __slots__ = ("lmatrix",)

    def __init__(self, lmatrix: LaurentMatrix):
        self.lmatrix = lmatrix

    @classmethod
    def from_shift_matrix(cls, t: IntMatrix):
        return cls(LaurentMatrix.x_identity_minus(t))

    @property
    def shift_matrix(self):
        return self.lmatrix.canonical_shift_matrix()

    def require_canonical(self):
        t = self.shift_matrix
        if t is None:
            raise UnsupportedShape("presentation is not of the canonical shape x*I - T")
        return t

    def to_fg(self):
        """Convert to (Z^n, x = T) when T is invertible over Z."""
        t = self.require_canonical()
        if not is_unimodular(t):
            raise UnsupportedShape("shift matrix is not invertible over Z")
        g = FgAbGroup.free(t.rows)
        return RModuleFg(g, GroupMorphism(g, g, t, trusted=True))

    def is_zero(self):
        return self.lmatrix.rows == 0

    kind = "laurent"

    def describe(self):
        if self.lmatrix.rows == 0:
            return "0"
        t = self.shift_matrix
        if t is not None and t.rows == 1:
            n = t.data[0][0]
            return f"R/(x - {n})"
        return f"coker({self.lmatrix.rows}x{self.lmatrix.cols} Laurent matrix)"

    def __repr__(self):
        return f"RModulePres({self.describe()})"


@dataclass
class GradedRModule:
    """Z/2-graded module; suspension swaps the parts."""

    even: object  # RModuleFg | RModulePres
    odd: object

    def suspend(self):
        return GradedRModule(even=self.odd, odd=self.even)

    def parity_split(self):
        return self.even, self.odd


def suspend(m: GradedRModule) -> GradedRModule:
    return m.suspend()


def parity_split(m: GradedRModule):
    return m.parity_split()


# ---------------------------------------------------------------------------
# Ext over R for fg-over-Z modules
# ---------------------------------------------------------------------------


def _phi_on_hom(v: RModuleFg, w: RModuleFg, h: HomGroup) -> GroupMorphism:
    """f |-> x_W f - f x_V on Hom_Z(V, W), in canonical coordinates."""
    cols = []
    for b in h.basis:
        img = (w.x @ b) - (b @ v.x)
        cols.append(list(h.coords(img)))
    n = len(h.group.invariant_factors)
    mat = IntMatrix.from_columns(cols, rows=n) if cols else IntMatrix.zeros(n, 0)
    g = _canonical_group(h.group.invariant_factors)
    return GroupMorphism(g, g, mat, trusted=True)


def _x_lift(v: RModuleFg, res: IntMatrix) -> IntMatrix:
    return resolution_lift(v.x, res, res)


def _phi_on_ext(v: RModuleFg, w: RModuleFg, e: Ext1Group) -> GroupMorphism:
    """c |-> x_W c - c x1 on Ext^1_Z(V, W) cocycles, x1 the resolution lift."""
    x1 = _x_lift(v, e.res)
    cols = []
    for c in e.basis:
        img = w.x.matrix @ c - c @ x1
        cols.append(list(e.coords(img)))
    n = len(e.group.invariant_factors)
    mat = IntMatrix.from_columns(cols, rows=n) if cols else IntMatrix.zeros(n, 0)
    g = _canonical_group(e.group.invariant_factors)
    return GroupMorphism(g, g, mat, trusted=True)


@dataclass
class TotalComplex:
    """Hom_R(P_*, W) for the length-two free R-resolution of a fg module V.

    Degrees: C0 = Hom(F0, W), C1 = Hom(F0, W) + Hom(F1, W), C2 = Hom(F1, W);
    F1 --B--> F0 is a free Z-presentation of V.
    """

    v: RModuleFg
    w: RModuleFg
    res: IntMatrix
    c0: FgAbGroup
    c1: FgAbGroup
    c2: FgAbGroup
    d0: GroupMorphism
    d1: GroupMorphism

    @classmethod
    def build(cls, v: RModuleFg, w: RModuleFg):
        n, m = v.group.ngens, w.group.ngens
        b = lattice_basis(v.group.relations)
        r = b.cols
        x0 = v.x.matrix
        x1 = resolution_lift(v.x, b, b) if r else IntMatrix.zeros(0, 0)
        mxw = w.x.matrix
        c0 = _power_group(w.group, n)
        c1 = _power_group(w.group, n + r)
        c2 = _power_group(w.group, r)
        eye_n = IntMatrix.identity(n)
        eye_r = IntMatrix.identity(r)
        eye_m = IntMatrix.identity(m)
        top = eye_n.kron(mxw) - x0.transpose().kron(eye_m)
        bot = b.transpose().kron(eye_m)
        d0 = GroupMorphism(c0, c1, top.vstack(bot), trusted=True)
        left = b.transpose().kron(eye_m)
        right = x1.transpose().kron(eye_m) - eye_r.kron(mxw)
        d1 = GroupMorphism(c1, c2, left.hstack(right), trusted=True)
        assert (d1 @ d0).matrix.is_zero(), "total complex differentials must compose to zero"
        return cls(v, w, b, c0, c1, c2, d0, d1)

    def cohomology(self):
        h0 = homology_at(None, self.d0)
        h1 = homology_at(self.d0, self.d1)
        h2 = homology_at(self.d1, None)
        return h0, h1, h2


class Ext2Block:
    """Ext^2_R(P, Q) for one parity block, with class arithmetic when available.

    kind 'zero': vanishes structurally (canonical presentation source, or a
    source that is free over Z).  kind 'fg': cokernel of the twisted-action
    operator on Ext^1_Z, carrying cocycle-level coordinates.  kind
    'colimit': fg torsion source against a canonical presentation target,
    computed on the eventual image of Ext^1_Z(V, Z^s) under the shift.
    """

    def __init__(self, kind, group, ext_e=None, coker=None, phi=None):
        self.kind = kind
        self.group = group
        self.ext_e = ext_e
        self.coker = coker
        self.phi = phi

    @classmethod
    def zero(cls):
        return cls("zero", FgAbGroup.trivial())

    @classmethod
    def from_fg(cls, v: RModuleFg, w: RModuleFg):
        e = ext1_z(v.group, w.group)
        phi = _phi_on_ext(v, w, e)
        coker = homology_at(phi, None)
        return cls("fg", coker.group, ext_e=e, coker=coker, phi=phi)

    def class_of_cocycle(self, cocycle: IntMatrix):
        """Class of an Ext^1_Z cocycle in Ext^2_R, as canonical coordinates."""
        if self.kind != "fg":
            raise UnsupportedShape("cocycle classes only available for fg-fg blocks")
        return self.coker.coords(list(self.ext_e.coords(cocycle)))

    def cocycle_of_class(self, coords):
        if self.kind != "fg":
            raise UnsupportedShape("cocycle classes only available for fg-fg blocks")
        return self.ext_e.from_coords(tuple(self.coker.rep_of(coords)))

    def zero_class(self):
        return tuple(0 for _ in self.group.invariant_factors)

    def class_is_zero(self, coords):
        return all(c == 0 for c in coords) if coords else True


@dataclass
class ExtRTriple:
    """Hom_R, Ext^1_R, Ext^2_R of a pair of fg-over-Z modules, with the
    six-term data needed for exactness checks and induced maps."""

    v: RModuleFg
    w: RModuleFg
    hom_h: HomGroup
    ext_e: Ext1Group
    phi_h: GroupMorphism
    phi_e: GroupMorphism
    hom_r: FgAbGroup
    hom_r_incl: GroupMorphism
    total: TotalComplex
    ext1_r_data: SubquotientData
    ext2: Ext2Block

    @property
    def ext1_r(self):
        return self.ext1_r_data.group

    @property
    def ext2_r(self):
        return self.ext2.group

    def hom_r_basis(self):
        """R-linear morphisms V -> W representing the Hom_R generators."""
        k = len(self.hom_r.invariant_factors)
        return [
            self.hom_r_element(tuple(1 if i == j else 0 for i in range(k)))
            for j in range(k)
        ]

    def hom_r_element(self, coords) -> GroupMorphism:
        hcoords = self.hom_r_incl.matrix.apply(self.hom_r.from_canon(coords))
        return self.hom_h.from_coords(tuple(hcoords))


def ext_r_fg(v: RModuleFg, w: RModuleFg) -> ExtRTriple:
    """Hom_R, Ext^1_R, Ext^2_R for fg-over-Z modules with automorphisms."""
    h = hom_z(v.group, w.group)
    e = ext1_z(v.group, w.group)
    phi_h = _phi_on_hom(v, w, h)
    phi_e = _phi_on_ext(v, w, e)
    hom_r, hom_r_incl = phi_h.kernel()
    total = TotalComplex.build(v, w)
    h1 = homology_at(total.d0, total.d1)
    coker = homology_at(phi_e, None)
    ext2 = Ext2Block("fg", coker.group, ext_e=e, coker=coker, phi=phi_e)
    return ExtRTriple(v, w, h, e, phi_h, phi_e, hom_r, hom_r_incl, total, h1, ext2)


def ext_r_resolution(v: RModuleFg, w: RModuleFg):
    """Oracle route: H^0, H^1, H^2 of the explicit length-two resolution."""
    total = TotalComplex.build(v, w)
    h0, h1, h2 = total.cohomology()
    return h0.group, h1.group, h2.group


def six_term_maps(t: ExtRTriple):
    """The maps of 0 -> Hom_R -> Hom_Z -> Hom_Z -> Ext^1_R -> Ext^1_Z ->
    Ext^1_Z -> Ext^2_R -> 0 between canonical groups, for exactness checks."""
    hcan = _canonical_group(t.hom_h.group.invariant_factors)
    ecan = _canonical_group(t.ext_e.group.invariant_factors)
    n, m = t.v.group.ngens, t.w.group.ngens
    r = t.total.res.cols

    # connecting Hom_Z -> Ext^1_R: phi |-> class of (phi, 0) in H^1
    cols = []
    for b in t.hom_h.basis:
        amb = _flatten(b.matrix) + [0] * (r * m)
        cols.append(list(t.ext1_r_data.coords(amb)))
    k = len(t.ext1_r.invariant_factors)
    conn = GroupMorphism(
        hcan, _canonical_group(t.ext1_r.invariant_factors),
        IntMatrix.from_columns(cols, rows=k) if cols else IntMatrix.zeros(k, 0),
        trusted=True,
    )

    # restriction Ext^1_R -> Ext^1_Z: class of (psi, chi) |-> class of chi
    cols = []
    for j in range(k):
        coords = tuple(1 if i == j else 0 for i in range(k))
        amb = t.ext1_r_data.rep_of(coords)
        chi = _unflatten(amb[n * m:], m, r)
        cols.append(list(t.ext_e.coords(chi)))
    ke = len(ecan.invariant_factors)
    res = GroupMorphism(
        _canonical_group(t.ext1_r.invariant_factors), ecan,
        IntMatrix.from_columns(cols, rows=ke) if cols else IntMatrix.zeros(ke, 0),
        trusted=True,
    )

    # projection Ext^1_Z -> Ext^2_R
    cols = []
    for j in range(ke):
        coords = [1 if i == j else 0 for i in range(ke)]
        cols.append(list(t.ext2.coker.coords(coords)))
    k2 = len(t.ext2.group.invariant_factors)
    proj = GroupMorphism(
        ecan, _canonical_group(t.ext2.group.invariant_factors),
        IntMatrix.from_columns(cols, rows=k2) if cols else IntMatrix.zeros(k2, 0),
        trusted=True,
    )

    return {
        "hom_incl": t.hom_r_incl,
        "phi_h": t.phi_h,
        "connecting": conn,
        "restriction": res,
        "phi_e": t.phi_e,
        "projection": proj,
    }


# ---------------------------------------------------------------------------
# Ext for canonical presentations
# ---------------------------------------------------------------------------


def _pres_operator_on_fg(t: IntMatrix, w: RModuleFg):
    """The map rho(f)_j = x_W f_j - sum_i T_ij f_i on W^n, flattened."""
    n, m = t.rows, w.group.ngens
    op = IntMatrix.identity(n).kron(w.x.matrix) - t.transpose().kron(IntMatrix.identity(m))
    wn = _power_group(w.group, n)
    return GroupMorphism(wn, wn, op, trusted=True)


def _matrix_power(a: IntMatrix, k: int) -> IntMatrix:
    out = IntMatrix.identity(a.rows)
    base = a
    while k:
        if k & 1:
            out = out @ base
        base = base @ base
        k >>= 1
    return out


def ext_r_pres(m: RModulePres, w):
    """(Hom_R, Ext^1_R, Ext^2_R) for a canonical presentation source.

    Ext^2_R is structurally zero (length-one free resolution).  For an fg
    target the other two are returned as FgAbGroups with representative
    vectors; for a canonical-presentation target they are returned as
    R-module presentations computed through the level-wise colimit.
    """
    t = m.require_canonical()
    n = t.rows
    if isinstance(w, RModuleFg):
        rho = _pres_operator_on_fg(t, w)
        hom, hom_incl = rho.kernel()
        ext1, ext1_proj = rho.cokernel()
        return PresExtResult(hom=hom, ext1=ext1, ext2=Ext2Block.zero(),
                             hom_incl=hom_incl, ext1_proj=ext1_proj)
    if isinstance(w, RModulePres):
        s = w.require_canonical()
        ssize = s.rows
        a1 = IntMatrix.identity(n).kron(s)
        b1 = t.transpose().kron(IntMatrix.identity(ssize))
        theta = a1 - b1
        dim = n * ssize
        # Hom: colimit of the stable kernel of theta under the level shift a1
        stable = _matrix_power(a1, dim) @ theta
        kb = kernel_basis(stable)
        klat = ColumnLattice(kb)
        cols = []
        for j in range(kb.cols):
            c = klat.solve(a1.apply(kb.column(j)))
            assert c is not None, "level shift must preserve the stable kernel"
            cols.append(c)
        shift = IntMatrix.from_columns(cols, rows=kb.cols) if cols else IntMatrix.zeros(0, 0)
        hom = RModulePres.from_shift_matrix(shift)
        # Ext^1: colimit of coker(theta) under the induced shift
        cgroup = FgAbGroup(dim, theta)
        pos = cgroup.canon_positions
        u, uinv = cgroup.snf.U, cgroup.snf.Uinv
        abar_full = u @ a1 @ uinv
        abar = abar_full.submatrix(pos, pos)
        diag = cgroup.snf.diagonal_padded(dim)
        lm = LaurentMatrix.x_identity_minus(abar)
        extra_cols = []
        for idx, p in enumerate(pos):
            if diag[p] != 0:
                col = [lp_constant(diag[p]) if i == idx else {} for i in range(len(pos))]
                extra_cols.append(col)
        entries = [
            [lm.entries[i][j] for j in range(lm.cols)] + [col[i] for col in extra_cols]
            for i in range(lm.rows)
        ]
        ext1 = RModulePres(LaurentMatrix(len(pos), lm.cols + len(extra_cols), entries))
        return PresExtResult(hom=hom, ext1=ext1, ext2=Ext2Block.zero())
    raise UnsupportedShape(f"unsupported target {w!r}")


@dataclass
class PresExtResult:
    hom: object
    ext1: object
    ext2: Ext2Block
    hom_incl: GroupMorphism | None = None
    ext1_proj: GroupMorphism | None = None


# ---------------------------------------------------------------------------
# Parity-block Ext^2 dispatch, and lifting counts
# ---------------------------------------------------------------------------


def ext2_block(p, q) -> Ext2Block:
    """Ext^2_R(P, Q) for one parity block of graded modules."""
    if isinstance(p, RModulePres):
        p.require_canonical()
        return Ext2Block.zero()
    if not isinstance(p, RModuleFg):
        raise UnsupportedShape(f"unsupported source {p!r}")
    if p.group.is_free():
        return Ext2Block.zero()
    if isinstance(q, RModuleFg):
        return Ext2Block.from_fg(p, q)
    if isinstance(q, RModulePres):
        s = q.require_canonical()
        # Ext^1_Z(P, colim(Z^s, S)) is the eventual image of the shift on
        # Ext^1_Z(P, Z^s); Ext^2_R is the cokernel of tau - x_P^* there.
        # The level shift is only an endomorphism, never inverted.
        level = FgAbGroup.free(s.rows)
        shift = GroupMorphism(level, level, s, trusted=True)
        e = ext1_z(p.group, level)
        from .abelian import ext1_induced

        shift_endo = ext1_induced(None, shift, e, e)
        h, embed, tau = eventual_image(shift_endo)
        pull = ext1_induced(p.x, None, e, e)
        # restrict the x_P pullback to the eventual image
        stacked = embed.matrix.hstack(shift_endo.source.relations)
        ssnf = smith_normal_form(stacked)
        cols = []
        for j in range(h.ngens):
            rhs = pull.matrix.apply(embed.matrix.column(j))
            z = solve(stacked, rhs, snf=ssnf)
            assert z is not None, "x-pullback must preserve the eventual image"
            cols.append(z[: h.ngens])
        pull_h = GroupMorphism(h, h, IntMatrix.from_columns(cols, rows=h.ngens))
        phi = tau - pull_h
        coker, _ = phi.cokernel()
        return Ext2Block("colimit", coker)
    raise UnsupportedShape(f"unsupported target {q!r}")


def count_liftings(m: GradedRModule):
    """|Ext^2_R(M, M)^-|, the number of equivalence classes of liftings.

    Returns an int, or None for an infinite count.
    """
    total = 1
    for p, q in [(m.even, m.odd), (m.odd, m.even)]:
        order = ext2_block(p, q).group.order()
        if order is None:
            return None
        total *= order
    return total


def ck_module(a: IntMatrix) -> GradedRModule:
    """Gauge-action module of a non-negative integer square matrix.

    Even part coker(x*I - A^t), converted to the fg form (Z^n, x = A^t) when
    A is invertible over Z; odd part zero.
    """
    n = a.rows
    if a.cols != n:
        raise ValueError("adjacency matrix must be square")
    for i in range(n):
        for j in range(n):
            if a.data[i][j] < 0:
                raise ValueError(f"negative entry at ({i}, {j})")
    for i in range(n):
        if all(e == 0 for e in a.data[i]):
            raise ValueError(f"row {i} vanishes identically")
    for j in range(n):
        if all(a.data[i][j] == 0 for i in range(n)):
            raise ValueError(f"column {j} vanishes identically")
    pres = RModulePres.from_shift_matrix(a.transpose())
    even = pres.to_fg() if is_unimodular(a) else pres
    return GradedRModule(even=even, odd=RModuleFg.zero())


# ---------------------------------------------------------------------------
# The pair category (module, obstruction class)
# ---------------------------------------------------------------------------


@dataclass
class PairDelta:
    """A graded module with an odd-degree obstruction class.

    The class is stored by its coordinates in the two parity blocks
    Ext^2_R(even, odd) and Ext^2_R(odd, even).
    """

    module: GradedRModule
    delta_eo: tuple
    delta_oe: tuple
    blocks: tuple = field(default=None)

    def __post_init__(self):
        if self.blocks is None:
            self.blocks = (
                ext2_block(self.module.even, self.module.odd),
                ext2_block(self.module.odd, self.module.even),
            )
        beo, boe = self.blocks
        if len(self.delta_eo) != len(beo.group.invariant_factors):
            raise ValueError("even->odd class has wrong coordinate length")
        if len(self.delta_oe) != len(boe.group.invariant_factors):
            raise ValueError("odd->even class has wrong coordinate length")


@dataclass
class SearchOutcome:
    verdict: str  # 'yes' | 'no' | 'unknown'
    witness: object = None
    reason: str = ""


def _iso_candidates(src: RModuleFg, tgt: RModuleFg, bound, budget):
    """R-linear isomorphisms src -> tgt by bounded coordinate enumeration.

    Returns (candidates, exhausted): exhausted means the whole Hom_R group
    was enumerated, so a failed search is conclusive.
    """
    if src.group.invariant_factors != tgt.group.invariant_factors:
        return [], True
    triple = ext_r_fg(src, tgt)
    facs = triple.hom_r.invariant_factors
    ranges = []
    exhausted = True
    for d in facs:
        if d == 0:
            ranges.append(range(-bound, bound + 1))
            exhausted = False
        else:
            ranges.append(range(d))
    out = []
    count = 0
    import itertools

    for coords in itertools.product(*ranges):
        count += 1
        if count > budget:
            return out, False
        f = triple.hom_r_element(coords)
        if f.is_iso():
            out.append(f)
    return out, exhausted


def _induced_class_coords(post: GroupMorphism | None, pre_map: GroupMorphism | None,
                          src_block: Ext2Block, tgt_block: Ext2Block, coords):
    """Transport a class along cocycle-level induced maps into tgt_block."""
    if src_block.kind == "zero" or tgt_block.kind == "zero":
        return tgt_block.zero_class()
    m = src_block.cocycle_of_class(coords)
    if pre_map is not None:
        lift = resolution_lift(pre_map, tgt_block.ext_e.res, src_block.ext_e.res)
        m = m @ lift
    if post is not None:
        m = post.matrix @ m
    return tgt_block.class_of_cocycle(m)


def pair_iso(p1: PairDelta, p2: PairDelta, bound=8, budget=20000) -> SearchOutcome:
    """Isomorphism search in the pair category.

    yes(f) returns grading components (f_even, f_odd); no is only returned
    in a complete regime (finite modules exhausted, or a class obstruction
    independent of the choice of f); otherwise unknown.
    """
    m1, m2 = p1.module, p2.module
    for part in (m1.even, m1.odd, m2.even, m2.odd):
        if not isinstance(part, RModuleFg):
            raise UnsupportedShape("pair isomorphism search needs fg-over-Z parts")
    if m1.even.group.invariant_factors != m2.even.group.invariant_factors or \
            m1.odd.group.invariant_factors != m2.odd.group.invariant_factors:
        return SearchOutcome("no", reason="underlying graded groups are not isomorphic")
    b1eo, b1oe = p1.blocks
    b2eo, b2oe = p2.blocks
    # class obstruction independent of f: induced maps of isos preserve vanishing
    if b1eo.class_is_zero(p1.delta_eo) != b2eo.class_is_zero(p2.delta_eo):
        return SearchOutcome("no", reason="class vanishing mismatch in even->odd block")
    if b1oe.class_is_zero(p1.delta_oe) != b2oe.class_is_zero(p2.delta_oe):
        return SearchOutcome("no", reason="class vanishing mismatch in odd->even block")

    even_cands, even_done = _iso_candidates(m1.even, m2.even, bound, budget)
    odd_cands, odd_done = _iso_candidates(m1.odd, m2.odd, bound, budget)
    if not even_cands and even_done:
        return SearchOutcome("no", reason="no graded module isomorphism (even part)")
    if not odd_cands and odd_done:
        return SearchOutcome("no", reason="no graded module isomorphism (odd part)")

    cross_eo = ext2_block(m1.even, m2.odd)
    cross_oe = ext2_block(m1.odd, m2.even)
    for fe in even_cands:
        for fo in odd_cands:
            lhs = _induced_class_coords(fo, None, b1eo, cross_eo, p1.delta_eo)
            rhs = _induced_class_coords(None, fe, b2eo, cross_eo, p2.delta_eo)
            if lhs != rhs:
                continue
            lhs = _induced_class_coords(fe, None, b1oe, cross_oe, p1.delta_oe)
            rhs = _induced_class_coords(None, fo, b2oe, cross_oe, p2.delta_oe)
            if lhs != rhs:
                continue
            return SearchOutcome("yes", witness=(fe, fo))
    if even_done and odd_done:
        return SearchOutcome("no", reason="all graded isomorphisms fail class compatibility")
    return SearchOutcome("unknown", reason="search bounds exhausted")
