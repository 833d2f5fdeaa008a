import random

import pytest

from obstruct.abelian import FgAbGroup, GroupMorphism, iso_groups
from obstruct.intlinalg import IntMatrix
from obstruct.posets import (
    FinitePoset,
    antichain_poset,
    chain_poset,
    diamond_poset,
    point_poset,
    sierpinski_poset,
)
from obstruct.quiver import (
    ExactnessError,
    Ext2Class,
    ExtPosetGroup,
    ProjectiveRep,
    QuiverRep,
    RepMorphism,
    TwoExtension,
    baer_sum,
    chain_lift,
    ext2_compatible,
    ext_poset,
    ext_poset_all_degrees,
    ext_poset_ups_oracle,
    minimal_cover,
    rep_cokernel,
    rep_direct_sum,
    rep_is_exact_at,
    rep_iso_bounded,
    rep_kernel,
    resolve_projective,
    sierpinski_ext2,
    transport_class,
    verify_resolution,
    yoneda_class,
)

from test_abelian import random_group, random_morphism


def sierpinski_rep(vb, va, arrow_matrix):
    """Representation over a < b with map V_b -> V_a."""
    poset = sierpinski_poset()
    groups = {"a": va, "b": vb}
    arrows = {("b", "a"): GroupMorphism(vb, va, arrow_matrix)}
    return QuiverRep(poset, groups, arrows)


def zmod(d):
    return FgAbGroup.cyclic(d)


def zero_group():
    return FgAbGroup.trivial()


# --- representations -----------------------------------------------------------


def test_quiver_rep_validation():
    poset = sierpinski_poset()
    with pytest.raises(ValueError):
        QuiverRep(poset, {"a": zmod(2)}, {})


def test_coherence_check_on_diamond():
    poset = diamond_poset()
    z = FgAbGroup.free(1)
    groups = {p: z for p in poset.points}
    one = IntMatrix.from_rows([[1]])
    two = IntMatrix.from_rows([[2]])
    arrows = {
        ("top", "l"): GroupMorphism(z, z, one),
        ("top", "r"): GroupMorphism(z, z, one),
        ("l", "bot"): GroupMorphism(z, z, one),
        ("r", "bot"): GroupMorphism(z, z, two),
    }
    with pytest.raises(ValueError, match="disagree"):
        QuiverRep(poset, groups, arrows)
    arrows[("r", "bot")] = GroupMorphism(z, z, one)
    QuiverRep(poset, groups, arrows)  # now coherent


def test_rep_kernel_cokernel():
    v = sierpinski_rep(zmod(4), zmod(4), IntMatrix.from_rows([[2]]))
    f = RepMorphism.identity(v)
    k, _ = rep_kernel(f)
    assert k.is_zero()
    c, _ = rep_cokernel(f)
    assert c.is_zero()


# --- projective covers and resolutions ------------------------------------------


def test_minimal_cover_of_projective_is_iso():
    poset = sierpinski_poset()
    p = ProjectiveRep(poset, ["b"])
    rep = p.as_rep()
    cover, phi = minimal_cover(rep)
    assert cover.gen_points == ["b"]
    res = resolve_projective(rep, 3)
    assert res.complete
    assert res.length == 0


def test_resolution_sierpinski_torsion():
    v = sierpinski_rep(zmod(2), zero_group(), IntMatrix.zeros(0, 1))
    res = resolve_projective(v, 3)
    assert res.complete
    assert res.length == 2
    verify_resolution(res)


def test_resolution_free_entries_on_ups_length_1():
    # free entries on a unique path space: projective dimension <= 1
    rng = random.Random(4)
    poset = chain_poset(3)
    for _ in range(5):
        groups = {p: FgAbGroup.free(rng.randint(0, 2)) for p in poset.points}
        arrows = {}
        for y, x in poset.hasse_arrows:
            m = IntMatrix(
                groups[x].ngens, groups[y].ngens,
                [[rng.randint(-2, 2) for _ in range(groups[y].ngens)]
                 for _ in range(groups[x].ngens)],
            )
            arrows[(y, x)] = GroupMorphism(groups[y], groups[x], m)
        v = QuiverRep(poset, groups, arrows)
        res = resolve_projective(v, 3)
        assert res.complete
        assert res.length <= 1
        verify_resolution(res)


def random_rep(rng, poset, max_gens=2, max_entry=4):
    groups = {p: random_group(rng, max_gens, max_entry) for p in poset.points}
    # build arrow maps point by point; retry until coherent (cheap for trees)
    for _ in range(60):
        arrows = {}
        for y, x in poset.hasse_arrows:
            arrows[(y, x)] = random_morphism(rng, groups[y], groups[x])
        try:
            return QuiverRep(poset, groups, arrows)
        except ValueError:
            continue
    raise AssertionError("could not build a coherent random representation")


def test_resolution_length_at_most_2_on_ups():
    rng = random.Random(8)
    for poset in [point_poset(), sierpinski_poset(), chain_poset(3), antichain_poset(2)]:
        for _ in range(4):
            v = random_rep(rng, poset)
            res = resolve_projective(v, 5)
            assert res.complete
            assert res.length <= 2
            verify_resolution(res)


def test_randomized_resolutions_also_exact():
    rng = random.Random(11)
    v = sierpinski_rep(zmod(4), zmod(2), IntMatrix.from_rows([[1]]))
    for seed in range(5):
        res = resolve_projective(v, 3, rng=random.Random(seed))
        verify_resolution(res)


# --- ext over the incidence algebra ----------------------------------------------


def test_ext_point_space_is_plain_homological_algebra():
    poset = point_poset()
    v = QuiverRep(poset, {"*": zmod(4)}, {})
    w = QuiverRep(poset, {"*": zmod(2)}, {})
    assert ext_poset(v, w, 0).group.invariant_factors == [2]  # Hom(Z/4, Z/2)
    assert ext_poset(v, w, 1).group.invariant_factors == [2]  # Ext^1(Z/4, Z/2)
    assert ext_poset(v, w, 2).group.is_trivial()  # one-point space: dimension 1


def test_ext_discrete_poset_ext2_vanishes():
    poset = antichain_poset(2)
    rng = random.Random(3)
    for _ in range(4):
        v = random_rep(rng, poset)
        w = random_rep(rng, poset)
        assert ext_poset(v, w, 2).group.is_trivial()


def test_sierpinski_ext2_example():
    # V = (Z/2 -> 0), W = (0 -> Z/2): Ext^2 = Ext^1(Z/2, Z/2) = Z/2
    v = sierpinski_rep(zmod(2), zero_group(), IntMatrix.zeros(0, 1))
    w = sierpinski_rep(zero_group(), zmod(2), IntMatrix.zeros(1, 0))
    e2 = ext_poset(v, w, 2)
    assert e2.group.invariant_factors == [2]
    oracle = sierpinski_ext2(v.arrow_map("b", "a"), w.arrow_map("b", "a"))
    assert oracle.invariant_factors == [2]


def test_sierpinski_oracle_trivial_cases():
    # phi injective -> 0; psi surjective -> 0
    z = FgAbGroup.free(1)
    inj = GroupMorphism(z, z, IntMatrix.from_rows([[2]]))
    surj = GroupMorphism.identity(zmod(4))
    assert sierpinski_ext2(inj, GroupMorphism.zero(zmod(2), zmod(2))).is_trivial()
    assert sierpinski_ext2(GroupMorphism.zero(zmod(2), zmod(2)), surj).is_trivial()


def test_sierpinski_agreement_random():
    rng = random.Random(10)
    for _ in range(25):
        v = random_rep(rng, sierpinski_poset())
        w = random_rep(rng, sierpinski_poset())
        e2 = ext_poset(v, w, 2).group
        oracle = sierpinski_ext2(v.arrow_map("b", "a"), w.arrow_map("b", "a"))
        ok, _ = iso_groups(e2, oracle)
        assert ok, (e2.describe(), oracle.describe())


def test_ups_oracle_agreement():
    rng = random.Random(12)
    for poset in [sierpinski_poset(), chain_poset(3)]:
        for _ in range(4):
            v = random_rep(rng, poset)
            w = random_rep(rng, poset)
            syz = [ext_poset(v, w, n).group for n in range(3)]
            orc = ext_poset_ups_oracle(v, w)
            for g1, g2 in zip(syz, orc):
                assert iso_groups(g1, g2)[0]


def test_ext3_vanishes_on_ups():
    rng = random.Random(13)
    for poset in [sierpinski_poset(), chain_poset(3)]:
        v = random_rep(rng, poset)
        w = random_rep(rng, poset)
        degrees = ext_poset_all_degrees(v, w)
        assert degrees[3].is_trivial()


def test_ext2_vanishes_for_free_entries():
    rng = random.Random(14)
    poset = sierpinski_poset()
    for _ in range(4):
        groups = {p: FgAbGroup.free(rng.randint(1, 2)) for p in poset.points}
        arrows = {}
        for y, x in poset.hasse_arrows:
            m = IntMatrix(
                groups[x].ngens, groups[y].ngens,
                [[rng.randint(-2, 2) for _ in range(groups[y].ngens)]
                 for _ in range(groups[x].ngens)],
            )
            arrows[(y, x)] = GroupMorphism(groups[y], groups[x], m)
        v = QuiverRep(poset, groups, arrows)
        w = random_rep(rng, poset)
        assert ext_poset(v, w, 2).group.is_trivial()


# --- yoneda classes ----------------------------------------------------------------


def split_two_extension(m1: QuiverRep, m0: QuiverRep):
    """0 -> M1 --(id,0)--> M1+M0 --(0,id)--> M0+0... a split 2-extension
    0 -> M1 -> M1 -> 0 -> 0 ... simplest: Q1 = M1, Q0 = M0, d1 = 0."""
    d2 = RepMorphism.identity(m1)
    d1 = RepMorphism.zero(m1, m0)
    eps = RepMorphism.identity(m0)
    return TwoExtension(m1, m1, m0, m0, d2, d1, eps)


def test_yoneda_split_extension_is_zero():
    v = sierpinski_rep(zmod(2), zero_group(), IntMatrix.zeros(0, 1))
    w = sierpinski_rep(zero_group(), zmod(2), IntMatrix.zeros(1, 0))
    ext = split_two_extension(w, v)
    cls = yoneda_class(ext)
    assert cls.is_zero()


def test_yoneda_projective_m0_lands_in_zero_group():
    poset = sierpinski_poset()
    m0 = ProjectiveRep(poset, ["b"]).as_rep()
    m1 = sierpinski_rep(zero_group(), zmod(2), IntMatrix.zeros(1, 0))
    ext = split_two_extension(m1, m0)
    cls = yoneda_class(ext)
    assert cls.ambient.group.is_trivial()
    assert cls.is_zero()


def generator_extension(twist=True):
    """A 2-extension of M0 = (Z/2 -> 0) by M1 = (0 -> Z/2) over a < b.

    Q1 = (Z at b -> Z/4 at a), Q0 = (Z at b -> Z/2 at a) with zero Q0-arrow;
    the Q1 arrow is multiplication by 2 when twist=True (hitting the
    generator of Ext^2 = Z/2) and zero when twist=False (split class).
    """
    poset = sierpinski_poset()
    z = FgAbGroup.free(1)
    z2 = zmod(2)
    z4 = zmod(4)
    zero = zero_group()
    m0 = QuiverRep(poset, {"b": z2, "a": zero},
                   {("b", "a"): GroupMorphism(z2, zero, IntMatrix.zeros(0, 1))})
    m1 = QuiverRep(poset, {"b": zero, "a": z2},
                   {("b", "a"): GroupMorphism(zero, z2, IntMatrix.zeros(1, 0))})
    q1_arrow = IntMatrix.from_rows([[2 if twist else 0]])
    q1 = QuiverRep(poset, {"b": z, "a": z4},
                   {("b", "a"): GroupMorphism(z, z4, q1_arrow)})
    q0 = QuiverRep(poset, {"b": z, "a": z2},
                   {("b", "a"): GroupMorphism(z, z2, IntMatrix.from_rows([[0]]))})
    d2 = RepMorphism(m1, q1, {
        "b": GroupMorphism.zero(zero, z),
        "a": GroupMorphism(z2, z4, IntMatrix.from_rows([[2]])),
    })
    d1 = RepMorphism(q1, q0, {
        "b": GroupMorphism(z, z, IntMatrix.from_rows([[2]])),
        "a": GroupMorphism(z4, z2, IntMatrix.from_rows([[1]])),
    })
    eps = RepMorphism(q0, m0, {
        "b": GroupMorphism(z, z2, IntMatrix.from_rows([[1]])),
        "a": GroupMorphism.zero(z, zero),
    })
    ext = TwoExtension(m1, q1, q0, m0, d2, d1, eps)
    ext.verify_exact()
    return ext


def test_generator_extension_class():
    ext = generator_extension(twist=True)
    cls = yoneda_class(ext)
    assert cls.ambient.group.invariant_factors == [2]
    assert not cls.is_zero()
    split = generator_extension(twist=False)
    cls0 = yoneda_class(split, ambient=cls.ambient)
    assert cls0.is_zero()


def test_yoneda_class_independent_of_choices():
    ext = generator_extension(twist=True)
    base = yoneda_class(ext)
    for seed in range(6):
        rng = random.Random(seed)
        other = yoneda_class(ext, rng=rng)
        # same ambient resolution (deterministic), randomized lift choices
        if other.provenance == base.provenance:
            assert other.coords == base.coords
    # randomized resolutions: transport the class and compare
    for seed in range(4):
        rng = random.Random(100 + seed)
        ambient2 = ExtPosetGroup(ext.m0, ext.m1, 2, rng=rng)
        cls2 = yoneda_class(ext, ambient=ambient2)
        transported = transport_class(cls2, base.ambient)
        assert transported == base.coords


def test_yoneda_baer_sum_additivity():
    ext = generator_extension(twist=True)
    total = baer_sum(ext, ext)
    total.verify_exact()
    cls = yoneda_class(total, ambient=yoneda_class(ext).ambient)
    # generator + generator = 0 in Z/2
    assert cls.is_zero()


def test_exactness_error_naming_node():
    poset = sierpinski_poset()
    z2 = zmod(2)
    zero = zero_group()
    m = QuiverRep(poset, {"b": z2, "a": zero},
                  {("b", "a"): GroupMorphism(z2, zero, IntMatrix.zeros(0, 1))})
    bad = TwoExtension(m, m, m, m,
                       RepMorphism.identity(m), RepMorphism.identity(m),
                       RepMorphism.identity(m))
    with pytest.raises(ExactnessError):
        bad.verify_exact()


# --- compatibility and iso search ---------------------------------------------------


def test_ext2_compatible_identity():
    ext = generator_extension(twist=True)
    cls = yoneda_class(ext)
    f = RepMorphism.identity(ext.m0)
    g = RepMorphism.identity(ext.m1)
    assert ext2_compatible(f, cls, cls, g)


def test_ext2_compatible_zero_vs_nonzero():
    ext = generator_extension(twist=True)
    cls = yoneda_class(ext)
    zero_cls = Ext2Class(cls.ambient, cls.ambient.zero_class(), cls.provenance)
    f = RepMorphism.identity(ext.m0)
    g = RepMorphism.identity(ext.m1)
    assert not ext2_compatible(f, zero_cls, cls, g)
    assert ext2_compatible(f, zero_cls, zero_cls, g)


def test_rep_iso_bounded_identity_and_mismatch():
    v = sierpinski_rep(zmod(4), zmod(2), IntMatrix.from_rows([[1]]))
    out = rep_iso_bounded(v, v)
    assert out.verdict == "yes"
    assert out.witness.is_iso()
    w = sierpinski_rep(zmod(4), zmod(4), IntMatrix.from_rows([[1]]))
    out = rep_iso_bounded(v, w)
    assert out.verdict == "no"


def test_rep_iso_bounded_sign_absorption():
    z = FgAbGroup.free(1)
    v = sierpinski_rep(z, z, IntMatrix.from_rows([[1]]))
    w = sierpinski_rep(z, z, IntMatrix.from_rows([[-1]]))
    out = rep_iso_bounded(v, w, bound=2)
    assert out.verdict == "yes"
    assert out.witness.is_iso()


def test_rep_iso_bounded_genuinely_different():
    z = FgAbGroup.free(1)
    v = sierpinski_rep(z, z, IntMatrix.from_rows([[1]]))
    w = sierpinski_rep(z, z, IntMatrix.from_rows([[2]]))
    out = rep_iso_bounded(v, w, bound=3, budget=5000)
    # x2 cannot be absorbed by units: provably no within the free regime is
    # impossible for the bounded search, so 'unknown' is also acceptable,
    # but it must never say yes
    assert out.verdict in ("no", "unknown")
