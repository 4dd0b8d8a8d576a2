import math

import numpy as np
import pytest

from dgorbits import groups as G
from dgorbits.errors import GroupError, ResourceLimitError


def brute_perm_compose(p, q):
    return tuple(p[q[i]] for i in range(len(p)))


def test_from_generators_s3_order():
    g = G.from_generators([G.parse_cycles("(1 2)", 3), G.parse_cycles("(1 2 3)", 3)])
    assert g.order == 6


def test_from_generators_a5_order():
    g = G.from_generators([G.parse_cycles("(1 2 3 4 5)"), G.parse_cycles("(3 4 5)", 5)])
    assert g.order == 60


def test_from_generators_empty_rejected():
    with pytest.raises(GroupError):
        G.from_generators([])


def test_from_generators_cap():
    with pytest.raises(ResourceLimitError):
        G.from_generators([G.parse_cycles("(1 2 3 4 5 6 7)")], cap=5)


def test_bfs_ordering_deterministic(s3):
    # identity first; layer one holds the generators sorted by image tuple
    assert s3.names[0] == "e"
    assert s3.names[1] == "(1 2)" and s3.names[2] == "(1 2 3)"


def test_multiplication_against_composition(s3):
    # multiplication matches actual permutation composition (right factor first)
    perms = [G.parse_cycles(n, 3) if n != "e" else tuple(range(3)) for n in s3.names]
    for a in range(6):
        for b in range(6):
            assert perms[s3.m(a, b)] == brute_perm_compose(perms[a], perms[b])


@pytest.mark.parametrize(
    "family,param,order",
    [("dihedral", 4, 8), ("quaternion", 8, 8), ("symmetric", 4, 24), ("alternating", 4, 12), ("cyclic", 1, 1)],
)
def test_builtin_orders(family, param, order):
    assert G.builtin_family(family, param).order == order


def test_dihedral_center_even():
    d4 = G.dihedral(4)
    assert sorted(d4.names[z] for z in d4.center().members) == ["e", "x^2"]


def test_dihedral_center_odd(d5):
    assert d5.center().members == (0,)


def test_quaternion_exponent(q8):
    assert q8.exponent == 4


def test_quaternion_presentation_relations():
    for p in (2, 3, 5):
        q = G.quaternion(4 * p)
        x, y = q.generators
        assert q.pow(x, 2 * p) == 0
        assert q.pow(x, p) == q.pow(y, 2)
        assert q.conj(x, y) == q.i(x)


def test_conjugacy_classes_s3(s3):
    sizes = sorted(c.size for c in s3.conjugacy_classes)
    assert sizes == [1, 2, 3]
    assert s3.conjugacy_classes[0].members == (0,)


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
def test_dihedral_odd_class_count(p):
    n = 2 * p + 1
    assert len(G.dihedral(n).conjugacy_classes) == p + 2


def test_trivial_group_classes():
    assert len(G.trivial().conjugacy_classes) == 1


def test_centralizer_a5_three_cycle(a5):
    g = a5.element_by_name("(1 2 3)")
    z = a5.centralizer(g)
    assert z.order == 3


def test_centralizer_identity_is_group(s3):
    assert s3.centralizer(0).order == s3.order


def test_centralizer_q8_y(q8):
    assert q8.centralizer(q8.element_by_name("y")).order == 4


def test_orbit_stabilizer_identity(s3, d4, q8, d5, a5):
    for g in (s3, d4, q8, d5, a5):
        for c in g.conjugacy_classes:
            assert c.size * g.centralizer(c.representative).order == g.order


def test_class_equation(a5):
    assert sum(c.size for c in a5.conjugacy_classes) == a5.order


@pytest.mark.parametrize("n,expected", [(3, 6), (5, 10), (7, 14)])
def test_dihedral_odd_exponent(n, expected):
    assert G.dihedral(n).exponent == expected


def test_cyclic_exponent():
    assert G.cyclic(12).exponent == 12


def test_commutator_identities(s3):
    for g in range(6):
        assert s3.commutator(g, g) == 0
    d3 = G.dihedral(3)
    x, y = d3.generators
    # frozen by direct table computation: [x,y] = x, [y,x] = x^2
    assert d3.names[d3.commutator(x, y)] == "x"
    assert d3.names[d3.commutator(y, x)] == "x^2"


def test_commutator_inverse_identity_when_central(q8):
    # [x,g]^-1 = [x,g^-1] whenever [x,g] commutes with g (true throughout Q8)
    for x in range(8):
        for g in range(8):
            c = q8.commutator(x, g)
            assert q8.m(c, g) == q8.m(g, c)
            assert q8.i(c) == q8.commutator(x, q8.i(g))


def test_conjugation_identities(s3):
    for g in range(6):
        for h in range(6):
            assert s3.conj(s3.lconj(h, g), h) == g
            assert s3.lconj(h, s3.conj(g, h)) == g


def test_commutator_classes_s3(s3):
    got = {c.id for c in s3.commutator_classes()}
    b = s3.element_by_name("(1 2 3)")
    assert got == {0, int(s3.class_of[b])}


def test_commutator_classes_a5(a5):
    assert len(a5.commutator_classes()) == len(a5.conjugacy_classes)


def test_abelian_derived_trivial():
    z6 = G.cyclic(6)
    assert z6.derived_subgroup().members == (0,)
    ab, proj = z6.abelianization()
    assert ab.order == 6 and list(proj) == list(range(6))


def test_derived_subgroup_normal(s3, q8):
    for g in (s3, q8):
        der = set(g.derived_subgroup().members)
        for d in der:
            for s in g.generators:
                assert g.conj(d, s) in der


def test_abelianization_projection_is_hom(s3):
    ab, proj = s3.abelianization()
    assert ab.order == 2
    for a in range(6):
        for b in range(6):
            assert proj[s3.m(a, b)] == ab.m(int(proj[a]), int(proj[b]))


def test_power_map_identity(s3):
    assert list(s3.power_map(1)) == list(range(6))


def test_power_map_composition(d5):
    p3 = d5.power_map(3)
    p9 = d5.power_map(9)
    assert list(p3[p3]) == list(p9)
    z5 = G.cyclic(5)
    assert list(z5.power_map(2)[z5.power_map(2)]) == list(z5.power_map(4))
    with pytest.raises(GroupError):
        d5.power_map(2)


def test_power_map_coprime_required(d4):
    with pytest.raises(GroupError):
        d4.power_map(2)


def test_power_map_pairs_inverses():
    z5 = G.cyclic(5)
    p4 = z5.power_map(4)
    assert all(int(p4[g]) == z5.i(g) for g in range(5))


def test_power_map_respects_classes(a5):
    p7 = a5.power_map(7)
    for g in range(a5.order):
        assert a5.class_of[p7[g]] == a5.class_of[p7[a5.conj(g, 3)]]


def test_inverse_class_pairing(a5):
    for c in a5.conjugacy_classes:
        cbar = a5.conjugacy_classes[c.inverse_class]
        if cbar.id != c.id:
            assert cbar.representative == a5.i(c.representative)
        else:
            assert a5.lconj(c.iota, c.representative) == a5.i(c.representative)


def test_associativity_spot_checks(s3, q8):
    assert s3.check_associativity()
    assert q8.check_associativity()


def test_parse_cycles_roundtrip():
    img = G.parse_cycles("(1 2 3)(4 5)")
    assert G.cycle_string(img) == "(1 2 3)(4 5)"
    assert G.parse_cycles("()") == ()
    with pytest.raises(GroupError):
        G.parse_cycles("(1 2 2)")


def test_group_from_spec():
    assert G.group_from_spec("S3").order == 6
    assert G.group_from_spec("Q12").order == 12
    assert G.group_from_spec("Z2xZ2").order == 4
    assert G.group_from_spec("trivial").order == 1
    assert G.group_from_spec("dihedral:7").order == 14
    with pytest.raises(GroupError):
        G.group_from_spec("XYZ")


def test_generator_file(tmp_path):
    path = tmp_path / "gens.txt"
    path.write_text("(1 2)\n(1 2 3)  # comment\n")
    g = G.from_generator_file(str(path))
    assert g.order == 6


def test_dihedral_data_lists_match_structure():
    # class sizes, centralizer orders, exponent and center for n <= 12
    for n in range(3, 13):
        g = G.dihedral(n)
        sizes = sorted(c.size for c in g.conjugacy_classes)
        if n % 2 == 1:
            p = (n - 1) // 2
            assert sizes == sorted([1] + [2] * p + [n])
            assert g.center().order == 1
            assert g.exponent == 2 * n
        else:
            p = n // 2
            assert sizes == sorted([1, 1] + [2] * (p - 1) + [p, p])
            assert g.center().order == 2
            assert g.exponent == (n if p % 2 == 0 else 2 * n)


def test_quaternion_data_lists():
    for p in range(2, 7):
        g = G.quaternion(4 * p)
        assert g.center().order == 2
        assert g.exponent == (2 * p if p % 2 == 0 else 4 * p)
        sizes = sorted(c.size for c in g.conjugacy_classes)
        assert sizes == sorted([1, 1] + [2] * (p - 1) + [p, p])
        x = g.generators[0]
        assert g.centralizer(x).order == 2 * p
        y = g.element_by_name("y")
        assert g.centralizer(y).order == 4
