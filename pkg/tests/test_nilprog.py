"""Commutator bases and the four progression models."""

import pytest
from sympy import divisors, mobius

from cayleylab.groups import FreeNilpotentGroup, ResourceRefusal, build_group, commutator
from cayleylab.nilprog import (
    commutator_depth,
    enumerate_progression,
    generalised_commutators,
    hall_basis,
    progression_spec,
    total_weight,
    tree_text,
    verify_nesting,
    verify_power_laws,
    verify_properness,
)


def necklace_count(r: int, w: int) -> int:
    """Dimension of the degree-w layer of the free Lie algebra on r letters."""
    return sum(mobius(d) * r ** (w // d) for d in divisors(w)) // w


# ---------------------------------------------------------------------------
# Hall basis
# ---------------------------------------------------------------------------


def test_hall_basis_small_cases():
    assert hall_basis(2, 2).texts() == ["x1", "x2", "[x2,x1]"]
    assert hall_basis(2, 3).texts() == ["x1", "x2", "[x2,x1]", "[[x2,x1],x1]", "[[x2,x1],x2]"]
    assert hall_basis(3, 2).size == 6
    assert hall_basis(1, 5).texts() == ["x1"]


def test_hall_basis_ordering_constraints():
    basis = hall_basis(3, 4)
    weights = [total_weight(c) for c in basis.commutators]
    assert weights == sorted(weights)
    vectors = basis.weights
    # equal weight vectors are consecutive
    seen = []
    for v in vectors:
        if not seen or seen[-1] != v:
            assert v not in seen
            seen.append(v)


@pytest.mark.parametrize("r", [1, 2, 3, 4])
@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_hall_weight_counts_match_necklace_formula(r, s):
    counts = hall_basis(r, s).weight_counts()
    for w in range(1, s + 1):
        assert counts.get(w, 0) == necklace_count(r, w)


def test_hall_basis_size_refusal():
    with pytest.raises(ResourceRefusal):
        hall_basis(10, 5)


# ---------------------------------------------------------------------------
# Generalised commutators
# ---------------------------------------------------------------------------


def test_generalised_commutators_counts():
    assert generalised_commutators(2, 2).size == 6
    assert generalised_commutators(1, 4).size == 1
    assert generalised_commutators(2, 3).size == 22  # 6 plus 16 weight-3 sign variants


def test_generalised_commutators_structure():
    gc = generalised_commutators(2, 2)
    texts = [e.text() for e in gc.entries]
    assert texts[:2] == ["x1", "x2"]
    assert set(texts[2:]) == {"[x2,x1]", "[x2,x1^-1]", "[x2^-1,x1]", "[x2^-1,x1^-1]"}
    # sign variants of one shape are consecutive and share a weight vector
    shapes = [tree_text(e.shape) for e in gc.entries]
    assert shapes == sorted(shapes, key=shapes.index)
    weights = {e.weight_vector(2) for e in gc.entries[2:]}
    assert weights == {(1, 1)}


def test_generalised_commutators_evaluate():
    g = FreeNilpotentGroup(2, 2)
    x, y = g.raw_generators()
    values = generalised_commutators(2, 2).evaluate(g, [x, y])
    # two-step bilinearity collapses the four sign variants onto {z, z^-1}
    z = commutator(g, y, x)
    codes = {g.encode(v) for v in values[2:]}
    assert codes == {g.encode(z), g.encode(g.inv(z))}
    assert g.encode(g.identity()) not in codes


# ---------------------------------------------------------------------------
# Progressions
# ---------------------------------------------------------------------------


def test_ordered_progression_cardinality():
    pset = enumerate_progression(progression_spec("ordered", 2, 2, (1, 1)))
    assert pset.cardinality == 9


def test_nilpotent_progression_proper():
    pset = enumerate_progression(progression_spec("nilpotent", 2, 2, (1, 1)))
    assert pset.cardinality == 27 and pset.proper and pset.formal_box == 27


def test_nilprogression_symmetric_and_contains_ordered():
    spec = progression_spec("nilprogression", 2, 2, (2, 1))
    pset = enumerate_progression(spec)
    g = spec.group
    inverses = {g.encode(g.inv(x)) for x in pset.elements}
    assert inverses == set(pset.codes)
    ordered = enumerate_progression(progression_spec("ordered", 2, 2, (2, 1)))
    assert pset.contains_set(ordered)


def test_zero_side_lengths_give_identity():
    for kind in ("ordered", "nilprogression", "nilpotent", "nilcomplete"):
        pset = enumerate_progression(progression_spec(kind, 2, 2, (0, 0)))
        assert pset.cardinality == 1


def test_progression_monotone_in_l():
    for kind in ("ordered", "nilprogression", "nilpotent", "nilcomplete"):
        small = enumerate_progression(progression_spec(kind, 2, 2, (1, 1)))
        large = enumerate_progression(progression_spec(kind, 2, 2, (2, 1)))
        assert large.contains_set(small)


def test_nesting_chain_small():
    rep = verify_nesting(2, 2, (1, 1))
    assert rep.holds
    assert rep.cardinalities["ordered"] == 9
    assert rep.cardinalities["nilpotent"] == 27


def test_properness_ut_backend_pigeonhole():
    g = build_group("ut:dim=3,p=3")
    x, y = g.raw_generators()
    spec = progression_spec("nilpotent", 2, 2, (2, 2), g, [x, y])
    rep = verify_properness(spec)
    assert not rep.proper
    assert rep.cardinality <= 27 < 225 == rep.formal_box


def test_properness_degenerate_generator():
    rep = verify_properness(progression_spec("nilpotent", 2, 2, (1, 0)))
    assert rep.proper and rep.cardinality == 3


def test_non_nilpotent_backend_rejected():
    g = build_group("symfp:n=3,p=7")
    gens = g.raw_generators()[:2]
    with pytest.raises(ValueError):
        progression_spec("nilprogression", 2, 2, (1, 1), g, gens)


# ---------------------------------------------------------------------------
# Power laws
# ---------------------------------------------------------------------------


def test_power_law_degenerate_n1():
    rep = verify_power_laws(2, 2, (1, 1), 1)
    assert rep.power_containment_holds and rep.minimal_power_m == 1


def test_power_law_cover_certificate():
    rep = verify_power_laws(2, 2, (1, 1), 2, M=2)
    assert rep.power_containment_holds
    assert rep.cover_verified and rep.cover_size >= 1
    assert rep.minimal_power_m is not None


def test_nilprogression_cube_ratio_blowup():
    """The tripling ratio of the rank-2 nilprogression grows with the long side."""
    g = FreeNilpotentGroup(2, 2)
    ratios = []
    for L in (1, 2, 3, 4):
        spec = progression_spec("nilprogression", 2, 2, (L, 1), g)
        pset = enumerate_progression(spec)
        current = {g.encode(x): x for x in pset.elements}
        base = current
        for _ in range(2):
            nxt = {}
            for a in current.values():
                for b in base.values():
                    c = g.mul(a, b)
                    nxt[g.encode(c)] = c
            current = nxt
        ratios.append(len(current) / pset.cardinality)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


# ---------------------------------------------------------------------------
# Commutator depth
# ---------------------------------------------------------------------------


def test_commutator_depth_unitriangular():
    g = build_group("ut:dim=3,p=11")
    x, y = g.raw_generators()
    pset = enumerate_progression(progression_spec("nilprogression", 2, 2, (1, 1), g, [x, y]))
    rep = commutator_depth(g, pset)
    assert rep.commutator_order == 11  # the derived subgroup is the center
    assert rep.m <= 10 * rep.gamma**0.5


def test_commutator_depth_abelian_is_zero():
    g = build_group("abelian:4,9")
    gens = g.raw_generators()
    pset = enumerate_progression(progression_spec("nilprogression", 2, 1, (1, 1), g, gens))
    rep = commutator_depth(g, pset)
    assert rep.m == 0 and rep.commutator_order == 1
