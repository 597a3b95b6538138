"""Element backends, spec parsing, canonical encodings, Schreier generators."""

import random

import pytest
import sympy

from cayleylab.groups import (
    FreeNilpotentGroup,
    OracleError,
    ResourceRefusal,
    SpecSemanticError,
    SpecSyntaxError,
    SubgroupOracle,
    build_group,
    commutator,
    parse_group_spec,
    power,
    reidemeister_schreier,
    symmetrize,
)
from cayleylab.growth import enumerate_ball
from cayleylab.nilprog import hall_basis


# ---------------------------------------------------------------------------
# Spec grammar
# ---------------------------------------------------------------------------


def test_parse_basic_specs():
    assert parse_group_spec("cyclic:12").param("n") == 12
    spec = parse_group_spec("symfp:n=4,p=5,variant=G")
    assert (spec.param("n"), spec.param("p"), spec.variant) == (4, 5, "G")
    assert parse_group_spec("freenil:r=2,s=4").param("s") == 4
    assert parse_group_spec("abelian:4,4,9").param_list("moduli") == (4, 4, 9)
    assert parse_group_spec("ut:dim=3,p=7").param("dim") == 3


def test_heis_alias():
    spec = parse_group_spec("heis:7")
    assert spec.family == "ut" and spec.param("dim") == 3 and spec.param("p") == 7


def test_parse_product():
    spec = parse_group_spec("product(lamplighter:3)x(cyclic:8)")
    assert spec.family == "product"
    assert spec.factors[0].family == "lamplighter"
    assert spec.factors[1].param("n") == 8


def test_parse_syntax_error_carries_offset():
    with pytest.raises(SpecSyntaxError) as err:
        parse_group_spec("cyclic:x")
    assert err.value.offset == 7
    with pytest.raises(SpecSyntaxError):
        parse_group_spec("nosuchfamily:3")


def test_parse_semantic_errors():
    with pytest.raises(SpecSemanticError):
        parse_group_spec("ut:dim=3,p=6")  # composite where prime required
    with pytest.raises(SpecSemanticError):
        parse_group_spec("symfp:n=5,p=5")  # needs p > n
    with pytest.raises(SpecSemanticError):
        parse_group_spec("cyclic:0")
    with pytest.raises(SpecSemanticError):
        parse_group_spec("cyclic:n=3,variant=G")


def test_order_cap_refusal():
    with pytest.raises(ResourceRefusal):
        build_group("cyclic:20000000")
    assert build_group("cyclic:20000000", cap=10**8).order == 20000000


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


def test_cyclic_arithmetic():
    g = build_group("cyclic:12")
    assert g.mul(7, 8) == 3
    assert g.inv(5) == 7
    assert g.encode(g.identity()) == (0).to_bytes(8, "little")


def test_lamplighter_order_and_generators():
    g = build_group("lamplighter:3")
    assert g.order == 3 * 2**3 == 24
    s = g.generating_set()
    # identity, move, move inverse, switch (an involution)
    assert s.k == 4
    switch = (0, (1, 0, 0))
    assert g.mul(switch, switch) == g.identity()


def test_symfp_generating_set_count():
    # identity, long cycle and inverse, transposition (involution), vector and inverse
    g = build_group("symfp:n=3,p=7")
    assert g.order == 6 * 343
    assert g.generating_set().k == 6
    raw = g.raw_generators()
    assert len(raw) == 3


def test_product_generating_set_is_cartesian():
    g = build_group("product(lamplighter:3)x(cyclic:8)")
    assert g.order == 24 * 8
    assert g.generating_set().k == 4 * 3


def test_symmetrize_examples():
    g = build_group("cyclic:12")
    s = symmetrize(g, [1])
    assert set(s.elements) == {0, 1, 11} and s.k == 3
    again = symmetrize(g, list(s.elements))
    assert again.elements == s.elements  # idempotent fixed point
    assert s.contains_identity


def test_generating_set_rejects_bad_sets():
    from cayleylab.groups import GeneratingSet

    g = build_group("cyclic:12")
    with pytest.raises(ValueError):
        GeneratingSet(g, (0, 1), (g.encode(0), g.encode(1)))  # no inverse of 1


# ---------------------------------------------------------------------------
# Truncated-polynomial model against an independent symbolic expansion
# ---------------------------------------------------------------------------


def _payload_to_sympy(payload, letters):
    expr = sympy.Integer(0)
    for word, coeff in payload:
        mon = sympy.Integer(1)
        for i in word:
            mon = mon * letters[i]
        expr = expr + coeff * mon
    return sympy.expand(expr)


def _truncate(expr, letters, s):
    expr = sympy.expand(expr)
    out = sympy.Integer(0)
    for term in expr.as_ordered_terms():
        degree = 0
        for factor in term.as_ordered_factors():
            base, exp = factor.as_base_exp()
            if base in letters:
                degree += int(exp)
        if degree <= s:
            out = out + term
    return sympy.expand(out)


@pytest.mark.parametrize("s", [2, 3])
def test_freenil_products_match_symbolic_expansion(s):
    g = FreeNilpotentGroup(2, s)
    x, y = g.raw_generators()
    letters = sympy.symbols("X1 X2", commutative=False)
    sym_gens = [1 + letters[0], 1 + letters[1]]
    rng = random.Random(7)
    for _ in range(25):
        word = [rng.randrange(2) for _ in range(rng.randint(1, 5))]
        ours = g.identity()
        theirs = sympy.Integer(1)
        for i in word:
            ours = g.mul(ours, (x, y)[i])
            theirs = _truncate(theirs * sym_gens[i], letters, s)
        assert sympy.expand(_payload_to_sympy(ours, letters) - theirs) == 0


def test_freenil_basic_products():
    g = FreeNilpotentGroup(2, 2)
    x, y = g.raw_generators()
    assert g.mul(x, y) == (((), 1), ((0,), 1), ((1,), 1), ((0, 1), 1))
    c = commutator(g, x, y)
    assert c == (((), 1), ((0, 1), 1), ((1, 0), -1))  # 1 + X1 X2 - X2 X1


def test_freenil_encode_roundtrip_large_coefficients():
    g = FreeNilpotentGroup(2, 3)
    x, _ = g.raw_generators()
    big = power(g, x, 2**70)
    assert dict(big)[(0,)] == 2**70
    assert g.decode(g.encode(big)) == big


def test_freenil_encode_roundtrip_random_words():
    g = FreeNilpotentGroup(2, 3)
    x, y = g.raw_generators()
    steps = [x, y, g.inv(x), g.inv(y)]
    rng = random.Random(11)
    for _ in range(50):
        elem = g.identity()
        for _ in range(rng.randint(1, 40)):
            elem = g.mul(elem, rng.choice(steps))
        assert g.decode(g.encode(elem)) == elem


@pytest.mark.parametrize("r,s", [(2, 2), (2, 3)])
def test_freenil_normal_forms_distinct(r, s):
    """Hall-basis normal forms with small exponents are pairwise distinct."""
    g = FreeNilpotentGroup(r, s)
    gens = g.raw_generators()
    basis = hall_basis(r, s).evaluate(g, gens)
    seen = set()
    exponents = [-2, -1, 0, 1, 2]

    def rec(idx, acc):
        if idx == len(basis):
            seen.add(g.encode(acc))
            return
        for e in exponents:
            rec(idx + 1, g.mul(acc, power(g, basis[idx], e)))

    rec(0, g.identity())
    assert len(seen) == len(exponents) ** len(basis)


# ---------------------------------------------------------------------------
# Random algebraic properties (pool-sampled triples)
# ---------------------------------------------------------------------------

BACKENDS = [
    "cyclic:12",
    "abelian:4,4,9",
    "ut:dim=3,p=7",
    "lamplighter:4",
    "symfp:n=3,p=7",
    "freenil:r=2,s=3",
    "product(cyclic:6)x(cyclic:10)",
]


def _random_pool(group, size, seed):
    rng = random.Random(seed)
    gens = group.generating_set().elements
    pool = []
    for _ in range(size):
        x = group.identity()
        for _ in range(rng.randint(0, 10)):
            x = group.mul(x, rng.choice(gens))
        pool.append(x)
    return pool


@pytest.mark.parametrize("spec", BACKENDS)
def test_associativity_and_inverses(spec):
    group = build_group(spec)
    pool = _random_pool(group, 100, seed=13)
    rng = random.Random(29)
    for _ in range(10**4):
        a, b, c = (rng.choice(pool) for _ in range(3))
        left = group.mul(group.mul(a, b), c)
        right = group.mul(a, group.mul(b, c))
        assert group.encode(left) == group.encode(right)
    for _ in range(10**4):
        g = rng.choice(pool)
        assert group.eq(group.mul(g, group.inv(g)), group.identity())


@pytest.mark.parametrize("spec", ["cyclic:30", "abelian:4,4,9", "ut:dim=3,p=5", "lamplighter:4"])
def test_encoding_injective_on_enumerated_ball(spec):
    group = build_group(spec)
    ball = enumerate_ball(group, group.generating_set())
    assert len(set(ball.codes)) == ball.size == group.order


# ---------------------------------------------------------------------------
# Reidemeister-Schreier
# ---------------------------------------------------------------------------


def test_rs_cyclic_index_three():
    g = build_group("cyclic:12")
    s = g.generating_set()
    sub = SubgroupOracle(lambda x: x % 3 == 0, name="3Z/12")
    res = reidemeister_schreier(g, s, sub)
    assert res.index == 3
    assert set(res.generators.elements) <= {0, 3, 9}
    # representatives lie in S^(d-1) = S^2
    assert all(t in {0, 1, 2, 10, 11} for t in res.representatives)
    assert res.subgroup_size == 4


def test_rs_index_one_returns_s():
    g = build_group("cyclic:12")
    s = g.generating_set()
    res = reidemeister_schreier(g, s, SubgroupOracle(lambda x: True, name="G"))
    assert res.index == 1
    assert res.representatives == (0,)
    assert res.generators.elements == s.elements


def test_rs_symfp_index_two():
    gp = build_group("symfp:n=4,p=5,variant=Gprime")
    sp = gp.generating_set()
    gg = build_group("symfp:n=4,p=5,variant=G")
    oracle = SubgroupOracle(gg.contains, name="G_4", index_hint=2)
    res = reidemeister_schreier(gp, sp, oracle)
    assert res.index == 2
    assert all(gg.contains(x) for x in res.generators.elements)
    assert sp.k / 2 <= res.generators.k <= 2 * sp.k
    # S0 lands inside S^(2d-1) = S^3
    ball3 = enumerate_ball(gp, sp, max_radius=3)
    codes3 = set(ball3.codes)
    assert all(gp.encode(x) in codes3 for x in res.generators.elements)


def test_rs_rejects_inconsistent_oracle():
    g = build_group("cyclic:12")
    s = g.generating_set()
    bogus = SubgroupOracle(lambda x: x in (0, 1, 5), name="bogus")
    with pytest.raises(OracleError):
        reidemeister_schreier(g, s, bogus)
