"""Basic commutators, generalised commutators and the four progression models.

Formal commutators are nested tuples over letter indices: a leaf is an int in
[0, r) and a bracket is a pair (u, v) standing for [u, v] = u^-1 v^-1 u v.
The fixed total order on trees sorts by total weight, then weight vector
(lexicographically), then a structural encoding, so equal-weight-vector
entries are consecutive and lower weight always comes first.

Generalised commutators are trees with a sign in {+1,-1} attached to every
letter occurrence; brackets are formed only for canonical pairs whose first
argument is strictly later in the tree order (the reversed bracket is the
groupwise inverse, which symmetric exponent ranges already cover), and
formally trivial brackets on equal shapes are dropped.  This keeps the list
minimal: rank 2 step 2 gives x1, x2 and the four sign variants of [x2, x1].

Enumeration of progressions is extensional: sets of group elements keyed on
canonical bytes, built by iterated set products (for exponent-box kinds) or
by budgeted word search (for nilprogressions).  Verification of containments
and power laws is exhaustive set comparison, never symbolic collection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .groups import FreeNilpotentGroup, GeneratingSet, Group, ResourceRefusal, commutator
from .growth import enumerate_ball

__all__ = [
    "HallBasis",
    "hall_basis",
    "GenCommutator",
    "GenCommutatorList",
    "generalised_commutators",
    "ProgressionSpec",
    "ProgressionSet",
    "progression_spec",
    "enumerate_progression",
    "NestingReport",
    "verify_nesting",
    "PropernessReport",
    "verify_properness",
    "PowerLawReport",
    "verify_power_laws",
    "CommutatorDepthReport",
    "commutator_depth",
    "weight_vector",
    "PROGRESSION_WORK_CAP",
    "HALL_SIZE_CAP",
]

PROGRESSION_WORK_CAP = 10**7
HALL_SIZE_CAP = 10**4

KINDS = ("ordered", "nilprogression", "nilpotent", "nilcomplete")


# ---------------------------------------------------------------------------
# Commutator trees
# ---------------------------------------------------------------------------


def weight_vector(tree, r: int) -> tuple[int, ...]:
    if isinstance(tree, int):
        out = [0] * r
        out[tree] = 1
        return tuple(out)
    left = weight_vector(tree[0], r)
    right = weight_vector(tree[1], r)
    return tuple(a + b for a, b in zip(left, right))


def total_weight(tree) -> int:
    if isinstance(tree, int):
        return 1
    return total_weight(tree[0]) + total_weight(tree[1])


def tree_text(tree) -> str:
    if isinstance(tree, int):
        return f"x{tree + 1}"
    return f"[{tree_text(tree[0])},{tree_text(tree[1])}]"


def tree_key(tree, r: int) -> tuple:
    # weight vectors compare colexicographically so that x1 < x2 < ... < xr
    return (total_weight(tree), tuple(reversed(weight_vector(tree, r))), tree_text(tree))


def leaves(tree) -> list[int]:
    if isinstance(tree, int):
        return [tree]
    return leaves(tree[0]) + leaves(tree[1])


def evaluate_tree(group: Group, gens: list, tree):
    if isinstance(tree, int):
        return gens[tree]
    return commutator(group, evaluate_tree(group, gens, tree[0]), evaluate_tree(group, gens, tree[1]))


@dataclass(frozen=True)
class HallBasis:
    """Ordered basic commutators of total weight <= s on r letters."""

    r: int
    s: int
    commutators: tuple
    weights: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.commutators)

    def weight_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.commutators:
            w = total_weight(c)
            out[w] = out.get(w, 0) + 1
        return out

    def evaluate(self, group: Group, gens: list) -> list:
        return [evaluate_tree(group, gens, c) for c in self.commutators]

    def texts(self) -> list[str]:
        return [tree_text(c) for c in self.commutators]


def hall_basis(r: int, s: int, size_cap: int = HALL_SIZE_CAP) -> HallBasis:
    """Basic commutators under the recursion: [u, v] is basic when u, v are
    basic, v comes strictly before u, and the right component of a bracket u
    does not come after v."""
    if r < 1 or s < 1:
        raise ValueError("need r >= 1 and s >= 1")
    basics: list = list(range(r))
    by_weight: dict[int, list] = {1: list(range(r))}
    for w in range(2, s + 1):
        layer = []
        for wu in range(1, w):
            wv = w - wu
            for u in by_weight.get(wu, ()):
                ku = tree_key(u, r)
                for v in by_weight.get(wv, ()):
                    if tree_key(v, r) >= ku:
                        continue
                    if not isinstance(u, int) and tree_key(u[1], r) > tree_key(v, r):
                        continue
                    layer.append((u, v))
        layer.sort(key=lambda t: tree_key(t, r))
        by_weight[w] = layer
        basics.extend(layer)
        if len(basics) > size_cap:
            raise ResourceRefusal(f"Hall basis for (r={r}, s={s}) exceeds {size_cap} entries")
    basics.sort(key=lambda t: tree_key(t, r))
    return HallBasis(r, s, tuple(basics), tuple(weight_vector(c, r) for c in basics))


# ---------------------------------------------------------------------------
# Generalised commutators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenCommutator:
    """Commutator shape with one sign per letter occurrence (left-to-right)."""

    shape: object
    signs: tuple[int, ...]

    def weight_vector(self, r: int) -> tuple[int, ...]:
        return weight_vector(self.shape, r)

    def text(self) -> str:
        it = iter(self.signs)

        def go(tree) -> str:
            if isinstance(tree, int):
                eps = next(it)
                return f"x{tree + 1}" + ("" if eps == 1 else "^-1")
            return f"[{go(tree[0])},{go(tree[1])}]"

        return go(self.shape)

    def evaluate(self, group: Group, gens: list):
        it = iter(self.signs)

        def go(tree):
            if isinstance(tree, int):
                eps = next(it)
                g = gens[tree]
                return g if eps == 1 else group.inv(g)
            return commutator(group, go(tree[0]), go(tree[1]))

        return go(self.shape)


@dataclass(frozen=True)
class GenCommutatorList:
    """Ordered generalised commutators of total weight <= s, sign variants consecutive."""

    r: int
    s: int
    entries: tuple[GenCommutator, ...]
    convention: str = "leaf-signed; canonical first-argument-major pairs; trivial brackets dropped"

    @property
    def size(self) -> int:
        return len(self.entries)

    def evaluate(self, group: Group, gens: list) -> list:
        return [e.evaluate(group, gens) for e in self.entries]


def _gen_shapes(r: int, s: int, size_cap: int) -> list:
    shapes: list = list(range(r))
    by_weight: dict[int, list] = {1: list(range(r))}
    for w in range(2, s + 1):
        layer = []
        for wu in range(1, w):
            wv = w - wu
            for u in by_weight.get(wu, ()):
                ku = tree_key(u, r)
                for v in by_weight.get(wv, ()):
                    if tree_key(v, r) >= ku:
                        continue
                    layer.append((u, v))
        layer.sort(key=lambda t: tree_key(t, r))
        by_weight[w] = layer
        shapes.extend(layer)
        if len(shapes) > size_cap:
            raise ResourceRefusal(f"generalised commutators for (r={r}, s={s}) exceed {size_cap} shapes")
    shapes.sort(key=lambda t: tree_key(t, r))
    return shapes


def generalised_commutators(r: int, s: int, size_cap: int = HALL_SIZE_CAP) -> GenCommutatorList:
    if r < 1 or s < 1:
        raise ValueError("need r >= 1 and s >= 1")
    entries: list[GenCommutator] = []
    total = 0
    for shape in _gen_shapes(r, s, size_cap):
        nleaves = total_weight(shape)
        if isinstance(shape, int):
            variants = [(1,)]
        else:
            variants = []
            for mask in range(1 << nleaves):
                signs = tuple(1 if not (mask >> i) & 1 else -1 for i in range(nleaves))
                variants.append(signs)
            variants.sort(key=lambda sg: tuple(0 if e == 1 else 1 for e in sg))
        for signs in variants:
            entries.append(GenCommutator(shape, signs))
        total += len(variants)
        if total > size_cap:
            raise ResourceRefusal(f"generalised commutators for (r={r}, s={s}) exceed {size_cap} entries")
    return GenCommutatorList(r, s, tuple(entries))


# ---------------------------------------------------------------------------
# Progressions
# ---------------------------------------------------------------------------


def _l_chi(L: tuple[int, ...], chi: tuple[int, ...]) -> int:
    out = 1
    for base, exp in zip(L, chi):
        out *= base**exp
    return out


class _WorkMeter:
    """Accumulated group-multiplication budget; refuses instead of approximating."""

    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def charge(self, amount: int) -> None:
        self.used += amount
        if self.used > self.cap:
            raise ResourceRefusal(f"progression enumeration exceeds work cap {self.cap}")


@dataclass(frozen=True)
class ProgressionSpec:
    """One of the four progression models over given generators and side lengths."""

    kind: str
    r: int
    s: int
    L: tuple[int, ...]
    group: Group
    generators: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if len(self.L) != self.r or len(self.generators) != self.r:
            raise ValueError("rank mismatch between L and generators")
        if any(l < 0 for l in self.L):
            raise ValueError("side lengths must be nonnegative")


def progression_spec(
    kind: str,
    r: int,
    s: int,
    L: tuple[int, ...],
    group: Optional[Group] = None,
    generators: Optional[list] = None,
) -> ProgressionSpec:
    """Spec with the free-nilpotent backend (exact model) as the default."""
    if group is None:
        group = FreeNilpotentGroup(r, s)
    if generators is None:
        generators = group.raw_generators()[:r]
    spec = ProgressionSpec(kind, r, s, tuple(L), group, tuple(generators))
    _assert_nilpotent_generators(spec)
    return spec


def _assert_nilpotent_generators(spec: ProgressionSpec) -> None:
    """Finite backends: all (s+1)-fold left-normed commutators on generators vanish."""
    g = spec.group
    if isinstance(g, FreeNilpotentGroup):
        return
    if g.order is None:
        return
    r, s = spec.r, spec.s
    if r ** (s + 1) > 4096:
        return
    ident = g.encode(g.identity())
    current = list(spec.generators)
    for _ in range(s):
        nxt = []
        for c in current:
            for x in spec.generators:
                nxt.append(commutator(g, c, x))
        current = nxt
    for c in current:
        if g.encode(c) != ident:
            raise ValueError("generators do not generate an s-step nilpotent subgroup")


@dataclass(frozen=True)
class ProgressionSet:
    """Deduplicated element set of a progression, with its formal exponent box."""

    spec: ProgressionSpec
    elements: tuple
    codes: frozenset
    formal_box: Optional[int]
    convention: str = ""

    @property
    def cardinality(self) -> int:
        return len(self.elements)

    @property
    def proper(self) -> Optional[bool]:
        if self.spec.kind != "nilpotent" or self.formal_box is None:
            return None
        return self.cardinality == self.formal_box

    def contains_set(self, other: "ProgressionSet") -> bool:
        return other.codes <= self.codes

    def to_dict(self) -> dict:
        out = {
            "kind": self.spec.kind,
            "r": self.spec.r,
            "s": self.spec.s,
            "L": list(self.spec.L),
            "cardinality": self.cardinality,
            "formal_box": self.formal_box,
        }
        if self.spec.kind == "nilpotent":
            out["proper"] = self.proper
        if self.convention:
            out["convention"] = self.convention
        return out


def _elem_dict(group: Group, payloads) -> dict[bytes, object]:
    return {group.encode(x): x for x in payloads}


def _set_product(group: Group, A: dict, B: dict, meter: _WorkMeter) -> dict:
    meter.charge(len(A) * len(B))
    out: dict[bytes, object] = {}
    mul, enc = group.mul, group.encode
    for a in A.values():
        for b in B.values():
            c = mul(a, b)
            out[enc(c)] = c
    return out


def _power_range(group: Group, x, bound: int, meter: _WorkMeter) -> dict:
    """{x^l : |l| <= bound} as a code-keyed dict."""
    meter.charge(2 * bound + 1)
    out = {group.encode(group.identity()): group.identity()}
    cur = group.identity()
    for _ in range(bound):
        cur = group.mul(cur, x)
        out[group.encode(cur)] = cur
    cur = group.identity()
    xi = group.inv(x)
    for _ in range(bound):
        cur = group.mul(cur, xi)
        out[group.encode(cur)] = cur
    return out


def _ordered_product(group: Group, factors: list[tuple[object, int]], meter: _WorkMeter) -> dict:
    """Set of products y_1^{l_1} ... y_t^{l_t} with |l_i| <= bound_i, right-to-left."""
    acc: Optional[dict] = None
    for y, bound in reversed(factors):
        powers = _power_range(group, y, bound, meter)
        acc = powers if acc is None else _set_product(group, powers, acc, meter)
    if acc is None:
        acc = _elem_dict(group, [group.identity()])
    return acc


def _factors_for(spec: ProgressionSpec) -> tuple[list[tuple[object, int]], Optional[int], str]:
    group, gens, L = spec.group, list(spec.generators), spec.L
    if spec.kind == "ordered":
        factors = [(gens[i], L[i]) for i in range(spec.r)]
        convention = ""
    elif spec.kind == "nilpotent":
        basis = hall_basis(spec.r, spec.s)
        values = basis.evaluate(group, gens)
        factors = [(v, _l_chi(L, chi)) for v, chi in zip(values, basis.weights)]
        convention = ""
    elif spec.kind == "nilcomplete":
        gc = generalised_commutators(spec.r, spec.s)
        values = gc.evaluate(group, gens)
        factors = [(v, _l_chi(L, e.weight_vector(spec.r))) for v, e in zip(values, gc.entries)]
        convention = gc.convention
    else:
        raise ValueError(spec.kind)
    box = math.prod(2 * b + 1 for _, b in factors)
    return factors, box, convention


def enumerate_progression(spec: ProgressionSpec, workers: int = 1, work_cap: int = PROGRESSION_WORK_CAP) -> ProgressionSet:
    """Exact element set of the progression, deduplicated on canonical bytes."""
    group = spec.group
    meter = _WorkMeter(work_cap)
    if spec.kind == "nilprogression":
        out = _enumerate_words(spec, meter, workers)
        items = sorted(out.items())
        return ProgressionSet(spec, tuple(v for _, v in items), frozenset(out), None)
    factors, box, convention = _factors_for(spec)
    out = _ordered_product(group, factors, meter)
    items = sorted(out.items())
    return ProgressionSet(spec, tuple(v for _, v in items), frozenset(out), box, convention)


def _enumerate_words(spec: ProgressionSpec, meter: _WorkMeter, workers: int = 1) -> dict:
    """All words over the x_i and inverses with per-letter budgets, evaluated and deduped."""
    group = spec.group
    gens = list(spec.generators)
    inv_gens = [group.inv(x) for x in gens]
    out: dict[bytes, object] = {group.encode(group.identity()): group.identity()}

    def dfs(current, budgets: list[int]):
        for i in range(spec.r):
            if budgets[i] == 0:
                continue
            budgets[i] -= 1
            for step in (gens[i], inv_gens[i]):
                meter.charge(1)
                nxt = group.mul(current, step)
                out[group.encode(nxt)] = nxt
                dfs(nxt, budgets)
            budgets[i] += 1

    dfs(group.identity(), list(spec.L))
    return out


# ---------------------------------------------------------------------------
# Verifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Containment:
    lhs: str
    rhs: str
    holds: bool
    counterexample: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _check_containment(group: Group, small: ProgressionSet, big: ProgressionSet, lhs: str, rhs: str) -> Containment:
    missing = small.codes - big.codes
    if not missing:
        return Containment(lhs, rhs, True)
    code = min(missing)
    payload = next(x for x in small.elements if group.encode(x) == code)
    return Containment(lhs, rhs, False, group.describe(payload))


@dataclass(frozen=True)
class NestingReport:
    r: int
    s: int
    L: tuple[int, ...]
    cardinalities: dict[str, int]
    containments: tuple[Containment, ...]
    convention: str

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.containments)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "L": list(self.L),
            "cardinalities": dict(self.cardinalities),
            "containments": [c.to_dict() for c in self.containments],
            "convention": self.convention,
            "holds": self.holds,
        }


def verify_nesting(
    r: int,
    s: int,
    L: tuple[int, ...],
    group: Optional[Group] = None,
    generators: Optional[list] = None,
    workers: int = 1,
    work_cap: int = PROGRESSION_WORK_CAP,
) -> NestingReport:
    """Exhaustive check of ordered <= nilprogression <= nilpotent <= nilcomplete."""
    sets = {}
    for kind in KINDS:
        spec = progression_spec(kind, r, s, tuple(L), group, generators)
        sets[kind] = enumerate_progression(spec, workers=workers, work_cap=work_cap)
    g = sets["ordered"].spec.group
    chain = [
        _check_containment(g, sets["ordered"], sets["nilprogression"], "ordered", "nilprogression"),
        _check_containment(g, sets["nilprogression"], sets["nilpotent"], "nilprogression", "nilpotent"),
        _check_containment(g, sets["nilpotent"], sets["nilcomplete"], "nilpotent", "nilcomplete"),
    ]
    return NestingReport(
        r,
        s,
        tuple(L),
        {kind: sets[kind].cardinality for kind in KINDS},
        tuple(chain),
        sets["nilcomplete"].convention,
    )


@dataclass(frozen=True)
class PropernessReport:
    r: int
    s: int
    L: tuple[int, ...]
    cardinality: int
    formal_box: int
    proper: bool

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "L": list(self.L),
            "cardinality": self.cardinality,
            "formal_box": self.formal_box,
            "proper": self.proper,
        }


def verify_properness(spec: ProgressionSpec, workers: int = 1, work_cap: int = PROGRESSION_WORK_CAP) -> PropernessReport:
    """Compare |P| with the product of (2 L^chi + 1) over the basic commutators."""
    if spec.kind != "nilpotent":
        raise ValueError("properness is defined for the nilpotent kind")
    pset = enumerate_progression(spec, workers=workers, work_cap=work_cap)
    return PropernessReport(spec.r, spec.s, spec.L, pset.cardinality, pset.formal_box, pset.proper)


@dataclass(frozen=True)
class PowerLawReport:
    r: int
    s: int
    L: tuple[int, ...]
    n: int
    M: int
    power_containment_holds: bool
    minimal_power_m: Optional[int]
    cover_size: Optional[int]
    cover_verified: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "L": list(self.L),
            "n": self.n,
            "M": self.M,
            "power_containment_holds": self.power_containment_holds,
            "minimal_power_m": self.minimal_power_m,
            "cover_size": self.cover_size,
            "cover_verified": self.cover_verified,
        }


def verify_power_laws(
    r: int,
    s: int,
    L: tuple[int, ...],
    n: int,
    M: Optional[int] = None,
    group: Optional[Group] = None,
    generators: Optional[list] = None,
    work_cap: int = PROGRESSION_WORK_CAP,
    max_power: int = 64,
    with_min_power: bool = True,
) -> PowerLawReport:
    """Power laws for the complete progression: asserts P(L)^n inside P(nL) exactly,
    reports the minimal m with P(nL) inside P(L)^m, and a greedy translate cover
    of P(ML) by P(L) with a verified certificate."""
    base_spec = progression_spec("nilcomplete", r, s, tuple(L), group, generators)
    g = base_spec.group
    base = enumerate_progression(base_spec, work_cap=work_cap)
    nL = tuple(n * l for l in L)
    dilated = enumerate_progression(progression_spec("nilcomplete", r, s, nL, group, generators), work_cap=work_cap)
    base_dict = {g.encode(x): x for x in base.elements}

    def grow_powers(stop_when_covers: Optional[frozenset], up_to: int, meter: _WorkMeter):
        """Frontier-style powers of the base set; returns (known, m reached, m covering)."""
        known = dict(base_dict)
        frontier = dict(base_dict)
        m = 1
        covering = 1 if (stop_when_covers is not None and stop_when_covers <= set(known)) else None
        while m < up_to and covering is None and frontier:
            meter.charge(len(frontier) * len(base_dict))
            new: dict[bytes, object] = {}
            for a in frontier.values():
                for b in base_dict.values():
                    c = g.mul(a, b)
                    code = g.encode(c)
                    if code not in known and code not in new:
                        new[code] = c
            known.update(new)
            frontier = new
            m += 1
            if stop_when_covers is not None and stop_when_covers <= set(known):
                covering = m
        return known, m, covering

    # part (2), asserted exactly: the n-th power stays inside the dilate
    power_known, _, _ = grow_powers(None, n, _WorkMeter(work_cap))
    holds = set(power_known) <= dilated.codes

    # part (1), reported: minimal m with the dilate inside the m-th power
    minimal_m = None
    if with_min_power:
        _, _, minimal_m = grow_powers(dilated.codes, max_power, _WorkMeter(work_cap))

    # part (3), reported with a verified greedy-cover certificate
    cover_size = None
    cover_verified = None
    if M is not None:
        meter = _WorkMeter(work_cap)
        ML = tuple(M * l for l in L)
        target = enumerate_progression(progression_spec("nilcomplete", r, s, ML, group, generators), work_cap=work_cap)
        covered: set[bytes] = set()
        translates: list = []
        for z in target.elements:  # canonical order
            zc = g.encode(z)
            if zc in covered:
                continue
            translates.append(z)
            meter.charge(len(base_dict))
            for p in base_dict.values():
                covered.add(g.encode(g.mul(p, z)))
        cover_size = len(translates)
        cover_verified = target.codes <= covered
    return PowerLawReport(r, s, tuple(L), n, M, holds, minimal_m, cover_size, cover_verified)


# ---------------------------------------------------------------------------
# Commutator subgroup depth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommutatorDepthReport:
    m: int
    gamma: int
    commutator_order: int
    group_order: int

    @property
    def ratio(self) -> float:
        return self.m / math.sqrt(self.gamma) if self.gamma > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "gamma": self.gamma,
            "ratio": self.ratio,
            "commutator_order": self.commutator_order,
            "group_order": self.group_order,
        }


def _normal_closure(group: Group, seed: list, conjugators: list, size_cap: int = 10**6) -> dict:
    """Smallest subgroup containing seed and closed under the given conjugations."""
    elems: dict[bytes, object] = {group.encode(group.identity()): group.identity()}
    hgens: list = []
    gen_codes: set[bytes] = set()

    def add_gen(x) -> None:
        code = group.encode(x)
        if code not in gen_codes:
            gen_codes.add(code)
            hgens.append(x)

    for x in seed:
        add_gen(x)
        add_gen(group.inv(x))
    changed = True
    while changed:
        changed = False
        # close under products with the current generator list
        frontier = list(elems.values())
        while frontier:
            nxt = []
            for a in frontier:
                for h in hgens:
                    y = group.mul(a, h)
                    code = group.encode(y)
                    if code not in elems:
                        if len(elems) >= size_cap:
                            raise ResourceRefusal("normal closure exceeds size cap")
                        elems[code] = y
                        nxt.append(y)
            frontier = nxt
        # conjugation stability
        for h in list(elems.values()):
            for c in conjugators:
                y = group.mul(group.mul(group.inv(c), h), c)
                if group.encode(y) not in elems:
                    add_gen(y)
                    add_gen(group.inv(y))
                    changed = True
    return elems


def derived_subgroup(group: Group, generators: list, size_cap: int = 10**6) -> dict:
    """[G, G] as the normal closure of the generator commutators."""
    seed = []
    for a in generators:
        for b in generators:
            c = commutator(group, a, b)
            seed.append(c)
    return _normal_closure(group, seed, list(generators), size_cap)


def assert_nilpotent(group: Group, generators: list, max_class: int = 64) -> int:
    """Lower central series termination; returns the nilpotency class."""
    current = derived_subgroup(group, generators)
    ident = group.encode(group.identity())
    cls = 1
    while len(current) > 1:
        cls += 1
        if cls > max_class:
            raise ValueError("lower central series did not terminate: group is not nilpotent")
        seed = []
        for h in current.values():
            for x in generators:
                seed.append(commutator(group, h, x))
        current = _normal_closure(group, seed, list(generators))
    return cls


def commutator_depth(group: Group, pset: ProgressionSet, workers: int = 1) -> CommutatorDepthReport:
    """Minimal m with [G,G] inside P^m, where P generates the finite nilpotent G."""
    if group.order is None:
        raise ValueError("needs a finite group")
    generators = list(pset.spec.generators)
    assert_nilpotent(group, generators)
    comm = derived_subgroup(group, generators)

    # P must itself be symmetric with identity so that P^m is the BFS ball
    items = sorted((group.encode(x), x) for x in pset.elements)
    pgens = GeneratingSet(group, tuple(v for _, v in items), tuple(c for c, _ in items))

    ball = enumerate_ball(group, pgens, workers=workers)
    if ball.size != group.order:
        raise ValueError(f"progression generates a proper subgroup of order {ball.size}")
    dist = ball.distances()
    gamma = ball.radius
    m = max(dist[c] for c in comm)
    return CommutatorDepthReport(m, gamma, len(comm), group.order)
