"""Exact finite-group arithmetic: element backends, spec parsing, generating sets.

Every backend represents group elements as immutable Python values (ints,
tuples, nested tuples) and provides an injective, platform-independent byte
encoding.  All deduplication everywhere in the package is keyed on those
canonical bytes, never on structural equality, so heterogeneous backends share
one hash discipline.

Supported families: cyclic groups, products of cyclic groups, unitriangular
matrix groups over prime fields, lamplighter groups Z/M ltimes (Z/2)^M,
semidirect products Sym(n) ltimes F_p^n (with their sum-zero and alternating
subgroups), free nilpotent groups of given rank and step (modelled exactly as
units with constant term 1 in the degree-truncated free associative ring over
Z), and binary direct products of any of these.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

DEFAULT_ORDER_CAP = 1 << 24

__all__ = [
    "SpecSyntaxError",
    "SpecSemanticError",
    "ResourceRefusal",
    "OracleError",
    "GroupSpec",
    "parse_group_spec",
    "build_group",
    "Group",
    "GeneratingSet",
    "symmetrize",
    "SubgroupOracle",
    "RSResult",
    "reidemeister_schreier",
    "commutator",
    "conjugate",
    "power",
    "balanced_lift",
    "order_cap",
]


class SpecSyntaxError(ValueError):
    """Malformed group-spec string; carries the byte offset of the error."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SpecSemanticError(ValueError):
    """Well-formed spec with invalid parameters (composite prime, zero modulus...)."""


class ResourceRefusal(RuntimeError):
    """Requested object exceeds the configured enumeration cap."""


class OracleError(RuntimeError):
    """A SubgroupOracle contradicted itself (not closed under product/inverse)."""


def order_cap(override: Optional[int] = None) -> int:
    """Group-order cap: explicit override, else CAYLEY_LAB_CAP env, else 2**24."""
    if override is not None:
        return override
    env = os.environ.get("CAYLEY_LAB_CAP")
    return int(env) if env else DEFAULT_ORDER_CAP


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _enc_u64(values: Iterable[int]) -> bytes:
    return b"".join(v.to_bytes(8, "little") for v in values)


# ---------------------------------------------------------------------------
# Group-spec strings and their grammar
# ---------------------------------------------------------------------------

FAMILIES = ("cyclic", "abelian", "ut", "heis", "lamplighter", "symfp", "freenil")
SYMFP_VARIANTS = ("L", "Gprime", "G")


@dataclass(frozen=True)
class GroupSpec:
    """Validated description of a constructible group.

    ``family`` is one of FAMILIES or ``"product"``; ``params`` holds the
    family-specific integers; ``variant`` applies to symfp only; ``factors``
    holds the two sub-specs of a product.
    """

    family: str
    params: tuple[tuple[str, int], ...] = ()
    variant: Optional[str] = None
    factors: Optional[tuple["GroupSpec", "GroupSpec"]] = None

    def param(self, key: str) -> int:
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    def param_list(self, key: str) -> tuple[int, ...]:
        return tuple(v for k, v in self.params if k == key)

    def __str__(self) -> str:
        if self.family == "product":
            a, b = self.factors
            return f"product({a})x({b})"
        parts = [f"{k}={v}" for k, v in self.params]
        if self.variant is not None:
            parts.append(f"variant={self.variant}")
        return f"{self.family}:" + ",".join(parts)


_POSITIONAL = {
    "cyclic": ("n",),
    "ut": ("dim", "p"),
    "heis": ("p",),
    "lamplighter": ("m",),
    "symfp": ("n", "p"),
    "freenil": ("r", "s"),
}


def _parse_params(text: str, base: int, family: str) -> tuple[tuple[tuple[str, int], ...], Optional[str]]:
    if not text:
        raise SpecSyntaxError("empty parameter list", base)
    items = text.split(",")
    named = any("=" in it for it in items)
    params: list[tuple[str, int]] = []
    variant: Optional[str] = None
    if named:
        pos = base
        for it in items:
            if "=" not in it:
                raise SpecSyntaxError("expected key=value", pos)
            key, _, val = it.partition("=")
            if key == "variant":
                if val not in SYMFP_VARIANTS:
                    raise SpecSemanticError(f"unknown variant {val!r} (expected one of {SYMFP_VARIANTS})")
                variant = val
            else:
                if not val.isdigit():
                    raise SpecSyntaxError(f"expected integer value for {key!r}", pos + len(key) + 1)
                params.append((key, int(val)))
            pos += len(it) + 1
    else:
        pos = base
        values = []
        for it in items:
            if not it.isdigit():
                raise SpecSyntaxError("expected integer", pos)
            values.append(int(it))
            pos += len(it) + 1
        if family == "abelian":
            params = [("moduli", v) for v in values]
        else:
            keys = _POSITIONAL[family]
            if len(values) != len(keys):
                raise SpecSyntaxError(f"{family} takes {len(keys)} parameter(s), got {len(values)}", base)
            params = list(zip(keys, values))
    return tuple(params), variant


def _validate_spec(spec: GroupSpec) -> GroupSpec:
    fam = spec.family
    if fam == "product":
        return spec
    have = {k for k, _ in spec.params}
    if fam == "abelian":
        moduli = spec.param_list("moduli")
        if not moduli:
            raise SpecSemanticError("abelian needs at least one modulus")
        if any(m <= 0 for m in moduli):
            raise SpecSemanticError("zero or negative modulus")
        return spec
    required = set(_POSITIONAL[fam]) if fam != "heis" else {"p"}
    if have != required:
        raise SpecSemanticError(f"{fam} needs parameters {sorted(required)}, got {sorted(have)}")
    if any(v <= 0 for _, v in spec.params):
        raise SpecSemanticError("parameters must be positive")
    if fam == "cyclic" and spec.param("n") == 0:
        raise SpecSemanticError("zero modulus")
    if fam in ("ut", "heis"):
        p = spec.param("p")
        if not _is_prime(p):
            raise SpecSemanticError(f"p={p} must be prime")
        if fam == "ut" and spec.param("dim") < 2:
            raise SpecSemanticError("ut needs dim >= 2")
    if fam == "symfp":
        n, p = spec.param("n"), spec.param("p")
        if not _is_prime(p):
            raise SpecSemanticError(f"p={p} must be prime")
        if p <= n:
            raise SpecSemanticError(f"symfp requires p > n, got n={n}, p={p}")
        if n < 2:
            raise SpecSemanticError("symfp needs n >= 2")
    if fam == "freenil":
        if spec.param("r") < 1 or spec.param("s") < 1:
            raise SpecSemanticError("freenil requires r >= 1 and s >= 1")
    # heis is an alias for ut:dim=3
    if fam == "heis":
        return GroupSpec("ut", (("dim", 3), ("p", spec.param("p"))))
    return spec


def parse_group_spec(text: str) -> GroupSpec:
    """Parse a spec string (grammar: ``family:params`` or ``product(spec)x(spec)``)."""
    spec, end = _parse_spec_at(text, 0)
    if end != len(text):
        raise SpecSyntaxError("trailing characters after spec", end)
    return spec


def _parse_spec_at(text: str, base: int) -> tuple[GroupSpec, int]:
    rest = text[base:]
    if rest.startswith("product("):
        open1 = base + len("product(")
        a, mid = _parse_spec_at(text, open1)
        if not text[mid:].startswith(")x("):
            raise SpecSyntaxError("expected ')x(' in product spec", mid)
        b, end = _parse_spec_at(text, mid + 3)
        if not text[end:].startswith(")"):
            raise SpecSyntaxError("expected closing ')'", end)
        return GroupSpec("product", factors=(a, b)), end + 1
    colon = text.find(":", base)
    if colon < 0:
        raise SpecSyntaxError("expected 'family:params'", base)
    fam = text[base:colon]
    if fam not in FAMILIES:
        raise SpecSyntaxError(f"unknown family {fam!r}", base)
    # parameters run to the next unbalanced ')' (inside a product) or end
    end = colon + 1
    while end < len(text) and text[end] != ")":
        end += 1
    params, variant = _parse_params(text[colon + 1 : end], colon + 1, fam)
    if variant is not None and fam != "symfp":
        raise SpecSemanticError("variant only applies to symfp")
    if fam == "symfp" and variant is None:
        variant = "L"
    spec = GroupSpec(fam, params, variant)
    return _validate_spec(spec), end


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class Group:
    """Handle for one concrete group: identity/mul/inv plus canonical encoding.

    Immutable after construction; all operations are pure, so handles are safe
    to share across any number of workers.
    """

    name: str = "group"
    order: Optional[int] = None  # None means infinite (free nilpotent)

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def encode(self, a) -> bytes:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.encode(a) == self.encode(b)

    def raw_generators(self) -> list:
        """Family-default generators, before symmetrization."""
        raise NotImplementedError

    def generating_set(self) -> "GeneratingSet":
        return symmetrize(self, self.raw_generators())

    def describe(self, a) -> str:
        return repr(a)

    def __repr__(self) -> str:
        return f"<{self.name}>"


class CyclicGroup(Group):
    def __init__(self, n: int):
        if n <= 0:
            raise SpecSemanticError("zero modulus")
        self.n = n
        self.order = n
        self.name = f"cyclic:{n}"

    def identity(self):
        return 0

    def mul(self, a, b):
        return (a + b) % self.n

    def inv(self, a):
        return (-a) % self.n

    def encode(self, a) -> bytes:
        return _enc_u64((a,))

    def raw_generators(self):
        return [1 % self.n]

    def describe(self, a) -> str:
        return str(a)


class AbelianGroup(Group):
    def __init__(self, moduli: tuple[int, ...]):
        self.moduli = tuple(moduli)
        self.order = math.prod(self.moduli)
        self.name = "abelian:" + ",".join(map(str, self.moduli))

    def identity(self):
        return (0,) * len(self.moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def encode(self, a) -> bytes:
        return _enc_u64(a)

    def raw_generators(self):
        gens = []
        for i, m in enumerate(self.moduli):
            e = [0] * len(self.moduli)
            e[i] = 1 % m
            gens.append(tuple(e))
        return gens

    def describe(self, a) -> str:
        return "(" + ",".join(map(str, a)) + ")"


class UnitriangularGroup(Group):
    """Upper unitriangular dim x dim matrices over F_p.

    Payload: strictly-upper entries in row-major order ((0,1),(0,2),...).
    """

    def __init__(self, dim: int, p: int):
        self.dim = dim
        self.p = p
        self.order = p ** (dim * (dim - 1) // 2)
        self.name = f"ut:dim={dim},p={p}"
        self._pairs = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
        self._pos = {pair: idx for idx, pair in enumerate(self._pairs)}

    def identity(self):
        return (0,) * len(self._pairs)

    def mul(self, a, b):
        p, pos = self.p, self._pos
        out = []
        for i, j in self._pairs:
            v = a[pos[(i, j)]] + b[pos[(i, j)]]
            for k in range(i + 1, j):
                v += a[pos[(i, k)]] * b[pos[(k, j)]]
            out.append(v % p)
        return tuple(out)

    def inv(self, a):
        # Neumann series: (I + N)^-1 = I - N + N^2 - ... with N nilpotent
        p, pos = self.p, self._pos
        out = list(self.identity())
        # solve column by column: out = inverse entries; use that (A * out) = I
        for j in range(1, self.dim):
            for i in range(j - 1, -1, -1):
                v = -a[pos[(i, j)]]
                for k in range(i + 1, j):
                    v -= a[pos[(i, k)]] * out[pos[(k, j)]]
                out[pos[(i, j)]] = v % p
        return tuple(out)

    def encode(self, a) -> bytes:
        return _enc_u64(a)

    def raw_generators(self):
        gens = []
        for i in range(self.dim - 1):
            e = [0] * len(self._pairs)
            e[self._pos[(i, i + 1)]] = 1
            gens.append(tuple(e))
        return gens

    def describe(self, a) -> str:
        return "ut(" + ",".join(f"{i}{j}:{v}" for (i, j), v in zip(self._pairs, a)) + ")"


class LamplighterGroup(Group):
    """Z/M ltimes (Z/2)^M with cyclically permuted lamp coordinates.

    Payload: (position, lamps) with lamps a 0/1 tuple of length M.
    """

    def __init__(self, m: int):
        self.m = m
        self.order = m * (1 << m)
        self.name = f"lamplighter:{m}"

    def identity(self):
        return (0, (0,) * self.m)

    def mul(self, a, b):
        (pa, la), (pb, lb) = a, b
        m = self.m
        lamps = tuple((la[i] ^ lb[(i - pa) % m]) for i in range(m))
        return ((pa + pb) % m, lamps)

    def inv(self, a):
        pa, la = a
        m = self.m
        lamps = tuple(la[(i + pa) % m] for i in range(m))
        return ((-pa) % m, lamps)

    def encode(self, a) -> bytes:
        pa, la = a
        return _enc_u64((pa,) + la)

    def raw_generators(self):
        move = (1 % self.m, (0,) * self.m)
        switch = (0, (1,) + (0,) * (self.m - 1))
        return [move, switch]

    def describe(self, a) -> str:
        pa, la = a
        return f"(pos={pa}, lamps={''.join(map(str, la))})"


class SymFpGroup(Group):
    """Sym(n) ltimes F_p^n and its sum-zero / alternating subgroups.

    Payload: (perm, vec) with perm a tuple of images (0-based) and vec a tuple
    of residues mod p.  Variant "L" is the full semidirect product, "Gprime"
    restricts vec to coordinate-sum zero, and "G" additionally restricts perm
    to even permutations.  All three variants share the same payloads and
    multiplication, so elements move freely between them.
    """

    def __init__(self, n: int, p: int, variant: str = "L"):
        if variant not in SYMFP_VARIANTS:
            raise SpecSemanticError(f"unknown symfp variant {variant!r}")
        if p <= n:
            raise SpecSemanticError("symfp requires p > n")
        self.n = n
        self.p = p
        self.variant = variant
        full = math.factorial(n) * p**n
        if variant == "L":
            self.order = full
        elif variant == "Gprime":
            self.order = full // p
        else:
            self.order = full // (2 * p)
        self.name = f"symfp:n={n},p={p},variant={variant}"

    def identity(self):
        return (tuple(range(self.n)), (0,) * self.n)

    def mul(self, a, b):
        (sa, va), (sb, vb) = a, b
        p = self.p
        perm = tuple(sa[sb[i]] for i in range(self.n))
        vec = list(va)
        for i in range(self.n):
            vec[sa[i]] = (vec[sa[i]] + vb[i]) % p
        return (perm, tuple(vec))

    def inv(self, a):
        sa, va = a
        p = self.p
        inv_perm = [0] * self.n
        for i, img in enumerate(sa):
            inv_perm[img] = i
        vec = tuple((-va[sa[i]]) % p for i in range(self.n))
        return (tuple(inv_perm), vec)

    def encode(self, a) -> bytes:
        sa, va = a
        return _enc_u64(sa + va)

    def project_sum_zero(self, a):
        """Quotient by the central constant-vector subgroup, landing in Gprime."""
        sa, va = a
        p = self.p
        mean = (sum(va) * pow(self.n, -1, p)) % p
        return (sa, tuple((x - mean) % p for x in va))

    def contains(self, a) -> bool:
        sa, va = a
        if self.variant == "L":
            return True
        if sum(va) % self.p != 0:
            return False
        if self.variant == "Gprime":
            return True
        return _perm_sign(sa) == 1

    def raw_generators(self):
        n = self.n
        cycle = tuple((i + 1) % n for i in range(n))
        swap = tuple([1, 0] + list(range(2, n)))
        e1 = (1,) + (0,) * (n - 1)
        ident = tuple(range(n))
        tilde = [(cycle, (0,) * n), (swap, (0,) * n), (ident, e1)]
        if self.variant == "L":
            return tilde
        prime = [self.project_sum_zero(g) for g in tilde]
        if self.variant == "Gprime":
            return prime
        gp = SymFpGroup(self.n, self.p, "Gprime")
        sprime = symmetrize(gp, prime)
        oracle = SubgroupOracle(self.contains, name=self.name, index_hint=2)
        return list(reidemeister_schreier(gp, sprime, oracle).generators.elements)

    def describe(self, a) -> str:
        sa, va = a
        return f"(perm={list(sa)}, vec={list(va)})"


def _perm_sign(perm: tuple[int, ...]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class FreeNilpotentGroup(Group):
    """Free s-step nilpotent group of rank r, as truncated-polynomial units.

    Elements are units with constant term 1 in the quotient of the free
    associative ring Z<X_1..X_r> by words of length > s; the generators are
    1 + X_i.  Multiplication is truncated convolution and inversion is the
    terminating Neumann series, both exact over arbitrary-precision integers.
    Payload: tuple of (word, coeff) pairs sorted by (len(word), word), with
    word a tuple of letter indices and coeff a nonzero int; the empty word
    carries the constant term 1.
    """

    def __init__(self, r: int, s: int):
        if r < 1 or s < 1:
            raise SpecSemanticError("freenil requires r >= 1 and s >= 1")
        self.r = r
        self.s = s
        self.order = None
        self.name = f"freenil:r={r},s={s}"

    def identity(self):
        return (((), 1),)

    def _normalize(self, acc: dict) -> tuple:
        items = [(w, c) for w, c in acc.items() if c != 0]
        items.sort(key=lambda wc: (len(wc[0]), wc[0]))
        return tuple(items)

    def mul(self, a, b):
        s = self.s
        # terms are sorted by word length, so the admissible partners of a
        # degree-la term form a prefix of b; precompute the prefix cuts
        cuts = [0] * (s + 1)
        pos = 0
        for d in range(s + 1):
            while pos < len(b) and len(b[pos][0]) <= d:
                pos += 1
            cuts[d] = pos
        acc: dict = {}
        get = acc.get
        for wa, ca in a:
            for wb, cb in b[: cuts[s - len(wa)]]:
                w = wa + wb
                acc[w] = get(w, 0) + ca * cb
        return self._normalize(acc)

    def inv(self, a):
        # a = 1 + x with x supported on words of length >= 1:
        # a^-1 = 1 - x + x^2 - ... - (-x)^s, exact after truncation
        x = tuple((w, c) for w, c in a if w != ())
        neg_x = tuple((w, -c) for w, c in x)
        result = self.identity()
        term = self.identity()
        for _ in range(self.s):
            term = self.mul(term, neg_x)
            if not term:
                break
            acc = dict(result)
            for w, c in term:
                acc[w] = acc.get(w, 0) + c
            result = self._normalize(acc)
        return result

    _WLEN_CACHE = [n.to_bytes(2, "little") for n in range(64)]
    _COEFF_CACHE: dict = {}

    @classmethod
    def _coeff_bytes(cls, c: int) -> bytes:
        cached = cls._COEFF_CACHE.get(c)
        if cached is not None:
            return cached
        sign = 1 if c >= 0 else 0
        mag = abs(c)
        body = mag.to_bytes((mag.bit_length() + 7) // 8 or 1, "little")
        out = bytes([sign]) + len(body).to_bytes(4, "little") + body
        if -4096 <= c <= 4096:
            cls._COEFF_CACHE[c] = out
        return out

    def encode(self, a) -> bytes:
        wlen = self._WLEN_CACHE
        parts = [len(a).to_bytes(4, "little")]
        for w, c in a:
            parts.append(wlen[len(w)] if len(w) < 64 else len(w).to_bytes(2, "little"))
            parts.append(bytes(w))
            parts.append(self._coeff_bytes(c))
        return b"".join(parts)

    def decode(self, data: bytes):
        n = int.from_bytes(data[0:4], "little")
        pos = 4
        terms = []
        for _ in range(n):
            wl = int.from_bytes(data[pos : pos + 2], "little")
            pos += 2
            word = tuple(data[pos : pos + wl])
            pos += wl
            sign = data[pos]
            pos += 1
            bl = int.from_bytes(data[pos : pos + 4], "little")
            pos += 4
            mag = int.from_bytes(data[pos : pos + bl], "little")
            pos += bl
            terms.append((word, mag if sign else -mag))
        if pos != len(data):
            raise ValueError("trailing bytes in encoded element")
        return tuple(terms)

    def raw_generators(self):
        return [(((), 1), ((i,), 1)) for i in range(self.r)]

    def describe(self, a) -> str:
        if not a:
            return "0"
        pieces = []
        for w, c in a:
            mon = "*".join(f"X{i+1}" for i in w) if w else "1"
            if c == 1 and w:
                pieces.append(mon)
            elif c == -1 and w:
                pieces.append(f"-{mon}")
            else:
                pieces.append(f"{c}*{mon}" if w else str(c))
        out = pieces[0]
        for p in pieces[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


class ProductGroup(Group):
    def __init__(self, g1: Group, g2: Group):
        self.g1 = g1
        self.g2 = g2
        if g1.order is None or g2.order is None:
            self.order = None
        else:
            self.order = g1.order * g2.order
        self.name = f"product({g1.name})x({g2.name})"

    def identity(self):
        return (self.g1.identity(), self.g2.identity())

    def mul(self, a, b):
        return (self.g1.mul(a[0], b[0]), self.g2.mul(a[1], b[1]))

    def inv(self, a):
        return (self.g1.inv(a[0]), self.g2.inv(a[1]))

    def encode(self, a) -> bytes:
        e1 = self.g1.encode(a[0])
        e2 = self.g2.encode(a[1])
        return len(e1).to_bytes(4, "little") + e1 + e2

    def raw_generators(self):
        # the product generating set S1 x S2 over the symmetrized factors
        s1 = self.g1.generating_set()
        s2 = self.g2.generating_set()
        return [(a, b) for a in s1.elements for b in s2.elements]

    def describe(self, a) -> str:
        return f"({self.g1.describe(a[0])}, {self.g2.describe(a[1])})"


def build_group(spec: GroupSpec | str, cap: Optional[int] = None) -> Group:
    """Construct the group handle for a spec; refuses finite orders above the cap."""
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    fam = spec.family
    if fam == "product":
        g = ProductGroup(build_group(spec.factors[0], cap), build_group(spec.factors[1], cap))
    elif fam == "cyclic":
        g = CyclicGroup(spec.param("n"))
    elif fam == "abelian":
        g = AbelianGroup(spec.param_list("moduli"))
    elif fam in ("ut", "heis"):
        spec = _validate_spec(spec)
        g = UnitriangularGroup(spec.param("dim"), spec.param("p"))
    elif fam == "lamplighter":
        g = LamplighterGroup(spec.param("m"))
    elif fam == "symfp":
        g = SymFpGroup(spec.param("n"), spec.param("p"), spec.variant or "L")
    elif fam == "freenil":
        g = FreeNilpotentGroup(spec.param("r"), spec.param("s"))
    else:
        raise SpecSemanticError(f"unsupported family {fam!r}")
    limit = order_cap(cap)
    if g.order is not None and g.order > limit:
        raise ResourceRefusal(f"|{g.name}| = {g.order} exceeds cap {limit}")
    return g


# ---------------------------------------------------------------------------
# Generating sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratingSet:
    """Symmetric generating set containing the identity, in canonical-byte order."""

    group: Group
    elements: tuple
    codes: tuple[bytes, ...]

    @property
    def k(self) -> int:
        return len(self.elements)

    @property
    def contains_identity(self) -> bool:
        return self.group.encode(self.group.identity()) in set(self.codes)

    def __post_init__(self):
        seen = set(self.codes)
        if len(seen) != len(self.codes):
            raise ValueError("duplicate canonical encodings in generating set")
        g = self.group
        if g.encode(g.identity()) not in seen:
            raise ValueError("generating set must contain the identity")
        for x in self.elements:
            if g.encode(g.inv(x)) not in seen:
                raise ValueError("generating set must be closed under inversion")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def symmetrize(group: Group, raw: list) -> GeneratingSet:
    """Return raw plus inverses plus identity, deduplicated by canonical bytes."""
    if not raw:
        raise ValueError("empty generator list")
    pool: dict[bytes, object] = {group.encode(group.identity()): group.identity()}
    for x in raw:
        pool[group.encode(x)] = x
        xi = group.inv(x)
        pool[group.encode(xi)] = xi
    items = sorted(pool.items())
    return GeneratingSet(group, tuple(v for _, v in items), tuple(k for k, _ in items))


# ---------------------------------------------------------------------------
# Word helpers
# ---------------------------------------------------------------------------


def commutator(group: Group, a, b):
    """[a, b] = a^-1 b^-1 a b, matching the collecting identity vu = uv[v,u]."""
    return group.mul(group.mul(group.inv(a), group.inv(b)), group.mul(a, b))


def conjugate(group: Group, a, g):
    """g^-1 a g."""
    return group.mul(group.mul(group.inv(g), a), g)


def power(group: Group, a, n: int):
    if n < 0:
        return power(group, group.inv(a), -n)
    result = group.identity()
    base = a
    while n:
        if n & 1:
            result = group.mul(result, base)
        base = group.mul(base, base)
        n >>= 1
    return result


def balanced_lift(x: int, p: int) -> int:
    """Representative of x mod p in (-p/2, p/2]."""
    x %= p
    return x - p if x > p // 2 else x


# ---------------------------------------------------------------------------
# Subgroups and the Reidemeister-Schreier generating set
# ---------------------------------------------------------------------------


@dataclass
class SubgroupOracle:
    """Membership predicate for a subgroup, with an optional index hint."""

    contains: Callable[[object], bool]
    name: str = "subgroup"
    index_hint: Optional[int] = None

    def validate(self, group: Group, sample: Iterable = ()) -> None:
        if not self.contains(group.identity()):
            raise OracleError(f"{self.name}: identity not a member")
        sample = list(sample)
        for a in sample:
            if not self.contains(a):
                continue
            if not self.contains(group.inv(a)):
                raise OracleError(f"{self.name}: not closed under inverse")
            for b in sample:
                if self.contains(b) and not self.contains(group.mul(a, b)):
                    raise OracleError(f"{self.name}: not closed under product")


@dataclass(frozen=True)
class RSResult:
    """Schreier generating set for a finite-index subgroup."""

    generators: GeneratingSet
    representatives: tuple
    index: int

    @property
    def subgroup_size(self) -> Optional[int]:
        g = self.generators.group
        return None if g.order is None else g.order // self.index


def reidemeister_schreier(group: Group, gens: GeneratingSet, sub: SubgroupOracle) -> RSResult:
    """Coset representatives T (BFS-first, canonical-byte tie-break) and the
    Schreier set S0 = {t s tau(ts)^-1} for the subgroup described by ``sub``.

    T is a complete set of right-coset representatives with T inside S^(d-1);
    S0 lands in the subgroup intersected with S^(2d-1) and satisfies
    |S|/d <= |S0| <= d|S|.
    """
    if not sub.contains(group.identity()):
        raise OracleError(f"{sub.name}: identity not a member")

    reps: list = [group.identity()]

    def coset_of(x) -> Optional[int]:
        hits = [i for i, t in enumerate(reps) if sub.contains(group.mul(x, group.inv(t)))]
        if len(hits) > 1:
            raise OracleError(f"{sub.name}: element matched {len(hits)} cosets")
        return hits[0] if hits else None

    frontier = [group.identity()]
    while frontier:
        candidates = []
        for t in frontier:
            for s in gens.elements:
                x = group.mul(t, s)
                candidates.append((group.encode(x), x))
        candidates.sort(key=lambda cx: cx[0])
        new_frontier = []
        for _, x in candidates:
            if coset_of(x) is None:
                reps.append(x)
                new_frontier.append(x)
        frontier = new_frontier

    d = len(reps)
    pool: dict[bytes, object] = {}
    for t in reps:
        for s in gens.elements:
            ts = group.mul(t, s)
            idx = coset_of(ts)
            s0 = group.mul(ts, group.inv(reps[idx]))
            if not sub.contains(s0):
                raise OracleError(f"{sub.name}: Schreier element escaped the subgroup")
            pool[group.encode(s0)] = s0
    items = sorted(pool.items())
    s0_set = GeneratingSet(group, tuple(v for _, v in items), tuple(k for k, _ in items))
    sub.validate(group, sample=list(s0_set.elements)[:8])
    if not (len(gens) <= d * len(s0_set) and len(s0_set) <= d * len(gens)):
        raise OracleError(f"{sub.name}: Schreier size bounds violated (|S|={len(gens)}, d={d}, |S0|={len(s0_set)})")
    return RSResult(s0_set, tuple(reps), d)
