"""Ball enumeration and growth diagnostics for Cayley graphs.

The BFS here is the single source of truth for every cardinality in the
package: spheres and balls are exact integer counts, deduplicated on canonical
bytes, and the element order it produces (sphere by sphere, canonical-byte
order within a sphere) indexes every vector quantity downstream.  Output is
bit-identical for any worker count because layer expansion is a pure function
of the frontier and merges are canonically ordered.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import GeneratingSet, Group, OracleError, ResourceRefusal, SubgroupOracle, order_cap

__all__ = [
    "Ball",
    "enumerate_ball",
    "GrowthProfile",
    "ball_growth",
    "diameter",
    "NonGeneratingError",
    "DoublingScan",
    "doubling_scan",
    "DoublingWindow",
    "doubling_at_scale",
    "FlatnessReport",
    "flatness_report",
    "ModerateGrowthFit",
    "moderate_fit",
    "RuzsaWitness",
    "approximate_group_witness",
    "CosetSaturation",
    "coset_saturation",
]


class NonGeneratingError(RuntimeError):
    """BFS closed on a proper subgroup; carries the order actually reached."""

    def __init__(self, reached: int, expected: Optional[int]):
        super().__init__(f"generating set closes on a subgroup of order {reached}" + (f" < {expected}" if expected else ""))
        self.reached = reached
        self.expected = expected


@dataclass(frozen=True)
class Ball:
    """BFS enumeration of S^0, S^1, ... : elements, codes, distances, sphere sizes.

    ``complete`` means the BFS closed (the last sphere is the full boundary);
    ``truncated`` means expansion stopped at max_radius or the cap first.
    """

    group: Group
    gens: GeneratingSet
    elements: tuple
    codes: tuple[bytes, ...]
    sphere_sizes: tuple[int, ...]
    complete: bool
    truncated: bool
    capped: bool = False

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def radius(self) -> int:
        return len(self.sphere_sizes) - 1

    def index(self) -> dict[bytes, int]:
        return {c: i for i, c in enumerate(self.codes)}

    def distances(self) -> dict[bytes, int]:
        out: dict[bytes, int] = {}
        pos = 0
        for r, size in enumerate(self.sphere_sizes):
            for c in self.codes[pos : pos + size]:
                out[c] = r
            pos += size
        return out


def _expand_chunk(group: Group, gens: GeneratingSet, chunk: list) -> list[tuple[bytes, object]]:
    out = []
    mul, enc = group.mul, group.encode
    for x in chunk:
        for s in gens.elements:
            y = mul(s, x)
            out.append((enc(y), y))
    return out


def enumerate_ball(
    group: Group,
    gens: GeneratingSet,
    max_radius: Optional[int] = None,
    workers: int = 1,
    cap: Optional[int] = None,
) -> Ball:
    """BFS the ball around the identity out to max_radius (or closure)."""
    if max_radius is None and group.order is None:
        raise ResourceRefusal(f"{group.name} is infinite: closure enumeration needs max_radius")
    limit = order_cap(cap)
    e = group.identity()
    ecode = group.encode(e)
    elements: list = [e]
    codes: list[bytes] = [ecode]
    seen: set[bytes] = {ecode}
    spheres = [1]
    frontier: list = [e]
    truncated = False
    capped = False
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while frontier:
            if max_radius is not None and len(spheres) - 1 >= max_radius:
                truncated = True
                break
            if pool is not None and len(frontier) >= 4 * workers:
                chunks = [frontier[i::workers] for i in range(workers)]
                results = pool.map(lambda ch: _expand_chunk(group, gens, ch), chunks)
                candidates: dict[bytes, object] = {}
                for res in results:
                    for code, y in res:
                        if code not in seen:
                            candidates[code] = y
            else:
                candidates = {}
                for code, y in _expand_chunk(group, gens, frontier):
                    if code not in seen:
                        candidates[code] = y
            if not candidates:
                break
            if len(elements) + len(candidates) > limit:
                truncated = True
                capped = True
                break
            layer = sorted(candidates.items())
            frontier = []
            for code, y in layer:
                seen.add(code)
                codes.append(code)
                elements.append(y)
                frontier.append(y)
            spheres.append(len(layer))
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    complete = not truncated
    return Ball(group, gens, tuple(elements), tuple(codes), tuple(spheres), complete, truncated, capped)


@dataclass(frozen=True)
class GrowthProfile:
    """Sphere/ball sizes of a Cayley graph, with the diameter when reached."""

    sphere_sizes: tuple[int, ...]
    group_order: Optional[int]
    k: int
    truncated: bool

    def __post_init__(self):
        balls = self.ball_sizes
        for n in range(1, len(balls)):
            if self.sphere_sizes[n] <= 0:
                raise ValueError("empty interior sphere")
            if balls[n] > self.k * balls[n - 1]:
                raise ValueError("ball grew faster than degree allows")

    @property
    def ball_sizes(self) -> tuple[int, ...]:
        out = []
        total = 0
        for s in self.sphere_sizes:
            total += s
            out.append(total)
        return tuple(out)

    @property
    def diameter(self) -> Optional[int]:
        if self.truncated:
            return None
        return len(self.sphere_sizes) - 1

    @property
    def reached(self) -> int:
        return sum(self.sphere_sizes)

    def ball(self, n: int) -> int:
        """|S^n|, clamped at the closure for n past the diameter."""
        if n < 0:
            raise ValueError("radius must be nonnegative")
        balls = self.ball_sizes
        if n >= len(balls):
            if self.truncated:
                raise ValueError(f"profile truncated before radius {n}")
            return balls[-1]
        return balls[n]

    def to_dict(self) -> dict:
        return {
            "sphere_sizes": list(self.sphere_sizes),
            "ball_sizes": list(self.ball_sizes),
            "diameter": self.diameter,
            "group_order": self.group_order,
            "k": self.k,
            "truncated": self.truncated,
        }

    def csv_rows(self) -> list[dict]:
        rows = []
        balls = self.ball_sizes
        # ratios only where both radii are certainly inside the closure
        gamma = -1 if self.truncated else len(balls) - 1
        for n in range(len(balls)):
            row = {"n": n, "sphere": self.sphere_sizes[n], "ball": balls[n]}
            row["ratio_2n1"] = float(Fraction(balls[2 * n + 1], balls[n])) if 1 <= n and 2 * n + 1 <= gamma else ""
            row["ratio_5n"] = float(Fraction(balls[5 * n], balls[n])) if 1 <= n and 5 * n <= gamma else ""
            rows.append(row)
        return rows


def ball_growth(
    group: Group,
    gens: GeneratingSet,
    max_radius: Optional[int] = None,
    workers: int = 1,
    cap: Optional[int] = None,
) -> GrowthProfile:
    """Exact sphere sizes up to min(max_radius, diameter)."""
    ball = enumerate_ball(group, gens, max_radius=max_radius, workers=workers, cap=cap)
    return GrowthProfile(ball.sphere_sizes, group.order, gens.k, ball.truncated)


def diameter(group: Group, gens: GeneratingSet, workers: int = 1, expected_order: Optional[int] = None) -> int:
    """Exact diameter; raises NonGeneratingError if S closes on a proper subgroup."""
    profile = ball_growth(group, gens, workers=workers)
    if profile.truncated:
        raise ResourceRefusal("ball enumeration truncated before closure")
    expected = expected_order if expected_order is not None else group.order
    if expected is not None and profile.reached < expected:
        raise NonGeneratingError(profile.reached, expected)
    return profile.diameter


# ---------------------------------------------------------------------------
# Doubling and flatness diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoublingScan:
    """Exact doubling ratios |S^{2n+1}|/|S^n| and |S^{5n}|/|S^n| over in-range n."""

    ratios_2n1: tuple[tuple[int, Fraction], ...]
    ratios_5n: tuple[tuple[int, Fraction], ...]

    def first_scale(self, K) -> Optional[int]:
        for n, ratio in self.ratios_2n1:
            if ratio <= K:
                return n
        return None

    def theta_hat(self, min_scale: int = 1) -> Optional[Fraction]:
        """max over in-range m >= min_scale of |S^{2m+1}|/|S^m|."""
        vals = [ratio for n, ratio in self.ratios_2n1 if n >= min_scale]
        return max(vals) if vals else None

    def to_dict(self) -> dict:
        return {
            "ratios_2n1": [[n, float(r)] for n, r in self.ratios_2n1],
            "ratios_5n": [[n, float(r)] for n, r in self.ratios_5n],
        }


def doubling_scan(profile: GrowthProfile) -> DoublingScan:
    if profile.truncated:
        raise ValueError("doubling scan needs a complete profile")
    gamma = profile.diameter
    balls = profile.ball_sizes
    r2, r5 = [], []
    for n in range(1, gamma + 1):
        if 2 * n + 1 <= gamma:
            r2.append((n, Fraction(balls[2 * n + 1], balls[n])))
        if 5 * n <= gamma:
            r5.append((n, Fraction(balls[5 * n], balls[n])))
    return DoublingScan(tuple(r2), tuple(r5))


@dataclass(frozen=True)
class DoublingWindow:
    """Search for a five-fold doubling scale inside the window [gamma^{d/2}, gamma^d]."""

    eps: float
    delta: float
    K: float
    lo: int
    hi: int
    scale: Optional[int]
    window_empty: bool

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "K": self.K,
            "window": [self.lo, self.hi],
            "scale": self.scale,
            "window_empty": self.window_empty,
        }


def doubling_at_scale(profile: GrowthProfile, eps: float, delta: float) -> DoublingWindow:
    """Smallest n in [gamma^{delta/2}, gamma^delta] with |S^{5n}| <= K |S^n|, K = 5^{2/(eps delta)}."""
    if profile.truncated:
        raise ValueError("needs a complete profile")
    gamma = profile.diameter
    exponent = 2.0 / (eps * delta)
    K = math.inf if exponent > 300 else 5.0**exponent
    lo = math.ceil(gamma ** (delta / 2)) if gamma > 0 else 1
    hi = math.floor(gamma**delta) if gamma > 0 else 0
    if lo > hi:
        return DoublingWindow(eps, delta, K, lo, hi, None, True)
    scale = None
    for n in range(lo, hi + 1):
        if profile.ball(min(5 * n, gamma)) <= K * profile.ball(n):
            scale = n
            break
    return DoublingWindow(eps, delta, K, lo, hi, scale, False)


@dataclass(frozen=True)
class FlatnessReport:
    """Diameter-versus-volume diagnostics: flatness exponent and Freiman bound."""

    gamma: int
    group_order: int
    k: int

    def __post_init__(self):
        if self.gamma > self.freiman_bound:
            raise RuntimeError(f"diameter {self.gamma} exceeds the Freiman bound {self.freiman_bound}")

    @property
    def eps_star(self) -> float:
        base = self.group_order / self.k
        if base <= 1.0:
            return math.inf
        if self.gamma <= 0:
            return 0.0
        return math.log(self.gamma) / math.log(base)

    @property
    def freiman_bound(self) -> float:
        return 2.0 * (self.group_order / self.k) ** 1.75

    def is_eps_flat(self, eps: float) -> bool:
        # derived-exponent comparison, so allow 1e-12 relative slack
        return self.gamma >= (self.group_order / self.k) ** eps * (1.0 - 1e-12) - 1e-12

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "group_order": self.group_order,
            "k": self.k,
            "eps_star": self.eps_star,
            "freiman_bound": self.freiman_bound,
        }


def flatness_report(profile: GrowthProfile) -> FlatnessReport:
    if profile.truncated or profile.group_order is None:
        raise ValueError("needs a complete profile of a finite group")
    if profile.reached != profile.group_order:
        raise NonGeneratingError(profile.reached, profile.group_order)
    return FlatnessReport(profile.diameter, profile.group_order, profile.k)


@dataclass(frozen=True)
class ModerateGrowthFit:
    """Smallest A with |S^n| >= (1/A)(n/gamma)^d |G| for 1 <= n <= gamma."""

    d: float
    A: object  # Fraction for integer d, float otherwise
    argmax_n: int
    exact: bool

    @property
    def valid(self) -> bool:
        return math.isfinite(float(self.A))

    def to_dict(self) -> dict:
        return {"d": self.d, "A": float(self.A), "argmax_n": self.argmax_n, "exact": self.exact}


def moderate_fit(profile: GrowthProfile, d: float) -> ModerateGrowthFit:
    """A = max over 1 <= n <= gamma of (n/gamma)^d |G| / |S^n|, exact for integer d."""
    if profile.truncated or profile.group_order is None:
        raise ValueError("needs a complete profile of a finite group")
    gamma = profile.diameter
    order = profile.group_order
    balls = profile.ball_sizes
    if gamma == 0:
        return ModerateGrowthFit(d, Fraction(1), 0, True)
    exact = float(d).is_integer()
    best = None
    best_n = 1
    for n in range(1, gamma + 1):
        if exact:
            val = Fraction(n, gamma) ** int(d) * Fraction(order, balls[n])
        else:
            val = (n / gamma) ** d * (order / balls[n])
        if best is None or val > best:
            best, best_n = val, n
    return ModerateGrowthFit(d, best, best_n, exact)


# ---------------------------------------------------------------------------
# Ruzsa covering witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RuzsaWitness:
    """Greedy disjoint-translate witness X in S^{4n} with verified certificates."""

    n: int
    witness: tuple
    ball_n: int
    ball_4n: int
    ball_5n: int
    disjoint_verified: bool
    covering_verified: bool

    @property
    def size(self) -> int:
        return len(self.witness)

    @property
    def ratio_bound(self) -> Fraction:
        return Fraction(self.ball_5n, self.ball_n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "witness_size": self.size,
            "ball_n": self.ball_n,
            "ball_4n": self.ball_4n,
            "ball_5n": self.ball_5n,
            "ratio_bound": float(self.ratio_bound),
            "disjoint_verified": self.disjoint_verified,
            "covering_verified": self.covering_verified,
        }


def approximate_group_witness(group: Group, gens: GeneratingSet, n: int, workers: int = 1) -> RuzsaWitness:
    """Greedy maximal X in S^{4n} with the translates xS^n pairwise disjoint.

    Verifies exhaustively that S^{4n} is covered by X S^{2n} and that the
    translates are disjoint, which forces |X| <= |S^{5n}|/|S^n|.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ball = enumerate_ball(group, gens, max_radius=5 * n, workers=workers)
    if ball.capped or (not ball.complete and ball.radius < 5 * n):
        raise ResourceRefusal(f"ball truncated before radius {5 * n}")
    dist = ball.distances()
    balls_by_radius = [0] * (ball.radius + 1)
    for r, size in enumerate(ball.sphere_sizes):
        balls_by_radius[r] = size + (balls_by_radius[r - 1] if r else 0)

    def ball_size(r: int) -> int:
        return balls_by_radius[min(r, ball.radius)]

    small = [x for x, c in zip(ball.elements, ball.codes) if dist[c] <= n]
    chosen: list = []
    occupied: set[bytes] = set()
    for x, code in zip(ball.elements, ball.codes):
        if dist[code] > 4 * n:
            break
        translate = {group.encode(group.mul(x, b)) for b in small}
        if occupied.isdisjoint(translate):
            chosen.append(x)
            occupied |= translate
    disjoint_ok = len(occupied) == len(chosen) * len(small)

    covering_ok = True
    inv_chosen = [group.inv(x) for x in chosen]
    for z, code in zip(ball.elements, ball.codes):
        if dist[code] > 4 * n:
            break
        if not any(dist.get(group.encode(group.mul(xi, z)), math.inf) <= 2 * n for xi in inv_chosen):
            covering_ok = False
            break

    witness = RuzsaWitness(
        n, tuple(chosen), ball_size(n), ball_size(4 * n), ball_size(5 * n), disjoint_ok, covering_ok
    )
    if witness.size * witness.ball_n > witness.ball_5n:
        raise RuntimeError("disjointness bound |X||S^n| <= |S^{5n}| violated")
    return witness


# ---------------------------------------------------------------------------
# Coset saturation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosetSaturation:
    """Trajectory of left cosets met by S^j and its stabilization radius."""

    r: int
    trajectory: tuple[int, ...]
    index: int

    def to_dict(self) -> dict:
        return {"r": self.r, "trajectory": list(self.trajectory), "index": self.index}


def coset_saturation(group: Group, gens: GeneratingSet, sub: SubgroupOracle, workers: int = 1) -> CosetSaturation:
    """Smallest r with S^{r+1} Gamma = S^r Gamma, asserting G = S^r Gamma."""
    ball = enumerate_ball(group, gens, workers=workers)
    if ball.truncated:
        raise ResourceRefusal("group too large to enumerate")
    if group.order is not None and ball.size < group.order:
        raise NonGeneratingError(ball.size, group.order)
    if not sub.contains(group.identity()):
        raise OracleError(f"{sub.name}: identity not a member")

    subgroup_size = sum(1 for x in ball.elements if sub.contains(x))
    if ball.size % subgroup_size != 0:
        raise OracleError(f"{sub.name}: membership count {subgroup_size} does not divide {ball.size}")
    index = ball.size // subgroup_size

    reps: list = []

    def coset_of(x) -> Optional[int]:
        hits = [i for i, t in enumerate(reps) if sub.contains(group.mul(group.inv(t), x))]
        if len(hits) > 1:
            raise OracleError(f"{sub.name}: element matched {len(hits)} left cosets")
        return hits[0] if hits else None

    trajectory = []
    met: set[int] = set()
    pos = 0
    for radius, size in enumerate(ball.sphere_sizes):
        for x in ball.elements[pos : pos + size]:
            c = coset_of(x)
            if c is None:
                reps.append(x)
                c = len(reps) - 1
            met.add(c)
        pos += size
        trajectory.append(len(met))

    if len(reps) != index:
        raise OracleError(f"{sub.name}: found {len(reps)} cosets, expected index {index}")

    r = 0
    while r + 1 < len(trajectory) and trajectory[r + 1] != trajectory[r]:
        r += 1
    if trajectory[r] != index:
        raise OracleError(f"{sub.name}: trajectory stabilized at {trajectory[r]} of {index} cosets")
    for j in range(r, len(trajectory)):
        if trajectory[j] != index:
            raise OracleError(f"{sub.name}: trajectory regressed after stabilization")
    return CosetSaturation(r, tuple(trajectory), index)
