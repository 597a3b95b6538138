"""Random-walk curves, mixing times, the nine basic facts."""

import math

import numpy as np
import pytest

from cayleylab.groups import build_group, symmetrize
from cayleylab.mixing import (
    convolution_curve,
    exact_calibration,
    mixing_times,
    quadratic_scan,
    verify_basic_mixing,
)
from cayleylab.spectral import build_context, lambda1
from cayleylab.zoo import standard_zoo


def abelian_l2_oracle(moduli, gens_residues, k, n_steps):
    """Character-sum closed form for the L2 distance curve on an abelian product."""
    import itertools

    order = math.prod(moduli)
    eigs = []
    for char in itertools.product(*[range(m) for m in moduli]):
        if all(c == 0 for c in char):
            continue
        val = sum(
            math.cos(2 * math.pi * sum(c * s / m for c, s, m in zip(char, g, moduli)))
            for g in gens_residues
        ) / k
        eigs.append(val)
    return [math.sqrt(sum(e ** (2 * n) for e in eigs) / order) for n in range(n_steps + 1)]


def test_cycle_l2_matches_circulant_form():
    g = build_group("cyclic:5")
    s = g.generating_set()
    curves = convolution_curve(g, s, n_max=60)
    oracle = abelian_l2_oracle((5,), [(x,) for x in s.elements], s.k, 60)
    assert max(abs(a - b) for a, b in zip(curves.d2, oracle)) < 1e-12


def test_abelian_l2_matches_character_form():
    g = build_group("abelian:4,4,9")
    s = g.generating_set()
    curves = convolution_curve(g, s, n_max=40)
    oracle = abelian_l2_oracle((4, 4, 9), list(s.elements), s.k, 40)
    assert max(abs(a - b) for a, b in zip(curves.d2, oracle)) < 1e-10


def test_mixing_times_cycle():
    g = build_group("cyclic:12")
    rep = mixing_times(g, g.generating_set())
    assert rep.T1 <= rep.T2 <= rep.Tinf
    assert rep.Tinf >= rep.gamma
    assert abs(rep.T_rel - 3 / (2 - 2 * math.cos(2 * math.pi / 12))) < 1e-9


def test_mixing_times_whole_group_set():
    g = build_group("cyclic:3")
    s = symmetrize(g, [1, 2])
    rep = mixing_times(g, s)
    assert (rep.T1, rep.T2, rep.Tinf) == (1, 1, 1)


def test_walk_symmetry_under_inversion():
    g = build_group("lamplighter:4")
    s = g.generating_set()
    ctx = build_context(g, s)
    index = ctx.ball.index()
    inv_map = np.array([index[g.encode(g.inv(x))] for x in ctx.ball.elements])
    n = ctx.n
    v = np.zeros(n)
    v[0] = 1.0
    for step in range(1, 21):
        acc = np.zeros(n)
        for p in ctx.perms:
            acc += v[p]
        v = acc / ctx.k
        if step in (1, 5, 20):
            assert float(np.max(np.abs(v - v[inv_map]))) < 1e-12


def test_item5_at_zero_steps():
    g = build_group("cyclic:12")
    curves = convolution_curve(g, g.generating_set(), n_max=1)
    assert curves.d2[0] <= 1.0 + 1e-12


def test_walk_stays_stochastic_for_1000_steps():
    # the step itself raises if mass leaks or goes negative beyond 1e-12
    g = build_group("lamplighter:5")
    curves = convolution_curve(g, g.generating_set(), n_max=1000)
    assert curves.steps == 1000


def test_basic_mixing_pass_small_groups():
    for spec in ("cyclic:12", "lamplighter:4", "ut:dim=3,p=3"):
        g = build_group(spec)
        rep = verify_basic_mixing(g, g.generating_set())
        assert rep.hypothesis_ok
        assert rep.ok, (spec, [i.to_dict() for i in rep.items if i.status == "fail"])
        assert all(i.status == "pass" for i in rep.items)


def test_basic_mixing_hypothesis_skip():
    g = build_group("cyclic:3")
    s = symmetrize(g, [1, 2])
    assert lambda1(g, s).lambda1 > 2
    rep = verify_basic_mixing(g, s)
    assert not rep.hypothesis_ok
    statuses = {i.number: i.status for i in rep.items}
    assert statuses[3] == statuses[5] == statuses[9] == "skipped"
    assert rep.ok


def test_exact_calibration_small():
    for spec in ("cyclic:12", "lamplighter:3"):
        g = build_group(spec)
        rep = exact_calibration(g, g.generating_set(), steps=24)
        assert rep.max_err_d1 < 1e-12 and rep.max_err_dinf < 1e-12


def test_exact_calibration_size_guard():
    g = build_group("cyclic:300")
    with pytest.raises(ValueError):
        exact_calibration(g, g.generating_set())


def test_quadratic_scan_rows():
    instances = []
    for n in (16, 32):
        g = build_group(f"cyclic:{n}")
        instances.append((g.name, g, g.generating_set()))
    rows = quadratic_scan(instances, K=4.0)
    assert len(rows) == 2
    for row in rows:
        assert row.tinf_over_gamma_sq is not None
        assert row.doubling_scale is not None
        assert row.scale_below_gamma_23
    # single-instance family: one row, no trend to assert
    single = quadratic_scan(instances[:1], K=4.0)
    assert len(single) == 1


def test_mixing_invariants_across_zoo_sample():
    for inst in standard_zoo(max_order=200):
        curves = convolution_curve(inst.group, inst.gens, n_max=40)
        for p in (1, 2, "inf"):
            arr = curves.curve(p)
            assert float(np.max(np.diff(arr))) <= 1e-12
