"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np

from modlab import (Curve, CurveFamily, DirichletPolygon, GridRegion, GroupPresentation,
                    MapSample, MobiusTransform, ScalarField, project)
from modlab.cli import main as cli_main
from modlab.curves import derivative_check
from modlab.hyperbolic import comparison_constant, hyp_distance
from modlab.mapping import (affine_map, fmo_statistic, mobius_map, poletsky_verify,
                            radial_stretch)
from modlab.modulus import (admissibility_check, annulus_radial_family, annulus_region, modulus,
                            ring_modulus)
from modlab.quotient import min_orbit_separation, normal_neighborhood_radius, quotient_distance

ROOT = Path(__file__).resolve().parents[1]
RESULTS = {}


def report(number, title, passed, detail, elapsed, budget):
    passed = bool(passed and elapsed < budget)
    line = (f"criterion {number} [{title}]: {'PASS' if passed else 'FAIL'} "
            f"({detail}; {elapsed:.1f}s of {budget:g}s)")
    RESULTS[number] = line
    print(line)
    return passed


def disk_sample(rng, n, radius=1.0):
    # uniform by area in the disk of the given radius, strictly inside the unit circle
    z = radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    return np.where(np.abs(z) < 1, z, 0.0)


def criterion_1():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 100_000
    log3 = abs(hyp_distance(0, 0.5) - np.log(3))
    z1, z2, z3 = (disk_sample(rng, n) for _ in range(3))
    d12, d23, d13 = hyp_distance(z1, z2), hyp_distance(z2, z3), hyp_distance(z1, z3)
    axioms = max(float(np.max(-d12)), float(np.max(np.abs(d12 - hyp_distance(z2, z1)))),
                 float(np.max(d13 - d12 - d23)), float(np.max(hyp_distance(z1, z1))))
    w1, w2, a = (disk_sample(rng, n, 0.99) for _ in range(3))
    theta = 2 * np.pi * rng.random(n)
    g = lambda z: np.exp(1j * theta) * (z - a) / (1 - np.conj(a) * z)  # noqa: E731
    inv = float(np.max(np.abs(hyp_distance(g(w1), g(w2)) - hyp_distance(w1, w2))))
    ok = log3 < 1e-12 and axioms <= 1e-10 and inv <= 1e-10
    return report(1, "metric", ok, f"|h(0,0.5)-log3|={log3:.1e}, axioms={axioms:.1e}, "
                  f"invariance={inv:.1e}", time.perf_counter() - t0, 10)


def criterion_2():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    n = 1_000_000
    z1, z2 = disk_sample(rng, n), disk_sample(rng, n)
    right = int(np.sum(np.abs(z1 - z2) > hyp_distance(z1, z2)))
    c1 = comparison_constant(0.4)
    b1, b2 = disk_sample(rng, n, 0.4), disk_sample(rng, n, 0.4)
    left = int(np.sum(c1 * hyp_distance(b1, b2) > np.abs(b1 - b2)))
    return report(2, "comparison inequalities", right == 0 and left == 0,
                  f"C1(0.4)={c1:.4f}, violations right={right} left={left}",
                  time.perf_counter() - t0, 30)


def criterion_3():
    t0 = time.perf_counter()
    line = derivative_check(lambda t: t + 0j, 0.0, 0.5, dalpha=lambda t: np.ones_like(t) + 0j)
    arc = derivative_check(lambda t: 0.3 * np.exp(1j * t), 0.0, np.pi / 2,
                           dalpha=lambda t: 0.3j * np.exp(1j * t))
    dev = max(line.max_abs_deviation, arc.max_abs_deviation)
    return report(3, "arc-length derivative", dev < 1e-6, f"max deviation={dev:.1e}",
                  time.perf_counter() - t0, 5)


def criterion_4():
    t0 = time.perf_counter()
    region = annulus_region(0.5, 256)
    fam = annulus_radial_family(0.1, 0.5, 720)
    exact = ring_modulus(0.1, 0.5)
    e = modulus(fam, region, "euclidean")
    h = modulus(fam, region, "hyperbolic")
    rel_e = abs(e.value - exact) / exact
    rel_h = abs(h.value - e.value) / e.value
    ok = rel_e < 0.03 and rel_h < 0.01 and e.converged and h.converged
    return report(4, "ring modulus", ok, f"euclidean={e.value:.5f} vs {exact:.5f} "
                  f"({rel_e:.2%}), hyperbolic={h.value:.5f} ({rel_h:.3%} apart)",
                  time.perf_counter() - t0, 300)


def _random_family(rng, n):
    curves = []
    for _ in range(n):
        k = rng.integers(2, 5)
        curves.append(Curve(0.35 * (rng.random(k) - 0.5) * 2 + 0.35j * (rng.random(k) - 0.5) * 2))
    return CurveFamily(tuple(curves))


def criterion_5():
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    region = GridRegion.square(0.4, 48)
    worst_adm = 0.0

    def solve(fam, mode):
        nonlocal worst_adm
        res = modulus(fam, region, mode)
        low = admissibility_check(fam, res.density, mode).min_integral
        worst_adm = max(worst_adm, 1.0 - low)
        return res.value

    mono = 0
    for trial in range(20):
        mode = ("euclidean", "hyperbolic")[trial % 2]
        base, extra = _random_family(rng, 8), _random_family(rng, 5)
        if solve(base + extra, mode) < solve(base, mode) - 1e-6:
            mono += 1
    sub = 0
    for trial in range(10):
        mode = ("euclidean", "hyperbolic")[trial % 2]
        f1, f2 = _random_family(rng, 7), _random_family(rng, 7)
        if solve(f1 + f2, mode) > solve(f1, mode) + solve(f2, mode) + 1e-4:
            sub += 1
    ok = mono == 0 and sub == 0 and worst_adm < 1e-6
    return report(5, "modulus properties", ok, f"monotonicity violations={mono}/20, "
                  f"subadditivity violations={sub}/10, admissibility residual={worst_adm:.1e}",
                  time.perf_counter() - t0, 600)


def criterion_6():
    t0 = time.perf_counter()
    region = annulus_region(0.5, 256)
    fam = annulus_radial_family(0.1, 0.5, 720, n_vertices=33)
    source = modulus(fam, region, "euclidean")
    maps = {"conformal": mobius_map(0.15 + 0.05j, 0.3), "affine k=0.2": affine_map(0.2),
            "affine k=0.5": affine_map(0.5), "radial a=1.5": radial_stretch(1.5),
            "radial a=2": radial_stretch(2.0), "radial a=3": radial_stretch(3.0)}
    reports = {name: poletsky_verify(MapSample.from_analytic(region, *f), fam, region,
                                     rho=source.density, mode="euclidean")
               for name, f in maps.items()}
    all_pass = all(r.passed for r in reports.values())
    conformal = abs(reports["conformal"].relative_margin)
    r2 = reports["radial a=2"]
    lhs_ok = abs(r2.lhs - 1.9523) / 1.9523 < 0.05
    rhs_ok = abs(r2.rhs - 7.809) / 7.809 < 0.05
    ok = all_pass and conformal < 0.03 and lhs_ok and rhs_ok
    n_pass = sum(r.passed for r in reports.values())
    return report(6, "modulus inequality", ok, f"{n_pass}/6 maps pass, conformal margin="
                  f"{conformal:.2%}, radial a=2 LHS={r2.lhs:.4f} RHS={r2.rhs:.4f}",
                  time.perf_counter() - t0, 600)


def criterion_7():
    t0 = time.perf_counter()
    group = GroupPresentation((MobiusTransform.translation(0.5),), 6)
    d = quotient_distance(project(0, group), project(0.25, group))
    dist_ok = abs(d - hyp_distance(0, 0.25)) < 1e-9
    rng = np.random.default_rng(707)
    z1, z2 = disk_sample(rng, 10_000, 0.99), disk_sample(rng, 10_000, 0.99)
    bad = sum(quotient_distance(project(a, group), project(b, group)) > hyp_distance(a, b) + 1e-12
              for a, b in zip(z1, z2))
    poly = DirichletPolygon.from_group(group, 0)
    member_ok = poly.contains(0.1) and not poly.contains(0.3)
    r = normal_neighborhood_radius(project(0, group))
    half_gap = min_orbit_separation(0, group) / 2
    nbhd_ok = abs(r - half_gap) <= 0.1 * half_gap
    ok = dist_ok and bad == 0 and member_ok and nbhd_ok
    return report(7, "quotient geometry", ok, f"d(0,0.25)={d:.9f}, d>h violations={bad}, "
                  f"membership ok={member_ok}, radius={r:.4f} vs {half_gap:.4f}",
                  time.perf_counter() - t0, 30)


def criterion_8():
    t0 = time.perf_counter()
    region = GridRegion.square(0.7, 256)
    p0 = 0.2 + 0.1j
    radii = [0.4, 0.2, 0.1, 0.05]
    const = ScalarField(region, np.full(region.shape, 3.0))
    zero = all(osc == 0.0 for _, osc in fmo_statistic(const, p0, radii))
    w = MobiusTransform.translation(p0).inverse()(region.centers)
    worst = 0.0
    for angle in (0.0, 0.7, 2.0):
        ind = ScalarField(region, (np.imag(np.exp(-1j * angle) * w) > 0).astype(float))
        for _, osc in fmo_statistic(ind, p0, radii):
            # a geodesic through the center halves each ball: s = 1/2, 2 s (1 - s) = 1/2
            worst = max(worst, abs(osc - 0.5) / 0.5)
    return report(8, "mean oscillation", zero and worst < 0.05,
                  f"constant exactly 0={zero}, indicator max deviation={worst:.2%}",
                  time.perf_counter() - t0, 10)


def _artifacts(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def criterion_9(tmp):
    t0 = time.perf_counter()
    configs = sorted((ROOT / "configs").glob("*.json"))
    mismatched = []
    for config in configs:
        kind = json.loads(config.read_text())["kind"]
        fmt = json.loads(config.read_text()).get("output", {}).get("format", "json")
        outs = []
        for run in ("a", "b"):
            d = tmp / config.stem / run
            d.mkdir(parents=True)
            cli_main([kind, "--config", str(config), "--out", str(d / f"out.{fmt}"),
                      "--seed", "11"])
            outs.append(_artifacts(d))
        if not outs[0] or outs[0] != outs[1]:
            mismatched.append(config.stem)
    return report(9, "determinism", not mismatched,
                  f"{len(configs) - len(mismatched)}/{len(configs)} configs byte-identical",
                  time.perf_counter() - t0, 900)


def test_criterion_1_metric():
    assert criterion_1()


def test_criterion_2_comparison_inequalities():
    assert criterion_2()


def test_criterion_3_arc_length_derivative():
    assert criterion_3()


def test_criterion_4_ring_modulus():
    assert criterion_4()


def test_criterion_5_modulus_properties():
    assert criterion_5()


def test_criterion_6_modulus_inequality():
    assert criterion_6()


def test_criterion_7_quotient_geometry():
    assert criterion_7()


def test_criterion_8_mean_oscillation():
    assert criterion_8()


def test_criterion_9_determinism(tmp_path):
    assert criterion_9(tmp_path)


if __name__ == "__main__":
    import tempfile

    checks = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
              criterion_7, criterion_8]
    outcomes = [c() for c in checks]
    with tempfile.TemporaryDirectory() as tmp:
        outcomes.append(criterion_9(Path(tmp)))
    sys.exit(0 if all(outcomes) else 1)
