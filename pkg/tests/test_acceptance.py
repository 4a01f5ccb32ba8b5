"""The twelve acceptance criteria, one test each, at their stated tolerances.

Every test records a PASS/FAIL line (printed inline and again in the
terminal summary) before asserting.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from _oracles import TWO_PI, adapted_instance, random_spectrum, rk4_jacobi, rotation

from equifocal import (
    alpha_invariant,
    build_clifford,
    count_and_bound,
    cut_focal_check,
    focal_scan,
    focal_lower_bound,
    homogeneity_probe,
    make_J,
    make_Jprime,
    make_space,
    omega_F,
    principal_curvature_constancy,
    propagate,
    sample_level,
    shape_operator_at,
    spectrum_at,
    verify_equifocal,
)
from equifocal.hopf import (
    anchor_points,
    omega_closed_form,
    omega_matrix,
    phi_isometry_check,
    phi_membership_check,
    phi_two_to_one_check,
    s1_action_on_Mminus_check,
    thorbergsson_check,
    thorbergsson_product,
)

OTFKM_CASES = [(1, 4), (1, 8), (2, 8)]
SAMPLES = 20


def arccot(x):
    return math.pi / 2 - math.atan(x)


@pytest.fixture(scope="module")
def otfkm_samples():
    out = {}
    for m, l in OTFKM_CASES:
        s = build_clifford(m, l)
        out[(m, l)] = [shape_operator_at(s, z) for z in sample_level(s, 0.0, SAMPLES, seed=2025)]
    return out


@pytest.fixture(scope="module")
def otfkm_profiles(otfkm_samples):
    profiles = {}
    for (m, l), samples in otfkm_samples.items():
        spec = spectrum_at(make_space("sphere", 2 * l - 1))
        profiles[(m, l)] = (spec, [focal_scan(spec, smp.shape, TWO_PI) for smp in samples])
    return profiles


@pytest.fixture(scope="module")
def adapted_instances():
    rng = np.random.default_rng(50)
    return [adapted_instance(rng) for _ in range(50)]


def test_01_omega_anchor_values(accept):
    t0 = time.perf_counter()
    vals = {}
    for n in (1, 2):
        s = build_clifford(1, 2 * n + 2)
        J = make_Jprime(n)
        z, zhat = anchor_points(n)
        vals[n] = (omega_F(s, J, z), omega_F(s, J, zhat))
    elapsed = time.perf_counter() - t0
    ok = all(abs(a - 128) <= 1e-9 and abs(b + 128) <= 1e-9 for a, b in vals.values()) and elapsed < 1
    detail = ", ".join(f"n={n}: ({a:.12g}, {b:.12g})" for n, (a, b) in vals.items())
    assert accept(1, "Omega_F anchors +-128", ok, f"{detail}; {elapsed:.3f}s")


def test_02_omega_closed_form_agreement(accept):
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(200):
        n = 1 + i % 2
        s = build_clifford(1, 2 * n + 2)
        J = make_Jprime(n)
        z = rng.normal(size=s.dim)
        z /= np.linalg.norm(z)
        a, b = omega_matrix(s, J, z), omega_closed_form(s, J, z)
        worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    assert accept(2, "Omega_F closed form = matrix form", worst <= 1e-9,
                  f"max relative deviation {worst:.3g} over 200 points")


def test_03_otfkm_curvature_structure(accept):
    t0 = time.perf_counter()
    problems = []
    worst_dev, worst_spacing = 0.0, 0.0
    for m, l in OTFKM_CASES:
        s = build_clifford(m, l)
        samples = [shape_operator_at(s, z) for z in sample_level(s, 0.0, SAMPLES, seed=3)]
        for smp in samples:
            mults = [k for _, k in smp.curvatures]
            if mults != [m, l - m - 1, m, l - m - 1]:
                problems.append(f"({m},{l}) multiplicities {mults}")
            gaps = np.diff(smp.focal_times())
            worst_spacing = max(worst_spacing, float(np.max(np.abs(gaps - math.pi / 4))))
        worst_dev = max(worst_dev, principal_curvature_constancy(samples).deviation)
    elapsed = time.perf_counter() - t0
    ok = not problems and worst_dev < 1e-6 and worst_spacing <= 1e-6 and elapsed < 30
    assert accept(3, "OT-FKM four curvatures (m, l-m-1, m, l-m-1)", ok,
                  f"per-index dev {worst_dev:.2g}, spacing dev {worst_spacing:.2g}, "
                  f"{elapsed:.2f}s {problems[:2]}")


def test_04_equifocality_pipeline(accept, otfkm_samples, otfkm_profiles):
    lines, ok = [], True
    for key, (spec, profiles) in otfkm_profiles.items():
        rep = verify_equifocal(profiles)
        thetas = [p.theta for p in rep.profiles] if rep.passed else [math.nan]
        theta_spread = max(thetas) - min(thetas)
        lower = rep.focal_distance is not None and rep.focal_distance >= focal_lower_bound_sphere(key)
        good = (rep.passed and rep.g == 4 and theta_spread <= 1e-6
                and abs(rep.focal_distance - math.pi / 4) <= 1e-8 and lower)
        ok &= good
        lines.append(f"{key}: g={rep.g} theta={rep.theta:.10f} d={rep.focal_distance:.12f}"
                     if rep.passed else f"{key}: {rep.message}")
    assert accept(4, "equifocality pipeline", ok, "; ".join(lines))


def focal_lower_bound_sphere(key):
    return focal_lower_bound(make_space("sphere", 2 * key[1] - 1))


def test_05_scan_matches_closed_form(accept, adapted_instances):
    worst, mismatches = 0.0, 0
    for spec, A, ref in adapted_instances:
        got = focal_scan(spec, A, TWO_PI)
        if got.mults() != ref.mults():
            mismatches += 1
            continue
        worst = max(worst, float(np.max(np.abs(got.times() - ref.times()))))
    # spheres: the roots are arccot(lambda) and arccot(lambda) + pi
    rng = np.random.default_rng(5)
    sphere_worst = 0.0
    for _ in range(10):
        lam = rng.normal(scale=2, size=5)
        spec = spectrum_at(make_space("sphere", 6))
        q = rotation(rng, 5)
        prof = focal_scan(spec, q @ np.diag(lam) @ q.T, TWO_PI)
        expected = np.sort([arccot(x) + k * math.pi for x in lam for k in (0, 1)])
        if len(prof.roots) != 10:
            mismatches += 1
            continue
        sphere_worst = max(sphere_worst, float(np.max(np.abs(prof.times() - expected))))
    ok = mismatches == 0 and worst <= 1e-9 and sphere_worst <= 1e-9
    assert accept(5, "scan vs closed form oracle", ok,
                  f"50 adapted: max |dt| {worst:.2g}; spheres: {sphere_worst:.2g}; mismatches {mismatches}")


def test_06_jacobi_vs_rk4(accept):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ts = np.linspace(0, TWO_PI, 9)[1:]
    worst = 0.0
    for _ in range(100):
        spec = random_spectrum(rng)
        n = spec.tangent_dim
        q = rotation(rng, n)
        R = q @ np.diag(spec.frequencies() ** 2) @ q.T
        y0, y1 = rng.normal(size=n), rng.normal(size=n)
        # march RK4 across the checkpoints in one pass
        pos, vel, t_prev = y0, y1, 0.0
        for t in ts:
            pos, vel = rk4_jacobi(R, pos, vel, t - t_prev, 100)
            t_prev = t
            exact = propagate(spec, q.T @ y0, q.T @ y1, t)
            worst = max(worst, float(np.max(np.abs(q @ exact.position - pos))))
    elapsed = time.perf_counter() - t0
    assert accept(6, "Jacobi closed form vs RK4", worst < 1e-6 and elapsed < 5,
                  f"max error {worst:.2g} over 100 instances, {elapsed:.2f}s")


def test_07_focal_count_bound(accept, otfkm_profiles, adapted_instances):
    checked, failures = 0, []
    for key, (spec, profiles) in otfkm_profiles.items():
        for p in profiles:
            rep = count_and_bound(p, spec)
            checked += 1
            if not (rep.passed and rep.sphere_passed):
                failures.append((key, rep.count))
    for spec, A, _ in adapted_instances:
        rep = count_and_bound(focal_scan(spec, A, TWO_PI), spec)
        checked += 1
        if not rep.passed or rep.sphere_passed is False:
            failures.append(("adapted", rep.count))
    assert accept(7, "focal count L <= (s+1)n, spheres L <= n", not failures,
                  f"{checked} instances, failures {failures[:3]}")


def test_08_cut_focal(accept, otfkm_samples, otfkm_profiles):
    worst = 0.0
    level0 = []
    for key, (spec, profiles) in otfkm_profiles.items():
        for smp, p in zip(otfkm_samples[key], profiles):
            rep = cut_focal_check(p, smp.shape)
            worst = max(worst, rep.product)
            level0.append(rep.product)
    target = (1 / math.tan(math.pi / 8)) * math.pi / 8
    match = max(abs(v - target) for v in level0)
    ok = worst <= 1 and match <= 1e-6
    assert accept(8, "kappa * e_c <= 1", ok,
                  f"max product {worst:.10f}, target {target:.10f}, max |diff| {match:.2g}")


def test_09_alpha_probe(accept):
    s = build_clifford(1, 4)
    std_rep = homogeneity_probe(s, make_J(4), 0.0, 50, seed=9)
    tw_rep = homogeneity_probe(s, make_Jprime(1), 0.0, 50, seed=9)
    z, zhat = anchor_points(1)
    anchors = (alpha_invariant(s, make_Jprime(1), z), alpha_invariant(s, make_Jprime(1), zhat))
    ok = (std_rep.std < 1e-6 and tw_rep.verdict == "non-constant"
          and tw_rep.max - tw_rep.min >= 3.9
          and abs(anchors[0] - 2) < 1e-9 and abs(anchors[1] + 2) < 1e-9)
    assert accept(9, "alpha: J constant, J' non-constant", ok,
                  f"J std {std_rep.std:.2g}; J' range [{tw_rep.min:.6f}, {tw_rep.max:.6f}]; "
                  f"anchors {anchors[0]:.12g}, {anchors[1]:.12g}")


def test_10_circle_actions_and_phi(accept):
    rng = np.random.default_rng(10)
    ws = [w / np.linalg.norm(w) for w in rng.normal(size=(20, 4))]
    act_j = s1_action_on_Mminus_check(make_J(4), ws, n_theta=16, n_phi=16)
    act_jp = s1_action_on_Mminus_check(make_Jprime(1), ws, n_theta=16, n_phi=16)
    samples = [(float(rng.uniform(0, TWO_PI)), w) for w in ws]
    two = phi_two_to_one_check(samples, tol=8 * np.finfo(float).eps)
    iso = phi_isometry_check(samples)
    mem = phi_membership_check(build_clifford(1, 4), samples)
    ok = (act_j.deviation <= 1e-12 and act_jp.deviation <= 1e-12 and two.passed
          and iso.deviation < 1e-10 and mem.passed)
    assert accept(10, "S^1 actions and Phi", ok,
                  f"J {act_j.deviation:.2g}, J' {act_jp.deviation:.2g}, two-to-one {two.deviation:.2g}, "
                  f"isometry {iso.deviation:.2g}, non-MMinus images {int(mem.deviation)}")


def test_11_thorbergsson(accept):
    sphere_ok = all(thorbergsson_product(make_space("sphere", 2 * l - 1)) == 4 * (l - 1)
                    == 2 * ((2 * l - 1) - 1) for l in range(4, 17))
    wrong = 0
    for kind, n in [("cpn", 2), ("cpn", 5), ("hpn", 2), ("hpn", 3), ("cap2", None)]:
        space = make_space(kind, n)
        req = thorbergsson_product(space)
        for g in (1, 2, 3, 4, 6):
            for m1 in range(1, 16):
                for m2 in range(1, 16):
                    if thorbergsson_check(space, g, m1, m2).passed != (g * (m1 + m2) == req):
                        wrong += 1
    assert accept(11, "Thorbergsson products", sphere_ok and wrong == 0,
                  f"sphere identity l=4..16 {'ok' if sphere_ok else 'FAILED'}; misclassified {wrong}")


CLI_RUNS = [
    ["verify", "--m", "1", "--l", "8", "--samples", "8", "--seed", "12"],
    ["invariants", "--m", "1", "--l", "4", "--structure", "jprime", "--anchor-points", "--seed", "3"],
    ["otfkm", "--m", "2", "--l", "8", "--samples", "4", "--seed", "7", "--format", "csv"],
    ["focal-scan", "--space", "sphere:15", "--shape", "otfkm:2,8,0.3,1", "--seed", "4"],
]


def test_12_cli_determinism(accept, tmp_path):
    identical = 0
    for i, args in enumerate(CLI_RUNS):
        outs = []
        for rep, threads in enumerate(("1", "1", "3")):
            path = tmp_path / f"run{i}_{rep}"
            env = dict(os.environ, EQUIFOCAL_THREADS=threads)
            subprocess.run([sys.executable, "-m", "equifocal", *args, "--output", str(path)],
                           check=True, env=env)
            outs.append(path.read_bytes())
        identical += outs[0] == outs[1] == outs[2]
    assert accept(12, "CLI determinism", identical == len(CLI_RUNS),
                  f"{identical}/{len(CLI_RUNS)} commands byte-identical across 3 runs")
