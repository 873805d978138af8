"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one line `ACCEPTANCE <id>: PASS/FAIL <detail>` so the whole
gate can be read off a single pytest -s run.
"""

import json
import time

import numpy as np

from slantchain import (
    GalleryParams,
    apply_I,
    apply_J,
    bessel_j,
    chain_I,
    chain_J,
    circle,
    circular_helix,
    constant_precession,
    cos_expansion,
    cumulative_integral,
    j3_curve,
    psi_samples,
    sin_expansion,
    spherical_helix,
    tangent_indicatrix,
    QuadratureConfig,
    Curve3,
)
from slantchain.cli import run
from slantchain.verify import (
    MagneticField,
    aligned_distance,
    chain_tolerance,
    check_mannheim,
    check_Nk_magnetic,
    check_prime,
    check_spherical_characterization,
    lorentz_force,
)

TWO_PI = 2.0 * np.pi
C0 = float(np.arctan2(0.8, 0.6))


def _verdict(tag, ok, detail):
    print(f"ACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{tag}: {detail}"


def test_criterion_1_spherical_lift_matches_closed_form():
    start = time.monotonic()
    domain = (0.0, 4.0 * np.pi * 0.8)
    seed = circle((0.0, 0.0, 0.6), 0.8, domain=domain)
    levels = chain_I(seed, 1, [0.0])
    oracle = spherical_helix(0.6, 0.8, 0.0, domain=domain)
    ts = np.linspace(*domain, 2048)
    dist = float(np.max(np.linalg.norm(levels[1].curve(ts) - oracle(ts), axis=1)))
    elapsed = time.monotonic() - start
    _verdict("1 I-level-1 vs closed form", dist <= 1e-8 and elapsed < 5.0,
             f"max distance {dist:.3e}, {elapsed:.2f}s")


def test_criterion_2_space_lift_levels_one_and_two():
    start = time.monotonic()
    seed = circle((0.0, 0.0, 0.0), 1.0, mode="planar", domain=(0.0, TWO_PI))
    ts = np.linspace(0.0, TWO_PI, 1024)

    levels = chain_J(seed, 1, [C0])
    helix = circular_helix(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))
    d1 = aligned_distance(levels[1].curve, helix, ts)

    levels2 = chain_J(seed, 2, [C0, 0.0])
    cp = constant_precession(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))
    from slantchain.verify import check_hyperboloid, rigid_alignment

    R, shift = rigid_alignment(levels2[2].curve, cp, 0.0)
    moved = levels2[2].curve(ts) @ R.T + shift
    hyper = check_hyperboloid(moved, 0.6, 0.8, 1.0, tol=1e-6)
    elapsed = time.monotonic() - start
    _verdict("2 J-levels vs closed forms",
             d1 <= 1e-8 and hyper.passed and elapsed < 10.0,
             f"helix distance {d1:.3e}, hyperboloid residual {hyper.residual:.3e}, {elapsed:.2f}s")


def test_criterion_3_sphericity_budget():
    seeds = [
        circle((0.0, 0.0, 0.6), 0.8, domain=(0.0, 2 * TWO_PI * 0.8)),
        circle((0.0, 0.0, 0.28), 0.96, domain=(0.0, 2 * TWO_PI * 0.96)),
        circle((0.0, 0.0, 0.8), 0.6, domain=(0.0, 2 * TWO_PI * 0.6)),
    ]
    worst = -1.0
    for seed in seeds:
        levels = chain_I(seed, 4, [0.0, 0.3, -0.2, 0.1])
        for lvl in levels[1:]:
            ts = np.concatenate([np.linspace(a, b, 128) for a, b in lvl.regular_windows()])
            residual = float(np.max(np.abs(np.linalg.norm(lvl.curve(ts), axis=1) - 1.0)))
            worst = max(worst, residual / chain_tolerance(lvl.level))
    _verdict("3 sphericity budget depths 1-4", worst <= 1.0,
             f"worst residual at {worst:.2e} of budget")


def test_criterion_4_constant_angle_both_operators():
    axis = np.array([0.0, 0.0, 1.0])
    worst = 0.0
    seed_i = circle((0.0, 0.0, 0.6), 0.8, domain=(0.0, 2 * TWO_PI * 0.8))
    levels_i = chain_I(seed_i, 3, [0.0, 0.0, 0.0])
    seed_j = circle((0.0, 0.0, 0.0), 1.0, mode="planar", domain=(0.0, TWO_PI))
    levels_j = chain_J(seed_j, 3, [C0, 0.0, -0.75])
    for levels in (levels_i, levels_j):
        for k in (0, 1, 2):
            lvl = levels[k + 1]
            ts = np.concatenate(
                [np.linspace(a, b, max(8, int(256 * (b - a) / (lvl.curve.t_max - lvl.curve.t_min))))
                 for a, b in lvl.regular_windows()]
            )[:256]
            data = psi_samples(lvl.curve, k + 1, ts)
            dots = data["psi"][k + 1] @ axis
            worst = max(worst, float(np.max(np.abs(dots - np.mean(dots)))))
    _verdict("4 k-slant angle k in {0,1,2}", worst <= 1e-6, f"worst deviation {worst:.3e}")


def test_criterion_5_inversion_under_random_phases():
    rng = np.random.default_rng(20240817)
    seed = circle((0.0, 0.0, 0.6), 0.8, domain=(0.0, 2 * TWO_PI * 0.8))
    ts = np.linspace(*seed.domain, 1024)
    worst = 0.0
    for theta0 in rng.uniform(0.0, TWO_PI, 5):
        level = apply_I(seed, float(theta0))
        ind = tangent_indicatrix(level.curve)
        w = level.weight(ts)
        keep = np.abs(w) > 1e-3
        recovered = ind(ts[keep])
        target = np.sign(w[keep])[:, None] * seed(ts[keep])
        worst = max(worst, float(np.max(np.linalg.norm(recovered - target, axis=1))))
    _verdict("5 tangent-indicatrix inversion", worst <= 1e-8, f"worst distance {worst:.3e}")


def test_criterion_6_curvature_pair_identity():
    seed = circle((0.0, 0.0, 0.0), 1.0, mode="planar", domain=(0.0, TWO_PI))
    lvl_c, _ = apply_J(seed, C0)
    helix = circular_helix(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))
    lvl_h, _ = apply_J(helix, 0.0)
    r1 = check_mannheim(lvl_c, tol=1e-5)
    r2 = check_mannheim(lvl_h, tol=1e-5)
    _verdict("6 measured curvature-pair identity", r1.passed and r2.passed,
             f"circle seed {r1.residual:.3e}, helix seed {r2.residual:.3e}")


def test_criterion_7_bessel_stack():
    xs = np.linspace(0.0, 5.0, 101)
    worst_sv = max(
        abs(bessel_j(n, x, method="series") - bessel_j(n, x, method="integral"))
        for n in range(9)
        for x in xs
    )
    phis = np.linspace(0.0, TWO_PI, 33)
    worst_exp = 0.0
    for x in np.linspace(-5.0, 5.0, 11):
        worst_exp = max(worst_exp, float(np.max(np.abs(cos_expansion(x, phis, 30) - np.cos(x * np.cos(phis))))))
        worst_exp = max(worst_exp, float(np.max(np.abs(sin_expansion(x, phis, 30) - np.sin(x * np.cos(phis))))))
    seed = circle((0.0, 0.0, 0.0), 1.0, mode="planar", domain=(0.0, TWO_PI))
    levels = chain_J(seed, 3, [C0, 0.0, -0.75])
    series = j3_curve(GalleryParams(a=0.6, b=0.8), 30, domain=(0.0, 1.0))
    ts = np.linspace(0.0, 1.0, 256)
    d3 = aligned_distance(levels[3].curve, series, ts)
    ok = worst_sv <= 1e-10 and worst_exp <= 1e-8 and d3 <= 1e-4
    _verdict("7 Bessel stack", ok,
             f"series-vs-integral {worst_sv:.2e}, expansions {worst_exp:.2e}, depth-3 series {d3:.2e}")


def test_criterion_8_characterization_and_prime():
    great = circle((0.0, 0.0, 0.0), 1.0, mode="spherical", domain=(0.0, TWO_PI))
    small = circle((0.0, 0.0, 0.6), 0.8, domain=(0.0, TWO_PI * 0.8))
    helix_window = Curve3(domain=(0.1, 1.9),
                          position=spherical_helix(0.6, 0.8, 0.0).position,
                          derivative=spherical_helix(0.6, 0.8, 0.0).derivative,
                          max_order=32)
    residuals = [
        check_spherical_characterization(c, tol=1e-4).residual
        for c in (great, small, helix_window)
    ]
    prime_small = check_prime(small)
    prime_great = check_prime(great)
    ok = max(residuals) <= 1e-4 and prime_small.passed and not prime_great.passed
    _verdict("8 characterization and primality", ok,
             f"residuals {max(residuals):.2e}, small-circle prime={prime_small.passed}, "
             f"great-circle prime={prime_great.passed}")


def test_criterion_9_magnetic_section():
    cp = constant_precession(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))
    good = check_Nk_magnetic(cp, 0, 0.8, tol=1e-5)
    bad = check_Nk_magnetic(cp, 0, 0.5, tol=1e-5)
    worst_skew = 0.0
    worst_kernel = 0.0
    for xi in (MagneticField(0.9, 0.0, 0.6), MagneticField(0.8, -0.5, 0.6), MagneticField(0.1, 0.2, 0.3)):
        M = lorentz_force(xi)
        worst_skew = max(worst_skew, float(np.max(np.abs(M + M.T))))
        worst_kernel = max(worst_kernel, float(np.max(np.abs(M @ xi.components()))))
    ok = good.passed and not bad.passed and worst_skew == 0.0 and worst_kernel <= 1e-12
    _verdict("9 magnetic section", ok,
             f"field drift {good.residual:.2e}, wrong-rate residual {bad.residual:.2e}, "
             f"skew {worst_skew:.1e}, kernel {worst_kernel:.1e}")


def test_criterion_10_numerical_hygiene(tmp_path):
    # quadrature convergence order (composite Simpson, halved panels)
    errs = []
    for panels in (16, 32):
        cfg = QuadratureConfig(rule="simpson", panels=panels, nodes=2)
        F = cumulative_integral(np.cos, (0.0, 1.0), cfg)
        errs.append(abs(F(1.0) - np.sin(1.0)))
    quad_order = np.log2(errs[0] / errs[1])

    # finite-difference order on a closed-form curve
    helix = circular_helix(0.6, 0.8, 1.0, domain=(0.0, TWO_PI))
    bare = Curve3(domain=helix.domain, position=helix.position)
    hs = np.array([0.2, 0.1, 0.05, 0.025])
    errors = [
        float(np.linalg.norm(bare.jet(2.0, 2, h=h)[2] - helix.derivative(2.0, 2)))
        for h in hs
    ]
    fd_order = float(np.polyfit(np.log(hs), np.log(errors), 1)[0])

    # CLI round trip: build -> verify -> export -> re-ingest -> verify
    chain = tmp_path / "c.json"
    run(["build", "--seed", "circle:a=0.6,r=0.8", "--op", "I", "--depth", "1",
         "--samples", "512", "--range", "0:1.5", "--out", str(chain)])
    rep1 = tmp_path / "r1.json"
    run(["verify", "--in", str(chain), "--checks", "spherical,kslant:0:axis=0,0,1",
         "--out", str(rep1)])
    csv_path = tmp_path / "c.csv"
    run(["export", "--in", str(chain), "--format", "csv", "--out", str(csv_path)])
    rep2 = tmp_path / "r2.json"
    run(["verify", "--in", str(csv_path), "--checks", "spherical,kslant:0:axis=0,0,1",
         "--out", str(rep2)])
    with open(rep1) as f1, open(rep2) as f2:
        r1 = {c["name"]: c["residual"] for c in json.load(f1)["checks"]}
        r2 = {c["name"]: c["residual"] for c in json.load(f2)["checks"]}
    drift = max(abs(r1[name] - r2[name]) for name in r1)

    ok = quad_order >= 3.5 and 3.5 <= fd_order <= 4.5 and drift <= 1e-12
    _verdict("10 numerical hygiene", ok,
             f"quadrature order {quad_order:.2f}, stencil order {fd_order:.2f}, "
             f"round-trip drift {drift:.1e}")
