"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, not configured elsewhere.
"""

import math
import time

import numpy as np
import pytest

import idealcstar as ic

from test_dynamics import random_system


def report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:2d} [{name}]: {status} {detail}")
    assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def f2():
    return ic.model_from_name("F2")


@pytest.fixture(scope="module")
def z2():
    return ic.model_from_name("Z2")


def seven_point_system(f2):
    return ic.FiniteSystem(
        f2, {"a": [1, 2, 3, 4, 5, 6, 0], "b": [2, 4, 6, 1, 3, 0, 5]},
        [1 / 7.0] * 7)


def test_criterion_1_haagerup_positivity(f2):
    start = time.perf_counter()
    window = ic.ball(f2, 4)
    assert len(window) == 161
    worst = math.inf
    ok = True
    for n in (1, 2, 4, 8):
        check = ic.pd_window_check(ic.haagerup(f2, n), window, tol=1e-8)
        worst = min(worst, check.min_eigenvalue)
        ok = ok and check.passed and check.min_eigenvalue >= -1e-8
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 10.0
    report(1, "Haagerup positivity", ok,
           f"min eig {worst:.3e} over 161-element windows, {elapsed:.2f}s")


def test_criterion_2_lp_threshold(f2):
    start = time.perf_counter()
    ok = True
    for n in (1, 2, 3):
        p0 = n * math.log(4)
        below = ic.lp_norm(ic.haagerup(f2, n), p0 - 0.1, 6)
        above = ic.lp_norm(ic.haagerup(f2, n), p0 + 0.1, 6)
        ok = ok and below.status != "finite" and above.status == "finite"
    expected = 1 + 4 * math.exp(-2) / (1 - 3 * math.exp(-2))
    total = ic.lp_norm(ic.haagerup(f2, 1), 2.0, 20).total
    rel = abs(total - expected) / expected
    ok = ok and rel <= 1e-9
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1.0
    report(2, "lp threshold", ok,
           f"flips at n*ln4; p=2 total rel err {rel:.2e}, {elapsed:.2f}s")


def test_criterion_3_kesten_gap(f2):
    start = time.perf_counter()
    x = ic.GroupRingElement.gensum(f2)
    values = {r: ic.reduced_norm_lower(x, r).value for r in (4, 8, 12)}
    increasing = values[4] < values[8] < values[12]
    in_range = 3.30 <= values[12] <= 3.4642
    triv = ic.trivial_norm(x)
    gap = ic.norm_gap_report(x, ic.IdealSpec("c0"), radius=12, gns_radius=4)
    elapsed = time.perf_counter() - start
    ok = (increasing and in_range and triv.value == 4.0
          and triv.kind == "exact" and gap["gap_full_vs_reduced"]
          and elapsed < 120.0)
    report(3, "Kesten gap", ok,
           f"R=12 value {values[12]:.4f} in [3.30, 3.4642], "
           f"trivial 4 exact, gap declared, {elapsed:.1f}s")


def test_criterion_4_amenable_contrast(z2):
    start = time.perf_counter()
    x = ic.GroupRingElement.gensum(z2)
    low = ic.reduced_norm_lower(x, 50)
    gap = ic.norm_gap_report(x, ic.IdealSpec("cc"), radius=50, gns_radius=3,
                             gap_tol=0.05)
    elapsed = time.perf_counter() - start
    ok = (low.value >= 3.95 and not gap["gap_full_vs_reduced"]
          and gap["consistent_with_equality_at_gap_tol"] and elapsed < 30.0)
    report(4, "amenable contrast", ok,
           f"Z^2 R=50 lower {low.value:.4f} >= 3.95, no gap, {elapsed:.1f}s")


def test_criterion_5_gns_exactness(f2):
    hs = [ic.delta_e(f2), ic.haagerup(f2, 1), ic.random_pd(f2, 4, 42)]
    worst = 0.0
    ok = True
    for h in hs:
        window = ic.gns_window(h, 3, 3)
        for g in ic.ball(f2, 3).elements:
            worst = max(worst, abs(window.coefficient(g) - h(g)))
        ok = ok and worst <= 1e-12
        # multiplicativity, exact where no truncation occurs
        mult = ic.gns_window(h, 4, 2)
        inner = ic.ball(f2, 2)
        for u_w, v_w in (("a", "b"), ("b", "b"), ("a", "a^-1")):
            u, v = f2.element(u_w), f2.element(v_w)
            op_u, op_v = mult.operator(u), mult.operator(v)
            op_uv = mult.operator(ic.compose(u, v))
            for s in inner.elements:
                e = np.zeros(len(mult.ball))
                e[mult.ball.index_of(s)] = 1.0
                lhs = op_u.apply(op_v.apply(e)[: len(mult.ball)])
                rhs = op_uv.apply(e)
                ok = ok and np.array_equal(lhs, rhs)
    report(5, "GNS exactness", ok,
           f"coefficient recovery defect {worst:.2e} <= 1e-12, "
           "multiplicativity exact")


def test_criterion_6_closure_properties(f2):
    window = ic.ball(f2, 2)
    system = seven_point_system(f2)
    rng = np.random.default_rng(2024)
    failures = 0
    for i in range(200):
        h1 = ic.random_pd(f2, 2 + i % 3, 2 * i)
        h2 = ic.random_pd(f2, 2 + (i + 1) % 3, 2 * i + 1)
        if not ic.pd_window_check(ic.product(h1, h2), window, tol=1e-8).passed:
            failures += 1
        for k in (2, 3):
            if not ic.pd_window_check(ic.power(h1, k), window, tol=1e-8).passed:
                failures += 1
        support = {
            window.element(int(j)): complex(rng.standard_normal(),
                                            rng.standard_normal())
            for j in rng.integers(0, len(window), 3)
        }
        if not ic.pd_window_check(ic.adjoint_convolve(support), window,
                                  tol=1e-8).passed:
            failures += 1
        if not ic.groupoid_pd_check(ic.lift(system, h1), window,
                                    tol=1e-8).passed:
            failures += 1
    report(6, "closure properties", failures == 0,
           f"200 seeded pairs: products, powers k<=3, f^**f, lifts; "
           f"{failures} failures")


def test_criterion_7_certificates(f2, z2):
    folner_family = [ic.folner_box(z2, n) for n in range(2, 11)]
    cert_cc = ic.equality_certificate(ic.IdealSpec("cc"), folner_family, 2)
    haagerup_family = [ic.haagerup(f2, n) for n in range(1, 11)]
    cert_c0 = ic.equality_certificate(ic.IdealSpec("c0"), haagerup_family, 3,
                                      final_deviation=0.3)
    cert_cc_rejects = ic.equality_certificate(ic.IdealSpec("cc"),
                                              haagerup_family, 3,
                                              final_deviation=0.3)
    system = seven_point_system(f2)
    lifted = [ic.lift(system, h) for h in haagerup_family[:6]]
    act_ok = ic.action_certificate("aTmenable", lifted, 2, final_deviation=0.8)
    z = ic.model_from_name("Z")
    rot = ic.FiniteSystem(z, {"a": [1, 2, 0]}, [1 / 3] * 3)
    lifted_folner = [ic.lift(rot, ic.folner_ball(z, r)) for r in range(1, 6)]
    act_amen = ic.action_certificate("amenable", lifted_folner, 2,
                                     final_deviation=0.5)
    stuck = ic.GroupoidFunction(system,
                                lambda x, el: 1.0 if el.length == 0 else 0.75,
                                tail=ic.BoundedBelow(0.5), label="stuck")
    act_reject = ic.action_certificate("aTmenable", lifted + [stuck], 2,
                                       final_deviation=0.8)
    # Property-(T) ideal: e^(-psi/n) with psi = word length
    psi = ic.word_length_function(f2)
    t_family = [ic.schoenberg(psi, 1.0 / n) for n in range(1, 9)]
    t_member = all(
        ic.ideal_membership(h, ic.IdealSpec("tideal")).verdict == "member"
        for h in t_family)
    cert_t = ic.equality_certificate(ic.IdealSpec("tideal"), t_family, 3,
                                     final_deviation=0.35)
    ok = (cert_cc.accepted and cert_cc.label == "amenability witness"
          and cert_c0.accepted and cert_c0.label == "Haagerup witness"
          and not cert_cc_rejects.accepted
          and act_ok.accepted and act_amen.accepted and not act_reject.accepted
          and t_member and cert_t.accepted
          and cert_t.label == "Property-(T)-ideal witness")
    report(7, "certificates", ok,
           "accepts (Z^2,Folner,cc), (F2,Haagerup,c0), lifted families, "
           "(F2,e^(-psi/n),tideal); rejects (F2,Haagerup,cc) and "
           "bounded-below family")


def test_criterion_8_dynamics_exactness():
    worst = 0.0
    rng = np.random.default_rng(55)
    for seed in range(50):
        system = random_system(seed)
        gens = system.model.generators()
        coc = ic.Cocycle(system)
        rep = ic.covariant_rep(system)  # verifies unitarity/covariance at 1e-12
        mu = system.measure
        for _ in range(4):
            s = gens[int(rng.integers(0, len(gens)))]
            t = gens[int(rng.integers(0, len(gens)))]
            rho = coc.of(s)
            perm = system.perm_of(s)
            worst = max(worst, float(np.max(np.abs(mu - rho[perm] * mu[perm]))))
            lhs = coc.of(ic.compose(s, t))
            rhs = rho * coc.of(t)[system.perm_of(s.inverse())]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            prod = rep.unitary(s) @ rep.unitary(t)
            worst = max(worst, float(np.max(np.abs(
                prod - rep.unitary(ic.compose(s, t))))))
    ok = worst <= 1e-12
    # swap-system exact values
    z = ic.model_from_name("Z")
    swap = ic.FiniteSystem(z, {"a": [1, 0]}, [1 / 3, 2 / 3])
    rho = ic.radon_nikodym(swap, z.element("a"))
    env = ic.envelopes(swap, "all")
    gap = ic.spectral_gap(ic.covariant_rep(swap), z.generators())
    v = np.abs(gap.vector)
    target = 1.0 / np.sqrt(swap.measure)
    swap_ok = (
        rho == pytest.approx([2.0, 0.5])
        and env.upper == pytest.approx([2.0, 1.0])
        and env.upper_integral == pytest.approx(4 / 3)
        and gap.has_fixed_vector
        and np.allclose(v / v[0], target / target[0])
    )
    z3 = ic.model_from_name("ZmodN:3")
    rot = ic.FiniteSystem(z3, {"a": [1, 2, 0]}, [1 / 3] * 3)
    rot_gap = ic.spectral_gap(ic.covariant_rep(rot), z3.generators())
    rot_ok = rot_gap.lambda_min == pytest.approx(0.0, abs=1e-10) \
        and np.allclose(rot_gap.vector / rot_gap.vector[0], 1.0)
    ok = ok and swap_ok and rot_ok
    report(8, "dynamics exactness", ok,
           f"50 random systems, worst identity defect {worst:.2e} <= 1e-12; "
           "swap and rotation values exact")


def test_criterion_9_chh_consequence(f2):
    start = time.perf_counter()
    rng = np.random.default_rng(99)
    b1 = ic.ball(f2, 1).elements
    worst_margin = -math.inf
    ok = True
    for i in range(20):
        h = ic.product(ic.random_pd(f2, 3, 7000 + i), ic.haagerup(f2, 1))
        member = ic.ideal_membership(h, ic.IdealSpec("lp", 2.0))
        ok = ok and member.verdict == "member"
        coeffs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        x = ic.GroupRingElement(f2, dict(zip(b1, coeffs)))
        gns = ic.gns_norm_lower(h, x, 6).value
        bound = ic.haagerup_upper_bound(x).value
        worst_margin = max(worst_margin, gns - bound)
        ok = ok and gns <= bound + 1e-6
    elapsed = time.perf_counter() - start
    report(9, "CHH consequence", ok,
           f"20 l2-certified PD x 20 random elements at R=6: "
           f"max(gns - haagerup bound) = {worst_margin:.3e} <= 1e-6, "
           f"{elapsed:.0f}s")


def test_criterion_10_quantum_group_axioms(f2):
    start = time.perf_counter()
    z = ic.model_from_name("Z")
    checks_f2 = ic.coproduct_checks(f2, 1, samples=100)
    density_z = ic.coproduct_density_rank(z, 2)
    elapsed = time.perf_counter() - start
    ok = (checks_f2["coassociative"]
          and checks_f2["coassociativity_max_defect"] == 0.0
          and checks_f2["density"]["rank"] == len(ic.ball(f2, 1)) ** 2
          and density_z["rank"] == 25 == density_z["expected"]
          and elapsed < 5.0)
    report(10, "quantum-group axioms", ok,
           f"co-associativity exact on 100 samples; density ranks 25/25, "
           f"{elapsed:.2f}s")
