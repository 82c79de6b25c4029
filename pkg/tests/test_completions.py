import math

import numpy as np
import pytest

import idealcstar as ic
from idealcstar.errors import (
    InvalidHomomorphismError,
    UnsupportedModelError,
)


def gensum(model):
    return ic.GroupRingElement.gensum(model)


class TestGroupRing:
    def test_zero_coefficients_dropped(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("a"): 0.0, f2.element("b"): 1.0})
        assert len(x.terms) == 1

    def test_convolution_square_of_gensum(self, f2):
        x = gensum(f2)
        sq = x * x
        assert sq.terms[f2.identity] == pytest.approx(4.0)
        assert sq.terms[f2.element("ab")] == pytest.approx(1.0)
        assert len(sq.terms) == 13  # e plus the 12 reduced words of length 2

    def test_adjoint(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("ab"): 1 + 2j})
        adj = x.adjoint()
        assert adj.terms[f2.element("b^-1a^-1")] == pytest.approx(1 - 2j)
        assert gensum(f2).is_selfadjoint()

    def test_support_radius(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("aba"): 2.0, f2.identity: 1.0})
        assert x.support_radius == 3


class TestHomPushforward:
    def test_abelianization_kills_commutator(self, f2, z2):
        phi = {"a": z2.element("a"), "b": z2.element("b")}
        x = ic.GroupRingElement.delta(f2.element("aba^-1b^-1"))
        out = ic.hom_pushforward(phi, x)
        assert out.terms == {z2.identity: 1.0}

    def test_generator_images(self, f2, z2):
        phi = {"a": z2.element("a"), "b": z2.element("b")}
        out = ic.hom_pushforward(phi, gensum(f2))
        assert out == gensum(z2)

    def test_identity_assignment(self, f2):
        phi = {"a": f2.element("a"), "b": f2.element("b")}
        x = ic.GroupRingElement(f2, {f2.element("ab^-1a"): 3.0, f2.identity: -1.0})
        assert ic.hom_pushforward(phi, x) == x

    def test_relator_violation_named(self, z2, f2):
        phi = {"a": f2.element("a"), "b": f2.element("b")}
        x = gensum(z2)
        with pytest.raises(InvalidHomomorphismError) as err:
            ic.hom_pushforward(phi, x, target=f2)
        assert "aba^-1b^-1" in str(err.value)

    def test_trivial_norm_preserved(self, f2, z2, zmod5):
        rng = np.random.default_rng(12)
        window = ic.ball(f2, 2).elements
        cases = [
            {"a": z2.element("a"), "b": z2.element("b")},
            {"a": zmod5.element("a"), "b": zmod5.element("a^2")},
            {"a": f2.element("ba"), "b": f2.element("b")},
        ]
        for phi in cases:
            for _ in range(5):
                terms = {
                    window[int(i)]: complex(rng.standard_normal(),
                                            rng.standard_normal())
                    for i in rng.integers(0, len(window), 4)
                }
                x = ic.GroupRingElement(f2, terms)
                pushed = ic.hom_pushforward(phi, x)
                assert pushed.coefficient_sum() == pytest.approx(
                    x.coefficient_sum(), abs=1e-12)


class TestConvolutionOperator:
    def test_entries_are_coefficients(self, f2):
        from idealcstar.completions import ConvolutionOperator

        x = ic.GroupRingElement(f2, {f2.element("a"): 2.0,
                                     f2.element("b^-1"): 1.5 + 0.5j})
        op = ConvolutionOperator(x, 2)
        mat = op.matrix.toarray()
        for j, s in enumerate(op.domain.elements):
            col = mat[:, j]
            assert np.count_nonzero(col) == len(x.terms)
            for t_idx in np.nonzero(col)[0]:
                t = op.codomain.element(int(t_idx))
                coeff = x.terms[ic.compose(t, s.inverse())]
                assert col[t_idx] == pytest.approx(coeff)

    def test_matches_left_regular_action(self, f2):
        from idealcstar.completions import ConvolutionOperator

        x = ic.GroupRingElement.gensum(f2)
        op = ConvolutionOperator(x, 2)
        vec = np.zeros(len(op.domain))
        vec[op.domain.index_of(f2.element("ab"))] = 1.0
        out = op.apply(vec)
        # lambda(x) delta_s = sum_u delta_{us}
        expected = {ic.compose(u, f2.element("ab")) for u in f2.generators()}
        hits = {op.codomain.element(int(i)) for i in np.nonzero(out)[0]}
        assert hits == expected

    def test_sweep_is_monotone(self, f2):
        from idealcstar.completions import reduced_norm_sweep

        rows = reduced_norm_sweep(ic.GroupRingElement.gensum(f2), [2, 4, 6])
        values = [r["value"] for r in rows]
        assert values == sorted(values)


class TestReducedNormLower:
    def test_identity_element_exact_one(self, f2):
        est = ic.reduced_norm_lower(ic.GroupRingElement.delta(f2.identity), 3)
        assert est.value == pytest.approx(1.0, abs=1e-10)

    def test_z_gensum_approaches_two(self, z):
        est = ic.reduced_norm_lower(gensum(z), 100)
        # Fourier oracle: ||lambda(u + u^-1)|| = sup |2 cos theta| = 2
        assert 1.99 <= est.value <= 2.0 + 1e-9

    def test_f2_monotone_in_radius(self, f2):
        values = [ic.reduced_norm_lower(gensum(f2), r).value for r in (2, 4, 6, 8)]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert values[-1] <= 2 * math.sqrt(3) + 1e-9

    def test_never_exceeds_haagerup_upper(self, f2):
        rng = np.random.default_rng(9)
        window = ic.ball(f2, 2).elements
        for _ in range(5):
            terms = {
                window[int(i)]: complex(rng.standard_normal(), rng.standard_normal())
                for i in rng.integers(0, len(window), 3)
            }
            x = ic.GroupRingElement(f2, terms)
            low = ic.reduced_norm_lower(x, 5).value
            up = ic.haagerup_upper_bound(x).value
            assert low <= up + 1e-8


class TestUpperBounds:
    def test_haagerup_delta_e(self, f2):
        x = ic.GroupRingElement.delta(f2.identity)
        assert ic.haagerup_upper_bound(x).value == pytest.approx(1.0)

    def test_haagerup_single_generator(self, f2):
        x = ic.GroupRingElement.delta(f2.element("a"))
        assert ic.haagerup_upper_bound(x).value == pytest.approx(2.0)

    def test_haagerup_gensum(self, f2):
        value = ic.haagerup_upper_bound(gensum(f2)).value
        assert value == pytest.approx(4.0)
        assert value >= 2 * math.sqrt(3)

    def test_haagerup_needs_free_model(self, z2):
        with pytest.raises(UnsupportedModelError):
            ic.haagerup_upper_bound(gensum(z2))

    def test_powered_haagerup_beats_plain_on_gensum(self, f2):
        plain = ic.haagerup_upper_bound(gensum(f2)).value
        powered = ic.powered_haagerup_upper(gensum(f2)).value
        assert powered < plain
        assert powered >= 2 * math.sqrt(3) - 1e-9

    def test_kesten_closed_form(self, f2):
        est = ic.kesten_exact(gensum(f2))
        assert est.value == pytest.approx(2 * math.sqrt(3))
        assert ic.kesten_exact(ic.GroupRingElement.delta(f2.element("a"))) is None

    def test_reduced_upper_is_min(self, f2):
        best = ic.reduced_norm_upper(gensum(f2))
        assert best.value == pytest.approx(2 * math.sqrt(3))


class TestTrivialNorm:
    def test_gensum_exact_four(self, f2):
        est = ic.trivial_norm(gensum(f2))
        assert est.value == pytest.approx(4.0)
        assert est.kind == "exact"

    def test_cancellation(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("a"): 1.0, f2.identity: -1.0})
        est = ic.trivial_norm(x)
        assert est.value == pytest.approx(0.0)
        assert est.kind == "lower_bound"

    def test_identity(self, f2):
        est = ic.trivial_norm(ic.GroupRingElement.delta(f2.identity))
        assert est.value == pytest.approx(1.0)
        assert est.kind == "exact"

    def test_upper_bounded_by_any_unitary_rep(self, f2):
        # positivity oracle: for nonneg coefficients any unitary rep gives
        # ||pi(x)|| <= sum alpha_s, attained by the trivial representation
        rng = np.random.default_rng(3)
        window = ic.ball(f2, 2).elements
        coeffs = np.abs(rng.standard_normal(4))
        els = [window[int(i)] for i in rng.integers(0, len(window), 4)]
        x = ic.GroupRingElement(f2, dict(zip(els, coeffs)))
        rep = ic.random_rep(f2, 4, 1)
        mat = sum(c * rep.evaluate_word(el) for el, c in x.terms.items())
        assert np.linalg.norm(mat, 2) <= ic.trivial_norm(x).value + 1e-10


class TestGnsNormLower:
    def test_delta_matches_reduced(self, f2):
        x = gensum(f2)
        gns = ic.gns_norm_lower(ic.delta_e(f2), x, 4).value
        red = ic.reduced_norm_lower(x, 4).value
        assert gns == pytest.approx(red, abs=1e-6)

    def test_constant_one_gives_trivial(self, f2):
        assert ic.gns_norm_lower(ic.constant_one(f2), gensum(f2), 3).value \
            == pytest.approx(4.0)

    def test_haagerup4_radius8_beats_reduced(self, f2):
        est = ic.gns_norm_lower(ic.haagerup(f2, 4), gensum(f2), 8)
        assert 2 * math.sqrt(3) + 1e-4 < est.value <= 4.0
        assert est.meta["subspace"] == "radial"

    def test_radial_path_matches_dense(self, f2):
        from idealcstar.completions import ConvolutionOperator, _radial_gns_value
        h = ic.haagerup(f2, 2)
        x = gensum(f2)
        for radius in (2, 3):
            dense = ic.gns_norm_lower(h, x, radius).value
            radial, _ = _radial_gns_value(h, ConvolutionOperator(x, radius), 1e-10)
            assert radial == pytest.approx(dense, rel=1e-9)

    def test_rejects_indefinite(self, f2):
        bad = ic.RadialFunction(f2, lambda k: 1.0 if k == 0 else -0.9, label="bad")
        with pytest.raises(ic.GramIndefiniteError):
            ic.gns_norm_lower(bad, gensum(f2), 2)


class TestNormGapReport:
    def test_f2_gensum_gap_declared(self, f2):
        report = ic.norm_gap_report(gensum(f2), ic.IdealSpec("c0"),
                                    radius=8, gns_radius=4)
        assert report["trivial"]["value"] == pytest.approx(4.0)
        assert report["trivial"]["kind"] == "exact"
        assert report["reduced_upper"]["value"] <= 3.4642
        assert report["gap_full_vs_reduced"]
        assert report["d_exceeds_reduced"]

    def test_z2_gensum_no_gap(self, z2):
        report = ic.norm_gap_report(gensum(z2), ic.IdealSpec("cc"),
                                    radius=50, gns_radius=3, gap_tol=0.05)
        assert report["reduced_lower"]["value"] >= 3.95
        assert not report["gap_full_vs_reduced"]
        assert report["consistent_with_equality_at_gap_tol"]

    def test_identity_no_gap(self, f2):
        report = ic.norm_gap_report(ic.GroupRingElement.delta(f2.identity),
                                    ic.IdealSpec("c0"), radius=3, gns_radius=2)
        assert report["trivial"]["value"] == pytest.approx(1.0)
        assert report["reduced_lower"]["value"] == pytest.approx(1.0, abs=1e-8)
        assert not report["gap_full_vs_reduced"]

    def test_functoriality_c0_family_dominates_cc_family(self, f2):
        # ||.||_CC <= ||.||_C0 mirrored by window estimates over default families
        x = gensum(f2)
        cc = ic.norm_gap_report(x, ic.IdealSpec("cc"), radius=4, gns_radius=3)
        c0 = ic.norm_gap_report(x, ic.IdealSpec("c0"), radius=4, gns_radius=3)
        best = {}
        for rep, key in ((cc, "cc"), (c0, "c0")):
            vals = [row["value"] for row in rep["gns_lower_bounds"]
                    if "value" in row]
            best[key] = max(vals)
        assert best["c0"] >= best["cc"] - 1e-9


class TestSchurAndStates:
    def test_schur_with_one_is_identity(self, f2):
        x = gensum(f2)
        assert ic.schur_multiply(ic.constant_one(f2), x) == x

    def test_schur_with_delta_projects(self, f2):
        x = ic.GroupRingElement(f2, {f2.identity: 2.0, f2.element("a"): 3.0})
        out = ic.schur_multiply(ic.delta_e(f2), x)
        assert out.terms == {f2.identity: 2.0}

    def test_schur_scales_by_haagerup(self, f2):
        x = gensum(f2)
        out = ic.schur_multiply(ic.haagerup(f2, 2), x)
        for g in f2.generators():
            assert out.terms[g] == pytest.approx(math.exp(-0.5))

    def test_state_compose_requires_state(self, f2):
        not_state = ic.delta_e(f2)
        doubled = ic.RadialFunction(f2, lambda k: 2.0 * (k == 0), label="2delta")
        with pytest.raises(ic.PreconditionError):
            ic.state_compose(doubled, not_state)

    def test_state_compose_keeps_pd(self, f2):
        phi = ic.random_pd(f2, 3, 7)
        composed = ic.state_compose(phi, ic.haagerup(f2, 2))
        assert ic.pd_window_check(composed, ic.ball(f2, 3)).passed
        ident = ic.state_compose(phi, ic.constant_one(f2))
        for el in ic.ball(f2, 2).elements:
            assert ident(el) == pytest.approx(phi(el))


class TestEqualityCertificate:
    def test_folner_amenability_witness(self, z2):
        family = [ic.folner_box(z2, n) for n in range(2, 11)]
        cert = ic.equality_certificate(ic.IdealSpec("cc"), family, 2)
        assert cert.accepted
        assert cert.label == "amenability witness"

    def test_haagerup_c0_witness(self, f2):
        family = [ic.haagerup(f2, n) for n in range(1, 11)]
        cert = ic.equality_certificate(ic.IdealSpec("c0"), family, 3,
                                       final_deviation=0.3)
        assert cert.accepted
        assert cert.label == "Haagerup witness"

    def test_haagerup_rejected_for_cc(self, f2):
        family = [ic.haagerup(f2, n) for n in range(1, 11)]
        cert = ic.equality_certificate(ic.IdealSpec("cc"), family, 3,
                                       final_deviation=0.3)
        assert not cert.accepted
        assert any("member" in f for f in cert.failures)

    def test_explicit_threshold_schedule(self, z2):
        family = [ic.folner_box(z2, n) for n in (2, 4, 8)]
        window = ic.ball(z2, 2)
        devs = [max(abs(h(el) - 1) for el in window.elements) for h in family]
        thresholds = [d + 1e-9 for d in devs]
        cert = ic.equality_certificate(ic.IdealSpec("cc"), family, 2, thresholds)
        assert cert.accepted
        tight = [devs[0] + 1e-9, devs[1] + 1e-9, devs[2] / 2]
        assert not ic.equality_certificate(ic.IdealSpec("cc"), family, 2,
                                           tight).accepted

    def test_soundness_corrupted_families(self, f2, z2):
        good = [ic.haagerup(f2, n) for n in (2, 4, 8)]
        # corrupt 1: a non-PD member
        bad_pd = ic.RadialFunction(f2, lambda k: 1.0 if k == 0 else -0.5,
                                   tail=ic.ExpDecay(1.0, 0.5), label="notpd")
        cert = ic.equality_certificate(ic.IdealSpec("c0"), good + [bad_pd], 2,
                                       final_deviation=2.0)
        assert not cert.accepted
        # corrupt 2: a non-member
        bad_member = ic.constant_one(f2)
        cert = ic.equality_certificate(ic.IdealSpec("c0"), good + [bad_member], 2,
                                       final_deviation=2.0)
        assert not cert.accepted
        # corrupt 3: deviations increase
        backwards = [ic.haagerup(f2, n) for n in (8, 4, 2)]
        cert = ic.equality_certificate(ic.IdealSpec("c0"), backwards, 2,
                                       final_deviation=2.0)
        assert not cert.accepted

    def test_tideal_witness_from_cnd_construction(self, f2):
        # e^(-psi/n) for psi = word length: the explicit ideal construction
        psi = ic.word_length_function(f2)
        family = [ic.schoenberg(psi, 1.0 / n) for n in range(1, 9)]
        for h in family:
            assert ic.ideal_membership(h, ic.IdealSpec("tideal")).verdict == "member"
        cert = ic.equality_certificate(ic.IdealSpec("tideal"), family, 3,
                                       final_deviation=0.35)
        assert cert.accepted
        assert cert.label == "Property-(T)-ideal witness"


class TestCoproduct:
    def test_identity_is_grouplike(self, f2):
        x = ic.GroupRingElement.delta(f2.identity)
        delta = ic.coproduct(x)
        assert delta.terms == {(f2.identity, f2.identity): 1.0}

    def test_coassociativity_explicit(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("a"): 1.0, f2.element("b"): 2.0})
        assert ic.coassociativity_defect(x) == 0.0

    def test_coassociativity_random(self, f2):
        result = ic.coproduct_checks(f2, 1, samples=100)
        assert result["coassociative"]
        assert result["coassociativity_max_defect"] == 0.0

    def test_density_rank_z(self, z):
        result = ic.coproduct_density_rank(z, 2)
        assert result["rank"] == 25 == result["expected"]

    def test_density_rank_f2(self, f2):
        result = ic.coproduct_density_rank(f2, 1)
        assert result["rank"] == 25 == result["expected"]

    def test_density_rank_matrix_oracle(self, z):
        # independent oracle: assemble the actual coefficient matrix of the
        # spanning vectors Delta(delta_s)(delta_t ox e) and take its rank
        window = ic.ball(z, 2)
        padded = ic.ball(z, 4)
        coords = {}
        rows = []
        for s in window.elements:
            for t in padded.elements:
                st = ic.compose(s, t)
                if st.length <= 2:
                    key = (window.index_of(st), window.index_of(s))
                    coords.setdefault(key, len(coords))
        for s in window.elements:
            for t in padded.elements:
                st = ic.compose(s, t)
                if st.length <= 2:
                    row = np.zeros(len(coords))
                    row[coords[(window.index_of(st), window.index_of(s))]] = 1.0
                    rows.append(row)
        rank = np.linalg.matrix_rank(np.array(rows))
        assert rank == 25

    def test_mult_right_first_leg(self, f2):
        x = ic.GroupRingElement(f2, {f2.element("a"): 1.0})
        y = ic.GroupRingElement(f2, {f2.element("b"): 2.0})
        out = ic.coproduct(x).mult_right_first_leg(y)
        assert out.terms == {(f2.element("ab"), f2.element("a")): 2.0}


class TestChhSandwich:
    def test_l2_certified_gns_below_haagerup_bound(self, f2):
        rng = np.random.default_rng(101)
        b1 = ic.ball(f2, 1).elements
        for i in range(3):
            h = ic.product(ic.random_pd(f2, 3, 500 + i), ic.haagerup(f2, 1))
            assert ic.ideal_membership(h, ic.IdealSpec("lp", 2.0)).verdict \
                == "member"
            coeffs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            x = ic.GroupRingElement(f2, dict(zip(b1, coeffs)))
            gns = ic.gns_norm_lower(h, x, 4).value
            assert gns <= ic.haagerup_upper_bound(x).value + 1e-6
