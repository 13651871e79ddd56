"""Similarity transforms, mechanical verification, chart reductions."""

from __future__ import annotations

import numpy as np
import pytest

from chengsym.errors import ClassificationError, DegenerateReductionError, ReductionFailureError
from chengsym.expr import (
    atom,
    datom,
    fnrule,
    normalize,
    num,
    parse,
    pow_,
    sym,
    substitute,
)
from chengsym.odesolve import integrate_expression
from chengsym.reduction import (
    CoordinateChart,
    SimilarityTransform,
    abel1_scaling_b,
    abel1_travelling,
    abel2_scaling_b,
    abel2_travelling,
    canonical_reduce,
    chart_transport_max_residual,
    charts_for,
    classify_first_order,
    euler_constraint_residual,
    euler_scaling_b,
    euler_travelling,
    general_constraint_residual,
    general_transform,
    proportional_multiplier,
    reduce_general,
    reduce_scaling,
    reduce_space_dependent,
    reduce_travelling_wave,
    reduced_equal,
    reduced_ode_catalog,
    rewrite_quadrature,
    riccati_scaling_b,
    riccati_travelling,
    second_order_reduced,
    travelling_transform,
    verify_reduction,
)
from chengsym.symmetry import (
    cheng_system,
    scaling_ode_a,
    scaling_ode_b,
    spacedep_ode,
    travelling_ode,
)

T, X, F, N, M = sym("t"), sym("x"), sym("f"), sym("n"), sym("m")


class TestVerifyReduction:
    def test_travelling_multipliers_are_unity(self):
        report = verify_reduction(travelling_transform(), cheng_system())
        assert report.ok
        assert report.multipliers == ("1", "1")

    def test_identity_transform_passes(self):
        system = cheng_system()
        u_dep = system.dependent_named("u")
        identity = SimilarityTransform(
            name="identity",
            f_def=X,
            dep_rules=(
                ("u", fnrule(("_t", "_x"), atom("u", sym("_t"), sym("_x")))),
                ("v", fnrule(("_t", "_x"), atom("v", sym("_t"), sym("_x")))),
            ),
            new_dependent=("u", "v"),
            target=system,
        )
        # target residuals already live in (t, x); f substitution is a no-op
        pushed = [identity.push_source_residual(r) for r in system.residuals]
        for s_expr, t_expr in zip(pushed, system.residuals):
            ok, mult, _ = proportional_multiplier(s_expr, t_expr, {"u", "v"})
            assert ok and normalize(mult - 1) == 0

    def test_corrupted_transform_fails_with_leftover(self):
        c = sym("c")
        wrong = SimilarityTransform(
            name="corrupted",
            f_def=X + c * T,  # sign flip
            dep_rules=(
                ("u", fnrule(("_t", "_x"), atom("w", sym("_x") + c * sym("_t")))),
                ("v", fnrule(("_t", "_x"), atom("k", sym("_x") + c * sym("_t")))),
            ),
            new_dependent=("w", "k"),
            target=travelling_transform().target,
        )
        report = verify_reduction(wrong, cheng_system())
        assert not report.ok
        assert report.failures and report.failures[0][1] != "0"

    def test_travelling_k_elimination_matches_second_order(self):
        result = reduce_travelling_wave()
        assert result.ok
        assert result.verifications[1].multipliers == ("-1",)

    def test_stationary_speed_rejected(self):
        with pytest.raises(DegenerateReductionError):
            reduce_travelling_wave(0)

    def test_scaling_variants(self):
        res_a = reduce_scaling("A")
        assert res_a.ok
        assert res_a.verifications[0].multipliers == ("-t^(-1)*x^(-1)", "-x^(-2)")
        res_b = reduce_scaling("B")
        assert res_b.ok
        assert res_b.verifications[0].multipliers == ("-x^(-2)", "-x^(-2)")
        # elimination multiplier carries the cleared denominator
        assert res_b.verifications[1].multipliers == ("a^(-1)*w(f)^(-2)",)

    def test_scaling_b_second_order_has_cubic_term(self):
        res = reduce_scaling("B")
        text = res.reduced[1].residual_text()[0]
        assert "w(f)^3" in text


class TestGeneralReduction:
    def test_variant_i_verifies_with_reciprocal_multiplier(self):
        result = reduce_general()
        assert result.ok
        assert result.verifications[0].multipliers == (
            "-g(x)^(-1)*h(t)^(-1)", "-g(x)^(-1)*h(t)^(-1)",
        )

    def test_constant_functions_degenerate_to_translations(self):
        transform = general_transform(num(1), num(1))
        # h_a' and g_a' rewrite to 1, so du/dt of u = h_a'(t) w(f) chains
        # only through f; the quadrature variables behave as t and x
        ha_prime = datom("h_a", (1,), T)
        assert rewrite_quadrature(ha_prime, transform.quadratures) == 1
        report = verify_reduction(transform, cheng_system())
        assert report.ok and report.multipliers == ("-1", "-1")

    def test_variant_ii_requires_identity_time_function(self):
        with pytest.raises(DegenerateReductionError):
            reduce_general(h=T + 1, variant="II")
        result = reduce_general(variant="II")
        assert result.ok
        assert result.warnings

    def test_log_variables_match_scaling_reduction_numerically(self):
        # h = t, g = x gives f = log(t/x); trajectories of the general
        # system in f correspond to the first scaling reduction in e^f
        from chengsym.reduction import general_system, scaling_system_a

        gen = general_system()
        sca = scaling_system_a()
        params = {"a": 1.0, "b": 1.0}
        w0, k0 = 0.5, 0.4
        f0, f1 = 0.0, 0.6  # log of scaling span [1, e^0.6]
        probes = np.linspace(f0, f1, 7)[1:-1]
        traj_gen = integrate_expression(list(gen.rhs), "f", ["w", "k"],
                                        f0, [w0, k0], f1, params=params,
                                        forced_points=probes.tolist())
        traj_sca = integrate_expression(list(sca.rhs), "f", ["w", "k"],
                                        np.exp(f0), [w0, k0], np.exp(f1), params=params,
                                        forced_points=np.exp(probes).tolist())
        for s in probes:
            gen_w = traj_gen.interpolate(float(s))[0]
            sca_w = traj_sca.interpolate(float(np.exp(s)))[0]
            assert gen_w == pytest.approx(sca_w, abs=1e-9)


class TestCanonicalReduce:
    @pytest.mark.parametrize("case,gen,kind,target_factory,params", [
        ("case1", 1, "canonical", riccati_travelling, ("a", "b", "c")),
        ("case1", 1, "invariants", euler_travelling, ("a", "b", "c")),
        ("case1", 2, "canonical", abel1_travelling, ("a", "b", "c")),
        ("case1", 2, "invariants", lambda: abel2_travelling("derived"), ("a", "b", "c")),
        ("case2b", 1, "canonical", riccati_scaling_b, ("a", "b")),
        ("case2b", 1, "invariants", euler_scaling_b, ("a", "b")),
        ("case2b", 2, "canonical", abel1_scaling_b, ("a", "b")),
        ("case2b", 2, "invariants", abel2_scaling_b, ("a", "b")),
    ])
    def test_reproduces_shipped_targets(self, case, gen, kind, target_factory, params):
        ode = travelling_ode() if case == "case1" else scaling_ode_b()
        chart = charts_for(case, gen)[kind]
        derived = canonical_reduce(ode, chart, parameters=params)
        target = target_factory()
        assert derived.tag == target.tag
        assert reduced_equal(derived, target)

    def test_printed_second_kind_differs_except_at_unit_c(self):
        derived = canonical_reduce(
            travelling_ode(), charts_for("case1", 2)["invariants"],
            parameters=("a", "b", "c"),
        )
        printed = abel2_travelling("printed")
        assert not reduced_equal(derived, printed)
        at_c1 = normalize(
            substitute(derived.rhs[0] - printed.rhs[0], {"c": num(1)})
        )
        assert at_c1 == 0

    def test_first_scaling_reduction_tags(self):
        iia = scaling_ode_a()
        tags = {}
        for gen, kind in [(1, "canonical"), (1, "invariants"), (2, "canonical"), (2, "invariants")]:
            derived = canonical_reduce(iia, charts_for("case2a", gen)[kind], parameters=("a", "b"))
            tags[(gen, kind)] = derived.tag
        assert tags == {
            (1, "canonical"): "RiccatiFirstOrder",
            (1, "invariants"): "EulerLinearFirstOrder",
            (2, "canonical"): "AbelFirstKind",
            (2, "invariants"): "AbelSecondKind",
        }

    def test_spacedep_translation_gives_riccati_scaling_gives_abel(self):
        sd = spacedep_ode("derived")
        riccati = canonical_reduce(sd, charts_for("space-dep", 1)["canonical"], parameters=())
        abel = canonical_reduce(sd, charts_for("space-dep", 2)["canonical"], parameters=())
        assert riccati.tag == "RiccatiFirstOrder"
        assert abel.tag == "AbelFirstKind"

    def test_chart_that_fails_to_close_reports_leftover(self):
        # n = f alone cannot eliminate the phase variables
        bad = CoordinateChart(
            "bad", "canonical",
            n_def=sym("w0"), m_def=sym("w1") + F,
            inverse_w0=N, inverse_w1=M - F,
        )
        with pytest.raises(ReductionFailureError) as err:
            canonical_reduce(travelling_ode(), bad, parameters=("a", "b", "c"))
        assert "f" in err.value.leftover

    def test_classification_patterns(self):
        a, b = sym("a"), sym("b")
        assert classify_first_order(parse("m^2*n - m/n"), N, M) == "RiccatiFirstOrder"
        assert classify_first_order(parse("n + m/n"), N, M) == "EulerLinearFirstOrder"
        assert classify_first_order(parse("m^3 + m/n"), N, M) == "AbelFirstKind"
        assert classify_first_order(parse("1/m + m/n"), N, M) == "AbelSecondKind"
        with pytest.raises(ClassificationError):
            classify_first_order(parse("n + m*n"), N, M)  # linear but not Euler


class TestSpaceDependent:
    def test_elimination_reproduces_single_equation_form(self):
        result = reduce_space_dependent()
        assert result.elimination_ok
        assert result.elimination_multiplier == "a^(-1)"

    def test_exactly_one_reduced_variant_verifies(self):
        result = reduce_space_dependent()
        assert result.verdict_derived.ok
        assert not result.verdict_printed.ok
        assert result.selected_form == "derived"

    def test_euler_constraint_examples(self):
        assert euler_constraint_residual(3 * X) == 0
        assert euler_constraint_residual(pow_(X, 2)) != 0

    def test_general_constraint_example(self):
        assert general_constraint_residual(pow_(X, 2), pow_(X, 2)) == 0

    def test_nonconstant_c_reports_failed_ansatz(self):
        result = reduce_space_dependent(c_expr=X)
        assert result.general_verdicts
        assert not any(v.ok for v in result.general_verdicts)
        assert any("prefactor" in w for w in result.warnings)


class TestChartTransport:
    def test_first_and_second_kind_solutions_agree_through_chart_relation(self):
        # sharing n = f*w, the scaling generator's two charts satisfy
        # m_canonical = 1/(m_invariant + n); integrate both reductions from
        # consistent initial data and compare pointwise
        from chengsym.expr import Binding

        params = {"a": 1, "b": 1, "c": 1}
        subs = Binding({k: num(v) for k, v in params.items()})
        rhs_first = substitute(abel1_travelling().rhs[0], subs)
        rhs_second = substitute(abel2_travelling("derived").rhs[0], subs)
        n0, n1 = 1.0, 1.6
        m_inv0 = 0.8
        m_can0 = 1.0 / (m_inv0 + n0)
        probes = np.linspace(n0, n1, 9)[1:-1].tolist()
        traj_second = integrate_expression([rhs_second], "n", ["m"], n0, [m_inv0], n1,
                                           forced_points=probes)
        traj_first = integrate_expression([rhs_first], "n", ["m"], n0, [m_can0], n1,
                                          forced_points=probes)
        for n_val in probes:
            m_inv = traj_second.interpolate(n_val)[0]
            m_can = traj_first.interpolate(n_val)[0]
            assert m_can == pytest.approx(1.0 / (m_inv + n_val), abs=1e-8)

    def test_travelling_second_kind_transport(self):
        ode = travelling_ode(a=num(1), b=num(1), c=num(1))
        reduced = second_order_reduced(ode, "tw")
        traj = integrate_expression(
            list(reduced.rhs), "f", ["w0", "w1"], 1.0, [1.0, 0.5], 2.0,
        )
        assert traj.status == "completed"
        chart = charts_for("case1", 2)["invariants"]
        target = abel2_travelling("derived")
        from chengsym.expr import Binding

        target_rhs = substitute(target.rhs[0], Binding({"a": 1, "b": 1, "c": 1}))
        from chengsym.reduction import first_order_scalar

        numeric_target = first_order_scalar("tw-abel2[111]", target_rhs, parameters=())
        worst = chart_transport_max_residual(ode, chart, numeric_target, traj)
        assert worst < 1e-7

    def test_chart_round_trip_on_canonical_chart(self):
        ode = travelling_ode(a=num(1), b=num(1), c=num(1))
        reduced = second_order_reduced(ode, "tw")
        traj = integrate_expression(list(reduced.rhs), "f", ["w0", "w1"], 1.0, [1.0, 0.5], 2.0)
        chart = charts_for("case1", 1)["canonical"]
        from chengsym.expr import Binding
        from chengsym.reduction import first_order_scalar

        rhs = substitute(riccati_travelling().rhs[0], Binding({"a": 1, "b": 1, "c": 1}))
        target = first_order_scalar("tw-riccati[111]", rhs, parameters=())
        assert chart_transport_max_residual(ode, chart, target, traj) < 1e-7


class TestCatalog:
    def test_identifiers_are_stable(self):
        catalog = reduced_ode_catalog()
        expected = {
            "case1.system", "case1.ode2", "case1.riccati", "case1.euler",
            "case1.abel1", "case1.abel2", "case1.abel2-printed",
            "case2a.system", "case2a.ode2", "case2b.system", "case2b.ode2",
            "case2b.riccati", "case2b.euler", "case2b.abel1", "case2b.abel2",
            "general-I.system", "general-II.system", "space-dep.ode2",
        }
        assert expected <= set(catalog)

    def test_tags_match_names(self):
        catalog = reduced_ode_catalog()
        assert catalog["case1.riccati"].tag == "RiccatiFirstOrder"
        assert catalog["case1.euler"].tag == "EulerLinearFirstOrder"
        assert catalog["case1.abel1"].tag == "AbelFirstKind"
        assert catalog["case1.abel2"].tag == "AbelSecondKind"
        assert catalog["case2b.abel2"].tag == "AbelSecondKind"
        assert catalog["case1.ode2"].tag == "SecondOrderScalar"
        assert catalog["case1.system"].tag == "FirstOrderSystem"
