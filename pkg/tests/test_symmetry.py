"""Prolongation, the symmetry condition, flows and the generator catalogue."""

from __future__ import annotations

import math

import pytest

from chengsym.errors import UnsupportedOrderError
from chengsym.expr import (
    atom,
    datom,
    normalize,
    num,
    parse_vector_field_text,
    pow_,
    sym,
    to_text,
)
from chengsym.symmetry import (
    check_symmetry,
    cheng_system,
    commutator,
    general_t_family,
    general_x_family,
    group_flow,
    is_zero_field,
    ode_scaling,
    ode_translation,
    prolong,
    scaling_ode_a,
    scaling_t,
    scaling_x,
    spacedep_system,
    spacedep_x_family,
    standard_symmetry_suite,
    symmetry_residual,
    translation_x,
    travelling_ode,
    vector_field,
)

F = sym("f")


class TestProlong:
    def test_translation_prolongs_to_zero(self):
        ode = travelling_ode()
        pro = prolong(ode_translation(ode), 2, ode)
        assert pro.coefficient("w", (1,)) == 0
        assert pro.coefficient("w", (2,)) == 0

    def test_scaling_first_order_coefficient(self):
        ode = travelling_ode()
        pro = prolong(ode_scaling(ode), 1, ode)
        wp = datom("w", (1,), F)
        assert normalize(pro.coefficient("w", (1,)) - (-2 * wp)) == 0

    def test_scaling_second_order_coefficient(self):
        ode = travelling_ode()
        pro = prolong(ode_scaling(ode), 2, ode)
        wpp = datom("w", (2,), F)
        assert normalize(pro.coefficient("w", (2,)) - (-3 * wpp)) == 0

    def test_order_three_rejected(self):
        ode = travelling_ode()
        with pytest.raises(UnsupportedOrderError):
            prolong(ode_translation(ode), 3, ode)

    def test_mixed_derivative_path_independence(self):
        # eta for u_{tx} may be built via t-then-x or x-then-t
        system = cheng_system()
        field = general_x_family()
        pro = prolong(field, 2, system)
        t, x = sym("t"), sym("x")
        from chengsym.expr import differentiate, mul, add
        from chengsym.symmetry import _to_jet_expression

        dep = system.dependent_named("u")
        xi = {s: _to_jet_expression(field.coefficient(s), system) for s in (t, x)}
        eta_t = pro.coefficient("u", (1, 0))
        alt = normalize(
            differentiate(eta_t, x)
            - add(*(mul(dep.jet(tuple(a + b for a, b in zip((1, 0), e))),
                        differentiate(xi[s], x))
                    for s, e in ((t, (1, 0)), (x, (0, 1)))))
        )
        assert normalize(pro.coefficient("u", (1, 1)) - alt) == 0


class TestSymmetryResidual:
    def test_general_x_family_identically_zero(self):
        system = cheng_system()
        residuals = symmetry_residual(system, general_x_family())
        assert [normalize(r) for r in residuals] == [num(0), num(0)]

    def test_general_t_family_identically_zero(self):
        system = cheng_system()
        residuals = symmetry_residual(system, general_t_family())
        assert [normalize(r) for r in residuals] == [num(0), num(0)]

    def test_u_direction_is_not_a_symmetry(self):
        system = cheng_system()
        residuals = symmetry_residual(system, vector_field(system, label="d/du", u=1))
        v = atom("v", sym("t"), sym("x"))
        a = sym("a")
        assert normalize(residuals[0] - a * v) == 0

    def test_travelling_ode_scaling(self):
        ode = travelling_ode()
        residuals = symmetry_residual(ode, ode_scaling(ode))
        assert normalize(residuals[0]) == 0


class TestCheckSymmetry:
    def test_time_scaling_passes(self):
        system = cheng_system()
        assert check_symmetry(system, scaling_t(system)).ok

    def test_sign_flipped_space_scaling_fails(self):
        system = cheng_system()
        flipped = vector_field(system, label="flipped", x=sym("x"), v=sym("v"))
        check = check_symmetry(system, flipped)
        assert not check.ok
        u = atom("u", sym("t"), sym("x"))
        v = atom("v", sym("t"), sym("x"))
        a = sym("a")
        assert normalize(check.per_equation[0].residual - 2 * a * u * v) == 0

    def test_spacedep_x_family_affine_instance(self):
        # c(x) = x: the printed family x d/dx - u d/du satisfies the condition
        x, u = sym("x"), sym("u")
        system = spacedep_system(x)
        field = vector_field(system, label="affine-instance", x=x, u=-u)
        assert check_symmetry(system, field).ok

    def test_spacedep_x_family_fails_for_general_c(self):
        # the leftover term is -c*c''*u, so abstract c cannot pass
        system = spacedep_system()
        assert not check_symmetry(system, spacedep_x_family()).ok

    def test_standard_suite_all_pass(self):
        for entry in standard_symmetry_suite():
            check = check_symmetry(entry.system, entry.field)
            assert check.ok, f"{entry.label} failed: {[to_text(e.residual) for e in check.per_equation]}"

    def test_printed_translation_of_first_scaling_reduction_fails(self):
        # only f d/df (not d/df) generates a symmetry of that equation
        ode = scaling_ode_a()
        assert not check_symmetry(ode, ode_translation(ode)).ok
        assert check_symmetry(ode, vector_field(ode, label="corrected", f=F)).ok


class TestGroupFlow:
    def test_translation(self):
        system = cheng_system()
        out = group_flow(translation_x(system), 0.3, {"t": 1, "x": 2, "u": 5, "v": 7})
        assert out == {"t": 1, "x": 2.3, "u": 5, "v": 7}

    def test_scaling_exact_exponential(self):
        system = cheng_system()
        point = {"t": 1.5, "x": 2.0, "u": 5.0, "v": 7.0}
        out = group_flow(scaling_t(system), 0.25, point)
        assert out["t"] == pytest.approx(1.5 * math.exp(0.25), rel=1e-15)
        assert out["u"] == pytest.approx(5.0 * math.exp(-0.25), rel=1e-15)
        assert out["x"] == 2.0 and out["v"] == 7.0

    def test_identity_at_zero(self):
        system = cheng_system()
        point = {"t": 1.0, "x": 2.0, "u": 3.0, "v": 4.0}
        assert group_flow(scaling_x(system), 0.0, point) == point

    @pytest.mark.parametrize("make_field", [translation_x, scaling_t])
    def test_group_law(self, make_field):
        system = cheng_system()
        field = make_field(system)
        point = {"t": 1.2, "x": 0.7, "u": 2.0, "v": 0.5}
        for e1, e2 in [(0.3, 0.5), (-0.4, 0.9)]:
            two_step = group_flow(field, e1, group_flow(field, e2, point))
            one_step = group_flow(field, e1 + e2, point)
            for key in point:
                assert two_step[key] == pytest.approx(one_step[key], abs=1e-8)

    def test_numeric_fallback_matches_exact_scaling(self):
        # nonlinear coefficient forces the integrator path
        ode = scaling_ode_a()
        from chengsym.expr import log_
        field = vector_field(ode, label="log-scaling", f=F * log_(F), w=-sym("w"))
        point = {"f": 1.5, "w": 2.0}
        out = group_flow(field, 0.2, point)
        # flow of f log f d/df: log f(eps) = log(f0) * e^eps
        assert out["f"] == pytest.approx(math.exp(math.log(1.5) * math.exp(0.2)), rel=1e-9)
        assert out["w"] == pytest.approx(2.0 * math.exp(-0.2), rel=1e-9)

    def test_flow_escaping_to_singularity_reports_partial_trajectory(self):
        from chengsym.errors import IntegrationFailureError

        ode = travelling_ode()
        field = vector_field(ode, label="quadratic", f=pow_(F, 2), w=0)
        with pytest.raises(IntegrationFailureError) as err:
            group_flow(field, 2.0, {"f": 1.0, "w": 1.0})
        assert err.value.trajectory is not None
        assert err.value.trajectory.status == "singular-stop"


class TestCommutator:
    def test_general_families_commute_symbolically(self):
        bracket = commutator(general_x_family(), general_t_family())
        assert is_zero_field(bracket)

    def test_translation_scaling_bracket(self):
        system = cheng_system()
        bracket = commutator(translation_x(system), scaling_x(system))
        # [d/dx, x d/dx - v d/dv] = d/dx
        assert normalize(bracket.coefficient("x") - 1) == 0
        assert bracket.coefficient("v") == 0


class TestVectorFieldText:
    def test_parse_general_family_text(self):
        pairs = parse_vector_field_text("-v*D[g,1](x) d/dv + g(x) d/dx")
        table = {coord: to_text(coeff) for coord, coeff in pairs}
        assert table == {"v": "-v*g'(x)", "x": "g(x)"}

    def test_bare_direction_means_unit_coefficient(self):
        pairs = parse_vector_field_text("d/dx")
        assert pairs == [("x", num(1))]

    def test_round_trip_through_field_text(self):
        system = cheng_system()
        field = scaling_x(system)
        pairs = parse_vector_field_text(field.text())
        rebuilt = vector_field(system, label="rt", **{c: e for c, e in pairs})
        for coord in ("t", "x", "u", "v"):
            assert normalize(rebuilt.coefficient(coord) - field.coefficient(coord)) == 0
