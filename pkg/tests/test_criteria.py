"""Criteria tests: angle flow closed forms, feasibility, witnesses, functionals."""

import math

import numpy as np
import pytest

from oscillint.criteria import (
    INCONCLUSIVE,
    NON_OSCILLATORY,
    OSCILLATORY,
    IntervalWitness,
    TestFunction,
    Verdict,
    angle_line_crossings,
    check_nonoscillation,
    check_oscillation,
    check_undamped_equation,
    default_lambda_grid,
    find_interval_witness,
    half_sine_bridge,
    horizon_nonoscillation_test,
    interval_oscillation_test,
    lambda_feasibility,
    prufer_angle_field,
    sign_windows,
    variational_functional,
)
from oscillint.expr import Mul, Constant, parse_text
from oscillint.numerics import Grid, integrate_ode, zero_crossing
from oscillint.transform import SecondOrderSpec, SystemSpec, reduce_equation


def make_system(p="0", q="0", r="0", s="0", f="0", g="0", t0=0.0):
    return SystemSpec(parse_text(p), parse_text(q), parse_text(r), parse_text(s),
                      parse_text(f), parse_text(g), t0)


def harmonic(g="0"):
    # phi'' + phi = forcing reduced to first order
    return make_system(q="1", r="-1", g=g)


def decaying_forced():
    # phi'' - phi = -exp(-t) reduced to first order
    return make_system(q="1", r="1", g="-exp(-t)")


class TestAngleField:
    def test_harmonic_angle_speed_is_constant(self):
        field = prufer_angle_field(harmonic())
        for theta in (0.0, 0.7, -2.0, math.pi / 2):
            assert field(1.3, np.array([theta]))[0] == pytest.approx(-1.0, abs=1e-15)

    def test_decoupled_system_has_frozen_angle(self):
        field = prufer_angle_field(make_system(p="sin(t)", s="sin(t)"))
        for theta in (0.0, 0.5, 1.2):
            assert field(2.0, np.array([theta]))[0] == pytest.approx(0.0, abs=1e-15)

    def test_one_way_coupling(self):
        field = prufer_angle_field(make_system(q="1"))
        theta = 0.9
        expected = -math.sin(theta) ** 2
        assert field(0.0, np.array([theta]))[0] == pytest.approx(expected, abs=1e-15)


class TestIntervalOscillation:
    def test_harmonic_on_half_period(self):
        verdict = interval_oscillation_test(harmonic(), (0.0, math.pi))
        assert verdict.outcome == OSCILLATORY
        assert verdict.evidence["descent"] == pytest.approx(math.pi, abs=1e-8)

    def test_harmonic_on_short_interval(self):
        verdict = interval_oscillation_test(harmonic(), (0.0, 3.0))
        assert verdict.outcome == NON_OSCILLATORY
        assert verdict.evidence["descent"] == pytest.approx(3.0, abs=1e-8)

    def test_exponential_equation_never_oscillates(self):
        # phi'' - phi = 0: the angle settles at the pi/4 equilibrium
        verdict = interval_oscillation_test(make_system(q="1", r="1"), (0.0, 10.0))
        assert verdict.outcome == NON_OSCILLATORY
        assert verdict.evidence["descent"] < math.pi / 2

    def test_negative_coupling_is_inconclusive(self):
        verdict = interval_oscillation_test(make_system(q="-1", r="-1"), (0.0, 5.0))
        assert verdict.outcome == INCONCLUSIVE
        assert "q" in verdict.notes


class TestHorizonClassification:
    def test_harmonic_oscillates(self):
        verdict = horizon_nonoscillation_test(harmonic(), (0.0, 30.0))
        assert verdict.outcome == OSCILLATORY
        # default angle start pi/2 tracks the member with phi(0) = 0
        crossings = verdict.evidence["crossings"]
        expected = [k * math.pi for k in range(1, 10)]
        assert len(crossings) == len(expected)
        assert np.max(np.abs(np.array(crossings) - np.array(expected))) < 1e-6

    def test_exponential_equation_is_nonoscillatory(self):
        verdict = horizon_nonoscillation_test(make_system(q="1", r="1"), (0.0, 30.0))
        assert verdict.outcome == NON_OSCILLATORY
        assert verdict.evidence["crossings"] == []

    def test_frozen_angle_is_nonoscillatory(self):
        verdict = horizon_nonoscillation_test(make_system(), (0.0, 10.0))
        assert verdict.outcome == NON_OSCILLATORY

    def test_crossing_count_matches_direct_integration(self):
        sys = harmonic()
        crossings = angle_line_crossings(sys, (0.0, 20.0), theta0=0.0)
        traj = integrate_ode(sys.field(), [1.0, 0.0], (0.0, 20.0),
                             events=[zero_crossing(0)])
        direct = [ev.time for ev in traj.events if ev.kind == "zero-crossing"]
        assert len(crossings) == len(direct)
        assert np.max(np.abs(np.array(crossings) - np.array(direct))) < 1e-6


class TestLambdaFeasibility:
    def test_decaying_forced_lower_bound(self):
        sys = decaying_forced()
        grid = Grid.uniform(0.0, 30.0, 2048)
        interval = lambda_feasibility(sys, grid)
        assert interval is not None
        assert interval[0] == pytest.approx(1.0, abs=1e-6)
        assert math.isinf(interval[1])

    def test_everything_nonnegative_admits_zero(self):
        sys = make_system(q="1", r="t", f="t^2", g="1")
        interval = lambda_feasibility(sys, Grid.uniform(0.0, 10.0, 513))
        assert interval is not None
        assert interval[0] == 0.0

    def test_unsatisfiable_flat_constraint(self):
        sys = make_system(q="1", g="-1")
        assert lambda_feasibility(sys, Grid.uniform(0.0, 5.0, 257)) is None

    def test_agrees_with_brute_force_scan(self):
        sys = decaying_forced()
        grid = Grid.uniform(0.0, 10.0, 513)
        interval = lambda_feasibility(sys, grid)
        ts = grid.nodes
        from oscillint.transform import alpha_lambda
        base = alpha_lambda(sys, 0.0, grid)
        from oscillint.expr import sample
        r_vals = sample(sys.r, ts)
        g_vals = sample(sys.g, ts)
        for lam in np.linspace(0.0, 3.0, 400):
            alpha = base.growth * lam + base.alpha
            ok = (np.min(alpha) >= -1e-12
                  and np.min(r_vals * alpha + g_vals) >= -1e-12)
            inside = interval is not None and interval[0] <= lam <= interval[1]
            assert ok == inside, lam


class TestNonoscillationCheck:
    def test_decaying_forced_certified(self):
        verdict = check_nonoscillation(decaying_forced(), (0.0, 30.0))
        assert verdict.outcome == NON_OSCILLATORY
        assert verdict.evidence["lambda_witness"] == pytest.approx(1.0, abs=1e-6)

    def test_forced_harmonic_inconclusive(self):
        verdict = check_nonoscillation(harmonic(g="sin(t)"), (0.0, 30.0))
        assert verdict.outcome == INCONCLUSIVE

    def test_negative_coupling_inconclusive(self):
        verdict = check_nonoscillation(make_system(q="-1"), (0.0, 10.0))
        assert verdict.outcome == INCONCLUSIVE
        assert "q" in verdict.notes

    def test_oscillatory_companion_inconclusive(self):
        # homogeneous harmonic: feasibility trivially holds, companion swings
        verdict = check_nonoscillation(harmonic(), (0.0, 30.0))
        assert verdict.outcome == INCONCLUSIVE
        assert "companion" in verdict.notes


class TestSignWindows:
    def test_sine_positive_window(self):
        grid = Grid.uniform(0.0, 2.0 * math.pi, 257)
        windows = sign_windows(np.sin(grid.nodes), grid, required_sign=1)
        assert len(windows) == 1
        assert windows[0][0] == 0.0
        assert windows[0][1] == pytest.approx(math.pi, abs=1e-12)

    def test_zero_values_cover_whole_span(self):
        grid = Grid.uniform(0.0, 1.0, 65)
        for sign in (-1, 1):
            windows = sign_windows(np.zeros(65), grid, required_sign=sign)
            assert windows == [(0.0, 1.0)]

    def test_linear_negative_window(self):
        grid = Grid.uniform(0.0, 2.0, 201)
        windows = sign_windows(grid.nodes - 1.0, grid, required_sign=-1)
        assert len(windows) == 1
        assert windows[0] == (0.0, pytest.approx(1.0, abs=1e-12))

    def test_singletons_dropped(self):
        grid = Grid.uniform(0.0, 4.0, 5)
        values = np.array([-1.0, 1.0, -1.0, -1.0, -1.0])
        assert sign_windows(values, grid, required_sign=1) == []


class TestWitnessSearch:
    def test_forced_harmonic_witness_pattern(self):
        sys = harmonic(g="sin(t)")
        witness = find_interval_witness(sys, 0.0, [0.0], (0.0, 4.0 * math.pi))
        assert witness is not None
        assert witness.lam == 0.0
        expected = (math.pi, 2 * math.pi, 2 * math.pi, 3 * math.pi)
        got = (witness.s1, witness.t1, witness.s2, witness.t2)
        assert np.max(np.abs(np.array(got) - np.array(expected))) < 1e-9
        assert min(witness.osc_margins) > -1e-6
        assert min(witness.sign_margins) > -1e-9

    def test_homogeneous_oscillatory_degenerate_windows(self):
        witness = find_interval_witness(harmonic(), 0.0, [0.0], (0.0, 4.0 * math.pi))
        assert witness is not None
        # equalities hold everywhere, so the span splits into two halves
        assert witness.t1 == witness.s2

    def test_nonoscillatory_equation_has_no_witness(self):
        sys = decaying_forced()
        grid = Grid.uniform(0.0, 10.0, 513)
        lams = default_lambda_grid(sys, grid)
        assert find_interval_witness(sys, 0.0, lams, (0.0, 10.0),
                                     grid_nodes=513) is None

    def test_witness_ordering_validated(self):
        with pytest.raises(ValueError, match="s1 < t1"):
            IntervalWitness(1.0, 0.5, 2.0, 3.0, 0.0, (0, 0, 0, 0), (0, 0))


class TestOscillationCheck:
    def test_forced_harmonic_oscillatory(self):
        verdict = check_oscillation(harmonic(g="sin(t)"), (0.0, 16.0 * math.pi))
        assert verdict.outcome == OSCILLATORY
        witnesses = verdict.evidence["witnesses"]
        assert len(witnesses) == 8
        for _, witness in witnesses:
            for endpoint in (witness.s1, witness.t1, witness.s2, witness.t2):
                assert abs(endpoint / math.pi - round(endpoint / math.pi)) < 1e-3

    def test_decaying_forced_inconclusive(self):
        verdict = check_oscillation(decaying_forced(), (0.0, 20.0))
        assert verdict.outcome == INCONCLUSIVE

    def test_sign_changing_coupling_inconclusive(self):
        verdict = check_oscillation(make_system(q="cos(t)", r="-1"), (0.0, 20.0))
        assert verdict.outcome == INCONCLUSIVE
        assert "q" in verdict.notes

    def test_periodic_mode_notes_extension(self):
        verdict = check_oscillation(harmonic(g="sin(t)"), (0.0, 16.0 * math.pi),
                                    periodic=2.0 * math.pi)
        assert verdict.outcome == OSCILLATORY
        assert "period" in verdict.notes

    def test_monotone_in_horizon(self):
        sys = harmonic(g="sin(t)")
        scan = [0.0, math.pi / 2, math.pi]
        short = check_oscillation(sys, (0.0, 8.0 * math.pi), scan=scan)
        long = check_oscillation(sys, (0.0, 16.0 * math.pi), scan=scan)
        assert short.outcome == OSCILLATORY
        assert long.outcome == OSCILLATORY


class TestVariationalFunctional:
    def test_balanced_half_sine(self):
        u = half_sine_bridge(0.0, math.pi)
        value = variational_functional(parse_text("1"), parse_text("1"), u)
        assert abs(value) <= 1e-8

    def test_stiff_restoring_term(self):
        u = half_sine_bridge(0.0, math.pi)
        value = variational_functional(parse_text("1"), parse_text("4"), u)
        assert value == pytest.approx(3.0 * math.pi / 2.0, abs=1e-6)

    def test_quadratic_homogeneity(self):
        u = half_sine_bridge(0.0, math.pi)
        doubled = TestFunction(Mul(Constant(2.0), u.u), u.interval)
        a, c = parse_text("1"), parse_text("3")
        single = variational_functional(a, c, u)
        assert variational_functional(a, c, doubled) == pytest.approx(
            4.0 * single, rel=1e-12)

    def test_invalid_test_function_rejected(self):
        with pytest.raises(ValueError, match="vanish"):
            TestFunction(parse_text("1 + t"), (0.0, 1.0))
        with pytest.raises(ValueError, match="identically"):
            TestFunction(parse_text("0"), (0.0, 1.0))


class TestUndampedCheck:
    def equation(self, a="1", b="0", c="1", d="sin(t)"):
        return SecondOrderSpec(parse_text(a), parse_text(b), parse_text(c),
                               parse_text(d), 0.0)

    def test_forced_harmonic_equation(self):
        verdict = check_undamped_equation(self.equation(), (0.0, 8.0 * math.pi))
        assert verdict.outcome == OSCILLATORY
        first = verdict.evidence["records"][0]
        (s1, t1), (s2, t2) = first["windows"]
        expected = (math.pi, 2 * math.pi, 2 * math.pi, 3 * math.pi)
        assert np.max(np.abs(np.array([s1, t1, s2, t2]) - np.array(expected))) < 1e-6
        assert min(first["functionals"]) >= -1e-9

    def test_single_signed_forcing_inconclusive(self):
        verdict = check_undamped_equation(self.equation(c="-1", d="-exp(-t)"),
                                          (0.0, 20.0))
        assert verdict.outcome == INCONCLUSIVE

    def test_zero_restoring_coefficient_inconclusive(self):
        verdict = check_undamped_equation(self.equation(c="0"), (0.0, 8.0 * math.pi))
        assert verdict.outcome == INCONCLUSIVE

    def test_damped_equation_inconclusive(self):
        verdict = check_undamped_equation(self.equation(b="1"), (0.0, 10.0))
        assert verdict.outcome == INCONCLUSIVE
        assert "damping" in verdict.notes

    def test_generalization_on_forced_harmonic(self):
        # when the variational test certifies the equation, the system-level
        # witness search with lam = 0 must certify the reduction as well
        eq = self.equation()
        horizon = (0.0, 8.0 * math.pi)
        assert check_undamped_equation(eq, horizon).outcome == OSCILLATORY
        sys = reduce_equation(eq)
        verdict = check_oscillation(sys, horizon)
        assert verdict.outcome == OSCILLATORY


class TestPruferDirectEquivalence:
    def test_random_homogeneous_systems(self):
        rng = np.random.default_rng(20240815)
        for _ in range(10):
            q0 = rng.uniform(0.2, 1.5)
            q1 = rng.uniform(0.0, 0.9) * q0
            r0, r1 = rng.uniform(-1.5, 1.5), rng.uniform(0.0, 1.0)
            p0, s0 = rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)
            w = rng.uniform(0.5, 2.0)
            sys = make_system(
                p=f"{p0} * cos({w} * t)",
                q=f"{q0} + {q1} * sin({w} * t)",
                r=f"{r0} + {r1} * cos(t)",
                s=f"{s0} * sin(t)",
            )
            crossings = angle_line_crossings(sys, (0.0, 20.0), theta0=0.0)
            traj = integrate_ode(sys.field(), [1.0, 0.0], (0.0, 20.0),
                                 events=[zero_crossing(0)])
            direct = [ev.time for ev in traj.events if ev.kind == "zero-crossing"]
            assert len(crossings) == len(direct), (crossings, direct)


class TestVerdictType:
    def test_unknown_outcome_rejected(self):
        with pytest.raises(ValueError, match="outcome"):
            Verdict("maybe", (0.0, 1.0))

    def test_decisive_needs_evidence(self):
        with pytest.raises(ValueError, match="evidence"):
            Verdict(OSCILLATORY, (0.0, 1.0))
