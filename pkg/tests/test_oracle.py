"""Oracle tests against closed-form solutions and seeded ensembles."""

import math

import numpy as np
import pytest

from oscillint.numerics import Tolerances
from oscillint.oracle import (
    MIXED_OBSERVED,
    NONOSCILLATORY_OBSERVED,
    OSCILLATORY_OBSERVED,
    Ensemble,
    default_ensemble,
    empirical_classification,
    export_trace,
    member_zero_times,
    simulate_ensemble,
)
from oscillint.expr import parse_text
from oscillint.transform import SystemSpec


def make_system(p="0", q="0", r="0", s="0", f="0", g="0", t0=0.0):
    return SystemSpec(parse_text(p), parse_text(q), parse_text(r), parse_text(s),
                      parse_text(f), parse_text(g), t0)


def harmonic(g="0"):
    return make_system(q="1", r="-1", g=g)


class TestEnsembleConstruction:
    def test_default_shape(self):
        ens = default_ensemble((0.0, 30.0))
        assert len(ens) == 16
        assert ens.initial_conditions[0] == (1.0, 0.0)
        assert ens.initial_conditions[1] == (0.0, 1.0)
        for phi0, psi0 in ens.initial_conditions[2:]:
            assert math.hypot(phi0, psi0) == pytest.approx(1.0, abs=1e-12)

    def test_seed_reproducibility(self):
        a = default_ensemble((0.0, 10.0), seed=42)
        b = default_ensemble((0.0, 10.0), seed=42)
        assert a.initial_conditions == b.initial_conditions
        c = default_ensemble((0.0, 10.0), seed=43)
        assert c.initial_conditions != a.initial_conditions

    def test_too_small_rejected(self):
        with pytest.raises(ValueError, match="two members"):
            Ensemble(((1.0, 0.0),), 0, (0.0, 1.0))
        with pytest.raises(ValueError, match="increasing"):
            Ensemble(((1.0, 0.0), (0.0, 1.0)), 0, (1.0, 1.0))


class TestSimulation:
    def test_harmonic_cosine_zeros(self):
        ens = Ensemble(((1.0, 0.0), (0.0, 1.0)), 0, (0.0, 30.0))
        trajs = simulate_ensemble(harmonic(), ens)
        zeros = member_zero_times(trajs[0])
        expected = [math.pi / 2 + k * math.pi for k in range(10)]
        assert len(zeros) == len(expected)
        assert np.max(np.abs(np.array(zeros) - np.array(expected))) < 1e-6

    def test_trivial_member_records_no_crossings(self):
        ens = Ensemble(((1.0, 0.0), (0.0, 0.0)), 0, (0.0, 20.0))
        trajs = simulate_ensemble(harmonic(), ens)
        assert member_zero_times(trajs[1]) == []
        assert not np.any(trajs[1].states)

    def test_forced_harmonic_against_closed_form(self):
        # phi'' + phi = sin t from (1, 0):
        # phi = cos t + (sin t - t cos t) / 2
        ens = Ensemble(((1.0, 0.0), (0.0, 1.0)), 0, (0.0, 20.0))
        trajs = simulate_ensemble(harmonic(g="sin(t)"), ens)
        ts = np.linspace(0.0, 20.0, 400)
        phi = trajs[0].component(0)(ts)
        exact = np.cos(ts) + 0.5 * (np.sin(ts) - ts * np.cos(ts))
        assert np.max(np.abs(phi - exact)) < 1e-5


class TestClassification:
    def test_harmonic_oscillatory_observed(self):
        ens = default_ensemble((0.0, 30.0))
        verdict = empirical_classification(simulate_ensemble(harmonic(), ens))
        assert verdict.outcome == OSCILLATORY_OBSERVED
        assert all(n >= 8 for n in verdict.zero_counts)

    def test_decaying_forced_nonoscillatory_observed(self):
        # phi'' - phi = -exp(-t): the (1,0) member grows like e^t, no zeros
        sys = make_system(q="1", r="1", g="-exp(-t)")
        ens = default_ensemble((0.0, 30.0))
        tol = Tolerances(escape_magnitude=1e15)
        verdict = empirical_classification(simulate_ensemble(sys, ens, tol))
        assert verdict.outcome == NONOSCILLATORY_OBSERVED
        assert verdict.zero_counts[0] == 0

    def test_escape_counts_as_nonoscillation_witness(self):
        # same growth but with the default escape ceiling: the trajectory
        # stops early, sign-definite, and still reads as non-oscillating
        sys = make_system(q="1", r="1", g="-exp(-t)")
        ens = default_ensemble((0.0, 30.0))
        verdict = empirical_classification(simulate_ensemble(sys, ens))
        assert verdict.outcome == NONOSCILLATORY_OBSERVED

    def test_empty_zero_lists_everywhere(self):
        sys = make_system(q="1", r="1")
        ens = Ensemble(((1.0, 0.0), (1.0, 1.0)), 0, (0.0, 10.0))
        verdict = empirical_classification(simulate_ensemble(sys, ens))
        assert verdict.outcome == NONOSCILLATORY_OBSERVED
        assert verdict.zero_counts == (0, 0)
        assert verdict.last_zero_per_member == (None, None)

    def test_trivial_member_does_not_block_oscillatory(self):
        ens = Ensemble(((1.0, 0.0), (0.0, 1.0), (0.0, 0.0)), 0, (0.0, 30.0))
        verdict = empirical_classification(simulate_ensemble(harmonic(), ens))
        assert verdict.outcome == OSCILLATORY_OBSERVED
        assert verdict.trivial_members == (2,)

    def test_all_trivial_is_mixed(self):
        ens = Ensemble(((0.0, 0.0), (0.0, 0.0)), 0, (0.0, 5.0))
        verdict = empirical_classification(simulate_ensemble(harmonic(), ens))
        assert verdict.outcome == MIXED_OBSERVED

    def test_window_fraction_validated(self):
        ens = Ensemble(((1.0, 0.0), (0.0, 1.0)), 0, (0.0, 5.0))
        trajs = simulate_ensemble(harmonic(), ens)
        with pytest.raises(ValueError, match="fraction"):
            empirical_classification(trajs, final_window_fraction=0.0)

    def test_mismatched_starts_rejected(self):
        a = simulate_ensemble(harmonic(), Ensemble(((1.0, 0.0), (0.0, 1.0)),
                                                   0, (0.0, 5.0)))
        shifted = make_system(q="1", r="-1", t0=1.0)
        b = simulate_ensemble(shifted, Ensemble(((1.0, 0.0), (0.0, 1.0)),
                                                0, (1.0, 5.0)))
        with pytest.raises(ValueError, match="starting time"):
            empirical_classification([a[0], b[0]])


class TestSturmSurrogate:
    def count_in(self, traj, lo, hi):
        return sum(1 for t in member_zero_times(traj) if lo <= t <= hi)

    def test_zero_counts_differ_by_at_most_one(self):
        rng = np.random.default_rng(20240816)
        for _ in range(6):
            q0 = rng.uniform(0.3, 1.5)
            q1 = rng.uniform(0.0, 0.8) * q0
            sys = make_system(
                p=f"{rng.uniform(-0.3, 0.3)} * sin(t)",
                q=f"{q0} + {q1} * cos(t)",
                r=f"{rng.uniform(-1.5, 0.5)} + {rng.uniform(0.0, 0.5)} * sin(2 * t)",
                s=f"{rng.uniform(-0.3, 0.3)} * cos(t)",
            )
            ens = default_ensemble((0.0, 22.0), seed=7, size=8)
            trajs = simulate_ensemble(sys, ens)
            counts = [self.count_in(traj, 1.0, 21.0) for traj in trajs]
            assert max(counts) - min(counts) <= 1, counts


class TestDeterminism:
    def test_same_seed_same_verdict(self):
        sys = harmonic(g="sin(t)")
        first = empirical_classification(
            simulate_ensemble(sys, default_ensemble((0.0, 25.0), seed=99)))
        second = empirical_classification(
            simulate_ensemble(sys, default_ensemble((0.0, 25.0), seed=99)))
        assert first.outcome == second.outcome
        assert first.zero_counts == second.zero_counts
        assert first.last_zero_per_member == second.last_zero_per_member


class TestTraceExport:
    def test_roundtrip(self, tmp_path):
        ens = Ensemble(((1.0, 0.0), (0.0, 1.0)), 0, (0.0, 5.0))
        traj = simulate_ensemble(harmonic(), ens)[0]
        path = tmp_path / "member_00.csv"
        export_trace(traj, path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().strip().split("\n")
        assert lines[0] == "t,phi,psi"
        assert len(lines) == len(traj.grid.nodes) + 1
        t, phi, psi = (float(v) for v in lines[3].split(","))
        assert t == traj.grid.nodes[2]
        assert phi == traj.states[2, 0]
        assert psi == traj.states[2, 1]

    def test_dimension_checked(self, tmp_path):
        from oscillint.numerics import integrate_ode
        traj = integrate_ode(lambda t, y: -y, [1.0], (0.0, 1.0))
        with pytest.raises(ValueError, match="two-component"):
            export_trace(traj, tmp_path / "bad.csv")
