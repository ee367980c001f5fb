import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermsem.paths import (
    CadlagPath,
    HistoryView,
    ContractError,
    RandomPartition,
    SemimartingaleSpec,
    bracket_continuous,
    dyadic_partition,
    first_passage_time,
    hitting_partition,
    jump_refined_partition,
    make_partition,
    quadratic_variation,
    simulate,
    simulate_ensemble,
    stop_path,
)

JUMPY = SemimartingaleSpec(
    z0=0.1, mu=0.2, sigma=0.8, jump_intensity=3.0, jump_mean=0.1, jump_sd=0.5, horizon=1.0
)


def test_spec_validation():
    with pytest.raises(ValueError):
        SemimartingaleSpec(sigma=-1.0)
    with pytest.raises(ValueError):
        SemimartingaleSpec(jump_intensity=-0.5)
    with pytest.raises(ValueError):
        SemimartingaleSpec(horizon=0.0)


class TestSimulate:
    def test_pure_drift_exact(self):
        spec = SemimartingaleSpec(z0=0.0, mu=1.0, sigma=0.0, jump_intensity=0.0)
        p = simulate(spec, 16, seed=0)
        assert np.max(np.abs(p.values - p.times)) == 0.0

    def test_seeded_determinism(self):
        a = simulate(JUMPY, 32, seed=9)
        b = simulate(JUMPY, 32, seed=9)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.jump_sizes, b.jump_sizes)

    def test_monte_carlo_mean(self):
        # E z_1 = z0 + mu T + lambda T jump_mean, sample mean within 3 SE
        spec = SemimartingaleSpec(
            mu=0.5, sigma=1.0, jump_intensity=2.0, jump_mean=0.0, jump_sd=0.5
        )
        finals = np.array(
            [p.value(1.0) for p in simulate_ensemble(spec, 16, 777, 10_000)]
        )
        se = np.std(finals) / np.sqrt(len(finals))
        assert abs(np.mean(finals) - 0.5) <= 3 * se

    def test_cadlag_consistency(self):
        p = simulate(JUMPY, 64, seed=4)
        ledger = dict(zip(p.jump_times.tolist(), p.jump_sizes.tolist()))
        for t in p.times:
            dz = ledger.get(float(t), 0.0)
            assert p.value(t) == pytest.approx(p.left_value(t) + dz, abs=1e-14)

    def test_jump_times_distinct_sorted_off_grid(self):
        p = simulate(JUMPY, 64, seed=5)
        assert np.all(np.diff(p.jump_times) > 0)
        assert not np.isin(p.jump_times, p.base_grid).any()

    def test_history_view_blocks_future(self):
        p = simulate(JUMPY, 16, seed=6)
        v = HistoryView(p, 0.5)
        v.value(0.5)
        with pytest.raises(ContractError):
            v.value(0.6)


class TestBrackets:
    def test_trivial_zero(self):
        spec = SemimartingaleSpec(sigma=0.0, jump_intensity=0.0, mu=1.0)
        p = simulate(spec, 8, seed=0)
        for t in (0.0, 0.4, 1.0):
            assert quadratic_variation(p, t) == 0.0
        assert bracket_continuous(spec, 0.7) == 0.0

    def test_single_jump_ledger(self):
        spec = SemimartingaleSpec(sigma=0.0, jump_intensity=1.0, horizon=1.0)
        p = CadlagPath(
            spec,
            np.array([0.0, 0.5, 1.0]),
            np.zeros(3),
            np.array([0.5]),
            np.array([2.0]),
            np.array([0.0, 1.0]),
        )
        assert quadratic_variation(p, 0.49) == 0.0
        assert quadratic_variation(p, 0.5) == 4.0
        assert quadratic_variation(p, 1.0) == 4.0

    def test_closed_form(self):
        assert bracket_continuous(SemimartingaleSpec(sigma=2.0), 1.0) == 4.0

    def test_realized_variance_oracle(self):
        spec = SemimartingaleSpec(sigma=1.0, jump_intensity=0.0)
        p = simulate(spec, 100_000, seed=11)
        rv = float(np.sum(np.diff(p.values) ** 2))
        assert abs(rv - 1.0) <= 0.05
        # consistency: QV minus jump sum equals the continuous bracket
        assert quadratic_variation(p, 1.0) == bracket_continuous(spec, 1.0)

    def test_jump_summability(self):
        p = simulate(JUMPY, 64, seed=12)
        total = sum(s**2 for s in p.jump_sizes)
        assert np.isfinite(total)
        assert quadratic_variation(p, 1.0) == pytest.approx(
            JUMPY.sigma**2 + total, abs=1e-14
        )


class TestPartitions:
    def test_dyadic(self):
        part = dyadic_partition(1, 1.0)
        assert np.array_equal(part.times, [0.0, 0.5, 1.0])
        assert part.mesh == 0.5

    def test_mesh_law(self):
        for n in range(1, 8):
            part = dyadic_partition(n, 1.0)
            assert part.mesh == pytest.approx(2.0**-n, abs=1e-15)
            assert part.times[-1] == 1.0

    def test_dyadic_nested_in_grid(self):
        p = simulate(JUMPY, 2**8, seed=1)
        for n in (3, 6, 8):
            part = dyadic_partition(n, 1.0)
            assert np.isin(part.times, p.times).all()

    def test_jump_refined_merge(self):
        spec = SemimartingaleSpec(sigma=0.0, jump_intensity=1.0, horizon=1.0)
        p = CadlagPath(
            spec,
            np.array([0.0, 0.3, 1.0]),
            np.zeros(3),
            np.array([0.3]),
            np.array([1.0]),
            np.array([0.0, 1.0]),
        )
        part = jump_refined_partition(dyadic_partition(1, 1.0), p)
        assert np.array_equal(part.times, [0.0, 0.3, 0.5, 1.0])

    def test_jump_refined_contains_all_jumps(self):
        p = simulate(JUMPY, 64, seed=13)
        part = jump_refined_partition(dyadic_partition(4, 1.0), p)
        assert np.isin(p.jump_times, part.times).all()

    def test_hitting(self):
        p = simulate(JUMPY, 64, seed=14)
        part = hitting_partition([0.5, 1.0, 50.0], p)
        assert part.times[0] == 0.0
        assert np.all(np.diff(part.times) >= 0)
        assert part.times[-1] == p.horizon
        # unreachable level caps at the horizon
        assert first_passage_time(p, 50.0) == p.horizon

    def test_dispatcher(self):
        p = simulate(JUMPY, 16, seed=2)
        assert make_partition("dyadic", {"level": 2, "horizon": 1.0}).times.size == 5
        assert make_partition("jump-refined", {"level": 2}, p).times.size >= 5
        with pytest.raises(ValueError):
            make_partition("nope", {})

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            RandomPartition(np.array([0.1, 0.5]))
        with pytest.raises(ValueError):
            RandomPartition(np.array([0.0, 0.5, 0.4]))


class TestStopping:
    def test_identity_and_zero(self):
        p = simulate(JUMPY, 32, seed=3)
        full = stop_path(p, p.horizon)
        assert np.array_equal(full.values, p.values)
        frozen = stop_path(p, 0.0)
        assert np.all(frozen.values == p.value(0.0))

    def test_jump_dropped(self):
        spec = SemimartingaleSpec(sigma=0.0, mu=0.0, jump_intensity=1.0, horizon=1.0)
        p = CadlagPath(
            spec,
            np.array([0.0, 0.3, 1.0]),
            np.full(3, 0.25),
            np.array([0.3]),
            np.array([1.0]),
            np.array([0.0, 1.0]),
        )
        s = stop_path(p, 0.2)
        assert s.jump_times.size == 0
        assert s.value(1.0) == p.value(0.2)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 100))
    def test_idempotence(self, ia, ib, key):
        p = simulate(JUMPY, 32, seed=key)
        a = float(p.times[ia % len(p.times)])
        b = float(p.times[ib % len(p.times)])
        lhs = stop_path(stop_path(p, a), b)
        rhs = stop_path(p, min(a, b))
        assert all(lhs.value(t) == rhs.value(t) for t in p.times)

    def test_out_of_range(self):
        p = simulate(JUMPY, 8, seed=0)
        with pytest.raises(ValueError):
            stop_path(p, 2.0)
