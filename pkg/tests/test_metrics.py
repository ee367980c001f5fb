import numpy as np
import pytest

from hermsem.basis import HermiteBasis
from hermsem.metrics import (
    IntegrandDictionary,
    ProcessEnsemble,
    d_ucp_estimate,
    r_em_estimate,
    r_ucp_estimate,
    ucp_dual_estimate,
    ucp_dual_metric,
    ucp_tail_bound,
)
from hermsem.paths import SemimartingaleSpec, simulate, simulate_ensemble
from hermsem.scalar_integral import ElementaryScalarIntegrand
from hermsem.vector_integral import DistributionPath

B = HermiteBasis(16, 40)
GRID4 = np.linspace(0.0, 4.0, 65)


def constant_ensemble(c, count=10, grid=GRID4):
    return ProcessEnsemble(grid, np.full((count, len(grid)), float(c)))


class TestRucp:
    def test_zero(self):
        assert r_ucp_estimate(constant_ensemble(0.0), 4) == 0.0

    def test_constant_closed_form(self):
        for c in (0.25, 3.0, -0.7):
            got = r_ucp_estimate(constant_ensemble(c), 4)
            assert got == pytest.approx((1 - 2.0**-4) * min(1.0, abs(c)), abs=1e-14)

    def test_example_value(self):
        assert r_ucp_estimate(constant_ensemble(3.0), 4) == pytest.approx(0.9375)

    def test_horizon_guard(self):
        with pytest.raises(ValueError):
            r_ucp_estimate(constant_ensemble(1.0, grid=np.linspace(0, 1, 5)), 4)

    def test_tail_bound(self):
        assert ucp_tail_bound(4) == 2.0**-4

    def test_subadditive_with_common_random_numbers(self):
        rng = np.random.default_rng(0)
        a = ProcessEnsemble(GRID4, rng.normal(size=(20, 65)))
        b = ProcessEnsemble(GRID4, rng.normal(size=(20, 65)))
        ab = ProcessEnsemble(GRID4, a.paths + b.paths)
        assert r_ucp_estimate(ab, 4) <= r_ucp_estimate(a, 4) + r_ucp_estimate(b, 4) + 1e-14

    def test_scaling_monotone_to_zero(self):
        rng = np.random.default_rng(1)
        z = rng.normal(size=(20, 65))
        vals = [
            r_ucp_estimate(ProcessEnsemble(GRID4, c * z), 4)
            for c in (1.0, 0.5, 0.25, 0.125, 0.0)
        ]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == 0.0

    def test_standard_error_halves_when_replicas_double(self):
        # log-log slope of SE vs replica count, three sizes, fixed seeds
        spec = SemimartingaleSpec(sigma=1.0, horizon=1.0)
        sizes = (50, 100, 200)
        reps = 40
        ses = []
        for si, size in enumerate(sizes):
            estimates = []
            for rep in range(reps):
                paths = simulate_ensemble(spec, 32, [90_000 + si, rep], size)
                ens = ProcessEnsemble.from_paths(paths)
                estimates.append(r_ucp_estimate(ens, 1))
            ses.append(np.std(estimates))
        slope = np.polyfit(np.log2(sizes), np.log2(ses), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.15)


class TestDucp:
    def test_equal_is_exact_zero(self):
        a = constant_ensemble(1.3)
        assert d_ucp_estimate(a, a, 4) == 0.0

    def test_reduction_to_constant(self):
        a = constant_ensemble(0.0)
        b = constant_ensemble(0.6)
        assert d_ucp_estimate(a, b, 4) == pytest.approx((1 - 2.0**-4) * 0.6, abs=1e-14)

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        a = ProcessEnsemble(GRID4, rng.normal(size=(8, 65)))
        b = ProcessEnsemble(GRID4, rng.normal(size=(8, 65)))
        assert d_ucp_estimate(a, b, 4) == d_ucp_estimate(b, a, 4)

    def test_replica_mismatch(self):
        with pytest.raises(ValueError):
            d_ucp_estimate(constant_ensemble(1, count=5), constant_ensemble(1, count=6), 4)


class TestRem:
    def test_zero_semimartingale(self):
        spec = SemimartingaleSpec(z0=0.0, mu=0.0, sigma=0.0, jump_intensity=0.0)
        d = IntegrandDictionary.default(1.0)
        assert r_em_estimate(lambda i: simulate(spec, 8, i), d, 4, 1) == 0.0

    def test_deterministic_drift_value(self):
        # z_t = t on [0,1]: h = 1 attains the max, value 2^-1 * (1 ^ 1) = 0.5
        spec = SemimartingaleSpec(z0=0.0, mu=1.0, sigma=0.0, jump_intensity=0.0)
        d = IntegrandDictionary.default(1.0, seed=5)
        got = r_em_estimate(lambda i: simulate(spec, 16, i), d, 3, 1)
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_dictionary_monotone(self):
        spec = SemimartingaleSpec(sigma=1.0, horizon=1.0)
        small = IntegrandDictionary.default(1.0, n_random=1, include_greedy=False)
        large = IntegrandDictionary(
            small.elements + IntegrandDictionary.default(1.0, n_random=4).elements
        )
        sampler = lambda i: simulate(spec, 32, [55, i])
        assert r_em_estimate(sampler, large, 20, 1) >= r_em_estimate(
            sampler, small, 20, 1
        )

    def test_empty_dictionary_rejected(self):
        with pytest.raises(ValueError):
            IntegrandDictionary(())

    def test_unbounded_element_rejected(self):
        h = ElementaryScalarIntegrand(blocks=[(0.0, 2.0)], bound=2.0)
        with pytest.raises(ValueError):
            IntegrandDictionary((h,))

    def test_constant_one_membership_required(self):
        h = ElementaryScalarIntegrand(blocks=[(0.0, -1.0)], bound=1.0)
        with pytest.raises(ValueError, match="h = 1"):
            IntegrandDictionary((h,))

    def test_bound_chain(self):
        # r_ucp of the h=1 integral ensemble is <= the dictionary bound
        spec = SemimartingaleSpec(sigma=1.0, jump_intensity=1.0, jump_sd=0.4)
        sampler = lambda i: simulate(spec, 32, [66, i])
        d = IntegrandDictionary.default(1.0, seed=6)
        paths = [sampler(i) for i in range(25)]
        from hermsem.scalar_integral import constant_one, h_dot_z

        grid = paths[0].base_grid
        rows = np.vstack([h_dot_z(constant_one(1.0), p, grid).values for p in paths])
        base = r_ucp_estimate(ProcessEnsemble(grid, rows), 1)
        assert base <= r_em_estimate(sampler, d, 25, 1) + 1e-14


def dpath(offset_coeffs, times=np.linspace(0, 1, 9)):
    coeffs = np.tile(np.asarray(offset_coeffs, float), (len(times), 1))
    return DistributionPath(B, times, coeffs)


class TestUcpDual:
    def test_equal(self):
        xs = [dpath(np.ones(16)) for _ in range(6)]
        assert ucp_dual_estimate(xs, xs, 1, 1.0, 0.1) == 0.0

    def test_constant_offset_above_threshold(self):
        eps = 0.05
        base = np.zeros(16)
        off = np.zeros(16)
        off[0] = 2 * eps * (1 + 1.0) ** 1  # p'_1-norm contribution of h_0 is f0/(1+1)
        xs = [dpath(base) for _ in range(6)]
        ys = [dpath(base + off) for _ in range(6)]
        assert ucp_dual_estimate(xs, ys, 1, 1.0, eps) == 1.0

    def test_shrinking_offsets_below_threshold(self):
        eps = 0.05
        for k in (2, 5, 10):
            off = np.zeros(16)
            off[0] = (eps / k) * 2.0
            xs = [dpath(np.zeros(16)) for _ in range(4)]
            ys = [dpath(off) for _ in range(4)]
            assert ucp_dual_estimate(xs, ys, 1, 1.0, eps) == 0.0

    def test_truncation_mismatch(self):
        small = HermiteBasis(8, 20)
        xs = [dpath(np.zeros(16))]
        ys = [DistributionPath(small, np.linspace(0, 1, 9), np.zeros((9, 8)))]
        with pytest.raises(ValueError, match="truncation"):
            ucp_dual_estimate(xs, ys, 1, 1.0, 0.1)

    def test_metric_below_one(self):
        xs = [dpath(np.zeros(16)) for _ in range(4)]
        ys = [dpath(np.full(16, 0.01)) for _ in range(4)]
        assert 0.0 < ucp_dual_metric(xs, ys, 1, 1.0) < 1.0
