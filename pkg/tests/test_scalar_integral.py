import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermsem.basis import HermiteBasis, TestFunction, basis_vector
from hermsem.dirac_ito import DiracSemimartingale
from hermsem.paths import (
    ContractError,
    SemimartingaleSpec,
    dyadic_partition,
    first_passage_time,
    jump_refined_partition,
    simulate,
    stop_path,
)
from hermsem.metrics import IntegrandDictionary
from hermsem.scalar_integral import (
    ElementaryScalarIntegrand,
    ElementaryTestFnIntegrand,
    constant_one,
    h_dot_z,
    integrate_elementary,
    riemann_scalar,
)

B = HermiteBasis(64, 160)
E0, E1 = basis_vector(B, 0), basis_vector(B, 1)
X = DiracSemimartingale(B)

DRIFT = SemimartingaleSpec(z0=0.0, mu=1.0, sigma=0.0, jump_intensity=0.0, horizon=1.0)
BROWN = SemimartingaleSpec(z0=0.2, mu=0.1, sigma=1.0, jump_intensity=0.0, horizon=1.0)
JUMPY = SemimartingaleSpec(
    z0=0.0, mu=0.0, sigma=0.0, jump_intensity=4.0, jump_mean=0.2, jump_sd=0.5, horizon=1.0
)


class TestHdotZ:
    def test_unit_block_gives_increment(self):
        p = simulate(BROWN, 32, seed=0)
        h = ElementaryScalarIntegrand(a0=0.0, blocks=[(0.0, 1.0)], end=1.0)
        tr = h_dot_z(h, p)
        assert np.max(np.abs(tr.values - (p.values - p.value(0.0)))) <= 1e-12

    def test_atom_only(self):
        p = simulate(BROWN, 32, seed=1)
        h = ElementaryScalarIntegrand(a0=1.0)
        tr = h_dot_z(h, p)
        assert np.all(tr.values == p.value(0.0))

    def test_hand_telescoping(self):
        p = simulate(DRIFT, 16, seed=0)  # z_t = t exactly
        h = ElementaryScalarIntegrand(a0=0.0, blocks=[(0.25, 2.0)], end=0.75)
        tr = h_dot_z(h, p)
        expect = 2.0 * (np.minimum(p.times, 0.75) - np.minimum(p.times, 0.25))
        assert np.max(np.abs(tr.values - expect)) <= 1e-12

    def test_bound_contract(self):
        p = simulate(DRIFT, 8, seed=0)
        h = ElementaryScalarIntegrand(blocks=[(0.0, 2.0)], bound=1.0)
        with pytest.raises(ContractError):
            h_dot_z(h, p)

    def test_adapted_coefficient_reads_history(self):
        p = simulate(BROWN, 32, seed=2)
        h = ElementaryScalarIntegrand(
            blocks=[(0.0, 1.0), (0.5, lambda v: float(np.sign(v.value(0.5))))],
            end=1.0,
            bound=1.0,
        )
        tr = h_dot_z(h, p)
        s = float(np.sign(p.value(0.5)))
        expect = (
            p.values_at(np.minimum(p.times, 0.5)) - p.value(0.0)
        ) + s * (p.values_at(np.minimum(p.times, 1.0)) - p.values_at(np.minimum(p.times, 0.5)))
        assert np.max(np.abs(tr.values - expect)) <= 1e-12


class TestElementaryIntegral:
    def test_unit_block_reproduces_pairing_increment(self):
        p = simulate(BROWN, 32, seed=3)
        H = ElementaryTestFnIntegrand(
            [(ElementaryScalarIntegrand(blocks=[(0.0, 1.0)], end=1.0), E0)]
        )
        tr = integrate_elementary(H, X, p)
        expect = E0(p.values) - E0(p.value(0.0))
        assert np.max(np.abs(tr.values - expect)) <= 1e-12

    def test_zero_integrand(self):
        p = simulate(BROWN, 16, seed=4)
        H = ElementaryTestFnIntegrand([])
        assert np.all(integrate_elementary(H, X, p).values == 0.0)

    def test_bilinearity_exact(self):
        p = simulate(BROWN, 32, seed=5)
        h1 = ElementaryScalarIntegrand(a0=0.3, blocks=[(0.25, 1.0)], end=0.75)
        h2 = ElementaryScalarIntegrand(blocks=[(0.0, -0.5), (0.5, 0.25)], end=1.0)
        both = integrate_elementary(
            ElementaryTestFnIntegrand([(h1, E0), (h2, E1)]), X, p
        )
        single = (
            integrate_elementary(ElementaryTestFnIntegrand([(h1, E0)]), X, p).values
            + integrate_elementary(ElementaryTestFnIntegrand([(h2, E1)]), X, p).values
        )
        assert np.array_equal(both.values, single)


class TestRiemann:
    def test_constant_integrand_telescopes(self):
        p = simulate(BROWN, 64, seed=6)
        part = dyadic_partition(3, 1.0)
        tr = riemann_scalar(lambda t, v: E0, X, p, part)
        expect = E0(p.values_at(tr.times))
        assert np.max(np.abs(tr.values - expect)) <= 1e-12

    def test_aligned_elementary_matches_exact(self):
        p = simulate(BROWN, 64, seed=7)
        h = ElementaryScalarIntegrand(a0=0.5, blocks=[(0.25, 1.5), (0.5, -0.75)], end=0.75)
        H = ElementaryTestFnIntegrand([(h, E0)])
        part = dyadic_partition(4, 1.0).refined_with([0.25, 0.5, 0.75])
        exact = integrate_elementary(H, X, p, times=p.times)
        approx = riemann_scalar(H, X, p, part, times=p.times)
        assert np.max(np.abs(exact.values - approx.values)) <= 1e-10

    def test_refinement_triangle_diagnostic(self):
        p = simulate(BROWN, 2**10, seed=8)

        def sampler(t, view):
            return TestFunction(B, E0.coeffs * np.tanh(view.value(t)))

        out = {}
        for n in (4, 7, 10):
            part = dyadic_partition(n, 1.0)
            out[n] = riemann_scalar(sampler, X, p, part, times=p.times).values
        d_4_7 = np.max(np.abs(out[4] - out[7]))
        d_4_10 = np.max(np.abs(out[4] - out[10]))
        d_7_10 = np.max(np.abs(out[7] - out[10]))
        assert d_4_7 <= d_4_10 + d_7_10 + 1e-15
        assert d_7_10 < d_4_7  # refinement shrinks the successive difference

    def test_jump_exactness_pure_jump_driver(self):
        p = simulate(JUMPY, 16, seed=9)
        part = jump_refined_partition(dyadic_partition(3, 1.0), p)

        def sampler(t, view):
            return TestFunction(B, E0.coeffs * (1.0 + 0.5 * np.tanh(view.value(t))))

        tr = riemann_scalar(sampler, X, p, part, times=part.times)
        atom = float(E0(p.value(0.0))) * (1.0 + 0.5 * np.tanh(p.value(0.0)))
        jump_sum = np.zeros_like(part.times)
        for s, _ in zip(p.jump_times, p.jump_sizes):
            zl, zr = p.left_value(s), p.value(s)
            coef = 1.0 + 0.5 * np.tanh(zl)
            inc = coef * (float(E0(zr)) - float(E0(zl)))
            jump_sum += np.where(part.times >= s, inc, 0.0)
        assert np.max(np.abs(tr.values - (atom + jump_sum))) <= 1e-10


class TestElementaryProperties:
    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=5),
        st.floats(-1.0, 1.0),
        st.floats(-3.0, 3.0),
        st.integers(0, 500),
    )
    def test_scaling_linearity_in_h(self, coefs, a0, c, key):
        # (c h) . z = c (h . z) for arbitrary block structure
        p = simulate(BROWN, 32, seed=key)
        starts = np.linspace(0.1, 0.9, len(coefs))
        h = ElementaryScalarIntegrand(
            a0=a0, blocks=[(float(t), v) for t, v in zip(starts, coefs)], end=1.0
        )
        hc = ElementaryScalarIntegrand(
            a0=c * a0,
            blocks=[(float(t), c * v) for t, v in zip(starts, coefs)],
            end=1.0,
        )
        lhs = h_dot_z(hc, p).values
        rhs = c * h_dot_z(h, p).values
        assert np.max(np.abs(lhs - rhs)) <= 1e-10

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 500))
    def test_riemann_matches_elementary_when_aligned(self, n_blocks, key):
        p = simulate(BROWN, 64, seed=key)
        rng = np.random.default_rng(key + 1)
        starts = np.sort(rng.choice(np.arange(1, 16) / 16.0, n_blocks, replace=False))
        coefs = rng.uniform(-1, 1, n_blocks)
        h = ElementaryScalarIntegrand(
            a0=float(rng.uniform(-1, 1)),
            blocks=[(float(t), float(c)) for t, c in zip(starts, coefs)],
            end=1.0,
        )
        H = ElementaryTestFnIntegrand([(h, E0)])
        part = dyadic_partition(4, 1.0).refined_with(starts)
        exact = integrate_elementary(H, X, p, times=p.times)
        approx = riemann_scalar(H, X, p, part, times=p.times)
        assert np.max(np.abs(exact.values - approx.values)) <= 1e-10


class TestStoppingCommutes:
    def test_h_dot_z_commutes_with_stopping(self):
        dictionary = IntegrandDictionary.default(1.0, seed=3)
        for seed in range(5):
            p = simulate(
                SemimartingaleSpec(
                    sigma=1.0, jump_intensity=2.0, jump_sd=0.4, horizon=1.0
                ),
                64,
                seed=seed,
            )
            tau = first_passage_time(p, 1.0)
            stopped = stop_path(p, tau)
            for h in dictionary.elements:
                lhs = h_dot_z(h, stopped, p.times)
                rhs = h_dot_z(h, p, p.times).stop(tau)
                assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-10

    def test_trivial_taus(self):
        p = simulate(BROWN, 32, seed=10)
        h = constant_one(1.0)
        full = h_dot_z(h, p, p.times)
        assert np.array_equal(full.stop(1.0).values, full.values)
        assert np.all(h_dot_z(h, stop_path(p, 0.0), p.times).values == p.value(0.0))
