"""Real-valued stochastic integrals against a distribution-valued driver.

The driver here is the Dirac semimartingale X_t = delta_{z_t}, whose
pairing with any test function phi is just phi(z_t).  Elementary
integrands integrate by exact telescoping; general predictable integrands
are reached through left-point Riemann sums over random partitions.
"""

import numpy as np

import hermsem as hs

basis = hs.HermiteBasis(64, 160)
e0 = hs.basis_vector(basis, 0)
X = hs.DiracSemimartingale(basis)

spec = hs.SemimartingaleSpec(sigma=1.0, jump_intensity=2.0, jump_sd=0.4, horizon=1.0)
path = hs.simulate(spec, 256, seed=3)

print("== elementary integral, exact telescoping ==")
h = hs.ElementaryScalarIntegrand(a0=0.0, blocks=[(0.0, 1.0)], end=1.0, bound=1.0)
H = hs.ElementaryTestFnIntegrand([(h, e0)])
tr = hs.integrate_elementary(H, X, path)
expect = e0(path.values) - e0(path.value(0.0))
print("  max |int H dX - (phi(z_t) - phi(z_0))| =", np.max(np.abs(tr.values - expect)))

print("\n== Riemann sums: a constant integrand telescopes at any partition ==")
part = hs.jump_refined_partition(hs.dyadic_partition(4, 1.0), path)
rs = hs.riemann_scalar(lambda t, v: e0, X, path, part)
print("  max gap vs phi(z_t):", np.max(np.abs(rs.values - e0(path.values_at(rs.times)))))

print("\n== path-dependent caglad integrand under refinement ==")
sampler = lambda t, v: hs.TestFunction(basis, e0.coeffs * np.tanh(v.value(t)))
prev = None
for n in (4, 6, 8):
    p_n = hs.jump_refined_partition(hs.dyadic_partition(n, 1.0), path)
    vals = hs.riemann_scalar(sampler, X, path, p_n, times=path.times).values
    if prev is not None:
        print(f"  sup |level {n} - level {n-2}| = {np.max(np.abs(vals - prev)):.5f}")
    prev = vals

print("\n== stopping commutes with integration ==")
tau = hs.first_passage_time(path, 1.0)
h1 = hs.constant_one(1.0)
lhs = hs.h_dot_z(h1, hs.stop_path(path, tau), path.times)
rhs = hs.h_dot_z(h1, path, path.times).stop(tau)
print(f"  tau = {tau:.4f}, max gap = {np.max(np.abs(lhs.values - rhs.values)):.2e}")

print("\n== bound contracts are enforced ==")
bad = hs.ElementaryScalarIntegrand(blocks=[(0.0, 3.0)], bound=1.0)
try:
    hs.h_dot_z(bad, path)
except hs.ContractError as exc:
    print("  ContractError:", exc)
