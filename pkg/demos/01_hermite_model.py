"""Tour of the Hermite model: basis, seminorm scale, shift, differentiation.

The orthonormal Hermite functions h_j diagonalize L = -d^2/dx^2 + x^2 with
eigenvalues 2j + 1; weighting coefficients by powers of (1 + lambda_j)
produces the whole graded family of Hilbertian seminorms that encodes the
Schwartz-space topology at finite truncation.
"""

import numpy as np

import hermsem as hs

basis = hs.HermiteBasis(truncation=64, quad_order=160)
e0 = hs.basis_vector(basis, 0)
e1 = hs.basis_vector(basis, 1)

print("== pointwise values ==")
print(f"h_0(0) = {hs.eval_hermite(basis, 0, 0.0):.10f}   (pi^-1/4 = {np.pi**-0.25:.10f})")
print(f"h_2(0) = {hs.eval_hermite(basis, 2, 0.0):.10f}")

print("\n== projection (analyze) ==")
phi = hs.analyze(basis, lambda x: np.exp(-x**2 / 2) * (1 + x))
print("coefficients of exp(-x^2/2)(1+x):", np.round(phi.coeffs[:4], 6), "...")
print("value at x=0.5 vs target:", float(phi(0.5)), np.exp(-0.125) * 1.5)

print("\n== seminorm scale ==")
for r in range(4):
    print(f"  ||e1||_{r} = {hs.seminorm(e1, r):.1f}   (expect 4^{r} = {4.0**r:.1f})")

print("\n== shift by quadrature re-expansion ==")
sh = hs.shift(e0, 1.0)
print(f"shift(h_0, 1)(0) = {float(sh(0.0)):.6f} vs h_0(1) = {float(e0(1.0)):.6f}")
two = hs.shift(hs.shift(e0, 0.3), 0.4)
one = hs.shift(e0, 0.7)
print("group-law coefficient gap:", np.max(np.abs(two.coeffs - one.coeffs)))

print("\n== differentiation ladder and the eigenrelation ==")
d = hs.differentiate(e0)
print("d/dx h_0 coefficients (expect -sqrt(1/2) e_1):", np.round(d.coeffs[:3], 6))
xs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
for n in (0, 5, 20):
    phi_n = hs.basis_vector(basis, n)
    op = hs.TestFunction(
        basis,
        -hs.differentiate(hs.differentiate(phi_n)).coeffs
        + hs.position_multiply(hs.position_multiply(phi_n)).coeffs,
    )
    err = np.max(np.abs(op(xs) - (2 * n + 1) * phi_n(xs)))
    print(f"  n={n:2d}: max |(-d2 + x^2) h_n - (2n+1) h_n| = {err:.2e}")

print("\n== dual pairing ==")
T = hs.dual_basis_vector(basis, 0)
print("T(h_0) =", hs.pair(T, e0), " T(h_1) =", hs.pair(T, e1))
print("dual seminorms are nonincreasing in r:",
      [round(hs.dual_seminorm(T, r), 4) for r in range(4)])
