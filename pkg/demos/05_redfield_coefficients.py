"""From bath correlations to generator constants.

The memory integrals C(t) of the field correlations have closed forms.  As t
grows they settle to the Markov values (alpha/2, -beta), and the general
weak-coupling master equation built from them reproduces the pair generator
used everywhere else, cross-site terms included.
"""
import numpy as np

from redfield_pairs import (
    PhysicalParams,
    apply_full_generator,
    general_master_rhs,
    markov_params,
    redfield_coefficients,
)

p = PhysicalParams(g2=0.01, mu=1.0, omega0=1.0, f2=0.001, nu=4.0)
gp = markov_params(p, delta_variant="nu")
print(f"Markov constants: alpha/2 = {gp.alpha / 2:.6f}, -beta = {-gp.beta:.6f}")
print("    t      C33(t)       C32(t)")
for t in (0.1, 0.5, 1, 2, 5, 10, 20):
    c = redfield_coefficients(p, t).block(1, 1)
    print(f"{t:5.1f}  {c[2, 2]:.8f}  {c[2, 1]: .8f}")

rng = np.random.default_rng(0)
g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
rho = g @ g.conj().T
rho /= np.trace(rho)
c_inf = redfield_coefficients(p)
diff = general_master_rhs(rho, c_inf, p.omega0, path="double_commutator") - apply_full_generator(rho, gp)
print(f"\ngeneral master equation vs pair generator on a random state: {np.max(np.abs(diff)):.1e}")
