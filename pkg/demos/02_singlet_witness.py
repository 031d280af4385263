"""The evolved singlet and its witness eigenvalue.

Each qubit of a singlet pair evolves under the same local Markovian map.  One
eigenvalue of the evolved state, the one along (1, 0, 0, -1)/sqrt(2), is known
in closed form.  It dips below zero right away whenever beta != 0, so the
factorized dynamics does not keep this entangled state physical.
"""
import math

import numpy as np

from redfield_pairs import (
    GeneratorParams,
    herm_eigvals,
    lambda_closed_form,
    lambda_from_state,
    make_singlet,
    product_map,
)

gp = GeneratorParams(alpha=0.1, beta=0.3, omega=1.0)
singlet = make_singlet().rho

print("   t     lambda closed     lambda from state   min eigenvalue")
for t in np.linspace(0, 6, 13):
    rho = product_map(singlet, t, gp)
    w = lambda_from_state(rho)
    print(f"{t:5.2f}  {lambda_closed_form(t, gp): .10f}    {w.value: .10f}      {herm_eigvals(rho)[0]: .6f}")

# without damping the dip recurs forever
gp0 = GeneratorParams(alpha=0.0, beta=0.5, omega=1.0)
t_star = math.pi / (4 * gp0.Omega)
print(f"\nalpha = 0: lambda at 2*Omega*t = pi/2 is {lambda_closed_form(t_star, gp0):.15f} (-beta^2/Omega^2 = -1/3)")
late = max(np.linspace(100, 110, 2001), key=lambda t: -lambda_closed_form(t, gp0))
print(f"          still {lambda_closed_form(late, gp0):.6f} at t = {late:.3f}")

# with damping everything relaxes to the maximally mixed state
print(f"\nalpha = 0.1: eigenvalues at t = 200: {herm_eigvals(product_map(singlet, 200.0, gp))}")
