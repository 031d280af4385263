"""Positivity versus complete positivity.

The Choi matrix of the single-qubit map has a negative eigenvalue at short
times as soon as beta != 0, so the map is not completely positive.  It is not
even positive: the pure state diag(1, 0) is driven out of the state space
almost immediately.  Mixed enough states survive, and products of such states
stay positive under the two-qubit map.
"""
import numpy as np

from redfield_pairs import GeneratorParams, admissible_scan, bloch_compose, choi_min_eigenvalue, product_map
from redfield_pairs import herm_eigvals

dephasing = GeneratorParams(alpha=0.2, beta=0.0, omega=1.0)
redfield = GeneratorParams(alpha=0.1, beta=0.3, omega=1.0)

print("   t     min Choi eig (beta=0)   min Choi eig (beta=0.3)")
for t in (0.0, 0.01, 0.05, 0.2, 1.0, 5.0):
    print(f"{t:5.2f}   {choi_min_eigenvalue(t, dephasing): .3e}              {choi_min_eigenvalue(t, redfield): .3e}")

ground = np.diag([1.0, 0.0])
rep = admissible_scan(ground, redfield, 1.0, 1001)
print(f"\ndiag(1,0), beta=0.3: first negative time {rep.first_negative_time:.3e}, "
      f"most negative {rep.most_negative:.3e}")
print(f"diag(1,0), beta=0:   admissible = {admissible_scan(ground, dephasing, 50.0, 501).admissible}")

mixed = bloch_compose([0.5, 0.1, 0.0, 0.2])
print(f"\nBloch (0.1, 0, 0.2) admissible: {admissible_scan(mixed, redfield, 20.0, 401).admissible}")
pair = np.kron(mixed, mixed)
print("its product with itself, min eigenvalue over t in [0, 20]:",
      f"{min(herm_eigvals(product_map(pair, t, redfield))[0] for t in np.linspace(0, 20, 201)):.4f}")
