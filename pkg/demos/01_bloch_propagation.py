"""Single-qubit dynamics: closed-form propagator versus RK4.

The Markovian generator acts on the Bloch vector as a 3x3 matrix, so the
propagator has a closed form.  We integrate the same equation numerically
and watch the two agree, then look at the overdamped regime where the
oscillation frequency turns imaginary.  Once beta exceeds omega the generator
has a growing real mode, so the Bloch vector leaves the unit ball
exponentially: the closed form is still exact, the physics is not.
"""
import numpy as np

from redfield_pairs import (
    GeneratorParams,
    PhysicalParams,
    apply_L,
    bloch_decompose,
    bloch_map_matrix,
    markov_params,
    propagate_numeric,
)

ground = np.diag([1.0, 0.0]).astype(complex)

# parameters derived from an exponentially correlated field
gp = markov_params(PhysicalParams(g2=0.01, mu=1.0, omega0=1.0))
print(f"alpha={gp.alpha:.4f} beta={gp.beta:.4f} omega={gp.omega:.4f} Omega^2={gp.Omega2:.6f}")

times = np.linspace(0, 10, 11)
res = propagate_numeric(ground, lambda r: apply_L(r, gp), dt=1e-2, times=times)
eta0 = bloch_decompose(ground).as_array()
print("\n   t    eta3 (closed form)   eta3 (RK4)        |diff|")
for t, s in zip(times, res.states):
    exact = (bloch_map_matrix(t, gp) @ eta0)[3]
    num = bloch_decompose(s).eta3
    print(f"{t:5.1f}  {exact: .12f}   {num: .12f}   {abs(exact - num):.1e}")

# overdamped: beta > omega gives a growing mode
od = GeneratorParams(alpha=0.1, beta=1.5, omega=1.0)
print(f"\noverdamped case: Omega^2 = {od.Omega2:.3f}")
for t in (0.5, 2.0, 8.0):
    print(f"  t={t:3.1f}  eta = {np.round(bloch_map_matrix(t, od) @ eta0, 6)}")
