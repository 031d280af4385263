"""Where does positivity start to fail?

For the family cos(theta)|+-> - sin(theta)|-+> the small eigenvalue starts
out quadratically in t with curvature 2(alpha^2 cos^2 2theta - 4 beta^2 sin^2 2theta).
It turns negative above theta* = arctan(alpha / 2 beta) / 2.  For Werner
states (alpha = 0) the witness eigenvalue goes negative above
p* = (omega^2 - beta^2) / (omega^2 + 3 beta^2).  Both thresholds are located
here by brute-force scans and compared with the formulas.
"""
import numpy as np

from redfield_pairs import (
    GeneratorParams,
    lambda_curvature_at_zero,
    lambda_curvature_fd,
    min_werner_lambda,
    scan_theta_threshold,
    scan_werner_threshold,
)

gp = GeneratorParams(alpha=0.2, beta=0.1, omega=1.0)
print("theta     finite difference   closed form")
for th in np.linspace(0, np.pi / 4, 7):
    print(f"{th:.4f}   {lambda_curvature_fd(gp, th): .8f}       {lambda_curvature_at_zero(gp, th): .8f}")

rep = scan_theta_threshold(gp, step=1e-3)
print(f"\ntheta*: predicted {rep.predicted:.5f}, first negative grid point {rep.measured:.3f}")

wg = GeneratorParams(alpha=0.0, beta=0.5, omega=1.0)
rep = scan_werner_threshold(wg, step=1e-3)
print(f"p*:     predicted {rep.predicted:.5f}, first negative grid point {rep.measured:.3f}")
for p in (0.3, 3 / 7, 0.6, 1.0):
    print(f"  p = {p:.4f}: min over t of lambda_W = {min_werner_lambda(p, wg): .6f}")
