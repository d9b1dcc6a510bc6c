"""Reduced state of the non-Hermitian side for a diagonal and a non-diagonal metric."""

import numpy as np

from quasih import ModelParams, StateH1, Trajectory
from quasih.dynamics import complex_spectrum_scan

ts = np.linspace(0.0, 20.0, 2001)
base = ModelParams(nu=1.0, g=1.0, kappa=0.6)
for x1, x2 in ((1.5, 1.5), (2.0, 1.0), (1.0, 3.0)):
    p = base.with_metric(x1, x2)
    rep = complex_spectrum_scan(Trajectory(p, StateH1.normalized(p, 0.6, 0.8)), ts)
    print(f"x1 {x1}  x2 {x2}  largest imaginary eigenvalue part {rep.max_imag:.3e}  "
          f"density matrix {not rep.not_a_density_matrix}")
