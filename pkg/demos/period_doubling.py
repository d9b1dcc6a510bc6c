"""Entropy of the two reduced states for c = 0.5 and several alpha.

The non-Hermitian side repeats every pi/(2 omega). On the Hermitian side the
mean of q(t) sits off 1/2, so its entropy only repeats after pi/omega.
"""

from quasih import ModelParams, StateH1, Trajectory, Unitary2, Side, entropy_curve, estimate_period
from quasih.dynamics import mean_q

p = ModelParams(nu=1.0, g=1.0, kappa=0.6)
w = Unitary2.real_cd(0.5)
print(f"omega = {p.omega:.6f}, pi/(2 omega) = {3.141592653589793 / (2 * p.omega):.6f}")
for alpha in (0.0, 0.15, 0.3, 0.45):
    traj = Trajectory(p, StateH1.from_alpha(p, alpha), w)
    nh = estimate_period(entropy_curve(traj, Side.NON_HERMITIAN))
    he = estimate_period(entropy_curve(traj, Side.HERMITIAN))
    print(f"alpha {alpha:4.2f}  q0 {mean_q(traj):.6f}  period H {nh.period:.6f}  period h_W {he.period:.6f}"
          f"  ratio {he.period / nh.period:.4f}")
