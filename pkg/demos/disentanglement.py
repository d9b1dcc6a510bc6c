"""Times at which the evolving state becomes a product state, on both sides."""

import math

from quasih import ModelParams, StateH1, Trajectory, Side, disentanglement_times, random_unitary2
from quasih.analytics import disentangling_W

p = ModelParams(nu=1.0, g=1.0, kappa=0.6)
w = random_unitary2(3)
cases = {
    "A = 0": StateH1.from_alpha(p, 0.0),
    "real A, B": StateH1.from_alpha(p, 0.3),
    "Re(A B*) = 0": StateH1.from_alpha(p, 0.3, 0.0, math.pi / 2),
}
for label, state in cases.items():
    traj = Trajectory(p, state, w)
    for side in Side:
        dt = disentanglement_times(traj, side)
        wt = ", ".join(f"{x:.4f}" for x in dt.times * p.omega / math.pi)
        print(f"{label:13s} {side.value:13s} {dt.classification.value:17s} omega t / pi: {wt}")

traj = Trajectory(p, StateH1.from_alpha(p, 0.3), w)
fixed = traj.with_unitary(disentangling_W(traj))
print("after the disentangling W:", disentanglement_times(fixed, Side.HERMITIAN).classification.value)
