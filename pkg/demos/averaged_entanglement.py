"""Period-averaged Hermitian-side state under random choices of W.

The eigenvalue splitting of the averaged state stays at 2 x |Re(A B*)|.
The concurrence of the same state follows |b c* + a d*| and moves with W.
"""

import numpy as np

from quasih import ModelParams, StateH1, Trajectory, averaged_state, eigenvalue_splitting, wootters_concurrence
from quasih.model import Unitary2, random_unitary2

p = ModelParams(nu=1.0, g=1.0, kappa=0.6)
base = Trajectory(p, StateH1.from_alpha(p, 0.3, 0.0, 0.4), Unitary2.identity())
print(f"2 x |Re(A B*)| = {2 * p.x * abs(base.ab.real):.12f}")
rng = np.random.default_rng(1)
for k in range(6):
    w = Unitary2.identity() if k == 0 else random_unitary2(rng=rng)
    avg = averaged_state(base.with_unitary(w))
    print(f"|bc* + ad*| {abs(w.b * np.conj(w.c) + w.a * np.conj(w.d)):.4f}  "
          f"splitting {eigenvalue_splitting(avg):.12f}  concurrence {wootters_concurrence(avg.embedded):.12f}")
