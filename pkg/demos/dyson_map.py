"""Time-dependent Dyson maps that turn the same H into different Hermitian h(t)."""

from quasih import dyson_demo
from quasih.dyson import demo_generator, step_halving_ratio

for choice in ("h_zero", "constant_A", "time_dep_A"):
    rep = dyson_demo(choice, t_end=2.0)
    print(f"{choice:11s} max |h - target| {rep.max_deviation:.2e}  "
          f"hermiticity defect {rep.max_hermiticity_defect:.2e}")
print(f"RK4 step-halving error ratio at h = 0.1: {step_halving_ratio(demo_generator, 2.0, 0.1):.2f}")
