"""Label model versus concentration model on a lens of phase 3.

Both models start from the same configuration (a disk of phase 3 on a flat
1-2 interface) and are compared every output interval.  Takes about half a
minute.

    python3 demos/model_comparison.py
"""
from tphase.experiments import comparison_experiment, comparison_pair
from tphase.params import ModelSpec, NumericalParams

base = ModelSpec(numerics=NumericalParams(epsilon=0.025, dt=5e-6, t_end=0.01, Nx=128, Ny=128, output_every=200))

for kind in ("matching", "consistent"):
    res = comparison_experiment(comparison_pair(kind, base))
    print(f"{kind}: max L2 {res.max_l2:.2e}, max relative energy difference {res.max_relative_energy_difference:.2e}")
    for t, l2, de in zip(res.times[::10], res.l2_c[::10], res.relative_energy_difference[::10]):
        print(f"   t={t:.4f}  L2(c)={l2:.2e}  dE/E={de:.2e}")
