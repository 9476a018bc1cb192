"""Cusp nucleation at a two-phase interface.

A slab of phase 1 sits in phase 2 with phase 3 absent.  With the simple
gamma coefficients the third phase appears at the interfaces once sigma12
exceeds sigma13 = sigma23; the consistent coefficients keep it out.

    python3 demos/cusp_nucleation.py
"""
from tphase.experiments import cusp_experiment
from tphase.params import ModelSpec, NumericalParams

base = ModelSpec(
    numerics=NumericalParams(epsilon=0.02, dt=1e-5, t_end=0.1, Nx=256, Ny=8, Ly=0.25, output_every=1000)
)

print(f"{'ratio':>6} {'mode':>13} {'height':>8} {'loss':>8} {'width':>8}")
for mode in ("inconsistent", "consistent"):
    for ratio in (1.5, 2.0, 3.0, 4.0):
        r = cusp_experiment(ratio, mode, base)
        print(f"{ratio:6.1f} {mode:>13} {r.cusp_height:8.4f} {r.relative_energy_loss:8.4f} {r.cusp_width:8.4f}")
