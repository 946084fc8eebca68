"""Loss and radius limits of the near-cloak.

Two limits shrink the boundary footprint of the hidden object:

* the loss ``delta -> 0`` in the reference medium, at fixed ``rho``;
* the blow-up radius ``rho -> 0`` without loss, where the distance to
  vacuum decays roughly like ``rho**3``.

Run with ``python demos/near_cloak_limit.py``.
"""

from isocloak import ExperimentConfig, HiddenObject, sweep
from isocloak.measure import fitted_slope

obj = HiddenObject.homogeneous(eps=5.0 + 1.0j, mu=2.0)

base = ExperimentConfig(rho=0.25, n=0, object=obj)
rows = sweep([base.with_(delta=d) for d in (0.2, 0.1, 0.05, 0.02)], base.with_(delta=0.0))
print("delta   distance to the lossless reference")
for row in rows:
    print(f"{row.value:5.2f}   {row.distance_sup:.3e}")

rhos = [0.2, 0.1, 0.05, 0.025]
vacuum = base.with_(kind="vacuum")
rows = sweep([base.with_(rho=r) for r in rhos], vacuum)
print("\nrho     distance to vacuum")
for row in rows:
    print(f"{row.value:5.3f}   {row.distance_sup:.3e}")
slope = fitted_slope([r.value for r in rows], [r.distance_sup for r in rows])
print(f"fitted log-log slope: {slope:.2f}")
