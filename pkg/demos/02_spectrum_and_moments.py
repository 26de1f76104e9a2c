"""Spectral decomposition and the moment functionals built on it.

Shows the pi-orthonormal eigenbasis, heat-kernel diagonal ratios, the
inverse-eigenvalue moments, their pointwise counterparts, the windowed
variants with the gamma window mass, and the eigenvalue-clustering
diagnostic for the drifted birth-death family.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from mixbound import chains, spectral

kernel = chains.build_family(chains.complete_spec(4))
decomp = spectral.decompose(kernel)
print("complete(4) Laplacian eigenvalues:", decomp.lambdas)
print("gap:", decomp.gap, " relaxation time:", decomp.t_rel)

print("\nheat diagonal ratio H_t(x,x)/pi(x) at x=0:")
for t in (0.0, 0.75, 3.0):
    print(f"  t={t}: {spectral.heat_diag_ratio(decomp, 0, t):.6f}"
          + ("  (= 1 + 3 e^{-1})" if t == 0.75 else ""))

print("\ninverse-eigenvalue moments (order ell sums lambda^-ell):")
for ell in (1, 2, 3):
    print(f"  order {ell}: {spectral.spectral_moment(decomp, ell):.6f}")
print("order 1 equals the average hitting time (eigentime identity).")

print("\npointwise moments at x=0 (pi-average reproduces the global moment):")
for ell in (1, 2):
    local = spectral.heat_moment_all(decomp, ell)
    print(f"  order {ell}: local={local[0]:.6f} "
          f"pi-average={float(kernel.pi @ local):.6f} "
          f"global={spectral.spectral_moment(decomp, ell):.6f}")

print("\nwindowed moments keep at least the gamma window mass:")
for ell in (1, 2, 5):
    kappa = spectral.gamma_window_mass(ell)
    full = spectral.heat_moment(decomp, 0, ell)
    windowed = spectral.heat_moment_windowed(decomp, 0, ell)
    print(f"  order {ell}: windowed/full = {windowed / full:.6f} >= "
          f"window mass {kappa:.6f}")

print("\neigenvalue clustering of the drifted birth-death chain:")
for eps in (0.2, 0.01, 1e-5):
    d = spectral.decompose(chains.build_family(chains.dlp_spec(24, 0.5, eps)))
    frac = spectral.eigenvalue_clustering(d, 0.5, rel_tol=0.05)
    print(f"  eps={eps:g}: {frac:.0%} of nonzero eigenvalues within 5% of the rate")
print("shrinking the drift collapses the whole spectrum onto the rate, the")
print("regime where the gap-and-hitting-time bounds are attained exactly.")
