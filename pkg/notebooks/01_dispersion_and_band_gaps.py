"""Dispersion curves and band gaps of a cyclic mass-spring chain.

Walks through the basic physics layer: assemble the Bloch dynamical
matrix for a small periodic chain, sweep the wavenumber across the
irreducible Brillouin zone, and read off the gap between two bands.
The diatomic chain has a closed-form gap, which we check against.

Run from the repository root:

    python3 notebooks/01_dispersion_and_band_gaps.py
"""
import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt

import bandgapopt as bg

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# --- The diatomic chain: alternating masses, uniform springs ---------------
# With masses (1, 2) and unit springs, the acoustic band tops out at
# sqrt(2*k/m_heavy) = 1 and the optical band bottoms out at
# sqrt(2*k/m_light) = sqrt(2), so the gap is sqrt(2) - 1.
params = bg.ChainParams(masses=[1.0, 2.0], stiffnesses=[1.0, 1.0])
result = bg.band_gap(params, j=1)
print(f"diatomic gap      : {result.gap:.12f}")
print(f"closed-form value : {np.sqrt(2) - 1:.12f}")
print(f"gap edges at kappa = {result.kappa_lower:.3f} / {result.kappa_upper:.3f}")

# The monatomic chain (equal masses) has touching bands -> zero gap.
closed = bg.band_gap(bg.ChainParams([1.0, 1.0], [1.0, 1.0]), j=1)
print(f"monatomic gap     : {closed.gap:.3e}  (bands touch)")

# --- Plot dispersion for a 4-site chain ------------------------------------
params4 = bg.ChainParams([1.0, 2.5, 1.2, 3.0], [1.0, 0.8, 1.5, 1.1])
disp = bg.dispersion_bands(params4)
gap2 = bg.band_gap(params4, j=2)
print(f"\n4-site chain, gap above band 2: {gap2.gap:.6f}")

fig, ax = plt.subplots(figsize=(5, 4))
for band in disp.bands.T:
    ax.plot(disp.kappa_grid, band, lw=1.5)
ax.axhspan(gap2.lower_max, gap2.upper_min, color="0.85", zorder=0)
ax.set_xlabel(r"$\kappa$")
ax.set_ylabel(r"$\omega$")
ax.set_title("Dispersion of a 4-site cyclic chain (gap shaded)")
fig.tight_layout()
path = os.path.join(OUT, "dispersion_4site.svg")
fig.savefig(path)
print(f"wrote {path}")
