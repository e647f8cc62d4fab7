"""Pair fraction, pair-distance law and (R2, Z2) samples at a given density.

    python3 scripts/pair_statistics.py [LAMBDA] [TRIALS]

Prints the interior pair fraction, the KS p-values of the pair distances
against Rayleigh(alpha) and of Z2 against Rayleigh(sqrt(alpha^2 + zeta^2)).
"""
import math
import sys

import numpy as np
from scipy import stats

from nncoop import NetworkConfig, derive_constants, simulate_pair_statistics
from nncoop.distributions import RayleighLaw

if __name__ == "__main__":
    lam = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
    trials = int(sys.argv[2]) if len(sys.argv) > 2 else 200
    cfg = NetworkConfig(lam=lam)
    c = derive_constants(cfg)
    st = simulate_pair_statistics(cfg, c, trials, np.random.default_rng(12345),
                                  window_radius=20.0 / math.sqrt(lam),
                                  rz_samples=50_000)
    ks_w = stats.kstest(st.pair_distances, RayleighLaw(c.alpha).cdf)
    ks_z = stats.kstest(st.z2, RayleighLaw(c.z2_scale).cdf)
    print(f"delta (predicted pair fraction) = {c.delta:.4f}")
    print(f"pair fraction = {st.pair_fraction:.4f} over {st.interior_points} interior points")
    print(f"pair distance vs Rayleigh({c.alpha:.4f}): KS p = {ks_w.pvalue:.3f}")
    print(f"Z2 vs Rayleigh({c.z2_scale:.4f}): KS p = {ks_z.pvalue:.3f}")
