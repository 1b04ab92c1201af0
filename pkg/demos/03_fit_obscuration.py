# coding: utf-8

# # Recovering the obscuration ratio from a profile
#
# The far-field intensity of a uniformly lit annulus is
# I0 [2 J1(v)/v - e^2 2 J1(e v)/(e v)]^2 / (1 - e^2)^2. Fitting it to a
# measured slice returns e = a0/a1.

import numpy as np

from fwmconv import RadialProfile, annular_airy_intensity, first_zero, fit_airy, heuristic_guess

for e in (0.0, 0.5, 0.55, 0.75):
    print(f"e = {e}: first zero at v = {first_zero(e):.6f}")

# ## Noiseless round trip

x = np.linspace(-150, 150, 2048)      # um
truth = dict(eps=0.55, scale=12.0, center=3.3)
y = annular_airy_intensity((x - truth["center"]) / truth["scale"], truth["eps"])
fit = fit_airy(RadialProfile(x, y))
print(f"noiseless: eps {fit.eps_ratio:.8f}, scale {fit.scale:.6f}, centre {fit.center:.6f}")

# ## With 1% detector noise

errs = []
for seed in range(20):
    noisy = np.clip(y + np.random.default_rng(seed).uniform(-0.01, 0.01, y.size), 0, None)
    prof = RadialProfile(x, noisy)
    errs.append(fit_airy(prof, heuristic_guess(prof, 0.5)).eps_ratio - truth["eps"])
print(f"1% noise, 20 seeds: mean error {np.mean(errs):+.4f}, worst {np.max(np.abs(errs)):.4f}")
