# coding: utf-8

# # The four-wave-mixing gain as a soft aperture
#
# Gain in the vapour cell depends on the phase mismatch dk, and dk depends on
# the angle a ray makes with the pump. Mapping the gain over the far-field
# plane gives a transmission mask concentrated on the phase-matching cone.

import math

import numpy as np

from fwmconv import (GainParameters, RadialQuadratic, build_dk_map, gain_conjugate, gain_probe,
                     half_max_band, make_grid, matched_eps_l, soft_aperture_mask)

# ## Operating point
#
# A probe gain of about 30 at phase matching fixes eps L through cosh^2(eps L) = 30.

x = matched_eps_l(30.0)
print(f"eps L = {x:.6f}, cosh^2 = {math.cosh(x) ** 2:.6f}, sinh^2 = {math.sinh(x) ** 2:.6f}")

p = GainParameters()
for dk in (0.0, 1e-4, 2e-4, 4e-4):
    print(f"dk = {dk:.0e} rad/um: probe {gain_probe(dk, p):7.3f}  conjugate {gain_conjugate(dk, p):7.3f}")

# Letting dk shift only the envelope phase, as a literal reading of the
# coupled-mode solution does, leaves the gain flat in dk:

flat = GainParameters(mismatch_in_eigenvalue=False)
print("envelope-only model:", gain_probe(np.array([0.0, 4e-4]), flat))

# ## Mask over the far field
#
# dk = kappa (theta^2 - theta_pm^2) / 2 with kappa = 2k and a 1 degree cone.

grid = make_grid(1024, 1024, 19.4)
model = RadialQuadratic(x0=math.radians(1.0) * 300_000.0)
dkmap = build_dk_map(grid, model)
mask = soft_aperture_mask(dkmap, p, "conjugate")
lo, hi = half_max_band(dkmap, mask)
print(f"half-maximum band: {math.degrees(lo):.4f} to {math.degrees(hi):.4f} deg around the cone axis")
print(f"band width in the lens plane: {(hi - lo) * 300_000:.0f} um")
