"""Float bin discretizations of interval maps, validated against the exact layer.

The bin matrix entry (i, j) is the fraction of bin i that the map sends
into bin j.  For the doubling map with a power-of-two bin count this float
construction reproduces the exact dyadic transfer matrix to machine
precision, so the two layers check each other; the rotation control shows
what a genuinely non-mixing profile looks like.
"""

from fractions import Fraction

import numpy as np

from pfkit import dense_exact_matrix, mixing_profile, ulam_assemble

doubling = ulam_assemble("doubling", 256)
exact = dense_exact_matrix(8)
print("doubling, 256 bins: max |ulam - exact| =", np.abs(doubling.matrix - exact).max())

profile, verdict = mixing_profile(doubling, [0], n_max=10)
print("single-bin target profile:", np.round(profile, 6))
print("verdict:", verdict)

tent = ulam_assemble("tent", 256)
tent_profile, tent_verdict = mixing_profile(tent, list(range(128)), n_max=10)
print("\ntent map verdict:", tent_verdict)

rotation = ulam_assemble("rotation", 64, alpha=Fraction(1, 4))
rot_profile, rot_verdict = mixing_profile(rotation, list(range(32)), n_max=64)
print("\nrotation by 1/4 verdict:", rot_verdict)
print("rotation profile never drops below:", rot_profile.min())

# a custom map: the doubling map supplied as explicit affine branches
custom = ulam_assemble(
    "custom", 64, branches=((0.0, 0.5, 2.0, 0.0), (0.5, 1.0, 2.0, -1.0))
)
assert np.allclose(custom.matrix, ulam_assemble("doubling", 64).matrix)
print("\ncustom branch spec reproduces the built-in doubling matrix")
