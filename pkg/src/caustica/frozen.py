"""Regression constants, measured once and frozen.

The theorems only give ``<~`` with non-effective constants.  Each constant
below was measured on the disk at 8 log-spaced levels in [125, 500] with
delta = lambda^(-1/3) and the default cutoff.  Checks assert that the same
quantity stays within a factor 2 of the frozen value for larger levels.
"""

CALIBRATION_RANGE = (125.0, 500.0)
GROWTH_FACTOR = 2.0

# min adjacent caustic gap * lambda on mu in [0.3, 0.9]                  (measured 2.208)
DISK_SPACING_INTERIOR = 2.208
# min adjacent gap * lambda * eps^(1/2) on [1 - 2 eps, 1 - eps/2], eps = lambda^(-1/3)   (measured 1.544)
DISK_SPACING_BOUNDARY = 1.544
# max |phi| / Airy envelope over the interior grid of r in [0.3, 0.7]     (measured 0.7537)
DISK_ENVELOPE = 0.7537
# max n1^(1/3) |a_k1 - a_k2| / (n2 - n1) over band pairs, n >= 0.3 lambda  (measured 1.316)
DISK_PAIR_RATIO = 1.316
# min (1 - mu) lambda^(2/3) over band members                              (measured 1.849)
DISK_BOUNDARY_DISTANCE = 1.849
# max Sigma_A / S over the grid of r in [0.9, 1], alpha = 0.1              (measured 5.247e-4)
DISK_SIGMA_A_FRACTION = 5.247e-4
# max Sigma_C / lambda^(8/9) over the same grid                            (measured 0.2262)
DISK_SIGMA_C = 0.2262
# band cardinality / lambda^(2/3) range                                    (measured 1.873 .. 2.36)
DISK_COUNT_RANGE = (1.873, 2.36)


def upper(frozen):
    """Largest value accepted for a quantity that must not grow."""
    return GROWTH_FACTOR * frozen


def lower(frozen):
    """Smallest value accepted for a quantity that must stay bounded below."""
    return frozen / GROWTH_FACTOR
