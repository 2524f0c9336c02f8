"""Published values that reports are compared against.

Bump ``FIXTURE_VERSION`` whenever an entry changes.
"""

FIXTURE_VERSION = 1

# achievable sizes of exceptional sets in Z/ell, as published for ell <= 29
PUBLISHED_TABLE = {
    8: (3,),
    11: (4,),
    17: (6,),
    18: (6,),
    19: (6,),
    20: (6, 7),
    21: (6,),
    22: (7,),
    23: (8,),
    24: (7, 8),
    25: (8,),
    26: (7, 8, 9),
    27: (8,),
    28: (8, 9),
    29: (8, 10),
}
PUBLISHED_TABLE_MAX_ELL = 29

BASIC_EXAMPLE = (5, (2, 3))

MOD71_HALF = (1, 3, 5, 17, 26, 30, 32)
MOD71 = 71

# indices reported as the only obstructions for eta > 11/32
PUBLISHED_TROUBLE_INDICES = (8, 11, 14, 17, 20, 23, 26, 29, 32)
PUBLISHED_TROUBLE_ETA = (11, 32)
# primes p with gcd(p - 1, 4*7*11*17*23*29) = 2
PUBLISHED_GCD_MODULUS = 4 * 7 * 11 * 17 * 23 * 29

# reference exponents for the subgroup audits
P2_EXPONENT = 0.768
P2_EXPONENT_CUBE_FREE = 0.683
