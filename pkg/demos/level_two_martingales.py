"""Local martingales of SLE_kappa(kappa-6) at low level, and what happens at special kappa.

Run:  python3 demos/level_two_martingales.py
"""

from fractions import Fraction

from slevir import apply_A, apply_L, build_module, find_singular_null, make_variant
from slevir.virasoro import apply_word

v = make_variant("kappa-rho", rho=["kappa-6"], depth=8)
print("partition function Z =", v.Z)
print("highest weight:", v.highest_weight)

# Every L_{-n} applied to Z stays in the kernel of the drift operator.
for word in ([-2], [-3], [-2, -2]):
    e = apply_word(word, v.weights, v.Z)
    print(f"L{word} Z / Z =", v.ratio(e))
    assert apply_A(v, "x", e).is_zero()

# L_{-1} Z vanishes (translation invariance), so level one is empty.
mb = build_module(v, 4)
print("graded dimensions at generic kappa:", mb.dims)

# At kappa = 6 the whole level-two piece collapses.
print("L-2 Z at kappa=6:", apply_L(-2, v.weights, v.Z).specialize(kappa=Fraction(6)))

# At kappa = 8/3 the level-two vector becomes singular.
r = find_singular_null(v, 2, Fraction(8, 3))
print("kappa=8/3 singular vector ratio:", r["singular_vectors"][0]["ratio"])

# At kappa = 10 two level-four words become dependent.
r = find_singular_null(v, 4, Fraction(10))
print("kappa=10 null relation:", r["null_vectors"])
