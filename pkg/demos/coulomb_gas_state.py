"""Build the Fock-space state of an SLE variant and check that each component is a local martingale.

Run:  python3 demos/coulomb_gas_state.py
"""

from slevir import make_variant
from slevir.fock import build_Gf, state_annihilation_failures, state_components

G = build_Gf(4)
print("G_f up to degree 4 has", len(G.terms), "words; first few:")
for word in sorted(G.terms, key=lambda w: (sum(w), w))[:5]:
    print("  ", word, G.terms[word])

v = make_variant("kappa-rho", rho=["2", "kappa/3"], depth=8)
comps = state_components(v, lmax=3, D=4)
for part, comp in comps:
    print(f"component a_{list(part)}:", comp)
bad = state_annihilation_failures(v, comps)
print("components failing the drift equation:", bad or "none")
