"""Pure-geometry partition functions of multiple SLE as Feigin-Fuchs integrals.

Run:  python3 demos/pure_geometry_quadrature.py
"""

from slevir import geometry

kappa = 6.5
for cfg in geometry.enumerate_configs(4, 2):
    pts = [0.0, 1.0, 2.2, 3.5]
    Z = geometry.feigin_fuchs_Z(cfg, pts, kappa)
    worst = max(geometry.null_field_residual(cfg, pts, kappa, I) for I in range(1, 5))
    print(f"walk {cfg.walk()}: Z = {Z:.10g}, worst null-field residual {worst:.2e}")

# Two paired points merging: Z behaves like gap^((kappa-6)/kappa).
cfg = geometry.PairingConfig(4, ((1, 2), (3, 4)))
fit = geometry.asymptotic_exponent(cfg, [0.0, 1.0, 2.0, 3.0], kappa, (1, 2))
print(f"collapse of a paired couple: slope {fit.slope:.6f}, expected {(kappa - 6) / kappa:.6f}")

# The remaining pair factorizes off with a Beta-function constant.
for gap in (1e-2, 1e-3, 1e-4):
    print("erased-pair ratio at gap", gap, "=", geometry.erased_pair_ratio(cfg, [0.0, 1.0, 2.0, 3.0], kappa, (1, 2), gap))
