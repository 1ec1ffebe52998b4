"""Walk the admissibility arithmetic for a canonical two-layer parameter set.

The workbench only solves for solitary waves inside an explicit window:
the travelling speed must stay below a bound set by the layer densities,
the quadratic symbol f must stay positive, and a finite lower-layer depth
mu2 must sit above a computable threshold.  This script prints each piece
and then shows the report flipping to inadmissible as omega leaves the
window and as mu2 drops through the threshold.
"""

from iswaves import (
    ModelParams,
    admissibility_report,
    compute_f_min,
    compute_M,
    compute_mu2_threshold,
    compute_speed_window,
    validate_bfd_params,
)

p = ModelParams(
    gamma=0.5, b=0.25, d=0.25, a=-1.0 / 12.0, c=-1.0 / 12.0,
    mu=0.1, epsilon=0.1, mu2=4.0,
)

print("structural checks:", validate_bfd_params(p) or "all satisfied")
print(f"speed window: |omega| < {compute_speed_window(p):.6f}")

f_min, x_min, beta0 = compute_f_min(p, omega=0.0)
print(f"f_min at omega=0: {f_min:.6f} (attained at x = {x_min:.4f}, "
      f"curvature coefficient {beta0:.4f})")
print(f"mu2 threshold at omega=0: {compute_mu2_threshold(p, 0.0):.6f}")
print(f"coercivity margin M(0): {compute_M(p, 0.0):.6f}")

print("\nsweeping omega:")
for omega in (0.0, 0.1, 0.15, 0.1667, 0.2):
    rep = admissibility_report(p, omega)
    status = "admissible" if rep.admissible else "INADMISSIBLE"
    extra = "; ".join(rep.violations)
    print(f"  omega = {omega:<7} f_min = {rep.f_min:+.4f}  {status}"
          + (f"  ({extra})" if extra else ""))

print("\nshrinking the lower layer:")
for mu2 in (4.0, 1.0, 0.7, 0.5):
    rep = admissibility_report(ModelParams(
        gamma=0.5, b=0.25, d=0.25, a=-1.0 / 12.0, c=-1.0 / 12.0,
        mu=0.1, epsilon=0.1, mu2=mu2,
    ), 0.0)
    status = "admissible" if rep.admissible else "INADMISSIBLE"
    print(f"  mu2 = {mu2:<5} threshold = {rep.mu2_threshold:.4f}  {status}")
