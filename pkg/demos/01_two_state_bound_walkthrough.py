"""Walkthrough: from a closed loop to an exact worst-case offset bound.

A lateral trajectory-following loop at 10 m/s with gains K_d = 0.3 and
K_theta = 0.5 sits in the complex-eigenvalue regime, so a constant
disturbance is NOT the worst case: a sign-switching curvature disturbance
drives the lateral offset about 25% higher.  This script walks through
every stage of the computation and cross-checks the closed form against
numerical quadrature.
"""

import numpy as np

from wcbound import (
    DisturbanceBounds,
    TfcParams,
    build_tfc,
    eigendecompose_and_classify,
    evaluate_impulse_channel,
    fixed_response_bound,
    modal_coefficients,
    pair_terms,
    quadrature_bound,
    tfc_bound_closed_form,
    total_bound,
)


def main():
    params = TfcParams(v=10.0, k_d=0.3, k_theta=0.5, z_max=0.1, d_max=0.4)
    sys = build_tfc(params)
    print("closed-loop dynamics A_cl:")
    print(sys.a_cl)
    print("disturbance map E:", sys.e_mat.ravel())

    eig = eigendecompose_and_classify(sys)
    print("\neigenstructure:")
    for e in eig.entries:
        print(f"  {e.value:.6f}  ({e.klass.value})")

    expansion = modal_coefficients(sys, k=0, j=0)
    print("\nmodal terms of the offset channel h(tau) = [e^(A_cl tau) e]_1:")
    for t in expansion.terms:
        print(f"  {t.kind.value:>12}: coeff {t.coeff:.6f}, lambda {t.lam:.6f}")
    taus = np.array([0.0, 0.1, 0.3, 0.6])
    print("channel samples:", np.round(evaluate_impulse_channel(expansion, taus), 6))

    paired = pair_terms(expansion)
    bound = total_bound(sys, 0, DisturbanceBounds([params.z_max]))
    print("\npair groups and their absolute integrals:")
    for label, mu in bound.per_channel[0].per_group:
        print(f"  {label}: {mu:.9f}")

    closed = tfc_bound_closed_form(params)
    quad = quadrature_bound(sys, 0, 0, z_max=params.z_max)
    fixed = fixed_response_bound(sys, 0, 0, z_max=params.z_max)
    print(f"\nworst-case offset bound (general pipeline): {bound.value:.9f} m")
    print(f"worst-case offset bound (closed form):      {closed:.9f} m")
    print(f"numerical quadrature of z*int|h|:           {quad:.9f} m")
    print(f"steady offset under constant z = z_max:     {fixed:.9f} m")
    print(f"\nthe two-state bound is exact: relative gap vs quadrature = "
          f"{abs(bound.value - quad) / quad:.2e}")
    print(f"switching disturbances are {bound.value / fixed:.3f}x worse than "
          f"holding z at its maximum forever.")


if __name__ == "__main__":
    main()
