#!/usr/bin/env python3
"""Sharp-decay study of the forced Jacobi solution.

Solves psi'' + alpha psi' + beta psi = tr(A^3) along a profile and
prints the dyadic-window sups of the dimension-appropriate weighted
quantity together with the near-axis exponent, illustrating the 1/s
decay in high dimensions and the log-corrected rates for N = 3, 4.
"""

import argparse

import numpy as np

from cjlab import (
    ConeSpec,
    ShootingConfig,
    geometry_trace,
    integrate_profile,
    near_origin_behavior,
    solve_jacobi,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--s-max", type=float, default=2100.0)
    args = ap.parse_args()

    spec = ConeSpec(args.m, args.n)
    curve = integrate_profile(ShootingConfig(spec=spec, s_max=args.s_max,
                                             grid_step=1e-4))
    trace = geometry_trace(curve)
    sol = solve_jacobi(curve, trace)
    report = sol.decay_report

    print(f"spec ({spec.m},{spec.n}), N = {spec.N}; weight: {report['weight']}")
    print(f"residual sup (re-evaluated by finite differences): {sol.residual:.3e}")
    print(f"{'window':>20} {'weighted sup':>14}")
    for (lo, hi), sup in zip(report["windows"], report["sups"]):
        print(f"  [{lo:8.0f},{hi:8.0f}] {sup:>14.6f}")
    origin = near_origin_behavior(sol, spec)
    print(f"near-axis exponent: {origin.exponent:.4f} "
          f"(log correction detected: {origin.log_detected})")
    print(f"tail |psi| exponent over [100, {args.s_max:.0f}]: "
          f"{report['fitted_exponent']:.4f}")


if __name__ == "__main__":
    main()
