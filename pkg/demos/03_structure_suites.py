"""Structural theorems, checked numerically.

Three structure results about numerical radii and indices on p-sums:

  1. Projection invariance: composing with the canonical coordinate
     projections of a p-sum leaves the numerical radius unchanged
     (checked case by case by the gcc suite).
  2. The index of an l1/linf sum is the infimum of the summand indices.
  3. Duality: nu(T*) = nu(T), so index estimates transfer to the dual.

Each suite returns a SuiteReport with per-case violations; a pass means
every case satisfied the identity within the suite tolerance.

Run:  python3 demos/03_structure_suites.py      (a couple of minutes)
"""
from numindex import (descriptor_to_text, duality_check, gcc_check, lp,
                      monotone_sweep, psum, scalar, sum_index_check)


def show(report) -> None:
    print(f"  suite={report.suite:10s} cases={len(report.cases):3d} "
          f"max violation={report.max_violation:.3e} "
          f"tolerance={report.tolerance:.0e} -> "
          f"{'PASS' if report.passed else 'FAIL'}")


def main() -> None:
    # --- projection invariance on an l_1 base (exact backend) ---------------
    print("Projection invariance (gcc) on", descriptor_to_text(lp(1.0, 3)))
    show(gcc_check(lp(1.0, 3), subset=(0, 1), cases=20, budget=24, seed=0))

    # --- duality nu(T*) = nu(T) ---------------------------------------------
    desc = psum(3.0, [lp(2.0, 2), scalar()])
    print("Duality nu(T*) = nu(T) on", descriptor_to_text(desc))
    show(duality_check(desc, cases=20, budget=24, seed=0))

    # --- sum formula: n(X (+) Y) = min over summands -------------------------
    # l_2^2 has real index 0, the scalar line has index 1; their l_1-sum
    # must come out (numerically) at 0.  Each summand's worst operator is
    # embedded through its block projection to seed the sum-space search.
    print("Sum formula on", descriptor_to_text(psum(1.0, [lp(2.0, 2), scalar()])))
    show(sum_index_check([lp(2.0, 2), scalar()], mode="l1", budget=80, seed=0))

    # --- monotonicity of n(l_3^m) in the dimension m -------------------------
    # Best-found upper bounds along m = 1..4; the witness from each level
    # seeds the next one, so the trajectory is structurally nonincreasing.
    print("Monotone sweep of index upper bounds for l_3^m, m = 1..4")
    rep = monotone_sweep(3.0, [1, 2, 3, 4], budget=80, seed=0)
    for m, v in rep.extra["trajectory"]:
        print(f"  m={m}: upper bound {v:.6f}")
    show(rep)


if __name__ == "__main__":
    main()
