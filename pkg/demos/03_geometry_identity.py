"""
Cycle ends as an intersection of translates
===========================================

Last blocks of cycles are exactly the points of C_m that also lie in
C_{m-1} + v_{m-1}, C_{m-2} + v_{m-2} + v_{m-1}, and so on.
"""

from cyclegap import load_scenario, dr_gap_solve, verify_geometry
from cyclegap.verify import translate_offsets

for name in ["three_singletons", "intersecting_boxes", "four_in_r3"]:
    sc = load_scenario(name)
    ops, C = sc.ops, sc.product
    gap = dr_gap_solve(ops, C)
    print(name)
    print("  translate offsets\n", translate_offsets(ops, gap.v))
    rec = verify_geometry(ops, C, gap, samples=0 if sc.n <= 2 else 1000)
    print("  passed:", rec.passed, " candidates inside every translate:",
          rec.details["reverse_witnesses"], " violation:", rec.violation)
