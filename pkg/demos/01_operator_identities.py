"""
The cyclic shift and its relatives
==================================

Points of X = (R^n)^m are (m, n) arrays. The shift moves every block one
slot down, wrapping the last block to the front.
"""

import numpy as np
from cyclegap import CycleOperators, identity_violations

ops = CycleOperators(4, 2)
x = np.arange(8.0).reshape(4, 2)
print("x\n", x)
print("shift(x)\n", ops.shift(x))

# difference = shift - I; its blocks always sum to zero
sx = ops.difference(x)
print("difference(x)\n", sx, "\nblock sum", sx.sum(axis=0))

# inverse_difference undoes difference on balanced points
y = ops.project_balanced(np.random.default_rng(0).standard_normal(ops.shape))
print("round trip error", np.linalg.norm(ops.difference(ops.inverse_difference(y)) - y))

# the whole suite at once
for name, value in identity_violations(4, 2, trials=200).items():
    print(f"{value:9.2e}  {name}")
