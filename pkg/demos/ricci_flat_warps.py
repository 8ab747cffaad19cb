"""Which power warps h(r) = r^k make the g-family Ricci-flat?

Prints the worst Ricci-flatness residual over a (z, r) grid, together with
the Ricci scalar obtained by finite differences of the spray.

    python3 demos/ricci_flat_warps.py
"""

import numpy as np

from warpfinsler import families as fam
from warpfinsler.curvature import ricci_flat_residuals
from warpfinsler.engine import EvalPoint
from warpfinsler.oracle import ricci_fd

grid = [(z, r) for z in np.linspace(-2, 2, 9) for r in np.linspace(0.2, 0.9, 8)]
point = EvalPoint(0.0, np.array([0.3, 0.4, 0.1]), 0.7, np.array([0.5, -0.9, 0.4]))

print(f"{'h(r)':<8} {'n':>2} {'max|P|,|Q|':>12} {'Ric (fd)':>12}")
for expr in ("r^2", "3*r^2", "r", "1+r^2", "r^(-2)"):
    family = fam.g_family(expr, "sqrt(t^2+1)")
    for n in (2, 3, 4):
        worst = max(max(abs(v) for v in ricci_flat_residuals(family, z, r, n)) for z, r in grid)
        ric = ricci_fd(family, point) if n == 3 else float("nan")
        print(f"{expr:<8} {n:>2} {worst:12.2e} {ric:12.2e}")
