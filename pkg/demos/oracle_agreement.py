"""Closed-form curvature against finite differences at one point.

The perturbed preset sits in none of the special classes, so every component
of its Douglas and Berwald tensors is exercised.

    python3 demos/oracle_agreement.py
"""

import numpy as np

from warpfinsler import families as fam
from warpfinsler.curvature import berwald_tensor, douglas_tensor, landsberg_from_berwald, landsberg_tensor
from warpfinsler.engine import EvalPoint, fundamental_tensor, spray
from warpfinsler.oracle import berwald_fd, douglas_fd, hessian_fd, relative_error, spray_fd

family = fam.preset("perturbed")
point = EvalPoint(0.2, np.array([0.35, -0.2]), 0.9, np.array([0.6, 1.1]))

rows = [
    ("metric", fundamental_tensor(family, point).g, hessian_fd(family, point)),
    ("spray", spray(family, point), spray_fd(family, point)),
    ("berwald", berwald_tensor(family, point), berwald_fd(family, point)),
    ("douglas", douglas_tensor(family, point), douglas_fd(family, point)),
    ("landsberg", landsberg_tensor(family, point), landsberg_from_berwald(family, point)),
]
print(f"point x={point.x}, y={point.y}")
for name, closed, reference in rows:
    print(f"{name:<10} sup={np.max(np.abs(closed)):9.3e}  rel.err={relative_error(closed, reference):9.2e}")
