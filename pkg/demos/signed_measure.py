"""A negative part in the spectral measure.

Subtracting a small multiple of a lower-order operator lowers lambda1 but
keeps the problem coercive and the first eigenfunction positive.
Run with ``python demos/signed_measure.py``.
"""

import numpy as np

from mixspec import Interval, SpectralMeasure, assemble, build, eig1
from mixspec.measure import gamma

dom = build(Interval(0.0, 1.0), 1 / 41)
print(f"{'w':>6s} {'gamma':>9s} {'lambda1':>10s} {'min u':>9s}")
for w in np.linspace(0.0, 1.0, 11):
    m = SpectralMeasure([(0.75, 1.0)], [], [(0.2, w)], [], 0.75)
    r = eig1(assemble(dom, m, 2.0))
    print(f"{w:6.2f} {gamma(m):9.3g} {r.lam:10.5f} {np.min(r.u):9.3g}")
