"""First eigenvalue of a superposition of fractional p-Laplacians.

Walks through the basic workflow on the unit interval: build a grid, pick a
spectral measure, assemble the operator and minimize the Rayleigh quotient.
Run with ``python demos/first_eigenvalue.py``.
"""

import math

import numpy as np

from mixspec import Interval, SpectralMeasure, assemble, build, eig1, eig_all_p2

h = 1 / 100
dom = build(Interval(0.0, 1.0), h)
print(f"{dom.n} interior nodes, h = {h}")

# A single atom at s = 1 is the ordinary (discrete) Laplacian. Its first
# eigenvalue has a closed form, which makes a good first check.
local = SpectralMeasure([(1.0, 1.0)], [], [], [], 1.0)
r = eig1(assemble(dom, local, 2.0))
exact = 2 / h ** 2 * (1 - math.cos(math.pi * h))
print(f"local p=2: lambda1 = {r.lam:.10f}  closed form {exact:.10f}  pi^2 = {math.pi ** 2:.6f}")

# Mixing orders: the same solver handles any finite combination of atoms
# and piecewise-constant densities in s.
for label, m in [
    ("s=1/2", SpectralMeasure([(0.5, 1.0)], [], [], [], 0.5)),
    ("s=1 + s=1/2 (w=0.5)", SpectralMeasure([(1.0, 1.0), (0.5, 0.5)], [], [], [], 0.5)),
    ("uniform density on [0.3, 0.8]", SpectralMeasure([], [(0.3, 0.8, 1.0)], [], [], 0.5)),
]:
    op = assemble(dom, m, 2.0)
    lam = eig1(op).lam
    dense = eig_all_p2(op)[0][0]
    print(f"{label:32s} lambda1 = {lam:.8f}   dense solver {dense:.8f}")

# Away from p = 2 the problem is nonlinear; eig1 uses several random starts
# and reports how many of them reach the same minimum.
half = SpectralMeasure([(0.5, 1.0)], [], [], [], 0.5)
for p in (1.5, 3.0):
    r = eig1(assemble(dom, half, p), n_restarts=4)
    print(f"s=1/2, p={p}: lambda1 = {r.lam:.8f}, {r.restarts_agreeing} starts agree, "
          f"min u = {np.min(r.u):.3g}")

# An atom at s = 0 adds c |u|^p, so it moves lambda1 by exactly c.
op = assemble(dom, half, 1.5)
a = eig1(op).lam
b = eig1(assemble(dom, half.with_atom("plus", 0.0, 2.0), 1.5)).lam
print(f"adding atom(0, 2): {a:.10f} -> {b:.10f}, difference {b - a:.3e}")
