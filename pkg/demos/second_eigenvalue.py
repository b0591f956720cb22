"""Second eigenvalue from a mountain-pass path.

The first eigenfunction e1 and its negative are joined by a path on the unit
sphere of L^p; the lowest possible maximum of the Rayleigh quotient along
such paths is the second eigenvalue. ``eig2_minimax`` relaxes a discrete
string of functions towards that path.
Run with ``python demos/second_eigenvalue.py``.
"""

from mixspec import Box, Interval, SpectralMeasure, assemble, build, eig1, eig2_minimax, eig_all_p2
from mixspec.solver import brute_force_tiny, distinct_values

half = SpectralMeasure([(0.5, 1.0)], [], [], [], 0.5)

# For p = 2 the answer is the second eigenvalue of a symmetric matrix.
op = assemble(build(Interval(0.0, 1.0), 1 / 51), half, 2.0)
path = eig2_minimax(op)
print(f"p=2, n=50: path maximum {path.max_energy:.8f}, dense {eig_all_p2(op)[1][0]:.8f}")

# On four nodes every eigenpair can be found by brute force, even for p = 3.
op = assemble(build(Interval(0.0, 1.0), 1 / 5), half, 3.0)
pairs = brute_force_tiny(op)
print(f"p=3, n=4: distinct eigenvalues {[round(v, 6) for v in distinct_values(pairs)]}")
print(f"          path maximum {eig2_minimax(op).max_energy:.6f}")

# On the square the second level is degenerate. The climbing image of the
# string still lands on a sign-changing critical point.
op = assemble(build(Box(0.0, 1.0, 0.0, 1.0), 1 / 8), half, 1.5)
e1 = eig1(op)
path = eig2_minimax(op, e1, path_points=17)
ci = path.info["saddle_index"]
print(f"p=1.5 square: lambda1 = {e1.lam:.6f}, saddle {path.energies[ci]:.6f} "
      f"(residual {path.info['saddle_residual']:.1e}), after {path.sweeps} sweeps")
u = path.path[ci].reshape(7, 7)
for row in u[::-1]:
    print("   " + " ".join("+" if v > 0 else "-" for v in row))
