"""Scaling algebra and projective metrics on a product cone.

Walks through the basic objects: block vectors, the (x) scaling action, its
matrix-exponent algebra, and the weighted Hilbert / Thompson metrics under
which suitable maps become contractions.  The running example is the
two-block map ((s,t),(u,v)) -> ((u^2,v^2),(s^{1/8},t^{1/8})), which *expands*
the plain Hilbert metric on R^4 yet contracts a weighted product metric at
rate 1/2.
"""

import numpy as np

from mhspectral import (
    ProductVector,
    evaluate,
    hilbert_metric,
    lipschitz_bound,
    matrix_power_scale,
    motivating_map,
    scale_blocks,
    thompson_metric,
)

# --- block scalings ---------------------------------------------------------

x = ProductVector([[1.0, 2.0], [3.0, 4.0]])
alpha = np.array([2.0, 0.5])
print("x              =", x)
print("alpha (x) x    =", scale_blocks(alpha, x))

B = np.array([[0.0, 2.0], [0.125, 0.0]])
print("alpha^B        =", matrix_power_scale(alpha, B))
print("alpha^(B+B)    =", matrix_power_scale(alpha, 2 * B))
print("(alpha^B)^B    =", matrix_power_scale(matrix_power_scale(alpha, B), B))
print("alpha^(B@B)    =", matrix_power_scale(alpha, B @ B), "  (same, by the exponent law)")

# --- the expansion/contraction contrast --------------------------------------

F = motivating_map()
print("\nmap:", F.label, " homogeneity matrix A =\n", np.asarray(F.A))

flat_x = ProductVector([[1.0, 1.0, 1.0, 1.0]])
flat_y = ProductVector([[1.0, 1.0, 1.0, 2.0]])
x2 = ProductVector([[1.0, 1.0], [1.0, 1.0]])
y2 = ProductVector([[1.0, 1.0], [1.0, 2.0]])
fx, fy = evaluate(F, x2), evaluate(F, y2)

print("\nplain Hilbert metric on R^4 (one block):")
print("  mu(x, y)       =", hilbert_metric(flat_x, flat_y, [1.0]), " (= ln 2)")
print(
    "  mu(F(x), F(y)) =",
    hilbert_metric(ProductVector([fx.concat()]), ProductVector([fy.concat()]), [1.0]),
    " (= ln 4: the map doubles distances!)",
)

b = np.array([0.25, 1.0])
C = lipschitz_bound(F.A, b)
print("\nweighted two-block metric with b = (1/4, 1):  Lipschitz bound C =", C)
print("  mu_b(x, y)       =", hilbert_metric(x2, y2, b))
print("  mu_b(F(x), F(y)) =", hilbert_metric(fx, fy, b), " (halved)")
print("  Thompson analogue:", thompson_metric(fx, fy, b), "<=", C * thompson_metric(x2, y2, b))

# --- random spot check of the contraction bound ------------------------------

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(2000):
    p = ProductVector([rng.uniform(0.1, 3.0, 2), rng.uniform(0.1, 3.0, 2)])
    q = ProductVector([rng.uniform(0.1, 3.0, 2), rng.uniform(0.1, 3.0, 2)])
    num = hilbert_metric(evaluate(F, p), evaluate(F, q), b)
    den = hilbert_metric(p, q, b)
    if den > 0:
        worst = max(worst, num / den)
print(f"\nworst observed contraction factor over 2000 random pairs: {worst:.6f} (bound {C})")
