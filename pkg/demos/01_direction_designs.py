"""
Direction designs on the circle and the sphere
==============================================

Where you measure matters as much as how often.  This script compares
the spread (worst chordal distance to the nearest measurement direction)
of the two built-in designs and shows the guaranteed decay of the
stacked-net sequence.
"""

import numpy as np

from geotomo import (
    equally_spaced_2d,
    spread,
    spread_stats,
    stacked_net_sequence,
    voronoi_cell_measures,
)

# On the circle, k equally spaced directions are the best possible design:
# every gap is 2 pi / k, so the spread is exactly 2 sin(pi / (2k)).
for k in (8, 32, 128):
    ds = equally_spaced_2d(k)
    print(f"equally spaced k={k:4d}: spread {float(spread(ds)):.5f}  "
          f"(ideal {2 * np.sin(np.pi / (2 * k)):.5f})")

# The stacked-net sequence gives up a constant factor in exchange for a
# property no single design has: EVERY prefix is evenly spread.  You can
# stop measuring at any time and keep the guarantee.
seq = stacked_net_sequence(2, 512)
print("\nstacked-net prefixes (plane), k * spread stays bounded:")
for k in (3, 10, 30, 100, 300, 512):
    d = float(spread(seq.vectors[:k]))
    print(f"  k={k:4d}: spread {d:.5f}   k*spread {k * d:6.2f}")

# Same story on the sphere, with k^(1/2) replacing k.  Spread here is
# certified: the value carries an upper bound on its evaluation error.
seq3 = stacked_net_sequence(3, 400)
print("\nstacked-net prefixes (sphere), sqrt(k) * spread stays bounded:")
for k in (4, 16, 64, 256, 400):
    d = spread(seq3.vectors[:k], eval_eps=0.05)
    print(f"  k={k:4d}: spread {float(d):.4f} (+/- {d.error:.3f})   "
          f"sqrt(k)*spread {np.sqrt(k) * float(d):5.2f}")

# Voronoi cell measures tell the same story pointwise: for a balanced
# design no direction owns much more of the sphere than its fair share.
ds = stacked_net_sequence(3, 100)
cells = voronoi_cell_measures(ds)
print(f"\n100-direction sphere design: cell areas "
      f"min {cells.min():.4f}, mean {cells.mean():.4f}, max {cells.max():.4f}")
stats = spread_stats(ds)
print(f"summary bundle: spread {float(stats.spread):.4f}, "
      f"symmetrized {float(stats.symmetrized):.4f}, max cell {stats.max_cell:.4f}")
