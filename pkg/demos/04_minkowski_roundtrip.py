"""
From surface area measure to body and back
==========================================

A convex body determines a measure on directions: each face contributes
its area at its outer normal.  The converse (recovering the body from
the measure) is the Minkowski problem.  In the plane it is a matter of
sorting edges by angle; in space we minimize a convex functional over
support values.  Either way the roundtrip body -> measure -> body is
exact up to translation.
"""

import numpy as np

from geotomo import (
    blaschke_body,
    hausdorff_distance,
    minkowski_reconstruct,
    reference_body,
    surface_area_measure,
    translate,
)
from conftest_free_helpers import random_polytope_3d  # noqa: F401  (see below)
