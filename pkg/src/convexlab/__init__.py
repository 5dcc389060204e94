"""convexlab: geometry of unit balls in normed spaces.

Norm specs and ball probes, certified min-norm solvers, convexity moduli,
minimum-norm functional extensions, best approximation, weak-limit checks,
and a 1-d Galerkin solver whose energy norm feeds the convexity machinery.
"""

from .norm_core import (
    BOUNDARY_TOL,
    BallProbeViolation,
    InnerProduct,
    Lp,
    NormSpec,
    SparseSeq,
    SumNorm,
    as_vector,
    ball_convexity_probe,
    ball_membership,
    norm_eval,
    norm_eval_rows,
    parallelogram_defect,
    spec_from_json,
    spec_to_json,
    sphere_sample_2d,
    triangle_defect,
)

__version__ = "0.1.0"
