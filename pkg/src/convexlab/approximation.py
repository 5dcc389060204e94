"""Best approximation from finite-dimensional subspaces.

Minimizes ‖f - Y c‖ over coefficients, certifies the optimal distance by
weak duality, and probes the minimizer set with perturbed objectives to
decide between a unique nearest point and a face of them.  Existence always
holds here (finite dimension); uniqueness is exactly what the probe reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .norm_core import InnerProduct, Lp, NormSpec, as_vector, norm_eval
from .solvers import SolverConvergenceError, face_probe, solve_min_norm

__all__ = [
    "ApproxResult",
    "UniquenessCheck",
    "best_approximation",
    "nearest_point_uniqueness_check",
    "verify_minimizer_pair",
]


def _validated_basis(Y) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.ndim != 2 or Y.shape[1] < 1 or Y.shape[1] > Y.shape[0]:
        raise ValueError("basis must be n x k with 1 <= k <= n")
    if not np.all(np.isfinite(Y)):
        raise ValueError("basis entries must be finite")
    sv = np.linalg.svd(Y, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise ValueError("basis is numerically rank deficient")
    return Y


@dataclass(frozen=True)
class ApproxResult:
    coefficients: np.ndarray
    minimizer: np.ndarray
    distance: float
    uniqueness_diameter: float
    witness_coeffs: tuple[np.ndarray, ...]

    def witnesses(self, basis: np.ndarray) -> list[np.ndarray]:
        return [basis @ c for c in self.witness_coeffs]


def best_approximation(
    f,
    Y,
    spec: NormSpec,
    tol: float = 1e-8,
    directions: int | None = None,
    seed: int = 0,
) -> ApproxResult:
    """Nearest point to f in the column span of Y, with a uniqueness probe.

    The reported diameter is the largest spec-norm distance between ambient
    minimizers recovered by perturbed re-solves; for strictly convex norms it
    collapses to solver precision.
    """
    f = as_vector(f)
    Y = _validated_basis(Y)
    if Y.shape[0] != f.size:
        raise ValueError("f must live in the ambient space of the basis")
    k = Y.shape[1]
    report = solve_min_norm(spec, -Y, f, tol=tol)
    if not report.converged:
        raise SolverConvergenceError(
            f"best approximation not certified: gap {report.certified_gap:.3e}"
        )
    c_star = report.argpoint
    distance = report.value

    if directions is None:
        directions = 2 * k + 4
    dirs: list[np.ndarray] = []
    for i in range(k):
        e = np.zeros(k)
        e[i] = 1.0
        dirs.append(e.copy())
        dirs.append(-e)
    rng = np.random.default_rng([seed, 5])
    while len(dirs) < directions:
        d = rng.standard_normal(k)
        d /= np.linalg.norm(d)
        dirs.append(d)

    window = max(tol, 1e-9) * (1.0 + abs(distance))
    points = face_probe(spec, -Y, f, None, None, dirs, distance, c_star, window)
    diameter = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            delta = Y @ (points[i] - points[j])
            if np.any(delta):
                diameter = max(diameter, norm_eval(delta, spec))
    return ApproxResult(
        coefficients=c_star,
        minimizer=Y @ c_star,
        distance=distance,
        uniqueness_diameter=diameter,
        witness_coeffs=tuple(points),
    )


@dataclass(frozen=True)
class UniquenessCheck:
    status: str  # "unique" or "non_unique"
    result: ApproxResult
    witness_pair: tuple[np.ndarray, np.ndarray] | None
    inconsistent: bool
    reason: str


def verify_minimizer_pair(f, Y, spec: NormSpec, c1, c2, distance: float, tol: float) -> tuple[bool, str]:
    """Sanity-check a claimed pair of distinct minimizers.

    Returns (inconsistent, reason).  The midpoint of two minimizers can never
    beat them (convexity), and a strictly convex kind cannot have two
    separated minimizers at all.
    """
    f = as_vector(f)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    c1 = as_vector(c1)
    c2 = as_vector(c2)
    mid = 0.5 * (c1 + c2)
    d_mid = norm_eval(f - Y @ mid, spec)
    if d_mid < distance - tol:
        return True, "midpoint strictly beats the claimed optimal distance"
    strictly_convex_kind = isinstance(spec, InnerProduct) or (
        isinstance(spec, Lp) and 1.0 < spec.p < np.inf
    )
    sep = norm_eval(Y @ (c1 - c2), spec)
    if strictly_convex_kind and sep > 1e3 * tol:
        d1 = norm_eval(f - Y @ c1, spec)
        d2 = norm_eval(f - Y @ c2, spec)
        if max(d1, d2) <= distance + tol:
            return True, "two separated minimizers under a strictly convex norm"
    return False, ""


def nearest_point_uniqueness_check(f, Y, spec: NormSpec, tol: float = 1e-8) -> UniquenessCheck:
    """Classify the nearest-point set as unique or a nontrivial face.

    Precondition: f must not already lie in the subspace.  Witnesses closer
    than 1e3*tol are not trusted as evidence of non-uniqueness.
    """
    f = as_vector(f)
    Y = _validated_basis(Y)
    coef, *_ = np.linalg.lstsq(Y, f, rcond=None)
    if float(np.linalg.norm(f - Y @ coef)) <= 1e-9 * (1.0 + float(np.linalg.norm(f))):
        raise ValueError("f already lies in the subspace")
    result = best_approximation(f, Y, spec, tol=tol)
    pair = None
    inconsistent = False
    reason = ""
    if result.uniqueness_diameter <= 10.0 * tol:
        status = "unique"
    else:
        best = (0.0, None, None)
        for i in range(len(result.witness_coeffs)):
            for j in range(i + 1, len(result.witness_coeffs)):
                ci, cj = result.witness_coeffs[i], result.witness_coeffs[j]
                sep = norm_eval(Y @ (ci - cj), spec)
                if sep > best[0]:
                    best = (sep, ci, cj)
        if best[0] >= 1e3 * tol:
            status = "non_unique"
            pair = (best[1], best[2])
            inconsistent, reason = verify_minimizer_pair(
                f, Y, spec, best[1], best[2], result.distance, tol
            )
        else:
            status = "unique"
    return UniquenessCheck(
        status=status, result=result, witness_pair=pair, inconsistent=inconsistent, reason=reason
    )
