"""Minimum-norm extensions of linear functionals from subspaces.

A functional is given by its values on a subspace basis.  Its norm on the
subspace is a linear maximization over the pulled-back unit ball (a primal
computation), while an extension with the same norm is found by minimizing
the dual norm over the affine set of agreeing functionals.  That the two
numbers coincide is a theorem, so the equality is a genuine cross-check
between independent computations, and the tests treat it that way.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .norm_core import InnerProduct, Lp, NormSpec, SumNorm, as_vector, norm_eval
from .solvers import (
    AffineSet,
    affine_min_norm,
    dual_norm,
    dual_spec_of,
    face_probe,
    linear_max_over_ball,
    max_linear_over_pullback_ball,
    _dual_ball_lmo,
)

__all__ = [
    "Subspace",
    "Extension",
    "ExtensionProbeReport",
    "functional_norm_on_subspace",
    "min_norm_extension",
    "extension_uniqueness_probe",
    "norming_functional",
]


@dataclass(frozen=True)
class Subspace:
    """Column-spanned subspace of R^n with a numerically full-rank basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if b.ndim != 2 or b.shape[1] < 1:
            raise ValueError("basis must be a 2-d array with at least one column")
        if b.shape[1] > b.shape[0]:
            raise ValueError("more basis vectors than ambient dimensions")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis entries must be finite")
        sv = np.linalg.svd(b, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise ValueError("basis is numerically rank deficient")
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])


@dataclass(frozen=True)
class Extension:
    """An ambient functional with its dual norm."""

    coeffs: np.ndarray
    dual_norm_value: float

    def to_json(self) -> str:
        return json.dumps(
            {"coeffs": [float(c) for c in self.coeffs], "dual_norm": float(self.dual_norm_value)}
        )


def _dual_of(spec: NormSpec) -> NormSpec:
    if isinstance(spec, SumNorm):
        raise NotImplementedError(
            "extensions over sum specs are not supported: the dual of a sum "
            "norm is an inf-convolution, not a norm spec"
        )
    return dual_spec_of(spec)


def functional_norm_on_subspace(sub: Subspace, values, spec: NormSpec) -> float:
    """Norm of the functional c -> <values, c> on the subspace.

    Computed on the primal side as sup{<values, c> : ‖basis @ c‖_spec <= 1},
    never through the dual formula, so it can serve as an independent
    cross-check for min_norm_extension.
    """
    values = as_vector(values)
    if values.size != sub.dim:
        raise ValueError("one value per basis vector is required")
    value, _ = max_linear_over_pullback_ball(values, sub.basis, spec)
    return value


def min_norm_extension(sub: Subspace, values, spec: NormSpec, tol: float = 1e-8) -> Extension:
    """An ambient functional agreeing with `values` on the subspace, of
    minimal dual norm."""
    values = as_vector(values)
    if values.size != sub.dim:
        raise ValueError("one value per basis vector is required")
    dual = _dual_of(spec)
    report = affine_min_norm(AffineSet(sub.basis.T, values), dual, tol=tol)
    return Extension(coeffs=report.argpoint, dual_norm_value=report.value)


@dataclass(frozen=True)
class ExtensionProbeReport:
    base: Extension
    diameter: float
    witnesses: tuple[np.ndarray, ...]
    unique: bool
    directions_used: int


def extension_uniqueness_probe(
    sub: Subspace,
    values,
    spec: NormSpec,
    directions: int | None = None,
    tol: float = 1e-8,
    seed: int = 0,
) -> ExtensionProbeReport:
    """Push the extension along many directions inside the optimal face and
    measure the dual-norm diameter of what comes back.

    Requires at least 2n directions (the signed coordinate directions); the
    rest are seeded random unit vectors.  Diameter <= 10*tol reads as unique.
    """
    values = as_vector(values)
    n = sub.ambient_dim
    if directions is None:
        directions = 2 * n + 4
    if directions < 2 * n:
        raise ValueError("at least 2n probe directions are required")
    dual = _dual_of(spec)
    base = min_norm_extension(sub, values, spec, tol=tol)

    dirs: list[np.ndarray] = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        dirs.append(e.copy())
        dirs.append(-e)
    rng = np.random.default_rng([seed, 3])
    while len(dirs) < directions:
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        dirs.append(d)

    window = max(tol, 1e-9) * (1.0 + abs(base.dual_norm_value))
    points = face_probe(
        dual,
        np.eye(n),
        np.zeros(n),
        sub.basis.T,
        values,
        dirs,
        base.dual_norm_value,
        base.coeffs,
        window,
    )
    diameter = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            delta = points[i] - points[j]
            if np.any(delta):
                diameter = max(diameter, norm_eval(delta, dual))
    return ExtensionProbeReport(
        base=base,
        diameter=diameter,
        witnesses=tuple(points),
        unique=diameter <= 10.0 * tol,
        directions_used=len(dirs),
    )


def norming_functional(x, spec: NormSpec) -> Extension:
    """A functional of dual norm one with <g, x> = ‖x‖."""
    x = as_vector(x)
    if not np.any(x):
        raise ValueError("the zero vector has no norming functional")
    g = _dual_ball_lmo(x, spec)
    return Extension(coeffs=g, dual_norm_value=dual_norm(g, spec))
