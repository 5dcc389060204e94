"""Norm specifications and unit-ball primitives.

A norm is described by a small spec object: ``Lp(p)`` for the p-norms
(``p = math.inf`` gives the sup norm), ``InnerProduct(gram)`` for norms
induced by a symmetric positive definite Gram matrix, and ``SumNorm(parts)``
for pointwise sums of other norms.  Evaluation works on dense vectors and,
for lp-built specs, on sparse sequence-space vectors with exact index
arithmetic.

The probes in this module stay on the primal side: triangle defects,
parallelogram defects, boundary classification, 2-d sphere sampling, and a
randomized convexity check of the unit ball.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "NormSpec",
    "Lp",
    "InnerProduct",
    "SumNorm",
    "SparseSeq",
    "as_vector",
    "spec_from_json",
    "spec_to_json",
    "norm_eval",
    "norm_eval_rows",
    "triangle_defect",
    "parallelogram_defect",
    "ball_membership",
    "sphere_sample_2d",
    "ball_convexity_probe",
    "BallProbeViolation",
    "BOUNDARY_TOL",
]

BOUNDARY_TOL = 1e-9


def as_vector(v) -> np.ndarray:
    """Validate and convert to a 1-d float array with finite entries."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("vector must be one-dimensional with at least one entry")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


# ---------------------------------------------------------------------------
# sparse sequence-space vectors


@dataclass(frozen=True)
class SparseSeq:
    """Finitely supported sequence: strictly increasing indices >= 1, nonzero values.

    Index arithmetic is exact (integer supports, merged by position), so
    combinations like x + y or x - y never smear support through rounding.
    """

    support: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.values):
            raise ValueError("support and values must have equal length")
        prev = 0
        for idx in self.support:
            if not isinstance(idx, (int, np.integer)) or idx < 1:
                raise ValueError("support indices must be integers >= 1")
            if idx <= prev:
                raise ValueError("support indices must be strictly increasing")
            prev = idx
        for val in self.values:
            if not math.isfinite(val):
                raise ValueError("values must be finite")
            if val == 0.0:
                raise ValueError("stored values must be nonzero")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[int, float]]) -> "SparseSeq":
        items = sorted((int(i), float(v)) for i, v in pairs)
        items = [(i, v) for i, v in items if v != 0.0]
        return SparseSeq(tuple(i for i, _ in items), tuple(v for _, v in items))

    @staticmethod
    def basis(n: int) -> "SparseSeq":
        """The n-th coordinate sequence e_n."""
        return SparseSeq((int(n),), (1.0,))

    @staticmethod
    def ones_block(start: int, stop: int) -> "SparseSeq":
        """Ones on indices start..stop inclusive."""
        if stop < start:
            raise ValueError("empty block")
        idx = tuple(range(int(start), int(stop) + 1))
        return SparseSeq(idx, (1.0,) * len(idx))

    def _merge(self, other: "SparseSeq", sign: float) -> "SparseSeq":
        s1 = np.asarray(self.support, dtype=np.int64)
        s2 = np.asarray(other.support, dtype=np.int64)
        union = np.union1d(s1, s2)
        vals = np.zeros(union.size)
        vals[np.searchsorted(union, s1)] += np.asarray(self.values)
        vals[np.searchsorted(union, s2)] += sign * np.asarray(other.values)
        keep = vals != 0.0
        return SparseSeq(tuple(int(i) for i in union[keep]), tuple(float(v) for v in vals[keep]))

    def __add__(self, other: "SparseSeq") -> "SparseSeq":
        return self._merge(other, 1.0)

    def __sub__(self, other: "SparseSeq") -> "SparseSeq":
        return self._merge(other, -1.0)

    def scale(self, factor: float) -> "SparseSeq":
        if factor == 0.0:
            return SparseSeq((), ())
        return SparseSeq(self.support, tuple(factor * v for v in self.values))

    def pair(self, other: "SparseSeq") -> float:
        """Duality pairing: sum of products over the common support, in index order."""
        s1 = np.asarray(self.support, dtype=np.int64)
        s2 = np.asarray(other.support, dtype=np.int64)
        common, i1, i2 = np.intersect1d(s1, s2, return_indices=True)
        if common.size == 0:
            return 0.0
        v1 = np.asarray(self.values)[i1]
        v2 = np.asarray(other.values)[i2]
        total = 0.0
        for a, b in zip(v1, v2):
            total += a * b
        return float(total)

    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def max_index(self) -> int:
        return self.support[-1] if self.support else 0

    def to_dense(self, dim: int) -> np.ndarray:
        if dim < self.max_index():
            raise ValueError("dim smaller than the largest support index")
        out = np.zeros(int(dim))
        if self.support:
            out[np.asarray(self.support, dtype=np.int64) - 1] = self.values
        return out


# ---------------------------------------------------------------------------
# norm specs


class NormSpec:
    """Base class for norm descriptions."""

    def dim_hint(self) -> int | None:
        """Ambient dimension forced by the spec, if any."""
        return None


@dataclass(frozen=True)
class Lp(NormSpec):
    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError("lp exponent must lie in [1, inf]")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class InnerProduct(NormSpec):
    gram: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise ValueError("gram must be a square matrix")
        if not np.all(np.isfinite(g)):
            raise ValueError("gram entries must be finite")
        scale = max(1.0, float(np.abs(g).max()))
        if float(np.abs(g - g.T).max()) > 1e-12 * scale:
            raise ValueError("gram must be symmetric within 1e-12")
        g = 0.5 * (g + g.T)
        eigs = np.linalg.eigvalsh(g)
        if eigs[0] <= 0.0:
            raise ValueError("gram must be positive definite")
        object.__setattr__(self, "gram", g)

    def dim_hint(self) -> int | None:
        return int(self.gram.shape[0])


@dataclass(frozen=True)
class SumNorm(NormSpec):
    parts: tuple[NormSpec, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("sum norm needs at least one part")
        for part in parts:
            if not isinstance(part, NormSpec):
                raise ValueError("sum parts must be norm specs")
        hints = {h for h in (p.dim_hint() for p in parts) if h is not None}
        if len(hints) > 1:
            raise ValueError("sum parts disagree on ambient dimension")
        object.__setattr__(self, "parts", parts)

    def dim_hint(self) -> int | None:
        for part in self.parts:
            h = part.dim_hint()
            if h is not None:
                return h
        return None


def _is_lp_only(spec: NormSpec) -> bool:
    if isinstance(spec, Lp):
        return True
    if isinstance(spec, SumNorm):
        return all(_is_lp_only(p) for p in spec.parts)
    return False


def spec_to_json(spec: NormSpec) -> str:
    def encode(s: NormSpec):
        if isinstance(s, Lp):
            return {"kind": "lp", "p": "inf" if math.isinf(s.p) else s.p}
        if isinstance(s, InnerProduct):
            return {"kind": "inner", "gram": s.gram.tolist()}
        if isinstance(s, SumNorm):
            return {"kind": "sum", "parts": [encode(p) for p in s.parts]}
        raise TypeError(f"unknown spec type {type(s)!r}")

    return json.dumps(encode(spec))


def spec_from_json(text: str | dict) -> NormSpec:
    """Parse a spec from JSON text or an already-decoded mapping."""
    obj = json.loads(text) if isinstance(text, str) else text

    def decode(node) -> NormSpec:
        if not isinstance(node, dict) or "kind" not in node:
            raise ValueError("spec node must be an object with a 'kind' field")
        kind = node["kind"]
        if kind == "lp":
            p = node.get("p")
            if p == "inf":
                return Lp(math.inf)
            if not isinstance(p, (int, float)):
                raise ValueError("lp spec needs a numeric p or 'inf'")
            return Lp(float(p))
        if kind == "inner":
            return InnerProduct(np.asarray(node.get("gram"), dtype=float))
        if kind == "sum":
            parts = node.get("parts")
            if not isinstance(parts, list) or not parts:
                raise ValueError("sum spec needs a nonempty parts list")
            return SumNorm(tuple(decode(p) for p in parts))
        raise ValueError(f"unknown spec kind {kind!r}")

    return decode(obj)


# ---------------------------------------------------------------------------
# evaluation


def _lp_rows(rows: np.ndarray, p: float) -> np.ndarray:
    x = np.abs(rows)
    if x.shape[1] == 0:
        return np.zeros(x.shape[0])
    if math.isinf(p):
        return x.max(axis=1)
    if p == 1.0:
        # first powers cannot overflow; plain summation keeps integer sums exact
        return x.sum(axis=1)
    m = x.max(axis=1)
    out = np.zeros_like(m)
    nz = m > 0.0
    if np.any(nz):
        scaled = x[nz] / m[nz, None]
        if p == 2.0:
            out[nz] = m[nz] * np.sqrt(np.sum(scaled * scaled, axis=1))
        else:
            out[nz] = m[nz] * np.sum(scaled**p, axis=1) ** (1.0 / p)
    return out


def norm_eval_rows(rows: np.ndarray, spec: NormSpec) -> np.ndarray:
    """Row-wise norms of a 2-d array; the batched workhorse behind norm_eval."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2:
        raise ValueError("expected a 2-d array of row vectors")
    if isinstance(spec, Lp):
        return _lp_rows(rows, spec.p)
    if isinstance(spec, InnerProduct):
        if rows.shape[1] != spec.gram.shape[0]:
            raise ValueError("vector dimension does not match the gram matrix")
        quad = np.einsum("ij,jk,ik->i", rows, spec.gram, rows)
        return np.sqrt(np.maximum(quad, 0.0))
    if isinstance(spec, SumNorm):
        total = np.zeros(rows.shape[0])
        for part in spec.parts:
            total += norm_eval_rows(rows, part)
        return total
    raise TypeError(f"unknown spec type {type(spec)!r}")


def norm_eval(v, spec: NormSpec) -> float:
    """Norm of a dense vector or (for lp-built specs) a SparseSeq."""
    if isinstance(v, SparseSeq):
        if not _is_lp_only(spec):
            raise ValueError("sparse sequence vectors only support lp and sum-of-lp specs")
        vals = v.values_array()
        return float(norm_eval_rows(vals[None, :], spec)[0])
    return float(norm_eval_rows(as_vector(v)[None, :], spec)[0])


def triangle_defect(x, y, spec: NormSpec) -> float:
    """‖x‖ + ‖y‖ − ‖x+y‖; nonnegative up to roundoff for every norm."""
    if isinstance(x, SparseSeq) or isinstance(y, SparseSeq):
        if not (isinstance(x, SparseSeq) and isinstance(y, SparseSeq)):
            raise ValueError("mixed sparse/dense arguments")
        return norm_eval(x, spec) + norm_eval(y, spec) - norm_eval(x + y, spec)
    xv, yv = as_vector(x), as_vector(y)
    if xv.shape != yv.shape:
        raise ValueError("dimension mismatch")
    return norm_eval(xv, spec) + norm_eval(yv, spec) - norm_eval(xv + yv, spec)


def parallelogram_defect(x, y, spec: NormSpec) -> float:
    """|‖x+y‖² + ‖x−y‖² − 2‖x‖² − 2‖y‖²|; zero exactly for inner-product norms."""
    if isinstance(x, SparseSeq) and isinstance(y, SparseSeq):
        s, d = x + y, x - y
        nx, ny = norm_eval(x, spec), norm_eval(y, spec)
        ns, nd = norm_eval(s, spec), norm_eval(d, spec)
    else:
        xv, yv = as_vector(x), as_vector(y)
        if xv.shape != yv.shape:
            raise ValueError("dimension mismatch")
        nx, ny = norm_eval(xv, spec), norm_eval(yv, spec)
        ns, nd = norm_eval(xv + yv, spec), norm_eval(xv - yv, spec)
    return abs(ns * ns + nd * nd - 2.0 * nx * nx - 2.0 * ny * ny)


def ball_membership(v, spec: NormSpec, tol: float = BOUNDARY_TOL) -> str:
    """Classify against the unit ball: 'inside', 'boundary', or 'outside'.

    Boundary means |‖v‖ − 1| <= tol; inside means ‖v‖ < 1 − tol.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    n = norm_eval(v, spec)
    if abs(n - 1.0) <= tol:
        return "boundary"
    return "inside" if n < 1.0 - tol else "outside"


def sphere_sample_2d(spec: NormSpec, k: int) -> np.ndarray:
    """k points on the unit sphere of a 2-d norm, ordered by angle over [0, 2π).

    Directions on the angular grid 2πj/k are scaled radially onto the sphere.
    """
    if k < 8:
        raise ValueError("k must be at least 8")
    hint = spec.dim_hint()
    if hint is not None and hint != 2:
        raise ValueError("spec is not two-dimensional")
    angles = 2.0 * np.pi * np.arange(k) / k
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    norms = norm_eval_rows(dirs, spec)
    return dirs / norms[:, None]


@dataclass(frozen=True)
class BallProbeViolation:
    x: np.ndarray
    y: np.ndarray
    t: float
    combo_gauge: float
    trial: int


def ball_convexity_probe(
    spec: NormSpec,
    trials: int,
    seed: int = 0,
    dim: int | None = None,
    gauge: Callable[[np.ndarray], np.ndarray] | None = None,
) -> BallProbeViolation | None:
    """Search for a convexity violation of the unit ball.

    Samples x, y in the ball and t in (0, 1) and reports the first sample with
    gauge(t·x + (1−t)·y) > 1 + 1e-9, or None.  `gauge` overrides the spec's
    norm with an arbitrary row-wise positively homogeneous-of-some-degree
    function; that hook exists so non-convex gauges can be shown to fail.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if dim is None:
        dim = spec.dim_hint()
    if dim is None:
        raise ValueError("dim is required for dimension-free specs")
    g = gauge if gauge is not None else (lambda rows: norm_eval_rows(rows, spec))
    rng = np.random.default_rng(seed)
    done = 0
    while done < trials:
        chunk = min(trials - done, 1 << 14)
        dx = rng.standard_normal((chunk, dim))
        dy = rng.standard_normal((chunk, dim))
        gx = np.asarray(g(dx), dtype=float)
        gy = np.asarray(g(dy), dtype=float)
        ok = (gx > 0.0) & (gy > 0.0)
        # radial law r = u^(1/dim) makes the ball samples volume-uniform
        rx = rng.random(chunk) ** (1.0 / dim)
        ry = rng.random(chunk) ** (1.0 / dim)
        t = rng.random(chunk)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = dx * (rx / np.where(ok, gx, 1.0))[:, None]
            y = dy * (ry / np.where(ok, gy, 1.0))[:, None]
        combo = t[:, None] * x + (1.0 - t)[:, None] * y
        gc = np.asarray(g(combo), dtype=float)
        bad = ok & (gc > 1.0 + 1e-9)
        if np.any(bad):
            i = int(np.argmax(bad))
            return BallProbeViolation(
                x=x[i].copy(), y=y[i].copy(), t=float(t[i]), combo_gauge=float(gc[i]), trial=done + i
            )
        done += chunk
    return None
