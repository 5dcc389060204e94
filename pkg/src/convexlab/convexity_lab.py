"""Convexity diagnostics for unit balls: midpoint suprema, modulus curves,
strict and uniform convexity verdicts, and the l1+l2 block-pair family.

The central search asks how close to the sphere the midpoint of two unit-ball
points can sit while the points stay at least eps apart.  Candidate pairs are
parametrized by a midpoint direction and an offset direction; along a fixed
direction pair the feasibility predicate is monotone in the midpoint radius,
so the supremum over that slice is a bisection, vectorized across candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .norm_core import (
    InnerProduct,
    Lp,
    NormSpec,
    SparseSeq,
    SumNorm,
    as_vector,
    norm_eval,
    norm_eval_rows,
)

__all__ = [
    "MidpointSupResult",
    "ModulusCurve",
    "StrictVerdict",
    "ConvexityVerdict",
    "LadderRung",
    "L1L2PairResult",
    "midpoint_sup",
    "modulus_curve",
    "strict_convexity_probe",
    "euclidean_modulus_closed_form",
    "angle_law_of_cosines",
    "l1l2_pair",
    "uniform_convexity_verdict",
]

_FEAS_SLACK = 1e-13
_BISECT_STEPS = 60


def _check_eps(eps: float):
    if not (0.0 < eps <= 2.0):
        raise ValueError("eps must lie in (0, 2]")


def _resolve_dim(spec: NormSpec, dim: int | None) -> int:
    hint = spec.dim_hint()
    if hint is not None:
        if dim is not None and dim != hint:
            raise ValueError("dim disagrees with the spec's gram matrix")
        return hint
    if dim is None:
        raise ValueError("dim is required for dimension-free specs")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return int(dim)


@dataclass(frozen=True)
class MidpointSupResult:
    value: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    evaluations: int


@dataclass(frozen=True)
class ModulusCurve:
    """Midpoint supremum per eps, non-increasing, with feasible witness pairs."""

    eps: tuple[float, ...]
    sup_midpoint: tuple[float, ...]
    witnesses: tuple[tuple[np.ndarray, np.ndarray], ...]
    spec: NormSpec

    def __post_init__(self):
        for a, b in zip(self.sup_midpoint, self.sup_midpoint[1:]):
            if b > a + 1e-12:
                raise ValueError("curve must be non-increasing")
        for e, (x, y) in zip(self.eps, self.witnesses):
            for v in (x, y):
                if norm_eval(v, self.spec) > 1.0 + 1e-9:
                    raise ValueError("witness escapes the unit ball")
            if norm_eval(x - y, self.spec) < e:
                raise ValueError("witness separation below eps")

    def rows(self):
        return list(zip(self.eps, self.sup_midpoint, self.witnesses))


def _dedupe_pairs(mhat: np.ndarray, what: np.ndarray):
    keep = []
    seen = set()
    for i in range(mhat.shape[0]):
        key = (tuple(np.round(mhat[i], 12)), tuple(np.round(what[i], 12)))
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return mhat[keep], what[keep]


def _candidate_directions(dim: int, extra_pairs, rng, count_random: int, spec=None):
    """Deterministic direction pairs first, then random fills."""
    ms, ws = [], []

    def add(m, w):
        ms.append(np.asarray(m, dtype=float))
        ws.append(np.asarray(w, dtype=float))

    if isinstance(spec, InnerProduct):
        # columns of inv(L') are orthonormal for gram = L L', the exact
        # extremal configurations of any inner-product norm
        L = np.linalg.cholesky(spec.gram)
        W = np.linalg.inv(L.T)
        for i in range(min(dim, 12)):
            for j in range(i + 1, min(dim, 12)):
                add(W[:, i], W[:, j])
                add(W[:, i] + W[:, j], W[:, i] - W[:, j])
    axes = min(dim, 8)
    for i in range(axes):
        for j in range(i + 1, axes):
            ei = np.zeros(dim)
            ej = np.zeros(dim)
            ei[i] = 1.0
            ej[j] = 1.0
            add(ei, ej)
            add(ei + ej, ei - ej)
            add(ei - ej, ei + ej)
    # disjoint ones blocks, the separating family for l1-flavored norms
    m = 1
    while 2 * m <= dim:
        x = np.zeros(dim)
        y = np.zeros(dim)
        x[:m] = 1.0
        y[m : 2 * m] = 1.0
        add(x + y, x - y)
        m *= 2
    if dim >= 4 and 2 * (dim // 2) <= dim:
        half = dim // 2
        x = np.zeros(dim)
        y = np.zeros(dim)
        x[:half] = 1.0
        y[half : 2 * half] = 1.0
        add(x + y, x - y)
    # overlapping blocks catch flat faces of sup-type norms
    for length, off in ((2, 1), (3, 1), (3, 2), (4, 2)):
        if off + length <= dim:
            x = np.zeros(dim)
            y = np.zeros(dim)
            x[:length] = 1.0
            y[off : off + length] = 1.0
            add(x + y, x - y)
    if extra_pairs:
        for x, y in extra_pairs:
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            if np.any(x + y) and np.any(x - y):
                add(x + y, x - y)
    if count_random > 0:
        ms.append(rng.standard_normal((count_random, dim)))
        ws.append(rng.standard_normal((count_random, dim)))
    mhat = np.vstack([np.atleast_2d(a) for a in ms])
    what = np.vstack([np.atleast_2d(a) for a in ws])
    return mhat, what


def _normalize_rows(rows: np.ndarray, spec: NormSpec):
    norms = norm_eval_rows(rows, spec)
    ok = norms > 0.0
    out = rows[ok] / norms[ok, None]
    return out, ok


def _batch_t_plus(spec: NormSpec, mhat: np.ndarray, what: np.ndarray, eps: float):
    """Largest t in [0,1] with max(‖t·m̂+w‖, ‖t·m̂−w‖) <= 1 + slack, w=(eps/2)·ŵ.

    The predicate is monotone because the row maximum is even and convex in t.
    """
    w = 0.5 * eps * what

    def phi(t):
        plus = norm_eval_rows(t[:, None] * mhat + w, spec)
        minus = norm_eval_rows(t[:, None] * mhat - w, spec)
        return np.maximum(plus, minus)

    B = mhat.shape[0]
    ones = np.ones(B)
    thresh = 1.0 + _FEAS_SLACK
    feas1 = phi(ones) <= thresh
    infeas0 = phi(np.zeros(B)) > thresh
    lo = np.zeros(B)
    hi = np.ones(B)
    active = ~(feas1 | infeas0)
    if np.any(active):
        alo = lo[active]
        ahi = hi[active]
        am = mhat[active]
        aw = w[active]
        for _ in range(_BISECT_STEPS):
            mid = 0.5 * (alo + ahi)
            val = np.maximum(
                norm_eval_rows(mid[:, None] * am + aw, spec),
                norm_eval_rows(mid[:, None] * am - aw, spec),
            )
            good = val <= thresh
            alo = np.where(good, mid, alo)
            ahi = np.where(good, ahi, mid)
        lo[active] = alo
    t = np.where(feas1, 1.0, np.where(infeas0, 0.0, lo))
    return t, w


def _witness_from(spec, mhat_row, w_row, t, eps):
    x = t * mhat_row + w_row
    y = t * mhat_row - w_row
    sep = norm_eval(x - y, spec)
    bump = 0
    while sep < eps and bump < 8:
        w_row = w_row * (1.0 + 4.0 * np.finfo(float).eps)
        x = t * mhat_row + w_row
        y = t * mhat_row - w_row
        sep = norm_eval(x - y, spec)
        bump += 1
    return x, y


def midpoint_sup(
    spec: NormSpec,
    eps: float,
    budget: int = 2000,
    seed: int = 0,
    dim: int | None = None,
    extra_pairs=None,
) -> MidpointSupResult:
    """sup ‖(x+y)/2‖ over unit-ball pairs with ‖x−y‖ >= eps, with witnesses.

    `budget` counts candidate direction pairs (each pair costs one monotone
    bisection); at least 1000 is required.  Deterministic candidates (axis
    pairs, sign patterns, ones blocks) run before seeded random ones, so the
    pinned configurations never depend on the RNG.
    """
    _check_eps(eps)
    if budget < 1000:
        raise ValueError("budget must be at least 1000")
    dim = _resolve_dim(spec, dim)
    rng = np.random.default_rng([seed, 1])
    reserve = min(300, budget // 4)
    mhat, what = _candidate_directions(dim, extra_pairs, rng, 0, spec=spec)
    ndet = mhat.shape[0]
    n_random = max(0, budget - ndet - reserve)
    if n_random:
        mhat = np.vstack([mhat, rng.standard_normal((n_random, dim))])
        what = np.vstack([what, rng.standard_normal((n_random, dim))])
    mhat = mhat[:budget]
    what = what[:budget]

    mn = norm_eval_rows(mhat, spec)
    wn = norm_eval_rows(what, spec)
    ok = (mn > 0.0) & (wn > 0.0)
    mhat = mhat[ok] / mn[ok, None]
    what = what[ok] / wn[ok, None]
    mhat, what = _dedupe_pairs(mhat, what)

    t, w = _batch_t_plus(spec, mhat, what, eps)
    values = t * norm_eval_rows(mhat, spec)
    evaluations = mhat.shape[0]
    best = int(np.argmax(values))
    best_m, best_w, best_t = mhat[best].copy(), what[best].copy(), float(t[best])
    best_val = float(values[best])

    # pattern-search refinement around the incumbent
    sigma = 0.25
    left = budget - evaluations
    while left >= 40 and sigma > 1e-7:
        P = min(40, left)
        pm = best_m[None, :] + sigma * rng.standard_normal((P, dim))
        pw = best_w[None, :] + sigma * rng.standard_normal((P, dim))
        pmn = norm_eval_rows(pm, spec)
        pwn = norm_eval_rows(pw, spec)
        okp = (pmn > 0.0) & (pwn > 0.0)
        if not np.any(okp):
            sigma *= 0.5
            continue
        pm = pm[okp] / pmn[okp, None]
        pw = pw[okp] / pwn[okp, None]
        tt, _ = _batch_t_plus(spec, pm, pw, eps)
        vv = tt * norm_eval_rows(pm, spec)
        evaluations += pm.shape[0]
        left -= pm.shape[0]
        j = int(np.argmax(vv))
        if float(vv[j]) > best_val + 1e-15:
            best_val = float(vv[j])
            best_m, best_w, best_t = pm[j].copy(), pw[j].copy(), float(tt[j])
            sigma *= 1.3
        else:
            sigma *= 0.5

    x, y = _witness_from(spec, best_m, 0.5 * eps * best_w, best_t, eps)
    return MidpointSupResult(best_val, x, y, evaluations)


def modulus_curve(
    spec: NormSpec,
    eps_grid,
    budget: int = 2000,
    seed: int = 0,
    dim: int | None = None,
    extra_pairs=None,
) -> ModulusCurve:
    """Midpoint suprema on an ascending eps grid, made monotone by a
    maximum-from-the-right pass (a witness for a larger eps is a witness for
    every smaller one)."""
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise ValueError("eps grid must be nonempty")
    for e in grid:
        _check_eps(e)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("eps grid must be strictly ascending")
    sups: list[float] = []
    wits: list[tuple[np.ndarray, np.ndarray]] = []
    for i, e in enumerate(grid):
        res = midpoint_sup(spec, e, budget=budget, seed=seed + i, dim=dim, extra_pairs=extra_pairs)
        sups.append(res.value)
        wits.append((res.witness_x, res.witness_y))
    for i in range(len(grid) - 2, -1, -1):
        if sups[i + 1] > sups[i]:
            sups[i] = sups[i + 1]
            wits[i] = wits[i + 1]
    return ModulusCurve(tuple(grid), tuple(sups), tuple(wits), spec)


@dataclass(frozen=True)
class StrictVerdict:
    violated: bool
    witness_x: np.ndarray | None
    witness_y: np.ndarray | None
    trials_used: int
    spec: NormSpec

    def __post_init__(self):
        if self.violated:
            x, y = self.witness_x, self.witness_y
            if x is None or y is None:
                raise ValueError("violation requires witnesses")
            for v in (x, y, 0.5 * (x + y)):
                if abs(norm_eval(v, self.spec) - 1.0) > 1e-8:
                    raise ValueError("witness norms must be 1 within 1e-8")
            if norm_eval(x - y, self.spec) <= 1e-6:
                raise ValueError("witnesses must be separated by more than 1e-6")


def strict_convexity_probe(
    spec: NormSpec, trials: int = 20000, seed: int = 0, dim: int | None = None
) -> StrictVerdict:
    """Look for distinct unit vectors whose midpoint still has norm one.

    Deterministic flat-face candidates (overlapping ones blocks, axis pairs,
    sign patterns) are tried first, then a seeded random sweep, then witnesses
    harvested from the midpoint supremum search.  A pass is evidence, not proof.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    dim = _resolve_dim(spec, dim)
    used = 0

    def check_pair(x, y):
        nx, ny = norm_eval(x, spec), norm_eval(y, spec)
        if nx == 0.0 or ny == 0.0:
            return None
        x = x / nx
        y = y / ny
        mid = 0.5 * (x + y)
        if abs(norm_eval(mid, spec) - 1.0) <= 1e-8 and norm_eval(x - y, spec) > 1e-6:
            return x, y
        return None

    cands: list[tuple[np.ndarray, np.ndarray]] = []
    for length, off in ((2, 1), (3, 1), (3, 2), (4, 2), (2, 0), (3, 0)):
        stop = off + length
        if stop <= dim and off > 0 or (off == 0 and length <= dim):
            x = np.zeros(dim)
            y = np.zeros(dim)
            x[:length] = 1.0
            y[off:stop if stop <= dim else dim] = 1.0
            if np.any(x - y):
                cands.append((x, y))
    axes = min(dim, 8)
    for i in range(axes):
        for j in range(i + 1, axes):
            ei = np.zeros(dim)
            ej = np.zeros(dim)
            ei[i] = 1.0
            ej[j] = 1.0
            cands.append((ei, ej))
            cands.append((ei, -ej))
            cands.append((ei + ej, ei))

    for x, y in cands:
        used += 1
        hit = check_pair(x, y)
        if hit is not None:
            return StrictVerdict(True, hit[0], hit[1], used, spec)
        if used >= trials:
            return StrictVerdict(False, None, None, used, spec)

    rng = np.random.default_rng([seed, 2])
    remaining = max(0, trials - used - 2 * 1000)
    while remaining > 0:
        chunk = min(remaining, 1 << 13)
        xs = rng.standard_normal((chunk, dim))
        ys = rng.standard_normal((chunk, dim))
        nx = norm_eval_rows(xs, spec)
        ny = norm_eval_rows(ys, spec)
        ok = (nx > 0.0) & (ny > 0.0)
        xs = xs[ok] / nx[ok, None]
        ys = ys[ok] / ny[ok, None]
        mid = norm_eval_rows(0.5 * (xs + ys), spec)
        sep = norm_eval_rows(xs - ys, spec)
        hits = (np.abs(mid - 1.0) <= 1e-8) & (sep > 1e-6)
        used += chunk
        remaining -= chunk
        if np.any(hits):
            i = int(np.argmax(hits))
            return StrictVerdict(True, xs[i].copy(), ys[i].copy(), used, spec)

    # harvest from the midpoint supremum search at two separations
    for e in (1.0, 0.5):
        if used + 1000 > trials + 2000:
            break
        res = midpoint_sup(spec, e, budget=1000, seed=seed + 7, dim=dim)
        used += res.evaluations
        if res.value >= 1.0 - 1e-9:
            hit = check_pair(res.witness_x, res.witness_y)
            if hit is not None:
                return StrictVerdict(True, hit[0], hit[1], used, spec)
    return StrictVerdict(False, None, None, used, spec)


def euclidean_modulus_closed_form(eps: float) -> float:
    """Midpoint supremum of the euclidean ball: sqrt(1 - eps^2/4)."""
    _check_eps(eps)
    return math.sqrt(1.0 - 0.25 * eps * eps)


def angle_law_of_cosines(x, y, gram) -> float:
    """Angle between x and y in the inner product given by gram.

    Requires a nondegenerate pair (pairwise Gram determinant above 1e-12) and
    cross-checks the inner-product formula against the law of cosines.
    """
    spec = InnerProduct(np.asarray(gram, dtype=float))
    x = as_vector(x)
    y = as_vector(y)
    nx = norm_eval(x, spec)
    ny = norm_eval(y, spec)
    inner = float(x @ (spec.gram @ y))
    det = nx * nx * ny * ny - inner * inner
    if det <= 1e-12:
        raise ValueError("pair is numerically dependent (gram determinant too small)")
    cos_inner = inner / (nx * ny)
    nd = norm_eval(x - y, spec)
    cos_law = (nx * nx + ny * ny - nd * nd) / (2.0 * nx * ny)
    if abs(cos_inner - cos_law) > 1e-10:
        raise ValueError("inner-product and law-of-cosines routes disagree")
    return math.acos(min(1.0, max(-1.0, cos_inner)))


@dataclass(frozen=True)
class L1L2PairResult:
    """Disjoint ones blocks of length N under the l1+l2 norm."""

    N: int
    x: SparseSeq
    y: SparseSeq
    norm_x: float
    norm_y: float
    norm_sum: float
    norm_diff: float
    norm_midpoint: float

    @property
    def midpoint_ratio(self) -> float:
        return self.norm_midpoint / self.norm_x

    @property
    def separation_ratio(self) -> float:
        return self.norm_diff / self.norm_x


def l1l2_pair(N: int) -> L1L2PairResult:
    if N < 1:
        raise ValueError("N must be a positive integer")
    spec = SumNorm((Lp(1.0), Lp(2.0)))
    x = SparseSeq.ones_block(1, N)
    y = SparseSeq.ones_block(N + 1, 2 * N)
    s = x + y
    return L1L2PairResult(
        N=N,
        x=x,
        y=y,
        norm_x=norm_eval(x, spec),
        norm_y=norm_eval(y, spec),
        norm_sum=norm_eval(s, spec),
        norm_diff=norm_eval(x - y, spec),
        norm_midpoint=norm_eval(s.scale(0.5), spec),
    )


@dataclass(frozen=True)
class LadderRung:
    block: int
    midpoint_ratio: float
    separation_ratio: float


@dataclass(frozen=True)
class ConvexityVerdict:
    strict: StrictVerdict
    uniform_status: str  # "violated" or "no violation found"
    violated_eps: tuple[float, ...]
    curve: ModulusCurve
    ladder: tuple[LadderRung, ...]
    ladder_flag: bool
    note: str


def _block_ladder(spec: NormSpec, dim: int) -> tuple[LadderRung, ...]:
    rungs = []
    sizes = []
    m = 1
    while 2 * m <= dim:
        sizes.append(m)
        m *= 2
    if dim // 2 not in sizes and dim >= 4:
        sizes.append(dim // 2)
    for m in sizes:
        x = np.zeros(dim)
        y = np.zeros(dim)
        x[:m] = 1.0
        y[m : 2 * m] = 1.0
        nx = norm_eval(x, spec)
        if nx == 0.0:
            continue
        rungs.append(
            LadderRung(
                block=m,
                midpoint_ratio=norm_eval(0.5 * (x + y), spec) / nx,
                separation_ratio=norm_eval(x - y, spec) / nx,
            )
        )
    return tuple(rungs)


def _ladder_flags_violation(rungs: tuple[LadderRung, ...]) -> bool:
    """Geometrically decaying midpoint deficits at separation >= sqrt(2)
    witness a violation in the sequence-space limit."""
    usable = [r for r in rungs if r.separation_ratio >= math.sqrt(2.0) * (1.0 - 1e-9)]
    if len(usable) < 4:
        return False
    deficits = [1.0 - r.midpoint_ratio for r in usable]
    if usable[-1].midpoint_ratio < 0.9:
        return False
    consecutive = 0
    for a, b in zip(deficits, deficits[1:]):
        if a <= 0.0:
            return False
        if b <= 0.8 * a:
            consecutive += 1
            if consecutive >= 3:
                return True
        else:
            consecutive = 0
    return False


def uniform_convexity_verdict(
    spec: NormSpec,
    eps_grid,
    budget: int = 2000,
    seed: int = 0,
    dim: int | None = None,
) -> ConvexityVerdict:
    """Combine the strict probe, the modulus curve, and the block ladder.

    Violated if the curve reaches 1 - 1e-6 at some eps, if the strict probe
    found a flat face, or if the block ladder shows midpoint ratios tending to
    one at separation ratios >= sqrt(2).  A pass is labeled as empirical
    evidence, not proof.
    """
    dim = _resolve_dim(spec, dim)
    strict = strict_convexity_probe(spec, trials=max(budget, 4000), seed=seed, dim=dim)
    extra = None
    if strict.violated:
        extra = [(strict.witness_x, strict.witness_y)]
    curve = modulus_curve(spec, eps_grid, budget=budget, seed=seed, dim=dim, extra_pairs=extra)
    violated_eps = tuple(
        e for e, s in zip(curve.eps, curve.sup_midpoint) if s >= 1.0 - 1e-6
    )
    ladder = _block_ladder(spec, dim)
    ladder_flag = _ladder_flags_violation(ladder)
    if violated_eps or ladder_flag or strict.violated:
        status = "violated"
        if violated_eps:
            note = "midpoint supremum reaches 1 within 1e-6 on the grid"
        elif ladder_flag:
            note = (
                "midpoint ratios on disjoint ones blocks tend to 1 at separation "
                "ratios >= sqrt(2); violated in the sequence-space limit"
            )
        else:
            note = "strict convexity violation forces the modulus to vanish"
    else:
        status = "no violation found"
        note = "empirical evidence over the searched candidates, not a proof"
    return ConvexityVerdict(
        strict=strict,
        uniform_status=status,
        violated_eps=violated_eps,
        curve=curve,
        ladder=ladder,
        ladder_flag=ladder_flag,
        note=note,
    )
