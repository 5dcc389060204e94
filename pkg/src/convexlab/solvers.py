"""Certified solvers for linear maximization over unit balls and min-norm problems.

Every public solve returns a SolveReport whose `certified_gap` is computed by
independent weak-duality arithmetic, never taken from a solver status flag:
for a maximization the gap is (closed-form or dual upper bound) minus the
value attained by a feasible point; for a constrained minimization it is the
primal value minus a lower bound built from a dual-feasible multiplier.

Dispatch per norm kind: closed forms for lp and inner-product norms, linear
programming (HiGHS) for the polyhedral cases, SLSQP for smooth p, and an
exact scalar-root reduction for the dual of an l1+l2 sum.  Sums without an
exact reduction fall back to a projected subgradient scheme with Polyak steps
over split variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .norm_core import InnerProduct, Lp, NormSpec, SumNorm, as_vector, norm_eval

__all__ = [
    "SolveReport",
    "SolverConvergenceError",
    "AffineSet",
    "hoelder_conjugate",
    "dual_spec_of",
    "norm_subgradient",
    "linear_max_over_ball",
    "dual_norm",
    "bidual_norm",
    "affine_min_norm",
    "solve_min_norm",
    "face_probe",
    "max_linear_over_pullback_ball",
    "DEFAULT_TOL",
    "ITERATION_CAP",
]

DEFAULT_TOL = 1e-8
ITERATION_CAP = 100_000


class SolverConvergenceError(RuntimeError):
    """Raised when a solve cannot certify its result to the requested tolerance."""


@dataclass(frozen=True)
class SolveReport:
    value: float
    argpoint: np.ndarray
    iterations: int
    converged: bool
    certified_gap: float


@dataclass(frozen=True)
class AffineSet:
    """Solution set of matrix @ x = rhs with full row rank."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        r = as_vector(self.rhs)
        if m.ndim != 2 or m.shape[0] < 1:
            raise ValueError("constraint matrix must be 2-d")
        if m.shape[0] > m.shape[1]:
            raise ValueError("more constraints than variables")
        if m.shape[0] != r.size:
            raise ValueError("rhs length must match the number of rows")
        if not np.all(np.isfinite(m)):
            raise ValueError("constraint entries must be finite")
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise ValueError("constraint matrix is rank deficient")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rhs", r)


def hoelder_conjugate(p: float) -> float:
    """q with 1/p + 1/q = 1; conjugate pairs (1, inf) and (2, 2)."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError("exponent must lie in [1, inf]")
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def dual_spec_of(spec: NormSpec) -> NormSpec:
    """Spec of the dual norm, for kinds where the dual is again a spec."""
    if isinstance(spec, Lp):
        return Lp(hoelder_conjugate(spec.p))
    if isinstance(spec, InnerProduct):
        return InnerProduct(np.linalg.inv(spec.gram))
    raise ValueError("the dual of a sum norm is not representable as a spec")


# ---------------------------------------------------------------------------
# subgradients with a deterministic extreme-point tie-break


def _lex_min_signed_basis(indices: np.ndarray, signs: np.ndarray, n: int) -> np.ndarray:
    """Lexicographically smallest among the vectors signs[i] * e_{indices[i]}."""
    best = None
    for idx, sg in zip(indices, signs):
        cand = np.zeros(n)
        cand[idx] = sg
        key = tuple(cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def norm_subgradient(y, spec: NormSpec) -> np.ndarray:
    """A subgradient of the norm at y; at kinks, the lexicographically
    smallest extreme point of the subdifferential.  Returns zero at the origin."""
    y = as_vector(y)
    n = y.size
    if not np.any(y):
        return np.zeros(n)
    if isinstance(spec, Lp):
        p = spec.p
        if p == 1.0:
            # extreme subgradients put ±1 on zero coordinates; all -1 is lex-min
            return np.where(y > 0.0, 1.0, -1.0)
        if math.isinf(p):
            a = np.abs(y)
            top = np.flatnonzero(a >= a.max())
            return _lex_min_signed_basis(top, np.sign(y[top]), n)
        nv = norm_eval(y, spec)
        return np.sign(y) * (np.abs(y) / nv) ** (p - 1.0)
    if isinstance(spec, InnerProduct):
        nv = norm_eval(y, spec)
        return spec.gram @ y / nv
    if isinstance(spec, SumNorm):
        return np.sum([norm_subgradient(y, part) for part in spec.parts], axis=0)
    raise TypeError(f"unknown spec type {type(spec)!r}")


# ---------------------------------------------------------------------------
# linear maximization over a unit ball (dual norm evaluation)


def _primal_ball_argmax(g: np.ndarray, spec: NormSpec) -> np.ndarray:
    """A maximizer of <g, x> over the unit ball of spec (closed forms only)."""
    n = g.size
    if not np.any(g):
        return np.zeros(n)
    if isinstance(spec, Lp):
        p = spec.p
        if p == 1.0:
            a = np.abs(g)
            top = np.flatnonzero(a >= a.max())
            return _lex_min_signed_basis(top, np.sign(g[top]), n)
        if math.isinf(p):
            return np.where(g > 0.0, 1.0, np.where(g < 0.0, -1.0, -1.0))
        q = hoelder_conjugate(p)
        nq = norm_eval(g, Lp(q))
        return np.sign(g) * (np.abs(g) / nq) ** (q - 1.0)
    if isinstance(spec, InnerProduct):
        sol = np.linalg.solve(spec.gram, g)
        return sol / math.sqrt(float(g @ sol))
    raise ValueError("no closed-form ball argmax for this spec")


def _sum_dual_exact_l1l2(g: np.ndarray, parts: tuple[NormSpec, ...]):
    """Dual norm of an l1+l2 sum: the unique root of sum((|g|-t)+^2) = t^2.

    The dual ball of a sum of norms is the Minkowski sum of the parts' dual
    balls, so the dual norm is the smallest t with dist_2(g, t*Binf) <= t.
    Returns (value, primal argpoint attaining it).
    """
    a = np.abs(g)
    hi = float(a.max())
    if hi == 0.0:
        return 0.0, np.zeros(g.size)

    def f(t):
        res = np.maximum(a - t, 0.0)
        return float(res @ res - t * t)

    lam = optimize.brentq(f, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    residual = np.sign(g) * np.maximum(a - lam, 0.0)
    denom = norm_eval(residual, SumNorm(parts))
    if denom == 0.0:
        # root hit the kink exactly; fall back to the largest coordinate
        x = np.zeros(g.size)
        x[int(np.argmax(a))] = math.copysign(1.0, g[int(np.argmax(a))])
        x /= norm_eval(x, SumNorm(parts))
        return lam, x
    return lam, residual / denom


def _is_l1l2_sum(spec: NormSpec) -> bool:
    if not isinstance(spec, SumNorm) or len(spec.parts) != 2:
        return False
    ps = sorted(part.p for part in spec.parts if isinstance(part, Lp))
    return len(ps) == 2 and ps == [1.0, 2.0]


def _sum_dual_generic(g: np.ndarray, spec: SumNorm, tol: float):
    """Projected subgradient with Polyak steps on split variables.

    Minimizes max_j D_j(h_j) over splits h_1 + ... + h_K = g, which equals the
    dual norm of the sum.  Lower bounds come from feasible primal candidates,
    so the certified gap is real.  Returns (upper, argpoint, lower, iters).
    """
    parts = spec.parts
    for part in parts:
        if isinstance(part, SumNorm):
            raise NotImplementedError("nested sum specs are not supported here")
    K = len(parts)
    n = g.size

    def part_dual(j, h):
        if isinstance(parts[j], Lp):
            return norm_eval(h, Lp(hoelder_conjugate(parts[j].p))) if np.any(h) else 0.0
        sol = np.linalg.solve(parts[j].gram, h)
        return math.sqrt(max(float(h @ sol), 0.0))

    splits = np.tile(g / K, (K, 1))
    upper_best = math.inf
    lower_best = 0.0
    best_x = np.zeros(n)
    iters = 0
    for iters in range(1, ITERATION_CAP + 1):
        duals = np.array([part_dual(j, splits[j]) for j in range(K)])
        phi = float(duals.max())
        jstar = int(np.argmax(duals))
        upper_best = min(upper_best, phi)
        if np.any(splits[jstar]):
            cand = _primal_ball_argmax(splits[jstar], parts[jstar])
            denom = norm_eval(cand, spec)
            if denom > 0.0:
                lb = float(g @ cand) / denom
                if lb > lower_best:
                    lower_best = lb
                    best_x = cand / denom
        if upper_best - lower_best <= tol * (1.0 + upper_best):
            break
        grad = np.zeros((K - 1, n))
        sub = _primal_ball_argmax(splits[jstar], parts[jstar]) if np.any(splits[jstar]) else np.zeros(n)
        if jstar < K - 1:
            grad[jstar] = sub
        else:
            grad -= sub
        gn2 = float(np.sum(grad * grad))
        if gn2 == 0.0:
            break
        step = (phi - lower_best) / gn2
        flat = splits[: K - 1] - step * grad
        splits = np.vstack([flat, (g - flat.sum(axis=0))[None, :]])
    return upper_best, best_x, lower_best, iters


def linear_max_over_ball(g, spec: NormSpec, tol: float = DEFAULT_TOL) -> SolveReport:
    """Maximize <g, x> over the unit ball of spec; value is the dual norm of g."""
    g = as_vector(g)
    if not np.any(g):
        return SolveReport(0.0, np.zeros(g.size), 1, True, 0.0)
    if isinstance(spec, (Lp, InnerProduct)):
        if isinstance(spec, Lp):
            upper = norm_eval(g, Lp(hoelder_conjugate(spec.p)))
        else:
            upper = math.sqrt(max(float(g @ np.linalg.solve(spec.gram, g)), 0.0))
        x = _primal_ball_argmax(g, spec)
        iters = 1
        lower = None
    elif isinstance(spec, SumNorm):
        if _is_l1l2_sum(spec):
            upper, x = _sum_dual_exact_l1l2(g, spec.parts)
            iters = 1
            lower = None
        else:
            upper, x, lower, iters = _sum_dual_generic(g, spec, tol)
    else:
        raise TypeError(f"unknown spec type {type(spec)!r}")
    nx = norm_eval(x, spec)
    if nx > 1.0:
        x = x / nx
    if lower is None:
        lower = float(g @ x)
    gap = max(0.0, upper - lower)
    return SolveReport(float(upper), x, iters, gap <= tol, gap)


def dual_norm(g, spec: NormSpec, tol: float = DEFAULT_TOL) -> float:
    """Dual norm sup{<g,x> : ‖x‖ <= 1}."""
    report = linear_max_over_ball(g, spec, tol)
    if not report.converged:
        raise SolverConvergenceError(
            f"dual norm not certified: gap {report.certified_gap:.3e} after {report.iterations} iterations"
        )
    return report.value


# ---------------------------------------------------------------------------
# bidual norm via a linear-maximization oracle over the dual ball


def _dual_ball_lmo(v: np.ndarray, spec: NormSpec) -> np.ndarray:
    """A maximizer of <v, g> over the dual unit ball of spec."""
    n = v.size
    if not np.any(v):
        return np.zeros(n)
    if isinstance(spec, Lp):
        p = spec.p
        if p == 1.0:
            return np.sign(v)
        if math.isinf(p):
            a = np.abs(v)
            i = int(np.argmax(a))
            out = np.zeros(n)
            out[i] = math.copysign(1.0, v[i])
            return out
        nv = norm_eval(v, spec)
        return np.sign(v) * (np.abs(v) / nv) ** (p - 1.0)
    if isinstance(spec, InnerProduct):
        q = math.sqrt(max(float(v @ (spec.gram @ v)), 0.0))
        return spec.gram @ v / q
    if isinstance(spec, SumNorm):
        # the dual ball of a sum is the Minkowski sum of the parts' dual balls
        return np.sum([_dual_ball_lmo(v, part) for part in spec.parts], axis=0)
    raise TypeError(f"unknown spec type {type(spec)!r}")


def bidual_norm(v, spec: NormSpec, tol: float = DEFAULT_TOL) -> float:
    """sup{<v, g> : dual norm of g <= 1}, by conditional gradient over the dual ball.

    Restricted to dimension <= 16.  The final point is cross-checked for dual
    feasibility with the independent dual_norm machinery.
    """
    v = as_vector(v)
    if v.size > 16:
        raise ValueError("bidual_norm supports dimension at most 16")
    g = np.zeros(v.size)
    value = 0.0
    for _ in range(1, 51):
        s = _dual_ball_lmo(v, spec)
        fw_gap = float(v @ s) - float(v @ g)
        if fw_gap <= tol * (1.0 + abs(float(v @ s))):
            break
        # linear objective: exact line search jumps to the oracle point
        g = s
        value = float(v @ g)
    feas = dual_norm(g, spec, tol) if np.any(g) else 0.0
    if feas > 1.0 + 1e-9:
        g = g / feas
        value = float(v @ g)
    return value


# ---------------------------------------------------------------------------
# constrained min-norm core


def _feasible_start(F, r, k):
    if F is None:
        return np.zeros(k)
    sol, *_ = np.linalg.lstsq(F, r, rcond=None)
    return sol


def _repair_feasibility(c, F, r):
    if F is None:
        return c
    res = r - F @ c
    if float(np.abs(res).max()) == 0.0:
        return c
    corr, *_ = np.linalg.lstsq(F, res, rcond=None)
    return c + corr


def _smooth_norm_grad(y: np.ndarray, spec: NormSpec) -> np.ndarray:
    nv = norm_eval(y, spec)
    if nv == 0.0:
        return np.zeros(y.size)
    if isinstance(spec, Lp):
        return np.sign(y) * (np.abs(y) / nv) ** (spec.p - 1.0)
    return spec.gram @ y / nv


def _kkt_quadratic(U, v0, F, r, gram):
    """Exact minimizer of ‖v0 + U c‖_G^2 subject to F c = r."""
    k = U.shape[1]
    H = U.T @ gram @ U
    rhs_top = -(U.T @ (gram @ v0))
    if F is None:
        sol, *_ = np.linalg.lstsq(H, rhs_top, rcond=None)
        return sol
    m = F.shape[0]
    kkt = np.block([[2.0 * H, F.T], [F, np.zeros((m, m))]])
    rhs = np.concatenate([2.0 * rhs_top, r])
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:k]


def _solve_lp(cost, A_ub, b_ub, A_eq, b_eq, bounds):
    res = optimize.linprog(
        cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs"
    )
    if res.status != 0 or res.x is None:
        raise SolverConvergenceError(f"linear program failed: {res.message}")
    return res.x, int(res.nit)


def _min_norm_lp_branch(spec, U, v0, F, r, w):
    n, k = U.shape
    wvec = np.zeros(k) if w is None else w
    if spec.p == 1.0:
        cost = np.concatenate([wvec, np.ones(n)])
        A_ub = np.block([[U, -np.eye(n)], [-U, -np.eye(n)]])
        b_ub = np.concatenate([-v0, v0])
        bounds = [(None, None)] * k + [(0.0, None)] * n
    else:
        cost = np.concatenate([wvec, [1.0]])
        ones = np.ones((n, 1))
        A_ub = np.block([[U, -ones], [-U, -ones]])
        b_ub = np.concatenate([-v0, v0])
        bounds = [(None, None)] * k + [(0.0, None)]
    A_eq = b_eq = None
    if F is not None:
        A_eq = np.hstack([F, np.zeros((F.shape[0], len(cost) - k))])
        b_eq = r
    z, nit = _solve_lp(cost, A_ub, b_ub, A_eq, b_eq, bounds)
    return z[:k], nit


def _min_norm_smooth_branch(spec, U, v0, F, r, w, c0):
    wvec = np.zeros(U.shape[1]) if w is None else w

    def fun(c):
        y = v0 + U @ c
        return norm_eval(y, spec) + float(wvec @ c)

    def jac(c):
        y = v0 + U @ c
        return U.T @ _smooth_norm_grad(y, spec) + wvec

    cons = []
    if F is not None:
        cons.append({"type": "eq", "fun": lambda c: F @ c - r, "jac": lambda c: F})
    res = optimize.minimize(
        fun, c0, jac=jac, method="SLSQP", constraints=cons,
        options={"ftol": 1e-14, "maxiter": 500},
    )
    return res.x, max(int(res.nit), 1)


def _min_norm_sum_branch(spec, U, v0, F, r, w, c0):
    """Sum norms: smooth parts stay in the objective, l1/linf parts get
    epigraph auxiliaries with linear constraints."""
    n, k = U.shape
    wvec = np.zeros(k) if w is None else w
    smooth_parts = []
    aux_layout = []  # (kind, offset, size)
    offset = k
    for part in spec.parts:
        if isinstance(part, Lp) and part.p == 1.0:
            aux_layout.append(("l1", offset, n))
            offset += n
        elif isinstance(part, Lp) and math.isinf(part.p):
            aux_layout.append(("linf", offset, 1))
            offset += 1
        elif isinstance(part, (Lp, InnerProduct)):
            smooth_parts.append(part)
        else:
            raise NotImplementedError("nested sum specs are not supported")
    total = offset

    def fun(z):
        c = z[:k]
        y = v0 + U @ c
        val = float(wvec @ c) + sum(norm_eval(y, sp) for sp in smooth_parts)
        for _, off, size in aux_layout:
            val += float(np.sum(z[off : off + size]))
        return val

    def jac(z):
        c = z[:k]
        y = v0 + U @ c
        g = np.zeros(total)
        acc = wvec.copy()
        for sp in smooth_parts:
            acc = acc + U.T @ _smooth_norm_grad(y, sp)
        g[:k] = acc
        for _, off, size in aux_layout:
            g[off : off + size] = 1.0
        return g

    cons = []
    for kind, off, size in aux_layout:
        sel = np.zeros((size, total))
        sel[:, off : off + size] = np.eye(size)
        if kind == "l1":
            A = np.zeros((n, total))
            A[:, :k] = U

            def make(A_loc, sel_loc, sign):
                def f(z):
                    return (sel_loc @ z) + sign * (v0 + A_loc[:, :k] @ z[:k])

                def j(z):
                    return sel_loc + sign * A_loc

                return {"type": "ineq", "fun": f, "jac": j}

            cons.append(make(A, sel, 1.0))
            cons.append(make(A, sel, -1.0))
        else:
            A = np.zeros((n, total))
            A[:, :k] = U
            tau_row = np.zeros((n, total))
            tau_row[:, off] = 1.0

            def make_inf(A_loc, tau_loc, sign):
                def f(z):
                    return (tau_loc @ z) + sign * (v0 + A_loc[:, :k] @ z[:k])

                def j(z):
                    return tau_loc + sign * A_loc

                return {"type": "ineq", "fun": f, "jac": j}

            cons.append(make_inf(A, tau_row, 1.0))
            cons.append(make_inf(A, tau_row, -1.0))
    if F is not None:
        Feq = np.hstack([F, np.zeros((F.shape[0], total - k))])

        def eq_fun(z, Feq=Feq):
            return Feq @ z - r

        cons.append({"type": "eq", "fun": eq_fun, "jac": lambda z: Feq})

    y0 = v0 + U @ c0
    z0 = np.concatenate([c0] + [
        np.abs(y0) + 1e-2 if kind == "l1" else np.array([np.abs(y0).max() + 1e-2])
        for kind, _, _ in aux_layout
    ]) if aux_layout else c0.copy()
    res = optimize.minimize(
        fun, z0, jac=jac, method="SLSQP", constraints=cons,
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    return res.x[:k], max(int(res.nit), 1)


def _subdiff_box_decomposition(y, spec, scale):
    """Parametrize a subset of the subdifferential at y as fixed + box entries.

    Returns (fixed, free_indices) where fixed + sum(b_i e_i), b in [-1,1],
    stays inside the subdifferential, or None if the kind has no such
    parametrization (linf-type argmax faces).
    """
    n = y.size
    if isinstance(spec, Lp):
        if spec.p == 1.0:
            on = np.abs(y) > 1e-9 * scale
            return np.where(on, np.sign(y), 0.0), np.flatnonzero(~on)
        if math.isinf(spec.p):
            return None
        return _smooth_norm_grad(y, spec), np.array([], dtype=int)
    if isinstance(spec, InnerProduct):
        return _smooth_norm_grad(y, spec), np.array([], dtype=int)
    if isinstance(spec, SumNorm):
        fixed = np.zeros(n)
        free: set[int] = set()
        for part in spec.parts:
            dec = _subdiff_box_decomposition(y, part, scale)
            if dec is None:
                return None
            fixed = fixed + dec[0]
            free |= set(int(i) for i in dec[1])
        return fixed, np.asarray(sorted(free), dtype=int)
    return None


def _certificate_candidate(y_hat, spec, A):
    """A multiplier candidate inside the subdifferential at y_hat chosen to
    nearly annihilate the rows of A (the multiplier-feasibility conditions)."""
    n = y_hat.size
    scale = float(np.abs(y_hat).max()) if np.any(y_hat) else 0.0
    if scale == 0.0:
        return np.zeros(n)
    if isinstance(spec, Lp) and math.isinf(spec.p):
        a = np.abs(y_hat)
        top = np.flatnonzero(a >= a.max() - 1e-7 * scale)
        M = np.zeros((n, top.size))
        for col, i in enumerate(top):
            M[i, col] = math.copysign(1.0, y_hat[i])
        if A.shape[0] == 0 or top.size == 1:
            theta = np.full(top.size, 1.0 / top.size)
        else:
            kappa = 1e3
            B = np.vstack([A @ M, kappa * np.ones((1, top.size))])
            target = np.concatenate([np.zeros(A.shape[0]), [kappa]])
            theta, _ = optimize.nnls(B, target)
            tot = theta.sum()
            theta = theta / tot if tot > 0.0 else np.full(top.size, 1.0 / top.size)
        return M @ theta
    dec = _subdiff_box_decomposition(y_hat, spec, scale)
    if dec is None:
        return norm_subgradient(y_hat, spec)
    fixed, free = dec
    if free.size and A.shape[0]:
        res = optimize.lsq_linear(A[:, free], -(A @ fixed), bounds=(-1.0, 1.0))
        cand = fixed.copy()
        cand[free] += res.x
        return cand
    return fixed


def _certificate_lower_bound(spec, U, v0, F, r, y_hat):
    """Weak-duality lower bound on min ‖v0 + U c‖ s.t. F c = r.

    Builds λ inside the subdifferential at the solution subject to
    U'λ ∈ range(F') exactly, then bounds below by (<λ,v0> + <μ,r>)/max(1,D(λ)).
    """
    if F is None:
        A = U.T
    else:
        _, _, vt = np.linalg.svd(F)
        null_basis = vt[F.shape[0]:].T  # (k, k-m)
        A = null_basis.T @ U.T  # rows must annihilate λ
    cand = _certificate_candidate(y_hat, spec, A)
    if A.shape[0] == 0 or not np.any(cand):
        lam = cand
    else:
        AAt = A @ A.T
        coef, *_ = np.linalg.lstsq(AAt, A @ cand, rcond=None)
        lam = cand - A.T @ coef
    dlam = dual_norm(lam, spec) if np.any(lam) else 0.0
    bound = float(lam @ v0)
    if F is not None:
        mu, *_ = np.linalg.lstsq(F.T, U.T @ lam, rcond=None)
        bound += float(mu @ r)
    return bound / max(1.0, dlam)


def solve_min_norm(
    spec: NormSpec,
    U: np.ndarray,
    v0: np.ndarray,
    F: np.ndarray | None = None,
    r: np.ndarray | None = None,
    w: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    certify: bool = True,
) -> SolveReport:
    """Minimize ‖v0 + U c‖_spec + <w, c> over c subject to F c = r.

    Returns a report in c-coordinates; `value` is always the recomputed norm
    of v0 + U c at the solution (the linear term only steers the argpoint).
    With certify=True a weak-duality lower bound is constructed (only valid
    when w is None) and convergence requires certified gap <= tol.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    v0 = as_vector(v0)
    if U.shape[0] != v0.size:
        raise ValueError("offset dimension does not match the basis")
    k = U.shape[1]
    if F is not None:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        r = as_vector(r)
        if F.shape[1] != k or F.shape[0] != r.size:
            raise ValueError("constraint shape mismatch")
    c0 = _feasible_start(F, r, k)

    iters = 1
    if isinstance(spec, InnerProduct) and w is None:
        c = _kkt_quadratic(U, v0, F, r, spec.gram)
    elif isinstance(spec, Lp) and spec.p == 2.0 and w is None:
        c = _kkt_quadratic(U, v0, F, r, np.eye(v0.size))
    elif isinstance(spec, Lp) and (spec.p == 1.0 or math.isinf(spec.p)):
        c, iters = _min_norm_lp_branch(spec, U, v0, F, r, w)
    elif isinstance(spec, (Lp, InnerProduct)):
        start = _kkt_quadratic(U, v0, F, r, np.eye(v0.size) if isinstance(spec, Lp) else spec.gram)
        c, iters = _min_norm_smooth_branch(spec, U, v0, F, r, w, start)
    elif isinstance(spec, SumNorm):
        start = _kkt_quadratic(U, v0, F, r, np.eye(v0.size))
        c, iters = _min_norm_sum_branch(spec, U, v0, F, r, w, start)
    else:
        raise TypeError(f"unknown spec type {type(spec)!r}")

    c = _repair_feasibility(np.asarray(c, dtype=float), F, r)
    y = v0 + U @ c
    value = norm_eval(y, spec)

    if not certify or w is not None:
        return SolveReport(value, c, iters, True, math.nan)
    lower = _certificate_lower_bound(spec, U, v0, F, r, y)
    gap = max(0.0, value - lower)
    return SolveReport(value, c, iters, gap <= tol, gap)


def affine_min_norm(aff: AffineSet, spec: NormSpec, tol: float = DEFAULT_TOL) -> SolveReport:
    """Minimize ‖x‖_spec over the affine set {x : matrix @ x = rhs}."""
    n = aff.matrix.shape[1]
    report = solve_min_norm(spec, np.eye(n), np.zeros(n), aff.matrix, aff.rhs, tol=tol)
    if not report.converged:
        raise SolverConvergenceError(
            f"min-norm solve not certified: gap {report.certified_gap:.3e}"
        )
    resid = float(np.abs(aff.matrix @ report.argpoint - aff.rhs).max())
    if resid > 1e-9 * (1.0 + float(np.abs(aff.rhs).max())):
        raise SolverConvergenceError(f"argpoint infeasible: residual {resid:.3e}")
    return report


def face_probe(
    spec: NormSpec,
    U: np.ndarray,
    v0: np.ndarray,
    F: np.ndarray | None,
    r: np.ndarray | None,
    directions,
    base_value: float,
    base_c: np.ndarray,
    window: float,
) -> list[np.ndarray]:
    """Near-minimizers pushed along each direction by a perturbed objective.

    For each direction d the objective ‖v0+Uc‖ + eta*<-d, c> is re-solved with
    eta shrunk until the value stays inside the optimal-face window; on
    polyhedral norms a small eta lands on an exact face vertex, on smooth
    norms the displacement scales like eta so unique minimizers stay put."""
    polyhedral = isinstance(spec, Lp) and (spec.p == 1.0 or math.isinf(spec.p))
    etas = (1e-4, 1e-6, 1e-8) if polyhedral else (1e-9, 1e-11)
    scale = 1.0 + abs(base_value)
    points = []
    for d in directions:
        d = as_vector(d)
        chosen = base_c
        for eta in etas:
            rep = solve_min_norm(spec, U, v0, F, r, w=-eta * scale * d, certify=False)
            if rep.value <= base_value + window:
                chosen = rep.argpoint
                break
        points.append(np.asarray(chosen, dtype=float))
    return points


# ---------------------------------------------------------------------------
# linear maximization over a pulled-back ball {c : ‖U c‖_spec <= 1}


def max_linear_over_pullback_ball(
    f, U: np.ndarray, spec: NormSpec, tol: float = DEFAULT_TOL
) -> tuple[float, np.ndarray]:
    """sup{<f, c> : ‖U c‖_spec <= 1}, solved on the primal side.

    U must have full column rank so c -> ‖U c‖ is a norm on the coefficients.
    """
    f = as_vector(f)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    k = U.shape[1]
    if f.size != k:
        raise ValueError("functional length must match the number of columns")
    if not np.any(f):
        return 0.0, np.zeros(k)
    if isinstance(spec, InnerProduct) or (isinstance(spec, Lp) and spec.p == 2.0):
        gram = spec.gram if isinstance(spec, InnerProduct) else np.eye(U.shape[0])
        H = U.T @ gram @ U
        sol = np.linalg.solve(H, f)
        value = math.sqrt(max(float(f @ sol), 0.0))
        return value, sol / value
    if isinstance(spec, Lp) and spec.p == 1.0:
        n = U.shape[0]
        cost = np.concatenate([-f, np.zeros(n)])
        A_ub = np.block(
            [[U, -np.eye(n)], [-U, -np.eye(n)], [np.zeros((1, k)), np.ones((1, n))]]
        )
        b_ub = np.concatenate([np.zeros(2 * n), [1.0]])
        bounds = [(None, None)] * k + [(0.0, None)] * n
        z, _ = _solve_lp(cost, A_ub, b_ub, None, None, bounds)
        return float(f @ z[:k]), z[:k]
    if isinstance(spec, Lp) and math.isinf(spec.p):
        n = U.shape[0]
        A_ub = np.vstack([U, -U])
        b_ub = np.ones(2 * n)
        z, _ = _solve_lp(-f, A_ub, b_ub, None, None, [(None, None)] * k)
        return float(f @ z), z
    if isinstance(spec, Lp):
        c_center = np.linalg.solve(U.T @ U, f)
        nv = norm_eval(U @ c_center, spec)
        c0 = c_center / nv * 0.999

        def fun(c):
            return -float(f @ c)

        def jac(c):
            return -f

        def con(c):
            return 1.0 - norm_eval(U @ c, spec)

        def con_jac(c):
            return -(U.T @ _smooth_norm_grad(U @ c, spec))

        res = optimize.minimize(
            fun, c0, jac=jac, method="SLSQP",
            constraints=[{"type": "ineq", "fun": con, "jac": con_jac}],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        c = res.x
        nv = norm_eval(U @ c, spec)
        if nv > 1.0:
            c = c / nv
        return float(f @ c), c
    raise NotImplementedError("pulled-back maximization over sum specs is not supported")
