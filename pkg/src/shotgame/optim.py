"""Derivative-free and finite-difference minimizers for small parameter fits.

Three methods cover the families compared when fitting the shot-block model:
Powell's conjugate directions, Nelder-Mead simplex, and nonlinear CG with
central-difference gradients. All are deterministic given the same inputs,
and all keep a monotone best-value trace. Objectives may return +inf to
reject infeasible points; NaN is treated as a bug in the objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Objective = Callable[[np.ndarray], float]

_GOLD = 1.618034
_BRACKET_GROW_LIMIT = 110.0


@dataclass
class OptimResult:
    x_star: np.ndarray
    f_star: float
    n_evals: int
    converged: bool
    trace: list[tuple[int, float]] = field(default_factory=list)


class _CountedObjective:
    """Wraps the raw objective with NaN detection and an eval counter."""

    def __init__(self, fn: Objective):
        self.fn = fn
        self.n_evals = 0

    def __call__(self, x: np.ndarray) -> float:
        self.n_evals += 1
        f = float(self.fn(np.asarray(x, dtype=float)))
        if math.isnan(f):
            raise ValueError(f"objective returned NaN at {np.asarray(x).tolist()}")
        return f


def _bracket(f: Callable[[float], float], xa: float = 0.0, xb: float = 1.0,
             max_iter: int = 200) -> tuple[float, float, float, float, float, float]:
    """Expand downhill until f(b) < f(a) and f(b) < f(c). Returns a<b<c triple."""
    fa, fb = f(xa), f(xb)
    if fb > fa:
        xa, xb = xb, xa
        fa, fb = fb, fa
    xc = xb + _GOLD * (xb - xa)
    fc = f(xc)
    it = 0
    while fc < fb:
        it += 1
        if it > max_iter:
            break
        tmp1 = (xb - xa) * (fb - fc)
        tmp2 = (xb - xc) * (fb - fa)
        val = tmp2 - tmp1
        denom = 2.0 * math.copysign(max(abs(val), 1e-21), val)
        w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom
        wlim = xb + _BRACKET_GROW_LIMIT * (xc - xb)
        if (w - xc) * (xb - w) > 0.0:
            fw = f(w)
            if fw < fc:
                xa, xb, fa, fb = xb, w, fb, fw
                break
            if fw > fb:
                xc, fc = w, fw
                break
            w = xc + _GOLD * (xc - xb)
            fw = f(w)
        elif (w - wlim) * (wlim - xc) >= 0.0:
            w = wlim
            fw = f(w)
        elif (w - wlim) * (xc - w) > 0.0:
            fw = f(w)
            if fw < fc:
                xb, xc, w = xc, w, w + _GOLD * (w - xc)
                fb, fc, fw = fc, fw, f(w)
        else:
            w = xc + _GOLD * (xc - xb)
            fw = f(w)
        xa, xb, xc = xb, xc, w
        fa, fb, fc = fb, fc, fw
    if xa > xc:
        xa, xc = xc, xa
        fa, fc = fc, fa
    return xa, xb, xc, fa, fb, fc


def _brent(f: Callable[[float], float], xa: float, xb: float, xc: float,
           tol: float = 1e-10, max_iter: int = 120) -> tuple[float, float]:
    """Brent 1-D minimization inside a bracket; returns (x, f(x))."""
    cg = 0.3819660
    a, b = min(xa, xc), max(xa, xc)
    x = w = v = xb
    fx = fw = fv = f(x)
    deltax = 0.0
    rat = 0.0
    for _ in range(max_iter):
        tol1 = tol * abs(x) + 1e-12
        tol2 = 2.0 * tol1
        xmid = 0.5 * (a + b)
        if abs(x - xmid) < tol2 - 0.5 * (b - a):
            break
        if abs(deltax) <= tol1:
            deltax = (a if x >= xmid else b) - x
            rat = cg * deltax
        else:
            tmp1 = (x - w) * (fx - fv)
            tmp2 = (x - v) * (fx - fw)
            p = (x - v) * tmp2 - (x - w) * tmp1
            tmp2 = 2.0 * (tmp2 - tmp1)
            if tmp2 > 0.0:
                p = -p
            tmp2 = abs(tmp2)
            dx_temp = deltax
            deltax = rat
            if (p > tmp2 * (a - x)) and (p < tmp2 * (b - x)) and (abs(p) < abs(0.5 * tmp2 * dx_temp)):
                rat = p / tmp2
                u = x + rat
                if (u - a) < tol2 or (b - u) < tol2:
                    rat = math.copysign(tol1, xmid - x)
            else:
                deltax = (a if x >= xmid else b) - x
                rat = cg * deltax
        u = x + (rat if abs(rat) >= tol1 else math.copysign(tol1, rat))
        fu = f(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def _line_minimize(obj: _CountedObjective, x: np.ndarray, direction: np.ndarray,
                   f_x: float, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Minimize along x + alpha * direction; never returns a worse point than x."""

    def f1d(alpha: float) -> float:
        return obj(x + alpha * direction)

    xa, xb, xc, fa, fb, fc = _bracket(f1d)
    if not (fb < fa and fb < fc):
        # Flat or non-bracketable direction: stay put.
        return x, f_x
    alpha, f_alpha = _brent(f1d, xa, xb, xc)
    if f_alpha >= f_x:
        return x, f_x
    return x + alpha * direction, f_alpha


def minimize_powell(obj: Objective, x0: Sequence[float], tol: float = 1e-8,
                    max_iter: int = 200) -> OptimResult:
    """Powell's conjugate-direction method with Brent line searches.

    Stops once a full sweep over the direction set improves the objective
    by less than tol.
    """
    counted = _CountedObjective(obj)
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    n = x.size
    directions = [np.eye(n)[i] for i in range(n)]
    f_x = counted(x)
    trace = [(0, f_x)]
    converged = False
    for it in range(1, max_iter + 1):
        x_old, f_old = x.copy(), f_x
        biggest_drop = 0.0
        biggest_idx = 0
        for i, u in enumerate(directions):
            x_new, f_new = _line_minimize(counted, x, u, f_x)
            if f_x - f_new > biggest_drop:
                biggest_drop = f_x - f_new
                biggest_idx = i
            x, f_x = x_new, f_new
        trace.append((it, f_x))
        if f_old - f_x < tol:
            converged = True
            break
        # Try the extrapolated point; adopt the sweep direction if it helps
        # (standard Powell direction-replacement test).
        x_ext = 2.0 * x - x_old
        f_ext = counted(x_ext)
        if f_ext < f_old:
            t = 2.0 * (f_old - 2.0 * f_x + f_ext) * (f_old - f_x - biggest_drop) ** 2 \
                - biggest_drop * (f_old - f_ext) ** 2
            if t < 0.0:
                new_dir = x - x_old
                norm = np.linalg.norm(new_dir)
                if norm > 0.0:
                    x, f_x = _line_minimize(counted, x, new_dir, f_x)
                    directions[biggest_idx] = new_dir / norm
    return OptimResult(x_star=x, f_star=f_x, n_evals=counted.n_evals,
                       converged=converged, trace=trace)


def minimize_nelder_mead(obj: Objective, x0: Sequence[float], tol: float = 1e-8,
                         max_iter: int = 1000) -> OptimResult:
    """Nelder-Mead with standard coefficients (1, 2, 0.5, 0.5).

    The initial simplex perturbs each coordinate by max(0.05*|x0_i|, 0.00025).
    Converges when the simplex has collapsed: worst - best <= tol in value and
    the vertex spread is below sqrt(tol), so a flat simplex straddling a kink
    keeps contracting instead of stopping early.
    """
    counted = _CountedObjective(obj)
    x0 = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    n = x0.size
    simplex = [x0]
    for i in range(n):
        p = x0.copy()
        p[i] += max(0.05 * abs(x0[i]), 0.00025)
        simplex.append(p)
    fvals = [counted(p) for p in simplex]
    trace = [(0, min(fvals))]
    converged = False
    for it in range(1, max_iter + 1):
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        x_spread = max(float(np.max(np.abs(p - simplex[0]))) for p in simplex[1:])
        if fvals[-1] - fvals[0] <= tol and x_spread <= math.sqrt(tol):
            converged = True
            trace.append((it, fvals[0]))
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_r = counted(reflected)
        if f_r < fvals[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = counted(expanded)
            if f_e < f_r:
                simplex[-1], fvals[-1] = expanded, f_e
            else:
                simplex[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_c = counted(contracted)
            if f_c < fvals[-1]:
                simplex[-1], fvals[-1] = contracted, f_c
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    fvals[i] = counted(simplex[i])
        trace.append((it, min(fvals)))
    best_i = int(np.argmin(fvals))
    return OptimResult(x_star=simplex[best_i], f_star=fvals[best_i],
                       n_evals=counted.n_evals, converged=converged, trace=trace)


def _fd_gradient(counted: _CountedObjective, x: np.ndarray, fd_step: float) -> np.ndarray:
    """Central finite differences with a per-coordinate relative step."""
    g = np.empty_like(x)
    for i in range(x.size):
        h = fd_step * max(abs(x[i]), 1.0)
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (counted(xp) - counted(xm)) / (2.0 * h)
    if np.any(np.isnan(g)):
        raise ValueError(f"finite-difference gradient is NaN at {x.tolist()}")
    return g


def _parabolic_line_search(counted: _CountedObjective, x: np.ndarray, d: np.ndarray,
                           f_x: float, slope: float) -> tuple[np.ndarray, float]:
    """Backtracking to an acceptable step, then one parabolic refinement.

    The refinement makes line minima on quadratics essentially exact, which
    is what gives CG its finite termination there.
    """
    alpha = 1.0
    f_a = counted(x + alpha * d)
    n_back = 0
    while f_a > f_x + 1e-4 * alpha * slope and n_back < 60:
        alpha *= 0.5
        f_a = counted(x + alpha * d)
        n_back += 1
    if f_a > f_x:
        return x, f_x
    # Parabola through alpha=0, alpha/2, alpha.
    f_h = counted(x + 0.5 * alpha * d)
    denom = 4.0 * (f_a - 2.0 * f_h + f_x)
    if denom > 0.0:
        alpha_star = alpha * (3.0 * f_x - 4.0 * f_h + f_a) / denom
        if 0.0 < alpha_star:
            f_star = counted(x + alpha_star * d)
            if f_star < f_a:
                return x + alpha_star * d, f_star
    return x + alpha * d, f_a


def minimize_fd_cg(obj: Objective, x0: Sequence[float], tol: float = 1e-10,
                   max_iter: int = 400, fd_step: float = 1e-6) -> OptimResult:
    """Polak-Ribiere nonlinear CG with central-difference gradients."""
    counted = _CountedObjective(obj)
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    f_x = counted(x)
    trace = [(0, f_x)]
    g = _fd_gradient(counted, x, fd_step)
    d = -g
    converged = False
    for it in range(1, max_iter + 1):
        slope = float(g @ d)
        if slope >= 0.0:
            d = -g
            slope = float(g @ d)
        if slope == 0.0:
            converged = True
            trace.append((it, f_x))
            break
        x_new, f_new = _parabolic_line_search(counted, x, d, f_x, slope)
        trace.append((it, f_new))
        if f_x - f_new < tol:
            x, f_x = x_new, f_new
            converged = True
            break
        g_new = _fd_gradient(counted, x_new, fd_step)
        beta = max(0.0, float(g_new @ (g_new - g)) / max(float(g @ g), 1e-300))
        d = -g_new + beta * d
        x, f_x, g = x_new, f_new, g_new
    return OptimResult(x_star=x, f_star=f_x, n_evals=counted.n_evals,
                       converged=converged, trace=trace)
