"""Derivative-free local minimization for the two shape parameters.

A small Nelder-Mead tailored to 2-D box-constrained problems, followed by a
few rounds of per-coordinate quadratic interpolation to sharpen the minimum.
Kept free of scipy so that tens of thousands of bootstrap refits stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

__all__ = ["LocalMinResult", "minimize_2d"]

Point = tuple[float, float]


@dataclass(frozen=True)
class LocalMinResult:
    x: Point
    fun: float
    iterations: int
    converged: bool


def _clip(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def minimize_2d(
    f: Callable[[Point], float],
    x0: Point,
    bounds: tuple[tuple[float, float], tuple[float, float]],
    step: float = 0.1,
    xatol: float = 1e-8,
    fatol: float = 1e-10,
    maxiter: int = 500,
    polish_rounds: int = 3,
    polish_step: float = 1e-5,
) -> LocalMinResult:
    """Minimize f over a box, stopping on simplex size xatol or spread fatol.

    Ties between equal function values break on the point coordinates, so the
    path is deterministic for a given objective.
    """
    (lo0, hi0), (lo1, hi1) = bounds

    def clip(p: Point) -> Point:
        return (_clip(p[0], lo0, hi0), _clip(p[1], lo1, hi1))

    x0 = clip((float(x0[0]), float(x0[1])))
    verts = [x0]
    for i in range(2):
        p = list(x0)
        hi = hi0 if i == 0 else hi1
        p[i] += step if p[i] + step <= hi else -step
        verts.append(clip((p[0], p[1])))
    sim = sorted((f(p), p) for p in verts)

    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        (fb, xb), (fm, xm), (fw, xw) = sim
        size = max(
            abs(xw[0] - xb[0]), abs(xw[1] - xb[1]),
            abs(xm[0] - xb[0]), abs(xm[1] - xb[1]),
        )
        if size < xatol or (fw - fb) < fatol:
            converged = True
            break

        cx = (0.5 * (xb[0] + xm[0]), 0.5 * (xb[1] + xm[1]))
        xr = clip((cx[0] + (cx[0] - xw[0]), cx[1] + (cx[1] - xw[1])))
        fr = f(xr)
        if fr < fb:
            xe = clip((cx[0] + 2.0 * (cx[0] - xw[0]), cx[1] + 2.0 * (cx[1] - xw[1])))
            fe = f(xe)
            sim[2] = (fe, xe) if fe < fr else (fr, xr)
        elif fr < fm:
            sim[2] = (fr, xr)
        else:
            xt = xr if fr < fw else xw
            xc = clip((cx[0] + 0.5 * (xt[0] - cx[0]), cx[1] + 0.5 * (xt[1] - cx[1])))
            fc = f(xc)
            if fc < min(fr, fw):
                sim[2] = (fc, xc)
            else:
                for k in (1, 2):
                    xs = clip((
                        xb[0] + 0.5 * (sim[k][1][0] - xb[0]),
                        xb[1] + 0.5 * (sim[k][1][1] - xb[1]),
                    ))
                    sim[k] = (f(xs), xs)
        sim.sort()

    fx, x = sim[0]

    # Per-coordinate parabolic refinement: solves each 1-D section exactly
    # for a locally quadratic objective, which pulls symmetric minima onto
    # the diagonal far more tightly than the simplex alone.
    h = polish_step
    for _ in range(polish_rounds):
        for i in range(2):
            lo, hi = bounds[i]
            xp = list(x)
            xm_ = list(x)
            xp[i] = _clip(x[i] + h, lo, hi)
            xm_[i] = _clip(x[i] - h, lo, hi)
            fp, fm_ = f((xp[0], xp[1])), f((xm_[0], xm_[1]))
            curv = fp - 2.0 * fx + fm_
            if curv > 0.0:
                xn = list(x)
                xn[i] = _clip(x[i] - 0.5 * h * (fp - fm_) / curv, lo, hi)
                cand = (xn[0], xn[1])
                fn = f(cand)
                if fn < fx:
                    x, fx = cand, fn
            elif fp < fx or fm_ < fx:
                x, fx = ((xp[0], xp[1]), fp) if fp <= fm_ else ((xm_[0], xm_[1]), fm_)

    return LocalMinResult(x=x, fun=fx, iterations=it, converged=converged)
