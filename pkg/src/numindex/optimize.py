"""Multi-start maximization of a scalar objective over a unit sphere.

The sphere is the norm-one set of a space descriptor.  Complex
coordinates are optimized as interleaved real/imaginary parameters.
Gradients are central finite differences of the normalized objective,
followed by backtracking steps and renormalization; the reduction over
restarts is deterministic (best value, earliest restart wins ties).
"""

from __future__ import annotations

import numpy as np

from .spaces import COMPLEX, SpaceDescriptor, norm, unit_sphere_sample

FD_STEP = 1e-6
STALL_ITERS = 5
VALUE_TOL = 1e-10


def _to_params(x: np.ndarray, complex_field: bool) -> np.ndarray:
    if not complex_field:
        return x.astype(float).copy()
    return np.concatenate([x.real, x.imag])


def _from_params(y: np.ndarray, complex_field: bool) -> np.ndarray:
    if not complex_field:
        return y
    d = y.size // 2
    return y[:d] + 1j * y[d:]


def maximize_on_sphere(desc: SpaceDescriptor, objective, rng: np.random.Generator,
                       restarts: int = 64, max_iters: int = 500,
                       extra_starts=()):
    """Return (best_x, best_value, evals) for ``objective`` over the unit
    sphere of ``desc``.  ``objective`` receives a norm-one vector.

    Starts: the given extra starts, the coordinate directions, then random
    sphere samples up to ``restarts`` total; the start list grows with
    ``restarts`` as a prefix, so enlarging the budget never lowers the result
    under a shared seed.
    """
    cplx = desc.field == COMPLEX
    starts = [np.asarray(s, dtype=desc.dtype) for s in extra_starts]
    eye = np.eye(desc.total_dim, dtype=desc.dtype)
    starts.extend(eye)
    while len(starts) < max(restarts, 1):
        starts.append(unit_sphere_sample(desc, rng))
    starts = starts[:max(restarts, len(extra_starts))]

    evals = 0

    def normed_obj(y: np.ndarray) -> float:
        nonlocal evals
        x = _from_params(y, cplx)
        n = norm(desc, x)
        if n == 0.0:
            return 0.0
        evals += 1
        return float(objective(x / n))

    best_x, best_val = None, -np.inf
    for x0 in starts:
        n0 = norm(desc, x0)
        if n0 == 0.0:
            continue
        y = _to_params(np.asarray(x0) / n0, cplx)
        x, val = _ascend(normed_obj, y, max_iters)
        if val > best_val + 1e-15:
            best_val = val
            best_x = x
    x = _from_params(best_x, cplx)
    x = x / norm(desc, x)
    return x, best_val, evals


def _ascend(obj, y: np.ndarray, max_iters: int):
    val = obj(y)
    step = 0.25
    stall = 0
    d = y.size
    for _ in range(max_iters):
        grad = np.zeros(d)
        for i in range(d):
            e = np.zeros(d)
            e[i] = FD_STEP
            grad[i] = (obj(y + e) - obj(y - e)) / (2 * FD_STEP)
        gn = np.linalg.norm(grad)
        if gn < 1e-12:
            break
        direction = grad / gn
        prev = val
        improved = False
        s = step
        while s > 1e-14:
            cand = y + s * direction
            cval = obj(cand)
            if cval > val + 1e-15:
                y, val = cand, cval
                step = min(s * 2.0, 1.0)
                improved = True
                break
            s *= 0.5
        if not improved:
            break
        stall = stall + 1 if val - prev < VALUE_TOL else 0
        if stall >= STALL_ITERS:
            break
    return y, val
