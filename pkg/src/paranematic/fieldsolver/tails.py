"""Far-field decay-rate estimation along a ray."""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientDecay

_FLOOR = 1e-250
_MIN_SAMPLES = 8


def tail_decay_rate(sol, ray, t_start=None, t_stop=None, samples=64):
    """Exponential decay rate of |u| along a ray from the config centroid.

    Distances are measured in blown-up (decay-length) units.  The fitted
    quantity is log(|u| sqrt(t)): dividing out the universal cylindrical
    spreading factor isolates the exponent, which the fit then reports as a
    positive rate (1 for the screened Laplacian).
    """
    direction = np.asarray(ray, dtype=float)
    norm = float(np.hypot(*direction))
    if norm == 0:
        raise ValueError("ray direction must be nonzero")
    direction = direction / norm

    config = sol.config.blown_up()
    centers = np.array([p.center_array for p in config.particles])
    origin = centers.mean(axis=0)
    rim = max(float(np.hypot(*(c - origin))) + p.radius
              for c, p in zip(centers, config.particles))

    t0 = rim + 2.0 if t_start is None else float(t_start)
    t1 = t0 + 8.0 if t_stop is None else float(t_stop)
    if hasattr(sol, "x0"):
        ny, nx = sol.values.shape
        hi_x = sol.x0 + (nx - 1) * sol.h
        hi_y = sol.y0 + (ny - 1) * sol.h
        # stay well away from the outer Dirichlet box: its image field
        # steepens the apparent rate within a couple of decay lengths
        margin = max(3.0, 2 * sol.h)
        limit = t1
        for comp, lo, hi, o in ((direction[0], sol.x0, hi_x, origin[0]),
                                (direction[1], sol.y0, hi_y, origin[1])):
            if comp > 0:
                limit = min(limit, (hi - o - margin) / comp)
            elif comp < 0:
                limit = min(limit, (lo - o + margin) / comp)
        t1 = limit
    if t1 <= t0:
        raise InsufficientDecay("ray window collapsed before the fit")

    ts = np.linspace(t0, t1, samples)
    pts = origin[None, :] + ts[:, None] * direction[None, :]
    vals = np.abs(np.asarray(sol.evaluate(pts)))
    usable = vals > _FLOOR
    if int(usable.sum()) < _MIN_SAMPLES:
        raise InsufficientDecay(
            "field underflows along the ray; shrink the window")
    ts = ts[usable]
    vals = vals[usable]
    logv = np.log(vals * np.sqrt(ts))
    slope = np.polyfit(ts, logv, 1)[0]
    return -float(slope)
