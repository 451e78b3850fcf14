"""Integration paths that separate two families of pole cones.

The integrands built from phi_b have poles on cones
``apex - i(m b + n/b)`` (opening downwards) and ``apex + i(m b + n/b)``
(opening upwards), m, n >= 0.  A valid path keeps every downward cone
below it and every upward cone above it, and leaves to infinity inside
the sectors where the large-|x| behaviour of phi_b is a pure exponential:
``|arg x| < pi/2 - arg b`` on the right, ``|arg x - pi| < pi/2 - arg b`` on
the left.

The path is a straight separating line, cut at two points, continued by
rays whose angles are picked to maximise decay of the known tail
exponent ``exp(i pi c2 x^2 + 2 pi i kappa x)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError
from .quadrature import Ray, Segment

SECTOR_MARGIN = 0.15  # fraction of the sector half-width kept free


@dataclass(frozen=True)
class TailSpec:
    """Leading exponent of the integrand at one end of the path."""
    kappa: complex = 0j
    c2: float = 0.0

    def decay(self, theta, r=8.0):
        x = r * cmath.exp(1j * theta)
        return -(1j * math.pi * self.c2 * x * x + 2j * math.pi * self.kappa * x).real


def _cone_distance(p, apex, sign, b):
    """Distance from p to the cone apex + sign*i*(m b + n/b) hull."""
    d1 = sign * 1j * b
    d2 = sign * 1j / b
    w = p - apex
    det = (d1.real * d2.imag - d1.imag * d2.real)
    if abs(det) > 1e-12:
        al = (w.real * d2.imag - w.imag * d2.real) / det
        be = (d1.real * w.imag - d1.imag * w.real) / det
        if al >= 0 and be >= 0:
            return 0.0
    best = abs(w)
    for d in (d1, d2):
        u = d / abs(d)
        t = (w * u.conjugate()).real
        if t > 0:
            best = min(best, abs(w - t * u))
    return best


def tail_angle(spec, side, b, margin=SECTOR_MARGIN):
    """Best decaying direction inside the allowed sector on one side."""
    half = math.pi / 2 - abs(cmath.phase(b))
    lim = half * (1 - margin)
    centre = 0.0 if side == "right" else math.pi
    grid = centre + np.linspace(-lim, lim, 181)
    scores = np.array([spec.decay(t) for t in grid])
    k = int(np.argmax(scores))
    if scores[k] <= 1e-3:
        raise AdmissibilityError(
            f"no decaying direction for the {side} tail (exponent {spec.kappa}, {spec.c2})",
            violated=f"{side}-tail decay")
    # back off from the sector edge when the gain is marginal
    good = np.nonzero(scores >= 0.5 * scores[k])[0]
    k2 = good[np.argmin(np.abs(grid[good] - centre))]
    return float(grid[k2])


def separating_line(b, down, up, clearance=None):
    """Direction psi and offset point of a line with down-cones below it."""
    half = math.pi / 2 - abs(cmath.phase(b))
    lim = half * (1 - SECTOR_MARGIN)
    best = None
    for psi in np.concatenate([[0.0], np.linspace(-lim, lim, 61)]):
        rot = cmath.exp(-1j * psi)
        hd = [(z * rot).imag for z in down]
        hu = [(z * rot).imag for z in up]
        lo = max(hd) if hd else None
        hi = min(hu) if hu else None
        if lo is None and hi is None:
            gap, level = math.inf, 0.0
        elif lo is None:
            gap, level = math.inf, hi - (clearance or 0.3)
        elif hi is None:
            gap, level = math.inf, lo + (clearance or 0.3)
        else:
            gap, level = hi - lo, 0.5 * (lo + hi)
        if psi == 0.0 and gap > 0.2:
            return 0.0, level
        if best is None or gap > best[0] + 1e-9:
            best = (gap, psi, level)
    if best[0] <= 0:
        raise AdmissibilityError("pole cones cannot be separated by a line",
                                 violated="cone separation")
    return float(best[1]), float(best[2])


def build_path(b, down, up, left: TailSpec, right: TailSpec, clearance=None, min_gap=0.05,
               level=None):
    """Separating path with decaying tails.

    A given ``level`` forces the horizontal line Im x = level.
    """
    b = complex(b)
    down = [complex(z) for z in down]
    up = [complex(z) for z in up]
    if level is None:
        psi, level = separating_line(b, down, up, clearance)
    else:
        psi = 0.0
    d = cmath.exp(1j * psi)
    rot = cmath.exp(-1j * psi)
    pts = down + up
    centre = sum(((z * rot).real for z in pts), 0.0) / max(1, len(pts))
    origin = (centre + 1j * level) * d
    for a in down:
        if (a * rot).imag > level - min_gap:
            raise AdmissibilityError("path too close to a pole", violated="cone separation")
    for a in up:
        if (a * rot).imag < level + min_gap:
            raise AdmissibilityError("path too close to a pole", violated="cone separation")
    th_r = tail_angle(right, "right", b)
    th_l = tail_angle(left, "left", b)
    cones = [(a, -1) for a in down] + [(a, 1) for a in up]
    spread = max([abs((z * rot).real - centre) for z in pts] + [0.0])

    def clear(start, theta):
        ts = np.concatenate([np.linspace(0, 4, 17), np.geomspace(4, 400, 40)])
        e = cmath.exp(1j * theta)
        return all(_cone_distance(start + t * e, a, s, b) > 0.2 for t in ts for a, s in cones)

    T = spread + 1.0
    for _ in range(40):
        pr, pl = origin + T * d, origin - T * d
        if clear(pr, th_r) and clear(pl, th_l):
            break
        T *= 1.3
    else:
        raise AdmissibilityError("could not route tails around pole cones",
                                 violated="tail routing")
    return [Ray(pl, th_l, incoming=True), Segment(pl, pr), Ray(pr, th_r)]
