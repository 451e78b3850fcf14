"""Integral identities of phi_b checked by quadrature against closed forms.

Integrands are evaluated in log form (sums of ``log_eval`` values) and
integrated along paths from :mod:`dliouville.contours`.  Every public
quadrature routine returns a :class:`Quad` with the value and the
quadrature statistics, so residual reports can carry them.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import qdilog
from .contours import TailSpec, build_path
from .errors import AdmissibilityError, PoleError
from .qdilog import CouplingParams, QuadratureSpec
from .quadrature import integrate

PI = math.pi
EPS_FLOOR = 1e-300
REPORT_SCHEMA = "dliouville.identity-report/1"


class IdentityId(str, enum.Enum):
    inversion = "inversion"
    shift_b = "shift_b"
    shift_binv = "shift_binv"
    unitarity = "unitarity"
    raman = "raman"
    ramanbar = "ramanbar"
    fourier_plus = "fourier_plus"
    fourier_minus = "fourier_minus"
    fourier_inverse = "fourier_inverse"
    heine = "heine"
    euler_heine = "euler_heine"
    saalschutz = "saalschutz"
    saalschutz_limit = "saalschutz_limit"
    psi_consistency = "psi_consistency"


# residual tolerances used by the default suites
TOLERANCES = {
    IdentityId.inversion: 1e-8, IdentityId.shift_b: 1e-8, IdentityId.shift_binv: 1e-8,
    IdentityId.unitarity: 1e-8, IdentityId.raman: 1e-6, IdentityId.ramanbar: 1e-6,
    IdentityId.fourier_plus: 1e-6, IdentityId.fourier_minus: 1e-6,
    IdentityId.fourier_inverse: 1e-5, IdentityId.heine: 1e-5, IdentityId.euler_heine: 1e-5,
    IdentityId.saalschutz: 1e-4, IdentityId.saalschutz_limit: 1e-4,
    IdentityId.psi_consistency: 1e-6,
}


@dataclass(frozen=True)
class IntegralOptions:
    """Tolerances of the outer (path) quadrature."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_intervals: int = 6000
    inner: QuadratureSpec = field(default_factory=QuadratureSpec)


DEFAULT_OPTIONS = IntegralOptions()


@dataclass
class Quad:
    value: complex
    error: float
    evaluations: int
    intervals: int

    def stats(self):
        return {"error": self.error, "evaluations": self.evaluations, "intervals": self.intervals}


def residual(lhs, rhs):
    return float(abs(lhs - rhs) / (abs(lhs) + abs(rhs) + EPS_FLOOR))


def _lphi(params, z, opts):
    return qdilog.log_eval(params, z, opts.inner)


def _phi(params, z, opts=DEFAULT_OPTIONS):
    return complex(np.exp(_lphi(params, z, opts)))


def _integrate(log_f, path, opts):
    res = integrate(lambda x: np.exp(log_f(x)), path, abs_tol=opts.abs_tol,
                    rel_tol=opts.rel_tol, max_intervals=opts.max_intervals)
    return Quad(res.value, res.error, res.evaluations, res.intervals)


def _check(cond, msg, violated):
    if not cond:
        raise AdmissibilityError(msg, violated=violated)


# --------------------------------------------------------------------------
# Ramanujan-type integral Psi(u, v, w)

def psi_closed(params: CouplingParams, u, v, w, variant="res1", opts=DEFAULT_OPTIONS):
    """Closed form of int phi(x+u)/phi(x+v) e^{2 pi i w x} dx."""
    cb = params.c_b
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    if variant == "res1":
        lg = (L(u - v + cb) + L(-w - cb) - L(u - v - w + cb)
              - 2j * PI * w * (v - cb) - params.log_zeta_o)
    elif variant == "res2":
        lg = (L(v + w - u - cb) - L(v - u - cb) - L(w + cb)
              - 2j * PI * w * (u + cb) + params.log_zeta_o)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return cmath.exp(lg)


def psi_admissible(params, u, v, w):
    """Enlarged domain: |arg(i z)| < pi - arg b for z in {w, u-v-w, v-u-2c_b}."""
    ab = abs(cmath.phase(params.b))
    for name, z in (("w", w), ("u-v-w", u - v - w), ("v-u-2c_b", v - u - 2 * params.c_b)):
        if z == 0 or not abs(cmath.phase(1j * z)) < PI - ab:
            return False, f"|arg(i({name}))| < pi - arg b"
    return True, None


def psi_integral(params: CouplingParams, u, v, w, opts=DEFAULT_OPTIONS) -> Quad:
    ok, why = psi_admissible(params, u, v, w)
    _check(ok, "Psi(u,v,w) outside its convergence domain", why)
    cb = params.c_b
    path = build_path(params.b, down=[-u - cb], up=[cb - v],
                      left=TailSpec(kappa=w), right=TailSpec(kappa=w - u + v))

    def lf(x):
        return _lphi(params, x + u, opts) - _lphi(params, x + v, opts) + 2j * PI * w * x

    return _integrate(lf, path, opts)


# --------------------------------------------------------------------------
# Fourier transforms of phi_b^{+-1}

def fourier_closed(params: CouplingParams, w, sign=+1, form=0, opts=DEFAULT_OPTIONS):
    cb, lzo = params.c_b, params.log_zeta_o
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    if sign > 0:
        lg = (-2j * PI * w * cb + lzo - L(w + cb)) if form == 0 else \
            (1j * PI * w * w - lzo + L(-w - cb))
    else:
        lg = (2j * PI * w * cb - lzo + L(-w - cb)) if form == 0 else \
            (-1j * PI * w * w + lzo - L(w + cb))
    return cmath.exp(lg)


def fourier_integral(params: CouplingParams, w, sign=+1, opts=DEFAULT_OPTIONS) -> Quad:
    """int phi(x)^{sign} e^{2 pi i w x} dx."""
    cb = params.c_b
    if sign > 0:
        down, up, right = [-cb], [], TailSpec(kappa=w, c2=-1.0)
    else:
        down, up, right = [], [cb], TailSpec(kappa=w, c2=1.0)
    path = build_path(params.b, down, up, left=TailSpec(kappa=w), right=right,
                      clearance=0.5 * cb.imag)

    def lf(x):
        return sign * _lphi(params, x, opts) + 2j * PI * w * x

    return _integrate(lf, path, opts)


def fourier_inverse(params: CouplingParams, x, sign=+1, opts=DEFAULT_OPTIONS) -> Quad:
    """int Phi_sign(y) e^{-2 pi i x y} dy with the pole at y = 0 passed below."""
    cb, lzo = params.c_b, params.log_zeta_o
    if sign > 0:
        left, right = TailSpec(kappa=-x - cb), TailSpec(kappa=-x, c2=1.0)

        def lf(y):
            return -2j * PI * y * cb + lzo - _lphi(params, y + cb, opts) - 2j * PI * x * y
    else:
        left, right = TailSpec(kappa=-x, c2=-1.0), TailSpec(kappa=-x + cb)

        def lf(y):
            return 2j * PI * y * cb - lzo + _lphi(params, -y - cb, opts) - 2j * PI * x * y
    path = build_path(params.b, down=[], up=[0j], left=left, right=right,
                      clearance=0.5 * params.pole_gap() / PI)
    return _integrate(lf, path, opts)


# --------------------------------------------------------------------------
# Psi_n and the hypergeometric-type identities

def ihg_admissible(params, a, bvals, w):
    a = [complex(t) for t in a]
    bb = [complex(t) for t in bvals] + [0j]
    cb = params.c_b
    if len(bb) != len(a):
        raise ValueError("need len(bvals) == len(a) - 1")
    for j, t in enumerate(bvals):
        if not complex(t).imag > 0:
            return False, f"Im b_{j + 1} > 0"
    for j, t in enumerate(a):
        if not (cb - t).imag > 0:
            return False, f"Im(c_b - a_{j + 1}) > 0"
    lo = sum((bj - aj - cb).imag for aj, bj in zip(a, bb))
    if not lo < (w - cb).imag:
        return False, "sum Im(b_j - a_j - c_b) < Im(w - c_b)"
    if not (w - cb).imag < 0:
        return False, "Im(w - c_b) < 0"
    return True, None


def ihg(params: CouplingParams, a, bvals, w, opts=DEFAULT_OPTIONS) -> Quad:
    """Psi_n(a; bvals; w); the last numerator parameter is +i0."""
    a = [complex(t) for t in a]
    bb = [complex(t) for t in bvals]
    w = complex(w)
    ok, why = ihg_admissible(params, a, bb, w)
    _check(ok, f"Psi_{len(a)} parameters not admissible", why)
    cb = params.c_b
    bfull = bb + [0j]
    kap_right = w - cb - sum(bj - cb - aj for aj, bj in zip(a, bfull))
    path = build_path(params.b, down=[-t for t in bfull], up=[cb - t for t in a],
                      left=TailSpec(kappa=w - cb), right=TailSpec(kappa=kap_right))

    def lf(x):
        out = 2j * PI * x * (w - cb)
        for aj, bj in zip(a, bfull):
            out = out + _lphi(params, x + bj - cb, opts) - _lphi(params, x + aj, opts)
        return out

    return _integrate(lf, path, opts)


def raman_closed(params, a, w, opts=DEFAULT_OPTIONS):
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    return cmath.exp(params.log_zeta_o + L(a + w - params.c_b) - L(a) - L(w))


def ramanbar_integral(params: CouplingParams, a, w, opts=DEFAULT_OPTIONS) -> Quad:
    """int phi(x+a)/phi(x+c_b-i0) e^{-2 pi i x(w+c_b)} dx (contour below 0)."""
    cb = params.c_b
    _check((a + cb).imag > 0, "ramanbar needs Im(a + c_b) > 0", "Im(a + c_b) > 0")
    path = build_path(params.b, down=[-a - cb], up=[0j],
                      left=TailSpec(kappa=-(w + cb)), right=TailSpec(kappa=-(w + cb) - a + cb))

    def lf(x):
        return _lphi(params, x + a, opts) - _lphi(params, x + cb, opts) - 2j * PI * x * (w + cb)

    return _integrate(lf, path, opts)


def ramanbar_closed(params, a, w, opts=DEFAULT_OPTIONS):
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    return cmath.exp(-params.log_zeta_o + L(a) + L(w) - L(a + w + params.c_b))


def saalschutz_closed(params, a, b, c, d, opts=DEFAULT_OPTIONS):
    cb = params.c_b
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    lg = (3 * params.log_zeta_o + 1j * PI * d * (2 * cb - d)
          + L(a + b - d - cb) + L(b + c - d - cb) + L(c + a - d - cb)
          - L(a) - L(b) - L(c) - L(a - d) - L(b - d) - L(c - d))
    return cmath.exp(lg)


def saalschutz_limit_closed(params, a, b, d, opts=DEFAULT_OPTIONS):
    cb = params.c_b
    L = lambda z: complex(_lphi(params, z, opts))  # noqa: E731
    lg = (3 * params.log_zeta_o + 1j * PI * d * (2 * cb - d) + L(a + b - d - cb)
          - L(a) - L(b) - L(a - d) - L(b - d))
    return cmath.exp(lg)


# --------------------------------------------------------------------------
# sampling

@dataclass
class SamplePoint:
    values: dict
    certificate: str = ""

    def __getitem__(self, k):
        return self.values[k]

    def to_json(self):
        return {k: _cjson(v) for k, v in self.values.items()}


def _cjson(v):
    if isinstance(v, (list, tuple)):
        return [_cjson(t) for t in v]
    v = complex(v)
    return [v.real, v.imag]


def _rand_c(rng, re, im):
    return complex(rng.uniform(*re), rng.uniform(*im))


def _admissible(idn, params, p, margin):
    """(ok, reason) for a raw parameter dict."""
    cb = params.c_b
    h = cb.imag
    m = margin * h
    if idn in (IdentityId.inversion, IdentityId.shift_b, IdentityId.shift_binv):
        return True, None
    if idn == IdentityId.unitarity:
        return params.unitary, "(1 - |b|) Im b = 0"
    if idn == IdentityId.raman:
        return _ihg_margin(params, [p["a"]], [], p["w"], m)
    if idn == IdentityId.ramanbar:
        a, w = p["a"], p["w"]
        # the equivalent Psi_1(-a; -w) window
        ok, why = _ihg_margin(params, [-a], [], -w, m)
        return ok, why
    if idn in (IdentityId.fourier_plus, IdentityId.fourier_minus):
        w = p["w"]
        return w.imag < -m, "Im w < 0"
    if idn == IdentityId.fourier_inverse:
        return True, None
    if idn == IdentityId.psi_consistency:
        u, v, w = p["u"], p["v"], p["w"]
        conds = [((u + cb).imag > m, "Im(u + c_b) > 0"), ((cb - v).imag > m, "Im(c_b - v) > 0"),
                 ((u - v).imag + m < w.imag, "Im(u - v) < Im w"), (w.imag < -m, "Im w < 0")]
        for ok, why in conds:
            if not ok:
                return False, why
        return True, None
    if idn in (IdentityId.heine, IdentityId.euler_heine):
        a, b, c, w = p["a"], p["b"], p["c"], p["w"]
        ok, why = _ihg_margin(params, [a, b], [c], w, m)
        if not ok:
            return ok, why
        if idn == IdentityId.heine:
            return _ihg_margin(params, [c - b, w], [a + w], b, m)
        return _ihg_margin(params, [c - a, c - b], [c], a + b + w - c, m)
    if idn == IdentityId.saalschutz:
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        return _ihg_margin(params, [a, b, c], [d, a + b + c - d - cb], -cb, m)
    if idn == IdentityId.saalschutz_limit:
        a, b, d = p["a"], p["b"], p["d"]
        ok, why = _ihg_margin(params, [a, b], [d], -cb, m)
        if not ok:
            return ok, why
        c = p.get("c_surrogate", -30.0)
        return _ihg_margin(params, [a, b, c], [d, a + b + c - d - cb], -cb, m)
    raise ValueError(idn)


def _ihg_margin(params, a, bvals, w, m):
    cb = params.c_b
    for j, t in enumerate(bvals):
        if not t.imag > m:
            return False, f"Im b_{j + 1} > 0"
    for j, t in enumerate(a):
        if not (cb - t).imag > m:
            return False, f"Im(c_b - a_{j + 1}) > 0"
    bb = list(bvals) + [0j]
    lo = sum((bj - aj - cb).imag for aj, bj in zip(a, bb))
    if not lo + m < (w - cb).imag:
        return False, "sum Im(b_j - a_j - c_b) < Im(w - c_b)"
    if not (w - cb).imag < -m:
        return False, "Im(w - c_b) < 0"
    return True, None


def _draw(idn, params, rng):
    h = params.c_b.imag
    R = (-0.6, 0.6)
    if idn in (IdentityId.inversion, IdentityId.shift_b, IdentityId.shift_binv):
        return {"z": _rand_c(rng, (-2, 2), (-0.9 * h, 0.9 * h))}
    if idn == IdentityId.unitarity:
        return {"z": _rand_c(rng, (-2, 2), (-0.9 * h, 0.9 * h))}
    if idn in (IdentityId.raman, IdentityId.ramanbar):
        return {"a": _rand_c(rng, R, (-0.2 * h, 0.8 * h)),
                "w": _rand_c(rng, R, (-0.2 * h, 0.8 * h))}
    if idn in (IdentityId.fourier_plus, IdentityId.fourier_minus):
        return {"w": _rand_c(rng, R, (-0.5 * h, -0.05 * h))}
    if idn == IdentityId.fourier_inverse:
        return {"x": complex(rng.uniform(-0.5, 0.5))}
    if idn == IdentityId.psi_consistency:
        return {"u": _rand_c(rng, R, (-0.5 * h, 0.5 * h)), "v": _rand_c(rng, R, (-0.5 * h, 0.5 * h)),
                "w": _rand_c(rng, R, (-1.0 * h, 0.0))}
    if idn in (IdentityId.heine, IdentityId.euler_heine):
        return {"a": _rand_c(rng, R, (0.0, 0.8 * h)), "b": _rand_c(rng, R, (0.0, 0.8 * h)),
                "c": _rand_c(rng, R, (0.1 * h, 1.2 * h)), "w": _rand_c(rng, R, (0.0, 0.9 * h))}
    if idn == IdentityId.saalschutz:
        return {"a": _rand_c(rng, R, (0.45 * h, 0.8 * h)), "b": _rand_c(rng, R, (0.45 * h, 0.8 * h)),
                "c": _rand_c(rng, R, (0.45 * h, 0.8 * h)), "d": _rand_c(rng, R, (0.1 * h, 0.4 * h))}
    if idn == IdentityId.saalschutz_limit:
        return {"a": _rand_c(rng, R, (0.3 * h, 0.8 * h)), "b": _rand_c(rng, R, (0.3 * h, 0.8 * h)),
                "d": _rand_c(rng, R, (0.1 * h, 0.4 * h)),
                "c_surrogate": complex(-30.0, rng.uniform(0.45 * h, 0.8 * h))}
    raise ValueError(idn)


def sample_points(idn, params: CouplingParams, n: int, seed: int = 0, margin: float = 0.1,
                  max_tries: int = 100000):
    """n seeded, rejection-sampled admissible points for an identity."""
    idn = IdentityId(idn)
    rng = np.random.default_rng([seed, list(IdentityId).index(idn)])
    out = []
    for _ in range(max_tries):
        if len(out) == n:
            break
        p = _draw(idn, params, rng)
        ok, _ = _admissible(idn, params, p, margin)
        if ok and _closed_form_safe(idn, params, p):
            out.append(SamplePoint(p, certificate=f"{idn.value}:margin={margin}"))
    if len(out) < n:
        raise AdmissibilityError(f"could only draw {len(out)} admissible points", violated=idn.value)
    return out


def _closed_form_safe(idn, params, p):
    try:
        _sides(idn, params, SamplePoint(p), DEFAULT_OPTIONS, closed_only=True)
    except (PoleError, AdmissibilityError, OverflowError, ZeroDivisionError):
        return False
    return True


# --------------------------------------------------------------------------
# verification

def _sides(idn, params, point, opts, closed_only=False):
    """(lhs, rhs, stats) for an identity at a sample point."""
    cb = params.c_b
    p = point.values
    phi = lambda z: _phi(params, z, opts)  # noqa: E731
    lphi = lambda z: complex(_lphi(params, z, opts))  # noqa: E731

    def quad(fn, *args):
        if closed_only:
            return Quad(0j, 0.0, 0, 0)
        return fn(*args)

    if idn == IdentityId.inversion:
        z = p["z"]
        lhs = phi(z) * phi(-z)
        return lhs, cmath.exp(-1j * PI * z * z) * params.zeta_inv, {}
    if idn in (IdentityId.shift_b, IdentityId.shift_binv):
        z = p["z"]
        s = params.b if idn == IdentityId.shift_b else 1 / params.b
        lhs = lphi(z + 0.5j * s)
        rhs = lphi(z - 0.5j * s) + np.log1p(cmath.exp(2 * PI * z * s))
        return cmath.exp(lhs), cmath.exp(rhs), {}
    if idn == IdentityId.unitarity:
        _check(params.unitary, "unitarity needs real b or |b| = 1", "(1 - |b|) Im b = 0")
        z = p["z"]
        return phi(z).conjugate(), 1 / phi(z.conjugate()), {}
    if idn == IdentityId.raman:
        r = quad(ihg, params, [p["a"]], [], p["w"], opts)
        return r.value, raman_closed(params, p["a"], p["w"], opts), r.stats()
    if idn == IdentityId.ramanbar:
        r = quad(ramanbar_integral, params, p["a"], p["w"], opts)
        return r.value, ramanbar_closed(params, p["a"], p["w"], opts), r.stats()
    if idn in (IdentityId.fourier_plus, IdentityId.fourier_minus):
        sg = 1 if idn == IdentityId.fourier_plus else -1
        r = quad(fourier_integral, params, p["w"], sg, opts)
        return r.value, fourier_closed(params, p["w"], sg, 0, opts), r.stats()
    if idn == IdentityId.fourier_inverse:
        r = quad(fourier_inverse, params, p["x"], +1, opts)
        return r.value, phi(p["x"]), r.stats()
    if idn == IdentityId.psi_consistency:
        r = quad(psi_integral, params, p["u"], p["v"], p["w"], opts)
        return r.value, psi_closed(params, p["u"], p["v"], p["w"], "res1", opts), r.stats()
    if idn == IdentityId.heine:
        a, b, c, w = p["a"], p["b"], p["c"], p["w"]
        r1 = quad(ihg, params, [a, b], [c], w, opts)
        r2 = quad(ihg, params, [c - b, w], [a + w], b, opts)
        pref = cmath.exp(lphi(c - b) - lphi(a))
        return r1.value, pref * r2.value, {"lhs": r1.stats(), "rhs": r2.stats()}
    if idn == IdentityId.euler_heine:
        a, b, c, w = p["a"], p["b"], p["c"], p["w"]
        r1 = quad(ihg, params, [a, b], [c], w, opts)
        r2 = quad(ihg, params, [c - a, c - b], [c], a + b + w - c, opts)
        pref = cmath.exp(lphi(c - b) + lphi(c - a) + lphi(a + b + w - c)
                         - lphi(a) - lphi(b) - lphi(w))
        return r1.value, pref * r2.value, {"lhs": r1.stats(), "rhs": r2.stats()}
    if idn == IdentityId.saalschutz:
        a, b, c, d = p["a"], p["b"], p["c"], p["d"]
        r = quad(ihg, params, [a, b, c], [d, a + b + c - d - cb], -cb, opts)
        return r.value, saalschutz_closed(params, a, b, c, d, opts), r.stats()
    if idn == IdentityId.saalschutz_limit:
        a, b, d = p["a"], p["b"], p["d"]
        c = p.get("c_surrogate", -30.0)
        r = quad(ihg, params, [a, b, c], [d, a + b + c - d - cb], -cb, opts)
        return r.value, saalschutz_limit_closed(params, a, b, d, opts), r.stats()
    raise ValueError(idn)


def verify_identity(idn, params: CouplingParams, point: SamplePoint, opts=DEFAULT_OPTIONS,
                    margin: float = 0.0):
    """Residual |L - R| / (|L| + |R| + floor) of one identity at one point."""
    idn = IdentityId(idn)
    ok, why = _admissible(idn, params, point.values, margin)
    _check(ok, f"{idn.value}: sample point not admissible", why)
    lhs, rhs, _ = _sides(idn, params, point, opts)
    return residual(lhs, rhs)


def verify_identity_full(idn, params, point, opts=DEFAULT_OPTIONS):
    """Residual plus both sides and quadrature statistics."""
    idn = IdentityId(idn)
    ok, why = _admissible(idn, params, point.values, 0.0)
    _check(ok, f"{idn.value}: sample point not admissible", why)
    lhs, rhs, stats = _sides(idn, params, point, opts)
    return {"id": idn.value, "point": point.to_json(), "lhs": _cjson(lhs), "rhs": _cjson(rhs),
            "residual": residual(lhs, rhs), "quadrature": stats}


def saalschutz_surrogate_scan(params, a, b, d, surrogates=(-1.0, -2.0, -4.0, -30.0), c_imag=None,
                              opts=DEFAULT_OPTIONS):
    """Residuals of the c -> -infinity limit at growing |c|."""
    cb = params.c_b
    ci = c_imag if c_imag is not None else 0.6 * cb.imag
    rhs = saalschutz_limit_closed(params, a, b, d, opts)
    out = []
    for c in surrogates:
        cc = complex(c, ci)
        r = ihg(params, [a, b, cc], [d, a + b + cc - d - cb], -cb, opts)
        out.append(residual(r.value, rhs))
    return out


def report_lines(entries, config, **header):
    """JSON lines: one header with the configuration, then one line per entry."""
    head = {**header, "schema": REPORT_SCHEMA, "config": config}
    yield json.dumps(head, sort_keys=True)
    for e in entries:
        yield json.dumps(e, sort_keys=True)


# --------------------------------------------------------------------------
# N = 1 spectral checks: alpha_s, q_s(z), Baxter and Bailey relations

def alpha_log(params: CouplingParams, s, x, eps=0.0, opts=DEFAULT_OPTIONS):
    """log <x|alpha_s> with the +-i0 prescriptions realised as +-i eps."""
    cb = params.c_b
    x = np.asarray(x, dtype=np.complex128)
    return (_lphi(params, s - x - cb + 1j * eps, opts) - _lphi(params, s + x + cb - 1j * eps, opts)
            - 2j * PI * (x + cb) * s)


def alpha_component(params: CouplingParams, s, x, eps=1e-4, opts=DEFAULT_OPTIONS):
    if s < 0:
        raise ValueError("alpha_s needs s >= 0")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    out = np.exp(alpha_log(params, s, x, eps, opts))
    return complex(out) if np.ndim(out) == 0 else out


def _alpha_cones(params, s, eps):
    # alpha_s has poles only on the upward cones from +-s + i eps
    return [s + 1j * eps, -s + 1j * eps]


def q_eigen_transform(params: CouplingParams, s, z, eps=0.0, dip=0.3, opts=DEFAULT_OPTIONS) -> Quad:
    """q_s(z) = int e^{2 pi i x z - i pi x^2} <x|alpha_s> dx.

    The path runs below the poles at +-s + i eps, so eps = 0 gives the
    eps -> 0 limit directly.
    """
    if s < 0:
        raise ValueError("alpha_s needs s >= 0")
    cb = params.c_b
    z = complex(z)
    path = build_path(params.b, down=[], up=_alpha_cones(params, s, eps),
                      left=TailSpec(kappa=z - cb, c2=-2.0), right=TailSpec(kappa=z + cb),
                      clearance=dip)

    def lf(x):
        return 2j * PI * x * z - 1j * PI * x * x + alpha_log(params, s, x, eps, opts)

    return _integrate(lf, path, opts)


def q_eigen_richardson(params, s, z, eps=1e-3, opts=DEFAULT_OPTIONS):
    """Richardson extrapolation eps -> 0 from {eps, eps/2, eps/4} (cross-check)."""
    v = [q_eigen_transform(params, s, z, eps / k, opts=opts).value for k in (1, 2, 4)]
    # first-order error in eps: eliminate O(eps) and O(eps^2)
    r1 = [2 * v[1] - v[0], 2 * v[2] - v[1]]
    return (4 * r1[1] - r1[0]) / 3


def baxter_terms(params: CouplingParams, s, z, opts=DEFAULT_OPTIONS):
    """The four terms of the N = 1 difference equation acting on q_s."""
    b = params.b
    q0 = q_eigen_transform(params, s, z, opts=opts).value
    qm = q_eigen_transform(params, s, z - 1j * b, opts=opts).value
    qp = q_eigen_transform(params, s, z + 1j * b, opts=opts).value
    mult = cmath.exp(1j * PI * b * b - 2 * PI * b * z)
    lam = 2 * cmath.cosh(2 * PI * b * s)
    return mult * qm, qm, qp, -lam * q0


def check_baxter_n1(params: CouplingParams, s, z, opts=DEFAULT_OPTIONS):
    """Relative residual of e^{i pi b^2 - 2 pi b z} q(z-ib) + q(z-ib) + q(z+ib) = 2cosh(2 pi b s) q(z)."""
    t = baxter_terms(params, s, z, opts)
    return float(abs(sum(t)) / (sum(abs(x) for x in t) + EPS_FLOOR))


def bailey_eigenvalue(params: CouplingParams, u, v, s, opts=DEFAULT_OPTIONS):
    lg = (_lphi(params, u + s, opts) + _lphi(params, v + s, opts) + _lphi(params, u - s, opts)
          + _lphi(params, v - s, opts) + 2j * PI * s * s)
    return complex(np.exp(lg))


def _kernel_log(params, U, t, opts):
    """log of int e^{2 pi i w t} phi(w+U)/phi(w) dw, closed form (res1 with v = 0)."""
    cb = params.c_b
    return (_lphi(params, U + cb, opts) + _lphi(params, -t - cb, opts)
            - _lphi(params, U - t + cb, opts) + 2j * PI * t * cb - params.log_zeta_o)


def bailey_apply(params: CouplingParams, u, v, s, x, opts=DEFAULT_OPTIONS, line=None, radius=0.15):
    """<x|Q(u,v)|alpha_s> for real x.

    The inner integral over y runs above the kernel pole at y = x, below
    the poles at y = x - u - v + i(...) and below +-s.  When Im(u+v) > 0
    those conditions cannot hold on one line; we integrate on a line below
    all three and subtract the residue at y = x.
    """
    cb = params.c_b
    U = complex(u + v)
    x = float(x)
    if U.imag <= 0:
        raise AdmissibilityError("Bailey check implemented for Im(u+v) > 0", violated="Im(u+v) > 0")
    down = [-u - cb, -v - cb]  # poles of phi(u+y) phi(v+y)
    lo = max(t.imag for t in down)
    hi = -U.imag
    if line is None:
        line = 0.5 * (lo + hi)
    if not lo < line < hi:
        raise AdmissibilityError("no line between the cones", violated="line placement")
    if radius >= min(U.imag, abs(x - s) if s else 1.0, abs(x + s)):
        raise AdmissibilityError("residue circle would enclose other poles", violated="radius")

    def lg(y):
        return (_lphi(params, u + y, opts) + _lphi(params, v + y, opts) + 1j * PI * y * y
                + alpha_log(params, s, y, 0.0, opts))

    def lf(y):
        return _kernel_log(params, U, x - y, opts) + lg(y)

    # tails: e^{4 pi i c_b y} on the right, e^{-2 pi i c_b y} on the left
    up = [x - U, s + 0j, -s + 0j]
    path = build_path(params.b, down=down, up=up, left=TailSpec(kappa=-cb),
                      right=TailSpec(kappa=2 * cb), level=line)
    main = _integrate(lf, path, opts)
    # residue at y = x by the trapezoid rule on a small circle
    n = 128
    th = 2 * PI * np.arange(n) / n
    yc = x + radius * np.exp(1j * th)
    res = np.mean(np.exp(lf(yc)) * (yc - x))
    inner = main.value - 2j * PI * res
    pref = np.exp(1j * PI * x * x + _lphi(params, u - x, opts) + _lphi(params, v - x, opts))
    return complex(pref * inner), main


def check_bailey_eigen(params: CouplingParams, u, v, s, x_samples, opts=DEFAULT_OPTIONS):
    """Max relative residual of Q(u,v)|alpha_s> = eigenvalue |alpha_s> over x samples."""
    lam = bailey_eigenvalue(params, u, v, s, opts)
    worst = 0.0
    for x in x_samples:
        lhs, _ = bailey_apply(params, u, v, s, x, opts)
        rhs = lam * alpha_component(params, s, x, eps=0.0, opts=opts)
        worst = max(worst, residual(lhs, rhs))
    return worst
