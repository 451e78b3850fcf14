"""Non-compact quantum dilogarithm phi_b(z).

Three evaluation routes are provided and cross-checked in the tests:

* ``eval_integral``: the Fourier-type integral representation
  ``phi_b(z) = exp(-1/4 int e^{-2izx} / (sinh(xb) sinh(x/b) x) dx)``
  on a horizontal line passing above the singularity at x = 0, summed with
  the trapezoid rule (exponentially convergent for analytic integrands);
* ``eval_product``: the ratio of two q-Pochhammer symbols, valid when
  Im b^2 > 0;
* ``eval``: strip reduction through the shift equations followed by one of
  the two routes above.

Internally everything is done on log phi_b, which keeps the shift
prefactors and the product formula free of overflow until the very end.
"""
from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, ModeError, PoleError, SectorError

PI = math.pi
POLE_TOL = 1e-9
_LOG_MAX = 709.0


def _scalar_or_array(fn):
    @functools.wraps(fn)
    def wrapper(params, z, *args, **kwargs):
        arr = np.asarray(z, dtype=np.complex128)
        out = fn(params, arr.reshape(-1), *args, **kwargs)
        if arr.ndim == 0:
            return complex(out[0])
        return out.reshape(arr.shape)
    return wrapper


@dataclass(frozen=True)
class CouplingParams:
    """Coupling b together with the constants derived from it.

    Only Re b > 0 is enforced: the dual coupling 1/b of a point in the
    first quadrant has Im b < 0, and duality checks need it.
    """
    b: complex
    q: complex = field(init=False)
    qbar: complex = field(init=False)
    c_b: complex = field(init=False)
    zeta_inv: complex = field(init=False)
    zeta_o: complex = field(init=False)
    zeta: complex = field(init=False)

    def __post_init__(self):
        b = complex(self.b)
        if not (math.isfinite(b.real) and math.isfinite(b.imag)) or b.real <= 0:
            raise DomainError(f"coupling must have Re b > 0, got {b}")
        c_b = 0.5j * (b + 1 / b)
        setv = functools.partial(object.__setattr__, self)
        setv("b", b)
        setv("q", cmath.exp(1j * PI * b * b))
        setv("qbar", cmath.exp(-1j * PI / (b * b)))
        setv("c_b", c_b)
        setv("zeta_inv", cmath.exp(1j * PI * (1 + 2 * c_b * c_b) / 6))
        setv("zeta_o", cmath.exp(1j * PI * (1 - 4 * c_b * c_b) / 12))
        setv("zeta", cmath.exp(1j * PI * c_b * c_b / 3))
        if not (self.unitary or self.product_convergent):
            raise ModeError(f"b={b} is neither on a unitary line nor has Im b^2 > 0")

    @property
    def unitary(self) -> bool:
        b = self.b
        return abs((1 - abs(b)) * b.imag) < 1e-14

    @property
    def product_convergent(self) -> bool:
        return (self.b * self.b).imag > 1e-14

    @property
    def modes(self):
        out = []
        if self.unitary:
            out.append("unitary")
        if self.product_convergent:
            out.append("product-convergent")
        return tuple(out)

    @property
    def log_zeta_inv(self) -> complex:
        return 1j * PI * (1 + 2 * self.c_b ** 2) / 6

    @property
    def log_zeta_o(self) -> complex:
        return 1j * PI * (1 - 4 * self.c_b ** 2) / 12

    def dual(self) -> "CouplingParams":
        return CouplingParams(1 / self.b)

    def pole_gap(self) -> float:
        """Height of the pole-free band 0 < Im x < gap of the integrand."""
        b = self.b
        return PI * min(b.real, (1 / b).real)


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretisation controls for :func:`eval_integral`.

    ``contour_offset`` and ``tail_cutoff`` left as None are derived from
    the coupling and the batch of arguments.
    """
    contour_offset: float | None = None
    tail_cutoff: float | None = None
    abs_tol: float = 1e-16
    rel_tol: float = 1e-13
    max_subdivisions: int = 6
    extended_precision: bool = False
    strategy: str = "auto"  # for eval(): auto | integral | product

    def offset(self, params: CouplingParams) -> float:
        gap = params.pole_gap()
        delta = 0.5 * gap if self.contour_offset is None else float(self.contour_offset)
        if not 0 < delta < gap:
            raise DomainError(f"contour offset {delta} outside (0, {gap})")
        return delta

    def validate(self, params: CouplingParams):
        self.offset(params)
        if self.tail_cutoff is not None and self.tail_cutoff <= 0:
            raise DomainError("tail cutoff must be positive")
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_subdivisions < 1:
            raise DomainError("tolerances and subdivision limit must be positive")
        if self.strategy not in ("auto", "integral", "product"):
            raise DomainError(f"unknown strategy {self.strategy!r}")


DEFAULT_QUAD = QuadratureSpec()


# --------------------------------------------------------------------------
# integral representation

def integrand(params: CouplingParams, z, x):
    """e^{-2izx} / (sinh(xb) sinh(x/b) x), written to avoid overflow."""
    b = params.b
    x = np.asarray(x, dtype=np.complex128)
    return np.exp(-2j * z * x) * _kernel(b, x)


def _kernel(b, x):
    sig = np.where(x.real >= 0, 1.0, -1.0)
    sx = sig * x
    num = 4.0 * np.exp(-sx * (b + 1 / b))
    den = (1 - np.exp(-2 * sx * b)) * (1 - np.exp(-2 * sx / b)) * x
    return num / den


@functools.lru_cache(maxsize=64)
def _nodes(b, delta, X, h):
    n = int(math.ceil(X / h))
    t = h * np.arange(-n, n + 1)
    x = t + 1j * delta
    w = (-0.25 * h) * _kernel(b, x)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _plan(params, z, quad):
    """Offset, tail cutoff and initial step for a batch of arguments."""
    delta = quad.offset(params)
    gap = params.pole_gap()
    b = params.b
    decay = (b + 1 / b).real - 2 * float(np.max(np.abs(z.imag)))
    if decay <= 0:
        raise DomainError("argument outside the strip |Im z| < Im c_b")
    logtol = -math.log(min(quad.rel_tol, 1e-3))
    re_pos = max(0.0, float(np.max(z.real)))
    re_abs = float(np.max(np.abs(z.real)))
    if quad.tail_cutoff is None:
        X = (logtol + 2 * delta * re_pos + 6.0) / decay
    else:
        X = float(quad.tail_cutoff)
    X = min(X, 600.0 / (b + 1 / b).real)
    d = 0.8 * min(delta, gap - delta)
    h = 2 * PI * d / (logtol + 2 * re_abs * (delta + d) + 4.0)
    return delta, X, h


def _log_phi_integral(params, z, quad):
    z = np.asarray(z, dtype=np.complex128)
    if z.size == 0:
        return z.copy()
    if np.any(np.abs(z.imag) >= params.c_b.imag):
        raise DomainError("eval_integral needs |Im z| < Im c_b")
    if quad.extended_precision:
        return np.array([_log_phi_mp(params, zi, quad) for zi in z])
    delta, X, h = _plan(params, z, quad)
    b = params.b
    prev = None
    for _ in range(quad.max_subdivisions + 1):
        x, w = _nodes(b, delta, X, h)
        cur = kernels.trap_sum(z, x, w)
        if prev is not None:
            err = np.abs(cur - prev)
            if np.all(err <= quad.rel_tol):
                _check_tail(params, z, delta, X, quad)
                return cur
        prev = cur
        h *= 0.5
    raise ConvergenceError(
        f"trapezoid sum did not reach rel_tol={quad.rel_tol} "
        f"after {quad.max_subdivisions} halvings (max error {float(err.max()):.3g})")


def _check_tail(params, z, delta, X, quad):
    end = np.array([X + 1j * delta, -X + 1j * delta])
    mags = np.abs(integrand(params, z[:, None], end[None, :]))
    if np.any(0.25 * mags / params.b.real > max(quad.rel_tol, quad.abs_tol)):
        raise ConvergenceError(f"integrand not negligible at tail cutoff X={X:.4g}")


def _log_phi_mp(params, z, quad):
    import mpmath as mp

    delta, X, _ = _plan(params, np.array([z]), quad)
    with mp.workdps(30):
        b = mp.mpc(params.b)
        zz = mp.mpc(z)

        def f(t):
            x = mp.mpc(t, delta)
            return mp.exp(-2j * zz * x) / (mp.sinh(x * b) * mp.sinh(x / b) * x)

        pts = np.linspace(-X, X, 41).tolist()
        val = mp.quad(f, pts)
    return complex(-val / 4)


@_scalar_or_array
def eval_integral(params: CouplingParams, z, quad: QuadratureSpec | None = None):
    """phi_b(z) from the integral representation; needs |Im z| < Im c_b."""
    quad = quad or DEFAULT_QUAD
    quad.validate(params)
    return np.exp(_log_phi_integral(params, z, quad))


# --------------------------------------------------------------------------
# product representation

def _log_phi_product(params, z, tol=1e-18):
    if not params.product_convergent:
        raise ModeError("product formula needs Im b^2 > 0")
    b, c_b = params.b, params.c_b
    with np.errstate(over="ignore", invalid="ignore"):
        a_num = np.exp(2 * PI * (z - c_b) / b)
        a_den = np.exp(2 * PI * (z + c_b) * b)
    if not (np.all(np.isfinite(a_num)) and np.all(np.isfinite(a_den))):
        raise OverflowError("product formula arguments overflow; reduce |Re z|")
    num = kernels.log_poch(a_num, params.qbar ** 2, tol=tol)
    den = kernels.log_poch(a_den, params.q ** 2, tol=tol)
    fix = _cancelling_pairs(params, z)
    if fix is not None:
        # these points were evaluated again factor by factor; drop the 0/0 values
        idx, J, K, delta = fix
        num[idx] = 0.0
        den[idx] = 0.0
        out = num - den
        out[idx] = _log_phi_product_split(params, z[idx], J, K, delta, tol)
        return out
    if np.any(np.isneginf(den.real)):
        raise PoleError("argument on the pole lattice")
    return num - den


def _cancelling_pairs(params, z, radius=0.25):
    """Points near c_b + i J/b - i K b (J >= 0, K >= 1).

    There numerator factor J and denominator factor K-1 of the product
    both vanish while phi_b stays finite, so the plain ratio loses digits.
    """
    b = params.b
    w = -1j * (z - params.c_b)
    A = np.array([[(1 / b).real, -b.real], [(1 / b).imag, -b.imag]])
    jk = np.linalg.solve(A, np.vstack([w.real, w.imag]))
    J = np.round(jk[0]).astype(np.int64)
    K = np.round(jk[1]).astype(np.int64)
    z0 = params.c_b + 1j * J / b - 1j * K * b
    delta = z - z0
    near = (J >= 0) & (K >= 1) & (np.abs(delta) < radius)
    if not np.any(near):
        return None
    idx = np.nonzero(near)[0]
    return idx, J[idx], K[idx], delta[idx]


def _log_phi_product_split(params, z, J, K, delta, tol):
    """Product formula with the cancelling factor pair replaced by its exact ratio."""
    b = params.b
    yn, yd = params.qbar ** 2, params.q ** 2
    out = np.empty(z.shape, dtype=np.complex128)
    for i in range(z.size):
        an = np.exp(2 * PI * (z[i] - params.c_b) / b)
        ad = np.exp(2 * PI * (z[i] + params.c_b) * b)
        j, k = int(J[i]), int(K[i]) - 1
        head_n = sum(np.log(1 - an * yn ** m) for m in range(j))
        head_d = sum(np.log(1 - ad * yd ** m) for m in range(k))
        tail_n = kernels.log_poch(np.array([an * yn ** (j + 1)]), yn, tol=tol)[0]
        tail_d = kernels.log_poch(np.array([ad * yd ** (k + 1)]), yd, tol=tol)[0]
        d = complex(delta[i])
        # 1 - t_J = -expm1(2 pi d / b), 1 - t'_k = -expm1(2 pi b d)
        ratio = (1 / (b * b) if d == 0
                 else _expm1c(2 * PI * d / b) / _expm1c(2 * PI * b * d))
        out[i] = head_n + tail_n - head_d - tail_d + np.log(ratio)
    return out


def _expm1c(u):
    """expm1 for complex u, accurate for small |u|."""
    if abs(u) > 0.5:
        return cmath.exp(u) - 1
    # e^u - 1 = 2 e^{u/2} sinh(u/2) without the cancellation
    return 2 * cmath.exp(u / 2) * cmath.sinh(u / 2)


@_scalar_or_array
def eval_product(params: CouplingParams, z, rel_tol: float = 1e-18):
    """phi_b(z) as a ratio of q-Pochhammer symbols (requires Im b^2 > 0)."""
    if not params.product_convergent:
        raise ModeError("product formula needs Im b^2 > 0")
    _raise_on_poles(params, z)
    with np.errstate(over="ignore"):
        return np.exp(_log_phi_product(params, z, tol=rel_tol))


# --------------------------------------------------------------------------
# lattice checks

def lattice_distance(params: CouplingParams, z):
    """Distance of each z to the pole set -c_b - i(m b + n/b), m, n >= 0."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    b, bi = params.b, 1 / params.b
    w = 1j * (z + params.c_b)  # poles sit at w = m b + n/b
    det = b.real * bi.imag - bi.real * b.imag
    if abs(det) > 1e-12:
        m = (w.real * bi.imag - bi.real * w.imag) / det
        n = (b.real * w.imag - w.real * b.imag) / det
        best = np.full(z.shape, np.inf)
        for mm in (np.floor(m), np.ceil(m)):
            for nn in (np.floor(n), np.ceil(n)):
                mm_c, nn_c = np.maximum(mm, 0), np.maximum(nn, 0)
                best = np.minimum(best, np.abs(w - mm_c * b - nn_c * bi))
        return best
    # b and 1/b collinear (b real): walk along m
    t, perp = w.real, np.abs(w.imag)
    br, bir = b.real, bi.real
    mmax = int(max(0.0, float(np.max(t))) / br) + 2
    best = np.full(z.shape, np.inf)
    for mm in range(mmax + 1):
        rest = t - mm * br
        nn = np.maximum(np.round(rest / bir), 0)
        best = np.minimum(best, np.hypot(rest - nn * bir, perp))
    return best


def _near(params, z):
    dist = lattice_distance(params, z)
    scale = np.maximum(1.0, np.abs(z))
    return dist <= POLE_TOL * scale


def on_pole_lattice(params, z):
    return _near(params, z)


def on_zero_lattice(params, z):
    return _near(params, -np.asarray(z, dtype=np.complex128))


def _raise_on_poles(params, z):
    hit = on_pole_lattice(params, z)
    if np.any(hit):
        bad = np.atleast_1d(z)[hit][0]
        raise PoleError(f"z={complex(bad)} lies on the pole lattice of phi_b")


# --------------------------------------------------------------------------
# strip reduction

def _log1pexp(u):
    u = np.asarray(u, dtype=np.complex128)
    out = np.empty_like(u)
    big = u.real > 0
    with np.errstate(divide="ignore"):
        out[big] = u[big] + np.log1p(np.exp(-u[big]))
        out[~big] = np.log1p(np.exp(u[~big]))
    return out


def shift_parameter(params: CouplingParams) -> complex:
    """b or 1/b, whichever gives the smaller imaginary drift; ties go to b."""
    b = params.b
    return b if abs(b.imag) <= abs((1 / b).imag) + 1e-15 else 1 / b


def reduce_argument(params, z):
    """Return (z_red, log_prefactor) with log phi(z) = prefactor + log phi(z_red)."""
    s = shift_parameter(params)
    z = np.asarray(z, dtype=np.complex128)
    k = np.round(z.imag / s.real).astype(np.int64)
    pref = np.zeros(z.shape, dtype=np.complex128)
    kmax = int(np.max(np.abs(k))) if k.size else 0
    for j in range(kmax):
        up = k > j
        if np.any(up):
            # phi(w) = (1 + e^{2 pi s (w - i s/2)}) phi(w - i s)
            pref[up] += _log1pexp(2 * PI * s * (z[up] - (j + 0.5) * 1j * s))
        down = k < -j
        if np.any(down):
            pref[down] -= _log1pexp(2 * PI * s * (z[down] + (j + 0.5) * 1j * s))
    return z - k * 1j * s, pref


def _use_product(params, quad):
    if quad.strategy == "product":
        if not params.product_convergent:
            raise ModeError("product strategy needs Im b^2 > 0")
        return True
    if quad.strategy == "integral":
        return False
    return params.product_convergent and abs(params.q) ** 2 < 0.5


@_scalar_or_array
def log_eval(params: CouplingParams, z, quad: QuadratureSpec | None = None):
    """log phi_b(z) on the whole plane (real part -inf on the zero set)."""
    quad = quad or DEFAULT_QUAD
    quad.validate(params)
    _raise_on_poles(params, z)
    zero = on_zero_lattice(params, z)
    out = np.empty(z.shape, dtype=np.complex128)
    out[zero] = -np.inf
    live = ~zero
    if not np.any(live):
        return out
    zr, pref = reduce_argument(params, z[live])
    # large Re z goes through phi(z) phi(-z) = zeta_inv e^{-i pi z^2}: the
    # integral tail and the product arguments both behave at Re z < 0
    if _use_product(params, quad):
        core_fn, flip = _log_phi_product, zr.real > 0.0
    else:
        core_fn, flip = functools.partial(_log_phi_integral, quad=quad), zr.real > 1.0
    core = np.empty_like(zr)
    if np.any(~flip):
        core[~flip] = core_fn(params, zr[~flip])
    if np.any(flip):
        core[flip] = (-1j * PI * zr[flip] ** 2 + params.log_zeta_inv
                      - core_fn(params, -zr[flip]))
    out[live] = pref + core
    return out


@_scalar_or_array
def eval(params: CouplingParams, z, quad: QuadratureSpec | None = None):
    """phi_b(z) anywhere off the pole lattice."""
    lg = log_eval(params, z, quad)
    if np.any(lg.real > _LOG_MAX):
        raise OverflowError("|phi_b(z)| exceeds the double-precision range")
    return np.exp(lg)


# --------------------------------------------------------------------------
# theta function and asymptotics

def theta(z, tau, abs_tol: float = 1e-17):
    """Theta(z; tau) = sum_n exp(i pi tau n^2 + 2 pi i n z)."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError("theta needs Im tau > 0")
    z = complex(z)
    T, Y = tau.imag, abs(z.imag)
    logtol = -math.log(abs_tol)
    # largest |n| whose term can exceed abs_tol relative to the peak term
    nmax = int((2 * PI * Y + math.sqrt((2 * PI * Y) ** 2 + 4 * PI * T * logtol)) / (2 * PI * T)) + 2
    nmax += int(Y / T) + 1
    n = np.arange(-nmax, nmax + 1)
    terms = np.exp(1j * PI * tau * n * n + 2j * PI * n * z)
    return complex(np.sum(terms))


def _pochhammer_self(y):
    return complex(np.exp(kernels.log_poch(np.array([y]), y)[0]))


SECTORS = ("left", "right", "upper", "lower")


def asymptotic(params: CouplingParams, z, threshold: float = 4.0, angle_tol: float = 1e-6):
    """Leading large-|z| behaviour; returns (value, sector tag)."""
    z = complex(z)
    if abs(z) < threshold:
        raise DomainError(f"|z|={abs(z):.3g} below asymptotic threshold {threshold}")
    b = params.b
    ab = cmath.phase(b)
    az = cmath.phase(z)
    edges = [PI / 2 + ab, PI / 2 - ab, -PI / 2 + ab, -PI / 2 - ab]
    for e in edges:
        d = (az - e + PI) % (2 * PI) - PI
        if abs(d) <= angle_tol:
            raise SectorError(f"arg z={az:.6g} on a sector boundary")
    if abs(az) > PI / 2 + ab:
        return 1.0 + 0j, "left"
    if abs(az) < PI / 2 - ab:
        return cmath.exp(-1j * PI * z * z) * params.zeta_inv, "right"
    if abs(az - PI / 2) < ab:
        qb2 = params.qbar ** 2
        val = theta(1j * z / b, -1 / (b * b)) / _pochhammer_self(qb2)
        return val, "upper"
    if abs(az + PI / 2) < ab:
        q2 = params.q ** 2
        return _pochhammer_self(q2) / theta(1j * b * z, b * b), "lower"
    raise SectorError(f"arg z={az:.6g} not inside any sector")
