"""Exact Liouville solutions from a generating pair (f, g).

Continuum:  e^phi = -4 f'(u-) g'(u+) / (f(u-) - g(u+))^2,  u-+ = x -+ t.
Lattice:    h_eps(x, t) is the cross ratio of f(u- +- eps), g(u+ +- eps);
            chi[m, n] = h_eps(m eps, n eps) solves the discrete equation
            exactly and eps^2 h_eps -> e^{-phi}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .lattice import ZigzagState

TWO_PI = 2 * math.pi


class AdmissibilityViolation(DomainError):
    pass


class MonodromyError(ValueError):
    pass


def _stencil(fn, h=1e-6):
    def d(x):
        return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)
    return d


@dataclass(frozen=True)
class GeneratingPair:
    f: Callable
    g: Callable
    df: Optional[Callable] = None
    dg: Optional[Callable] = None
    L: Optional[float] = None
    T: Optional[np.ndarray] = None
    name: str = "custom"

    def fprime(self, x):
        return (self.df or _stencil(self.f))(x)

    def gprime(self, y):
        return (self.dg or _stencil(self.g))(y)

    def moebius(self, M) -> "GeneratingPair":
        """The pair (M f, M g) for a real 2x2 matrix M acting by fractional-linear maps."""
        (a, b), (c, d) = np.asarray(M, dtype=float)
        f, g, fp, gp = self.f, self.g, self.fprime, self.gprime
        det = a * d - b * c
        T = None
        if self.T is not None:
            Mi = np.linalg.inv(np.asarray(M, dtype=float))
            T = np.asarray(M, dtype=float) @ self.T @ Mi
        return GeneratingPair(
            f=lambda x: (a * f(x) + b) / (c * f(x) + d),
            g=lambda y: (a * g(y) + b) / (c * g(y) + d),
            df=lambda x: det * fp(x) / (c * f(x) + d) ** 2,
            dg=lambda y: det * gp(y) / (c * g(y) + d) ** 2,
            L=self.L, T=T, name=f"{self.name}*M")


@dataclass(frozen=True)
class MoebiusMatrix:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def normalized(cls, m):
        m = np.asarray(m, dtype=float)
        det = float(np.linalg.det(m))
        if det <= 0:
            raise MonodromyError("Moebius matrix must have positive determinant")
        m = m / math.sqrt(det)
        # fix the global sign: first nonzero entry positive
        flat = m.ravel()
        k = int(np.argmax(np.abs(flat) > 1e-14))
        if flat[k] < 0:
            m = -m
        return cls(*m.ravel().tolist())

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __call__(self, w):
        return (self.a * w + self.b) / (self.c * w + self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def equals(self, other, tol=1e-8):
        m1, m2 = self.matrix(), other.matrix()
        return min(np.abs(m1 - m2).max(), np.abs(m1 + m2).max()) <= tol


# --------------------------------------------------------------------------
# catalog

def _exp_sine(lam=1.0, af=0.0, ag=0.0, L=1.0, sf=0.0, sg=0.0, cg=0.0, name="exp"):
    k = TWO_PI / L
    if lam <= k * abs(af) or lam <= k * abs(ag):
        raise ValueError("need lam > 2 pi |a| / L for monotonicity")

    def f(x):
        return np.exp(lam * x + af * np.sin(k * (x + sf)))

    def df(x):
        return f(x) * (lam + af * k * np.cos(k * (x + sf)))

    def g(y):
        return -np.exp(cg + lam * y + ag * np.cos(k * (y + sg)))

    def dg(y):
        return g(y) * (lam - ag * k * np.sin(k * (y + sg)))

    mu = math.exp(lam * L / 2)
    return GeneratingPair(f, g, df, dg, L=L, T=np.diag([mu, 1 / mu]), name=name)


def _tanh_pair():
    return GeneratingPair(
        f=np.tanh, g=lambda y: 2.0 - np.tanh(y),
        df=lambda x: 1.0 / np.cosh(x) ** 2, dg=lambda y: -1.0 / np.cosh(y) ** 2,
        name="tanh")


def catalog():
    base = _exp_sine(1.0, 0.1, 0.1, name="exp_sine")
    cat = {
        "exp": _exp_sine(1.0, name="exp"),
        "exp_sine": base,
        "exp_sine_fast": _exp_sine(2.0, 0.2, -0.15, name="exp_sine_fast"),
        "exp_sine_shift": _exp_sine(1.0, 0.1, 0.12, sf=0.3, sg=-0.2, cg=0.5, name="exp_sine_shift"),
        # affine image with non-diagonal monodromy; the slow growth rate keeps
        # f, g away from 0 over long runs, where the added constant costs digits
        "exp_sine_affine": _exp_sine(0.1, 0.01, 0.012).moebius(
            [[math.sqrt(2), 1 / math.sqrt(2)], [0.0, 1 / math.sqrt(2)]]),
        "tanh": _tanh_pair(),
    }
    object.__setattr__(cat["exp_sine_affine"], "name", "exp_sine_affine")
    return cat


QUASI_PERIODIC = ("exp", "exp_sine", "exp_sine_fast", "exp_sine_shift", "exp_sine_affine")


def get_pair(name) -> GeneratingPair:
    cat = catalog()
    if name not in cat:
        raise KeyError(f"unknown pair {name!r}; known: {sorted(cat)}")
    return cat[name]


# --------------------------------------------------------------------------
# admissibility

def check_admissible(pair, xs=None, ys=None, seed=0, n_random=64):
    """Sampled check of f'(x) g'(y) < 0 and f(x) != g(y); raises on violation."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(-3, 3, 25) if xs is None else np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    xs = np.concatenate([xs, rng.uniform(-3, 3, n_random)])
    ys = np.concatenate([ys, rng.uniform(-3, 3, n_random)])
    fpx, gpy = pair.fprime(xs), pair.gprime(ys)
    if not np.all(fpx[:, None] * gpy[None, :] < 0):
        raise AdmissibilityViolation("f'(x) g'(y) < 0 fails on the sample grid")
    fx, gy = pair.f(xs), pair.g(ys)
    if np.any(np.isclose(fx[:, None], gy[None, :], rtol=0, atol=1e-300)):
        raise AdmissibilityViolation("f(x) = g(y) on the sample grid")
    return {"grid": [float(xs.min()), float(xs.max()), int(xs.size)], "seed": seed}


def liouville_exact(pair, x, t):
    um, up = x - t, x + t
    fp, gp = pair.fprime(um), pair.gprime(up)
    if np.any(fp * gp >= 0):
        raise AdmissibilityViolation("f'(x-t) g'(x+t) < 0 violated")
    diff = pair.f(um) - pair.g(up)
    if np.any(diff == 0):
        raise AdmissibilityViolation("f(x-t) = g(x+t)")
    return -4 * fp * gp / diff ** 2


def h_eval(pair, epsilon, x, t):
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    um, up = x - t, x + t
    fpl, fmi = pair.f(um + epsilon), pair.f(um - epsilon)
    gpl, gmi = pair.g(up + epsilon), pair.g(up - epsilon)
    den = (fpl - fmi) * (gpl - gmi)
    num = (fpl - gpl) * (fmi - gmi)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -num / den
    if np.any(~(h > 0)) or np.any(~np.isfinite(h)):
        raise AdmissibilityViolation("cross ratio not positive: pair not admissible here")
    return h


# --------------------------------------------------------------------------
# lattice sampling

def period_for(pair, epsilon, N, tol=1e-12):
    """M with epsilon = L M / N (rational spacing), or raise."""
    if pair.L is None:
        raise DomainError("periodic sampling needs a quasi-periodic pair")
    r = epsilon * N / pair.L
    M = round(r)
    if M < 1 or abs(r - M) > tol * max(1.0, r):
        raise DomainError(f"epsilon={epsilon} is not L*M/N for integer M with N={N}")
    if math.gcd(M, N) != 1:
        raise DomainError(f"M={M} and N={N} must be coprime")
    return M


def epsilon_for(pair, M, N):
    return float(Fraction(M, N) * Fraction(pair.L).limit_denominator(10 ** 9))


def sample_rows(pair, epsilon, ms, ns):
    ms = np.asarray(ms, dtype=float)
    ns = np.asarray(ns, dtype=float)
    return h_eval(pair, epsilon, ms[None, :] * epsilon, ns[:, None] * epsilon)


def sample_lattice(pair, epsilon, N, time_origin=0) -> ZigzagState:
    """N-periodic state chi[m, n] = h_eps(m eps, n eps) on rows n0 - 1, n0."""
    period_for(pair, epsilon, N)
    ms = np.arange(2 * N)
    rows = sample_rows(pair, epsilon, ms, [time_origin - 1, time_origin])
    return ZigzagState(N, rows[0], rows[1], time_origin)


# --------------------------------------------------------------------------
# continuum limit, monodromy, PDE check

def continuum_limit_probe(pair, x, t, epsilons):
    eps = [float(e) for e in epsilons]
    if any(e2 >= e1 for e1, e2 in zip(eps[:-1], eps[1:])) or min(eps) <= 0:
        raise ValueError("epsilons must be positive and decreasing")
    target = 1.0 / liouville_exact(pair, x, t)
    errs = [abs(e * e * h_eval(pair, e, x, t) - target) for e in eps]
    return list(zip(eps, errs))


def convergence_slope(probe):
    e = np.log([p[0] for p in probe])
    r = np.log([p[1] for p in probe])
    return float(np.polyfit(e, r, 1)[0])


def monodromy(pair, n_check=12, tol=1e-8) -> MoebiusMatrix:
    if pair.L is None:
        raise MonodromyError("pair has no quasi-period")
    L = pair.L
    xs = np.linspace(0, L, 64, endpoint=False)
    fx = pair.f(xs)
    order = np.argsort(fx)
    base = [order[0], order[len(order) // 2], order[-1]]
    F, G = fx[base], pair.f(xs[base] + L)
    A = np.column_stack([F, np.ones(3), -F * G, -G])
    _, sv, vt = np.linalg.svd(A)
    if sv[-1] < 1e-12 * sv[0]:
        raise MonodromyError("degenerate base points for the Moebius solve")
    T = MoebiusMatrix.normalized(vt[-1].reshape(2, 2))
    probe = np.linspace(0.05 * L, 0.95 * L, n_check) + 0.37 * L
    for fn, label in ((pair.f, "f"), (pair.g, "g")):
        got = T(fn(probe))
        want = fn(probe + L)
        if np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))) > tol:
            raise MonodromyError(f"monodromy fails to describe {label}(x + L)")
    return T


def phi(pair, x, t):
    return np.log(liouville_exact(pair, x, t))


def pde_residual(pair, xs, ts, h=1e-3):
    """max |phi_tt - phi_xx + 2 e^phi| with central differences of step h."""
    X, T = np.meshgrid(np.asarray(xs, float), np.asarray(ts, float))
    check_admissible(pair)
    p0 = phi(pair, X, T)
    ptt = (phi(pair, X, T + h) - 2 * p0 + phi(pair, X, T - h)) / h ** 2
    pxx = (phi(pair, X + h, T) - 2 * p0 + phi(pair, X - h, T)) / h ** 2
    return float(np.max(np.abs(ptt - pxx + 2 * np.exp(p0))))
