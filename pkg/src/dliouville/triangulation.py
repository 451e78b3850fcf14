"""Decorated ideal triangulations, Fock coordinates and groupoid words.

A triangle is a triple of vertex labels listed counter-clockwise starting
at its marked corner; side k runs from vertex k to vertex k+1.  Sides are
glued in pairs (interior edges) or are boundary.  Each interior edge carries
one positive Fock coordinate.  Coordinates may be numpy arrays, in which
case every operation acts on all samples at once.

Generators (words are read left to right, i.e. in the order applied):

    w(i,j)     flip of the edge shared by side 1 of i and side 2 of j
    w(i,j)^-1  inverse flip (side 0 of i glued to side 1 of j)
    r(i)       move the marked corner of i one step
    p(...)     relabel triangles: new[k] = old[sigma(k)], sigma in cycle form

An index written ``2v`` (check) or ``2^`` (hat) conjugates the flip by
r(2)^-1 ... r(2) or r(2) ... r(2)^-1 respectively.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError

Side = tuple  # (triangle, side), both 0-based


def _key(s, t):
    return min(s, t)


@dataclass(frozen=True)
class DecoratedTriangulation:
    """Immutable decorated triangulation.

    ``verts[t]`` lists the corners of triangle t+1 from the marked one;
    ``glue[t][k]`` is the partner side of side k or None on the boundary;
    ``coords`` maps the smaller side of each glued pair to its coordinate.
    """
    verts: tuple
    glue: tuple
    coords: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.verts)
        seen = set()
        for t in range(n):
            for k in range(3):
                p = self.glue[t][k]
                if p is None:
                    continue
                if p == (t, k) or self.glue[p[0]][p[1]] != (t, k):
                    raise ConfigurationError(f"gluing is not an involution at side {(t + 1, k)}")
                seen.add(_key((t, k), p))
        if set(self.coords) != seen:
            raise ConfigurationError("coordinates must sit exactly on the interior edges")

    # -- structure ----------------------------------------------------------
    @property
    def size(self):
        return len(self.verts)

    def partner(self, t, k):
        return self.glue[t][k]

    def interior_edges(self):
        return sorted(self.coords)

    def boundary_sides(self):
        return [(t, k) for t in range(self.size) for k in range(3) if self.glue[t][k] is None]

    def coord(self, t, k):
        """Coordinate of the edge on side k of triangle t (0-based)."""
        p = self.glue[t][k]
        if p is None:
            raise KeyError(f"side {(t + 1, k)} is a boundary side")
        return self.coords[_key((t, k), p)]

    def structure(self):
        return (self.verts, self.glue)

    def same_structure(self, other):
        return self.structure() == other.structure()

    def isomorphic(self, other):
        """Equal up to a renaming of the vertices (ordering, corners, gluings kept)."""
        if self.glue != other.glue or self.size != other.size:
            return False
        fwd, back = {}, {}
        for ta, tb in zip(self.verts, other.verts):
            for a, b in zip(ta, tb):
                if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
                    return False
        return True

    def vertex_map(self, other):
        """The renaming taking self to other, assuming they are isomorphic."""
        return {a: b for ta, tb in zip(self.verts, other.verts) for a, b in zip(ta, tb)}

    def with_coords(self, values):
        """Copy with coordinates given in :meth:`interior_edges` order."""
        keys = self.interior_edges()
        if len(values) != len(keys):
            raise ValueError(f"need {len(keys)} coordinates, got {len(values)}")
        return DecoratedTriangulation(self.verts, self.glue, dict(zip(keys, values)))

    def coord_vector(self):
        return [self.coords[k] for k in self.interior_edges()]

    # -- serialization --------------------------------------------------------
    def to_json(self):
        def val(v):
            a = np.asarray(v, dtype=float)
            return float(a) if a.ndim == 0 else a.tolist()
        return {
            "triangles": [{"index": t + 1, "corners": list(v), "marked": 0}
                          for t, v in enumerate(self.verts)],
            "gluings": [[[t + 1, k], [p[0] + 1, p[1]]] for t in range(self.size)
                        for k in range(3) for p in [self.glue[t][k]]
                        if p is not None and (t, k) < p],
            "boundary": [[t + 1, k] for t, k in self.boundary_sides()],
            "coords": [[[t + 1, k], val(self.coords[(t, k)])] for t, k in self.interior_edges()],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        tris = sorted(data["triangles"], key=lambda d: d["index"])
        verts = tuple(tuple(d["corners"][d.get("marked", 0):] + d["corners"][:d.get("marked", 0)])
                      for d in tris)
        glue = [[None] * 3 for _ in verts]
        for (t, k), (u, m) in data["gluings"]:
            glue[t - 1][k] = (u - 1, m)
            glue[u - 1][m] = (t - 1, k)
        coords = {}
        for (t, k), v in data["coords"]:
            p = glue[t - 1][k]
            coords[_key((t - 1, k), p)] = np.asarray(v, dtype=float) if isinstance(v, list) else v
        return cls(tuple(verts), tuple(tuple(g) for g in glue), coords)


def _rebuild(verts, glue, side_values):
    """Triangulation from per-side coordinate values (glued sides must agree)."""
    coords = {}
    for (t, k), v in side_values.items():
        p = glue[t][k]
        if p is not None:
            coords[_key((t, k), p)] = v
    return DecoratedTriangulation(tuple(tuple(v) for v in verts), tuple(tuple(g) for g in glue), coords)


def _side_values(tri):
    out = {}
    for key, v in tri.coords.items():
        out[key] = v
        out[tri.glue[key[0]][key[1]]] = v
    return out


def _remap(tri, side_map, new_verts, extra_glue=(), values=None):
    """Move sides according to side_map (old -> new) and add new gluings."""
    old_vals = _side_values(tri) if values is None else values
    glue = [list(g) for g in tri.glue]
    moved = {}
    for t in range(tri.size):
        for k in range(3):
            moved[(t, k)] = side_map.get((t, k), (t, k))
    newg = [[None] * 3 for _ in range(tri.size)]
    vals = {}
    for s, ns in moved.items():
        p = glue[s[0]][s[1]]
        if s in side_map.get("_drop", ()):
            continue
        newg[ns[0]][ns[1]] = moved[p] if p is not None else None
        if s in old_vals:
            vals[ns] = old_vals[s]
    for (s, t, v) in extra_glue:
        newg[s[0]][s[1]] = t
        newg[t[0]][t[1]] = s
        vals[s] = v
        vals[t] = v
    return _rebuild(new_verts, newg, vals)


def _check_index(tri, i, name="triangle"):
    if not (isinstance(i, (int, np.integer)) and 1 <= i <= tri.size):
        raise IndexError(f"{name} index {i} out of range 1..{tri.size}")
    return int(i) - 1


def rho(tri, i, power=1):
    """Move the marked corner of triangle i; sides (s0, s1, s2) become (s1, s2, s0)."""
    t = _check_index(tri, i)
    for _ in range(power % 3):
        v = tri.verts[t]
        verts = list(tri.verts)
        verts[t] = (v[1], v[2], v[0])
        side_map = {(t, k): (t, (k - 1) % 3) for k in range(3)}
        tri = _remap(tri, side_map, verts)
    return tri


def permute(tri, sigma):
    """Relabel so that new triangle k is old triangle sigma(k) (1-based map or cycles)."""
    perm = as_permutation(sigma, tri.size)
    inv = {old: new for new, old in enumerate(perm)}
    verts = [tri.verts[perm[n]] for n in range(tri.size)]
    side_map = {(t, k): (inv[t], k) for t in range(tri.size) for k in range(3)}
    return _remap(tri, side_map, verts)


def _flip_parts(tri, i, j, s_i, s_j):
    ti, tj = _check_index(tri, i), _check_index(tri, j)
    if ti == tj:
        raise ConfigurationError(f"cannot flip triangle {i} against itself")
    if tri.glue[ti][s_i] != (tj, s_j):
        raise ConfigurationError(
            f"side {s_i} of triangle {i} is not glued to side {s_j} of triangle {j}")
    return ti, tj


def flip(tri, i, j):
    """omega_{i,j}: exchange the diagonal of the quadrilateral formed by i and j.

    With the diagonal e, the neighbours a (i side 2), b (j side 1),
    c (i side 0), d (j side 0) transform as a/(1+1/e), b(1+e), c(1+e),
    d/(1+1/e), and e -> 1/e.
    """
    ti, tj = _flip_parts(tri, i, j, 1, 2)
    x, y = tri.verts[ti], tri.verts[tj]
    vals = _side_values(tri)
    e = vals[(ti, 1)]
    factors = {(ti, 2): 1.0 / (1.0 + 1.0 / e), (tj, 1): 1.0 + e,
               (ti, 0): 1.0 + e, (tj, 0): 1.0 / (1.0 + 1.0 / e)}
    vals = _scale(tri, vals, factors)
    verts = list(tri.verts)
    verts[ti] = (x[0], y[1], x[2])
    verts[tj] = (y[0], y[1], x[0])
    side_map = {(ti, 2): (ti, 2), (tj, 1): (ti, 1), (tj, 0): (tj, 0), (ti, 0): (tj, 2),
                "_drop": ((ti, 1), (tj, 2))}
    return _remap(tri, side_map, verts, [((ti, 0), (tj, 1), 1.0 / e)], vals)


def flip_inverse(tri, i, j):
    """omega_{i,j}^{-1}: undo :func:`flip` (side 0 of i glued to side 1 of j)."""
    ti, tj = _flip_parts(tri, i, j, 0, 1)
    x, y = tri.verts[ti], tri.verts[tj]
    vals = _side_values(tri)
    e = vals[(ti, 0)]
    factors = {(ti, 2): 1.0 + e, (ti, 1): 1.0 / (1.0 + 1.0 / e),
               (tj, 2): 1.0 / (1.0 + 1.0 / e), (tj, 0): 1.0 + e}
    vals = _scale(tri, vals, factors)
    verts = list(tri.verts)
    verts[ti] = (x[0], y[0], x[2])
    verts[tj] = (y[0], x[1], x[2])
    side_map = {(ti, 2): (ti, 2), (ti, 1): (tj, 1), (tj, 0): (tj, 0), (tj, 2): (ti, 0),
                "_drop": ((ti, 0), (tj, 1))}
    return _remap(tri, side_map, verts, [((ti, 1), (tj, 2), 1.0 / e)], vals)


def _scale(tri, vals, factors):
    """Multiply edge values by the factors of every listed side (boundary sides skipped)."""
    mult = {}
    for s, f in factors.items():
        p = tri.glue[s[0]][s[1]]
        if p is None:
            continue
        k = _key(s, p)
        mult[k] = mult[k] * f if k in mult else f
    out = dict(vals)
    for k, m in mult.items():
        v = vals[k] * m
        out[k] = v
        out[tri.glue[k[0]][k[1]]] = v
    return out


# --------------------------------------------------------------------------
# permutations

def as_permutation(sigma, n):
    """0-based tuple perm with new[k] = old[perm[k]].

    ``sigma`` is either such a tuple given 1-based (length n), a dict
    k -> sigma(k), or cycle notation (tuple of tuples / string "(1 2)(3 4)").
    """
    if isinstance(sigma, str):
        sigma = parse_cycles(sigma)
    if isinstance(sigma, dict):
        m = {k: v for k, v in sigma.items()}
    elif len(sigma) and all(isinstance(c, (tuple, list)) for c in sigma):
        m = {}
        for cyc in sigma:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                if a in m:
                    raise ValueError(f"cycles are not disjoint at {a}")
                m[a] = b
    else:
        if len(sigma) != n:
            raise ValueError(f"permutation must have length {n}")
        m = {k + 1: v for k, v in enumerate(sigma)}
    perm = [k for k in range(n)]
    for a, b in m.items():
        if not (1 <= a <= n and 1 <= b <= n):
            raise IndexError(f"permutation entry {a}->{b} out of range 1..{n}")
        perm[a - 1] = b - 1
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation")
    return tuple(perm)


def parse_cycles(s):
    return tuple(tuple(int(x) for x in c.split()) for c in re.findall(r"\(([^()]*)\)", s)
                 if c.strip())


def compose(alpha, beta):
    """alpha o beta on 0-based tuples (the permutation of applying p(alpha) then p(beta))."""
    return tuple(alpha[b] for b in beta)


def cycles_of(perm):
    """1-based cycle form of a 0-based tuple, fixed points dropped."""
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen or perm[s] == s:
            continue
        c, k = [], s
        while k not in seen:
            seen.add(k)
            c.append(k + 1)
            k = perm[k]
        out.append(tuple(c))
    return tuple(out)


# --------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Gen:
    kind: str  # "w", "r" or "p"
    i: int = 0
    j: int = 0
    di: str = ""  # "", "v" (check) or "^" (hat)
    dj: str = ""
    inverse: bool = False
    cycles: tuple = ()

    def inv(self):
        return Gen(self.kind, self.i, self.j, self.di, self.dj, not self.inverse, self.cycles)

    def __str__(self):
        tail = "^-1" if self.inverse else ""
        if self.kind == "w":
            return f"w({self.i}{self.di},{self.j}{self.dj}){tail}"
        if self.kind == "r":
            return f"r({self.i}){tail}"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles) or "()"
        return f"p{body}{tail}"

    def primitives(self):
        """Expansion into undecorated generators, in application order."""
        if self.kind != "w" or not (self.di or self.dj):
            return [self]
        pre, post = [], []
        for idx, dec in ((self.i, self.di), (self.j, self.dj)):
            if dec == "v":
                pre.append(Gen("r", idx, inverse=True))
                post.append(Gen("r", idx))
            elif dec == "^":
                pre.append(Gen("r", idx))
                post.append(Gen("r", idx, inverse=True))
        return pre + [Gen("w", self.i, self.j, inverse=self.inverse)] + post[::-1]


_TOKEN = re.compile(
    r"w\(\s*(\d+)\s*([v^]?)\s*,\s*(\d+)\s*([v^]?)\s*\)(\^-1)?"
    r"|r\(\s*(\d+)\s*\)(\^-1)?"
    r"|p((?:\([^()]*\))+)(\^-1)?"
    r"|\s+")


class GroupoidWord:
    """Sequence of generators, applied left to right."""

    def __init__(self, gens=()):
        self.gens = tuple(gens)

    @classmethod
    def parse(cls, text):
        gens, pos = [], 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ConfigurationError(f"cannot parse word at offset {pos}: {text[pos:pos + 12]!r}",
                                         position=pos)
            pos = m.end()
            if m.group(1):
                gens.append(Gen("w", int(m.group(1)), int(m.group(3)), m.group(2), m.group(4),
                                inverse=bool(m.group(5))))
            elif m.group(6):
                gens.append(Gen("r", int(m.group(6)), inverse=bool(m.group(7))))
            elif m.group(8):
                gens.append(Gen("p", cycles=parse_cycles(m.group(8)), inverse=bool(m.group(9))))
        return cls(gens)

    def __str__(self):
        return " ".join(str(g) for g in self.gens)

    def __repr__(self):
        return f"GroupoidWord({str(self)!r})"

    def __len__(self):
        return len(self.gens)

    def __eq__(self, other):
        return isinstance(other, GroupoidWord) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __add__(self, other):
        return GroupoidWord(self.gens + GroupoidWord.coerce(other).gens)

    def __pow__(self, n):
        base = self if n >= 0 else self.inverse()
        return GroupoidWord(base.gens * abs(n))

    def inverse(self):
        return GroupoidWord(g.inv() for g in reversed(self.gens))

    def expand(self):
        return GroupoidWord(p for g in self.gens for p in g.primitives())

    @staticmethod
    def coerce(w):
        if isinstance(w, GroupoidWord):
            return w
        if isinstance(w, str):
            return GroupoidWord.parse(w)
        return GroupoidWord(w)


def w(i, j, inverse=False):
    """Flip generator; i and j may be strings like "2v" or "3^"."""
    def split(x):
        s = str(x)
        return (int(s[:-1]), s[-1]) if s[-1] in "v^" else (int(s), "")
    (a, da), (b, db) = split(i), split(j)
    return Gen("w", a, b, da, db, inverse)


def r(i, inverse=False):
    return Gen("r", int(i), inverse=inverse)


def p(*cycles, inverse=False):
    return Gen("p", cycles=tuple(tuple(c) for c in cycles if len(c) > 1), inverse=inverse)


def apply_gen(tri, g: Gen):
    if g.kind == "r":
        return rho(tri, g.i, -1 if g.inverse else 1)
    if g.kind == "p":
        perm = as_permutation(g.cycles, tri.size) if g.cycles else tuple(range(tri.size))
        if g.inverse:
            perm = tuple(np.argsort(perm).tolist())
        return permute(tri, [k + 1 for k in perm])
    if g.di or g.dj:
        for prim in g.primitives():
            tri = apply_gen(tri, prim)
        return tri
    return (flip_inverse if g.inverse else flip)(tri, g.i, g.j)


def apply_word(tri, word):
    """Apply the generators in order; errors name the failing position."""
    word = GroupoidWord.coerce(word)
    for pos, g in enumerate(word.gens):
        try:
            tri = apply_gen(tri, g)
        except (ConfigurationError, IndexError, ValueError) as exc:
            raise ConfigurationError(f"generator {pos} ({g}) not applicable: {exc}",
                                     position=pos) from exc
    return tri


# --------------------------------------------------------------------------
# relation checks


@dataclass
class RelationResult:
    ok: bool
    deviation: float
    combinatorics: bool
    samples: int
    detail: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "deviation": self.deviation, "combinatorics": self.combinatorics,
                "samples": self.samples, "detail": self.detail}


def random_coords(tri, n, seed=0, spread=2.0):
    """tri with n log-uniform positive samples in [e^-spread, e^spread] per edge."""
    rng = np.random.default_rng(seed)
    vals = np.exp(rng.uniform(-spread, spread, size=(len(tri.coords), n)))
    return tri.with_coords(list(vals))


def coord_deviation(a, b):
    """Max relative difference of two coordinate assignments on equal structures."""
    dev = 0.0
    for k in a.coords:
        x, y = np.asarray(a.coords[k]), np.asarray(b.coords[k])
        dev = max(dev, float(np.max(np.abs(x - y) / np.maximum(np.abs(x), np.abs(y)))))
    return dev


def check_relation(lhs, rhs, tri, n_coord_samples=100, seed=0, tol=1e-12, up_to_relabel=False):
    """Do two words define the same morphism out of tri?

    Both final triangulations must coincide exactly (vertex labels, ordering,
    marked corners, gluings); with ``up_to_relabel`` only up to renaming the
    vertices.  Coordinates are compared on random positive samples.
    """
    start = random_coords(tri, n_coord_samples, seed)
    a = apply_word(start, lhs)
    b = apply_word(start, rhs)
    same = a.isomorphic(b) if up_to_relabel else a.same_structure(b)
    if not same:
        return RelationResult(False, float("inf"), False, n_coord_samples,
                              "final triangulations differ")
    dev = coord_deviation(a, b)
    return RelationResult(dev <= tol, dev, True, n_coord_samples)


# --------------------------------------------------------------------------
# small configurations used by the relation checks


def pentagon():
    """Three triangles fanned around vertex 4 of a pentagon with vertices 1..5.

    i = (5, 1, 4), j = (1, 2, 4), k = (2, 3, 4); side 1 of i meets side 2 of j
    and side 1 of j meets side 2 of k.  Sides on the pentagon are boundary.
    """
    verts = ((5, 1, 4), (1, 2, 4), (2, 3, 4))
    glue = [[None] * 3 for _ in verts]
    for s, t in (((0, 1), (1, 2)), ((1, 1), (2, 2))):
        glue[s[0]][s[1]] = t
        glue[t[0]][t[1]] = s
    return DecoratedTriangulation(verts, tuple(tuple(g) for g in glue),
                                  {(0, 1): 1.0, (1, 1): 1.0})


def quadrilateral():
    """Two triangles in the flip position, all outer sides boundary."""
    verts = ((0, 1, 3), (1, 2, 3))
    glue = ((None, (1, 2), None), (None, None, (0, 1)))
    return DecoratedTriangulation(verts, glue, {(0, 1): 1.0})


def annulus(N):
    """Triangulated annulus with N marked points on each boundary circle.

    Bottom points A_1..A_N are labelled 0..N-1, top points B_1..B_N are
    N..2N-1.  Triangle 2j-1 = (B_j, A_j, A_{j+1}) and triangle
    2j = (A_{j+1}, B_{j+1}, B_j), marked at the first corner.  The interior
    edge f_{2j-1} is side 0 of triangle 2j-1 (the segment A_j B_j) and
    f_{2j} is its side 2 (the diagonal A_{j+1} B_j).  Side 1 of every
    triangle is a boundary segment.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    A = lambda j: (j - 1) % N
    B = lambda j: N + (j - 1) % N
    verts, glue = [], [[None] * 3 for _ in range(2 * N)]
    for j in range(1, N + 1):
        verts.append((B(j), A(j), A(j + 1)))
        verts.append((A(j + 1), B(j + 1), B(j)))
    for j in range(1, N + 1):
        odd, even, nxt = 2 * j - 2, 2 * j - 1, (2 * j) % (2 * N)
        glue[odd][2] = (even, 2)
        glue[even][2] = (odd, 2)
        glue[even][0] = (nxt, 0)
        glue[nxt][0] = (even, 0)
    glue = tuple(tuple(g) for g in glue)
    coords = {}
    for t in range(2 * N):
        for k in range(3):
            q = glue[t][k]
            if q is not None:
                coords[_key((t, k), q)] = 1.0
    return DecoratedTriangulation(tuple(verts), glue, coords)


def annulus_coords(f):
    """annulus(N) carrying the coordinates f_1..f_{2N}."""
    f = list(f)
    if len(f) % 2 or not f:
        raise ValueError("need 2N coordinates")
    N = len(f) // 2
    tri = annulus(N)
    vals = {}
    for m in range(1, 2 * N + 1):
        s = _zigzag_side(m)
        vals[_key(s, tri.glue[s[0]][s[1]])] = f[m - 1]
    return DecoratedTriangulation(tri.verts, tri.glue, vals)


def _zigzag_side(m):
    """Side carrying f_m on the annulus: side 0 of triangle m (odd m), side 2 of m-1 (even)."""
    return (m - 1, 0) if m % 2 else (m - 2, 2)


def read_annulus_coords(tri):
    """f_1..f_{2N} read off a triangulation with the structure of an annulus."""
    return [tri.coord(*_zigzag_side(m)) for m in range(1, tri.size + 1)]


# --------------------------------------------------------------------------
# words on the annulus


def _mod(k, M):
    return (k - 1) % M + 1


def dehn_word(N, n=1):
    """Word for the n-th power of the fractional twist D^{1/N} on annulus(N).

    One step: inverse flips w(2l+1, (2l)v)^-1 for l = 1..N, every marked
    corner moved back, then the relabeling k -> k-1.  Its action on
    f_1..f_{2N} is one light-cone step of the lattice.
    """
    return _twist_step(N) ** n


def _twist_step(N):
    M = 2 * N
    gens = [w(_mod(2 * l + 1, M), f"{_mod(2 * l, M)}v", inverse=True) for l in range(1, N + 1)]
    gens += [r(k, inverse=True) for k in range(1, M + 1)]
    gens.append(p(_cycle_down(range(1, M + 1))))
    return GroupoidWord(gens)


def twist_operator_word(N, k):
    """Shadow of the operator of D^{k/N} in the left-to-right operator reading.

    Read left to right, products of T, A, P operators compose in the
    opposite direction to the geometric action, so the operator of D^{k/N}
    maps to the word of D^{-k/N}.
    """
    return dehn_word(N, -k)


def T(i, j, inverse=False):
    """Classical shadow of a flip operator with optional decorations."""
    return w(i, j, inverse)


def A(k, inverse=False):
    return r(k, inverse)


def W(N, n):
    """Word of the triangulation change from annulus(N) to the partly refolded one.

    Product over j = N, N-1, ..., n+1 of T_{2j^,2j-1} T^-1_{2j-1,(2j-2)v} T^-1_{2j,1v}.
    """
    M = 2 * N
    gens = []
    for j in range(N, n, -1):
        gens += [T(f"{_mod(2 * j, M)}^", _mod(2 * j - 1, M)),
                 T(_mod(2 * j - 1, M), f"{_mod(2 * j - 2, M)}v", inverse=True),
                 T(_mod(2 * j, M), "1v", inverse=True)]
    return GroupoidWord(gens)


def _cycle_down(idx):
    """Cycle (..., s, s-1, ...) over the given labels: each label maps to its predecessor."""
    idx = list(idx)
    return tuple(reversed(idx)) if len(idx) > 1 else ()


def tilde_n_rhs(N, n):
    """Right side of the conjugated inverse twist on the partly refolded annulus."""
    M = 2 * N
    gens = [T(2 * j + 1, f"{2 * j}v", inverse=True) for j in range(1, n)]
    gens += [T(2 * N - 1, 2 * k - 1) for k in range(N - 1, n, -1)]
    gens += [T(2 * N - 1, f"{2 * n}v"), T(1, 2 * N - 1, inverse=True), T(f"{2 * n - 1}^", 2 * n)]
    gens += [A(l, inverse=True) for l in range(1, 2 * n - 1)]
    gens += [p(*[(2 * m - 1, _mod(2 * m, M)) for m in range(n, N + 1)])]
    gens += [p(_cycle_down(range(1, M + 1)))]
    return GroupoidWord(gens)


def tilde_n_lhs(N, n):
    Wn = W(N, n)
    return Wn.inverse() + twist_operator_word(N, -1) + Wn


def power_any_rhs(N, n):
    """Right side for the (n-N)/N power of the conjugated twist, 1 <= n < N."""
    gens = []
    for j in range(n, 1, -1):
        gens.append(T(2 * n + 1, 2 * j - 1))
    gens += [T(2 * n + 1, "2v"), T(1, 2 * n + 1, inverse=True), T("1^", 2)]
    gens += [T(1, 2 * k + 1, inverse=True) for k in range(n + 1, N)]
    odd = list(range(1, 2 * N, 2))
    gens += [p(tuple(odd))] * n if N > 1 else []
    return GroupoidWord(gens)


def power_any_lhs(N, n):
    W1 = W(N, 1)
    return W1.inverse() + twist_operator_word(N, n - N) + W1


def power_N_lhs(N):
    W1 = W(N, 1)
    return W1.inverse() + twist_operator_word(N, N) + W1


def power_N_rhs(N):
    return GroupoidWord([T("1v", "2^", inverse=True)])


def refolded(N, n):
    """The triangulation reached from annulus(N) by W(n)."""
    return apply_word(annulus(N), W(N, n))


def word_identity_check(ident, N, n=None, n_samples=100, seed=0, tol=1e-12):
    """Compare both sides of one of the conjugated-twist word identities."""
    if ident in ("tilde_n", "power_any"):
        if n is None or not 1 <= n < N:
            raise ValueError(f"{ident} needs 1 <= n < N (got n={n}, N={N})")
    if ident == "tilde_1":
        lhs, rhs, start = tilde_n_lhs(N, 1), tilde_1_rhs(N), refolded(N, 1)
    elif ident == "tilde_n":
        lhs, rhs, start = tilde_n_lhs(N, n), tilde_n_rhs(N, n), refolded(N, n)
    elif ident == "power_any":
        lhs, rhs, start = power_any_lhs(N, n), power_any_rhs(N, n), refolded(N, 1)
    elif ident == "power_N":
        lhs, rhs, start = power_N_lhs(N), power_N_rhs(N), refolded(N, 1)
    else:
        raise ValueError(f"unknown identity {ident!r}")
    return check_relation(lhs, rhs, start, n_samples, seed, tol)


def lightcone_equivalence_check(N, coords, steps=1):
    """Max relative deviation between the twist word and light-cone lattice steps."""
    from . import lattice

    f = np.asarray(coords, dtype=float)
    if f.shape[0] != 2 * N:
        raise ValueError(f"need 2N = {2 * N} coordinates")
    tri = annulus_coords(list(f))
    tri = apply_word(tri, dehn_word(N, steps))
    got = np.array(read_annulus_coords(tri), dtype=float)
    state = lattice.from_zigzag(f)
    for _ in range(steps):
        state = lattice.lightcone_step(state)
    want = lattice.to_zigzag(state)
    return float(np.max(np.abs(got - want) / np.maximum(np.abs(got), np.abs(want))))


def tilde_1_rhs(N):
    """Right side at n = 1 in its own closed form."""
    gens = [T(2 * N - 1, 2 * j - 1) for j in range(N - 1, 1, -1)]
    gens += [T(2 * N - 1, "2v"), T(1, 2 * N - 1, inverse=True), T("1^", 2)]
    gens.append(p(_cycle_down(range(1, 2 * N, 2))))
    return GroupoidWord(gens)


# --------------------------------------------------------------------------
# the basic relations as word pairs (lhs, rhs, start)


def relation(name):
    if name == "rho3":
        return GroupoidWord([r(1)] * 3), GroupoidWord(), quadrilateral()
    if name == "perm":
        # p(a) then p(b) equals p(a o b)
        a, b = as_permutation("(1 2 3)", 3), as_permutation("(1 2)", 3)
        ab = compose(a, b)
        return (GroupoidWord([p(*cycles_of(a)), p(*cycles_of(b))]),
                GroupoidWord([p(*cycles_of(ab))]), pentagon())
    if name == "pentagon":
        return (GroupoidWord([w(1, 2), w(1, 3), w(2, 3)]),
                GroupoidWord([w(2, 3), w(1, 2)]), pentagon())
    if name == "inversion":
        return (GroupoidWord([w(1, 2), r(1), w(2, 1)]),
                GroupoidWord([r(1), r(2), p((1, 2))]), quadrilateral())
    raise ValueError(f"unknown relation {name!r}")


RELATIONS = ("rho3", "perm", "pentagon", "inversion")


def check_named_relation(name, n_samples=100, seed=0, tol=1e-12):
    lhs, rhs, start = relation(name)
    return check_relation(lhs, rhs, start, n_samples, seed, tol)
