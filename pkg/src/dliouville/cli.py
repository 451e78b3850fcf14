"""Command-line front end: ``dliouville {evolve,converge,identities,groupoid}``.

Exit codes: 0 all checks pass, 1 a numerical check failed (or the
computation hit an admissibility / overflow error), 2 usage error.
"""
from __future__ import annotations

import argparse
import cmath
import io
import json
import math
import sys

import numpy as np

from . import __version__, lattice, triangulation as tr, volkov
from .errors import AdmissibilityError, ConfigurationError, DomainError, PositivityError

SCHEMA = "dliouville.report/1"

EVOLVE_HELP = """\
CSV columns: n (time), m (site 0..2N-1), chi.  The row at time n0-1 needed
to restart the evolution is stored in the '# prev_row=' comment line; the
last comment line carries the maximal equation residual."""

CONVERGE_HELP = """\
CSV columns: epsilon, error, where error = |eps^2 h_eps(x, t) - e^{-phi(x, t)}|.
A footer comment carries the fitted log-log slope."""


def _versions():
    return {"dliouville": __version__, "numpy": np.__version__, "python": sys.version.split()[0]}


def _meta(args, tolerances):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "plot_script")}
    return {"schema": SCHEMA, "config": cfg, "seed": args.seed, "versions": _versions(),
            "tolerances": tolerances}


def _write(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _fail(msg):
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _plot_script(path, title, xs, ys, xlabel, ylabel, loglog=False):
    lines = [
        "# generated by dliouville; run with python to draw the figure",
        "import matplotlib.pyplot as plt",
        f"x = {json.dumps([float(v) for v in xs])}",
        f"y = {json.dumps([float(v) for v in ys])}",
        "fig, ax = plt.subplots()",
        "ax.plot(x, y, 'o-')",
    ]
    if loglog:
        lines += ["ax.set_xscale('log')", "ax.set_yscale('log')"]
    lines += [f"ax.set_xlabel({xlabel!r})", f"ax.set_ylabel({ylabel!r})",
              f"ax.set_title({title!r})", "plt.show()", ""]
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


# --------------------------------------------------------------------------
# evolve

def _initial_state(args):
    src = args.init
    if src == "random":
        rng = np.random.default_rng(args.seed)
        rows = np.exp(rng.uniform(-1.0, 1.0, size=(2, 2 * args.N)))
        return lattice.ZigzagState(args.N, rows[0], rows[1])
    if src.startswith("volkov:"):
        parts = src.split(":")
        if len(parts) != 3:
            raise DomainError("init source must look like volkov:<pair>:<epsilon>")
        pair = volkov.get_pair(parts[1])
        return volkov.sample_lattice(pair, float(parts[2]), args.N)
    raise DomainError(f"unknown init source {src!r}")


def cmd_evolve(args):
    tol = args.tol if args.tol is not None else 1e-10
    try:
        traj = lattice.evolve(_initial_state(args), args.steps)
    except (DomainError, PositivityError, KeyError, ValueError) as exc:
        return _fail(str(exc))
    res = lattice.max_residual(traj)
    meta = _meta(args, {"residual": tol})
    times, rows = lattice.trajectory_rows(traj)
    if args.format == "json":
        out = dict(meta, times=times[1:].tolist(), prev_row=rows[0].tolist(),
                   rows=rows[1:].tolist(), max_residual=res)
        text = json.dumps(out, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
        buf.write("# prev_row=" + " ".join(repr(float(v)) for v in rows[0]) + "\n")
        buf.write("n,m,chi\n")
        for n, row in zip(times[1:], rows[1:]):
            for m, v in enumerate(row):
                buf.write(f"{int(n)},{m},{float(v)!r}\n")
        buf.write(f"# max_residual={res!r}\n")
        text = buf.getvalue()
    _write(args, text)
    if args.plot_script:
        _plot_script(args.plot_script, "chi at site 0", times, rows[:, 0], "n", "chi")
    print(f"max residual {res:.3e} (tol {tol:.1e})", file=sys.stderr)
    return 0 if res < tol else 1


# --------------------------------------------------------------------------
# converge

def cmd_converge(args):
    eps = args.epsilon or [0.1, 0.05, 0.025, 0.0125]
    if len(eps) < 2:
        return _fail("need at least two epsilon values to fit a slope")
    lo, hi = (2.0 - args.tol, 2.0 + args.tol) if args.tol is not None else (1.8, 2.2)
    try:
        pair = volkov.get_pair(args.pair)
        probe = volkov.continuum_limit_probe(pair, args.x, args.t, eps)
    except (DomainError, KeyError, ValueError) as exc:
        return _fail(str(exc))
    slope = volkov.convergence_slope(probe)
    meta = _meta(args, {"slope_window": [lo, hi]})
    if args.format == "json":
        text = json.dumps(dict(meta, probe=[list(p) for p in probe], slope=slope),
                          sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
        buf.write("epsilon,error\n")
        for e, err in probe:
            buf.write(f"{e!r},{float(err)!r}\n")
        buf.write(f"# slope={slope!r}\n")
        text = buf.getvalue()
    _write(args, text)
    if args.plot_script:
        _plot_script(args.plot_script, f"continuum limit, {args.pair}", [p[0] for p in probe],
                     [p[1] for p in probe], "epsilon", "error", loglog=True)
    print(f"slope {slope:.4f}", file=sys.stderr)
    return 0 if lo <= slope <= hi else 1


# --------------------------------------------------------------------------
# identities

def parse_b(text):
    """Coupling from '0.8', '0.5+0.7j' or 'phase:30' (unit modulus, degrees)."""
    t = text.strip()
    if t.startswith("phase:"):
        return cmath.exp(1j * math.radians(float(t[6:])))
    return complex(t.replace(" ", ""))


FAST_IDS = ("inversion", "shift_b", "shift_binv", "unitarity", "raman", "ramanbar")
FULL_IDS = FAST_IDS + ("heine", "euler_heine", "saalschutz", "saalschutz_limit",
                       "fourier_plus", "fourier_minus")


def _point_from_json(text):
    d = json.loads(text)
    vals = {k: complex(*v) if isinstance(v, list) else complex(v)
            for k, v in d.items() if k != "id"}
    return d["id"], vals


def cmd_identities(args):
    from . import identities as ids
    from .qdilog import CouplingParams

    bvals = [parse_b(s) for s in (args.b or ["1"])]
    entries, ok = [], True
    tols = {k.value: v for k, v in ids.TOLERANCES.items()}
    if args.tol is not None:
        tols = {k: args.tol for k in tols}
    try:
        if args.point:
            idn, vals = _point_from_json(args.point)
            params = CouplingParams(bvals[0])
            rec = ids.verify_identity_full(idn, params, ids.SamplePoint(vals))
            rec["b"] = [bvals[0].real, bvals[0].imag]
            rec["pass"] = rec["residual"] < tols[idn]
            entries.append(rec)
            ok &= rec["pass"]
        else:
            id_list = FAST_IDS if args.suite == "fast" else FULL_IDS
            for b in bvals:
                params = CouplingParams(b)
                for idn in id_list:
                    if idn == "unitarity" and not params.unitary:
                        continue
                    for k, pt in enumerate(ids.sample_points(idn, params, args.points, args.seed)):
                        rec = ids.verify_identity_full(idn, params, pt)
                        rec.pop("lhs"), rec.pop("rhs")
                        rec.update(b=[b.real, b.imag], sample=k, tol=tols[idn],
                                   **{"pass": rec["residual"] < tols[idn]})
                        entries.append(rec)
                        ok &= rec["pass"]
                if args.suite == "slow" and abs(b - 1) < 1e-14:
                    entries += _slow_checks(params, tols)
                    ok &= all(e["pass"] for e in entries if e["id"] in ("baxter", "bailey"))
    except (AdmissibilityError, DomainError) as exc:
        why = getattr(exc, "violated", None)
        return _fail(f"{exc}" + (f" [violated: {why}]" if why else ""))
    meta = _meta(args, tols)
    text = "\n".join(ids.report_lines(
        entries, meta["config"], seed=meta["seed"], versions=meta["versions"],
        tolerances=meta["tolerances"])) + "\n"
    _write(args, text)
    bad = [e for e in entries if not e["pass"]]
    print(f"{len(entries) - len(bad)}/{len(entries)} checks pass", file=sys.stderr)
    return 0 if ok else 1


def _slow_checks(params, tols):
    from . import identities as ids

    out = []
    for s, z in ((0.3, 0.1 + 0.05j), (0.5, -0.2), (0.2, 0.3 + 0.1j), (0.7, 0.0), (0.4, 0.25j)):
        r = ids.check_baxter_n1(params, s, z)
        out.append({"id": "baxter", "point": {"s": s, "z": [complex(z).real, complex(z).imag]},
                    "residual": r, "tol": 1e-5, "pass": r < 1e-5})
    u = v = 0.2j
    r = ids.check_bailey_eigen(params, u, v, 0.3, (-1.0, 0.0, 1.0))
    out.append({"id": "bailey", "point": {"u": [0.0, 0.2], "v": [0.0, 0.2], "s": 0.3},
                "residual": r, "tol": 1e-3, "pass": r < 1e-3})
    return out


# --------------------------------------------------------------------------
# groupoid

def _groupoid_rows(check, N, n_samples, seed, tol):
    rows = []

    def add(name, res, **extra):
        rows.append(dict(check=name, ok=bool(res.ok), deviation=res.deviation, **extra))

    if check in ("pentagon", "inversion", "relations"):
        names = tr.RELATIONS if check == "relations" else (check,)
        for name in names:
            add(name, tr.check_named_relation(name, n_samples, seed, tol))
    elif check == "dehn":
        start = tr.annulus(N)
        end = tr.apply_word(start, tr.dehn_word(N, 1))
        f = [1.0] * (2 * N)
        img = tr.read_annulus_coords(tr.apply_word(tr.annulus_coords(f), tr.dehn_word(N, 1)))
        rng = np.random.default_rng(seed)
        dev = 0.0
        for _ in range(n_samples):
            g = np.exp(rng.uniform(-2, 2, 2 * N))
            got = np.array(tr.read_annulus_coords(tr.apply_word(tr.annulus_coords(g),
                                                                tr.dehn_word(N, 1))))
            dev = max(dev, float(np.max(np.abs(got - lightcone_formula(g)) / got)))
        rows.append(dict(check="dehn", ok=end.isomorphic(start) and dev <= tol, deviation=dev,
                         isomorphic=end.isomorphic(start), sample_in=f,
                         sample_out=[float(x) for x in img]))
    elif check == "theorem":
        rng = np.random.default_rng(seed)
        dev = max(tr.lightcone_equivalence_check(N, np.exp(rng.uniform(-2, 2, 2 * N)))
                  for _ in range(n_samples))
        rows.append(dict(check="theorem", ok=dev <= tol, deviation=dev, N=N))
    elif check == "props":
        for n in range(1, N):
            add(f"tilde_n({n})", tr.word_identity_check("tilde_n", N, n, n_samples, seed, tol))
            add(f"power_any({n})", tr.word_identity_check("power_any", N, n, n_samples, seed, tol))
        add("tilde_1", tr.word_identity_check("tilde_1", N, None, n_samples, seed, tol))
        add("power_N", tr.word_identity_check("power_N", N, None, n_samples, seed, tol))
    return rows


def lightcone_formula(f):
    """f'_{2j} = 1/f_{2j-1}, f'_{2j+1} = f_{2j}(1+f_{2j-1})(1+f_{2j+1}), indices mod 2N."""
    f = np.asarray(f, dtype=float)
    M = f.size
    out = np.empty(M)
    for m in range(1, M + 1):
        if m % 2 == 0:
            out[m - 1] = 1.0 / f[m - 2]
        else:
            fm = lambda k: f[(k - 1) % M]  # noqa: E731
            out[m - 1] = fm(m - 1) * (1 + fm(m - 2)) * (1 + fm(m))
    return out


def cmd_groupoid(args):
    tol = args.tol if args.tol is not None else 1e-12
    if args.check == "props" and args.N < 2:
        return _fail("props needs N >= 2")
    try:
        rows = _groupoid_rows(args.check, args.N, args.samples, args.seed, tol)
    except ConfigurationError as exc:
        return _fail(str(exc))
    meta = _meta(args, {"deviation": tol})
    if args.format == "json":
        text = json.dumps(dict(meta, results=rows), sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
        buf.write("check,ok,deviation\n")
        for r in rows:
            buf.write(f"{r['check']},{int(r['ok'])},{r['deviation']!r}\n")
        if args.check == "dehn":
            buf.write(f"# sample {rows[0]['sample_in']} -> {rows[0]['sample_out']}\n")
        text = buf.getvalue()
    _write(args, text)
    return 0 if all(r["ok"] for r in rows) else 1


# --------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="dliouville", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all sampled data")
    common.add_argument("--tol", type=float, default=None, help="override the pass tolerance")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[common], epilog=EVOLVE_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="evolve the periodic lattice equation")
    p.add_argument("-N", type=int, default=2)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--init", default="random", help="random | volkov:<pair>:<epsilon>")
    p.add_argument("--plot-script", default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("converge", parents=[common], epilog=CONVERGE_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="continuum-limit error of the lattice solutions")
    p.add_argument("--pair", default="exp_sine", help="one of " + ", ".join(sorted(volkov.catalog())))
    p.add_argument("--epsilon", type=float, nargs="+", default=None)
    p.add_argument("-x", type=float, default=0.3)
    p.add_argument("-t", type=float, default=0.2)
    p.add_argument("--plot-script", default=None)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("identities", parents=[common],
                       help="quantum dilogarithm identity suite (JSON lines whatever --format)")
    p.add_argument("--suite", choices=("fast", "full", "slow"), default="fast")
    p.add_argument("-b", "--b", action="append", help="coupling; repeatable (e.g. 0.8, phase:30)")
    p.add_argument("--points", type=int, default=3, help="sample points per identity")
    p.add_argument("--point", default=None, help='single JSON point, e.g. {"id": "raman", ...}')
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("groupoid", parents=[common], help="triangulation groupoid checks")
    p.add_argument("check", choices=("pentagon", "inversion", "relations", "dehn", "theorem", "props"))
    p.add_argument("-N", type=int, default=2)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_groupoid)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "N", 1) < 1:
        print("error: N must be positive", file=sys.stderr)
        return 2
    if getattr(args, "steps", 0) < 0:
        print("error: steps must be nonnegative", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
