"""Batch command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

from . import __version__
from . import angles, facecount, polytope, projection

COLUMNS = ["check", "inputs", "exact", "estimate", "stderr", "target", "zscore", "pass"]
TABULATE_COLUMNS = ["check", "inputs", "exact", "fd1", "rho", "residual", "pass"]


class UsageError(Exception):
    pass


# -- value rendering ----------------------------------------------------------

def render_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, dict):
        return ";".join(f"{k}={render_value(x)}" for k, x in v.items())
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(render_value(x) for x in v) + ")"
    return str(v)


def _parse_scalar(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    if s in ("inf", "-inf"):
        return float(s)
    try:
        return int(s)
    except ValueError:
        pass
    if "/" in s:
        try:
            return Fraction(s)
        except ValueError:
            return s
    try:
        return float(s)
    except ValueError:
        return s


def _parse_cell(column: str, s: str):
    if column == "inputs":
        if not s:
            return {}
        return {k: _parse_cell("", v) for k, v in (p.split("=", 1) for p in s.split(";"))}
    if column in ("exact", "rho", "residual", "fd1") and s and not s.startswith("("):
        try:
            return Fraction(s)
        except ValueError:
            return s
    if s.startswith("(") and s.endswith(")"):
        return tuple(_parse_scalar(x) for x in s[1:-1].split(",") if x)
    return _parse_scalar(s)


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([render_value(r.get(c)) for c in columns])
    return buf.getvalue()


def parse_csv(text: str):
    """Inverse of :func:`render_csv`: returns ``(columns, rows)``."""
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [{c: _parse_cell(c, s) for c, s in zip(columns, rec)} for rec in reader]
    return columns, rows


def _json_value(v):
    if isinstance(v, Fraction):
        return render_value(v)
    if isinstance(v, float) and not math.isfinite(v):
        return render_value(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def render_json(report: dict) -> str:
    return json.dumps(_json_value(report), indent=2) + "\n"


# -- argument helpers ---------------------------------------------------------

def parse_range(text, name="value"):
    """Parse ``5``, ``2..7``, ``..25`` or ``100,1000`` into a list of ints."""
    if text is None:
        return None
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..", 1)
                lo = int(lo) if lo else None
                hi = int(hi)
                out.append((lo, hi))
            else:
                v = int(part)
                out.append((v, v))
    except ValueError:
        raise UsageError(f"bad {name} specification {text!r}") from None
    return out


def expand(spec, default_lo=None):
    vals = []
    for lo, hi in spec:
        if lo is None:
            if default_lo is None:
                raise UsageError("open range needs a lower bound")
            lo = default_lo
        vals.extend(range(lo, hi + 1))
    return vals


def _single(spec, name):
    if spec is None:
        raise UsageError(f"--{name} is required")
    vals = expand(spec)
    if len(vals) != 1:
        raise UsageError(f"--{name} must be a single value here")
    return vals[0]


def _ints(args, name, default_lo=None, required=True):
    spec = getattr(args, name)
    if spec is None:
        if required:
            raise UsageError(f"--{name} is required")
        return None
    return expand(parse_range(spec, name), default_lo)


FIXTURES = {
    "cube": polytope.cube,
    "simplex": polytope.simplex,
    "regular-simplex": polytope.regular_simplex,
    "crosspolytope": polytope.crosspolytope,
}


def load_polytope_arg(args):
    name = args.polytope or "cyclic"
    if name == "cyclic":
        d = _single(parse_range(args.d, "d"), "d")
        n = _single(parse_range(args.n, "n"), "n")
        try:
            return polytope.cyclic(d, n)
        except ValueError as e:
            raise UsageError(str(e)) from None
    if name in ("square", "triangle"):
        return polytope.cube(2) if name == "square" else polytope.simplex(2)
    if name in FIXTURES:
        d = _single(parse_range(args.d, "d"), "d")
        return FIXTURES[name](d)
    if os.path.exists(name):
        with open(name) as fh:
            text = fh.read()
        return polytope.load_polytope(text, name=os.path.basename(name))
    raise UsageError(f"unknown polytope {name!r}")


def load_subspace_arg(args, P, seed):
    d = P.d
    spec = args.subspace
    if spec is None:
        if P.name.startswith("cyclic"):
            return projection.FixedSubspace.coordinate(d, (d - 1, d))
        for attempt in range(1000):
            S = projection.FixedSubspace.random(d, 2, seed=(seed or 0) + attempt)
            if projection.general_position_check(P, S):
                return S
        raise UsageError("no generic subspace found")
    if os.path.exists(spec):
        with open(spec) as fh:
            vecs = []
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].split()
                if not line:
                    continue
                try:
                    vecs.append(tuple(Fraction(x) for x in line))
                except (ValueError, ZeroDivisionError):
                    raise polytope.PolytopeFormatError("bad rational", lineno) from None
        return projection.FixedSubspace(d, tuple(vecs))
    try:
        axes = [int(a.strip().lstrip("eE")) for a in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad subspace {spec!r}") from None
    try:
        return projection.FixedSubspace.coordinate(d, axes)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _row(check, inputs, *, exact=None, estimate=None, stderr=None, target=None,
         zscore=None, passed=True, **extra):
    row = {"check": check, "inputs": inputs}
    if exact is not None:
        row["exact"] = exact
    if estimate is not None:
        row["estimate"] = estimate
        row["stderr"] = stderr
    if target is not None:
        row["target"] = target
    if zscore is not None:
        row["zscore"] = zscore
    row.update(extra)
    row["pass"] = bool(passed)
    return row


# -- commands -----------------------------------------------------------------

def cmd_tabulate(args):
    ds = _ints(args, "d")
    rows = []
    for d in ds:
        if d < 2:
            raise UsageError("tabulate needs d >= 2")
        ns = [n for n in _ints(args, "n", d + 1) if n > d]
        ks = _ints(args, "k", required=False) or list(range(d))
        if any(not 0 <= k <= d - 1 for k in ks):
            raise UsageError(f"k must lie in 0..{d - 1}")
        for n in ns:
            fv = facecount.cyclic_fvector(d, n)
            fd1 = fv[d - 1]
            for k in ks:
                r = facecount.rho(d, d - k - 1)
                rows.append(_row("cyclic_fk", {"d": d, "n": n, "k": k}, exact=Fraction(fv[k]),
                                 fd1=Fraction(fd1), rho=r,
                                 residual=Fraction(fv[k], fd1) - r,
                                 passed=fv.satisfies_euler()))
    return rows, TABULATE_COLUMNS


def cmd_tightness(args):
    d = _single(parse_range(args.d, "d"), "d")
    k = _single(parse_range(args.k, "k"), "k")
    if not 0 <= k <= d - 1:
        raise UsageError(f"k must lie in 0..{d - 1}")
    ns = [n for n in _ints(args, "n", d + 1)]
    if any(n <= d for n in ns):
        raise UsageError("every n must exceed d")
    rows = []
    prev = None
    for n, res in facecount.tightness_table(d, k, ns):
        ok = res >= 0 and (prev is None or res <= prev)
        rows.append(_row("tightness", {"d": d, "k": k, "n": n}, exact=res,
                         target=facecount.rho(d, d - k - 1), passed=ok))
        prev = res
    return rows, COLUMNS


def cmd_bounds(args):
    d = _single(parse_range(args.d, "d"), "d")
    ks = _ints(args, "k")
    fk = args.fk
    rows = []
    for k in ks:
        try:
            if args.which == "barnette":
                if args.m is None:
                    raise UsageError("--m (facet count) is required")
                v = facecount.barnette_bound(d, args.m, k)
                rows.append(_row("barnette", {"d": d, "m": args.m, "k": k}, exact=Fraction(v),
                                 passed=fk is None or fk >= v))
            elif args.which == "hinman":
                reps = facecount.hinman_bounds(d, k, args.f0, args.fd1, args.improved, fk)
                for rep in reps:
                    rows.append(_row(rep.bound, {"d": d, "k": k, rep.input_name: rep.input_value},
                                     exact=rep.value, passed=rep.satisfied is not False))
            else:
                if args.m is None:
                    raise UsageError("--m (facet count) is required")
                rep = facecount.gubc_values(d, args.m, k, fk)
                if rep is not None:
                    rows.append(_row("gubc-CONJECTURAL", {"d": d, "m": args.m, "k": k,
                                                          "n": rep.cyclic_n},
                                     exact=rep.value, passed=rep.satisfied is not False))
        except ValueError as e:
            raise UsageError(str(e)) from None
    return rows, COLUMNS


def _verify_lemma31(args):
    rows = []
    for d in _ints(args, "d"):
        if d < 2:
            raise UsageError("lemma31 needs d >= 2")
        for n in _ints(args, "n", d + 1):
            if n <= d:
                continue
            ks = _ints(args, "k", required=False) or range(d)
            for k in ks:
                if not 0 <= k <= d - 1:
                    raise UsageError(f"k must lie in 0..{d - 1}")
                r = facecount.lemma31_residual(d, n, k)
                rows.append(_row("lemma31", {"d": d, "n": n, "k": k}, exact=r, target=Fraction(0),
                                 passed=r == 0))
    return rows


def _verify_gale(args):
    rows = []
    for d in _ints(args, "d"):
        if d < 2:
            raise UsageError("gale needs d >= 2")
        for n in _ints(args, "n", d + 1):
            if n <= d:
                continue
            formula = facecount.cyclic_fvector(d, n)
            P = polytope.cyclic(d, n)
            enum = P.fvector()
            nf = len(polytope.gale_facets(d, n))
            ok = (formula == enum and nf == facecount.cyclic_facets(d, n)
                  == facecount.cyclic_fk(d, n, d - 1))
            rows.append(_row("gale", {"d": d, "n": n}, exact=formula.counts,
                             target=enum.counts, passed=ok))
    return rows


def _verify_euler(args):
    rows = []
    if args.polytope and args.polytope != "cyclic":
        P = load_polytope_arg(args)
        fv = P.fvector()
        return [_row("euler", {"polytope": P.name}, exact=fv.counts, passed=fv.satisfies_euler())]
    for d in _ints(args, "d"):
        for n in _ints(args, "n", d + 1):
            if n <= d:
                continue
            fv = facecount.cyclic_fvector(d, n)
            rows.append(_row("euler", {"d": d, "n": n}, exact=fv.counts,
                             passed=fv.satisfies_euler()))
    return rows


def _verify_prop43(args):
    P = load_polytope_arg(args)
    if not P.exact:
        raise UsageError("prop43 needs an exact polytope")
    S = load_subspace_arg(args, P, args.seed)
    pos = projection.general_position_check(P, S)
    basis = "|".join(render_value(tuple(Fraction(x) for x in v)) for v in S.basis)
    rows = [_row("general_position", {"polytope": P.name, "subspace": basis},
                 exact=pos.describe(), passed=pos.passed)]
    if not pos:
        return rows
    ks = _ints(args, "k", required=False) or range(P.d - 2)
    for k in ks:
        if not 0 <= k <= P.d - 3:
            raise UsageError(f"k must lie in 0..{P.d - 3}")
        rep = projection.prop43_verify(P, S, k, check_position=False)
        two = all(v == 2 for v in rep.lost_in_facets.values())
        rows.append(_row("prop43", {"polytope": P.name, "k": k, "fk": rep.fk,
                                    "survivors": rep.survivors},
                         exact=rep.residual, target=Fraction(0), passed=rep.passed))
        rows.append(_row("two_facets", {"polytope": P.name, "k": k}, passed=two))
    return rows


def _verify_remark(args):
    rows = []
    for d in _ints(args, "d"):
        for n in _ints(args, "n", d + 1):
            if n <= d:
                continue
            ks = _ints(args, "k", required=False) or range(d - 2)
            for k in ks:
                try:
                    rep = projection.remark_verify(d, n, k)
                except ValueError as e:
                    raise UsageError(str(e)) from None
                drops = sorted({r[3] for r in rep.facet_rows})
                rows.append(_row("remark", {"d": d, "n": n, "k": k, "facets": len(rep.facet_rows),
                                            "survivors": rep.survivors},
                                 exact=tuple(drops), target=rep.target, passed=rep.passed))
    return rows


VERIFIERS = {"lemma31": _verify_lemma31, "gale": _verify_gale, "euler": _verify_euler,
             "prop43": _verify_prop43, "remark": _verify_remark}


def cmd_verify(args):
    return VERIFIERS[args.which](args), COLUMNS


def _face_arg(args, P, k=0):
    if args.face is None:
        return P.lattice.faces[k][0]
    try:
        face = frozenset(int(x) for x in args.face.split(","))
    except ValueError:
        raise UsageError(f"bad face {args.face!r}") from None
    if face not in P.lattice:
        raise UsageError(f"{sorted(face)} is not a face of {P.name}")
    return face


def _est_row(check, inputs, est, target=None, passed=True):
    z = est.zscore(target) if target is not None else None
    extra = {"resampled": est.resampled}
    if est.comparisons:
        extra["agreement"] = est.agreement
    return _row(check, inputs, estimate=est.mean, stderr=est.stderr, target=target,
                zscore=z, passed=passed, **extra)


def _report_row(rep, inputs, target=None):
    row = _row(rep.name, inputs, estimate=rep.lhs, stderr=rep.lhs_stderr,
               target=rep.rhs if target is None else target, zscore=rep.zscore, passed=rep.passed)
    row["rhs_stderr"] = rep.rhs_stderr
    return row


def cmd_estimate(args):
    P = load_polytope_arg(args)
    N, seed, sig, w = args.samples, args.seed, args.tolerance, args.workers
    if N < 1:
        raise UsageError("--samples must be positive")
    which = args.which
    base = {"polytope": P.name}
    rows = []
    ks = _ints(args, "k", required=False)
    if which == "deficiency":
        G = _face_arg(args, P)
        rep = angles.deficiency_check(P, G, N, seed, workers=w, sigmas=sig)
        return [_report_row(rep, {**base, "face": tuple(sorted(G))})], COLUMNS
    if ks is None:
        ks = list(range(P.d if which != "thm24" else P.d - 1))
    for k in ks:
        if not 0 <= k <= P.d - 1:
            raise UsageError(f"k must lie in 0..{P.d - 1}")
        inputs = {**base, "k": k}
        if which == "phi":
            est = angles.phi_k(P, k, N, seed, workers=w)
            rows.append(_est_row("phi", inputs, est))
        elif which == "gamma":
            m = args.m or 2
            est = angles.gamma_k_m(P, k, m, N, seed, workers=w, cross_check=True)
            rows.append(_est_row("gamma", {**inputs, "m": m}, est))
        elif which == "feldman":
            rep = angles.feldman_check(P, k, N, seed, workers=w, sigmas=sig)
            rows.append(_report_row(rep, inputs))
        elif which == "prop41":
            if P.d < 3:
                raise UsageError("prop41 needs d >= 3")
            rep = angles.prop41_check(P, k, N, seed, workers=w, sigmas=sig)
            row = _row("prop41", inputs, estimate=rep.details["gap"], stderr=rep.rhs_stderr,
                       target=0.0, zscore=rep.zscore, passed=rep.passed)
            rows.append(row)
        elif which == "thm24":
            targets = ([polytope.facet_intrinsic(P, i) for i in range(len(P.facets))]
                       if args.facets else [P])
            for i, Q in enumerate(targets):
                if k > Q.d - 1:
                    raise UsageError(f"k must lie in 0..{Q.d - 1}")
                rep = angles.thm24_check(Q, k, N, seed, workers=w, sigmas=sig)
                inp = {**inputs, "facet": i} if args.facets else inputs
                rows.append(_report_row(rep, inp))
    return rows, COLUMNS


COMMANDS = {"tabulate": cmd_tabulate, "verify": cmd_verify, "estimate": cmd_estimate,
            "bounds": cmd_bounds, "tightness": cmd_tightness}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", help="dimension: value, range a..b or list")
    common.add_argument("--n", help="vertex count: value, range a..b, ..b or list")
    common.add_argument("--k", help="face dimension: value, range or list")
    common.add_argument("--m", type=int, help="facet count (bounds) or subspace dimension (gamma)")
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=3.0,
                        help="number of standard errors allowed in statistical checks")
    common.add_argument("--subspace", help="axes like 3,4 (1-based) or a file of rational vectors")
    common.add_argument("--polytope", help="cube, simplex, regular-simplex, crosspolytope, "
                                           "square, triangle, cyclic or a file path")
    common.add_argument("--face", help="comma-separated vertex indices of a face")
    common.add_argument("--facets", action="store_true",
                        help="thm24: run on every facet of the polytope")
    common.add_argument("--f0", type=int)
    common.add_argument("--fd1", type=int)
    common.add_argument("--fk", type=int, help="actual f_k to test a bound against")
    common.add_argument("--improved", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=["csv", "json"], default="json")
    common.add_argument("--out", help="output path (default: standard output)")

    p = argparse.ArgumentParser(prog="facebounds", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("tabulate", parents=[common])
    sub.add_parser("tightness", parents=[common])
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("which", choices=sorted(VERIFIERS))
    e = sub.add_parser("estimate", parents=[common])
    e.add_argument("which", choices=["phi", "gamma", "feldman", "deficiency", "prop41", "thm24"])
    b = sub.add_parser("bounds", parents=[common])
    b.add_argument("which", choices=["barnette", "hinman", "gubc"])
    return p


STOCHASTIC = {"estimate"}


def _config(args):
    keys = ["which", "d", "n", "k", "m", "samples", "seed", "tolerance", "subspace",
            "polytope", "face", "facets", "f0", "fd1", "fk", "improved", "format"]
    cfg = {"command": args.command}
    for key in keys:
        v = getattr(args, key, None)
        if v not in (None, False):
            cfg[key] = v
    if args.command not in STOCHASTIC:
        cfg.pop("samples", None)
    return cfg


def run(argv=None, stdout=None):
    """Run the CLI; returns the exit status."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, columns = COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"facebounds: error: {e}", file=sys.stderr)
        return 2
    except polytope.PolytopeFormatError as e:
        print(f"facebounds: {e}", file=sys.stderr)
        return 2
    except polytope.DegenerateModel as e:
        print(f"facebounds: invalid polytope: {e}", file=sys.stderr)
        return 2
    if args.format == "csv":
        text = render_csv(rows, columns if args.command == "tabulate" else _columns_for(rows))
    else:
        command = args.command if not hasattr(args, "which") else f"{args.command} {args.which}"
        report = {"command": command, "config": _config(args), "rows": rows,
                  "seed": args.seed if args.command in STOCHASTIC else None,
                  "version": __version__}
        text = render_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0 if all(r["pass"] for r in rows) else 1


def _columns_for(rows):
    cols = list(COLUMNS)
    for r in rows:
        for key in r:
            if key not in cols:
                cols.insert(len(cols) - 1, key)
    return cols


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
