"""Command-line interface: ``fareystat <group> <action> [options]``.

Groups: ``farey gen``, ``stats void|point|gaps``, ``limits hall|triangle``,
``verify zeta|equivalence|equidist|hall|all`` and ``nt table|kloosterman|zeta``.
Every file written gets a ``FILE.meta.json`` sidecar with the full
configuration, so re-running with the same options reproduces it byte for byte.
Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, checks, equidist, limits1d, numtheory, statistics
from .farey import DEFAULT_MEMORY_BUDGET, enumerate_farey
from .report import summarize
from .sets import TestSet, parse_set

THREADS_ENV = "FAREYSTAT_THREADS"
REAL_FMT = "%.12g"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    group: str
    action: str
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


# ----- argument types -----

def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {v}")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def s_grid(text: str) -> list:
    """``lo:hi:step`` inclusive of both ends, values rounded to 12 digits."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    if lo < 0 or hi < lo or not step > 0:
        raise argparse.ArgumentTypeError("need 0 <= lo <= hi and step > 0")
    count = int(round((hi - lo) / step)) + 1
    return [float(REAL_FMT % (lo + j * step)) for j in range(count)]


def level_list(text: str) -> list:
    try:
        return [positive_int(x) for x in text.split(",") if x.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}: {exc}")


# ----- parser -----

def _common(p: argparse.ArgumentParser, out=True) -> None:
    p.add_argument("--threads", type=positive_int, default=None,
                   help=f"worker cap (default: ${THREADS_ENV} or all cores)")
    if out:
        p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fareystat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="key=value file mirroring long flags")
    groups = parser.add_subparsers(dest="group", required=True)

    farey = groups.add_parser("farey", help="Farey sequence generation").add_subparsers(
        dest="action", required=True)
    gen = farey.add_parser("gen", help="write F_Q as p1..pn,q rows")
    gen.add_argument("--dim", type=positive_int, default=1)
    gen.add_argument("--level", type=positive_int, required=True)
    gen.add_argument("--memory-budget", type=positive_int, default=DEFAULT_MEMORY_BUDGET)
    _common(gen)

    stats = groups.add_parser("stats", help="fine-scale statistics").add_subparsers(
        dest="action", required=True)
    for name, text in (("void", "void probabilities P_Q(k, D, A)"),
                       ("point", "point statistic P_{0,Q}(k, D, A)"),
                       ("gaps", "gap survival against Hall's law (n = 1)")):
        sp = stats.add_parser(name, help=text)
        sp.add_argument("--level", type=positive_int, required=True)
        sp.add_argument("--dim", type=positive_int, default=1)
        sp.add_argument("--s-grid", type=s_grid, default=None,
                        help="scale factors lo:hi:step applied to A")
        if name != "gaps":
            sp.add_argument("--set", action="append", default=[], metavar="A:SPEC|D:SPEC",
                            help="test set A or domain D: box:lo,hi;..., boxoc:..., ball:r")
            sp.add_argument("--kmax", type=nonneg_int, default=statistics.DEFAULT_KMAX)
        if name == "void":
            sp.add_argument("--samples", type=positive_int, default=statistics.DEFAULT_SAMPLES)
            sp.add_argument("--mode", choices=("mc", "grid"), default="mc")
        sp.add_argument("--seed", type=nonneg_int, default=0)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        _common(sp)

    limits = groups.add_parser("limits", help="closed-form limit laws").add_subparsers(
        dest="action", required=True)
    hall = limits.add_parser("hall", help="Hall distribution on an s grid")
    hall.add_argument("--s-grid", type=s_grid, default=s_grid("0:4:0.01"))
    hall.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(hall)
    tri = limits.add_parser("triangle", help="p0 for one triangle, closed form and oracle")
    tri.add_argument("--s", type=positive_float, required=True)
    tri.add_argument("--lambda", dest="lam", type=positive_float, required=True)
    _common(tri)

    verify = groups.add_parser("verify", help="verification harness").add_subparsers(
        dest="action", required=True)
    for name in ("zeta", "equivalence", "equidist", "hall", "all"):
        vp = verify.add_parser(name)
        vp.add_argument("--tol-profile", choices=sorted(checks.PROFILES), default="default")
        if name in ("equidist", "all"):
            vp.add_argument("--levels", type=level_list, default=None,
                            help="comma-separated levels for the equidistribution table")
        _common(vp)

    nt = groups.add_parser("nt", help="arithmetic helpers").add_subparsers(
        dest="action", required=True)
    tab = nt.add_parser("table", help="q, phi, mu, J_n up to a limit")
    tab.add_argument("--limit", type=positive_int, required=True)
    tab.add_argument("--dim", type=positive_int, default=1)
    _common(tab)
    kl = nt.add_parser("kloosterman", help="K(m1, m2, q)")
    kl.add_argument("--m1", type=int, required=True)
    kl.add_argument("--m2", type=int, required=True)
    kl.add_argument("--q", type=positive_int, required=True)
    _common(kl, out=False)
    zt = nt.add_parser("zeta", help="zeta(s) for real s > 1")
    zt.add_argument("--s", type=float, required=True)
    _common(zt, out=False)
    return parser


# ----- config file -----

def read_config(path: Path) -> list:
    """Turn ``key = value`` lines into argv tokens (``true`` means a bare flag)."""
    tokens = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}")
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--config: line {i} is not key=value")
        flag = "--" + key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() == "true":
            tokens.append(flag)
        else:
            tokens += [flag, value]
    return tokens


def _expand_config(argv: list) -> list:
    argv = list(argv)
    cfg = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            cfg = argv[i + 1]
            del argv[i:i + 2]
            break
        if tok.startswith("--config="):
            cfg = tok.split("=", 1)[1]
            del argv[i]
            break
    if cfg is None:
        return argv
    # config values go right after "group action" so explicit flags win
    pos = [i for i, t in enumerate(argv) if not t.startswith("-")][:2]
    cut = pos[-1] + 1 if len(pos) == 2 else len(argv)
    return argv[:cut] + read_config(Path(cfg)) + argv[cut:]


def resolve_threads(arg: Optional[int]) -> int:
    if arg:
        return arg
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return positive_int(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{THREADS_ENV}: {exc}")
    return os.cpu_count() or 1


# ----- output helpers -----

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return REAL_FMT % v


def write_table(out: Optional[Path], header: Sequence[str], rows, fmt: str = "csv",
                meta: Optional[dict] = None) -> None:
    rows = [[_fmt(v) for v in r] for r in rows]
    if fmt == "json":
        text = json.dumps({"columns": list(header), "rows": rows}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
        return
    out.write_text(text)
    if meta is not None:
        write_meta(out, meta)


def write_meta(out: Path, meta: dict) -> None:
    path = out.with_name(out.name + ".meta.json")
    path.write_text(json.dumps(meta, indent=1, sort_keys=True, default=_json_default) + "\n")


def _json_default(v):
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, TestSet):
        return v.describe()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _meta(cfg: RunConfig, **extra) -> dict:
    opts = {k: v for k, v in cfg.options.items() if k not in ("out", "threads", "config")}
    md = {"artifact_version": __version__, "command": f"{cfg.group} {cfg.action}",
          "options": opts}
    md.update(extra)
    return md


def _split_sets(specs: Sequence[str], n: int) -> tuple[TestSet, Optional[TestSet]]:
    A = D = None
    for text in specs:
        role, sep, rest = text.partition(":")
        if role.upper() in ("A", "D") and sep and rest.split(":")[0] in ("box", "boxoc", "ball"):
            which, body = role.upper(), rest
        else:
            which, body = "A", text
        try:
            ts = parse_set(body, n)
        except ValueError as exc:
            raise UsageError(f"--set {text!r}: {exc}")
        if which == "A":
            A = ts
        else:
            D = ts
    if A is None:
        A = TestSet.interval(0.0, 1.0) if n == 1 else TestSet.ball_of_volume(1.0, n)
    return A, D


# ----- commands -----

def cmd_farey_gen(cfg, a) -> int:
    F = enumerate_farey(a.dim, a.level, memory_budget=a.memory_budget, workers=a.threads)
    header = [f"p{i + 1}" for i in range(F.n)] + ["q"]
    if a.out is None:
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([F.p, F.q]), fmt="%d", delimiter=",",
                   header=",".join(header), comments="")
        sys.stdout.write(buf.getvalue())
    else:
        F.to_csv(a.out)
        write_meta(a.out, _meta(cfg, points=len(F)))
    return 0


def cmd_stats(cfg, a) -> int:
    F = enumerate_farey(a.dim, a.level, workers=a.threads)
    extra = {"seed": a.seed}
    if a.action == "gaps":
        if a.dim != 1:
            raise UsageError("--dim: gap statistics need dimension 1")
        grid = a.s_grid or s_grid("0:4:0.05")
        emp = statistics.gap_survival(F, grid)
        rows = [(s, e, limits1d.hall_cdf(s)) for s, e in zip(grid, emp)]
        write_table(a.out, ["s", "survival", "hall_cdf"], rows, a.format,
                    _meta(cfg, gaps=len(F), **extra))
        return 0
    A, D = _split_sets(a.set, a.dim)
    if a.action == "void":
        run = lambda T: statistics.void_statistic(F, T, D, samples=a.samples, seed=a.seed,
                                                  mode=a.mode, kmax=a.kmax, workers=a.threads)
    else:
        run = lambda T: statistics.point_statistic(F, T, D, kmax=a.kmax, workers=a.threads)
    if a.s_grid is None:
        dist = run(A)
        write_table(a.out, ["k", "mass"], enumerate(dist.mass), a.format,
                    _meta(cfg, statistic=dist.metadata, expectation=dist.expectation, **extra))
        return 0
    rows, stat_meta = [], []
    for s in a.s_grid:
        if s == 0:
            raise UsageError("--s-grid: scale factor 0 gives an empty test set")
        dist = run(A.scaled(s))
        top = int(np.max(np.flatnonzero(dist.counts[: dist.kmax + 1]), initial=0))
        rows += [(s, k, dist.mass[k]) for k in range(top + 1)]
        stat_meta.append(dist.metadata)
    write_table(a.out, ["s", "k", "mass"], rows, a.format,
                _meta(cfg, statistic=stat_meta, **extra))
    return 0


def cmd_limits(cfg, a) -> int:
    if a.action == "hall":
        rows = [(s, limits1d.hall_cdf(s), limits1d.hall_density(s), limits1d.p0_quadrature(s))
                for s in a.s_grid]
        write_table(a.out, ["s", "cdf", "density", "quadrature"], rows, a.format, _meta(cfg))
        return 0
    if a.lam > 1:
        raise UsageError("--lambda must lie in (0, 1]")
    row = (a.s, a.lam, limits1d.p0_triangle(a.s, a.lam), limits1d.triangle_oracle(a.s, a.lam))
    write_table(a.out, ["s", "lambda", "closed_form", "oracle"], [row], "csv", _meta(cfg))
    return 0


def cmd_verify(cfg, a) -> int:
    reports = checks.run_checks(a.action, a.tol_profile)
    for r in reports:
        print(r.line())
    payload = {"artifact_version": __version__, "profile": a.tol_profile,
               "passed": summarize(reports), "checks": [r.to_dict() for r in reports]}
    levels = getattr(a, "levels", None)
    if a.action == "equidist" or levels:
        table = equidist.equidistribution_table(levels or [500, 2000, 8000])
        payload["equidist_table"] = table
        for row in table:
            gaps = " ".join(f"{g:.3e}" for g in row["gaps"])
            print(f"  {row['function']}: rhs={row['rhs']:.6g} gaps={gaps} "
                  f"decreasing={row['decreasing']}")
    if a.out is not None:
        a.out.write_text(json.dumps(payload, indent=1, default=_json_default) + "\n")
    print("all checks passed" if payload["passed"] else "verification FAILED")
    return 0 if payload["passed"] else 1


def cmd_nt(cfg, a) -> int:
    if a.action == "table":
        t = numtheory.build_table(a.limit, a.dim)
        rows = [(q, int(t.totient[q]), int(t.mobius[q]), int(t.jordan[q]))
                for q in range(1, a.limit + 1)]
        write_table(a.out, ["q", "phi", "mu", f"J{a.dim}"], rows, "csv", _meta(cfg))
    elif a.action == "kloosterman":
        print(_fmt(numtheory.kloosterman(a.m1, a.m2, a.q)))
    else:
        print(_fmt(numtheory.zeta_real(a.s)))
    return 0


COMMANDS = {"farey": cmd_farey_gen, "stats": cmd_stats, "limits": cmd_limits,
            "verify": cmd_verify, "nt": cmd_nt}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
        args.threads = resolve_threads(args.threads)
        cfg = RunConfig(args.group, args.action, dict(vars(args)))
        return COMMANDS[args.group](cfg, args)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except (UsageError, ValueError) as exc:
        print(f"fareystat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
