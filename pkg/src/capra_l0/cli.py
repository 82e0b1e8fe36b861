"""Command-line interface: ``capra-l0 <command> ...``.

Exit codes: 0 success, 1 usage error, 2 domain or budget error,
3 negative membership verdict.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bounds import build_model, dumps_model, eval_model, loads_model
from .capra import admissible_levels, capra_biconjugate, capra_conjugate
from .norms import PExponent
from .oracle import BudgetExceeded
from .subdiff import region_sweep, region_sweep_classes, subdiff_member
from .verify import run_all

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NOT_MEMBER = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v):
    """12 significant digits, without a negative zero."""
    return format(float(v) + 0.0, ".12g")


def parse_vector(text, name):
    try:
        values = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated reals, got {text!r}") from None
    arr = np.array(values)
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"--{name}: entries must be finite")
    return arr


def parse_p(text):
    try:
        return PExponent.parse(text)
    except ValueError as exc:
        if "cannot read" in str(exc):
            raise UsageError(str(exc)) from None
        raise DomainError(str(exc)) from None


def parse_window(text):
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"--window: expected lo:hi, got {text!r}") from None
    if not lo < hi:
        raise UsageError("--window: need lo < hi")
    return lo, hi


def header(p, tol, **extra):
    parts = [f"capra-l0 {__version__}", f"p={p}", f"tol={tol:g}"]
    parts += [f"{k}={v}" for k, v in extra.items()]
    return " ".join(parts)


def cmd_conj(args):
    p = parse_p(args.p)
    print(fmt(capra_conjugate(parse_vector(args.y, "y"), p)))
    return EXIT_OK


def cmd_biconj(args):
    p = parse_p(args.p)
    print(fmt(capra_biconjugate(parse_vector(args.x, "x"), p)))
    return EXIT_OK


def cmd_levels(args):
    p = parse_p(args.p)
    levels = admissible_levels(parse_vector(args.y, "y"), p, args.tol)
    print(" ".join(str(l) for l in sorted(levels)))
    return EXIT_OK


def cmd_subdiff_check(args):
    p = parse_p(args.p)
    x, y = parse_vector(args.x, "x"), parse_vector(args.y, "y")
    if x.shape != y.shape:
        raise UsageError(f"dimension mismatch: x has {x.size} entries, y has {y.size}")
    verdict = subdiff_member(x, y, p, args.tol)
    print("MEMBER" if verdict.member else "NOT_MEMBER")
    for c in verdict.conditions:
        status = "ok" if c.satisfied else "FAIL"
        print(f"{c.name:<16} {status:<4} lhs={fmt(c.lhs)} rhs={fmt(c.rhs)}")
    return EXIT_OK if verdict.member else EXIT_NOT_MEMBER


def region_csv(grid, head):
    lines = [f"# {head}"]
    if grid.classes is None:
        lines.append("y1,y2,member")
        for a, b, flag in grid.cells():
            lines.append(f"{fmt(a)},{fmt(b)},{int(flag)}")
    else:
        lines.append("y1,y2,member,classes")
        for i, b in enumerate(grid.y2):
            for j, a in enumerate(grid.y1):
                c = int(grid.classes[i, j])
                lines.append(f"{fmt(a)},{fmt(b)},{int(c > 0)},{c}")
    return "\n".join(lines) + "\n"


def region_json(grid, head, p, tol, x):
    doc = {
        "header": head,
        "p": str(p),
        "tol": tol,
        "x": None if x is None else [float(v) for v in x],
        "step": grid.step,
        "y1": [float(v) for v in grid.y1],
        "y2": [float(v) for v in grid.y2],
        "member": grid.member.astype(int).tolist(),
    }
    if grid.classes is not None:
        doc["classes"] = grid.classes.astype(int).tolist()
    return json.dumps(doc, separators=(",", ":")) + "\n"


_COLORS = {0: "#2ca02c", 1: "#d62728", 2: "#1f77b4"}


def _runs(mask):
    """Maximal horizontal runs of True cells as ``(row, start, length)``."""
    for i, row in enumerate(mask):
        padded = np.concatenate([[False], row, [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(padded))
        for start, stop in zip(edges[::2], edges[1::2]):
            yield i, int(start), int(stop - start)


def region_svg(grid, head):
    h = grid.step
    x0, x1 = grid.y1[0] - h / 2, grid.y1[-1] + h / 2
    y0, y1 = grid.y2[0] - h / 2, grid.y2[-1] + h / 2
    w, ht = x1 - x0, y1 - y0
    size = 600
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- {head} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{fmt(size * ht / w)}" viewBox="{fmt(x0)} {fmt(-y1)} {fmt(w)} {fmt(ht)}">',
        f'<rect x="{fmt(x0)}" y="{fmt(-y1)}" width="{fmt(w)}" height="{fmt(ht)}" fill="white"/>',
    ]
    if grid.classes is None:
        layers = [(_COLORS[1], grid.member, 1.0)]
    else:
        layers = [(_COLORS[c], (grid.classes & (1 << c)) > 0, 0.5) for c in (2, 1, 0)]
    for color, mask, opacity in layers:
        out.append(f'<g fill="{color}" fill-opacity="{opacity:g}">')
        for i, j, n in _runs(mask):
            out.append(
                f'<rect x="{fmt(grid.y1[j] - h / 2)}" y="{fmt(-grid.y2[i] - h / 2)}" '
                f'width="{fmt(n * h)}" height="{fmt(h)}"/>'
            )
        out.append("</g>")
    sw = fmt(w / size)
    out.append(f'<line x1="{fmt(x0)}" y1="0" x2="{fmt(x1)}" y2="0" stroke="black" stroke-width="{sw}"/>')
    out.append(f'<line x1="0" y1="{fmt(-y1)}" x2="0" y2="{fmt(-y0)}" stroke="black" stroke-width="{sw}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_region(args):
    p = parse_p(args.p)
    window = parse_window(args.window)
    if not args.step > 0:
        raise UsageError("--step must be positive")
    if args.all_classes:
        x = None
        grid = region_sweep_classes(p, window, args.step, args.tol)
        head = header(p, args.tol, mode="all-classes", window=args.window, step=fmt(args.step))
    else:
        if args.x is None:
            raise UsageError("region needs --x or --all-classes")
        x = parse_vector(args.x, "x")
        if x.size != 2:
            raise UsageError("region sweeps need a 2-D point")
        grid = region_sweep(x, p, window, args.step, args.tol)
        head = header(p, args.tol, x=",".join(fmt(v) for v in x), window=args.window, step=fmt(args.step))
    if args.format == "csv":
        text = region_csv(grid, head)
    elif args.format == "json":
        text = region_json(grid, head, p, args.tol, x)
    else:
        text = region_svg(grid, head)
    _write(args.out, text)
    return EXIT_OK


def read_samples(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                rows.append(parse_vector(line, "samples"))
    if not rows:
        raise UsageError(f"no sample vectors in {path}")
    if len({r.size for r in rows}) != 1:
        raise UsageError("sample vectors differ in dimension")
    return np.array(rows)


def cmd_lower_build(args):
    p = parse_p(args.p)
    if p.regime != "mid":
        raise DomainError(f"lower-bound models need 1 < p < inf, got p={p}")
    model = build_model(read_samples(args.samples), p, args.tol)
    _write(args.out, dumps_model(model))
    return EXIT_OK


def cmd_lower_eval(args):
    with open(args.model, encoding="utf-8") as fh:
        try:
            model = loads_model(fh.read())
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad model file: {exc}") from None
    x = parse_vector(args.x, "x")
    if x.size != model.d:
        raise UsageError(f"model has dimension {model.d}, x has {x.size}")
    print(fmt(eval_model(model, x)))
    return EXIT_OK


def cmd_verify(args):
    p = parse_p(args.p)
    if args.dim < 1 or args.trials < 1 or not args.step > 0:
        raise UsageError("--dim and --trials must be positive, --step > 0")
    try:
        results = run_all(p, args.dim, args.trials, args.seed, args.step, args.tol)
    except BudgetExceeded as exc:
        raise DomainError(str(exc)) from None
    print(header(p, args.tol, dim=args.dim, trials=args.trials, seed=args.seed, step=fmt(args.step)))
    for r in results:
        state = "skip" if r.skipped else ("PASS" if r.ok else "FAIL")
        print(f"{state:<5} {r.name:<28} passed={r.passed} failed={r.failed}")
    ok = all(r.ok for r in results)
    print("all suites passed" if ok else "some suites FAILED")
    return EXIT_OK if ok else EXIT_DOMAIN


def build_parser():
    parser = _Parser(prog="capra-l0", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"capra-l0 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tol=True):
        sp.add_argument("--p", required=True, help="source-norm exponent: a number >= 1 or 'inf'")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("conj", help="Capra conjugate of l0 at a dual point")
    common(sp, tol=False)
    sp.add_argument("--y", required=True)
    sp.set_defaults(func=cmd_conj)

    sp = sub.add_parser("biconj", help="Capra biconjugate of l0 at a primal point")
    common(sp, tol=False)
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_biconj)

    sp = sub.add_parser("levels", help="levels l with y in the admissible-dual set D_l")
    common(sp)
    sp.add_argument("--y", required=True)
    sp.set_defaults(func=cmd_levels)

    sp = sub.add_parser("subdiff", help="Capra-subdifferential queries")
    subsub = sp.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    chk = subsub.add_parser("check", help="membership verdict with condition table")
    common(chk)
    chk.add_argument("--x", required=True)
    chk.add_argument("--y", required=True)
    chk.set_defaults(func=cmd_subdiff_check)

    sp = sub.add_parser("region", help="sweep a planar subdifferential over a window")
    common(sp)
    sp.add_argument("--x")
    sp.add_argument("--all-classes", action="store_true",
                    help="union over all x, colored by the l0 class of x")
    sp.add_argument("--window", default="-12:12")
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("lower", help="max-of-Capra-affine lower bounds of l0")
    subsub = sp.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    b = subsub.add_parser("build")
    common(b)
    b.add_argument("--samples", required=True, help="file with one comma-separated vector per line")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_lower_build)
    e = subsub.add_parser("eval")
    e.add_argument("--model", required=True)
    e.add_argument("--x", required=True)
    e.set_defaults(func=cmd_lower_eval)

    sp = sub.add_parser("verify", help="run oracle-versus-closed-form suites")
    common(sp)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.set_defaults(func=cmd_verify)
    return parser


_VALUE_FLAGS = ("--x", "--y", "--window")


def _glue_negative_values(argv):
    # argparse would read "-1,2" as an option; rewrite "--y -1,2" to "--y=-1,2"
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt[:1] == "-" and (nxt[1:2].isdigit() or nxt[1:2] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"capra-l0: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, BudgetExceeded) as exc:
        print(f"capra-l0: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"capra-l0: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
