"""Command-line interface.

Every subcommand except ``generate`` reads a market-spec file and writes a
JSON report.  Exit status is 0 whenever a verdict was computed (an arbitrage
is a verdict) and 2 when the input cannot be used.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arbitrage import check_na2, check_na_frictionless, find_scps
from .dp import backward_induction
from .enlarged import build_enlarged
from .errors import NAViolated, SpecParseError, SuperhedgeError, Unbounded
from .generate import generate
from .oracles import brute_na2, brute_price_one_period
from .pricing import price_dual, price_enlarged, price_primal, robustness_check
from .specfile import digest, dumps, load

CLOSURE_NOTE = ("dual values are suprema over the closed bid-ask slices; the strict-interior "
                "supremum is the same number and attainment is reported separately")
ROUTES = ("primal", "dual", "enlarged", "dp")


def _s(x) -> str | None:
    return None if x is None else str(x)


def _v(v) -> list[str] | None:
    return None if v is None else [str(a) for a in v]


class Context:
    def __init__(self, args):
        self.args = args
        self.spec = load(args.spec)
        self.tree = self.spec.tree()
        self.claim = self.spec.claim(self.tree)
        self._enlarged = None

    @property
    def enlarged(self):
        if self._enlarged is None:
            self._enlarged = build_enlarged(self.tree, self.args.theta_res)
        return self._enlarged

    def name(self, idx: int) -> str:
        return self.tree[idx].name


# ---------------------------------------------------------------------------
# subcommands

def cmd_check_na2(ctx: Context) -> dict:
    r = check_na2(ctx.tree)
    return {"na2": {"holds": r.holds, "failing_node": r.failing_node, "vertex": _v(r.vertex),
                    "witness": _v(r.witness), "failures": r.failures,
                    "witness_verified": r.verify(ctx.tree)}}


def cmd_check_na(ctx: Context) -> dict:
    r = check_na_frictionless(ctx.enlarged)
    out = {"holds": r.holds, "certificate_verified": r.verify(ctx.enlarged)}
    if r.holds:
        out["martingale"] = [
            {"node": name, "X": _v(X), "weights": [{"X": _v(Y), "w": _s(w)} for Y, w in ws.items()]}
            for (name, X), ws in r.martingale.items()]
    else:
        a = r.arbitrage
        out["arbitrage"] = {"node": a.node, "theta": _v(a.theta), "X": _v(a.X), "h": _v(a.h)}
    return {"na_enlarged": out}


def cmd_find_scps(ctx: Context) -> dict:
    ps = find_scps(ctx.tree)
    if ps is None:
        return {"scps": None}
    return {"scps": {"strict": ps.is_strict, "equivalent": ps.equivalent(ctx.tree),
                     "verified": ps.verify(ctx.tree),
                     "nodes": [{"node": n, "q": _s(ps.q[n]), "Z": _v(ps.Z[n]), "strict": ps.strict[n]}
                               for n in ps.q]}}


def _route(ctx: Context, route: str):
    if route == "primal":
        return price_primal(ctx.tree, ctx.claim).price, {}
    if route == "dual":
        r = price_dual(ctx.tree, ctx.claim)
        return r.price, {"attained_in_interior": r.strict}
    if route == "enlarged":
        return price_enlarged(ctx.enlarged, ctx.claim).price, {}
    if ctx.claim.e:
        return None, {"skipped": "backward induction covers claims without static options"}
    return backward_induction(ctx.enlarged, ctx.claim).price, {}


def cmd_price(ctx: Context) -> dict:
    routes = ROUTES if ctx.args.route == "all" else (ctx.args.route,)
    values, out = {}, {}
    for r in routes:
        try:
            val, extra = _route(ctx, r)
        except Unbounded as exc:
            out[r] = {"value": None, "verdict": "arbitrage", "detail": str(exc)}
            continue
        except NAViolated as exc:
            out[r] = {"value": None, "verdict": "na2-fails", "detail": str(exc)}
            continue
        except SuperhedgeError as exc:
            out[r] = {"value": None, "verdict": "error", "detail": str(exc)}
            continue
        out[r] = {"value": _s(val), **extra}
        if val is not None:
            values[r] = val
    rep = {"prices": out}
    if len(values) > 1:
        gap = max(values.values()) - min(values.values())
        rep["duality_gap"] = str(gap)
        rep["summary"] = f"duality gap: {gap}"
    return rep


def cmd_hedge(ctx: Context) -> dict:
    try:
        res = price_primal(ctx.tree, ctx.claim)
    except Unbounded as exc:
        return {"hedge": None, "verdict": "arbitrage", "detail": str(exc)}
    c = res.certificate
    return {"hedge": {
        "price": str(c.price),
        "ell": _v(c.ell),
        "eta": {ctx.name(k): _v(v) for k, v in sorted(c.eta.items())},
        "residuals": {ctx.name(k): {"vector": _v(r), "in_K_T": ok} for k, (r, ok) in sorted(c.residuals.items())},
        "verified": c.verify(ctx.tree, ctx.claim, res.price),
    }}


def cmd_robustness(ctx: Context) -> dict:
    if not ctx.claim.e:
        return {"robust": None, "detail": "no static options in the claim"}
    return {"robust": robustness_check(ctx.tree, ctx.claim)}


def cmd_verify(ctx: Context) -> dict:
    out: dict = {}
    na2 = check_na2(ctx.tree).holds
    out["na2"] = na2
    out["na_enlarged"] = check_na_frictionless(ctx.enlarged).holds
    out["na_equivalence"] = out["na2"] == out["na_enlarged"]
    if ctx.args.oracle:
        if ctx.tree.d == 2:
            out["oracle_na2"] = brute_na2(ctx.tree)
            out["oracle_na2_agrees"] = out["oracle_na2"] == na2
        if ctx.tree.d == 2 and ctx.tree.T == 1 and not ctx.claim.e and na2:
            oracle = brute_price_one_period(ctx.tree, ctx.claim)
            routes = {r: _route(ctx, r)[0] for r in ROUTES}
            out["oracle_price"] = str(oracle)
            out["route_prices"] = {r: _s(v) for r, v in routes.items()}
            out["oracle_price_agrees"] = all(v == oracle for v in routes.values())
    return {"verify": out}


COMMANDS = {
    "check-na2": cmd_check_na2,
    "check-na": cmd_check_na,
    "find-scps": cmd_find_scps,
    "price": cmd_price,
    "hedge": cmd_hedge,
    "robustness-check": cmd_robustness,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superhedge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("spec", help="market-spec JSON file")
        sp.add_argument("--theta-res", type=int, default=3, help="theta grid points per axis (default 3)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-stability)")
        if name == "price":
            sp.add_argument("--route", choices=ROUTES + ("all",), default="all")
        if name == "verify":
            sp.add_argument("--oracle", action="store_true", help="also run the brute-force oracles")
    g = sub.add_parser("generate")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--T", type=int, default=2)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--branching", type=int, default=2)
    g.add_argument("--kernels", type=int, default=2)
    g.add_argument("--na2", choices=("yes", "no", "any"), default="yes")
    g.add_argument("--statics", type=int, default=0)
    g.add_argument("--out")
    return p


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generate":
        try:
            spec = generate(args.seed, args.T, args.d, args.branching, args.kernels, args.na2, args.statics)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        _write(dumps(spec), args.out)
        return 0
    if args.theta_res < 2:
        print("error: --theta-res must be at least 2", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        ctx = Context(args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"command": args.command, "spec": Path(args.spec).name, "instance": digest(ctx.spec),
              "theta_res": args.theta_res}
    report.update(COMMANDS[args.command](ctx))
    if args.command in ("price", "find-scps"):
        report["deviations"] = [CLOSURE_NOTE]
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 3)
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
