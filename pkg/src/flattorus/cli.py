"""Command line entry point.

Results go to stdout as JSON or CSV; human-readable summaries go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import checks
from .overlap import OverlapMethod, f_hht, f_hhh, f_htt, f_numeric, f_qqq, f_tqq
from .probability import (ModuliAverageConfig, QuadratureError, modular_volume, moduli_average,
                          p_closed_form, p_monte_carlo)
from .shapes import corner_triangle, hexagon_h, hexagon_v, unit_square
from .torus import TauParam, dirichlet_domain, in_modular_domain, reduce_to_fundamental

COMMANDS = ("eval", "mc", "scan", "average", "overlap", "dirichlet", "verify")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    tau: Optional[tuple] = None
    reduce: bool = False
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1
    output: Optional[str] = None
    grid: Optional[tuple] = None
    b_range: tuple = (0.8660254037844386, 3.0)
    b_max: float = 100.0
    tol: float = 1e-6
    tail: bool = True
    sets: str = "HHH"
    st: Optional[tuple] = None
    method: str = "monte-carlo"
    budget: str = "quick"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.command in ("eval", "mc", "dirichlet") and self.tau is None:
            raise UsageError(f"{self.command} needs --tau a,b")
        if self.command == "scan" and self.grid is None:
            raise UsageError("scan needs --grid na,nb")


def _pair(text: str) -> tuple:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return x, y


def _int_pair(text: str) -> tuple:
    x, y = _pair(text)
    return int(x), int(y)


def resolve_tau(cfg: RunConfig) -> TauParam:
    a, b = cfg.tau
    if b <= 0:
        raise UsageError(f"tau = {a}+{b}i: imaginary part must be positive")
    if cfg.reduce:
        tau, word = reduce_to_fundamental(a, b)
        if word:
            _say(f"reduced {a}+{b}i to {tau.a!r}+{tau.b!r}i via {word}")
        return tau
    if not in_modular_domain(a, b):
        raise UsageError(f"tau = {a}+{b}i is outside the modular domain; pass --reduce to "
                         "move it there first")
    return TauParam(a, b)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
        _say(f"wrote {cfg.output}")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=False) + "\n"


def _scan_rows(cfg: RunConfig):
    na, nb = cfg.grid
    lo, hi = cfg.b_range
    for i in range(na):
        a = -0.5 + (i + 1) / na
        for j in range(nb):
            b = lo + (hi - lo) * j / (nb - 1) if nb > 1 else lo
            if in_modular_domain(a, b):
                yield a, b


def _overlap_sets(cfg: RunConfig):
    key = cfg.sets.upper()
    if len(key) != 3:
        raise UsageError("--sets takes three letters from Q, T, H, V, D (e.g. HHT)")
    if "D" in key:
        if cfg.tau is None:
            raise UsageError("set D needs --tau")
        dom = dirichlet_domain(resolve_tau(cfg)).hexagon
    s, t = cfg.st if cfg.st else (0.5, 0.5)
    table = {"Q": unit_square, "T": lambda: corner_triangle(s, t),
             "H": lambda: hexagon_h(s, t), "V": lambda: hexagon_v(s, t), "D": lambda: dom}
    try:
        return tuple(table[c]() for c in key)
    except KeyError as exc:
        raise UsageError(f"unknown set letter {exc.args[0]!r}")


_CLOSED = {"QQQ": lambda s, t: f_qqq(), "TQQ": f_tqq, "HTT": f_htt, "HHT": f_hht, "HHH": f_hhh}


def run(cfg: RunConfig) -> int:
    cmd = cfg.command
    if cmd == "eval":
        tau = resolve_tau(cfg)
        p = p_closed_form(tau)
        _say(f"P({tau.a!r} + {tau.b!r}i) = {p:.12f}")
        _emit(cfg, f"{p!r}\n")

    elif cmd == "mc":
        tau = resolve_tau(cfg)
        est = p_monte_carlo(tau, cfg.samples, cfg.seed, cfg.workers)
        exact = p_closed_form(tau)
        _say(f"seed={cfg.seed} workers={cfg.workers}: {est.mean:.6f} +- {est.std_error:.2e} "
             f"(closed form {exact:.6f})")
        rec = {"tau": [tau.a, tau.b], **est.to_json(), "workers": cfg.workers, "closed_form": exact}
        _emit(cfg, _json(rec))

    elif cmd == "scan":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "p_closed", "p_mc", "mc_stderr", "n", "seed"])
        rows = 0
        for a, b in _scan_rows(cfg):
            tau = TauParam(a, b)
            row = [repr(a), repr(b), repr(p_closed_form(tau))]
            if cfg.samples:
                est = p_monte_carlo(tau, cfg.samples, cfg.seed + rows, cfg.workers)
                row += [repr(est.mean), repr(est.std_error), est.n, cfg.seed + rows]
            else:
                row += ["", "", "", ""]
            w.writerow(row)
            rows += 1
        _say(f"scan: {rows} rows" + (f", base seed {cfg.seed}" if cfg.samples else ""))
        _emit(cfg, buf.getvalue())

    elif cmd == "average":
        mc = ModuliAverageConfig(b_max=cfg.b_max, tol=cfg.tol, include_tail=cfg.tail)
        try:
            res = moduli_average(mc)
        except QuadratureError as exc:
            _say(f"average failed: {exc}; partial integral {exc.partial!r} over {exc.cells} cells")
            return 1
        _say(f"average = {res.value:.10f} over {res.cells} cells; "
             f"volume check {modular_volume(mc):.10f}")
        _emit(cfg, _json(res.to_json()))

    elif cmd == "overlap":
        sets = _overlap_sets(cfg)
        est = f_numeric(*sets, OverlapMethod(cfg.method, cfg.samples), cfg.seed)
        key = cfg.sets.upper()
        if key in _CLOSED:
            s, t = cfg.st if cfg.st else (0.5, 0.5)
            _say(f"F({key}) closed form = {_CLOSED[key](s, t)!r}")
        _say(f"F({key}) ~ {est.mean:.8f} +- {est.std_error:.2e} ({est.method}, n={est.n}, "
             f"seed={est.seed})")
        _emit(cfg, _json(est.to_json()))

    elif cmd == "dirichlet":
        dom = dirichlet_domain(resolve_tau(cfg))
        _emit(cfg, _json(dom.to_json()))

    elif cmd == "verify":
        results = checks.run_all(cfg.budget, log=_say)
        failed = [r for r in results if not r.passed]
        _say(f"{len(results) - len(failed)}/{len(results)} checks passed")
        _emit(cfg, _json([r.to_json() for r in results]))
        return 1 if failed else 0
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flattorus",
                                     description="Trivial-triangle probability on flat tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tau=False, seed=False):
        if tau:
            p.add_argument("--tau", type=_pair, help="torus shape as a,b (tau = a + ib)")
            p.add_argument("--reduce", action="store_true",
                           help="move tau into the modular domain first")
        if seed:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--workers", type=int, default=1)
        p.add_argument("-o", "--output", help="write the result here instead of stdout")

    common(sub.add_parser("eval", help="closed-form probability"), tau=True)
    p = sub.add_parser("mc", help="Monte Carlo estimate of the probability")
    common(p, tau=True, seed=True)
    p.add_argument("--samples", type=int, default=1_000_000)

    p = sub.add_parser("scan", help="CSV of the probability over a grid of shapes")
    common(p, seed=True)
    p.add_argument("--grid", type=_int_pair, required=True, help="na,nb")
    p.add_argument("--b-range", type=_pair, default=(0.8660254037844386, 3.0))
    p.add_argument("--mc-samples", dest="samples", type=int, default=0,
                   help="also run Monte Carlo with this many triples per row")

    p = sub.add_parser("average", help="average over the moduli space")
    common(p)
    p.add_argument("--b-max", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--no-tail", dest="tail", action="store_false")

    p = sub.add_parser("overlap", help="numeric overlap functional F for shapes of the family")
    common(p, tau=True, seed=True)
    p.add_argument("--sets", default="HHH", help="three of Q,T,H,V,D, e.g. HHT")
    p.add_argument("--st", type=_pair, help="corner legs s,t (default 0.5,0.5)")
    p.add_argument("--method", choices=["monte-carlo", "midpoint-quadrature"],
                   default="monte-carlo")
    p.add_argument("--budget", dest="samples", type=int, default=200_000)

    common(sub.add_parser("dirichlet", help="Dirichlet domain as JSON"), tau=True)

    p = sub.add_parser("verify", help="run the invariant suite")
    common(p)
    p.add_argument("--budget", choices=["quick", "full"], default="quick")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    try:
        cfg = RunConfig(**fields)
        return run(cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except ValueError as exc:
        parser.error(str(exc))
