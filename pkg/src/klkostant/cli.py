"""Command-line front end: ``klkostant <subcommand> ...``.

Exit status is 0 on success, 1 when a verified claim fails and 2 on a usage
error (bad permutation, rank above the cap, unknown subcommand).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import cells, claims, hecke, kostant
from .hecke import HARD_RANK_CEILING, RankCapExceeded
from .symgroup import format_perm, inverse, is_involution, parse_perm
from .tableaux import rsk, rsk_inverse, shape

__all__ = ["Config", "main", "build_parser"]

ENV_RANK_CAP = "KLKOSTANT_RANK_CAP"
ENV_CACHE_DIR = "KLKOSTANT_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "klkostant"


class UsageError(Exception):
    pass


@dataclass
class Config:
    rank_cap: int
    cache_dir: Path | None
    output: str
    jobs: int

    @classmethod
    def resolve(cls, args: argparse.Namespace, default_output: str = "table") -> "Config":
        """Flags first, then environment, then built-in defaults."""
        cap = args.rank_cap if args.rank_cap is not None else os.environ.get(ENV_RANK_CAP)
        try:
            cap = int(cap) if cap is not None else hecke.Settings().rank_cap
        except ValueError:
            raise UsageError(f"rank cap must be an integer, got {cap!r}") from None
        if not 1 <= cap <= HARD_RANK_CEILING:
            raise UsageError(f"rank cap must lie in [1, {HARD_RANK_CEILING}], got {cap}")
        if args.no_cache:
            cache = None
        else:
            raw = args.cache_dir or os.environ.get(ENV_CACHE_DIR)
            cache = Path(raw).expanduser() if raw else DEFAULT_CACHE_DIR
            try:
                cache.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise UsageError(f"cannot create cache directory {cache}: {exc}") from None
        jobs = args.jobs if args.jobs is not None else 1
        if jobs < 1:
            raise UsageError("--jobs must be at least 1")
        return cls(cap, cache, args.format or default_output, jobs)

    def apply(self) -> None:
        hecke.configure(rank_cap=self.rank_cap, cache_dir=self.cache_dir)


# ---------------------------------------------------------------------------
# Helpers


def _perm(text: str, n: int | None = None):
    try:
        return parse_perm(text, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _same_rank(*perms) -> int:
    ranks = {len(p) for p in perms}
    if len(ranks) != 1:
        raise UsageError("permutations must have the same rank")
    return ranks.pop()


def _involution(text: str, n: int | None):
    z = _perm(text, n)
    if not is_involution(z):
        raise UsageError(f"{format_perm(z)} is not an involution")
    return z


def _tableau_text(t) -> str:
    return "[" + ",".join("[" + ",".join(map(str, row)) + "]" for row in t) + "]"


def _emit(cfg: Config, data: dict, lines: list[str]) -> None:
    if cfg.output == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_rsk(args, cfg: Config) -> int:
    x = _perm(args.perm, args.n)
    p, q = rsk(x)
    lam = shape(x)
    data = {"input": format_perm(x), "P": [list(r) for r in p], "Q": [list(r) for r in q], "shape": list(lam)}
    _emit(cfg, data, [f"P = {_tableau_text(p)}", f"Q = {_tableau_text(q)}", f"shape = {lam}"])
    return 0


def cmd_klpoly(args, cfg: Config) -> int:
    x, y = _perm(args.x, args.n), _perm(args.y, args.n)
    _same_rank(x, y)
    p = hecke.kl_poly(x, y)
    data = {"x": format_perm(x), "y": format_perm(y), "p": str(p)}
    _emit(cfg, data, [f"p_({format_perm(x)}),({format_perm(y)}) = {p}"])
    return 0


def cmd_mu(args, cfg: Config) -> int:
    x, y = _perm(args.x, args.n), _perm(args.y, args.n)
    _same_rank(x, y)
    m = hecke.mu(x, y)
    _emit(cfg, {"x": format_perm(x), "y": format_perm(y), "mu": m}, [str(m)])
    return 0


def cmd_cmul(args, cfg: Config) -> int:
    x, y = _perm(args.x, args.n), _perm(args.y, args.n)
    n = _same_rank(x, y)
    h = hecke.HeckeElement(n, "C", hecke.c_mul_rule(x, y))
    _emit(cfg, {"x": format_perm(x), "y": format_perm(y), "product": h.to_json()}, [str(h)])
    return 0


def cmd_dprod(args, cfg: Config) -> int:
    z, x = _perm(args.z, args.n), _perm(args.x, args.n)
    _same_rank(z, x)
    h = hecke.d_mul_c(z, x, algorithm=args.algorithm)
    at_one = {format_perm(a): c for a, c in sorted(h.eval_at_one().items())}
    data = {"z": format_perm(z), "x": format_perm(x), "product": h.to_json(), "at_v_equals_1": at_one}
    summary = " + ".join(f"{c}*D_{a}" for a, c in at_one.items()) or "0"
    _emit(cfg, data, [f"D_z C_x = {h}", f"at v=1: {summary}"])
    return 0


def cmd_leq(args, cfg: Config) -> int:
    x, z = _perm(args.x, args.n), _perm(args.z, args.n)
    _same_rank(x, z)
    if args.side == "right":
        ok, trace = cells.leq_L_traced(inverse(x), inverse(z))
        trace.insert(0, "right preorder: testing the inverses in the left preorder")
    else:
        ok, trace = cells.leq_L_traced(x, z)
    rel = "<=_R" if args.side == "right" else "<=_L"
    data = {"x": format_perm(x), "z": format_perm(z), "side": args.side, "holds": ok, "trace": trace}
    _emit(cfg, data, [f"{format_perm(x)} {rel} {format_perm(z)}: {ok}", *("  " + t for t in trace)])
    return 0


def cmd_cells(args, cfg: Config) -> int:
    hl = _involution(args.highlight, args.n) if args.highlight else None
    if hl is not None and len(hl) != args.n:
        raise UsageError("highlight has the wrong rank")
    poset = cells.cell_poset(args.n, highlight=hl, kind=args.kind)
    if cfg.output == "json":
        print(cells.poset_to_json(poset))
    elif cfg.output == "dot":
        print(cells.poset_to_dot(poset), end="")
    else:
        for a, (c, ms) in enumerate(zip(poset.cells, poset.members)):
            above = [b for s, b in poset.edges if s == a]
            print(f"c{a} shape {c.shape}: {' '.join(format_perm(p) for p in ms)}  < {above}")
    return 0


def cmd_classify(args, cfg: Config) -> int:
    z = _involution(args.perm, args.n)
    try:
        t = kostant.classify_type(z)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(cfg, {"input": format_perm(z), **t.to_json()},
          [f"type {t.tag}: n={t.n} i={t.i} j={t.j} k={t.k}"])
    return 0


def cmd_kostant(args, cfg: Config) -> int:
    x = _perm(args.perm, args.n)
    verdict = kostant.kostant_by_pattern(x)
    q = rsk(x)[1]
    z = rsk_inverse(q, q)
    lam = shape(z)
    typ = None
    if len(lam) == 3 and lam[1:] == (2, 1) and len(x) >= 5:
        typ = kostant.classify_type(z).to_json()
    if verdict.witness is not None:
        report = f"involution {format_perm(z)} contains {verdict.witness_text()}"
    elif verdict.status == "Positive":
        report = f"involution {format_perm(z)} avoids every negative pattern"
    else:
        report = f"no criterion for shape {lam}; no negative pattern in {format_perm(z)}"
    data = {
        "input": format_perm(x),
        "shape": list(lam),
        "type": typ,
        "status": verdict.status,
        "witness": verdict.witness_text(),
        "citation": verdict.citation,
        "report": report,
    }
    line = verdict.status
    if verdict.witness is not None:
        line += f", witness {verdict.witness_text()}"
    if verdict.citation:
        line += f", citation {verdict.citation}"
    _emit(cfg, data, [line, report])
    return 0


def cmd_kahrstrom(args, cfg: Config) -> int:
    z = _involution(args.perm, args.n)
    rep = kostant.kahrstrom_check(z, graded=args.graded)
    lines = [
        f"{format_perm(z)}: {'holds' if rep.holds else 'fails'} "
        f"({'graded' if rep.graded else 'ungraded'}, cone size {rep.cone_size})"
    ]
    lines += [f"  collision {format_perm(a)} ~ {format_perm(b)}" for a, b in rep.collisions]
    if rep.exploratory:
        lines.append("  exploratory: no theorem covers this shape")
    _emit(cfg, rep.to_json(), lines)
    return 0


def cmd_count(args, cfg: Config) -> int:
    try:
        formula, enumerated = kostant.count_negative(args.family, args.top)
        ratio = kostant.asymptotic_ratio(args.family, args.top)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = {"family": args.family, "n": args.top, "formula": formula, "enumerated": enumerated,
            "agree": formula == enumerated, "ratio": str(ratio)}
    _emit(cfg, data, [f"formula {formula}, enumerated {enumerated}, ratio {ratio}"])
    return 0


def _init_worker(cap: int, cache: Path | None) -> None:
    hecke.configure(rank_cap=cap, cache_dir=cache)


def cmd_verify(args, cfg: Config) -> int:
    max_rank = min(args.max_rank, cfg.rank_cap) if args.max_rank is not None else cfg.rank_cap
    ids = [c for c in claims.CLAIMS if args.only is None or c.startswith(args.only)]
    if not ids:
        raise UsageError(f"no claim matches {args.only!r}")
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker,
                                 initargs=(cfg.rank_cap, cfg.cache_dir)) as pool:
            reports = list(pool.map(claims.run_claim, ids, [max_rank] * len(ids)))
    else:
        reports = [claims.run_claim(c, max_rank) for c in ids]
    if cfg.output == "json":
        print(claims.reports_to_json(reports))
    else:
        print(claims.render_table(reports, verbose=args.verbose))
    return 0 if all(r.passed for r in reports) else 1


def cmd_cache(args, cfg: Config) -> int:
    if args.action == "clear":
        hecke.clear_tables(disk=True)
        print(f"cleared {cfg.cache_dir}" if cfg.cache_dir else "cleared in-memory tables")
        return 0
    if args.action == "warm":
        if args.n is None:
            raise UsageError("cache warm needs -n")
        for n in range(1, args.n + 1):
            hecke.save_table(n)
    stats = hecke.cache_stats()
    if cfg.output == "json":
        print(json.dumps(stats, indent=2))
    else:
        print(f"cache directory: {stats['cache_dir']}")
        print(f"rank cap: {stats['rank_cap']}")
        for f in stats["files"]:
            print(f"  {f['file']}  {f['bytes']} bytes")
        for n, pairs in stats["loaded_ranks"].items():
            print(f"  rank {n} in memory: {pairs} stored pairs")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--rank-cap", type=int, default=argparse.SUPPRESS,
                   help=f"largest rank for KL tables (env {ENV_RANK_CAP}, ceiling {HARD_RANK_CEILING})")
    p.add_argument("--cache-dir", default=argparse.SUPPRESS,
                   help=f"directory for persisted KL tables (env {ENV_CACHE_DIR})")
    p.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS,
                   help="do not read or write persisted tables")
    p.add_argument("--format", choices=("table", "json", "dot"), default=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for verify")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="klkostant", parents=[common],
        description="Kazhdan-Lusztig computations for S_n and Kostant's problem verdicts. "
        "Permutations are one-line (3,1,2 or 312) or reduced words (w:1,2 with -n).",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def rank(p, required=False):
        p.add_argument("-n", type=int, required=required, help="rank (required for w: words)")

    p = add("rsk", cmd_rsk, "insertion and recording tableaux")
    p.add_argument("perm")
    rank(p)
    for name, func, text in (("klpoly", cmd_klpoly, "KL polynomial p_{x,y}"), ("mu", cmd_mu, "mu(x,y)"),
                             ("cmul", cmd_cmul, "C_x C_y in the C basis")):
        p = add(name, func, text)
        p.add_argument("x")
        p.add_argument("y")
        rank(p)
    p = add("dprod", cmd_dprod, "D_z C_x in the D basis")
    p.add_argument("z")
    p.add_argument("x")
    rank(p)
    p.add_argument("--algorithm", choices=("A", "B"), default="B")
    p = add("leq", cmd_leq, "KL preorder test with reduction trace")
    side = p.add_mutually_exclusive_group()
    side.add_argument("--left", dest="side", action="store_const", const="left")
    side.add_argument("--right", dest="side", action="store_const", const="right")
    p.set_defaults(side="left")
    p.add_argument("x")
    p.add_argument("z")
    rank(p)
    p = add("cells", cmd_cells, "cell poset as DOT or JSON")
    rank(p, required=True)
    p.add_argument("--highlight", help="colour cell members by comparison with this involution")
    p.add_argument("--kind", choices=("left", "right"), default="left")
    p = add("classify", cmd_classify, "type of a shape (n-3,2,1) involution")
    p.add_argument("perm")
    rank(p)
    p = add("kostant", cmd_kostant, "Kostant's problem verdict")
    p.add_argument("perm")
    rank(p)
    p = add("kahrstrom", cmd_kahrstrom, "injectivity check on the cone below an involution")
    p.add_argument("perm")
    rank(p)
    p.add_argument("--graded", action="store_true")
    p = add("count", cmd_count, "negative counts: closed form against enumeration")
    p.add_argument("--family", choices=("11", "21"), required=True)
    p.add_argument("--n", dest="top", type=int, required=True, help="length of the top row")
    p = add("verify", cmd_verify, "re-run the registered computations")
    p.add_argument("--only", help="claim id prefix")
    p.add_argument("--max-rank", type=int, help="skip heavy checks above this rank")
    p.add_argument("-v", "--verbose", action="store_true")
    p = add("cache", cmd_cache, "persisted KL tables")
    p.add_argument("action", choices=("stats", "clear", "warm"))
    rank(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("rank_cap", "cache_dir", "format", "jobs"):
        setattr(args, name, getattr(args, name, None))
    args.no_cache = getattr(args, "no_cache", False)
    default_output = "dot" if args.command == "cells" else "table"
    try:
        cfg = Config.resolve(args, default_output)
        if cfg.output == "dot" and args.command != "cells":
            raise UsageError("--format dot is only available for cells")
        cfg.apply()
        return args.func(args, cfg)
    except (UsageError, RankCapExceeded, ValueError) as exc:
        print(f"klkostant: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
