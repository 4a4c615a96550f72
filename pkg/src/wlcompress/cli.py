"""Command-line front end.

Exit codes: 0 success, 2 verification failure, 3 resource cap hit,
4 usage error. Records go to stdout (or ``--output``) as canonical JSON;
wall-clock timings only appear on stderr with ``--timing``.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import experiments as ex
from . import games
from . import grid_compression as gcm
from . import io as gio
from . import verify
from .cfi import SizeCapExceeded
from .compression import compressed_vertex_count
from .wl import TupleCapExceeded

log = logging.getLogger("wlcompress")

EXIT_OK, EXIT_VERIFY, EXIT_CAP, EXIT_USAGE = 0, 2, 3, 4


class UsageError(Exception):
    pass


# ---- shared helpers ----------------------------------------------------------


def _emit(args, obj) -> None:
    text = gio.dumps_json(obj)
    if getattr(args, "output", None):
        gio.atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def _timing(args, rec: ex.ExperimentRecord) -> None:
    if getattr(args, "timing", False):
        print(json.dumps(rec.timing), file=sys.stderr)


def _compressed_desc(args, variant: str | None = None) -> dict:
    desc = {"family": "compressed", "k": args.k, "w": args.w}
    if args.periods:
        desc["periods"] = args.periods
    if args.toy or args.periods:
        desc["toy"] = True
    if variant is not None:
        desc["variant"] = variant
    return desc


def _pair_desc(args) -> dict:
    if args.compressed:
        desc = _compressed_desc(args, args.variant)
    else:
        if not args.shape:
            raise UsageError("give --grid/--cylinder/--torus SHAPE or --compressed")
        desc = {"family": args.family, "shape": args.shape, "variant": "cfi"}
    desc["twist"] = _twist(args.twist)
    return desc


def _twist(text: str):
    if text in ("first-column", "none"):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"--twist must be first-column, none or a JSON edge list, got {text!r}") from None


def _add_family(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    for fam in ex.FAMILIES:
        g.add_argument(f"--{fam}", dest="shape_" + fam, metavar="RxC", help=f"{fam} base graph")
    g.add_argument("--compressed", action="store_true", help="compressed cylindrical grid (needs --k and --w)")


def _add_grid(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--k", type=int, required=required, help="number of rows (k >= 3)")
    p.add_argument("--w", type=int, required=required, help="width parameter")
    p.add_argument("--periods", type=int, nargs="+", help="explicit row periods (implies --toy)")
    p.add_argument("--toy", action="store_true", help="allow w below 2 f(k)")


def _resolve_family(args) -> None:
    args.family, args.shape = None, None
    for fam in ex.FAMILIES:
        val = getattr(args, "shape_" + fam, None)
        if val:
            args.family, args.shape = fam, val
    if getattr(args, "compressed", False) and (args.k is None or args.w is None):
        raise UsageError("--compressed needs --k and --w")


def _read_graph(path: str, fmt: str | None):
    fmt = fmt or _guess_format(path)
    return gio.import_graph(Path(path).read_text(), fmt)


def _guess_format(path: str) -> str:
    suffix = Path(path).suffix.lower()
    return {".json": "json", ".dimacs": "dimacs", ".col": "dimacs", ".g6": "graph6"}.get(suffix, "json")


# ---- subcommands -------------------------------------------------------------


def cmd_gen_base(args) -> int:
    _resolve_family(args)
    if args.compressed:
        gc = gcm.grid(ex.grid_params(_compressed_desc(args)))
        G, meta = gc.base, {"family": "compressed-cylinder", **gc.params.as_dict()}
        graph = G.as_colored_graph()
        graph = type(graph)(graph.colors, graph.adjacency, tuple(gc.compression.class_of), G.coords)
    elif args.shape:
        rows, cols = ex.parse_shape(args.shape)
        G = ex.base_graph(args.family, rows, cols)
        base = G.as_colored_graph()
        graph = type(base)(base.colors, base.adjacency, None, G.coords)
        meta = {"family": args.family, "shape": args.shape}
    else:
        raise UsageError("give --grid/--cylinder/--torus SHAPE or --compressed")
    _emit(args, gio.graph_to_json(graph, meta))
    return EXIT_OK


def _write_pair(args, desc: dict) -> int:
    A, B, info = ex.build_pair(desc)
    truth = "isomorphic" if info["isomorphic"] else "non-isomorphic"
    manifest = gio.export_pair(A, B, args.outdir, args.format, truth, {"instance": desc, **info}, force=args.force)
    if desc.get("family") == "compressed":
        gc = gcm.grid(ex.grid_params(desc))
        classes = gc.compression.classes()
        classmap = {
            "base_class_of": list(gc.compression.class_of),
            "base_coords": [list(gc.coord(v)) for v in range(gc.base.n)],
            "compressed_members": [[list(gc.coord(u)) for u in classes[c]] for c, _ in (A.labels or [])]
            if desc.get("variant") == "compressed"
            else None,
        }
        gio.atomic_write(Path(args.outdir) / "classes.json", gio.dumps_json(classmap))
        manifest["class_map"] = "classes.json"
    _emit(args, manifest)
    return EXIT_OK


def cmd_gen_cfi(args) -> int:
    _resolve_family(args)
    return _write_pair(args, _pair_desc(args))


def cmd_gen_compressed(args) -> int:
    desc = _compressed_desc(args, args.variant)
    desc["twist"] = _twist(args.twist)
    gc = gcm.grid(ex.grid_params(desc))
    log.info(
        "%d classes, %d compressed vertices (bound %d)",
        gc.compression.class_count(),
        compressed_vertex_count(gc.base, gc.compression),
        2 ** (gc.base.max_degree() - 1) * gc.compression.class_count(),
    )
    return _write_pair(args, desc)


def cmd_wl(args) -> int:
    G = _read_graph(args.input, args.input_format)
    rec = ex.run_wl(G, args.dim, args.max_rounds, args.tuple_cap, desc={"input": Path(args.input).name})
    _emit(args, rec.as_dict())
    _timing(args, rec)
    return EXIT_OK


def cmd_distinguish(args) -> int:
    _resolve_family(args)
    if args.inputs:
        from .wl import wl_distinguish

        A = _read_graph(args.inputs[0], args.input_format)
        B = _read_graph(args.inputs[1], args.input_format)
        res = wl_distinguish(A, B, args.dim, max_rounds=args.max_rounds, cap=args.tuple_cap)
        rec = ex.ExperimentRecord(
            "distinguish",
            {"inputs": [Path(p).name for p in args.inputs]},
            {"wl_dimension": args.dim, "max_rounds": args.max_rounds, "tuple_cap": args.tuple_cap},
            res.as_dict(),
        )
    else:
        rec = ex.run_distinguish(_pair_desc(args), args.dim, args.max_rounds, args.tuple_cap)
    r = rec.results["distinguishing_round"]
    stable = rec.results["stable_rounds"]
    if r is not None:
        verdict = "distinguished"
    elif None not in stable:
        verdict = "none"
    else:
        verdict = "not-within-cap"
    rec.results["verdict"] = verdict
    _emit(args, rec.as_dict())
    _timing(args, rec)
    return EXIT_CAP if verdict == "not-within-cap" else EXIT_OK


def cmd_game_solve(args) -> int:
    family, shape = args.graph
    rec = ex.run_game_solve(family, shape, args.cops, args.rounds)
    _emit(args, rec.as_dict())
    _timing(args, rec)
    return EXIT_OK


def load_script(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read strategy script {path}: {exc}") from None


def cmd_game_sim(args) -> int:
    desc = _compressed_desc(args)
    if args.script:
        script = load_script(args.script)
        try:
            strategy = games.ScriptedCops(script, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        desc["script"] = script
    else:
        strategy = args.cops
    rec, tr = ex.run_game_sim(desc, strategy, args.seed, args.rounds)
    if args.transcript:
        lines = [gio.dumps_json(r.as_dict()) for r in tr.rounds]
        gio.atomic_write(args.transcript, "".join(lines))
    _emit(args, rec.as_dict())
    _timing(args, rec)
    bad = tr.invariant_failures or tr.outcome in ("robber-illegal", "captured", "invariant-violation")
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_verify(args) -> int:
    if not args.suites:
        for name, fn in verify.SUITES.items():
            summary = " ".join((fn.__doc__ or "").split()).split(". ")[0].rstrip(".")
            print(f"{name}\t{summary}")
        return EXIT_OK
    unknown = [s for s in args.suites if s not in verify.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; available: {', '.join(verify.SUITES)}")
    reports = [verify.run_suite(s, seed=args.seed, quick=args.quick).as_dict() for s in args.suites]
    _emit(args, {"seed": args.seed, "quick": args.quick, "reports": reports})
    for rep in reports:
        print(f"{rep['suite']}: {'PASS' if rep['passed'] else 'FAIL'} ({rep['checked']} checked, {rep['failures']} failures)", file=sys.stderr)
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_VERIFY


def _furer_point(job: tuple[int, int, int | None]) -> dict:
    n, k, cap = job
    return ex.furer_curve([n], k, cap)[0].as_dict()


def cmd_furer_curve(args) -> int:
    jobs = [(n, args.dim, args.tuple_cap) for n in args.n]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_furer_point, jobs))
    else:
        records = [_furer_point(j) for j in jobs]
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "k", "vertices", "distinguishing_round"])
    for n, rec in zip(args.n, records):
        writer.writerow([n, args.dim, rec["results"]["vertices"], rec["results"]["distinguishing_round"]])
    if args.output:
        gio.atomic_write(args.output, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_export(args) -> int:
    G = _read_graph(args.input, args.input_format)
    text = gio.export_graph(G, args.to, force=args.force)
    if args.output:
        gio.atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlcompress", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of default option values; flags win")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--timing", action="store_true", help="print wall-clock timing to stderr")
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        return p

    p = add("gen-base", cmd_gen_base, "write a base graph as JSON")
    _add_family(p)
    _add_grid(p)
    p.add_argument("-o", "--output")

    for name, fn, help_ in (
        ("gen-cfi", cmd_gen_cfi, "write a CFI pair plus manifest"),
        ("gen-compressed", cmd_gen_compressed, "write a compressed CFI pair plus class map"),
    ):
        p = add(name, fn, help_)
        if name == "gen-cfi":
            _add_family(p)
            p.set_defaults(variant="cfi")
        _add_grid(p, required=name == "gen-compressed")
        if name == "gen-compressed":
            p.add_argument("--variant", choices=["compressed", "precompressed", "cfi"], default="compressed")
        p.add_argument("--twist", default="first-column", help="first-column, none or a JSON list of edges")
        p.add_argument("--format", choices=["json", "dimacs", "graph6"], default="json")
        p.add_argument("--force", action="store_true", help="allow lossy formats")
        p.add_argument("--outdir", required=True)
        p.add_argument("-o", "--output", help="manifest copy")

    p = add("wl", cmd_wl, "run k-WL to stabilization on one graph")
    p.add_argument("input")
    p.add_argument("--input-format", choices=["json", "dimacs", "graph6"])
    p.add_argument("--dim", "-k", type=int, default=2, help="WL dimension")
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--tuple-cap", type=int, help="override WLCOMPRESS_TUPLE_CAP")
    p.add_argument("-o", "--output")

    p = add("distinguish", cmd_distinguish, "joint k-WL run on a pair")
    p.add_argument("--inputs", nargs=2, metavar=("G", "H"))
    p.add_argument("--input-format", choices=["json", "dimacs", "graph6"])
    _add_family(p)
    _add_grid(p)
    p.add_argument("--variant", choices=["compressed", "precompressed", "cfi"], default="compressed")
    p.add_argument("--twist", default="first-column")
    p.add_argument("--dim", "-k", type=int, default=2, help="WL dimension")
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--tuple-cap", type=int)
    p.add_argument("-o", "--output")

    p = add("game-solve", cmd_game_solve, "solve the cops-and-robber game on a small base graph")
    p.add_argument("--graph", nargs=2, metavar=("FAMILY", "RxC"), required=True)
    p.add_argument("--cops", type=int, required=True)
    p.add_argument("--rounds", type=int, help="round budget")
    p.add_argument("-o", "--output")

    p = add("game-sim", cmd_game_sim, "play the robber policy against a cop strategy")
    _add_grid(p, required=True)
    p.add_argument("--cops", default="random", choices=sorted(games.STRATEGIES))
    p.add_argument("--script", help="JSON file of scripted cop moves (overrides --cops)")
    p.add_argument("--rounds", type=int, help="default J/6 - (k+2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transcript", help="write per-round JSON lines here")
    p.add_argument("-o", "--output")

    p = add("verify", cmd_verify, "run property suites (no names: list them)")
    p.add_argument("suites", nargs="*")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="smaller sample sizes")
    p.add_argument("-o", "--output")

    p = add("furer-curve", cmd_furer_curve, "CSV of distinguishing rounds on 2 x n grids")
    p.add_argument("--n", type=int, nargs="+", default=[4, 8, 16, 32, 40])
    p.add_argument("--dim", "-k", type=int, default=2)
    p.add_argument("--tuple-cap", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    p.add_argument("-o", "--output")

    p = add("export", cmd_export, "convert a graph file")
    p.add_argument("input")
    p.add_argument("--input-format", choices=["json", "dimacs", "graph6"])
    p.add_argument("--to", choices=["json", "dimacs", "graph6"], required=True)
    p.add_argument("--force", action="store_true", help="allow dropping colors and classes")
    p.add_argument("-o", "--output")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    for action in parser._subparsers._group_actions:  # type: ignore[union-attr]
        for name, sp in action.choices.items():
            section = {**cfg.get("defaults", {}), **cfg.get(name, {})}
            sp.set_defaults(**{k.replace("-", "_"): v for k, v in section.items()})


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        if not getattr(args, "func", None):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except gio.LossyExport as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TupleCapExceeded, SizeCapExceeded) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
