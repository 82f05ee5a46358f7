"""Command-line interface.

Every subcommand exits 0 on success. Failures exit nonzero and print a single
JSON line ``{"error": <kind>, "message": <text>}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench, capacity
from .graph import cnf_to_mis_graph, load_graph, random_confusion_graph, write_dimacs
from .pipelines import METHODS, MODEL_METHODS, SolveConfig, TrainedModel, solve, train_supervised


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


def _config(args) -> SolveConfig:
    doc = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as f:
            doc = json.load(f)
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
    try:
        return SolveConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise CliError("config", str(exc)) from None


def _dump(doc) -> str:
    return json.dumps(doc, separators=(", ", ": "))


def cmd_gen(args) -> int:
    ds = bench.random_dataset(args.model, args.n, args.p, args.count, args.seed,
                              name=args.name)
    bench.write_dataset(ds, args.out)
    print(_dump({"dataset": ds.name, "graphs": len(ds), "out": str(args.out)}))
    return 0


def cmd_convert(args) -> int:
    g, clauses = cnf_to_mis_graph(Path(args.cnf).read_text(encoding="utf-8"))
    Path(args.out).write_text(write_dimacs(g, comment=f"clauses {clauses}"), encoding="utf-8")
    print(_dump({"n": g.n, "m": g.num_edges, "clauses": clauses}))
    return 0


def cmd_label(args) -> int:
    ds = bench.load_dataset(args.inp)
    results = bench.label_dataset(ds, args.time_limit, args.jobs)
    bench.write_labels(results, args.out)
    print(_dump({"graphs": len(results), "optimal": sum(r.optimal for r in results.values())}))
    return 0


def _load_model(path):
    if path is None:
        return None
    return TrainedModel.load(path)


def cmd_solve(args) -> int:
    cfg = _config(args)
    if args.method in MODEL_METHODS and args.model is None:
        raise CliError("usage", f"method {args.method} requires --model")
    g = load_graph(args.graph)
    res = solve(g, args.method, cfg, _load_model(args.model))
    doc = res.to_dict(Path(args.graph).stem, g, timing=args.timing)
    if args.method == "exact":
        doc["method"] = "exact-bnb"
    print(_dump(doc))
    return 0


def _labeled(args):
    ds = bench.load_dataset(args.data)
    labels = bench.read_labels(args.labels)
    missing = [gid for gid, _ in ds.graphs if gid not in labels]
    if missing:
        raise CliError("labels", f"no label for graph {missing[0]} ({len(missing)} missing)")
    return ds, labels


def cmd_train(args) -> int:
    cfg = _config(args)
    ds, labels = _labeled(args)
    graphs, ys = [], []
    for gid, g in ds.graphs:
        rec = labels[gid]
        if not rec.get("optimal", True):
            logging.warning("skipping %s: label is not proven optimal", gid)
            continue
        if rec["n"] != g.n:
            raise CliError("labels", f"label for {gid} has n={rec['n']}, graph has {g.n}")
        graphs.append(g)
        ys.append(bench.label_vector(rec))
    tm = train_supervised(graphs, ys, cfg, epochs=args.epochs, dataset_id=ds.name)
    tm.save(args.out)
    print(_dump({"graphs": len(graphs), "epochs": tm.epochs, "final_bce": tm.final_bce}))
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    try:
        methods = bench.parse_methods(args.methods)
    except ValueError as exc:
        raise CliError("unknown_method", str(exc)) from None
    if any(m in MODEL_METHODS for m in methods) and args.model is None:
        raise CliError("usage", "supervised methods require --model")
    ds, labels = _labeled(args)
    report = bench.bench_run(ds, methods, cfg, labels, _load_model(args.model), args.jobs)
    report.write(args.out)
    sys.stdout.write(report.to_markdown())
    return 0


def cmd_capacity(args) -> int:
    cfg = _config(args)
    if args.graph:
        g = load_graph(args.graph)
        p, seed, random = None, cfg.seed, False
    else:
        try:
            n_s, p_s, seed_s = args.random.split(",")
            n, p, seed = int(n_s), float(p_s), int(seed_s)
        except ValueError:
            raise CliError("usage", f"--random expects n,p,seed, got {args.random!r}") from None
        g = random_confusion_graph(n, p, seed)
        random = True
    report = capacity.confusion_experiment(g.n, p, seed, args.kmax, cfg,
                                           model=_load_model(args.model), graph=g)
    report.params["random"] = random
    report.write(args.out)
    print(_dump({m: report.capacity_lb(m) for m in report.methods()}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="misgnn", description="GNN-assisted maximum independent set toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a seeded random graph dataset")
    p.add_argument("--model", choices=("er", "confusion"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert", help="reduce a DIMACS CNF formula to an MIS graph")
    p.add_argument("--cnf", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("label", help="exact labels for a dataset directory")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("solve", help="solve one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--model")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--timing", action="store_true", help="include elapsed_s in the output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="train the supervised model")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--epochs", type=int, default=60)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="benchmark methods on a labeled dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--methods", required=True, help="comma-separated: " + ",".join(METHODS))
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("capacity", help="confusion-graph capacity experiment")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--random", metavar="N,P,SEED")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--model")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_capacity)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except CliError as exc:
        kind, msg = exc.kind, str(exc)
    except bench.BenchError as exc:
        kind, msg = "bench", str(exc)
    except FileNotFoundError as exc:
        kind, msg = "not_found", str(exc)
    except ValueError as exc:
        kind, msg = "invalid_input", str(exc)
    sys.stderr.write(json.dumps({"error": kind, "message": msg.replace("\n", " ")}) + "\n")
    return 2 if kind == "usage" else 1


if __name__ == "__main__":
    sys.exit(main())
