"""Command-line driver for the whole pipeline.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable files,
malformed corpora, impossible parameters). ``--json`` switches the
human-readable tables to structured output for scripting.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classifier import (
    ModelFormatError,
    TrainConfig,
    load_model,
    predict,
    explain,
    save_model,
    train_corpus,
)
from .config import resolve_config
from .corpus import Label, balance, ingest_csv, write_csv, write_row_errors
from .evaluation import cross_validate
from .keywords import (
    Direction,
    KeywordConfig,
    keyword_bias,
    keyword_report_csv,
    mention_scan,
    word_tree,
)
from .netgraph import (
    EdgeKind,
    build_graph,
    eigenvector_centrality,
    influencers,
    read_edge_csv,
    to_dot,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="tripwire", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", help="validate and summarize a corpus CSV")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument(
        "--default-label",
        choices=[l.value for l in Label],
        default=Label.UNLABELED.value,
    )
    p.add_argument("--errors", help="write row errors as JSON lines here")
    p.add_argument("--out", help="write the deduplicated corpus back to CSV")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("train", help="train a model from a labeled corpus CSV")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--out", dest="model_out", required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--max-iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument(
        "--balance",
        action="store_true",
        help="subsample the majority class before training",
    )
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("predict", help="score texts with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--text", help="score this single text")
    p.add_argument("--in", dest="path", help="score each line of this file")
    p.add_argument(
        "--in-dir", dest="directory", help="score every *.txt file under a directory"
    )
    p.add_argument("--top-features", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("cv", help="stratified k-fold cross-validation")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--min-df", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("keywords", help="chi-squared keyword bias report")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--top", type=int, default=50, help="rows to print (0 = all)")
    p.add_argument("--out", help="write the full CSV report here")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("tree", help="concordance word tree for a keyword")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--keyword", required=True)
    p.add_argument(
        "--direction", choices=["left", "right"], default="right"
    )
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser(
        "scan", help="place mentions (gazetteer) and username cues"
    )
    p.add_argument("--in", dest="path", required=True)
    p.add_argument(
        "--gazetteer",
        help="CSV of alias,place (or JSON object) mapping names to places",
    )
    p.add_argument(
        "--cues", action="store_true", help="report username cue matches"
    )
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("graph", help="influencer detection on an edge list")
    p.add_argument("--edges", required=True, help="CSV of src,dst,kind")
    p.add_argument(
        "--kind", choices=["knows", "cites"], default="cites"
    )
    p.add_argument(
        "--combined",
        action="store_true",
        help="use knows and cites edges together",
    )
    p.add_argument("--damping", type=float, default=0.15)
    p.add_argument("--threshold", type=float, default=0.25)
    p.add_argument("--highlight", type=float, default=0.5)
    p.add_argument("--dot", help="write DOT output here")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the scoring service")
    p.add_argument("--model")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--log", dest="review_log")
    p.add_argument("--token", dest="auth_token")
    p.add_argument("--dashboard-dir")

    return parser


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        for line in lines:
            print(line)


def _cmd_ingest(args) -> int:
    result = ingest_csv(args.path, Label(args.default_label))
    if args.errors:
        write_row_errors(result.row_errors, args.errors)
    if args.out:
        write_csv(result.corpus, args.out)
    corpus = result.corpus
    payload = {
        "records": len(corpus),
        "counts": {l.value: corpus.count(l) for l in Label},
        "duplicates": result.duplicates,
        "row_errors": [e.to_json_dict() for e in result.row_errors],
    }
    _emit(
        payload,
        args.json,
        [
            f"records    {len(corpus)}",
            f"hate       {corpus.count(Label.HATE)}",
            f"safe       {corpus.count(Label.SAFE)}",
            f"unlabeled  {corpus.count(Label.UNLABELED)}",
            f"duplicates {result.duplicates}",
            f"row errors {len(result.row_errors)}",
        ],
    )
    return 0


def _cmd_train(args) -> int:
    corpus = ingest_csv(args.path).corpus
    if args.balance:
        corpus = balance(corpus, seed=args.seed)
    config = TrainConfig(
        C=args.c,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
        seed=args.seed,
    )
    model = train_corpus(corpus, config, min_df=args.min_df)
    save_model(model, args.model_out)
    payload = {
        "model": args.model_out,
        "features": model.vocabulary.size,
        "epochs": model.epochs,
        "converged": model.converged,
    }
    _emit(
        payload,
        args.json,
        [
            f"wrote {args.model_out}",
            f"features  {model.vocabulary.size}",
            f"epochs    {model.epochs} (converged: {model.converged})",
        ],
    )
    return 0


def _prediction_payload(model, text, top_k):
    pred = predict(model, text)
    payload = {
        "label": pred.label.value,
        "score": pred.score,
        "low_confidence": pred.low_confidence,
    }
    if top_k:
        payload["top_features"] = [
            {"trigram": g, "contribution": c} for g, c in explain(model, text, top_k)
        ]
    return payload


def _cmd_predict(args) -> int:
    sources = [s for s in (args.text is not None, args.path, args.directory) if s]
    if not sources:
        raise UsageError("predict needs one of --text, --in, or --in-dir")
    model = load_model(args.model)
    results = []
    if args.text is not None:
        results.append(("text", _prediction_payload(model, args.text, args.top_features)))
    if args.path:
        with open(args.path, encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if line:
                    results.append(
                        (f"line {i}", _prediction_payload(model, line, args.top_features))
                    )
    if args.directory:
        root = Path(args.directory)
        if not root.is_dir():
            raise NotADirectoryError(f"{root} is not a directory")
        for file in sorted(root.rglob("*.txt")):
            content = file.read_text(encoding="utf-8", errors="replace")
            results.append(
                (str(file), _prediction_payload(model, content, args.top_features))
            )
    if args.json:
        print(
            json.dumps(
                [{"source": src, **payload} for src, payload in results],
                ensure_ascii=False,
                indent=2,
            )
        )
    else:
        for src, payload in results:
            flag = " (low confidence)" if payload["low_confidence"] else ""
            print(f"{src}\t{payload['label']}\t{payload['score']:+.4f}{flag}")
    return 0


def _cmd_cv(args) -> int:
    corpus = ingest_csv(args.path).corpus
    config = TrainConfig(C=args.c, seed=args.seed)
    report = cross_validate(corpus, k=args.k, config=config, min_df=args.min_df)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_text_table())
    return 0


def _cmd_keywords(args) -> int:
    corpus = ingest_csv(args.path).corpus
    config = KeywordConfig(alpha=args.alpha, min_count=args.min_count)
    stats = keyword_bias(corpus, config)
    if args.out:
        Path(args.out).write_text(keyword_report_csv(stats), encoding="utf-8")
    shown = stats if args.top == 0 else stats[: args.top]
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "word": s.word,
                        "count_hate": s.count_hate,
                        "count_safe": s.count_safe,
                        "occurrences": s.occurrences,
                        "chi2": s.chi2,
                        "p_hate": s.p_hate,
                        "significant": s.significant,
                    }
                    for s in shown
                ],
                ensure_ascii=False,
                indent=2,
            )
        )
    else:
        print("word\tchi2\tp_hate\ttweets\toccurrences\tsignificant")
        for s in shown:
            print(
                f"{s.word}\t{s.chi2:.3f}\t{s.p_hate:.3f}"
                f"\t{s.count_hate + s.count_safe}\t{s.occurrences}"
                f"\t{'yes' if s.significant else 'no'}"
            )
    return 0


def _cmd_tree(args) -> int:
    corpus = ingest_csv(args.path).corpus
    tree = word_tree(
        corpus, args.keyword, Direction(args.direction), depth=args.depth
    )
    print(tree.to_json() if args.json else tree.to_text())
    return 0


def _load_gazetteer(path: str) -> dict[str, str]:
    import csv as _csv

    if path.endswith(".json"):
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("gazetteer JSON must be an object of alias: place")
        return {str(k): str(v) for k, v in data.items()}
    gazetteer = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in _csv.reader(fh):
            if len(row) >= 2 and row[0].strip():
                gazetteer[row[0].strip()] = row[1].strip()
    return gazetteer


def _cmd_scan(args) -> int:
    if not args.gazetteer and not args.cues:
        raise UsageError("scan needs --gazetteer and/or --cues")
    corpus = ingest_csv(args.path).corpus
    payload: dict = {}
    lines: list[str] = []
    if args.gazetteer:
        counts = mention_scan(corpus, _load_gazetteer(args.gazetteer))
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        payload["mentions"] = dict(ordered)
        lines.append("place\ttweets")
        lines.extend(f"{place}\t{n}" for place, n in ordered)
    if args.cues:
        from .corpus import username_cues

        reports = []
        for author in sorted({r.author for r in corpus}):
            cues = username_cues(author).cues
            if cues:
                reports.append({"username": author, "cues": sorted(cues)})
        payload["cues"] = reports
        if lines:
            lines.append("")
        lines.append("username\tcues")
        lines.extend(
            f"{r['username']}\t{','.join(r['cues'])}" for r in reports
        )
    _emit(payload, args.json, lines)
    return 0


def _cmd_graph(args) -> int:
    rows = read_edge_csv(args.edges)
    build = build_graph(rows)
    kind = None if args.combined else EdgeKind(args.kind)
    result = eigenvector_centrality(
        build.graph, kind=kind, damping=args.damping, highlight=args.highlight
    )
    sub = influencers(
        build.graph, result, threshold=args.threshold, highlight=args.highlight
    )
    if args.dot:
        directed = kind is not EdgeKind.KNOWS
        Path(args.dot).write_text(to_dot(sub, directed=directed), encoding="utf-8")
    if args.json:
        payload = sub.to_json_dict()
        payload["converged"] = result.converged
        payload["self_loops_dropped"] = build.self_loops_dropped
        payload["row_errors"] = [e.to_json_dict() for e in build.row_errors]
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print("node\tcentrality\thighlighted")
        for n in sub.nodes:
            mark = "*" if n.highlighted else ""
            print(f"{n.username}\t{n.centrality:.4f}\t{mark}")
        if not result.converged:
            print("warning: power iteration did not converge", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    config = resolve_config(
        {
            "model": args.model,
            "host": args.host,
            "port": args.port,
            "threshold": args.threshold,
            "review_log": args.review_log,
            "auth_token": args.auth_token,
            "dashboard_dir": args.dashboard_dir,
        }
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "cv": _cmd_cv,
    "keywords": _cmd_keywords,
    "tree": _cmd_tree,
    "scan": _cmd_scan,
    "graph": _cmd_graph,
    "serve": _cmd_serve,
}


def cli_run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_usage(sys.stderr)
            return 1
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ModelFormatError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_run())
