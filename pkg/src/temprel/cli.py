"""Command-line entry point for batch workflows.

Subcommands chain the library stages together: TimeML ingestion, axis
pair generation, TB-Dense conversion, judgement-log aggregation,
agreement metrics, crowd simulation, baseline training/evaluation, and
the HTTP service.  Report-producing commands also render PNG figures
next to the delimited output unless --no-figures is given.

Every command is deterministic given flags, input bytes, and seed;
outputs are written atomically (temp file + rename).  Exit codes: 2 for
usage errors, 1 for data errors (unreadable, malformed, or missing
inputs), 0 on success.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .agreement import (
    ConfusionMatrix,
    cohens_kappa,
    compare_datasets,
    mcnemars_test,
    per_label_agreement,
)
from .algebra import (
    Answer,
    PointRelation,
    invert_point_relation,
    to_start_point_relation,
)
from .corpus import (
    Axis,
    anchorable_events,
    assignment_for,
    document_from_json,
    document_to_json,
    generate_pairs,
)
from .engine import QcConfig, WorkerModel, aggregate_relation, simulate_crowd
from .formats import (
    RelationSet,
    RelationSource,
    apply_pos_sidecar,
    export_matres,
    export_relations_tsv,
    load_matres,
    load_pos_sidecar,
    load_relations_tsv,
    load_tbdense,
    normalize_event_id,
    parse_timeml,
)
from .perceptron import TrainConfig, evaluate, load_model, save_model, train
from .wordnet import load_wordnet

__all__ = ["main", "run"]

LABEL_ORDER = (
    PointRelation.BEFORE,
    PointRelation.AFTER,
    PointRelation.EQUAL,
    PointRelation.VAGUE,
)


class DataError(Exception):
    """Input problem attributable to a specific file or value."""


def _atomic_write(path: Path, data) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"{path}: {err.strerror or err}") from err


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(Path(args.out), text)


def _figure_path(out, suffix: str) -> Path:
    out = Path(out)
    return out.with_name(out.stem + suffix + ".png")


def _want_figures(args) -> bool:
    return args.out is not None and not getattr(args, "no_figures", False)


def _load_corpus(path) -> dict:
    try:
        payload = json.loads(_read_text(path))
        docs = [document_from_json(d) for d in payload["documents"]]
    except (KeyError, TypeError, ValueError) as err:
        raise DataError(f"{path}: not a corpus file ({err})") from err
    return {doc.doc_id: doc for doc in docs}


def _load_doc_list(path) -> list[str]:
    ids = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(line)
    if not ids:
        raise DataError(f"{path}: no document ids listed")
    return ids


def _select_docs(corpus: dict, ids, origin) -> list:
    missing = [i for i in ids if i not in corpus]
    if missing:
        raise DataError(f"{origin}: documents not in corpus: {', '.join(missing)}")
    return [corpus[i] for i in ids]


# ----------------------------------------------------------- subcommands


def cmd_ingest(args) -> int:
    paths = []
    for src in args.sources:
        p = Path(src)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.tml")))
        else:
            paths.append(p)
    if not paths:
        raise DataError("no TimeML files found in the given sources")
    overrides = {}
    if args.pos_sidecar:
        overrides = load_pos_sidecar(_read_text(args.pos_sidecar))
    docs = []
    for p in paths:
        try:
            doc = parse_timeml(_read_text(p))
        except ValueError as err:
            raise DataError(f"{p}: {err}") from err
        if overrides:
            doc = apply_pos_sidecar(doc, overrides)
        docs.append(doc)
    docs.sort(key=lambda d: d.doc_id)
    payload = {"version": 1, "documents": [document_to_json(d) for d in docs]}
    _emit(args, json.dumps(payload, indent=0, sort_keys=True) + "\n")
    return 0


def cmd_pairs(args) -> int:
    corpus = _load_corpus(args.corpus)
    lines = []
    for doc_id in sorted(corpus):
        doc = corpus[doc_id]
        assignments = [assignment_for(ev) for ev in doc.events]
        main = anchorable_events(doc, Axis.main(), assignments)
        for pair in generate_pairs(doc, main, window_sentences=args.window):
            lines.append(f"{pair.doc_id}\t{pair.first}\t{pair.second}\n")
    _emit(args, "".join(lines))
    return 0


def cmd_convert(args) -> int:
    try:
        dense = load_tbdense(_read_text(args.input))
    except ValueError as err:
        raise DataError(f"{args.input}: {err}") from err
    entries = {
        key: to_start_point_relation(rel) for key, rel in dense.entries.items()
    }
    converted = RelationSet(entries=entries, source=RelationSource.INTERNAL)
    _emit(args, export_relations_tsv(converted))
    return 0


def _read_judgement_log(path) -> dict:
    """Live answers per question id from a six-column judgement log."""
    answers: dict = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 6:
            raise DataError(f"{path}, line {lineno}: expected 6 columns, got {len(cols)}")
        _, _, qid, answer, _, discarded = cols
        if discarded not in ("0", "1"):
            raise DataError(f"{path}, line {lineno}: discarded flag must be 0 or 1")
        if discarded == "1":
            continue
        try:
            answers.setdefault(qid, []).append(Answer(answer))
        except ValueError:
            raise DataError(f"{path}, line {lineno}: unknown answer {answer!r}")
    return answers


def _majority(votes) -> Answer:
    yes = sum(1 for a in votes if a is Answer.YES)
    return Answer.YES if yes * 2 >= len(votes) else Answer.NO


def _parse_qid(qid, origin) -> tuple:
    parts = qid.split(":")
    if len(parts) != 3:
        raise DataError(
            f"{origin}: question id {qid!r} is not of the form doc:event1:event2"
        )
    return tuple(parts)


def cmd_aggregate(args) -> int:
    q1 = _read_judgement_log(args.q1)
    q2 = _read_judgement_log(args.q2)
    excluded = set()
    if args.exclude:
        excluded = {
            line.strip()
            for line in _read_text(args.exclude).splitlines()
            if line.strip()
        }
    corpus = _load_corpus(args.corpus)
    shared = sorted((set(q1) & set(q2)) - excluded)
    entries, surfaces = {}, {}
    for qid in shared:
        if len(q1[qid]) < args.min_judgements or len(q2[qid]) < args.min_judgements:
            continue
        doc_id, e1, e2 = _parse_qid(qid, args.q1)
        doc = corpus.get(doc_id)
        if doc is None:
            raise DataError(f"{args.corpus}: no document {doc_id!r} for question {qid}")
        key = (doc_id, e1, e2)
        entries[key] = aggregate_relation(_majority(q1[qid]), _majority(q2[qid]))
        try:
            surfaces[key] = (doc.surface(e1), doc.surface(e2))
        except KeyError as err:
            raise DataError(f"{args.corpus}: document {doc_id!r} has no event {err}")
    relations = RelationSet(
        entries=entries, source=RelationSource.MATRES_FORMAT, surfaces=surfaces
    )
    _emit(args, export_matres(relations))
    return 0


_RELATION_LOADERS = {
    "matres": load_matres,
    "tbdense": load_tbdense,
    "tsv": load_relations_tsv,
}


def _load_relations(path, kind) -> RelationSet:
    try:
        return _RELATION_LOADERS[kind](_read_text(path))
    except ValueError as err:
        raise DataError(f"{path}: {err}") from err


def _matrix_pairs(matrix: ConfusionMatrix) -> tuple[list, list]:
    rows, cols = [], []
    for i, row_label in enumerate(matrix.row_labels):
        for j, col_label in enumerate(matrix.col_labels):
            n = matrix.counts[i][j]
            rows.extend([row_label] * n)
            cols.extend([col_label] * n)
    return rows, cols


def _label_name(label) -> str:
    return label.name if isinstance(label, PointRelation) else str(label)


def _matrix_json(matrix: ConfusionMatrix) -> dict:
    payload = matrix.as_dict()
    payload["row_labels"] = [_label_name(lab) for lab in matrix.row_labels]
    payload["col_labels"] = [_label_name(lab) for lab in matrix.col_labels]
    return payload


def _matrix_tsv(matrix: ConfusionMatrix) -> str:
    header = "\t".join(["theirs\\ours"] + [_label_name(l) for l in matrix.col_labels])
    lines = [header]
    for label, row in zip(matrix.row_labels, matrix.counts):
        lines.append("\t".join([_label_name(label)] + [str(c) for c in row]))
    lines.append("\t".join(["total"] + [str(c) for c in matrix.col_marginals]))
    return "".join(line + "\n" for line in lines)


def _normalize_ids(relations: RelationSet, origin) -> RelationSet:
    entries = {}
    for (doc_id, e1, e2), label in relations.entries.items():
        key = (doc_id, normalize_event_id(e1), normalize_event_id(e2))
        if key in entries:
            raise DataError(f"{origin}: id normalization collides on {key}")
        entries[key] = label
    return RelationSet(entries=entries, source=relations.source)


def _metrics_relations(args) -> dict:
    if args.ours_kind == "tbdense":
        raise DataError(
            "tbdense can only be --theirs; its interval labels are projected "
            "onto start points for comparison"
        )
    ours = _load_relations(args.ours, args.ours_kind)
    theirs = _load_relations(args.theirs, args.theirs_kind)
    if args.normalize_ids:
        ours = _normalize_ids(ours, args.ours)
        theirs = _normalize_ids(theirs, args.theirs)
    projector = to_start_point_relation if args.theirs_kind == "tbdense" else None
    matrix = compare_datasets(
        ours,
        theirs,
        projector=projector,
        label_order=LABEL_ORDER,
        inverter=invert_point_relation,
    )
    row_seq, col_seq = _matrix_pairs(matrix)
    kappa = cohens_kappa(row_seq, col_seq) if row_seq else None
    agreement = (
        per_label_agreement(row_seq, col_seq, LABEL_ORDER).as_dict()
        if row_seq
        else None
    )
    if agreement:
        agreement["per_label"] = {
            lab.name: agreement["per_label"][str(lab)] for lab in LABEL_ORDER
        }
    return {
        "mode": "relations",
        "confusion": _matrix_json(matrix),
        "overall_kappa": kappa,
        "agreement": agreement,
        "mcnemar": None,
    }


def _read_label_column(path) -> list[str]:
    labels = [line.strip() for line in _read_text(path).splitlines() if line.strip()]
    if not labels:
        raise DataError(f"{path}: empty label column")
    return labels


def _metrics_labels(args) -> dict:
    a = _read_label_column(args.labels_a)
    b = _read_label_column(args.labels_b)
    if len(a) != len(b):
        raise DataError(
            f"label columns differ in length: {args.labels_a} has {len(a)}, "
            f"{args.labels_b} has {len(b)}"
        )
    labels = sorted(set(a) | set(b))
    agreement = per_label_agreement(a, b, labels)
    index = {lab: i for i, lab in enumerate(labels)}
    counts = [[0] * len(labels) for _ in labels]
    for x, y in zip(a, b):
        counts[index[x]][index[y]] += 1
    matrix = ConfusionMatrix(
        row_labels=tuple(labels),
        col_labels=tuple(labels),
        counts=tuple(tuple(row) for row in counts),
    )
    mcnemar = None
    if args.gold:
        gold = _read_label_column(args.gold)
        if len(gold) != len(a):
            raise DataError(f"{args.gold}: gold column length {len(gold)} != {len(a)}")
        result = mcnemars_test([(x == g, y == g) for x, y, g in zip(a, b, gold)])
        mcnemar = result.as_dict()
    return {
        "mode": "labels",
        "confusion": _matrix_json(matrix),
        "overall_kappa": agreement.overall_kappa,
        "agreement": agreement.as_dict(),
        "mcnemar": mcnemar,
    }


def cmd_metrics(args) -> int:
    relation_mode = args.ours is not None
    if relation_mode and (args.labels_a or args.labels_b):
        raise DataError("give either relation files or label columns, not both")
    if relation_mode:
        if args.theirs is None:
            raise DataError("--ours requires --theirs")
        report = _metrics_relations(args)
    else:
        if not (args.labels_a and args.labels_b):
            raise DataError("need --ours/--theirs or --labels-a/--labels-b")
        report = _metrics_labels(args)
    if args.format == "json":
        _emit(args, json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        _emit(args, _matrix_tsv_from_json(report["confusion"]))
    if _want_figures(args):
        from .figures import render_confusion_figure, render_eval_figure

        confusion = report["confusion"]
        render_confusion_figure(
            confusion["row_labels"],
            confusion["col_labels"],
            confusion["counts"],
            _figure_path(args.out, ".confusion"),
        )
        if report["agreement"]:
            render_eval_figure(
                {"per_label": report["agreement"]["per_label"]},
                _figure_path(args.out, ".labels"),
                title=f"per-label agreement (kappa {report['overall_kappa']:.3f})",
            )
    return 0


def _matrix_tsv_from_json(confusion: dict) -> str:
    header = "\t".join(["theirs\\ours"] + confusion["col_labels"])
    lines = [header]
    for label, row in zip(confusion["row_labels"], confusion["counts"]):
        lines.append("\t".join([label] + [str(c) for c in row]))
    lines.append("\t".join(["total"] + [str(c) for c in confusion["marginals"]["cols"]]))
    return "".join(line + "\n" for line in lines)


def cmd_simulate(args) -> int:
    try:
        config = QcConfig(
            qualify_size=args.qualify_size,
            qualify_threshold=args.qualify_threshold,
            survive_threshold=args.survive_threshold,
            judgements_per_question=args.judgements_per_question,
            gold_injection_rate=args.gold_rate,
            rng_seed=args.seed,
        )
        model = WorkerModel(accuracy=args.p, mean_response_time=args.response_time)
    except ValueError as err:
        raise DataError(str(err)) from err
    report = simulate_crowd(
        config, model, n_workers=args.workers, questions=args.questions, seed=args.seed
    )
    payload = report.as_dict()
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        lines = [f"{key}\t{'' if value is None else value}" for key, value in payload.items()]
        _emit(args, "".join(line + "\n" for line in lines))
    if _want_figures(args):
        from .figures import render_quality_figure

        render_quality_figure(payload, _figure_path(args.out, ".quality"))
    return 0


def _load_gold(path) -> dict:
    try:
        return load_matres(_read_text(path)).entries
    except ValueError as err:
        raise DataError(f"{path}: {err}") from err


def _load_wn(args):
    if not args.wordnet_dir:
        return None
    try:
        return load_wordnet(args.wordnet_dir)
    except (OSError, ValueError) as err:
        raise DataError(f"{args.wordnet_dir}: {err}") from err


def cmd_train(args) -> int:
    corpus = _load_corpus(args.corpus)
    gold = _load_gold(args.gold)
    train_docs = _select_docs(corpus, _load_doc_list(args.train_docs), args.train_docs)
    dev_docs = (
        _select_docs(corpus, _load_doc_list(args.dev_docs), args.dev_docs)
        if args.dev_docs
        else []
    )
    config = TrainConfig(max_epochs=args.max_epochs, seed=args.seed)
    try:
        model = train(train_docs, dev_docs, gold, config, wn=_load_wn(args))
    except ValueError as err:
        raise DataError(str(err)) from err
    _emit(args, save_model(model) + "\n")
    return 0


def cmd_eval(args) -> int:
    corpus = _load_corpus(args.corpus)
    gold = _load_gold(args.gold)
    docs = _select_docs(corpus, _load_doc_list(args.docs), args.docs)
    try:
        model = load_model(_read_text(args.model))
    except ValueError as err:
        raise DataError(f"{args.model}: {err}") from err
    report = evaluate(model, docs, gold, wn=_load_wn(args)).as_dict()
    if args.format == "json":
        _emit(args, json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        lines = ["label\tprecision\trecall\tf1\tgold_count\tpredicted_count"]
        for label, score in report["per_label"].items():
            cells = [
                label,
                *(
                    "" if score[k] is None else f"{score[k]:.6f}"
                    for k in ("precision", "recall", "f1")
                ),
                str(score["gold_count"]),
                str(score["predicted_count"]),
            ]
            lines.append("\t".join(cells))
        lines.append(
            "\t".join(
                (
                    "OVERALL",
                    f"{report['overall_precision']:.6f}",
                    f"{report['overall_recall']:.6f}",
                    f"{report['overall_f1']:.6f}",
                    str(report["n_pairs"]),
                    "",
                )
            )
        )
        _emit(args, "".join(line + "\n" for line in lines))
    if _want_figures(args):
        from .figures import render_eval_figure

        render_eval_figure(report, _figure_path(args.out, ".scores"))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, admin_token=args.admin_token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="temprel",
        description="Temporal relation annotation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"temprel {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, figures=False):
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--data-dir", default=None)
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")
        if figures:
            p.add_argument(
                "--no-figures",
                action="store_true",
                help="skip PNG rendering next to --out",
            )

    p = sub.add_parser("ingest", help="TimeML files or directories to a corpus file")
    p.add_argument("sources", nargs="+")
    p.add_argument("--pos-sidecar", default=None, help="doc_id/token_index/pos TSV")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("pairs", help="main-axis event pairs from a corpus file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--window", type=int, default=2, help="sentence window size")
    common(p)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("convert", help="TB-Dense file to start-point relations")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("aggregate", help="two judgement logs to a MATRES export")
    p.add_argument("--q1", required=True, help="judgement log of the Q1 project")
    p.add_argument("--q2", required=True, help="judgement log of the Q2 project")
    p.add_argument("--corpus", required=True)
    p.add_argument("--exclude", default=None, help="file of question ids to skip")
    p.add_argument("--min-judgements", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("metrics", help="agreement between two relation sets")
    p.add_argument("--ours", default=None)
    p.add_argument("--ours-kind", choices=sorted(_RELATION_LOADERS), default="matres")
    p.add_argument("--theirs", default=None)
    p.add_argument("--theirs-kind", choices=sorted(_RELATION_LOADERS), default="tbdense")
    p.add_argument("--labels-a", default=None, help="plain label column file")
    p.add_argument("--labels-b", default=None)
    p.add_argument("--gold", default=None, help="gold label column (enables McNemar)")
    p.add_argument(
        "--normalize-ids",
        action="store_true",
        help="join pairs across eid/eiid spellings (e12 == ei12 == 12)",
    )
    common(p, figures=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="synthetic crowd through the QC pipeline")
    p.add_argument("--p", type=float, required=True, help="worker accuracy")
    p.add_argument("--workers", type=int, required=True)
    p.add_argument("--questions", type=int, default=50)
    p.add_argument("--qualify-size", type=int, default=10)
    p.add_argument("--qualify-threshold", type=float, default=0.7)
    p.add_argument("--survive-threshold", type=float, default=0.7)
    p.add_argument("--judgements-per-question", type=int, default=5)
    p.add_argument("--gold-rate", type=float, default=0.1)
    p.add_argument("--response-time", type=float, default=6.0)
    common(p, figures=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train the start-point relation baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--gold", required=True, help="MATRES-format relation file")
    p.add_argument("--train-docs", required=True, help="doc-id list file")
    p.add_argument("--dev-docs", default=None, help="doc-id list file")
    p.add_argument("--max-epochs", type=int, default=20)
    p.add_argument("--wordnet-dir", default=None)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on held-out documents")
    p.add_argument("--corpus", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--docs", required=True, help="doc-id list file")
    p.add_argument("--wordnet-dir", default=None)
    common(p, figures=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--admin-token", default=None)
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as err:
        print(f"temprel: error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"temprel: error: {err}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
