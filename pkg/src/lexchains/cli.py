"""Command-line interface.

Stages communicate through files::

    lexchains annotate raw.tsv -o annotated.txt --wordnet WN --words words.vec
    lexchains chain annotated.txt -o chained.txt --mode fixed --chunk-size 2 --model synsets.vec
    lexchains train chained.txt -o chains.vec
    lexchains vectorize annotated.txt -o vectors.csv --model chains.vec
    lexchains evaluate --csv vectors.csv --report report.txt --figure folds.png
    lexchains stats labeled.tsv

Diagnostics go to stderr; only ``stats`` writes to stdout.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from lexchains import classify, plotting
from lexchains.chains import chain_corpus
from lexchains.config import WORDNET_ENV, PipelineConfig
from lexchains.corpus import read_annotated_corpus, read_raw_corpus, read_token_corpus, write_corpus
from lexchains.embeddings import TrainConfig, load_text_model, save_text_model, train_cbow
from lexchains.errors import LexChainsError
from lexchains.mssa import annotate_corpus, preprocess
from lexchains.wordnet import load_database

log = logging.getLogger("lexchains")


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def _require(path, what):
    if path is None:
        raise LexChainsError(f"{what} not given")
    if not Path(path).exists():
        raise LexChainsError(f"{what} not found: {path}")
    return path


def _wordnet_path(value):
    return _require(value or os.environ.get(WORDNET_ENV), f"WordNet database (--wordnet or ${WORDNET_ENV})")


# --------------------------------------------------------------------------
# stages


def stage_annotate(raw, out, wordnet, words, passes=0, synset_model=None, train_cfg=None, workers=1):
    _require(raw, "input corpus")
    db = load_database(_wordnet_path(wordnet))
    wv = load_text_model(_require(words, "word model"))
    sv = load_text_model(_require(synset_model, "synset model")) if synset_model else None
    docs = read_raw_corpus(raw)
    annotated, stats = annotate_corpus(docs, wv, db, passes=passes, synset_model=sv,
                                       train_config=train_cfg, workers=workers)
    write_corpus(annotated, out)
    _diag(f"annotate: {stats.summary()}")
    return annotated


def stage_chain(inp, out, mode, chunk_size=None, model=None, wordnet=None, workers=1):
    docs = read_annotated_corpus(_require(inp, "annotated corpus"))
    tsm = load_text_model(_require(model, "synset model")) if model else None
    db = load_database(_wordnet_path(wordnet)) if mode == "flexible" else None
    chained = chain_corpus(docs, mode, tsm=tsm, db=db, chunk_size=chunk_size, workers=workers)
    write_corpus(chained, out)
    n_in = sum(len(d) for d in docs)
    n_out = sum(len(d) for d in chained)
    ratio = n_out / n_in if n_in else 1.0
    _diag(f"chain: mode={mode} tokens_in={n_in} tokens_out={n_out} compression={ratio:.4f}")
    return chained


def stage_train(inp, out, cfg: TrainConfig):
    docs = read_token_corpus(_require(inp, "training corpus"))
    model = train_cbow([d.tokens for d in docs], cfg)
    save_text_model(model, out)
    _diag(f"train: vocabulary={len(model)} dimension={model.dimension}")
    return model


def stage_vectorize(inp, out, model_path):
    docs = read_token_corpus(_require(inp, "labeled corpus"))
    model = load_text_model(_require(model_path, "model"))
    vecs = [classify.doc_vector(d.tokens, model) for d in docs]
    labels = [d.label if d.label is not None else "" for d in docs]
    classify.write_vectors_csv(out, labels, [v.vector for v in vecs], model.dimension)
    invalid = sum(not v.valid for v in vecs)
    covered = sum(v.covered for v in vecs)
    total = sum(v.total for v in vecs)
    _diag(f"vectorize: documents={len(vecs)} invalid={invalid} coverage={covered}/{total}")


def _classifier_factory(name, params):
    try:
        cls = classify.CLASSIFIERS[name]
    except KeyError:
        raise LexChainsError(f"unknown classifier {name!r}") from None
    return lambda **extra: cls(**{**params, **extra})


def stage_evaluate(report, *, csv=None, corpus=None, model=None, bow=False, top_k=300,
                   classifier="knn", params=None, grid=None, folds=10, seed=0,
                   figure=None, name=None):
    make_clf = _classifier_factory(classifier, params or {})
    if csv:
        ds = classify.read_vectors_csv(_require(csv, "vector CSV"))

        def make(**kw):
            return classify.VectorPipeline(make_clf(**kw))
    elif corpus:
        docs = read_token_corpus(_require(corpus, "labeled corpus"))
        ds = classify.LabeledDataset([d.tokens for d in docs], [d.label or "" for d in docs])
        if bow:
            def make(**kw):
                return classify.BowPipeline(make_clf(**kw), top_k)
        else:
            emb = load_text_model(_require(model, "model"))

            def make(**kw):
                return classify.EmbeddingPipeline(emb, make_clf(**kw))
    else:
        raise LexChainsError("evaluate needs --csv or --corpus")
    if len(set(ds.labels)) < 2:
        raise LexChainsError("evaluation needs at least two distinct labels")

    if grid:
        result, chosen = classify.tuned_kfold_eval(ds, make, grid, k=folds, seed=seed)
        _diag(f"evaluate: per-fold parameters {chosen}")
    else:
        result = classify.kfold_eval(ds, make, k=folds, seed=seed)
    name = name or Path(csv or corpus).stem
    line = classify.report_line(name, classifier if not bow else f"bow-{classifier}", result, folds, seed)
    Path(report).parent.mkdir(parents=True, exist_ok=True)
    with open(report, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    _diag(f"evaluate: {line}  folds={' '.join(f'{s:.4f}' for s in result.scores)}")
    if figure:
        plotting.plot_fold_scores(result.scores, figure, title=f"{name} / {classifier}")
    return result


def _parse_grid(items):
    grid = {}
    for item in items or ():
        key, _, values = item.partition("=")
        if not values:
            raise LexChainsError(f"grid entry {item!r} is not key=v1,v2")
        grid[key] = [_number(v) for v in values.split(",")]
    return grid


def _number(text):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def run_pipeline(cfg: PipelineConfig):
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save(out / "pipeline.json")
    train_cfg = TrainConfig(**{**vars(cfg.train), "seed": cfg.seed, "workers": cfg.workers})
    t0 = time.perf_counter()
    stage_annotate(cfg.corpus, out / "annotated.txt", cfg.wordnet, cfg.words, cfg.passes,
                   cfg.synset_model, train_cfg, cfg.workers)
    synsets = cfg.synset_model
    if synsets is None:
        synsets = out / "synsets.vec"
        stage_train(out / "annotated.txt", synsets, train_cfg)
    stage_chain(out / "annotated.txt", out / "chained.txt", cfg.mode, cfg.chunk_size, synsets,
                cfg.wordnet, cfg.workers)
    stage_train(out / "chained.txt", out / "chains.vec", train_cfg)
    stage_vectorize(out / "chained.txt", out / "vectors.csv", out / "chains.vec")
    result = stage_evaluate(out / "report.txt", csv=out / "vectors.csv", classifier=cfg.classifier,
                            params=cfg.classifier_params, folds=cfg.folds, seed=cfg.seed,
                            figure=out / "folds.png", name=cfg.name)
    _diag(f"pipeline: finished in {time.perf_counter() - t0:.1f}s")
    return result


# --------------------------------------------------------------------------
# argument parsing


def _add_train_options(p, **defaults):
    d = TrainConfig(**defaults)
    p.add_argument("--dim", type=int, default=d.dimension)
    p.add_argument("--window", type=int, default=d.window)
    p.add_argument("--min-count", type=int, default=d.min_count)
    p.add_argument("--epochs", type=int, default=d.epochs)
    p.add_argument("--negative", type=int, default=d.negative_samples)
    p.add_argument("--learning-rate", type=float, default=d.learning_rate)


def _train_config(args) -> TrainConfig:
    return TrainConfig(dimension=args.dim, window=args.window, min_count=args.min_count,
                       epochs=args.epochs, negative_samples=args.negative,
                       learning_rate=args.learning_rate, seed=args.seed, workers=args.workers)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--workers", type=int, help="worker threads; 1 (default) is fully deterministic")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lexchains", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", parents=[common], help="clean raw text and annotate senses")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--wordnet", help=f"WNDB directory or portable file (default ${WORDNET_ENV})")
    p.add_argument("--words", required=True, help="word-level model in text vector format")
    p.add_argument("--passes", type=int, default=0, help="refinement passes (default 0)")
    p.add_argument("--synset-model", help="synset model for refinement instead of retraining")
    _add_train_options(p)

    p = sub.add_parser("chain", parents=[common], help="build lexical chains")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mode", choices=("flexible", "fixed"), required=True)
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--model", help="synset model used to pick chain representatives")
    p.add_argument("--wordnet", help=f"needed for flexible mode (default ${WORDNET_ENV})")

    p = sub.add_parser("train", parents=[common], help="train CBOW vectors on a corpus")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    _add_train_options(p)

    p = sub.add_parser("vectorize", parents=[common], help="average token vectors per document")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--model", required=True)

    p = sub.add_parser("evaluate", parents=[common], help="k-fold F1-micro evaluation")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="document vectors from 'vectorize'")
    src.add_argument("--corpus", help="labeled token corpus")
    p.add_argument("--model", help="embedding model for --corpus")
    p.add_argument("--bow", action="store_true", help="tf-idf bag-of-words baseline for --corpus")
    p.add_argument("--top-k", type=int, default=300)
    p.add_argument("--classifier", choices=sorted(classify.CLASSIFIERS), default="knn")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--grid", action="append", default=[], metavar="KEY=V1,V2")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--report", required=True, help="results file (appended)")
    p.add_argument("--figure", help="per-fold score plot (PNG/PDF/SVG)")
    p.add_argument("--name", help="dataset name in the report")

    p = sub.add_parser("stats", parents=[common], help="document, class and token counts")
    p.add_argument("input")
    p.add_argument("--preprocess", action="store_true", help="clean raw text before counting tokens")

    p = sub.add_parser("study", parents=[common], help="fixed-chain chunk-size sweep")
    p.add_argument("input", help="labeled annotated corpus")
    p.add_argument("--model", required=True, help="synset model for document vectors")
    p.add_argument("--tsm", help="synset model for representatives (default --model)")
    p.add_argument("--chunk-sizes", default="1,2,3,4,5,6,7,8")
    p.add_argument("--classifier", choices=sorted(classify.CLASSIFIERS), default="knn")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--report", required=True)
    p.add_argument("--figure")

    p = sub.add_parser("run", parents=[common], help="run the whole pipeline from a JSON config")
    p.add_argument("config")
    return parser


def _params(items):
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise LexChainsError(f"parameter {item!r} is not key=value")
        out[key] = _number(value)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    explicit = {"seed": args.seed, "workers": args.workers}
    args.seed = 0 if args.seed is None else args.seed
    args.workers = 1 if args.workers is None else args.workers
    try:
        if args.workers < 1:
            raise LexChainsError("--workers must be >= 1")
        if args.command == "annotate":
            stage_annotate(args.input, args.output, args.wordnet, args.words, args.passes,
                           args.synset_model, _train_config(args), args.workers)
        elif args.command == "chain":
            if args.mode == "fixed" and args.chunk_size is None:
                parser.error("fixed mode requires --chunk-size")
            stage_chain(args.input, args.output, args.mode, args.chunk_size, args.model,
                        args.wordnet, args.workers)
        elif args.command == "train":
            stage_train(args.input, args.output, _train_config(args))
        elif args.command == "vectorize":
            stage_vectorize(args.input, args.output, args.model)
        elif args.command == "evaluate":
            if args.corpus and not (args.bow or args.model):
                parser.error("--corpus needs --model or --bow")
            stage_evaluate(args.report, csv=args.csv, corpus=args.corpus, model=args.model,
                           bow=args.bow, top_k=args.top_k, classifier=args.classifier,
                           params=_params(args.param), grid=_parse_grid(args.grid),
                           folds=args.folds, seed=args.seed, figure=args.figure, name=args.name)
        elif args.command == "stats":
            if args.preprocess:
                docs = read_raw_corpus(_require(args.input, "corpus"))
                for d in docs:
                    d.tokens = preprocess(d.tokens[0])
            else:
                docs = read_token_corpus(_require(args.input, "corpus"))
            for key, value in classify.dataset_stats(docs).items():
                print(f"{key}\t{value}")
        elif args.command == "study":
            docs = read_annotated_corpus(_require(args.input, "annotated corpus"))
            model = load_text_model(_require(args.model, "model"))
            tsm = load_text_model(args.tsm) if args.tsm else None
            sizes = [int(s) for s in args.chunk_sizes.split(",")]
            make_clf = _classifier_factory(args.classifier, _params(args.param))
            rows = classify.chunk_size_study(docs, model, sizes, make_clf, args.folds, args.seed, tsm)
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write("chunk_size f1_micro compression\n")
                for cs, f1, ratio in rows:
                    fh.write(f"{cs} {f1:.6f} {ratio:.6f}\n")
            if args.figure:
                plotting.plot_chunk_study(rows, args.figure, title=Path(args.input).stem)
            _diag(f"study: {len(rows)} chunk sizes written to {args.report}")
        elif args.command == "run":
            cfg = PipelineConfig.load(_require(args.config, "config"))
            for key, value in explicit.items():
                if value is not None:
                    setattr(cfg, key, value)
            run_pipeline(cfg)
    except (LexChainsError, OSError, ValueError) as exc:
        _diag(f"lexchains {args.command}: error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
