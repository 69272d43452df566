"""``calmeasure`` command-line interface.

Every JSON report carries the tool version, the subcommand, the full flag
set and the seed. Exit status is 0 on success, 1 on invalid input and 2 on
I/O failure; failures print ``{"error": ..., "error_type": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path


from . import __version__
from .complexity import (
    VARIANTS,
    estimate_interval_rademacher,
    finite_output_bound,
    theorem2_epsilon,
)
from .core import ScoredDataset
from .decision import CostPair, bayes_threshold, empirical_loss, loss_ratio_experiment
from .errors import CalibrationError, IoFailure, ParseError
from .experiments import reproduce_table1
from .ioutil import (
    atomic_write_text,
    dumps_report,
    read_scores_csv,
    to_jsonable,
    write_scores_csv,
)
from .measure import empirical_calibration, empirical_calibration_bruteforce
from .models import (
    TrainConfig,
    predict_logistic,
    predict_naive_bayes,
    read_sparse_examples,
    rescale_scores,
    save_model,
    train_logistic,
    train_naive_bayes,
    examples_to_matrix,
)
from .pav import LinkFunction, apply_link, build_link, fit_pav
from .synthlda import LdaConfig, export_corpus, generate_corpus, import_corpus

DEFAULT_SEED = 0xC0FFEE


def _load_dataset(path) -> ScoredDataset:
    scores, labels = read_scores_csv(path)
    return ScoredDataset.from_arrays(scores, labels)


def _read_link(path) -> LinkFunction:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        return LinkFunction.loads(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad link file {path}: {exc}") from exc


def _p_grid(args) -> list[float]:
    if args.p:
        return [float(p) for p in args.p]
    return [k / 10 for k in range(1, 10)]


# -- command handlers: each returns (result, rows-for-csv or None) ----------


def cmd_measure(args):
    ds = _load_dataset(args.input)
    fn = empirical_calibration_bruteforce if args.bruteforce else empirical_calibration
    return fn(ds), None


def cmd_calibrate(args):
    ds = _load_dataset(args.train)
    link = build_link(fit_pav(ds), ds)
    if args.emit_link:
        atomic_write_text(args.emit_link, link.dumps() + "\n")
    after = empirical_calibration(ds.with_scores(link(ds.scores)))
    result = {
        "n": ds.n,
        "c_emp_before": empirical_calibration(ds).c_emp,
        "c_emp_after": after.c_emp,
        "num_knots": len(link.knots),
        "link": link.to_json(),
    }
    rows = [{"score": s, "value": v} for s, v in link.knots]
    return result, rows


def cmd_apply(args):
    link = _read_link(args.link)
    ds = _load_dataset(args.input)
    text = write_scores_csv(None, apply_link(link, ds.scores), ds.labels)
    if args.output:
        atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return None, None


def cmd_decide(args):
    ds = _load_dataset(args.input)
    costs = CostPair(args.fp_cost, args.fn_cost)
    thresholds = args.threshold or [bayes_threshold(costs)]
    summaries = [empirical_loss(ds, t, costs) for t in thresholds]
    return summaries, [s.to_json() for s in summaries]


def cmd_loss_ratio(args):
    train = _load_dataset(args.train) if args.train else None
    pairs = loss_ratio_experiment(
        train, _load_dataset(args.validation), _load_dataset(args.test), _p_grid(args)
    )
    rows = [{"p": p, "ratio": r} for p, r in pairs]
    return rows, rows


def cmd_rademacher(args):
    ds = _load_dataset(args.input)
    est = estimate_interval_rademacher(ds, args.variant, args.num_sigma, args.seed)
    return est, None


def cmd_bound(args):
    if args.finite_output:
        if args.d is None or args.n is None or args.pstar is None:
            raise CalibrationError("--finite-output needs --d, --n and --pstar")
        value = finite_output_bound(args.d, args.n, args.pstar)
        return {"bound": "finite-output", "value": value}, None
    if args.rademacher is None or args.n is None:
        raise CalibrationError("--theorem2 needs --rademacher and --n")
    value = theorem2_epsilon(args.rademacher, args.n, args.delta)
    return {"bound": "theorem2-epsilon", "value": value}, None


def _lda_config(args) -> LdaConfig:
    return LdaConfig(
        num_docs=args.num_docs,
        num_topics=args.num_topics,
        vocab_size=args.vocab_size,
        avg_doc_len=args.avg_doc_len,
        labels_per_doc=args.labels_per_doc,
        target_topic=args.target_topic,
        power_law_exponent=args.power_law_exponent,
        seed=args.seed,
    )


def cmd_simulate_lda(args):
    from .synthlda import corpus_baselines

    corpus = generate_corpus(_lda_config(args))
    export_corpus(corpus, args.corpus_out)
    freq, trivial = corpus_baselines(corpus)
    return {
        "num_docs": len(corpus),
        "label_frequency": freq,
        "trivial_l1": trivial,
        "mean_true_prob": float(corpus.true_probs.mean()),
        "corpus": str(args.corpus_out),
    }, None


def cmd_train(args):
    if bool(args.corpus) == bool(args.examples):
        raise CalibrationError("give exactly one of --corpus or --examples")
    if args.corpus:
        corpus = import_corpus(args.corpus)
        X, y = corpus.count_matrix(), corpus.labels.astype(float)
    else:
        X, y = examples_to_matrix(read_sparse_examples(args.examples), args.dimensionality)
    if args.model == "logistic":
        cfg = TrainConfig(args.lr, args.epochs, args.l2, args.seed, args.batch_size)
        model = train_logistic(X, cfg, labels=y)
        scores = predict_logistic(model, X)
        extra = {"final_loss": model.loss_history[-1], "first_epoch_loss": model.loss_history[0]}
    else:
        model = train_naive_bayes(X, args.smoothing, labels=y)
        scores = predict_naive_bayes(model, X)
        extra = {}
    if args.model_out:
        save_model(model, args.model_out)
    if args.scores_out:
        write_scores_csv(args.scores_out, scores, y.astype(int))
    report = empirical_calibration(ScoredDataset.from_arrays(scores, y))
    return {"model": args.model, "n": int(X.shape[0]), "dimensionality": int(X.shape[1]),
            "train_c_emp": report.c_emp, **extra}, None


def cmd_rescale(args):
    scores, labels = read_scores_csv(args.input, allow_any_score=True)
    text = write_scores_csv(None, rescale_scores(scores), labels)
    if args.output:
        atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return None, None


def cmd_table1(args):
    return reproduce_table1(seed=args.seed), None


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="calmeasure", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, handler, help_, json_output=True):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(handler=handler)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if json_output:
            sp.add_argument("--output", "-o", help="JSON report path (default: stdout)")
            sp.add_argument("--emit-csv", help="flatten report arrays into this CSV")
        return sp

    sp = add("measure", cmd_measure, "empirical calibration measure of a score,label CSV")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--bruteforce", action="store_true", help="use the O(m^2 n) reference")

    sp = add("calibrate", cmd_calibrate, "fit an isotonic link on a score,label CSV")
    sp.add_argument("--train", required=True)
    sp.add_argument("--emit-link", help="write the link function JSON here")

    sp = add("apply", cmd_apply, "apply a link to a score,label CSV", json_output=False)
    sp.add_argument("--link", required=True)
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--output", "-o", help="calibrated CSV path (default: stdout)")

    sp = add("decide", cmd_decide, "asymmetric-loss decisions at given thresholds")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--fp-cost", type=float, required=True)
    sp.add_argument("--fn-cost", type=float, required=True)
    sp.add_argument("--threshold", type=float, action="append",
                    help="repeatable; default is the Bayes threshold a/(a+b)")

    sp = add("loss-ratio", cmd_loss_ratio, "post/pre recalibration loss ratio per level p")
    sp.add_argument("--train")
    sp.add_argument("--validation", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--p", type=float, action="append", help="repeatable; default 0.1..0.9")

    sp = add("rademacher", cmd_rademacher, "Rademacher complexity of the interval class")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--variant", choices=VARIANTS, default="H")
    sp.add_argument("--num-sigma", type=int, default=1000)

    sp = add("bound", cmd_bound, "closed-form bounds")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--theorem2", action="store_true", help="epsilon from R, n, delta")
    mode.add_argument("--finite-output", action="store_true", help="finite-output R bound")
    sp.add_argument("--rademacher", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--d", type=int)
    sp.add_argument("--pstar", type=int)

    d = LdaConfig()
    sp = add("simulate-lda", cmd_simulate_lda, "generate the synthetic LDA corpus")
    sp.add_argument("--corpus-out", required=True, help="corpus file to write")
    sp.add_argument("--num-docs", type=int, default=d.num_docs)
    sp.add_argument("--num-topics", type=int, default=d.num_topics)
    sp.add_argument("--vocab-size", type=int, default=d.vocab_size)
    sp.add_argument("--avg-doc-len", type=float, default=d.avg_doc_len)
    sp.add_argument("--labels-per-doc", type=int, default=d.labels_per_doc)
    sp.add_argument("--target-topic", type=int, default=d.target_topic)
    sp.add_argument("--power-law-exponent", type=float, default=d.power_law_exponent)

    sp = add("train", cmd_train, "train logistic regression or naive Bayes")
    sp.add_argument("--corpus", help="corpus written by simulate-lda")
    sp.add_argument("--examples", help="'label idx:val ...' lines")
    sp.add_argument("--dimensionality", type=int)
    sp.add_argument("--model", choices=("logistic", "naive-bayes"), default="logistic")
    t = TrainConfig()
    sp.add_argument("--lr", type=float, default=t.learning_rate)
    sp.add_argument("--epochs", type=int, default=t.epochs)
    sp.add_argument("--l2", type=float, default=t.l2)
    sp.add_argument("--batch-size", type=int)
    sp.add_argument("--smoothing", type=float, default=1.0)
    sp.add_argument("--model-out")
    sp.add_argument("--scores-out", help="write training-set score,label CSV")

    sp = add("rescale", cmd_rescale, "min-max rescale raw scores into [0, 1]", json_output=False)
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--output", "-o")

    add("table1", cmd_table1, "reproduce the LDA l1-vs-calibration table")
    return p


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "handler"}


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    rows = to_jsonable(rows)
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _emit_error(exc: BaseException, status: int) -> int:
    sys.stdout.write(json.dumps({"error": str(exc), "error_type": type(exc).__name__}) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, rows = args.handler(args)
        if result is None:
            return 0
        flags = _flags(args)
        report = {
            "tool": "calmeasure",
            "version": __version__,
            "command": args.command,
            "flags": flags,
            "seed": args.seed,
            "result": result,
        }
        text = dumps_report(report)
        if args.output:
            atomic_write_text(args.output, text)
        else:
            sys.stdout.write(text)
        if getattr(args, "emit_csv", None) and rows is not None:
            atomic_write_text(args.emit_csv, _rows_to_csv(rows))
        return 0
    except CalibrationError as exc:
        return _emit_error(exc, 1)
    except OSError as exc:
        return _emit_error(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
