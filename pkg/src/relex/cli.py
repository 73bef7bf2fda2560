"""Command line: train, predict, eval, gradcheck, inspect-path, gen-synthetic."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .corpus import CorpusError, format_sentence, read_corpus
from .depstruct import KINDS, SPTREE, TreeError, extract_structure, shortest_path, validate_tree
from .metrics import evaluate_predictions
from .model import JointModel, PredictedRelation, SentenceResult

log = logging.getLogger("relex")


class CLIError(Exception):
    pass


def _require(path, what):
    if not path:
        raise CLIError(f"no {what} given")
    if not Path(path).is_file():
        raise CLIError(f"{what} not found: {path}")
    return path


def cmd_train(args) -> int:
    from .training import Trainer
    from .vocab import build_vocab, load_word_vectors

    cfg = load_config(args.config, args.set)
    overrides = {k: v for k, v in (("train_path", args.train), ("dev_path", args.dev),
                                   ("model_out", args.model_out)) if v}
    cfg = cfg.replace(**overrides).validate()
    train = read_corpus(_require(cfg.train_path, "training corpus"))
    dev = read_corpus(_require(cfg.dev_path, "dev corpus")) if cfg.dev_path else None
    if cfg.vectors_path:
        _require(cfg.vectors_path, "word vectors")
    if not cfg.model_out:
        raise CLIError("no model_out given")
    handler = None
    if cfg.log_path:
        handler = logging.FileHandler(cfg.log_path, mode="w", encoding="utf-8")
        handler.setFormatter(logging.Formatter("%(message)s"))
        logging.getLogger("relex").addHandler(handler)
    try:
        vocab = build_vocab(train, cfg.min_word_freq, cfg.negative_type)
        model = JointModel(vocab, cfg)
        if cfg.vectors_path:
            with open(cfg.vectors_path, encoding="utf-8") as f:
                n = load_word_vectors(f, vocab, model.emb.word.value)
            log.info("pretrained vectors cover %d of %d words", n, len(vocab.words) - 2)
        trainer = Trainer(model)
        trainer.pretrain_entities(train)
        result = trainer.train_joint(train, dev)
        model.save(cfg.model_out)
        if result.best_epoch is not None:
            log.info("kept epoch %d (best dev relation F1)", result.best_epoch)
    finally:
        if handler is not None:
            logging.getLogger("relex").removeHandler(handler)
            handler.close()
    return 0


def cmd_predict(args) -> int:
    from .training import predict_corpus

    model = JointModel.load(_require(args.model, "model"))
    corpus = read_corpus(_require(args.input, "input corpus"))
    results = predict_corpus(model, corpus)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        out.write("\n".join(format_prediction(s, r) for s, r in zip(corpus, results)))
    finally:
        if args.output:
            out.close()
    return 0


def format_prediction(sentence, result: SentenceResult) -> str:
    from .bilou import spans_to_tags

    tags = spans_to_tags(result.entities, len(sentence))
    rels = sorted({r.instance() for r in result.relations}, key=lambda r: (r.arg1, r.arg2, r.type))
    return format_sentence(sentence, tags, rels)


def _as_result(sentence) -> SentenceResult:
    rels = [PredictedRelation(r.type, sentence.entity_ending_at(r.arg1),
                              sentence.entity_ending_at(r.arg2)) for r in sentence.relations]
    return SentenceResult([], list(sentence.entities), rels)


def cmd_eval(args) -> int:
    gold = read_corpus(_require(args.gold, "gold corpus"))
    pred = read_corpus(_require(args.pred, "prediction file"))
    if len(gold) != len(pred):
        raise CLIError(f"gold has {len(gold)} sentences, predictions {len(pred)}")
    for k, (g, p) in enumerate(zip(gold, pred), start=1):
        if [t.form for t in g.tokens] != [t.form for t in p.tokens]:
            raise CLIError(f"sentence {k}: tokens differ between gold and predictions")
    report = evaluate_predictions(gold, [_as_result(p) for p in pred], args.negative_type)
    print(report.table())
    print(report.machine_line())
    return 0


def cmd_gradcheck(args) -> int:
    from .gradsuite import TOLERANCE, run_suite, worst

    results = run_suite(args.seed, args.dims)
    failed = False
    for name, checks in results.items():
        err = worst(checks)
        ok = err <= TOLERANCE
        failed |= not ok
        print(f"{'PASS' if ok else 'FAIL'} {name:20s} max rel err {err:.2e} "
              f"({sum(c.n_elements for c in checks)} elements)")
    return 1 if failed else 0


def cmd_inspect_path(args) -> int:
    corpus = read_corpus(_require(args.corpus, "corpus"))
    if not 1 <= args.sentence <= len(corpus):
        raise CLIError(f"sentence number must be in 1..{len(corpus)}")
    sentence = corpus[args.sentence - 1]
    n = len(sentence)
    for i in (args.first, args.second):
        if not 1 <= i <= n:
            raise CLIError(f"token index {i} outside 1..{n}")
    tree = validate_tree(sentence.tokens)
    st = extract_structure(tree, args.first, args.second, args.kind)
    path = shortest_path(tree, args.first, args.second)
    print("path: " + " ".join(f"{i}:{sentence.tokens[i - 1].form}" for i in path))
    print(f"kind: {st.kind}  anchor: {st.anchor}  lca: {st.lca}")
    for node in st.nodes:
        tok = sentence.tokens[node - 1]
        kind = "ON_PATH" if st.node_type[node] == 0 else "OFF_PATH"
        print(f"{node}\t{tok.form}\t{kind}\tparent={st.parent[node]}")
    return 0


def cmd_gen_synthetic(args) -> int:
    from .synthetic import gen_synthetic

    text = gen_synthetic(args.n, args.seed, nominal=args.nominal)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _kind(text):
    return {k.lower(): k for k in KINDS}.get(text.lower(), text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relex", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    t = sub.add_parser("train", help="pretrain the tagger, then train jointly")
    t.add_argument("--config", help="key = value configuration file")
    t.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (repeatable)")
    t.add_argument("--train", help="training corpus (train_path)")
    t.add_argument("--dev", help="dev corpus for model selection (dev_path)")
    t.add_argument("--model-out", help="where to write the model (model_out)")
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", help="tag entities and relations in a corpus")
    pr.add_argument("--model", required=True)
    pr.add_argument("--input", required=True)
    pr.add_argument("--output", help="output file (default: stdout)")
    pr.set_defaults(func=cmd_predict)

    e = sub.add_parser("eval", help="score predictions against gold")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--negative-type", default="Other",
                   help="relation type treated as no relation (default: Other)")
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("gradcheck", help="finite-difference gradient suite")
    g.add_argument("--dims", choices=("small", "tiny"), default="small")
    g.add_argument("--seed", type=int, default=7)
    g.set_defaults(func=cmd_gradcheck)

    ip = sub.add_parser("inspect-path", help="show the relation substructure for two tokens")
    ip.add_argument("corpus")
    ip.add_argument("sentence", type=int, help="1-based sentence number")
    ip.add_argument("first", type=int)
    ip.add_argument("second", type=int)
    ip.add_argument("--kind", type=_kind, choices=KINDS, default=SPTREE,
                    help="structure type (case-insensitive)")
    ip.set_defaults(func=cmd_inspect_path)

    gs = sub.add_parser("gen-synthetic", help="write a synthetic corpus")
    gs.add_argument("-n", type=int, default=20)
    gs.add_argument("--seed", type=int, default=42)
    gs.add_argument("--nominal", action="store_true",
                    help="one marked noun pair per sentence (nominal-pair mode data)")
    gs.add_argument("-o", "--output")
    gs.set_defaults(func=cmd_gen_synthetic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.INFO if args.verbose or args.command == "train" else logging.WARNING
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    log.setLevel(level)
    try:
        return args.func(args)
    except (CLIError, ConfigError, CorpusError, TreeError, ValueError, OSError) as exc:
        print(f"relex: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
