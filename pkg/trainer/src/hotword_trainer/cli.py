"""Trainer command line: corpus fixtures, word-pool filtering, training runs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .export import export_parity_fixture, export_weights
from .fixtures import make_tone_corpus
from .pairs import build_pairs
from .phonemes import filter_word_pool, parse_lexicon
from .train import TrainConfig, fit


def _cmd_make_fixture(args) -> int:
    manifest = make_tone_corpus(args.out, n_words=args.words, variants=args.variants,
                                seed=args.seed)
    print(f"wrote {manifest}")
    return 0


def _cmd_filter_words(args) -> int:
    pool = filter_word_pool(parse_lexicon(args.lexicon))
    out = Path(args.out)
    out.write_text(
        "".join(f"{word}\t{' '.join(phonemes)}\n" for word, phonemes in pool.words),
        encoding="utf-8",
    )
    print(f"kept {len(pool.words)}, dropped {len(pool.dropped)} -> {out}")
    return 0


def _cmd_fit(args) -> int:
    cfg = TrainConfig(
        batch=args.batch,
        steps_per_epoch=args.steps,
        max_epochs=args.epochs,
    )
    pairs = build_pairs(args.manifest, seed=args.seed)
    model, history = fit(pairs, cfg, seed=args.seed)

    if args.finetune_manifest:
        from .train import finetune

        clean = build_pairs(args.finetune_manifest, seed=args.seed)
        history.epochs.extend(
            finetune(model, clean, cfg, epochs=args.finetune_epochs, seed=args.seed).epochs
        )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    weights_path = export_weights(model, out_dir / "weights.ewn")
    history.save_csv(out_dir / "history.csv")
    spec_path, embedding_path = export_parity_fixture(model, out_dir)
    last = history.epochs[-1]
    print(f"wrote {weights_path}, {out_dir / 'history.csv'}, {spec_path}, {embedding_path}")
    print(f"final epoch {last.epoch}: loss {last.loss:.4f}, val_acc {last.val_acc:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotword-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-fixture", help="synthesize a tone-word corpus + manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--words", type=int, default=10)
    p.add_argument("--variants", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_make_fixture)

    p = sub.add_parser("filter-words", help="drop phonetically similar words from a lexicon")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_filter_words)

    p = sub.add_parser("fit", help="train on a dataset manifest and export EWN1 weights")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--steps", type=int, default=75)
    p.add_argument("--epochs", type=int, default=42)
    p.add_argument("--finetune-manifest", default=None,
                   help="noise-free manifest for the retraining pass")
    p.add_argument("--finetune-epochs", type=int, default=14)
    p.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"hotword-trainer: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
