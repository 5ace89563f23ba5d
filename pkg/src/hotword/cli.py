"""Command-line surface tying the engine together.

Exit codes: 0 success, 1 usage, 2 data/format error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from .audio import AudioClip, fit_window, read_wav, resample, synth_dataset
from .bench import sweep
from .errors import HotwordError, TemplateError
from .features import SAMPLE_RATE, dump_f32, load_f32, log_mel
from .matching import enroll, load_template, save_template
from .network import embed, load_weights, random_weights, save_weights
from .stream import StreamConfig, WindowRing, run_stream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_16k(path: str | Path) -> AudioClip:
    return resample(read_wav(path), SAMPLE_RATE)


def _load_templates(spec: str, cutoff: float | None):
    path = Path(spec)
    if path.is_dir():
        paths = sorted(path.glob("*.ewnt"))
        if not paths:
            raise TemplateError(f"no .ewnt templates under {path}")
    else:
        paths = [path]
    templates = [load_template(p) for p in paths]
    if cutoff is not None:
        templates = [dataclasses.replace(t, cutoff=cutoff) for t in templates]
    return templates


def _cmd_enroll(args) -> int:
    clips = [_read_16k(p) for p in args.refs.split(",")]
    weights = load_weights(args.model)
    template = enroll(args.name, clips, weights, tau=args.tau, cutoff=args.cutoff)
    save_template(template, args.out)
    print(f"enrolled '{args.name}' with {len(clips)} reference(s) -> {args.out}")
    return EXIT_OK


def _cmd_detect(args) -> int:
    weights = load_weights(args.model)
    templates = _load_templates(args.templates, args.cutoff)
    clip = _read_16k(args.wav)
    hop = StreamConfig().hop_samples
    chunks = (clip.samples[i : i + hop] for i in range(0, len(clip.samples), hop))
    for event in run_stream(chunks, templates, weights):
        print(event.as_line())
    return EXIT_OK


def _cmd_listen(args) -> int:
    try:
        import sounddevice
    except ImportError as exc:
        raise RuntimeError(
            "live capture needs the 'sounddevice' package (pip install sounddevice)"
        ) from exc

    weights = load_weights(args.model)
    templates = _load_templates(args.templates, args.cutoff)
    cfg = StreamConfig()
    ring = WindowRing(cfg.queue_capacity)

    def on_audio(indata, frames, t, status):
        ring.push(indata[:, 0].copy())

    def chunks():
        while True:
            chunk = ring.pop()
            if chunk is None:
                time.sleep(cfg.hop_s / 4)
                continue
            yield chunk

    stream_kwargs = dict(samplerate=SAMPLE_RATE, channels=1, callback=on_audio,
                         blocksize=cfg.hop_samples)
    if args.device is not None:
        stream_kwargs["device"] = args.device
    with sounddevice.InputStream(**stream_kwargs):
        try:
            for event in run_stream(chunks(), templates, weights, cfg):
                print(event.as_line(), flush=True)
        except KeyboardInterrupt:
            pass
    return EXIT_OK


def _cmd_bench(args) -> int:
    weights = load_weights(args.model)
    template = load_template(args.template)
    background = _read_16k(args.background)
    report = sweep(
        args.positives,
        background,
        template,
        weights,
        debounce=not args.no_debounce,
    )
    out = Path(args.out)
    report.save(out)
    print(f"wrote {out}")
    if not args.no_plot:
        from .plots import render_report

        figure_path = Path(args.plot) if args.plot else out.with_suffix(".png")
        render_report(report, figure_path)
        print(f"wrote {figure_path}")
    return EXIT_OK


def _cmd_spectrogram(args) -> int:
    clip = fit_window(_read_16k(args.wav))
    dump_f32(log_mel(clip), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    manifest = synth_dataset(
        args.words, args.noises, args.out, per_word=args.per_word, seed=args.seed
    )
    print(f"wrote {manifest}")
    return EXIT_OK


def _cmd_init_weights(args) -> int:
    save_weights(random_weights(args.seed), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_embed(args) -> int:
    weights = load_weights(args.model)
    vector = embed(load_f32(args.spec), weights)
    Path(args.out).write_bytes(vector.astype("<f4").tobytes())
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hotword", description="One-shot hotword detection engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="build a template from reference recordings")
    p.add_argument("--name", required=True)
    p.add_argument("--refs", required=True, help="comma-separated wav paths")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tau", type=float, default=0.2)
    p.add_argument("--cutoff", type=float, default=0.5)
    p.set_defaults(func=_cmd_enroll)

    p = sub.add_parser("detect", help="detect enrolled hotwords in a wav file")
    p.add_argument("--wav", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--templates", required=True, help=".ewnt file or directory")
    p.add_argument("--cutoff", type=float, default=None)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("listen", help="detect live from a microphone")
    p.add_argument("--input", choices=["mic"], default="mic")
    p.add_argument("--device", default=None)
    p.add_argument("--model", required=True)
    p.add_argument("--templates", required=True)
    p.add_argument("--cutoff", type=float, default=None)
    p.set_defaults(func=_cmd_listen)

    p = sub.add_parser("bench", help="FRR/FAR sweep over a cutoff grid")
    p.add_argument("--positives", required=True)
    p.add_argument("--background", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-debounce", action="store_true")
    p.add_argument("--plot", default=None, help="figure path (default: CSV path with .png)")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("spectrogram", help="dump the 98x64 log mel matrix as raw f32")
    p.add_argument("--wav", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_spectrogram)

    p = sub.add_parser("synth", help="generate a noisy word dataset + manifest")
    p.add_argument("--words", required=True)
    p.add_argument("--noises", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--per-word", type=int, default=5)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("init-weights", help="write randomly initialized valid weights")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_init_weights)

    p = sub.add_parser("embed", help="embed a dumped spectrogram (raw f32 in/out)")
    p.add_argument("--spec", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_embed)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except HotwordError as exc:
        print(f"hotword: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"hotword: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
