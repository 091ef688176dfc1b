"""Command-line entry point: ``bitextforge {run,profiles,stats,detect}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import TextDocument, stats_for_files
from .langid import LanguageIdError, LanguageProfile, detect_file, detect_string, load_profiles, train_profile
from .normalize import normalize_text
from .pipeline import STAGES, ConfigError, NoDocumentsError, NoPairsError, PipelineConfig, run_pipeline

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NO_PAIRS = 2
EXIT_CONFIG = 3

log = logging.getLogger("bitextforge")


def cmd_run(args) -> int:
    try:
        config = PipelineConfig.from_file(args.config)
        if args.workers:
            config.workers = args.workers
        config.validate()
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        corpus, manifest = run_pipeline(config, stop_after=args.stop_after)
    except NoDocumentsError as exc:
        print(f"error: no documents: {exc}", file=sys.stderr)
        return EXIT_NO_PAIRS
    except NoPairsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.manifest is not None:
            for row in exc.manifest.stages.get("extract", {}).get("documents", []):
                print(f"  {row['doc_id']}: {row['language']} ({row['chars']} chars)", file=sys.stderr)
        return EXIT_NO_PAIRS
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for skip in manifest.skipped:
        print(f"skipped {skip['doc_id']} ({skip['stage']}): {skip['reason']}", file=sys.stderr)
    if corpus is None:
        print(f"{manifest.status}; manifest in {config.output_dir}")
    else:
        clean = manifest.stages["clean"]
        print(
            f"{len(manifest.stages['docalign']['pairs'])} document pairs, "
            f"{corpus.stats.line_count} sentence pairs kept "
            f"({sum(v for k, v in clean.items() if k.startswith('removed'))} removed), "
            f"vocabulary {corpus.stats.vocab_size}"
        )
    return EXIT_OK


def cmd_profiles_train(args) -> int:
    text = "\n".join(normalize_text(Path(p).read_text(encoding="utf-8"))[0] for p in args.input)
    try:
        profile = train_profile(args.lang, text, alpha=args.alpha)
    except LanguageIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    profile.save(args.output)
    sizes = ", ".join(f"{n}-grams: {len(c)}" for n, c in sorted(profile.counts.items()))
    print(f"wrote {args.output} ({args.lang}; {sizes})")
    return EXIT_OK


def cmd_profiles_inspect(args) -> int:
    for path in args.profile:
        profile = LanguageProfile.load(path)
        print(f"{path}: language={profile.language} alpha={profile.alpha}")
        for n, counts in sorted(profile.counts.items()):
            total = sum(counts.values())
            top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[: args.top]
            shown = " ".join(f"{g!r}:{c}" for g, c in top)
            print(f"  order {n}: {len(counts)} types, {total} tokens; top {shown}")
    return EXIT_OK


def cmd_stats(args) -> int:
    if len(args.corpus) == 2:
        src, tgt = args.corpus
    elif len(args.corpus) == 1:
        prefix = args.corpus[0]
        src, tgt = f"{prefix}.{args.langs[0]}", f"{prefix}.{args.langs[1]}"
    else:
        print("error: give a corpus prefix or a source and a target file", file=sys.stderr)
        return EXIT_FAILURE
    try:
        stats = stats_for_files(src, tgt)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if args.json:
        print(json.dumps({"line_count": stats.line_count, "vocab_size": stats.vocab_size}))
    else:
        print(f"sentence pairs: {stats.line_count}")
        print(f"unique tokens (source + target): {stats.vocab_size}")
    return EXIT_OK


def cmd_detect(args) -> int:
    profiles = load_profiles(args.profile)
    try:
        if args.text is not None:
            pred = detect_string(args.text, profiles)
            print(f"{pred.language}\t{pred.confidence:.4f}")
        for path in args.files:
            text, _ = normalize_text(Path(path).read_text(encoding="utf-8"))
            pred = detect_file(TextDocument.from_text(str(path), text), profiles)
            print(f"{path}\t{pred.language}\t{pred.confidence:.4f}")
    except LanguageIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bitextforge", description="Build sentence-aligned parallel corpora from document collections.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="build a corpus from an input directory")
    run.add_argument("--config", required=True, help="YAML (or JSON) pipeline configuration")
    run.add_argument("--stop-after", choices=STAGES, help="stop after this stage and write its outputs")
    run.add_argument("--workers", type=int, help="override the configured worker count")
    run.set_defaults(func=cmd_run)

    profiles = sub.add_parser("profiles", help="train or inspect language profiles")
    psub = profiles.add_subparsers(dest="profiles_command", required=True)
    train = psub.add_parser("train", help="train a character n-gram profile from seed text")
    train.add_argument("--lang", required=True)
    train.add_argument("--input", required=True, nargs="+", help="UTF-8 seed text file(s)")
    train.add_argument("--output", required=True)
    train.add_argument("--alpha", type=float, default=0.5, help="additive smoothing (default 0.5)")
    train.set_defaults(func=cmd_profiles_train)
    inspect = psub.add_parser("inspect", help="summarise profile files")
    inspect.add_argument("profile", nargs="+")
    inspect.add_argument("--top", type=int, default=10)
    inspect.set_defaults(func=cmd_profiles_inspect)

    stats = sub.add_parser("stats", help="line count and vocabulary size of a parallel corpus")
    stats.add_argument("corpus", nargs="+", help="corpus prefix (NAME -> NAME.<src>, NAME.<tgt>) or two files")
    stats.add_argument("--langs", nargs=2, default=("en", "ga"), metavar=("SRC", "TGT"))
    stats.add_argument("--json", action="store_true")
    stats.set_defaults(func=cmd_stats)

    detect = sub.add_parser("detect", help="detect the language of a string or of files")
    detect.add_argument("files", nargs="*")
    detect.add_argument("--text")
    detect.add_argument("--profile", action="append", help="profile file (repeatable; default: bundled en/ga)")
    detect.set_defaults(func=cmd_detect)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
