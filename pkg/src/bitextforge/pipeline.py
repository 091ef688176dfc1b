"""End-to-end corpus construction: extract, normalize, detect, split, align, clean, write."""

from __future__ import annotations

import json
import logging
import os
import shlex
import subprocess
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from . import __version__
from .clean import DEFAULT_RATIO_BOUND, clean_pairs, write_rejects
from .corpus import ParallelCorpus, TextDocument, write_corpus
from .docalign import (
    DEFAULT_MAX_ITER,
    DEFAULT_RATIO_BOUNDS,
    DEFAULT_THRESHOLD,
    align_documents,
    write_manifest,
)
from .langid import SAMPLE_EVERY, SAMPLE_HEAD, LanguageIdError, detect_file, load_profiles
from .normalize import NormalizationReport, load_substitutions, normalize_text
from .sentalign import BeadCostModel, align_sentences, length_ratio, links_to_pairs, write_alignment
from .splitter import AbbreviationLexicon, split_editable, split_pdf_text

logger = logging.getLogger(__name__)

STAGES = ("extract", "split", "docalign", "sentalign", "clean")
PLAIN_TEXT_EXTENSIONS = (".txt",)


class ConfigError(ValueError):
    pass


class NoDocumentsError(RuntimeError):
    pass


class NoPairsError(RuntimeError):
    def __init__(self, message, manifest=None):
        super().__init__(message)
        self.manifest = manifest


class ExtractionError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    input_dir: Path
    output_dir: Path
    languages: tuple = ("en", "ga")
    name: str = "corpus"
    extractor_commands: dict = field(default_factory=dict)
    splitter_modes: dict = field(default_factory=lambda: {".pdf": "pdf"})
    substitutions: dict = field(default_factory=dict)
    profiles: list = field(default_factory=list)
    abbreviations: dict = field(default_factory=dict)
    dehyphenate: bool = True
    langid_head: int = SAMPLE_HEAD
    langid_every: int = SAMPLE_EVERY
    docalign_threshold: float = DEFAULT_THRESHOLD
    ratio_bounds: tuple = DEFAULT_RATIO_BOUNDS
    max_iter: int = DEFAULT_MAX_ITER
    bead_c: object = "auto"  # a float, or "auto" for each document pair's length ratio
    bead_s2: float = 6.8
    bead_priors: Optional[dict] = None
    allow_many_to_many: bool = False
    clean_ratio_bound: Optional[float] = DEFAULT_RATIO_BOUND
    write_rejects: bool = True
    workers: int = 1

    def __post_init__(self):
        self.input_dir = Path(self.input_dir)
        self.output_dir = Path(self.output_dir)
        self.languages = tuple(self.languages)
        self.ratio_bounds = tuple(self.ratio_bounds)
        self.extractor_commands = {_ext(k): v for k, v in self.extractor_commands.items()}
        self.splitter_modes = {_ext(k): v for k, v in self.splitter_modes.items()}
        self.validate(check_paths=False)

    def validate(self, check_paths=True):
        if len(self.languages) != 2 or self.languages[0] == self.languages[1]:
            raise ConfigError(f"languages must be two distinct codes, got {self.languages!r}")
        lo, hi = self.ratio_bounds
        if not 0 < lo <= hi:
            raise ConfigError(f"invalid ratio bounds {self.ratio_bounds!r}")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        bad = {k: v for k, v in self.splitter_modes.items() if v not in ("editable", "pdf")}
        if bad:
            raise ConfigError(f"unknown splitter modes {bad}")
        if self.bead_c != "auto" and (isinstance(self.bead_c, bool) or not (isinstance(self.bead_c, (int, float)) and self.bead_c > 0)):
            raise ConfigError(f"sentalign.c must be a positive number or 'auto', got {self.bead_c!r}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if check_paths:
            if not self.input_dir.is_dir():
                raise ConfigError(f"input_dir {self.input_dir} does not exist")
            for p in list(self.profiles) + list(self.abbreviations.values()):
                if not Path(p).is_file():
                    raise ConfigError(f"{p} does not exist")

    def bead_model(self) -> BeadCostModel:
        priors = None
        if self.bead_priors:
            priors = {tuple(int(x) for x in str(k).split("-")): float(v) for k, v in self.bead_priors.items()}
        c = 1.0 if self.bead_c == "auto" else float(self.bead_c)
        return BeadCostModel.default(self.allow_many_to_many, c, self.bead_s2, priors)

    def snapshot(self) -> dict:
        d = asdict(self)
        d["input_dir"] = str(self.input_dir)
        d["output_dir"] = str(self.output_dir)
        d["languages"] = list(self.languages)
        d["ratio_bounds"] = list(self.ratio_bounds)
        d["profiles"] = [str(p) for p in self.profiles]
        d["abbreviations"] = {k: str(v) for k, v in self.abbreviations.items()}
        d["substitutions"] = {f"{ord(k):04X}": "-" if not v else f"{ord(v):04X}" for k, v in self.substitutions.items()}
        return d

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "PipelineConfig":
        """Build from the nested structure of a config file.

        Relative paths are resolved against ``base_dir``.
        """
        base = Path(base_dir or ".")
        data = dict(data or {})

        def path(p):
            p = Path(os.path.expanduser(str(p)))
            return p if p.is_absolute() else base / p

        def section(key):
            value = data.pop(key, None)
            if value is None:
                return {}
            if not isinstance(value, dict):
                raise ConfigError(f"'{key}' must be a mapping")
            return value

        try:
            kw = {
                "input_dir": path(data.pop("input_dir")),
                "output_dir": path(data.pop("output_dir")),
            }
        except KeyError as exc:
            raise ConfigError(f"missing required key {exc.args[0]!r}") from None
        for key in ("languages", "name", "extractor_commands", "splitter_modes", "dehyphenate", "workers",
                    "write_rejects"):
            if key in data:
                kw[key] = data.pop(key)
        norm = section("normalize")
        if "substitutions" in norm:
            subs = norm.pop("substitutions")
            if isinstance(subs, dict):
                kw["substitutions"] = {chr(int(str(k), 16)): ("" if v in ("-", None) else chr(int(str(v), 16)))
                                       for k, v in subs.items()}
            else:
                kw["substitutions"] = load_substitutions(path(subs))
        langid = section("langid")
        if "profiles" in langid:
            kw["profiles"] = [path(p) for p in langid.pop("profiles") or []]
        kw["langid_head"] = langid.pop("head", SAMPLE_HEAD)
        kw["langid_every"] = langid.pop("every", SAMPLE_EVERY)
        split = section("split")
        if "abbreviations" in split:
            kw["abbreviations"] = {k: path(v) for k, v in split.pop("abbreviations").items()}
        if "dehyphenate" in split:
            kw["dehyphenate"] = bool(split.pop("dehyphenate"))
        if "modes" in split:
            kw["splitter_modes"] = split.pop("modes")
        docalign = section("docalign")
        kw["docalign_threshold"] = float(docalign.pop("threshold", DEFAULT_THRESHOLD))
        kw["ratio_bounds"] = tuple(docalign.pop("ratio_bounds", DEFAULT_RATIO_BOUNDS))
        kw["max_iter"] = int(docalign.pop("max_iter", DEFAULT_MAX_ITER))
        sentalign = section("sentalign")
        kw["bead_c"] = sentalign.pop("c", "auto")  # checked in validate()
        kw["bead_s2"] = float(sentalign.pop("s2", 6.8))
        kw["bead_priors"] = sentalign.pop("priors", None)
        kw["allow_many_to_many"] = bool(sentalign.pop("allow_many_to_many", False))
        clean = section("clean")
        if "ratio_bound" in clean:
            rb = clean.pop("ratio_bound")
            kw["clean_ratio_bound"] = None if rb is None else float(rb)
        leftovers = [k for k, v in (("", data), ("normalize.", norm), ("langid.", langid), ("split.", split),
                                    ("docalign.", docalign), ("sentalign.", sentalign), ("clean.", clean))
                     for k in (k + key for key in v)]
        if leftovers:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(leftovers))}")
        try:
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping")
        return cls.from_dict(data, base_dir=path.parent)


def _ext(name: str) -> str:
    name = str(name).lower()
    return name if name.startswith(".") else "." + name


@dataclass
class RunManifest:
    config: dict
    tool_version: str = __version__
    status: str = "ok"
    stages: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "status": self.status,
            "config": self.config,
            "stages": self.stages,
            "skipped": self.skipped,
        }

    def write(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")


# -- stages ---------------------------------------------------------------

def extract(path, config: PipelineConfig, doc_id: str | None = None) -> tuple[TextDocument, NormalizationReport]:
    """Text of one input file via its configured external command, normalized.

    Files with a plain-text extension are read directly.
    """
    path = Path(path)
    ext = path.suffix.lower()
    template = config.extractor_commands.get(ext)
    if template:
        argv = [tok.replace("{input}", str(path)) for tok in shlex.split(template)]
        if not any("{input}" in tok for tok in shlex.split(template)):
            argv.append(str(path))
        try:
            proc = subprocess.run(argv, capture_output=True, check=False)
        except OSError as exc:
            raise ExtractionError(f"{path}: cannot run {argv[0]}: {exc.strerror or exc}") from exc
        if proc.returncode != 0:
            err = proc.stderr.decode("utf-8", "replace").strip().splitlines()
            raise ExtractionError(f"{path}: {argv[0]} exited with {proc.returncode}" + (f": {err[-1]}" if err else ""))
        data, tag = proc.stdout, argv[0]
    elif ext in PLAIN_TEXT_EXTENSIONS:
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ExtractionError(f"{path}: {exc.strerror or exc}") from exc
        tag = "text"
    else:
        raise ExtractionError(f"{path}: no extractor configured for '{ext}'")
    try:
        raw = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ExtractionError(f"{path}: output is not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc
    text, report = normalize_text(raw, config.substitutions)
    doc = TextDocument.from_text(doc_id or path.name, text, origin=str(path), extractor=tag)
    return doc, report


def _split_job(args):
    doc, mode, lex, dehyphenate = args
    if mode == "pdf":
        return split_pdf_text(doc, lex, dehyphenate)
    return split_editable(doc, lex)


def _align_job(args):
    pair_id, src, tgt, model, auto_c = args
    if auto_c:
        model = model.with_c(length_ratio(src, tgt))
    return pair_id, model.c, align_sentences(src, tgt, model)


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def _input_files(input_dir: Path) -> list[Path]:
    return sorted((p for p in input_dir.rglob("*") if p.is_file() and not p.name.startswith(".")),
                  key=lambda p: p.relative_to(input_dir).as_posix())


def run_pipeline(config: PipelineConfig, stop_after: str | None = None):
    """Run every stage; returns ``(ParallelCorpus or None, RunManifest)``.

    ``stop_after`` names the last stage to run; the corpus is only built
    when the run goes all the way.
    """
    if stop_after is not None and stop_after not in STAGES:
        raise ConfigError(f"unknown stage {stop_after!r}; choose from {', '.join(STAGES)}")
    config.validate()
    files = _input_files(config.input_dir)
    if not files:
        raise NoDocumentsError(f"no documents in {config.input_dir}")

    out = config.output_dir
    stage_dir = out / "stages"
    manifest = RunManifest(config=config.snapshot())
    manifest_path = out / f"{config.name}.manifest.json"
    src_lang, tgt_lang = config.languages

    # extract + normalize + language detection
    profiles = load_profiles(config.profiles)
    docs, doc_rows, total_norm = [], [], NormalizationReport()
    for path in files:
        doc_id = path.relative_to(config.input_dir).as_posix()
        try:
            doc, report = extract(path, config, doc_id)
        except ExtractionError as exc:
            logger.warning("skipping %s", exc)
            manifest.skipped.append({"doc_id": doc_id, "stage": "extract", "reason": str(exc)})
            continue
        total_norm = total_norm + report
        try:
            pred = detect_file(doc, profiles, config.langid_head, config.langid_every)
        except LanguageIdError as exc:
            manifest.skipped.append({"doc_id": doc_id, "stage": "extract", "reason": str(exc)})
            continue
        doc = doc.with_language(pred.language)
        row = {"doc_id": doc_id, "origin": doc.origin, "extractor": doc.extractor, "lines": len(doc.lines),
               "chars": doc.char_count, "language": pred.language, "confidence": round(pred.confidence, 6),
               "normalization": report.to_dict()}
        doc_rows.append(row)
        if pred.language not in config.languages:
            manifest.skipped.append({"doc_id": doc_id, "stage": "extract",
                                     "reason": f"detected language {pred.language!r} is not configured"})
            continue
        docs.append(doc)
    manifest.stages["extract"] = {"documents": doc_rows, "normalization": total_norm.to_dict()}
    if stop_after == "extract":
        for doc in docs:
            _write_text(stage_dir / "extract" / f"{doc.doc_id}.{doc.language}.txt", doc.text + "\n")
        _finish(manifest, manifest_path, "stopped-after-extract")
        return None, manifest

    # sentence splitting
    lexicons = {lang: (AbbreviationLexicon.load(config.abbreviations[lang], lang) if lang in config.abbreviations
                       else AbbreviationLexicon.default(lang)) for lang in config.languages}
    jobs = [(doc, _split_mode(doc, config), lexicons[doc.language], config.dehyphenate) for doc in docs]
    sentences = {doc.doc_id: sl for doc, sl in zip(docs, _map(_split_job, jobs, config.workers))}
    manifest.stages["split"] = {d.doc_id: {"sentences": len(sentences[d.doc_id]), "mode": _split_mode(d, config)}
                                for d in docs}
    if stop_after == "split":
        for doc_id, sl in sentences.items():
            _write_text(stage_dir / "split" / f"{doc_id}.sent", "".join(s + "\n" for s in sl))
        _finish(manifest, manifest_path, "stopped-after-split")
        return None, manifest

    # document alignment
    sources = [d for d in docs if d.language == src_lang and len(sentences[d.doc_id])]
    targets = [d for d in docs if d.language == tgt_lang and len(sentences[d.doc_id])]
    result = align_documents(sources, targets, config.docalign_threshold, config.max_iter, config.ratio_bounds)
    manifest.stages["docalign"] = result.to_dict()
    stage_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(result, {d.doc_id: d for d in docs}, stage_dir / "docalign.jsonl")
    if not result.pairs:
        _finish(manifest, manifest_path, "no-pairs")
        raise NoPairsError(
            f"no document pairs accepted ({len(sources)} {src_lang} and {len(targets)} {tgt_lang} documents)",
            manifest,
        )
    if stop_after == "docalign":
        _finish(manifest, manifest_path, "stopped-after-docalign")
        return None, manifest

    # sentence alignment
    model = config.bead_model()
    auto_c = config.bead_c == "auto"
    jobs = [(p.pair_id, list(sentences[p.source_id]), list(sentences[p.target_id]), model, auto_c)
            for p in result.pairs]
    aligned = _map(_align_job, jobs, config.workers)
    raw_pairs, align_rows = [], {}
    for (pair_id, src, tgt, _, _), (_, c, links) in zip(jobs, aligned):
        raw_pairs.extend(links_to_pairs(src, tgt, links, pair_id))
        shapes = Counter(f"{a}-{b}" for a, b in (link.shape for link in links))
        align_rows[pair_id] = {"links": len(links), "shapes": dict(sorted(shapes.items())), "c": c,
                               "source_sentences": len(src), "target_sentences": len(tgt)}
        write_alignment(links, alignment_dump_path(out, pair_id))
    model_info = model.to_dict()
    if auto_c:
        model_info["c"] = "auto"
    manifest.stages["sentalign"] = {"model": model_info, "pairs": align_rows}
    if stop_after == "sentalign":
        _finish(manifest, manifest_path, "stopped-after-sentalign")
        return None, manifest

    # cleaning, stats, output
    rejects = []
    kept, report = clean_pairs(raw_pairs, profiles, config.languages, config.clean_ratio_bound, rejects)
    manifest.stages["clean"] = report.to_dict()
    if config.write_rejects:
        out.mkdir(parents=True, exist_ok=True)
        write_rejects(rejects, out / f"{config.name}.rejects.tsv")
    if stop_after == "clean":
        _finish(manifest, manifest_path, "stopped-after-clean")
        return None, manifest

    corpus = ParallelCorpus.from_pairs(kept)
    write_corpus(corpus, out, config.name, config.languages)
    manifest.stages["stats"] = corpus.stats.to_dict()
    _finish(manifest, manifest_path, "ok")
    return corpus, manifest


def _split_mode(doc: TextDocument, config: PipelineConfig) -> str:
    return config.splitter_modes.get(Path(doc.origin).suffix.lower(), "editable")


def alignment_dump_path(output_dir, pair_id: str) -> Path:
    """Where the sentence alignment of one document pair is written."""
    safe = pair_id.replace("/", "__").replace("|", "--")
    return Path(output_dir) / "stages" / "sentalign" / f"{safe}.align"


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _finish(manifest: RunManifest, path: Path, status: str) -> None:
    manifest.status = status
    manifest.write(path)
