"""Command-line driver.

Exit codes: 0 on success, 1 on bad input, 2 when an internal invariant
is violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

from .alignment import InvariantError, Msa, iterative_msa
from .config import ConfigError, PipelineConfig
from .corpus import (Corpus, CorpusError, detokenize, parse_corpus, parse_expressions,
                     parse_raw_proofs, tokenize)
from .induction import MappingDictionary, RealizationError, induce_dictionary, realize
from .lattice import msa_to_lattice
from .thesaurus import InductionSettings, Thesaurus, fuse_corpus, induce_thesaurus

log = logging.getLogger("msadict")


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_config(path: Optional[str]) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        return PipelineConfig.from_json(_read(path).decode("utf-8"))
    except (ConfigError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_corpus(path: str, raw: bool) -> Corpus:
    try:
        return (parse_raw_proofs if raw else parse_corpus)(_read(path))
    except CorpusError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_thesaurus(path: Optional[str]) -> Optional[Thesaurus]:
    if path is None:
        return None
    try:
        return Thesaurus.loads(_read(path).decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def settings_for(cfg: PipelineConfig, threads: int) -> InductionSettings:
    return InductionSettings(cutoff=cfg.thesaurus_cutoff, min_witnesses=cfg.witness_k,
                             interior_cap=cfg.interior_cap, scores=cfg.scores, threads=threads)


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def build_report(corpus: Corpus, thesaurus: Thesaurus, d: MappingDictionary, results) -> dict:
    flagged = sum(1 for r in results for s in r.slotted if s.flagged)
    instances = sum(len(r.slotted) for r in results)
    return {
        "records": len(corpus.records),
        "verbalizations": sum(len(r.verbalizations) for r in corpus.records),
        "predicates": len(results),
        "predicates_covered": len(d.entries),
        "templates_emitted": len(d.entries),
        "term_entries": len(d.terms),
        "paraphrase_pairs": len(thesaurus),
        "thesaurus_iterations": thesaurus.iterations,
        "instances_slotted": instances,
        "instances_without_slots": flagged,
        "uncovered": sorted(d.uncovered),
        "term_ties": sorted(d.ties),
        "templates": {p: str(t) for p, t in sorted(d.entries.items())},
    }


def report_text(rep: dict) -> str:
    lines = [
        f"records processed: {rep['records']}",
        f"verbalizations: {rep['verbalizations']}",
        f"predicates: {rep['predicates']}",
        f"predicates covered: {rep['predicates_covered']}",
        f"templates emitted: {rep['templates_emitted']}",
        f"term entries: {rep['term_entries']}",
        f"paraphrase pairs found: {rep['paraphrase_pairs']}",
        f"thesaurus iterations: {rep['thesaurus_iterations']}",
        f"instances without slots: {rep['instances_without_slots']} of {rep['instances_slotted']}",
        f"uncovered predicates: {', '.join(rep['uncovered']) or '-'}",
    ]
    if rep["term_ties"]:
        lines.append(f"term entries chosen among tied paraphrases: {', '.join(rep['term_ties'])}")
    lines.append("templates:")
    lines += [f"  {p}: {t}" for p, t in rep["templates"].items()]
    return "\n".join(lines) + "\n"


def run_induce(args) -> int:
    cfg = load_config(args.config)
    corpus = load_corpus(args.corpus, args.raw_proofs)
    seed = load_thesaurus(args.thesaurus)
    out = Path(args.out)
    timings = {}
    if not corpus.records:
        print(f"warning: corpus {args.corpus} is empty; writing an empty dictionary", file=sys.stderr)

    t0 = time.perf_counter()
    thesaurus = induce_thesaurus(corpus, settings_for(cfg, args.threads), initial=seed)
    timings["thesaurus"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    results: list = []
    d = induce_dictionary(fuse_corpus(corpus, thesaurus), thesaurus, cfg, args.threads, results)
    timings["templates"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rep = build_report(corpus, thesaurus, d, results)
    _write(out, "dictionary.jsonl", d.dumps())
    _write(out, "thesaurus.tsv", thesaurus.dumps(verbose=True))
    _write(out, "report.txt", report_text(rep))
    _write(out, "report.json", json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    _write(out, "config.json", cfg.to_json())
    timings["output"] = time.perf_counter() - t0
    # timings vary between runs, so they stay out of the written artifacts
    for phase, secs in timings.items():
        print(f"timing {phase}: {secs:.3f}s", file=sys.stderr)
    return 0


def _sentence(tokens) -> str:
    text = detokenize(tokens)
    if not text:
        return text
    text = text[0].upper() + text[1:]
    return text if text[-1] in ".!?" else text + "."


def run_realize(args) -> int:
    try:
        d = MappingDictionary.loads(_read(args.dictionary).decode("utf-8"))
        exprs = parse_expressions(_read(args.expressions))
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError(str(exc)) from None
    missing = sorted({e.name for e in exprs if not e.is_term and e.name not in d.entries})
    if missing:
        raise InputError(f"no template for predicates: {', '.join(missing)}")
    try:
        sentences = [_sentence(realize(e, d)) for e in exprs]
    except RealizationError as exc:
        raise InputError(str(exc)) from None
    if sentences:
        print(" ".join(sentences))
    return 0


def run_thesaurus(args) -> int:
    cfg = load_config(args.config)
    corpus = load_corpus(args.corpus, args.raw_proofs)
    t = induce_thesaurus(corpus, settings_for(cfg, args.threads), initial=load_thesaurus(args.thesaurus))
    text = t.dumps(verbose=True)
    if args.out:
        _write(Path(args.out), "thesaurus.tsv", text)
    else:
        sys.stdout.write(text)
    log.info("%d pairs after %d iterations", len(t), t.iterations)
    return 0


def run_align(args) -> int:
    cfg = load_config(args.config)
    thesaurus = load_thesaurus(args.thesaurus)
    items = []
    for k, path in enumerate(args.files):
        try:
            text = _read(path).decode("utf-8")
        except UnicodeDecodeError:
            raise InputError(f"{path}: not UTF-8") from None
        toks = [c for c in text if not c.isspace()] if args.chars else tokenize(text)
        if not toks:
            raise InputError(f"{path}: empty sequence")
        items.append(Msa.from_sequence(toks, k))
    m = iterative_msa(items, thesaurus, cfg.scores, cfg.profile_scoring)
    print(m.table())
    print()
    sys.stdout.write(msa_to_lattice(m).to_dot("alignment"))
    return 0


def run_export_dot(args) -> int:
    cfg = load_config(args.config)
    corpus = load_corpus(args.corpus, args.raw_proofs)
    thesaurus = load_thesaurus(args.thesaurus) or Thesaurus()
    work = fuse_corpus(corpus, thesaurus)
    if args.predicate:
        keep = tuple(r for r in work.records if r.semantics.name == args.predicate)
        if not keep:
            raise InputError(f"predicate {args.predicate!r} does not occur in the corpus")
        work = Corpus(keep)
    results: list = []
    induce_dictionary(work, thesaurus, cfg, args.threads, results)
    docs = []
    for res in results:
        for k, sl in enumerate(res.slotted):
            docs.append((f"{res.predicate}.instance{k}.dot", sl.to_dot(f"{res.predicate} instance {k}")))
        docs.append((f"{res.predicate}.unified.dot", res.unified.to_dot(f"{res.predicate} unified")))
    if args.out:
        for name, text in docs:
            _write(Path(args.out), name, text)
    else:
        sys.stdout.write("".join(text for _, text in docs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline configuration")
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")
    common.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    corpus_opts = argparse.ArgumentParser(add_help=False)
    corpus_opts.add_argument("corpus", help="corpus file (JSON lines)")
    corpus_opts.add_argument("--raw-proofs", action="store_true",
                             help="corpus holds proofs with free-text narratives")
    corpus_opts.add_argument("--thesaurus", help="seed thesaurus (tab-separated pairs)")

    p = argparse.ArgumentParser(prog="msadict", description="Induce a mapping dictionary from a multi-parallel corpus.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("induce", parents=[common, corpus_opts], help="run the whole pipeline")
    s.add_argument("--out", default="out", help="output directory (default ./out)")
    s.set_defaults(func=run_induce)

    s = sub.add_parser("realize", parents=[common], help="verbalize semantic expressions")
    s.add_argument("dictionary")
    s.add_argument("expressions")
    s.set_defaults(func=run_realize)

    s = sub.add_parser("thesaurus", parents=[common, corpus_opts], help="induce the paraphrase thesaurus only")
    s.add_argument("--out", help="output directory (default: stdout)")
    s.set_defaults(func=run_thesaurus)

    s = sub.add_parser("align", parents=[common], help="align token sequences and print the lattice")
    s.add_argument("files", nargs="+")
    s.add_argument("--chars", action="store_true", help="treat every character as a token")
    s.add_argument("--thesaurus", help="thesaurus used for scoring")
    s.set_defaults(func=run_align)

    s = sub.add_parser("export-dot", parents=[common, corpus_opts], help="write slotted and unified lattices as DOT")
    s.add_argument("--predicate", help="only this predicate")
    s.add_argument("--out", help="output directory (default: stdout)")
    s.set_defaults(func=run_export_dot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
