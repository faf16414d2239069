"""Command line pipeline: ingest | slice | gen-pairs | pretest | search | report.

Every stage reads one JSON config file (flags override a few common knobs),
recomputes group membership deterministically from the configured seed, and
stamps each artifact with the effective config so a run can be reproduced
from its outputs alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .classify import LexicalBaseline, RemoteClassifier
from .corpus import assign_groups, filter_by_class, ingest, iter_jsonl, \
    read_corpus, write_corpus
from .errors import ConfigError, PipelineError
from .evaluation import (own_description_top1, pretest, report_markdown,
                         write_report_csv, x_report_from_audits)
from .pairs import AssemblyConfig, assemble_all, build_negative_pairs, \
    build_positive_pairs, split_validation, write_pairs
from .scoring import MODES, write_ranking_csv, write_ranking_json
from .search import SearchJob, read_audit, run_search, write_audit
from .slicer import SliceConfig, slice_corpus, total_pieces, write_piece_table

REMOTE_URL_ENV = "NOVELTYSEARCH_REMOTE_URL"

DEFAULT_CONFIG = {
    "corpus": None,
    "class_prefix": None,
    "groups": {"training": 0, "pretest": 0, "search": 0, "seed": 0,
               "must_include_search": []},
    "slice": {"min_len": 100, "max_len": 200, "seed": 0},
    "assembly": {"max_words": 500, "markers": False},
    "pairs": {"seed": 0, "validation_fraction": None},
    "backend": "baseline",
    "remote": {"batch_size": 32, "timeout": 30.0},
    "mode": "label",
    "output_dir": "out",
    "search": {"claim_source_id": None, "claim_text": None,
               "exclude_self": False},
    "report": {"cited_x": None},
}


def load_config(path: str | None, args: argparse.Namespace) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                user = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        for key, value in user.items():
            if key not in config:
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(config[key], dict) and isinstance(value, dict):
                unknown = set(value) - set(config[key])
                if unknown:
                    raise ConfigError(
                        f"unknown config key {key}.{sorted(unknown)[0]}"
                    )
                config[key].update(value)
            else:
                config[key] = value

    if getattr(args, "seed", None) is not None:
        config["groups"]["seed"] = args.seed
        config["slice"]["seed"] = args.seed
        config["pairs"]["seed"] = args.seed
    if getattr(args, "backend", None) is not None:
        config["backend"] = args.backend
    if getattr(args, "mode", None) is not None:
        config["mode"] = args.mode
    if getattr(args, "exclude_self", False):
        config["search"]["exclude_self"] = True
    if getattr(args, "output_dir", None) is not None:
        config["output_dir"] = args.output_dir

    if config["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {config['mode']!r}")
    return config


def make_backend(config: dict):
    spec = config["backend"]
    if spec == "baseline":
        return LexicalBaseline()
    if spec == "remote" or spec.startswith("remote:"):
        url = os.environ.get(REMOTE_URL_ENV)
        if url is None and spec.startswith("remote:"):
            url = spec.split(":", 1)[1]
        if not url:
            raise ConfigError(
                "remote backend needs a URL: use remote:<url> or set "
                f"{REMOTE_URL_ENV}"
            )
        remote = config["remote"]
        return RemoteClassifier(url, batch_size=remote["batch_size"],
                                timeout=remote["timeout"])
    raise ConfigError(f"unknown backend {spec!r}; use baseline or remote:<url>")


def _slice_config(config: dict) -> SliceConfig:
    s = config["slice"]
    return SliceConfig(min_len=s["min_len"], max_len=s["max_len"], seed=s["seed"])


def _assembly_config(config: dict) -> AssemblyConfig:
    a = config["assembly"]
    return AssemblyConfig(max_words=a["max_words"], markers=a["markers"])


def _meta(config: dict, stage: str) -> dict:
    return {"tool": "noveltysearch", "version": __version__, "stage": stage,
            "config": config}


def _load_filtered_corpus(config: dict):
    if not config["corpus"]:
        raise ConfigError("config is missing 'corpus' (path to corpus JSONL)")
    corpus = read_corpus(config["corpus"])
    if config["class_prefix"]:
        corpus = filter_by_class(corpus, config["class_prefix"])
    return corpus


def _groups(config: dict, corpus):
    g = config["groups"]
    sizes = {k: g[k] for k in ("training", "pretest", "search")}
    if sum(sizes.values()) == 0:
        raise ConfigError("config 'groups' sizes are all zero")
    return assign_groups(corpus, sizes, seed=g["seed"],
                         must_include_search=g["must_include_search"])


def _out_dir(config: dict) -> Path:
    out = Path(config["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- stages ---------------------------------------------------------------

def cmd_ingest(args, config) -> int:
    if not args.input:
        raise ConfigError("ingest needs --input <raw JSONL>")
    corpus = ingest(iter_jsonl(args.input))
    n_before = len(corpus)
    if config["class_prefix"]:
        corpus = filter_by_class(corpus, config["class_prefix"])
    out_path = args.output or config["corpus"]
    if not out_path:
        raise ConfigError("ingest needs --output or config 'corpus'")
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, out_path, meta=_meta(config, "ingest"))
    print(f"ingested {n_before} patents, kept {len(corpus)} "
          f"(class_prefix={config['class_prefix']!r}) -> {out_path}")
    return 0


def cmd_slice(args, config) -> int:
    corpus = _load_filtered_corpus(config)
    table = slice_corpus(corpus, _slice_config(config))
    out = _out_dir(config) / "pieces.jsonl"
    write_piece_table(table, out, meta=_meta(config, "slice"))
    print(f"sliced {len(table)} patents into {total_pieces(table)} pieces -> {out}")
    return 0


def cmd_gen_pairs(args, config) -> int:
    corpus = _load_filtered_corpus(config)
    groups = _groups(config, corpus)
    training_corpus = corpus.subset(groups["training"].patent_ids)
    pieces = slice_corpus(training_corpus, _slice_config(config))
    positives = build_positive_pairs(pieces, training_corpus)
    negatives = build_negative_pairs(positives, seed=config["pairs"]["seed"])
    assembled = assemble_all(positives + negatives, _assembly_config(config))
    pairs = [a.pair for a in assembled]

    out = _out_dir(config)
    fraction = config["pairs"]["validation_fraction"]
    if fraction:
        train, val = split_validation(pairs, fraction,
                                      seed=config["pairs"]["seed"])
        write_pairs(val, out / "pairs_val.jsonl",
                    meta=_meta(config, "gen-pairs"))
    else:
        train, val = pairs, []
    write_pairs(train, out / "pairs_train.jsonl",
                meta=_meta(config, "gen-pairs"))
    n_truncated = sum(1 for a in assembled if a.truncated)
    print(f"pairs: {len(positives)} label-1 + {len(negatives)} label-0 = "
          f"{len(pairs)} total ({len(train)} train / {len(val)} validation, "
          f"{n_truncated} truncated) -> {out}")
    return 0


def cmd_pretest(args, config) -> int:
    corpus = _load_filtered_corpus(config)
    groups = _groups(config, corpus)
    backend = make_backend(config)
    result = pretest(
        corpus, groups["pretest"], _slice_config(config),
        seed=config["pairs"]["seed"], backend=backend,
        assembly_config=_assembly_config(config),
        training_ids=groups["training"].patent_ids,
    )
    doc = {
        "_meta": _meta(config, "pretest"),
        "n_pairs": result.n_pairs,
        "confusion": {"tp": result.counts.tp, "fp": result.counts.fp,
                      "tn": result.counts.tn, "fn": result.counts.fn},
        "precision": result.counts.precision,
        "recall": result.counts.recall,
        "f1": result.f1,
        "degenerate": result.degenerate,
    }
    if args.patent_level:
        own = own_description_top1(
            corpus, groups["pretest"], _slice_config(config), backend,
            assembly_config=_assembly_config(config), mode=config["mode"],
        )
        doc["patent_level"] = {
            "n_top1": own.n_top1, "n_patents": own.n_patents,
            "fraction": own.fraction, "misses": list(own.misses),
        }
    out = _out_dir(config) / "pretest.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2, ensure_ascii=False)
        fh.write("\n")
    line = f"pretest: {result.n_pairs} pairs, F1={result.f1:.4f}"
    if args.patent_level:
        line += (f", own-description-top1 "
                 f"{doc['patent_level']['n_top1']}/{doc['patent_level']['n_patents']}")
    print(line + f" -> {out}")
    return 0


def _resolve_claim(config: dict, corpus) -> tuple[str, str | None, str]:
    claim_text = config["search"]["claim_text"]
    source_id = config["search"]["claim_source_id"]
    if claim_text and source_id:
        raise ConfigError("give either search.claim_text or "
                          "search.claim_source_id, not both")
    if source_id:
        return corpus[source_id].first_claim, source_id, source_id
    if claim_text:
        return claim_text, None, "custom"
    raise ConfigError("search needs search.claim_text or search.claim_source_id")


def cmd_search(args, config) -> int:
    if args.claim_source_id:
        config["search"]["claim_source_id"] = args.claim_source_id
        config["search"]["claim_text"] = None
    if args.claim_text:
        config["search"]["claim_text"] = args.claim_text
        config["search"]["claim_source_id"] = None
    corpus = _load_filtered_corpus(config)
    groups = _groups(config, corpus)
    claim, source_id, label = _resolve_claim(config, corpus)
    job = SearchJob(
        corpus=corpus,
        target_group=groups["search"],
        claim_of_interest=claim,
        slice_config=_slice_config(config),
        backend=make_backend(config),
        assembly_config=_assembly_config(config),
        mode=config["mode"],
        claim_source_id=source_id,
        exclude_source=config["search"]["exclude_self"],
    )
    out = _out_dir(config) / f"search_{label}"
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(config, "search")
    try:
        outcome = run_search(job)
    except PipelineError as exc:
        partial = getattr(exc, "partial_audit", [])
        if partial:
            write_audit(partial, out / "audit.jsonl", meta=meta, complete=False)
        raise
    write_audit(outcome.audit, out / "audit.jsonl", meta=meta, complete=True)
    write_ranking_csv(outcome.ranking, out / "ranking.csv", meta=meta)
    write_ranking_json(outcome.ranking, out / "ranking.json", meta=meta)
    top = outcome.ranking.scores[0]
    print(f"search '{label}': ranked {len(outcome.ranking)} patents over "
          f"{len(outcome.audit)} pieces; top={top.patent_id} "
          f"({config['mode']}={top.score_for(config['mode']):.4f}) -> {out}")
    return 0


def cmd_report(args, config) -> int:
    cited_path = args.cited_x or config["report"]["cited_x"]
    if not cited_path:
        raise ConfigError("report needs --cited-x or config report.cited_x "
                          "(JSON: reference id -> list of cited X ids)")
    with open(cited_path, "r", encoding="utf-8") as fh:
        cited_x = json.load(fh)
    out = _out_dir(config)
    audits = {}
    for reference_id in cited_x:
        audit_path = out / f"search_{reference_id}" / "audit.jsonl"
        if not audit_path.exists():
            raise ConfigError(
                f"no audit for reference {reference_id!r} at {audit_path}; "
                "run the search subcommand for it first"
            )
        audits[reference_id] = read_audit(audit_path)
    report = x_report_from_audits(audits, cited_x, mode=config["mode"])
    meta = _meta(config, "report")
    write_report_csv(report, out / "report.csv", meta=meta)
    markdown = report_markdown(report)
    header = "<!-- " + json.dumps({"_meta": meta}, sort_keys=True) + " -->\n\n"
    (out / "report.md").write_text(header + markdown, encoding="utf-8")
    print(markdown, end="")
    print(f"report: {len(report.rows)} cited-X rows -> {out / 'report.csv'}")
    return 0


# -- entry point ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noveltysearch",
        description="Patent novelty search pipeline over JSONL corpora",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int,
                       help="override every configured seed")
        p.add_argument("--backend",
                       help="baseline or remote:<url> "
                            f"(env {REMOTE_URL_ENV} overrides the url)")
        p.add_argument("--mode", choices=list(MODES),
                       help="ranking score: label or sigmoid")
        p.add_argument("--output-dir")

    p = sub.add_parser("ingest", help="validate raw records into a corpus file")
    add_common(p)
    p.add_argument("--input", help="raw JSONL of patent records")
    p.add_argument("--output", help="corpus output path (default: config corpus)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("slice", help="cut descriptions into word pieces")
    add_common(p)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("gen-pairs", help="build balanced labeled training pairs")
    add_common(p)
    p.set_defaults(func=cmd_gen_pairs)

    p = sub.add_parser("pretest", help="pair-level F1 over the pretest group")
    add_common(p)
    p.add_argument("--patent-level", action="store_true",
                   help="also check each patent's own description ranks first")
    p.set_defaults(func=cmd_pretest)

    p = sub.add_parser("search", help="rank the search group for one claim")
    add_common(p)
    p.add_argument("--claim-source-id",
                   help="take the claim of this corpus patent")
    p.add_argument("--claim-text", help="free-text claim of interest")
    p.add_argument("--exclude-self", action="store_true",
                   help="drop the claim's source patent from the group")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="cited-X positions from completed searches")
    add_common(p)
    p.add_argument("--cited-x", help="JSON file: reference id -> cited X ids")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args)
        return args.func(args, config)
    except PipelineError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        for extra in ("pair_ids", "unscored_pair_ids"):
            ids = getattr(exc, extra, None)
            if ids:
                record[extra] = ids[:20]
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
