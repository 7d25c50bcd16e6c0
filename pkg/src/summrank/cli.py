"""Command line driver: configuration, corpus I/O, and the pipeline stages.

Subcommands mirror the pipeline: features, pseudo-targets, estimate,
rerank, evaluate, export-labels, and pipeline (all stages in order); synth
generates a planted synthetic corpus for experiments.  Running the pipeline
is byte-identical to running the stages one by one because the pipeline
simply invokes the same stage functions against the same files.

Every output starts with a provenance header (config digest, input digest,
tool version).  Exit codes: 0 ok, 2 validation error, 3 scorer transport
error, 4 internal invariant violation.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .corpus import load_corpus, save_corpus
from .errors import InternalError, SummrankError, ValidationError
from .estimate import EstimationConfig, ObjectiveTable, hierarchical_estimate, write_trial_log
from .evaluate import (
    ReferenceScores,
    abstractiveness,
    baseline_select,
    evaluate_strategies,
    recall_curve,
    score_rankings,
    write_abstractiveness_csv,
    write_overlap_csv,
    write_recall_csv,
    write_report_csv,
    write_report_table,
    overlap_diagnostics,
)
from .features import FeatureSpec, compute_features, read_features, write_features
from .provenance import comment_header, config_digest, header_dict, input_digest, jsonl_header
from .pseudo import PSEUDO_METHODS, PseudoTarget, build_pseudo_target
from .rerank import CoefficientSet, Selection, rerank_corpus
from .scoring import BUILTIN_LEXICAL, IdfTable, ScoreCache, ScorerId, ScorerRegistry
from .selftrain import build_labels, write_labels
from .synthetic import generate, save_plant_sidecar
from .text import TokenizerConfig, split_sentences

logger = logging.getLogger("summrank")

DEFAULT_STRATEGIES = ("first", "random", "longest", "minimum", "oracle", "summscore")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings; serialized into output provenance."""

    tokenizer: TokenizerConfig = TokenizerConfig()
    scorers: tuple[str, ...] = (BUILTIN_LEXICAL,)
    scorer_versions: dict = field(default_factory=dict)
    endpoints: dict = field(default_factory=dict)
    normalization: str = "per_instance_minmax"
    mu_len: float | None = None
    pseudo: str = "lead3"
    salient_ratio: float = 0.30
    seed: int = 0
    estimation: EstimationConfig = EstimationConfig()
    strategies: tuple[str, ...] = DEFAULT_STRATEGIES
    baseline: str = "first"
    export_x: float = 1.0
    threads: int = 4
    cache_dir: str | None = None
    use_cache: bool = True

    def to_dict(self) -> dict:
        return {
            "tokenizer": self.tokenizer.to_dict(),
            "scorers": list(self.scorers),
            "scorer_versions": dict(self.scorer_versions),
            "endpoints": dict(self.endpoints),
            "normalization": self.normalization,
            "mu_len": self.mu_len,
            "pseudo": self.pseudo,
            "salient_ratio": self.salient_ratio,
            "seed": self.seed,
            "estimation": self.estimation.to_dict(),
            "strategies": list(self.strategies),
            "baseline": self.baseline,
            "export_x": self.export_x,
            "threads": self.threads,
            "cache_dir": self.cache_dir,
            "use_cache": self.use_cache,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {
            "tokenizer", "scorers", "scorer_versions", "endpoints", "normalization",
            "mu_len", "pseudo", "salient_ratio", "seed", "estimation", "strategies",
            "baseline", "export_x", "threads", "cache_dir", "use_cache",
        }
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        est = data.get("estimation", {})
        return cls(
            tokenizer=TokenizerConfig.from_dict(data.get("tokenizer", {})),
            scorers=tuple(data.get("scorers", (BUILTIN_LEXICAL,))),
            scorer_versions=dict(data.get("scorer_versions", {})),
            endpoints=dict(data.get("endpoints", {})),
            normalization=data.get("normalization", "per_instance_minmax"),
            mu_len=data.get("mu_len"),
            pseudo=data.get("pseudo", "lead3"),
            salient_ratio=float(data.get("salient_ratio", 0.30)),
            seed=int(data.get("seed", 0)),
            estimation=EstimationConfig(
                trials_per_search=int(est.get("trials_per_search", 1000)),
                tuning_subset_size=int(est.get("tuning_subset_size", 1000)),
                seed=int(est.get("seed", data.get("seed", 0))),
                restart_probability=float(est.get("restart_probability", 0.2)),
            ),
            strategies=tuple(data.get("strategies", DEFAULT_STRATEGIES)),
            baseline=data.get("baseline", "first"),
            export_x=float(data.get("export_x", 1.0)),
            threads=int(data.get("threads", 4)),
            cache_dir=data.get("cache_dir"),
            use_cache=bool(data.get("use_cache", True)),
        )

    def feature_spec(self) -> FeatureSpec:
        scorers = tuple(
            ScorerId(name, self.scorer_versions.get(name, "1")) for name in self.scorers
        )
        return FeatureSpec(semantic_scorers=scorers)

    def registry(self, documents) -> ScorerRegistry:
        idf = IdfTable.from_documents([d.source for d in documents], self.tokenizer)
        cache = None
        if self.use_cache:
            cache = ScoreCache(Path(self.cache_dir)) if self.cache_dir else ScoreCache()
        return ScorerRegistry(
            idf=idf,
            endpoints=self.endpoints,
            cache=cache,
            config=self.tokenizer,
            max_in_flight=self.threads,
        )

    def digest(self) -> str:
        return config_digest(self.to_dict())


def load_config(path: str | None, overrides: argparse.Namespace) -> RunConfig:
    data = {}
    if path:
        config_path = Path(path)
        if not config_path.exists():
            raise ValidationError(f"config file not found: {config_path}")
        with open(config_path, encoding="utf-8") as fh:
            data = json.load(fh)
    config = RunConfig.from_dict(data)

    updates = {}
    if getattr(overrides, "pseudo", None):
        updates["pseudo"] = overrides.pseudo
    if getattr(overrides, "seed", None) is not None:
        updates["seed"] = overrides.seed
        updates["estimation"] = replace(config.estimation, seed=overrides.seed)
    if getattr(overrides, "strategies", None):
        updates["strategies"] = tuple(overrides.strategies.split(","))
    if getattr(overrides, "normalization", None):
        updates["normalization"] = overrides.normalization
    if getattr(overrides, "trials", None) is not None:
        updates["estimation"] = replace(
            updates.get("estimation", config.estimation),
            trials_per_search=overrides.trials,
        )
    if getattr(overrides, "export_x", None) is not None:
        updates["export_x"] = overrides.export_x
    if getattr(overrides, "threads", None) is not None:
        updates["threads"] = overrides.threads
    if getattr(overrides, "cache_dir", None):
        updates["cache_dir"] = overrides.cache_dir
    if getattr(overrides, "no_cache", False):
        updates["use_cache"] = False
    return replace(config, **updates) if updates else config


def _outdir(args) -> Path:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# stages


def stage_features(config: RunConfig, inputs: list[str], outdir: Path) -> Path:
    documents = load_corpus(inputs)
    matrix = compute_features(
        documents,
        config.feature_spec(),
        config.registry(documents),
        mu_len=config.mu_len,
        normalization=config.normalization,
        config=config.tokenizer,
    )
    header = jsonl_header(config.digest(), input_digest(inputs))
    path = outdir / "features.jsonl"
    write_features(matrix, path, header=header)
    logger.info("wrote %s (%d documents)", path, len(matrix))
    return path


def stage_pseudo_targets(config: RunConfig, inputs: list[str], outdir: Path) -> Path:
    documents = load_corpus(inputs)
    header = jsonl_header(config.digest(), input_digest(inputs))
    path = outdir / "pseudo_targets.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for doc in documents:
            sentences = split_sentences(doc.source, config.tokenizer.abbreviations)
            target = build_pseudo_target(
                config.pseudo, sentences, doc_id=doc.id, seed=config.seed,
                ratio=config.salient_ratio, config=config.tokenizer,
            )
            fh.write(
                json.dumps(
                    {
                        "id": doc.id,
                        "method": target.method,
                        "text": target.text,
                        "sentence_indices": list(target.sentence_indices),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    logger.info("wrote %s", path)
    return path


def read_pseudo_targets(path: str | Path) -> dict[str, PseudoTarget]:
    if not Path(path).exists():
        raise ValidationError(f"pseudo-target file not found: {path}")
    targets = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "_provenance" in record:
                continue
            targets[record["id"]] = PseudoTarget(
                method=record["method"],
                text=record["text"],
                sentence_indices=tuple(record["sentence_indices"]),
            )
    return targets


def stage_estimate(
    config: RunConfig, inputs: list[str], features_path: Path,
    pseudo_path: Path, outdir: Path,
) -> Path:
    documents = load_corpus(inputs)
    matrix = read_features(features_path, config.feature_spec())
    targets = read_pseudo_targets(pseudo_path)
    missing = [d.id for d in documents if d.id not in targets]
    if missing:
        raise ValidationError(f"pseudo-target file missing documents: {missing[:3]}")
    table = ObjectiveTable.build(documents, targets, config.tokenizer)
    coefficients, log = hierarchical_estimate(
        matrix, table, config.estimation, pseudo_method=config.pseudo
    )
    in_digest = input_digest([*inputs, features_path, pseudo_path])
    coeff_path = outdir / "coefficients.json"
    coefficients.save(coeff_path, header=header_dict(config.digest(), in_digest))
    write_trial_log(log, outdir / "estimation_log.csv",
                    header=comment_header(config.digest(), in_digest))
    logger.info("wrote %s (objective %.4f)", coeff_path,
                coefficients.provenance["objective"])
    return coeff_path


def stage_rerank(config: RunConfig, features_path: Path, coeff_path: Path,
                 outdir: Path) -> Path:
    matrix = read_features(features_path, config.feature_spec())
    coefficients = CoefficientSet.load(coeff_path)
    selection = rerank_corpus(matrix, coefficients)
    path = outdir / "selections.jsonl"
    header = jsonl_header(config.digest(), input_digest([features_path, coeff_path]))
    selection.save(path, matrix.doc_ids, header=header)
    logger.info("wrote %s", path)
    return path


def read_selection(path: str | Path) -> Selection:
    if not Path(path).exists():
        raise ValidationError(f"selection file not found: {path}")
    chosen: dict[str, int] = {}
    scores: dict[str, list[float]] = {}
    strategy = "summscore"
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "_provenance" in record:
                continue
            chosen[record["id"]] = int(record["chosen"])
            scores[record["id"]] = [float(v) for v in record.get("scores", [])]
            strategy = record.get("strategy", strategy)
    return Selection(strategy=strategy, chosen=chosen, scores=scores)


def stage_evaluate(
    config: RunConfig, inputs: list[str], features_path: Path,
    selections_path: Path, outdir: Path,
) -> None:
    documents = load_corpus(inputs)
    matrix = read_features(features_path, config.feature_spec())
    summ = read_selection(selections_path)

    results = evaluate_strategies(
        documents,
        list(config.strategies),
        summscore_selection=summ,
        feature_matrix=matrix,
        seed=config.seed,
        baseline=config.baseline,
        config=config.tokenizer,
    )
    in_digest = input_digest([*inputs, features_path, selections_path])
    header = comment_header(config.digest(), in_digest)
    write_report_csv(results, outdir / "report.csv", header=header)
    write_report_table(results, outdir / "report.txt", header=header)

    scores = ReferenceScores(documents, config.tokenizer)
    oracle_sets = {d.id: scores.oracle_set(d) for d in documents}
    curve = recall_curve(score_rankings(summ), oracle_sets)
    write_recall_csv(curve, outdir / "recall.csv", header=header)

    trivial = [
        baseline_select(f"max-feature:{fid}", documents, feature_matrix=matrix,
                        config=config.tokenizer)
        for fid in matrix.spec.ids
    ]
    for strategy in ("first", "oracle", "minimum", "longest"):
        trivial.append(
            baseline_select(strategy, documents, scores=scores, seed=config.seed,
                            config=config.tokenizer)
        )
    write_overlap_csv(overlap_diagnostics(summ, trivial), outdir / "overlap.csv",
                      header=header)

    fractions = abstractiveness(summ, documents, config.tokenizer)
    write_abstractiveness_csv(fractions, outdir / "abstractiveness.csv", header=header)
    logger.info("wrote evaluation reports to %s", outdir)


def stage_export_labels(
    config: RunConfig, inputs: list[str], selections_path: Path, outdir: Path
) -> Path:
    documents = load_corpus(inputs)
    selection = read_selection(selections_path)
    records, stats = build_labels(documents, selection, config.export_x, config.tokenizer)
    path = outdir / "labels.jsonl"
    header = jsonl_header(config.digest(), input_digest([*inputs, selections_path]))
    write_labels(records, path, header=header)
    logger.info(
        "wrote %s (%d records, %d flagged, mean extractiveness %.4f)",
        path, stats.count, stats.flagged, stats.mean_extractiveness,
    )
    return path


def run_pipeline(config: RunConfig, inputs: list[str], outdir: Path,
                 export: bool = False) -> None:
    features_path = stage_features(config, inputs, outdir)
    pseudo_path = stage_pseudo_targets(config, inputs, outdir)
    coeff_path = stage_estimate(config, inputs, features_path, pseudo_path, outdir)
    selections_path = stage_rerank(config, features_path, coeff_path, outdir)
    references_present = all(d.reference is not None for d in load_corpus(inputs))
    if references_present:
        stage_evaluate(config, inputs, features_path, selections_path, outdir)
    else:
        logger.info("corpus has no references; skipping evaluation reports")
    if export:
        stage_export_labels(config, inputs, selections_path, outdir)


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, needs_input: bool = True) -> None:
    if needs_input:
        parser.add_argument("--input", action="append", required=True,
                            help="corpus JSONL; repeat to pool candidate files")
    parser.add_argument("--outdir", default=".", help="output directory")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--pseudo", choices=PSEUDO_METHODS, help="pseudo-target method")
    parser.add_argument("--seed", type=int, help="run seed")
    parser.add_argument("--strategies", help="comma-separated evaluation strategies")
    parser.add_argument("--normalization", choices=("none", "per_instance_minmax"))
    parser.add_argument("--trials", type=int, help="search trials per stage")
    parser.add_argument("--export-x", type=float, dest="export_x",
                        help="fraction of most-extractive labels to flag")
    parser.add_argument("--threads", type=int, help="max in-flight scorer requests")
    parser.add_argument("--cache-dir", dest="cache_dir", help="score cache location")
    parser.add_argument("--no-cache", dest="no_cache", action="store_true",
                        help="disable the score cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="summrank",
        description="Re-rank summary candidates without reference supervision.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("features", "compute per-candidate feature matrices"),
        ("pseudo-targets", "extract pseudo-summaries from sources"),
        ("pipeline", "run every stage in order"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "pipeline":
            p.add_argument("--export-labels", action="store_true", dest="export",
                           help="also export self-training labels")

    p = sub.add_parser("estimate", help="estimate coefficients against pseudo-targets")
    _add_common(p)
    p.add_argument("--features", help="features.jsonl from the features stage")
    p.add_argument("--pseudo-targets", dest="pseudo_targets",
                   help="pseudo_targets.jsonl from the pseudo-targets stage")

    p = sub.add_parser("rerank", help="select candidates with estimated coefficients")
    _add_common(p, needs_input=False)
    p.add_argument("--features", required=True)
    p.add_argument("--coefficients", required=True)

    p = sub.add_parser("evaluate", help="reference-side reports and diagnostics")
    _add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--selections", required=True)

    p = sub.add_parser("export-labels", help="write self-training pseudo-labels")
    _add_common(p)
    p.add_argument("--selections", required=True)

    p = sub.add_parser("synth", help="generate a planted synthetic corpus")
    p.add_argument("--outdir", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--docs", type=int, default=20)
    p.add_argument("--candidates", type=int, default=5)
    p.add_argument("--vocab", type=int, default=40)
    p.add_argument("--plant", choices=("bleu-oracle", "lead-bias", "uniform"),
                   default="bleu-oracle")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    if args.command == "synth":
        outdir = _outdir(args)
        corpus = generate(seed=args.seed, n_docs=args.docs, k=args.candidates,
                          vocab_size=args.vocab, plant=args.plant)
        save_corpus(corpus.documents, outdir / "corpus.jsonl")
        save_plant_sidecar(corpus, outdir / "plant.jsonl")
        logger.info("wrote %s and plant sidecar", outdir / "corpus.jsonl")
        return 0

    config = load_config(args.config, args)
    outdir = _outdir(args)

    if args.command == "features":
        stage_features(config, args.input, outdir)
    elif args.command == "pseudo-targets":
        stage_pseudo_targets(config, args.input, outdir)
    elif args.command == "estimate":
        features_path = Path(args.features or outdir / "features.jsonl")
        pseudo_path = Path(args.pseudo_targets or outdir / "pseudo_targets.jsonl")
        stage_estimate(config, args.input, features_path, pseudo_path, outdir)
    elif args.command == "rerank":
        stage_rerank(config, Path(args.features), Path(args.coefficients), outdir)
    elif args.command == "evaluate":
        stage_evaluate(config, args.input, Path(args.features),
                       Path(args.selections), outdir)
    elif args.command == "export-labels":
        stage_export_labels(config, args.input, Path(args.selections), outdir)
    elif args.command == "pipeline":
        run_pipeline(config, args.input, outdir, export=getattr(args, "export", False))
    else:
        raise InternalError(f"unhandled command {args.command}")
    return 0


def main() -> None:
    try:
        sys.exit(run())
    except SummrankError as err:
        logger.error("%s", err)
        sys.exit(err.exit_code)


if __name__ == "__main__":
    main()
