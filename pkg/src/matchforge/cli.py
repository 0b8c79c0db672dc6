"""Command-line entry point: ``matchforge <command> ...``.

Exit codes: 0 success, 1 domain error (invalid data, unknown ids, empty
test set), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .bm25 import DEFAULT_B, DEFAULT_K1, Bm25Params, rank_bm25
from .dataset import (
    CASES_FILE,
    MODEL_FILE,
    Dataset,
    default_data_dir,
    load_model,
    model_to_json,
    validate_dataset,
    write_json,
)
from .errors import MatchforgeError
from .evaluation import DEFAULT_ALPHA, compare_methods
from .experiment import PIPELINE_CONFIG, derive_seeds
from .learning import TrainConfig, train
from .model import WEIGHT_SCHEMES
from .scoring import explain, format_cost, rank_candidates
from .synthetic import count_summary, default_truth_model, generate_synthetic_dataset, load_domain_stats
from .taxonomy import load_taxonomy_file, toy_taxonomy


class UsageError(Exception):
    """Bad invocation or unreadable input file (exit status 2)."""


def _data_dir(args) -> Path:
    path = args.data_dir or default_data_dir()
    if not path:
        raise UsageError("no data directory given and MATCHFORGE_DATA_DIR is unset")
    path = Path(path)
    if not path.is_dir():
        raise UsageError(f"data directory not found: {path}")
    return path


def _load_data(args) -> Dataset:
    directory = _data_dir(args)
    for name in ("offers.json", "profiles.json", CASES_FILE):
        if not (directory / name).is_file():
            raise UsageError(f"missing file: {directory / name}")
    return Dataset.load(directory)


def _taxonomy(args):
    if args.taxonomy is None:
        return toy_taxonomy()
    if not Path(args.taxonomy).is_file():
        raise UsageError(f"taxonomy file not found: {args.taxonomy}")
    return load_taxonomy_file(args.taxonomy)


def _output_dir(args, default=".") -> Path:
    out = Path(args.output_dir or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _bm25_params(args):
    return Bm25Params(args.k1, args.b)


def _train_config(args, seed):
    return TrainConfig(
        max_iters=args.max_iters, restarts=args.restarts, initial_step=args.initial_step,
        step_shrink=args.step_shrink, target_rho=args.target_rho, rng_seed=seed,
    )


def cmd_validate(args) -> int:
    data = _load_data(args)
    graph = _taxonomy(args)
    report = validate_dataset(data.offers, data.profiles, data.cases, graph)
    print(report.render())
    return 0 if report.ok else 1


def _train_and_write(data, graph, args, seed, out_dir):
    report = validate_dataset(data.offers, data.profiles, data.cases, graph)
    if not report.ok:
        print(report.render(), file=sys.stderr)
        return None
    config = _train_config(args, seed)
    result = train(data.cases, data.offers, data.profiles, graph, config,
                   args.path_cutoff, args.weight_scheme, args.jobs)
    case_ids = [c.offer_id for c in data.cases]
    write_json(out_dir / MODEL_FILE, model_to_json(result.best_model, result.metadata(config, case_ids)))
    write_json(out_dir / "train_report.json", {
        "best_rho": result.best_rho,
        "converged": result.converged,
        "iterations": result.iterations,
        "best_restart": result.best_restart,
        "restart_rhos": result.restart_rhos,
        "objective_history": [[it, rho] for it, rho in result.objective_history],
        "per_case_rho": result.per_case_rho,
    })
    print(f"trained on {len(data.cases)} cases: mean rho {result.best_rho:.4f}, "
          f"converged={result.converged}, iterations={result.iterations}")
    print(f"wrote {out_dir / MODEL_FILE}")
    return result


def cmd_train(args) -> int:
    data = _load_data(args)
    graph = _taxonomy(args).precompute()
    out = _output_dir(args)
    return 0 if _train_and_write(data, graph, args, args.seed, out) is not None else 1


def _model(args):
    if not Path(args.model).is_file():
        raise UsageError(f"model file not found: {args.model}")
    return load_model(args.model)


def cmd_rank(args) -> int:
    data = _load_data(args)
    graph = _taxonomy(args)
    offers = data.offer_map()
    if args.offer_id not in offers:
        print(f"unknown offer id {args.offer_id!r}", file=sys.stderr)
        return 1
    offer = offers[args.offer_id]
    case = next((c for c in data.cases if c.offer_id == args.offer_id), None)
    pmap = data.profile_map()
    cands = [pmap[pid] for pid in case.expert_ranking] if case else list(data.profiles)
    if args.baseline:
        ranking = rank_bm25(offer, cands, _bm25_params(args), labels=graph)
        print(f"rank  profile  bm25_score  (offer {offer.id})")
    else:
        if args.model is None:
            raise UsageError("rank needs --model or --baseline")
        model, _ = _model(args)
        ranking = rank_candidates(offer, cands, model, graph)
        print(f"rank  profile  cost  (offer {offer.id})")
    for e in ranking:
        print(f"{e.rank:>4}  {e.profile_id}  {format_cost(e.value)}")
    if args.explain:
        if args.baseline:
            raise UsageError("--explain requires a cost model, not --baseline")
        if args.explain not in {p.id for p in cands}:
            print(f"profile {args.explain!r} is not among the ranked candidates", file=sys.stderr)
            return 1
        trace = explain(offer, pmap[args.explain], model, graph)
        print()
        print(trace.to_json() if args.json else trace.to_text({cid: graph.label(cid) for cid in graph.nodes}),
              end="")
    return 0


def _write_comparison(comparison, out_dir):
    (out_dir / "comparison.csv").write_text(comparison.to_csv(), encoding="utf-8")
    (out_dir / "comparison.txt").write_text(comparison.to_text(), encoding="utf-8")


def cmd_eval(args) -> int:
    data = _load_data(args)
    if not data.cases:
        print("no test cases to evaluate", file=sys.stderr)
        return 1
    graph = _taxonomy(args)
    report = validate_dataset(data.offers, data.profiles, data.cases, graph)
    if not report.ok:
        print(report.render(), file=sys.stderr)
        return 1
    model, meta = _model(args)
    comparison = compare_methods(data.offers, data.profiles, data.cases, model, graph,
                                 _bm25_params(args), args.alpha,
                                 training_case_ids=meta.get("training_cases", []), seed=args.seed)
    out = _output_dir(args)
    _write_comparison(comparison, out)
    print(comparison.to_text(), end="")
    return 0


def _print_summary(dataset):
    for domain, cats in count_summary(dataset).items():
        for cat, s in cats.items():
            rm, rv = s["requested"]
            om, ov = s["offered"]
            print(f"{domain:<10} {cat:<10} requested {rm:5.2f} ± {rv:5.2f}   offered {om:5.2f} ± {ov:5.2f}")


def _synthesize(args, graph, seed, id_prefix=""):
    if args.stats is not None and not Path(args.stats).is_file():
        raise UsageError(f"stats file not found: {args.stats}")
    stats = load_domain_stats(args.stats)
    truth = default_truth_model(args.path_cutoff)
    return generate_synthetic_dataset(stats, graph, truth, args.offers, args.candidates, seed,
                                      args.tail_swaps, id_prefix)


def cmd_synth(args) -> int:
    graph = _taxonomy(args)
    dataset = _synthesize(args, graph, args.seed)
    out = _output_dir(args)
    dataset.save(out)
    print(f"wrote {len(dataset.offers)} offers, {len(dataset.profiles)} profiles, "
          f"{len(dataset.cases)} cases to {out}")
    _print_summary(dataset)
    return 0


def cmd_pipeline(args) -> int:
    graph = _taxonomy(args).precompute()
    out = _output_dir(args, "pipeline-out")
    train_seed, test_seed, opt_seed = derive_seeds(args.seed)
    train_data = _synthesize(args, graph, train_seed, "train-")
    test_data = _synthesize(args, graph, test_seed, "test-")
    train_data.save(out / "train")
    test_data.save(out / "test")
    print(f"synthesized {len(train_data.cases)} training and {len(test_data.cases)} test cases")
    result = _train_and_write(train_data, graph, args, opt_seed, out)
    if result is None:
        return 1
    comparison = compare_methods(test_data.offers, test_data.profiles, test_data.cases,
                                 result.best_model, graph, _bm25_params(args), args.alpha,
                                 training_case_ids=[c.offer_id for c in train_data.cases], seed=args.seed)
    _write_comparison(comparison, out)
    print(comparison.to_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchforge", description="Rank applicant profiles against job offers with learned transformation costs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p):
        p.add_argument("data_dir", nargs="?", help="directory with offers/profiles/cases JSON "
                       "(default: $MATCHFORGE_DATA_DIR)")
        p.add_argument("--taxonomy", help="taxonomy file (default: bundled toy taxonomy)")

    def model_args(p):
        p.add_argument("--path-cutoff", type=int, default=4)
        p.add_argument("--weight-scheme", choices=WEIGHT_SCHEMES, default="multiplicative")

    def train_args(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-iters", type=int, default=PIPELINE_CONFIG.max_iters)
        p.add_argument("--restarts", type=int, default=PIPELINE_CONFIG.restarts)
        p.add_argument("--initial-step", type=float, default=PIPELINE_CONFIG.initial_step)
        p.add_argument("--step-shrink", type=float, default=PIPELINE_CONFIG.step_shrink)
        p.add_argument("--target-rho", type=float, default=1.0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--output-dir")
        model_args(p)

    def bm25_args(p):
        p.add_argument("--k1", type=float, default=DEFAULT_K1)
        p.add_argument("--b", type=float, default=DEFAULT_B)

    def synth_args(p):
        p.add_argument("--stats", help="domain statistics JSON (default: bundled recruitment sample)")
        p.add_argument("--offers", type=int, default=6, help="solved cases per domain")
        p.add_argument("--candidates", type=int, default=8)
        p.add_argument("--tail-swaps", type=int, default=0)

    p = sub.add_parser("validate", help="check a dataset for structural problems")
    data_args(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="fit a cost model to solved cases")
    data_args(p)
    train_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rank", help="rank the candidates of one offer")
    p.add_argument("offer_id")
    data_args(p)
    p.add_argument("--model", help="model.json from `train`")
    p.add_argument("--baseline", action="store_true", help="rank with BM25 instead of a model")
    p.add_argument("--explain", metavar="PROFILE_ID", help="append the edit trace for one profile")
    p.add_argument("--json", action="store_true", help="emit the --explain trace as JSON")
    bm25_args(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("eval", help="compare a model with BM25 on solved test cases")
    data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo p-values (n > 8)")
    p.add_argument("--output-dir")
    bm25_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--taxonomy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir")
    p.add_argument("--path-cutoff", type=int, default=4)
    synth_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="synth -> train -> eval in one run")
    p.add_argument("--taxonomy")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    train_args(p)
    synth_args(p)
    bm25_args(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"matchforge: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"matchforge: {exc}", file=sys.stderr)
        return 2
    except MatchforgeError as exc:
        print(f"matchforge: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
