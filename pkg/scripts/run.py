import argparse
import json
import sys
import numpy as np
import torch
from slimreg.core import PRECISIONS, SlimregError
from slimreg.evaluation import corruption_eval, evaluate, fgsm_eval
from slimreg.experiments import load_config, load_datasets, run_experiment, run_selftest, seed_everything
from slimreg.nn import build_model, load_checkpoint
from slimreg.trainer import gradient_decompose


def train(args):
    overrides = {}
    if args.seed is not None:
        overrides['seeds'] = [args.seed]
    if args.out is not None:
        overrides['out'] = args.out
    if args.quiet:
        overrides['quiet'] = True
    config = load_config(args.config, **overrides)
    summary = run_experiment(config)
    for label in summary.runs:
        stats = summary.statistics(label)
        print("{}: top1 {:.2f} +- {:.2f}, top5 {:.2f} +- {:.2f} over seeds {}".format(
            label, stats['top1']['mean'], stats['top1']['std'], stats['top5']['mean'], stats['top5']['std'],
            stats['seeds']))
    for failure in summary.failures:
        print("{} seed {} failed: {}".format(failure['label'], failure['seed'], failure['error']), file=sys.stderr)
    return 1 if summary.failed else 0


def evaluate_checkpoint(args):
    model, metadata = load_checkpoint(args.checkpoint)
    config = load_config(args.config)
    dtype = next(model.parameters()).dtype
    _, test = load_datasets(config, dtype)
    top1, top5 = evaluate(model, test)
    results = {'metadata': metadata, 'top1': top1, 'top5': top5}
    if 'fgsm' in args.suite:
        accuracies = fgsm_eval(model, test, config.epsilons)
        results['fgsm'] = {str(epsilon): accuracy for epsilon, accuracy in accuracies.items()}
    if 'corruption' in args.suite:
        report = corruption_eval(model, test, config.corruptions, config.severities,
                                 rng=np.random.default_rng(args.seed))
        results['corruption'] = {
            'clean_error': report.clean_error,
            'mean_error': report.mean_error,
            'errors': {'{}/{}'.format(kind, severity): error for (kind, severity), error in report.errors.items()},
        }
    print(json.dumps(results, indent=2, sort_keys=True))
    return 0


def decompose(args):
    config = load_config(args.config)
    cfg = config.train.replace(seed=args.seed)
    seed_everything(args.seed)
    dtype = PRECISIONS[cfg.precision]
    train_set, _ = load_datasets(config, dtype)
    model = build_model(
        config.model,
        dtype=dtype,
        num_classes=train_set.num_classes,
        in_channels=train_set.channels,
        **config.model_options
    )
    rng = np.random.default_rng(args.seed)
    x, y = next(iter(train_set.batches(cfg.batch_size, rng)))
    report = gradient_decompose(model, x, y, cfg, rng)

    def norm(grads):
        return torch.sqrt(sum((g ** 2).sum() for g in grads.values())).item()

    print(json.dumps({
        'additivity_error': report.additivity_error,
        'widths': report.widths,
        'norm_std': norm(report.g_std),
        'norm_prime': norm(report.g_prime),
        'norm_total': norm(report.g_total),
    }, indent=2))
    return 0


def selftest(args):
    results = run_selftest(args.seed)
    for result in results:
        print(result)
    return 0 if all(result.passed for result in results) else 1


def main(argv=None):
    parser = argparse.ArgumentParser(description="Train and evaluate slimmable sub-network regularization.")
    commands = parser.add_subparsers(dest="command", required=True)

    parser_train = commands.add_parser("train", help="Run an experiment described by a config file.")
    parser_train.add_argument("--config", required=True, help="TOML experiment file.")
    parser_train.add_argument("--seed", type=int, default=None, help="Run this seed only.")
    parser_train.add_argument("--out", default=None, help="Output directory (overrides the config).")
    parser_train.add_argument("--quiet", action="store_true", help="Do not print per-epoch progress.")
    parser_train.set_defaults(run=train)

    parser_eval = commands.add_parser("eval", help="Evaluate a saved checkpoint.")
    parser_eval.add_argument("--checkpoint", required=True, help="Checkpoint directory.")
    parser_eval.add_argument("--config", required=True, help="TOML experiment file describing the test data.")
    parser_eval.add_argument("--suite", nargs="+", default=["clean"], choices=["clean", "fgsm", "corruption"])
    parser_eval.add_argument("--seed", type=int, default=0, help="Seed of the corruption noise.")
    parser_eval.set_defaults(run=evaluate_checkpoint)

    parser_decompose = commands.add_parser("decompose", help="Split one step's gradient into its parts.")
    parser_decompose.add_argument("--config", required=True, help="TOML experiment file.")
    parser_decompose.add_argument("--seed", type=int, default=0)
    parser_decompose.set_defaults(run=decompose)

    parser_selftest = commands.add_parser("selftest", help="Run the mechanism checks.")
    parser_selftest.add_argument("--seed", type=int, default=0)
    parser_selftest.set_defaults(run=selftest)

    args = parser.parse_args(argv)
    try:
        code = args.run(args)
    except SlimregError as error:
        print("error: {}".format(error), file=sys.stderr)
        code = 2
    sys.exit(code)


if __name__ == "__main__":
    main()
