"""`depts benchmark`: compare variants on the synthetic benchmark."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from dataclasses import replace

import numpy as np

import config
from commands.common import add_out_argument, evaluation_ranges, forecast_frame, parse_int_list
from utils.constants import COMPOSITIONS, EXIT_OK, VARIANTS
from utils.evaluation import forecast_map, nd, nrmse
from utils.fileio import atomic_write_json
from utils.logging import app_logger as logger
from utils.periodicity import init_periods_many
from utils.synthetic import SynthSpec, gen_dataset
from utils.training import TrainingConfig, train_ensemble
from utils.validation import UsageError, validate_choice


def register(subparsers) -> None:
    parser = subparsers.add_parser('benchmark', help='Synthetic benchmark of DEPTS against ablations')
    parser.add_argument('--kinds', default=','.join(COMPOSITIONS), help='Comma-separated compositions (default: all)')
    parser.add_argument('--data-seeds', default='0,1,2', help='Synthetic data seeds (default: 0,1,2)')
    parser.add_argument('--variants', default='DEPTS,NoPeriod', help='Comma-separated variants (default: DEPTS,NoPeriod)')
    parser.add_argument('--seeds', default='0,1,2', help='Ensemble member seeds (default: 0,1,2)')
    parser.add_argument('--lookback-multipliers', default=str(config.LOOKBACK_MULTIPLIER),
                        help=f'Ensemble lookback multipliers (default: {config.LOOKBACK_MULTIPLIER})')
    parser.add_argument('--config', help='Training config (JSON); defaults are the desk-scale settings')
    parser.add_argument('-K', '--K', dest='K', type=int, default=config.PERIOD_K, help='Candidate atoms')
    parser.add_argument('-J', '--J', dest='J', type=int, default=config.PERIOD_J, help='Atom budget')
    parser.add_argument('--jobs', type=int, default=config.JOBS, help='Parallel ensemble workers')
    add_out_argument(parser, 'Output report (JSON)', required=False)
    parser.set_defaults(handler=cmd_benchmark)


def run_benchmark(
    training: TrainingConfig,
    kinds: Sequence[str],
    data_seeds: Sequence[int],
    variants: Sequence[str],
    lookback_multipliers: Sequence[int],
    seeds: Sequence[int],
    K: int,
    J: int,
    jobs: int = 1,
    synth_overrides: dict | None = None,
) -> dict:
    """
    Test nd / nrmse of every variant on every (composition, data seed), plus
    the mean relative nd reduction of DEPTS over the other variants.
    """
    results = []
    for kind in kinds:
        for data_seed in data_seeds:
            spec = SynthSpec(compose=kind, seed=data_seed, **(synth_overrides or {}))
            series, split = gen_dataset(spec)
            dataset, splits = [series], [split]
            periods = init_periods_many(dataset, splits, K, J)
            ranges = evaluation_ranges(dataset, splits)
            for variant in variants:
                models = train_ensemble(
                    replace(training, variant=variant),
                    dataset, splits, periods, lookback_multipliers, seeds, jobs=jobs,
                )
                frame = forecast_frame(models, dataset, ranges)
                forecasts, actuals = forecast_map(frame, 'forecast'), forecast_map(frame, 'actual')
                results.append({
                    'kind': kind,
                    'data_seed': data_seed,
                    'variant': variant,
                    'nd': nd(forecasts, actuals),
                    'nrmse': nrmse(forecasts, actuals),
                })
                logger.info(f"{kind} seed {data_seed} {variant}: nd {results[-1]['nd']:.5f}")

    summary: dict[str, dict] = {}
    for kind in kinds:
        rows = [r for r in results if r['kind'] == kind]
        entry: dict = {
            'mean_nd': {v: float(np.mean([r['nd'] for r in rows if r['variant'] == v])) for v in variants},
            'mean_nrmse': {v: float(np.mean([r['nrmse'] for r in rows if r['variant'] == v])) for v in variants},
        }
        if 'DEPTS' in variants:
            reductions = {}
            for other in variants:
                if other == 'DEPTS':
                    continue
                per_seed = []
                for data_seed in data_seeds:
                    ours = next(r['nd'] for r in rows if r['variant'] == 'DEPTS' and r['data_seed'] == data_seed)
                    theirs = next(r['nd'] for r in rows if r['variant'] == other and r['data_seed'] == data_seed)
                    per_seed.append((theirs - ours) / theirs)
                reductions[other] = float(np.mean(per_seed))
            entry['nd_reduction'] = reductions
        summary[kind] = entry

    return {
        'training': training.to_dict(),
        'K': K,
        'J': J,
        'lookback_multipliers': list(lookback_multipliers),
        'seeds': list(seeds),
        'results': results,
        'summary': summary,
    }


def format_benchmark(report: dict) -> str:
    lines = []
    lines.append("Synthetic benchmark (test nd)")
    lines.append("")
    for kind, entry in report['summary'].items():
        lines.append(f"{kind}:")
        for variant, value in entry['mean_nd'].items():
            lines.append(f"  {variant:<10} nd {value:.6f}  nrmse {entry['mean_nrmse'][variant]:.6f}")
        for other, value in entry.get('nd_reduction', {}).items():
            lines.append(f"  DEPTS vs {other}: {100 * value:+.2f}% nd reduction")
        lines.append("")
    return "\n".join(lines)


def cmd_benchmark(args: argparse.Namespace) -> int:
    kinds = [validate_choice(k.strip(), COMPOSITIONS, 'composition') for k in args.kinds.split(',') if k.strip()]
    variants = [validate_choice(v.strip(), VARIANTS, 'variant') for v in args.variants.split(',') if v.strip()]
    if not kinds or not variants:
        raise UsageError("Need at least one composition and one variant")
    training = TrainingConfig.load(args.config) if args.config else TrainingConfig()

    report = run_benchmark(
        training,
        kinds,
        parse_int_list(args.data_seeds),
        variants,
        parse_int_list(args.lookback_multipliers),
        parse_int_list(args.seeds),
        args.K,
        args.J,
        jobs=args.jobs,
    )
    print(format_benchmark(report))
    if args.out:
        atomic_write_json(args.out, report)
        logger.info(f"Wrote benchmark report to {args.out}")
    return EXIT_OK
