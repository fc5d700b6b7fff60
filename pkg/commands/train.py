"""`depts train`: train the ensemble described by a manifest."""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from commands.common import (
    add_out_argument,
    add_seed_argument,
    evaluation_ranges,
    forecast_frame,
    load_dataset,
    member_name,
    write_frame,
)
from utils.constants import EXIT_OK
from utils.fileio import atomic_write_json
from utils.logging import app_logger as logger
from utils.manifest import ExperimentManifest
from utils.periodicity import init_periods_many, load_coefficients, match_periods, save_coefficients
from utils.training import TrainingConfig, train_ensemble


def register(subparsers) -> None:
    parser = subparsers.add_parser('train', help='Train an ensemble from a manifest')
    parser.add_argument('--manifest', required=True, help='Experiment manifest (JSON)')
    parser.add_argument('--config', help='Training config (JSON) replacing the manifest training section')
    add_seed_argument(parser, 'Train a single member seed instead of the manifest seeds')
    add_out_argument(parser, 'Output directory (default: manifest output_dir)', required=False)
    parser.set_defaults(handler=cmd_train)


def cmd_train(args: argparse.Namespace) -> int:
    manifest = ExperimentManifest.load(args.manifest)
    if args.config:
        manifest.training = TrainingConfig.load(args.config)
    if args.seed is not None:
        manifest.seeds = [args.seed]
        manifest.training = replace(manifest.training, seed=args.seed)
    if args.out:
        manifest.output_dir = Path(args.out)

    out_dir = manifest.output_dir
    dataset, splits = load_dataset(manifest.data, manifest.split)

    settings = manifest.period_init
    if settings.coefficients is not None:
        periods = match_periods(load_coefficients(settings.coefficients), dataset)
    else:
        periods = init_periods_many(dataset, splits, settings.K, settings.J, refine=settings.refine)
        save_coefficients(periods, out_dir / 'coefficients.json')

    models = train_ensemble(
        manifest.training,
        dataset,
        splits,
        periods,
        manifest.lookback_multipliers,
        manifest.seeds,
        jobs=manifest.jobs,
    )

    checkpoints = []
    for model in models:
        path = model.save(out_dir / f'{member_name(model)}.ckpt')
        checkpoints.append(path.name)

    frame = forecast_frame(models, dataset, evaluation_ranges(dataset, splits))
    write_frame(frame, out_dir / 'forecast.csv')

    atomic_write_json(out_dir / 'run.json', {
        'manifest': manifest.to_dict(),
        'checkpoints': checkpoints,
        'final_losses': [m.final_loss for m in models],
    })
    logger.info(f"Trained {len(models)} member(s); outputs in {out_dir}")
    return EXIT_OK
