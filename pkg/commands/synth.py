"""`depts synth`: write a synthetic benchmark series."""

from __future__ import annotations

import argparse

from commands.common import add_out_argument, add_seed_argument, write_frame
from utils.constants import COMPOSITIONS, EXIT_OK
from utils.logging import app_logger as logger
from utils.synthetic import SynthSpec, gen_components
from utils.timeseries import Series, write_csv


def register(subparsers) -> None:
    parser = subparsers.add_parser('synth', help='Generate a synthetic periodic series')
    parser.add_argument('--kind', required=True, choices=COMPOSITIONS, help='Composition of local and periodic parts')
    add_seed_argument(parser)
    add_out_argument(parser, 'Output CSV (series_id,t,value)')
    parser.add_argument('--length', type=int, default=5000, help='Series length (default: 5000)')
    parser.add_argument('--sigma-l', type=float, default=1.0, help='AR noise scale (default: 1)')
    parser.add_argument('--sigma-p', type=float, default=1.0, help='Periodic noise scale (default: 1)')
    parser.add_argument('--components', help='Also write t,l,p,z,x to this CSV')
    parser.set_defaults(handler=cmd_synth)


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(
        compose=args.kind,
        seed=args.seed if args.seed is not None else 0,
        length=args.length,
        sigma_l=args.sigma_l,
        sigma_p=args.sigma_p,
        train_len=min(4000, args.length),
        val_len=min(100, args.length - min(4000, args.length)),
    )
    components = gen_components(spec)
    write_csv([Series(spec.series_id, components['x'].to_numpy(), 0)], args.out)
    logger.info(f"Wrote {spec.length}-point {spec.compose} series to {args.out}")

    if args.components:
        write_frame(components, args.components)
        logger.info(f"Wrote hidden components to {args.components}")
    return EXIT_OK
