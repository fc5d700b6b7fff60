# Commands package - registers all subcommands with the argument parser

def register_commands(subparsers) -> None:
    """Register every subcommand parser."""
    from . import benchmark, decompose, evaluate, forecast, init_periods, synth, train

    synth.register(subparsers)
    init_periods.register(subparsers)
    train.register(subparsers)
    forecast.register(subparsers)
    evaluate.register(subparsers)
    decompose.register(subparsers)
    benchmark.register(subparsers)
