#!/usr/bin/env python3
"""
DEPTS - Periodic Time-Series Forecasting

Subcommands:
- synth: synthetic periodic benchmark series
- init-periods: periodic coefficient initialization
- train / forecast / eval: ensemble training, test forecasts, nd / nrmse
- decompose: per-layer local / periodic decomposition of a forecast
- benchmark: DEPTS against its ablations on synthetic data
"""

import sys

# Check Python version early, before imports that use 3.9+ syntax
if sys.version_info < (3, 9):
    print("Error: Python 3.9 or higher is required.")
    print(f"You are running Python {sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}")
    sys.exit(1)

# Handle --version early before the numerical imports
if '--version' in sys.argv or '-V' in sys.argv:
    from config import VERSION
    print(f"DEPTS v{VERSION}")
    sys.exit(0)


def main() -> int:
    from app import main as app_main
    return app_main()


if __name__ == '__main__':
    sys.exit(main())
