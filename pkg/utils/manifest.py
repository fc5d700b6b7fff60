"""Experiment manifests: the JSON document driving `depts train`."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from config import JOBS, PERIOD_J, PERIOD_K, PERIOD_REFINE
from data.presets import PRESET_PERIOD_K, PRESET_SEEDS, TRAINING_PRESETS
from utils.fileio import read_json
from utils.timeseries import SplitSpec
from utils.training import TrainingConfig
from utils.validation import DataError, validate_choice, validate_positive_int


@dataclass
class PeriodInitSettings:
    K: int = PERIOD_K
    J: int = PERIOD_J
    refine: bool = PERIOD_REFINE
    coefficients: Path | None = None


@dataclass
class ExperimentManifest:
    """Dataset, split, period initialization, training and ensemble members."""
    data: Path
    output_dir: Path
    split: SplitSpec | None = None
    period_init: PeriodInitSettings = field(default_factory=PeriodInitSettings)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    lookback_multipliers: list[int] = field(default_factory=lambda: [2])
    seeds: list[int] = field(default_factory=lambda: [0])
    jobs: int = JOBS

    @property
    def member_count(self) -> int:
        return len(self.lookback_multipliers) * len(self.seeds)

    @classmethod
    def from_dict(cls, document: dict, base_dir: str | os.PathLike = '.') -> ExperimentManifest:
        """Parse a manifest; relative paths resolve against base_dir."""
        base = Path(base_dir)

        def resolve(value: str) -> Path:
            path = Path(value)
            return path if path.is_absolute() else base / path

        if not isinstance(document, dict):
            raise DataError("Manifest must be a JSON object")
        try:
            data = resolve(document['data'])
            output_dir = resolve(document.get('output_dir', 'out'))

            split = SplitSpec.from_dict(document['split']) if document.get('split') else None

            # a preset supplies full-scale defaults; explicit sections still win
            preset = document.get('preset')
            training_doc = document.get('training', {})
            if preset:
                preset = validate_choice(preset, TRAINING_PRESETS, 'preset')
                if isinstance(training_doc, str):
                    raise DataError("A preset manifest takes training overrides inline, not a file")
                training = TrainingConfig.from_preset(preset, document.get('preset_split'), **training_doc)
                default_multipliers = list(TRAINING_PRESETS[preset]['lookback_multipliers'])
                default_seeds = list(PRESET_SEEDS)
                default_K, default_J = PRESET_PERIOD_K, training.period_budget
            else:
                if isinstance(training_doc, str):
                    training = TrainingConfig.load(resolve(training_doc))
                else:
                    training = TrainingConfig.from_dict(dict(training_doc))
                default_multipliers = [training.lookback_multiplier]
                default_seeds = [training.seed]
                default_K, default_J = PERIOD_K, PERIOD_J

            init_doc = dict(document.get('period_init') or {})
            period_init = PeriodInitSettings(
                K=validate_positive_int(init_doc.get('K', default_K), 'K'),
                J=validate_positive_int(init_doc.get('J', default_J), 'J'),
                refine=bool(init_doc.get('refine', PERIOD_REFINE)),
                coefficients=resolve(init_doc['coefficients']) if init_doc.get('coefficients') else None,
            )

            ensemble_doc = document.get('ensemble') or {}
            multipliers = [
                validate_positive_int(m, 'lookback multiplier')
                for m in ensemble_doc.get('lookback_multipliers', default_multipliers)
            ]
            seeds = [int(s) for s in ensemble_doc.get('seeds', default_seeds)]
            if not multipliers or not seeds:
                raise DataError("Manifest ensemble needs at least one lookback multiplier and one seed")

            return cls(
                data=data,
                output_dir=output_dir,
                split=split,
                period_init=period_init,
                training=training,
                lookback_multipliers=multipliers,
                seeds=seeds,
                jobs=validate_positive_int(document.get('jobs', JOBS), 'jobs'),
            )
        except KeyError as e:
            raise DataError(f"Manifest is missing {e}") from e
        except TypeError as e:
            raise DataError(f"Malformed manifest: {e}") from e

    @classmethod
    def load(cls, path: str | os.PathLike) -> ExperimentManifest:
        path = Path(path)
        if not path.is_file():
            raise DataError(f"Manifest not found: {path}")
        try:
            document = read_json(path)
        except ValueError as e:
            raise DataError(f"Could not parse {path}: {e}") from e
        return cls.from_dict(document, path.parent)

    def to_dict(self) -> dict:
        return {
            'data': str(self.data),
            'output_dir': str(self.output_dir),
            'split': self.split.to_dict() if self.split else None,
            'period_init': {
                'K': self.period_init.K,
                'J': self.period_init.J,
                'refine': self.period_init.refine,
                'coefficients': str(self.period_init.coefficients) if self.period_init.coefficients else None,
            },
            'training': self.training.to_dict(),
            'ensemble': {'lookback_multipliers': list(self.lookback_multipliers), 'seeds': list(self.seeds)},
            'jobs': self.jobs,
        }
