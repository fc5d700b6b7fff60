# Static reference data for DEPTS
from .presets import PRESET_PERIOD_K, PRESET_SEEDS, TRAINING_PRESETS
