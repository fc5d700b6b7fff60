# Published full-scale DEPTS hyper-parameters for the hourly benchmarks.
# Keys match TrainingConfig fields, except:
#   'lookback_multipliers'  ensemble members, one per multiplier
#   'period_budgets'        J per published test split (first split is the default)
TRAINING_PRESETS = {
    'electricity': {
        'iterations': 72000,
        'loss': 'smape',
        'horizon': 24,
        'lookback_multipliers': [2, 3, 4, 5, 6, 7],
        'training_horizon': 10 * 24,
        'period_budgets': {'2014-09-01': 4, '2014-12-25': 32},
        'layers': 30,
        'width': 512,
        'batch_size': 1024,
        'lr_theta': 1e-3,
        'lr_phi': 5e-7,
    },
    'traffic': {
        'iterations': 12000,
        'loss': 'smape',
        'horizon': 24,
        'lookback_multipliers': [2, 3, 4, 5, 6, 7],
        'training_horizon': 10 * 24,
        'period_budgets': {'2008-06-15': 8, '2009-03-24': 8},
        'layers': 30,
        'width': 512,
        'batch_size': 1024,
        'lr_theta': 1e-3,
        'lr_phi': 5e-7,
    },
    'm4-hourly': {
        'iterations': 12000,
        'loss': 'mase',
        'horizon': 48,
        'lookback_multipliers': [4, 5, 6, 7],
        'training_horizon': 10 * 48,
        'period_budgets': {'holdout': 1},
        'layers': 30,
        'width': 512,
        'batch_size': 1024,
        'lr_theta': 1e-3,
        'lr_phi': 5e-7,
    },
    'caiso': {
        'iterations': 4000,
        'loss': 'smape',
        'horizon': 24,
        'lookback_multipliers': [2, 3, 4, 5, 6, 7],
        'training_horizon': 720 * 24,
        'period_budgets': {'2020-01-01': 8, '2020-04-01': 32, '2020-07-01': 32, '2020-10-01': 8},
        'layers': 30,
        'width': 512,
        'batch_size': 1024,
        'lr_theta': 1e-3,
        'lr_phi': 5e-7,
    },
    'np': {
        'iterations': 12000,
        'loss': 'smape',
        'horizon': 24,
        'lookback_multipliers': [2, 3, 4, 5, 6, 7],
        'training_horizon': 720 * 24,
        'period_budgets': {'2020-01-01': 8, '2020-04-01': 8, '2020-07-01': 32, '2020-10-01': 32},
        'layers': 30,
        'width': 512,
        'batch_size': 1024,
        'lr_theta': 1e-6,
        'lr_phi': 5e-7,
    },
}

# Candidate atoms kept before greedy selection, all benchmarks
PRESET_PERIOD_K = 128

# Ensemble seeds per lookback multiplier
PRESET_SEEDS = [0, 1, 2, 3, 4]
