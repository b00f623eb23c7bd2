"""
Configuration constants for the lab app.
"""

DISPLAB_VERSION = '1.0.0'

# Grid constraints
GRID_MIN_POINTS = 8          # Smallest admissible points per spatial axis
GRID_MIN_TIME_POINTS = 2

# Morrey-Campanato sup search
CENTER_STRIDE_DIVISOR = 4    # Center stride is max(1, r / (4 dx)) unless refining

# Picard iteration defaults
PICARD_TOL = 1e-8
PICARD_MAX_ITER = 50
DIVERGENCE_FACTOR = 10.0     # Iterate norm growth that signals divergence ...
DIVERGENCE_WINDOW = 5        # ... over this many consecutive iterations
CONTRACTION_TARGET = 0.5     # Potentials are rescaled until the contraction is below this
RESCALE_MAX_HALVINGS = 60

# Counterexample construction
COUNTEREXAMPLE_NODES_PER_UNIT = 64   # Spatial resolution of the slab (dx = 1/64)

# Sharpness verdicts on the fitted log-log slope
SHARPNESS_GROWTH_SLOPE = 0.1   # Slope at or above this certifies failure
SHARPNESS_BOUNDED_SLOPE = 0.05 # Slope at or below this counts as bounded
SHARPNESS_MIN_SWEEP = 3

# Region classifier status codes (CSV encoding)
REGION_STATUS_CODES = {
    'proven-true': 1,
    'proven-false': -1,
    'open': 0,
}

# CSV emission
CSV_FLOAT_FORMAT = '.17g'    # 17 significant digits round-trip a double exactly
CSV_LINE_TERMINATOR = '\r\n'

# Experiments known to the runner
EXPERIMENTS = (
    'region',
    'ratio',
    'freq-local',
    'sharpness',
    'mcnorm',
    'solve',
    'kdv',
    'smoothing',
)

# User-facing messaging
MESSAGES = {
    'run_started': 'Running {experiment} experiment from {config}',
    'run_finished': 'Wrote {rows} rows to {path}',
    'manifest_written': 'Manifest: {path}',
    'not_converged': 'Picard iteration stopped after {iterations} iterations without converging',
}

# Named model weights for the mcnorm experiment: name -> (model, parameters)
WEIGHT_SUITE = {
    'constant': ('constant', {}),
    'gaussian': ('gaussian', {'width': 1.0}),
    'gaussian-time': ('gaussian', {'width': 1.0, 'time_width': 0.5}),
    'gaussian-floor': ('gaussian', {'width': 0.5, 'floor': 0.1}),
    'power': ('power', {'exponent': 0.25}),
    'power-strong': ('power', {'exponent': 0.4}),
    'bracket': ('bracket', {'delta': -1.0}),
    'cube': ('cube', {'half_side': 1.0}),
    'cube-time': ('cube', {'half_side': 0.5, 'time_interval': (-0.5, 0.5)}),
    'cells': ('cells', {'seed': 7, 'cell': 8}),
}

# Parameters each weight model accepts
WEIGHT_MODEL_PARAMETERS = {
    'constant': ('value',),
    'gaussian': ('width', 'time_width', 'floor'),
    'power': ('exponent',),
    'bracket': ('delta',),
    'cube': ('half_side', 'time_interval'),
    'slab': ('M',),
    'cells': ('seed', 'cell', 'time_cell'),
}
