"""Constants for the gneseek package."""

# Configuration sections
CONF_GAME = "game"
CONF_GRAPH = "graph"
CONF_GEOMETRY = "geometry"
CONF_SCHEDULE = "schedule"
CONF_RUN = "run"

# Shared configuration keys
CONF_KIND = "kind"
CONF_N_PLAYERS = "n_players"
CONF_HORIZON = "horizon"

# Game configuration keys
CONF_DIMENSION = "dimension"
CONF_COUPLING = "coupling"
CONF_CAPACITY = "capacity"
CONF_AMPLITUDE = "amplitude"

# Graph configuration keys
CONF_EDGES = "edges"
CONF_LAZINESS = "laziness"

# Schedule configuration keys
CONF_A1 = "a1"
CONF_A2 = "a2"

# Run configuration keys
CONF_SEED = "seed"
CONF_DIAGNOSTICS = "diagnostics"
CONF_HARD_DIAGNOSTICS = "hard_diagnostics"
CONF_GNE_TOL = "gne_tol"
CONF_GNE_MAX_ITERS = "gne_max_iters"
CONF_OUTPUT = "output"
CONF_L_SCALE = "l_scale"

# Game kinds
GAME_KIND_COURNOT = "cournot"
GAME_KIND_SIMPLEX_TEST = "simplex_test"

GAME_KINDS = [GAME_KIND_COURNOT, GAME_KIND_SIMPLEX_TEST]

# Keys only meaningful for the simplex test game
SIMPLEX_GAME_KEYS = [CONF_DIMENSION, CONF_COUPLING, CONF_CAPACITY, CONF_AMPLITUDE]

# Graph kinds
GRAPH_KIND_RING = "ring"
GRAPH_KIND_PATH = "path"
GRAPH_KIND_COMPLETE = "complete"
GRAPH_KIND_EDGES = "edges"

GRAPH_KINDS = [GRAPH_KIND_RING, GRAPH_KIND_PATH, GRAPH_KIND_COMPLETE, GRAPH_KIND_EDGES]

# Geometry kinds
GEOMETRY_KIND_EUCLIDEAN = "euclidean"
GEOMETRY_KIND_ENTROPY = "entropy"

GEOMETRY_KINDS = [GEOMETRY_KIND_EUCLIDEAN, GEOMETRY_KIND_ENTROPY]

# Defaults
DEFAULT_N_PLAYERS = 20
DEFAULT_A1 = 0.2
DEFAULT_A2 = 0.8
DEFAULT_SEED = 0
DEFAULT_GNE_TOL = 1e-8
DEFAULT_GNE_MAX_ITERS = 200_000
DEFAULT_OUTPUT = "results"
DEFAULT_SIMPLEX_DIMENSION = 3
DEFAULT_SIMPLEX_COUPLING = 0.2
DEFAULT_SIMPLEX_CAPACITY = 0.3
DEFAULT_CONSTANT_SAMPLES = 10_000

# Schedule ranges (open intervals)
A1_RANGE = (0.0, 0.5)
A2_RANGE = (2.0 / 3.0, 1.0)

# Numeric tolerances
ROW_SUM_TOL = 1e-12
EIGEN_TOL = 1e-10
SIMPLEX_FLOOR = 1e-12
CLAMP_TOL = 1e-12
SIMPLEX_TOL = 1e-9
MARGIN_TOL = -1e-9

# Inflation applied to sampled constants
SAMPLED_CONSTANT_INFLATION = 1.25
ENTROPY_LIPSCHITZ_INFLATION = 2.0
ENTROPY_LIPSCHITZ_SAMPLES = 100_000

# Output files
TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.txt"
CONFIG_COPY_FILE = "config.yaml"
FLOAT_FORMAT = ".17g"

# Experiment statuses
STATUS_SUCCESS = "success"
STATUS_FAILED = "failed"
STATUS_PENDING = "pending"

# Exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERICAL = 4
EXIT_BOUND = 5

# Diagnostic bound names
BOUND_ESTIMATE_ERROR = "estimate_error"
BOUND_DUAL_NORM = "dual_norm"
BOUND_MIXED_DUAL_NORM = "mixed_dual_norm"
BOUND_DUAL_CONSENSUS = "dual_consensus"
BOUND_DUAL_PERTURBATION = "dual_perturbation"
BOUND_PROBLEM_SCALE = "problem_scale"

DUAL_BOUNDS = [BOUND_DUAL_NORM, BOUND_MIXED_DUAL_NORM, BOUND_DUAL_CONSENSUS, BOUND_DUAL_PERTURBATION]
BOUNDS = [BOUND_ESTIMATE_ERROR, *DUAL_BOUNDS, BOUND_PROBLEM_SCALE]
