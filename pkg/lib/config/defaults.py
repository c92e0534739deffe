from yacs.config import CfgNode as Node

# -----------------------------------------------------------------------------
# Operators
# -----------------------------------------------------------------------------
_C = Node()
_C.OPERATORS = Node()
_C.OPERATORS.MAX_DIM = 64
_C.OPERATORS.HERMITIAN_TOL = 1e-12
_C.OPERATORS.UNITARY_TOL = 1e-12

# ---------------------------------------------------------------------------- #
# States
# ---------------------------------------------------------------------------- #
_C.STATES = Node()
_C.STATES.PURITY_TOL = 1e-10
# smallest eigenvalue accepted for a density matrix
_C.STATES.PSD_TOL = 1e-10
_C.STATES.TRACE_TOL = 1e-12

# ---------------------------------------------------------------------------- #
# Covariance
# ---------------------------------------------------------------------------- #
_C.COVARIANCE = Node()
_C.COVARIANCE.PSD_TOL = 1e-9

# ---------------------------------------------------------------------------- #
# Solver: factor parametrization rho = AA^dag / tr(AA^dag)
# ---------------------------------------------------------------------------- #
_C.SOLVER = Node()
_C.SOLVER.METHOD = "lbfgs"  # lbfgs, nelder-mead
_C.SOLVER.MAX_ITER = 400
_C.SOLVER.HISTORY_SIZE = 20
_C.SOLVER.NELDER_MEAD_MAX_ITER = 20000
_C.SOLVER.RESTARTS = 64

# penalty weights PENALTY_BASE * PENALTY_GAMMA ** k for k < PENALTY_ROUNDS
_C.SOLVER.PENALTY_BASE = 1e2
_C.SOLVER.PENALTY_GAMMA = 1e2
_C.SOLVER.PENALTY_ROUNDS = 3
# additional multiplier updates at the last weight until the residual is met
_C.SOLVER.EXTRA_ROUNDS = 6
_C.SOLVER.CONSTRAINT_TOL = 1e-8
# trace targets this close to tau_min / tau_max are treated as boundary points
_C.SOLVER.BOUNDARY_TOL = 1e-9

# ---------------------------------------------------------------------------- #
# Regions
# ---------------------------------------------------------------------------- #
_C.REGIONS = Node()
_C.REGIONS.GRID_N = 64
_C.REGIONS.REFINE_TOL = 1e-10
_C.REGIONS.MAX_SWEEPS = 500
_C.REGIONS.CENTER_TOL = 1e-6
_C.REGIONS.DEGENERACY_TOL = 1e-10
_C.REGIONS.JNR_RANK = 2
_C.REGIONS.JNR_RESTARTS = 4
# re-solves along the farthest slice point, stops early once the radius stalls
_C.REGIONS.JNR_REFINE_STEPS = 8

# ---------------------------------------------------------------------------- #
# Minimum uncertainty states
# ---------------------------------------------------------------------------- #
_C.MINUNC = Node()
_C.MINUNC.RESIDUAL_TOL = 1e-9
# eigenvector matrices worse conditioned than this are treated as defective
_C.MINUNC.CONDITION_LIMIT = 1e12

# ---------------------------------------------------------------------------- #
# Metrology
# ---------------------------------------------------------------------------- #
_C.METROLOGY = Node()
_C.METROLOGY.DET_FLOOR = 1e-12
_C.METROLOGY.SATURABILITY_TOL = 1e-6
_C.METROLOGY.CONDITION_LIMIT = 1e12
_C.METROLOGY.FD_STEP = 1e-4
_C.METROLOGY.SHOTS = 100000
_C.METROLOGY.TRIALS = 200
_C.METROLOGY.WINDOW_POINTS = 2001
_C.METROLOGY.BISECTION_STEPS = 80
_C.METROLOGY.DIMS = (3, 4, 5, 6, 7, 8, 9, 10, 11, 12)

# ---------------------------------------------------------------------------- #
# Entanglement
# ---------------------------------------------------------------------------- #
_C.ENTANGLEMENT = Node()
_C.ENTANGLEMENT.T_MIN = 0.05
_C.ENTANGLEMENT.T_MAX = 5.0
_C.ENTANGLEMENT.T_STEP = 0.05
_C.ENTANGLEMENT.VERDICT_TOL = 1e-9
_C.ENTANGLEMENT.SQUEEZING_A = 4.0
_C.ENTANGLEMENT.SQUEEZING_B = (2.0, 100.0)
_C.ENTANGLEMENT.SQUEEZING_SAMPLES = 50

# ---------------------------------------------------------------------------- #
# Runtime
# ---------------------------------------------------------------------------- #
_C.RUNTIME = Node()
_C.RUNTIME.SEED = 0
_C.RUNTIME.NUM_WORKERS = 1

# ---------------------------------------------------------------------------- #
# Misc options
# ---------------------------------------------------------------------------- #
_C.OUTPUT = Node()
_C.OUTPUT.FORMAT = "csv"  # csv, json
_C.OUTPUT_DIR = "."
