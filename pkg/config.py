"""
Configuration settings for the event-driven space logistics optimizer.
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

LOGLEVEL = os.getenv('LOGLEVEL', 'INFO').upper()  # Default to INFO if not set
LOG_FILE = os.getenv('SPACELOG_LOG_FILE', 'space_logistics.log')

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# File Paths
DATA_DIR = os.path.join(BASE_DIR, "data")
TABLES_DIR = os.getenv('SPACELOG_TABLES_DIR', os.path.join(DATA_DIR, "tables"))
CACHE_DIR = os.getenv('SPACELOG_CACHE_DIR', os.path.join(DATA_DIR, "cache"))
OUTPUT_DIR = os.getenv('SPACELOG_OUTPUT_DIR', "output")
FIXTURES_DIR = os.path.join(BASE_DIR, "fixtures")

# Standard gravity used by the rocket equation (m/s^2)
STANDARD_GRAVITY = float(os.getenv('SPACELOG_STANDARD_GRAVITY', '9.80665'))

# SEP type-1 linear TOF coefficients in the fit table are stored scaled down by ten
SEP_TYPE1_TOF_SCALE = 10.0

KG_PER_TONNE = 1000.0


class SolverDefaults:
    """Tolerances and limits for the simplex / branch-and-bound solver."""

    GAP = 1e-6                  # Relative optimality gap
    FEASIBILITY_TOL = 1e-7      # Absolute primal feasibility per row
    INTEGRALITY_TOL = 1e-6      # Distance to the nearest integer
    OPTIMALITY_TOL = 1e-9       # Reduced-cost tolerance
    PIVOT_TOL = 1e-9            # Smallest acceptable pivot magnitude
    RELATIVE_PIVOT_TOL = 1e-7   # Pivot versus the largest entry of the entering column
    REFACTOR_PERIOD = 100       # Basis refactorization every R iterations
    SCALING_PASSES = 4          # Geometric row/column scaling passes; 0 disables
    MAX_RESTARTS = 3            # Simplex restarts from the last good point after a breakdown
    DEGENERATE_STALL = 50       # Degenerate pivots in a row before Bland pricing
    ITERATION_LIMIT = 500000    # LP iterations per node
    PRESOLVE_PASSES = 50
    TIME_LIMIT = None           # Seconds; None means unlimited
    NODE_LIMIT = None
    THREADS = int(os.getenv('SPACELOG_THREADS', '1'))

    @classmethod
    def as_dict(cls):
        """Get the defaults as a plain dictionary."""
        return {
            'gap': cls.GAP,
            'feasibility_tol': cls.FEASIBILITY_TOL,
            'integrality_tol': cls.INTEGRALITY_TOL,
            'optimality_tol': cls.OPTIMALITY_TOL,
            'pivot_tol': cls.PIVOT_TOL,
            'relative_pivot_tol': cls.RELATIVE_PIVOT_TOL,
            'refactor_period': cls.REFACTOR_PERIOD,
            'degenerate_stall': cls.DEGENERATE_STALL,
            'iteration_limit': cls.ITERATION_LIMIT,
            'time_limit': cls.TIME_LIMIT,
            'node_limit': cls.NODE_LIMIT,
            'threads': cls.THREADS,
        }


class CampaignDefaults:
    """Case-study campaign parameters."""

    MISSIONS = 3
    TUG_REUSE_LIMIT = 3                       # Cargo layer repetitions
    FLM_DEMAND_PER_MISSION_KG = 33140.0 / 3.0  # Implied by the LLO fLM holdovers
    MIN_CREW_DAYS_PER_MISSION = 7.0           # Direct TLI -> LLO -> ES route
    POLICIES = ['zero_flow', 'fuel_capacity', 'upper_stage_sizing', 'droptank_sizing']


class LaunchCosts:
    """IMLEO cost factor per kg launched from the Earth surface."""

    LEO = 1.0
    GTO = 1.74

    @classmethod
    def by_destination(cls):
        """Get the launch cost factors keyed by destination node."""
        return {'LEO': cls.LEO, 'GTO': cls.GTO}


class PlanAuditDefaults:
    """Tolerances used when replaying a FlowPlan through the model."""

    MASS_TOL_KG = 1.0       # Rows touching continuous flows (rounded tables)
    DISCRETE_TOL = 1e-6     # Rows over vehicle units only
    OBJECTIVE_TOL_KG = 500.0


class SweepGrid:
    """Default (T_cargo, T_crew) grid for Pareto sweeps, in days."""

    T_CARGO = [0, 120, 240, 360, 480]   # Steps of four months
    T_CREW = [21, 30, 40, 50]

    @classmethod
    def points(cls):
        """Get all grid points sorted by (T_crew, T_cargo)."""
        return [(t_cargo, t_crew) for t_crew in cls.T_CREW for t_cargo in cls.T_CARGO]
