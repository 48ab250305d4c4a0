"""Location-dependent coded caching: allocation, placement, delivery, evaluation."""

from .allocation import MemoryAllocation, allocate_memory, verify_allocation_bruteforce
from .delivery import (
    CertificationReport,
    ChunkRef,
    Codeword,
    DeliveryPlan,
    UnicastLeg,
    UserRealization,
    build_delivery_plan,
    certify_plan,
)
from .env_model import RoomConfig, StateGrid, build_grid, per_state_rate
from .errors import (
    AllocationError,
    ConfigError,
    InfeasibleError,
    IntegralityError,
    LoccacheError,
    OracleScopeError,
)
from .evaluation import (
    BaselineSensitivity,
    EvaluationResult,
    OptimalityBound,
    analytic_tm,
    analytic_tu,
    baseline_tx,
    baseline_tx_parts,
    evaluate,
    max_file_size,
    optimal_time_lower_bound,
    optimality_bound,
)
from .experiments import (
    CrossoverReport,
    ExperimentReport,
    SweepConfig,
    crossover_report,
    run_sweep,
)
from .placement import CachePlacement, SubfileId, cache_volume, place_cache

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
