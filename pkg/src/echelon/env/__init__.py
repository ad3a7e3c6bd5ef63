from .actions import check_on_grid, levels_to_units, quantize_units
from .allocation import allocate
from .core import EpisodeComplete, IntegrityError, InventoryEnv, StepOutcome
from .reference import ReferenceEnv
from .tables import STORE, WAREHOUSE, EpisodeTables
from .trace import write_trace, write_trace_file

__all__ = [
    "allocate",
    "check_on_grid",
    "levels_to_units",
    "quantize_units",
    "EpisodeComplete",
    "IntegrityError",
    "InventoryEnv",
    "StepOutcome",
    "ReferenceEnv",
    "EpisodeTables",
    "STORE",
    "WAREHOUSE",
    "write_trace",
    "write_trace_file",
]
