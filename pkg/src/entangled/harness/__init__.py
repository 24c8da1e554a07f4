from .config import ESTIMATORS, MRule, SweepConfig, load_config
from .fit import fit_scaling_exponent
from .io import instance_from_json, instance_to_json, read_samples, write_samples
from .sweep import (
    CSV_HEADER,
    SweepResult,
    SweepRow,
    read_rows,
    run_error_sweep,
    run_error_sweep_detailed,
    theory_bound,
    write_rows,
)

__all__ = [
    "CSV_HEADER",
    "ESTIMATORS",
    "MRule",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "fit_scaling_exponent",
    "instance_from_json",
    "instance_to_json",
    "load_config",
    "read_rows",
    "read_samples",
    "run_error_sweep",
    "run_error_sweep_detailed",
    "theory_bound",
    "write_rows",
    "write_samples",
]
