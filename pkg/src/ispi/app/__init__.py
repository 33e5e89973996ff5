from ispi.app.config import ConfigError, ExperimentConfig, load_config
from ispi.app.experiments import RunReport, frame_rate, imaging_time, run_moving, run_noise_sweep, run_static
from ispi.app.bench import bench

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunReport",
    "bench",
    "frame_rate",
    "imaging_time",
    "load_config",
    "run_moving",
    "run_noise_sweep",
    "run_static",
]
