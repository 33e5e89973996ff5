"""JSON experiment configuration.  Every field has a default, so an empty
document (or no file at all) describes the static N-sweep."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ispi.forward import DetectorModel, NoiseSpec, TimingSpec
from ispi.patterns import PatternSpec
from ispi.reconstruct import Mode
from ispi.scene import SceneMask, Trajectory, load_mask, make_letter_t

AUTO = "auto"  # noise amplitude equal to the mean clean bucket value


class ConfigError(ValueError):
    pass


def default_noise_sweep() -> list[dict]:
    # 1 Hz edge placed mid-frame (tick 2001), otherwise a 0.2 s frame sees no transition
    return [
        {"waveform": "off"},
        {"waveform": "square", "frequency": 1.0, "amplitude": AUTO, "phase": 0.8 * math.pi},
        {"waveform": "square", "frequency": 10.0, "amplitude": AUTO},
        {"waveform": "sine", "frequency": 25.0, "amplitude": AUTO},
        {"waveform": "square", "frequency": 10000.0, "amplitude": AUTO},
    ]


@dataclass
class ExperimentConfig:
    seed: int = 0
    pattern: PatternSpec = field(default_factory=PatternSpec)
    scene: str = "letter_t"
    scene_path: str | None = None
    trajectory: Trajectory | None = None
    timing: TimingSpec = field(default_factory=TimingSpec)
    detector: DetectorModel = field(default_factory=DetectorModel)
    noise: dict = field(default_factory=lambda: {"waveform": "off"})
    noise_sweep: list = field(default_factory=default_noise_sweep)
    mode: Mode = field(default_factory=Mode)
    n_per_frame: int = 800
    n_noise: int = 4000
    n_sweep: list = field(default_factory=lambda: [800, 1600, 2400, 3200, 4000])
    frame_count: int = 50
    cgi: bool = True
    figures: bool = True
    output_dir: str = "out"

    def __post_init__(self):
        if self.n_per_frame < 2:
            raise ConfigError("n_per_frame must be >= 2")
        if self.n_noise < 2:
            raise ConfigError("n_noise must be >= 2")
        if self.frame_count < 1:
            raise ConfigError("frame_count must be >= 1")
        if not self.n_sweep or any(int(n) < 2 for n in self.n_sweep):
            raise ConfigError("n_sweep must be a non-empty list of values >= 2")
        if self.scene not in ("letter_t", "file"):
            raise ConfigError(f"scene must be 'letter_t' or 'file', got {self.scene!r}")
        if self.scene == "file" and not self.scene_path:
            raise ConfigError("scene 'file' requires scene_path")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def build_scene(self) -> SceneMask:
        if self.scene == "file":
            scene = load_mask(self.scene_path)
        else:
            scene = make_letter_t(self.pattern.width, self.pattern.height)
        if (scene.width, scene.height) != (self.pattern.width, self.pattern.height):
            raise ConfigError(
                f"scene is {scene.width}x{scene.height}, patterns are "
                f"{self.pattern.width}x{self.pattern.height}"
            )
        return scene

    def noise_spec(self, raw: dict, mean_signal: float) -> NoiseSpec:
        raw = dict(raw)
        if raw.get("amplitude") == AUTO:
            raw["amplitude"] = mean_signal
        raw.setdefault("noise_seed", self.seed)
        try:
            return NoiseSpec(**raw)
        except TypeError as exc:
            raise ConfigError(f"bad noise spec {raw}: {exc}") from None

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(
            self, seed=seed, pattern=dataclasses.replace(self.pattern, seed=seed)
        )

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "pattern": dataclasses.asdict(self.pattern),
            "scene": self.scene,
            "scene_path": self.scene_path,
            "trajectory": None if self.trajectory is None else {
                "speed": self.trajectory.speed,
                "direction": list(self.trajectory.direction),
                "pixel_pitch": self.trajectory.pixel_pitch,
                "start_offset": list(self.trajectory.start_offset),
            },
            "timing": dataclasses.asdict(self.timing),
            "detector": dataclasses.asdict(self.detector),
            "noise": self.noise,
            "noise_sweep": self.noise_sweep,
            "mode": str(self.mode),
            "n_per_frame": self.n_per_frame,
            "n_noise": self.n_noise,
            "n_sweep": list(self.n_sweep),
            "frame_count": self.frame_count,
            "cgi": self.cgi,
            "figures": self.figures,
        }


def _sub(cls, raw, name):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"'{name}' must be an object")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{name}': {exc}") from None


def from_dict(raw: dict) -> ExperimentConfig:
    raw = dict(raw)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    seed = int(raw.pop("seed", 0))
    pattern = dict(raw.pop("pattern", None) or {})
    pattern.setdefault("seed", seed)
    kwargs = {"seed": seed, "pattern": _sub(PatternSpec, pattern, "pattern")}
    traj = raw.pop("trajectory", None)
    if traj is not None:
        traj = dict(traj)
        for key in ("direction", "start_offset"):
            if key in traj:
                traj[key] = tuple(traj[key])
        kwargs["trajectory"] = _sub(Trajectory, traj, "trajectory")
    if "timing" in raw:
        kwargs["timing"] = _sub(TimingSpec, raw.pop("timing"), "timing")
    if "detector" in raw:
        kwargs["detector"] = _sub(DetectorModel, raw.pop("detector"), "detector")
    if "mode" in raw:
        try:
            kwargs["mode"] = Mode.parse(raw.pop("mode"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    kwargs.update(raw)
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return from_dict(raw)
