"""The three imaging experiments: static N-sweep, moving object, noise sweep."""

from __future__ import annotations

import dataclasses
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import ispi
from ispi.app.config import ConfigError, ExperimentConfig
from ispi.app.outputs import RunWriter, checksum
from ispi.forward import NoiseSpec, measure_block, noise_series, slow_noise_ratio
from ispi.metrics import quality_report
from ispi.patterns import gen_patterns
from ispi.reconstruct import IgiState, cgi_reconstruct
from ispi.scene import SceneMask, mask_at_time

log = logging.getLogger(__name__)


def frame_rate(dmd_rate: float, n: int) -> float:
    """Images per second when every image takes ``n`` DMD ticks."""
    if dmd_rate <= 0 or n < 1:
        raise ValueError("dmd_rate must be positive and n >= 1")
    return dmd_rate / n


def imaging_time(dmd_rate: float, n: int) -> float:
    """Seconds the DMD needs to project ``n`` patterns."""
    if dmd_rate <= 0 or n < 1:
        raise ValueError("dmd_rate must be positive and n >= 1")
    return n / dmd_rate


@dataclass
class RunReport:
    kind: str
    frames: list
    config: dict
    frame_rate_fps: float | None = None
    imaging_time_s: float | None = None
    extra: dict = field(default_factory=dict)
    # wall-clock per frame; kept out of report.json so run trees stay reproducible
    compute_time_s: list = field(default_factory=list)
    version: str = ispi.__version__

    @property
    def saturation_flags(self) -> list[bool]:
        return [bool(f.get("saturated", False)) for f in self.frames]

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "version": self.version,
            "frame_rate_fps": self.frame_rate_fps,
            "imaging_time_s": self.imaging_time_s,
            "saturation_flags": self.saturation_flags,
        }
        d.update(self.extra)
        d["frames"] = self.frames
        d["config"] = self.config
        return d

    def timing_dict(self) -> dict:
        return {"kind": self.kind, "compute_time_s": self.compute_time_s}


def _quality(img, truth):
    try:
        return quality_report(img, truth).to_dict()
    except ValueError as exc:
        # constant reconstructions have no correlation; keep the run going
        return {"error": str(exc)}


def _threads() -> int | None:
    raw = os.environ.get("ISPI_THREADS", "").strip()
    if not raw or raw == "0":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ISPI_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("ISPI_THREADS must be >= 0")
    return n


class Simulator:
    """Measurement source: tick ``n`` is a pure function of the config, the
    object mask in place at that tick, and ``n`` itself."""

    def __init__(self, config: ExperimentConfig, noise: NoiseSpec | None = None):
        self.config = config
        self.noise = noise or NoiseSpec()

    def patterns(self, start: int, count: int) -> np.ndarray:
        return gen_patterns(self.config.pattern, start, count)

    def measure(self, bits, mask: SceneMask, start: int, noise: NoiseSpec | None = None):
        """Returns ``(S, Q, optical)`` for ticks ``start .. start+len(bits)-1``."""
        noise = noise or self.noise
        q = noise_series(noise, self.config.timing, start, bits.shape[0])
        s, optical = measure_block(bits, mask, self.config.detector, q, self.config.seed, start)
        return s, q, optical


def _mean_clean(config, bits, scene) -> float:
    return float(np.mean(config.detector.gain * (bits.astype(np.int64) @ scene.mask)))


def run_static(config: ExperimentConfig, out=None) -> RunReport:
    """One stream of ``max(N) + 1`` ticks, read out after each requested N."""
    if config.trajectory is not None:
        raise ConfigError("run_static takes no trajectory; use run_moving")
    scene = config.build_scene()
    writer = RunWriter(out or config.output_dir)
    ns = sorted({int(n) for n in config.n_sweep})
    total = ns[-1] + 1
    rate = config.timing.dmd_rate

    bits = gen_patterns(config.pattern, 1, total)
    noise = config.noise_spec(config.noise, _mean_clean(config, bits, scene))
    sim = Simulator(config, noise)
    S, Q, optical = sim.measure(bits, scene, 1)
    writer.trace("trace", S, Q, optical)

    state = IgiState(scene.width, scene.height, config.mode)
    frames, timings, fig_igi, fig_cgi = [], [], [], []
    consumed = 0
    for n in ns:
        t0 = time.perf_counter()
        state.feed(S[consumed : n + 1], bits[consumed : n + 1])
        consumed = n + 1
        img = state.finalize()
        timings.append(time.perf_counter() - t0)
        entry = {
            "label": f"N{n:04d}",
            "n": n,
            "pairs": state.pairs_count,
            "frame_rate_fps": frame_rate(rate, n),
            "imaging_time_s": imaging_time(rate, n),
            "saturated": state.saturated,
            "saturation_events": state.saturation_events,
            "quality": _quality(img, scene),
        }
        writer.image(f"frame_N{n:04d}", img)
        fig_igi.append((n, img.as_image(), entry["quality"].get("pearson_corr")))
        if config.cgi:
            cimg = cgi_reconstruct(S[: n + 1], bits[: n + 1], scene.width, scene.height)
            entry["cgi_quality"] = _quality(cimg, scene)
            writer.image(f"cgi_N{n:04d}", cimg)
            fig_cgi.append((n, cimg.as_image(), entry["cgi_quality"].get("pearson_corr")))
        frames.append(entry)
        log.info("N=%d corr=%s", n, entry["quality"].get("pearson_corr"))

    report = RunReport(
        "static",
        frames,
        config.to_dict(),
        extra={"dmd_rate": rate, "trace_sha256": checksum(S)},
        compute_time_s=timings,
    )
    if len(ns) == 1:
        report.frame_rate_fps = frame_rate(rate, ns[0])
        report.imaging_time_s = imaging_time(rate, ns[0])
    if config.figures:
        from ispi.app import plotting

        writer.figure(
            "figures/static_sweep.png",
            plotting.static_sweep_figure(scene.as_image(), fig_igi, fig_cgi or None),
        )
        cgi_curve = [c for _, _, c in fig_cgi] if fig_cgi else None
        if all(c is not None for _, _, c in fig_igi) and (
            cgi_curve is None or all(c is not None for c in cgi_curve)
        ):
            writer.figure(
                "figures/static_corr.png",
                plotting.correlation_curve(ns, [c for _, _, c in fig_igi], cgi_curve),
            )
    writer.json("report.json", report.to_dict())
    return report


def _moving_frame(config, sim, base, k):
    """Reconstruct frame ``k`` (1-based) on its own, regenerating the shared
    boundary tick from the previous frame's object position."""
    n = config.n_per_frame
    rate = config.timing.dmd_rate
    traj = config.trajectory

    def mask_for(frame):
        return mask_at_time(base, traj, (frame - 1) * n / rate)

    mask = mask_for(k)
    first = (k - 1) * n + 1  # shared tick: last of frame k-1, or the priming tick
    bits = sim.patterns(first, n + 1)
    s_head, _, _ = sim.measure(bits[:1], mask_for(k - 1) if k > 1 else mask, first)
    s_body, _, _ = sim.measure(bits[1:], mask, first + 1)
    samples = np.concatenate([s_head, s_body])
    t0 = time.perf_counter()
    state = IgiState(base.width, base.height, config.mode).feed(samples, bits)
    img = state.finalize()
    elapsed = time.perf_counter() - t0
    return mask, state, img, elapsed, samples


def run_moving(config: ExperimentConfig, out=None) -> RunReport:
    if config.trajectory is None:
        raise ConfigError("run_moving needs a trajectory")
    base = config.build_scene()
    writer = RunWriter(out or config.output_dir)
    n = config.n_per_frame
    rate = config.timing.dmd_rate
    traj = config.trajectory
    clean_bits = gen_patterns(config.pattern, 1, n + 1)
    noise = config.noise_spec(config.noise, _mean_clean(config, clean_bits, base))
    sim = Simulator(config, noise)

    ks = range(1, config.frame_count + 1)
    workers = _threads()
    if workers == 1:
        results = [_moving_frame(config, sim, base, k) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda k: _moving_frame(config, sim, base, k), ks))

    frames, timings, strip = [], [], []
    for k, (mask, state, img, elapsed, _) in zip(ks, results):
        t = (k - 1) * n / rate
        offset = traj.shift_at(t)
        stem = f"frame_{k:06d}"
        writer.image(stem, img)
        entry = {
            "frame": k,
            "file": f"frames/{stem}.pgm",
            "start_time_s": t,
            "object_offset": list(offset),
            "commanded_displacement_mm": traj.speed * t,
            "pairs": state.pairs_count,
            "saturated": state.saturated,
            "saturation_events": state.saturation_events,
            "quality": _quality(img, mask),
        }
        frames.append(entry)
        timings.append(elapsed)
        strip.append((k, img.as_image(), offset))

    fps = frame_rate(rate, n)
    duration = config.frame_count * imaging_time(rate, n)
    writer.json(
        "frames/manifest.json",
        {"fps": fps, "frames": [f["file"] for f in frames]},
    )
    report = RunReport(
        "moving",
        frames,
        config.to_dict(),
        frame_rate_fps=fps,
        imaging_time_s=imaging_time(rate, n),
        extra={
            "dmd_rate": rate,
            "duration_s": duration,
            "total_displacement_mm": traj.speed * duration,
            "total_displacement_px": traj.speed * duration / traj.pixel_pitch,
        },
        compute_time_s=timings,
    )
    if config.figures:
        from ispi.app import plotting

        writer.figure("figures/moving_frames.png", plotting.moving_strip(strip))
    writer.json("report.json", report.to_dict())
    return report


def _label(spec: NoiseSpec) -> str:
    if spec.waveform == "off":
        return "off"
    return f"{spec.waveform} {spec.frequency:g} Hz"


def run_noise_sweep(config: ExperimentConfig, specs=None, n=None, out=None) -> RunReport:
    """IGI and CGI on the very same bucket stream for every noise setting.

    ``specs`` defaults to ``config.noise_sweep``; entries may be NoiseSpec
    objects or config dicts (``amplitude: "auto"`` = mean clean bucket value).
    Quality drops are measured against a noiseless run on the same patterns.
    """
    n = config.n_noise if n is None else n
    if n < 2:
        raise ConfigError("noise sweep needs N >= 2")
    raw_specs = config.noise_sweep if specs is None else specs
    if not raw_specs:
        raise ConfigError("noise sweep needs at least one noise spec")
    scene = config.build_scene()
    writer = RunWriter(out or config.output_dir)
    rate = config.timing.dmd_rate
    bits = gen_patterns(config.pattern, 1, n + 1)
    mean_clean = _mean_clean(config, bits, scene)
    sim = Simulator(config)

    def reconstruct(S, seen=None):
        state = IgiState(scene.width, scene.height, config.mode).feed(S, bits)
        cgi = cgi_reconstruct(S, bits, scene.width, scene.height)
        if seen is not None:
            # both estimators must consume the very same array
            seen["igi_input_sha256"] = checksum(S)
            seen["cgi_input_sha256"] = checksum(S)
        return state, state.finalize(), cgi

    S0, _, _ = sim.measure(bits, scene, 1, NoiseSpec())
    _, base_igi, base_cgi = reconstruct(S0)
    base = {"igi": _quality(base_igi, scene), "cgi": _quality(base_cgi, scene)}

    frames, columns, timings = [], [], []
    for i, raw in enumerate(raw_specs):
        spec = raw if isinstance(raw, NoiseSpec) else config.noise_spec(raw, mean_clean)
        S, Q, optical = sim.measure(bits, scene, 1, spec)
        seen = {}
        t0 = time.perf_counter()
        state, igi, cgi = reconstruct(S, seen)
        timings.append(time.perf_counter() - t0)
        stem = f"noise_{i:02d}"
        writer.trace(stem, S, Q, optical)
        writer.image(f"{stem}_igi", igi)
        writer.image(f"{stem}_cgi", cgi)
        qi, qc = _quality(igi, scene), _quality(cgi, scene)
        entry = {
            "index": i,
            "label": _label(spec),
            "noise": dataclasses.asdict(spec),
            "slow_noise_ratio": slow_noise_ratio(S, Q),
            "trace_sha256": checksum(S),
            **seen,
            "saturated": state.saturated,
            "saturation_events": state.saturation_events,
            "igi_quality": qi,
            "cgi_quality": qc,
        }
        for key, q in (("igi", qi), ("cgi", qc)):
            if "pearson_corr" in q and "pearson_corr" in base[key]:
                entry[f"{key}_corr_drop"] = base[key]["pearson_corr"] - q["pearson_corr"]
        frames.append(entry)
        columns.append(
            {
                "label": entry["label"],
                "S": S,
                "igi": igi.as_image(),
                "cgi": cgi.as_image(),
                "igi_corr": qi.get("pearson_corr"),
                "cgi_corr": qc.get("pearson_corr"),
            }
        )

    report = RunReport(
        "noise_sweep",
        frames,
        config.to_dict(),
        frame_rate_fps=frame_rate(rate, n),
        imaging_time_s=imaging_time(rate, n),
        extra={
            "dmd_rate": rate,
            "n": n,
            "mean_clean_signal": mean_clean,
            "noiseless_baseline": base,
        },
        compute_time_s=timings,
    )
    if config.figures:
        from ispi.app import plotting

        writer.figure("figures/noise_sweep.png", plotting.noise_sweep_figure(columns))
    writer.json("report.json", report.to_dict())
    return report
