"""Run a configured scenario stage by stage and write its images, slices and manifest."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .apertures import Orientation, annulus_mask, apply_mask, gaussian_field, slit_mask
from .config import ScenarioConfig, dump_config
from .gain import (ExternalDk, apply_soft_aperture, build_dk_map, half_max_band,
                   soft_aperture_mask)
from .grid import ComplexField2D, crop_center, zero_pad
from .profiles import (AiryFit, FitConvergenceError, RadialProfile, compare_profiles,
                       extract_slice, fit_airy, heuristic_guess)
from .propagation import fraunhofer_numeric, lens_ft


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage!r} failed: {message}")
        self.stage = stage


@dataclass
class SimulationResult:
    config: ScenarioConfig
    images: dict[str, np.ndarray] = field(default_factory=dict)
    fields: dict[str, ComplexField2D] = field(default_factory=dict)
    profiles: dict[str, RadialProfile] = field(default_factory=dict)
    fits: dict[str, AiryFit] = field(default_factory=dict)
    fit_nrmse: dict[str, float] = field(default_factory=dict)
    unconverged: list[str] = field(default_factory=list)
    soft_mask: np.ndarray | None = None
    band: tuple[float, float] | None = None
    timings: dict[str, float] = field(default_factory=dict)


def _lens_plane(res: SimulationResult) -> ComplexField2D:
    return res.fields.get("soft_aperture", res.fields["farfield"])


def _source(cfg, res):
    u = gaussian_field(cfg.grid, cfg.source)
    res.fields["source"] = u
    res.images["source"] = u.intensity


def _masks(cfg, res):
    u = apply_mask(res.fields["source"], annulus_mask(cfg.grid, cfg.aperture))
    if cfg.slit is not None:
        u = apply_mask(u, slit_mask(cfg.grid, cfg.slit))
    res.fields["aperture"] = u
    res.images["aperture"] = u.intensity


def _farfield(cfg, res):
    u = res.fields.get("aperture", res.fields["source"])
    far = fraunhofer_numeric(zero_pad(u, cfg.pad_factor), cfg.optics).field
    far = crop_center(far, cfg.grid.nx, cfg.grid.ny)
    res.fields["farfield"] = far
    res.images["farfield"] = far.intensity


def _soft_aperture(cfg, res):
    far = res.fields["farfield"]
    if cfg.dk_model is not None:
        model = cfg.dk_model
    else:
        model = ExternalDk(np.loadtxt(cfg.dk_csv, delimiter=",", ndmin=2))
    dkmap = build_dk_map(far.grid, model)
    mask = soft_aperture_mask(dkmap, cfg.gain, cfg.beam)
    res.soft_mask = mask
    if cfg.dk_model is not None:
        res.band = half_max_band(dkmap, mask)
    # intensity is multiplied by the mask, so the field carries its square root
    res.fields["soft_aperture"] = far.replace(far.samples * np.sqrt(mask))
    res.images["soft_aperture_mask"] = mask
    res.images["soft_aperture"] = apply_soft_aperture(far.intensity, mask)


def _lens_ft(cfg, res):
    u = lens_ft(_lens_plane(res), cfg.optics)
    res.fields["focal"] = u
    res.images["focal"] = u.intensity


def _slices(cfg, res):
    u = _lens_plane(res)
    g = u.grid
    center = (g.ny // 2, g.nx // 2)
    res.profiles["horizontal"] = extract_slice(u.intensity, Orientation.HORIZONTAL, center,
                                               cfg.slice_width, g.pitch_x)
    res.profiles["vertical"] = extract_slice(u.intensity, Orientation.VERTICAL, center,
                                             cfg.slice_width, g.pitch_y)


def _fit(cfg, res):
    for name, prof in res.profiles.items():
        guess = heuristic_guess(prof, cfg.fit_eps0)
        try:
            fit = fit_airy(prof, guess, offset=cfg.fit_offset)
        except FitConvergenceError as exc:
            fit = exc.best
            res.unconverged.append(name)
        res.fits[name] = fit
        model = RadialProfile(prof.positions, np.clip(fit.model(prof.positions), 0, None), prof.unit)
        res.fit_nrmse[name] = compare_profiles(prof, model).nrmse


_STAGE_FUNCS = {
    "source": _source,
    "masks": _masks,
    "farfield": _farfield,
    "soft_aperture": _soft_aperture,
    "lens_ft": _lens_ft,
    "slices": _slices,
    "fit": _fit,
}


def run_scenario(cfg: ScenarioConfig) -> SimulationResult:
    """Run every configured stage in order; failures are re-raised as :class:`StageError`."""
    res = SimulationResult(cfg)
    for stage in cfg.stages:
        t0 = time.perf_counter()
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                _STAGE_FUNCS[stage](cfg, res)
        except (ArithmeticError, ValueError, OSError, np.linalg.LinAlgError) as exc:
            raise StageError(stage, str(exc)) from exc
        res.timings[stage] = time.perf_counter() - t0
    if res.unconverged:
        raise StageError("fit", f"no convergence for slice(s) {res.unconverged}")
    return res


def write_outputs(res: SimulationResult, out_dir) -> Path:
    """Write images, slice CSVs, fit records and ``manifest.txt``; return the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = res.config
    written: list[Path] = []
    scales = {}

    (out / "config.txt").write_text(dump_config(cfg.values))
    written.append(out / "config.txt")

    common_peak = None
    if cfg.raw_scale:
        peaks = [float(a.max()) for k, a in res.images.items() if k != "soft_aperture_mask"]
        common_peak = max(peaks) if peaks else 1.0
    for name, img in res.images.items():
        peak = None if name == "soft_aperture_mask" else common_peak
        path = io.export_image(img, out / f"{name}.pgm", peak)
        scales[path.name] = float(img.max()) if peak is None else peak
        written.append(path)
    for name, prof in res.profiles.items():
        written.append(io.write_profile_csv(prof, out / f"slice_{name}.csv"))
    for name, fit in res.fits.items():
        path = out / f"fit_{name}.txt"
        io.write_record(fit_record(fit, converged=name not in res.unconverged,
                                   nrmse=res.fit_nrmse[name]), path)
        written.append(path)

    items: dict[str, object] = {}
    for k, v in cfg.values.items():
        items[f"config.{k}"] = ",".join(v) if isinstance(v, list) else v
    for path in written:
        items[f"file.{path.name}.sha256"] = io.sha256_file(path)
    for name, peak in scales.items():
        items[f"scale.{name}"] = peak
    if res.band is not None:
        items["soft_aperture.band_lo_rad"] = res.band[0]
        items["soft_aperture.band_hi_rad"] = res.band[1]
    for stage, dt in res.timings.items():
        items[f"timing.{stage}_s"] = round(dt, 6)
    manifest = out / "manifest.txt"
    io.write_record(items, manifest)
    return manifest


def fit_record(fit: AiryFit, converged: bool = True, **extra) -> dict:
    rec = {
        "eps_ratio": fit.eps_ratio,
        "i0": fit.i0,
        "scale": fit.scale,
        "center": fit.center,
        "residual": fit.residual,
        "iterations": fit.iterations,
    }
    if fit.offset:
        rec["offset"] = fit.offset
    rec["converged"] = converged
    rec.update(extra)
    return rec


def manifest_checksums(path) -> dict[str, str]:
    return {k: v for k, v in io.read_record(path).items() if k.endswith(".sha256")}
