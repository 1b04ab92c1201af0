"""Scenario configuration: a flat ``section.key = value`` text format and built-in presets.

Every key carries its unit in its name. Unknown keys and out-of-range values
raise :class:`ConfigError` naming the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .apertures import AnnulusSpec, GaussianSpec, Orientation, SlitSpec
from .gain import CELL_LENGTH_UM, GainParameters, RadialQuadratic, matched_eps_l
from .grid import GridSpec, OpticalConfig, make_grid

STAGES = ("source", "masks", "farfield", "soft_aperture", "lens_ft", "slices", "fit")
_REQUIRES = {
    "masks": "source",
    "farfield": "source",
    "soft_aperture": "farfield",
    "lens_ft": "farfield",
    "slices": "farfield",
    "fit": "slices",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _pow2(v):
    return v >= 1 and (v & (v - 1)) == 0


@dataclass(frozen=True)
class Key:
    kind: type
    default: Any
    help: str
    check: Callable[[Any], bool] | None = None
    check_msg: str = ""


_WAVELENGTH = 0.795
_K = 2.0 * math.pi / _WAVELENGTH
_EPS_G = matched_eps_l() / CELL_LENGTH_UM

SCHEMA: dict[str, Key] = {
    "grid.nx": Key(int, 1024, "aperture-plane samples along x (power of two >= 8)"),
    "grid.ny": Key(int, 1024, "aperture-plane samples along y (power of two >= 8)"),
    "grid.pitch_um": Key(float, 3.0, "aperture-plane sample pitch [um]", _positive, "must be > 0"),
    "grid.pad_factor": Key(int, 4, "zero-padding factor before the far-field FFT; the far field is "
                           "cropped back to nx x ny [dimensionless, power of two]", _pow2,
                           "must be a power of two >= 1"),
    "optics.wavelength_um": Key(float, _WAVELENGTH, "vacuum wavelength [um]", _positive, "must be > 0"),
    "optics.z_um": Key(float, 300_000.0, "aperture-to-lens distance [um]", _positive, "must be > 0"),
    "optics.f_um": Key(float, 200_000.0, "lens focal length [um]", _positive, "must be > 0"),
    "source.fwhm_um": Key(float, 1000.0, "probe intensity FWHM [um]", _positive, "must be > 0"),
    "source.x0_um": Key(float, 0.0, "probe centre x [um]"),
    "source.y0_um": Key(float, 0.0, "probe centre y [um]"),
    "aperture.a0_um": Key(float, 200.0, "annulus inner radius [um]", _non_negative, "must be >= 0"),
    "aperture.a1_um": Key(float, 400.0, "annulus outer radius [um]", _positive, "must be > 0"),
    "slit.enabled": Key(bool, False, "apply the slit after the annulus [true/false]"),
    "slit.width_um": Key(float, 400.0, "slit full width [um]", _positive, "must be > 0"),
    "slit.orientation": Key(str, "vertical", "vertical (limits x) or horizontal (limits y)",
                            lambda v: v in ("vertical", "horizontal"), "must be vertical or horizontal"),
    "gain.beam": Key(str, "conjugate", "soft aperture for 'probe' or 'conjugate'",
                     lambda v: v in ("probe", "conjugate"), "must be probe or conjugate"),
    "gain.eps_g_per_um": Key(complex, complex(_EPS_G), "gain rate at phase matching [1/um, complex]"),
    "gain.a_d_per_um": Key(complex, 0j, "in-bracket coefficient [1/um, complex]"),
    "gain.a_pp_per_um": Key(complex, 0j, "probe direct coefficient [1/um, complex]"),
    "gain.a_cc_per_um": Key(complex, 0j, "conjugate direct coefficient [1/um, complex]"),
    "gain.a_cp_per_um": Key(complex, complex(_EPS_G), "cross coefficient [1/um, complex]"),
    "gain.length_um": Key(float, CELL_LENGTH_UM, "interaction length [um]", _non_negative, "must be >= 0"),
    "gain.mismatch_in_eigenvalue": Key(bool, True, "let dk shift the coupled-mode eigenvalue [true/false]"),
    "gain.dk_model": Key(str, "radial-quadratic", "'radial-quadratic' or 'external'",
                         lambda v: v in ("radial-quadratic", "external"),
                         "must be radial-quadratic or external"),
    "gain.theta_pm_rad": Key(float, math.radians(1.0), "phase-matching cone half-angle [rad]",
                             _non_negative, "must be >= 0"),
    "gain.kappa_rad_per_um": Key(float, 2.0 * _K, "dk curvature: dk = kappa (theta^2 - theta_pm^2)/2 "
                                 "[rad/um per rad^2]"),
    "gain.cone_x0_um": Key(float, 0.0, "cone axis x in the lens plane [um]"),
    "gain.cone_y0_um": Key(float, 0.0, "cone axis y in the lens plane [um]"),
    "gain.dk_csv": Key(str, "", "external dk map: CSV of ny rows x nx columns [rad/um]"),
    "slices.width_px": Key(int, 10, "slice band width [pixels]", _positive, "must be >= 1"),
    "fit.eps0": Key(float, 0.5, "initial obscuration ratio [dimensionless]",
                    lambda v: 0 <= v < 1, "must lie in [0, 1)"),
    "fit.offset": Key(bool, False, "fit an additive background [true/false]"),
    "output.raw_scale": Key(bool, False, "quantise all images against one common peak instead of "
                            "peak-normalising each [true/false]"),
    "pipeline.stages": Key(list, list(STAGES), "comma-separated subsequence of " + ",".join(STAGES)),
    # inert metadata, recorded only
    "meta.pump_power_mw": Key(float, 550.0, "pump power [mW]"),
    "meta.pump_detuning_mhz": Key(float, 800.0, "pump blue detuning from the D1 line [MHz]"),
    "meta.probe_power_uw": Key(float, 50.0, "probe power [uW]"),
    "meta.probe_detuning_ghz": Key(float, 3.024, "probe red detuning from the pump [GHz]"),
    "meta.cell_temperature_c": Key(float, 115.0, "vapour cell temperature [C]"),
    "meta.ccd_pixel_um": Key(float, 5.5, "camera pixel pitch [um]"),
}


def _parse_value(key: str, raw: str, kind: type):
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        raw = raw[1:-1]
    try:
        if kind is bool:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError
            return low == "true"
        if kind is int:
            f = float(raw)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if kind is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind is complex:
            v = complex(raw.replace(" ", ""))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError
            return v
        if kind is list:
            return [s.strip() for s in raw.split(",") if s.strip()]
        return raw
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {kind.__name__}") from None


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return repr(v.real) if v.imag == 0 else f'"{v.real!r}{v.imag:+.17g}j"'
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return '"' + ",".join(v) + '"'
    if isinstance(v, str):
        return f'"{v}"'
    return str(v)


def validate(values: dict[str, Any]) -> dict[str, Any]:
    out = {k: spec.default for k, spec in SCHEMA.items()}
    for k, v in values.items():
        if k not in SCHEMA:
            raise ConfigError(k, "unknown key")
        out[k] = v
    for k, spec in SCHEMA.items():
        if spec.check is not None and not spec.check(out[k]):
            raise ConfigError(k, f"{spec.check_msg} (got {out[k]!r})")
    for k in ("grid.nx", "grid.ny"):
        if not (out[k] >= 8 and _pow2(out[k])):
            raise ConfigError(k, f"must be a power of two >= 8 (got {out[k]!r})")
    if not out["aperture.a0_um"] < out["aperture.a1_um"]:
        raise ConfigError("aperture.a0_um", "must be smaller than aperture.a1_um")
    stages = out["pipeline.stages"]
    unknown = [s for s in stages if s not in STAGES]
    if unknown:
        raise ConfigError("pipeline.stages", f"unknown stage(s) {unknown}")
    order = [STAGES.index(s) for s in stages]
    if order != sorted(set(order)):
        raise ConfigError("pipeline.stages", "stages must follow the canonical order without repeats")
    for s in stages:
        need = _REQUIRES.get(s)
        if need and need not in stages:
            raise ConfigError("pipeline.stages", f"stage {s!r} requires {need!r}")
    if out["gain.dk_model"] == "external" and "soft_aperture" in stages and not out["gain.dk_csv"]:
        raise ConfigError("gain.dk_csv", "required when gain.dk_model is external")
    return out


def parse_config(text: str) -> dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment outside quotes."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = _strip_comment(line).strip()
        if not stripped:
            continue
        key, sep, raw = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line.strip()!r}")
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = _parse_value(key, raw, SCHEMA[key].kind)
    return validate(values)


def _strip_comment(line: str) -> str:
    quote = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def load_config(path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from None
    return parse_config(text)


def dump_config(values: dict[str, Any]) -> str:
    lines = []
    section = None
    for key in SCHEMA:
        sec = key.split(".", 1)[0]
        if sec != section:
            if section is not None:
                lines.append("")
            lines.append(f"# [{sec}]")
            section = sec
        lines.append(f"{key} = {_format_value(values[key])}")
    return "\n".join(lines) + "\n"


def help_text() -> str:
    width = max(len(k) for k in SCHEMA)
    return "\n".join(f"  {k:<{width}}  {spec.help}" for k, spec in SCHEMA.items())


def _preset(**overrides) -> dict[str, Any]:
    return validate(overrides)


_THETA_PM = math.radians(1.0)
_Z = 300_000.0
_BASE_STAGES = ["source", "masks", "farfield", "lens_ft", "slices", "fit"]
_FWM_STAGES = ["source", "masks", "farfield", "soft_aperture", "lens_ft", "slices", "fit"]

# The probe and conjugate each sit on the pump's phase-matching cone, on
# opposite sides of the pump; in each beam's own far field the cone axis is
# therefore offset by theta_pm * z, towards the pump.
PRESETS: dict[str, dict[str, Any]] = {
    "annulus-probe": _preset(**{"pipeline.stages": _BASE_STAGES}),
    "annulus-slit": _preset(**{"pipeline.stages": _BASE_STAGES, "slit.enabled": True}),
    "fwm-probe": _preset(**{
        "pipeline.stages": _FWM_STAGES,
        "gain.beam": "probe",
        "gain.cone_x0_um": -_THETA_PM * _Z,
    }),
    "fwm-conjugate": _preset(**{
        "pipeline.stages": _FWM_STAGES,
        "gain.beam": "conjugate",
        "gain.cone_x0_um": _THETA_PM * _Z,
    }),
}


def preset(name: str) -> dict[str, Any]:
    try:
        return dict(PRESETS[name])
    except KeyError:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    grid: GridSpec
    optics: OpticalConfig
    source: GaussianSpec
    aperture: AnnulusSpec
    slit: SlitSpec | None
    gain: GainParameters
    beam: str
    dk_model: RadialQuadratic | None
    dk_csv: str
    pad_factor: int
    slice_width: int
    fit_eps0: float
    fit_offset: bool
    raw_scale: bool
    stages: tuple[str, ...]
    values: dict

    @classmethod
    def from_values(cls, values: dict[str, Any]) -> "ScenarioConfig":
        v = validate(values)
        try:
            grid = make_grid(v["grid.nx"], v["grid.ny"], v["grid.pitch_um"], "aperture")
        except ValueError as exc:
            raise ConfigError("grid", str(exc)) from None
        optics = OpticalConfig(v["optics.wavelength_um"], v["optics.z_um"], v["optics.f_um"])
        slit = None
        if v["slit.enabled"]:
            slit = SlitSpec(v["slit.width_um"], Orientation(v["slit.orientation"]))
        dk_model = None
        if v["gain.dk_model"] == "radial-quadratic":
            dk_model = RadialQuadratic(v["gain.theta_pm_rad"], v["gain.kappa_rad_per_um"],
                                       v["optics.z_um"], v["gain.cone_x0_um"], v["gain.cone_y0_um"])
        return cls(
            grid=grid,
            optics=optics,
            source=GaussianSpec.from_fwhm(v["source.fwhm_um"], v["source.x0_um"], v["source.y0_um"]),
            aperture=AnnulusSpec(v["aperture.a0_um"], v["aperture.a1_um"]),
            slit=slit,
            gain=GainParameters(v["gain.eps_g_per_um"], v["gain.a_d_per_um"], v["gain.a_pp_per_um"],
                                v["gain.a_cc_per_um"], v["gain.a_cp_per_um"], v["gain.length_um"],
                                v["gain.mismatch_in_eigenvalue"]),
            beam=v["gain.beam"],
            dk_model=dk_model,
            dk_csv=v["gain.dk_csv"],
            pad_factor=v["grid.pad_factor"],
            slice_width=v["slices.width_px"],
            fit_eps0=v["fit.eps0"],
            fit_offset=v["fit.offset"],
            raw_scale=v["output.raw_scale"],
            stages=tuple(v["pipeline.stages"]),
            values=v,
        )
