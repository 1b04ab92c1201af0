"""Four-wave-mixing gain versus phase mismatch, and the soft aperture built from it.

Probe and conjugate gains for an interaction length ``L``::

    g_pr   = |exp(da L) [cosh(e L) + (a / e) sinh(e L)]|^2
    g_conj = |exp(da L) (a_cp / e) sinh(e L)|^2
    da     = (a_pp - a_cc + i dk) / 2

With ``mismatch_in_eigenvalue=False`` the rate ``e`` and coefficient ``a`` are
the fixed parameters ``eps_g`` and ``a_d``; ``dk`` then only enters through
``da``, whose real part does not depend on it, so the gain is flat in ``dk``.
With ``mismatch_in_eigenvalue=True`` (the default) ``eps_g`` and ``a_d`` are
the values at perfect phase matching and the mismatch enters the coupled-mode
eigenvalue::

    a(dk) = a_d - i dk / 2
    e(dk) = sqrt(eps_g^2 - a_d^2 + a(dk)^2)

which reduces to the fixed form at ``dk = 0`` and gives the usual
``sinh``/``sinc`` phase-matching roll-off for ``dk != 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec

CELL_LENGTH_UM = 17_000.0
TARGET_GAIN = 30.0


def matched_eps_l(gain: float = TARGET_GAIN) -> float:
    """``eps L`` at which ``cosh^2(eps L) == gain`` (the phase-insensitive limit)."""
    if gain < 1:
        raise ValueError("probe gain must be >= 1")
    return math.acosh(math.sqrt(gain))


def _sinhc(x):
    # sinh(x)/x for complex x, finite at 0
    x = np.asarray(x)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 + x2 / 6.0 + x2 * x2 / 120.0, np.sinh(xs) / xs)


@dataclass(frozen=True)
class GainParameters:
    """Gain-model coefficients; rates in 1/um, ``L`` in um."""

    eps_g: complex = matched_eps_l() / CELL_LENGTH_UM
    a_d: complex = 0.0
    a_pp: complex = 0.0
    a_cc: complex = 0.0
    a_cp: complex = matched_eps_l() / CELL_LENGTH_UM
    L: float = CELL_LENGTH_UM
    mismatch_in_eigenvalue: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L >= 0):
            raise ValueError(f"interaction length must be non-negative, got {self.L!r}")
        for name in ("eps_g", "a_d", "a_pp", "a_cc", "a_cp"):
            object.__setattr__(self, name, complex(getattr(self, name)))


# Gains are evaluated in extended precision and rounded once, so that identities
# such as g_pr - g_conj = 1 hold to about one ulp of the (large) gains.
_CX = np.clongdouble


def _terms(dk, p: GainParameters):
    dk = np.asarray(dk, dtype=float).astype(np.longdouble)
    eps_g, a_d, a_pp, a_cc = (_CX(v) for v in (p.eps_g, p.a_d, p.a_pp, p.a_cc))
    L = np.longdouble(p.L)
    da = (a_pp - a_cc + _CX(1j) * dk) / 2
    if p.mismatch_in_eigenvalue:
        a = a_d - _CX(0.5j) * dk
        eps = np.sqrt(eps_g * eps_g - a_d * a_d + a * a)
    else:
        a = np.full(dk.shape, a_d, dtype=_CX)
        eps = np.full(dk.shape, eps_g, dtype=_CX)
    # cosh and sinh(x)/x are even in x, so the square-root branch is irrelevant
    x = eps * L
    return np.exp(da * L), np.cosh(x), L * _sinhc(x), a


def gain_probe(dk, p: GainParameters):
    """Probe power gain at phase mismatch ``dk`` (rad/um)."""
    env, ch, sh_over_eps, a = _terms(dk, p)
    g = (np.abs(env * (ch + a * sh_over_eps)) ** 2).astype(float)
    return g if g.ndim else float(g)


def gain_conjugate(dk, p: GainParameters):
    """Conjugate generation efficiency at phase mismatch ``dk`` (rad/um)."""
    env, _, sh_over_eps, _ = _terms(dk, p)
    g = (np.abs(env * _CX(p.a_cp) * sh_over_eps) ** 2).astype(float)
    return g if g.ndim else float(g)


class DkModelKind(str, enum.Enum):
    RADIAL_QUADRATIC = "radial-quadratic"
    EXTERNAL = "external"


@dataclass(frozen=True)
class RadialQuadratic:
    """``dk = kappa (theta^2 - theta_pm^2) / 2`` with ``theta = rho / z``.

    ``z`` is the distance from the gain region to the plane of the map and
    ``(x0, y0)`` the point the cone is centred on. A free-space geometry with
    ``kappa = 2k`` gives the small-angle longitudinal mismatch ``k (theta^2 - theta_pm^2)``.
    """

    theta_pm: float = math.radians(1.0)
    kappa: float = 2.0 * 2.0 * math.pi / 0.795
    z: float = 300_000.0
    x0: float = 0.0
    y0: float = 0.0

    kind = DkModelKind.RADIAL_QUADRATIC

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError("z must be positive")
        if self.theta_pm < 0:
            raise ValueError("theta_pm must be non-negative")

    def dk(self, grid: GridSpec) -> np.ndarray:
        theta = grid.radius(self.x0, self.y0) / self.z
        return 0.5 * self.kappa * (theta**2 - self.theta_pm**2)

    def theta(self, grid: GridSpec) -> np.ndarray:
        return grid.radius(self.x0, self.y0) / self.z


@dataclass(frozen=True)
class ExternalDk:
    values: np.ndarray = field(repr=False)

    kind = DkModelKind.EXTERNAL

    def dk(self, grid: GridSpec) -> np.ndarray:
        v = np.asarray(self.values, dtype=float)
        if v.shape != grid.shape:
            raise ValueError(f"external dk map shape {v.shape} does not match grid {grid.shape}")
        return v


@dataclass(frozen=True)
class PhaseMismatchMap:
    grid: GridSpec
    dk: np.ndarray = field(repr=False)
    model: RadialQuadratic | ExternalDk


def build_dk_map(grid: GridSpec, model: RadialQuadratic | ExternalDk) -> PhaseMismatchMap:
    dk = np.array(model.dk(grid), dtype=float)
    dk.setflags(write=False)
    return PhaseMismatchMap(grid, dk, model)


def soft_aperture_mask(dkmap: PhaseMismatchMap, p: GainParameters, which: str = "probe") -> np.ndarray:
    """Gain over the map divided by its maximum, so the peak transmission is exactly 1."""
    if which not in ("probe", "conjugate"):
        raise ValueError(f"which must be 'probe' or 'conjugate', got {which!r}")
    # overflow is reported below as a FloatingPointError
    with np.errstate(over="ignore", invalid="ignore"):
        g = (gain_probe if which == "probe" else gain_conjugate)(dkmap.dk, p)
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("gain is not finite over the phase-mismatch map")
    peak = g.flat[int(np.argmax(g))]
    if peak <= 0:
        raise ZeroDivisionError("gain vanishes over the whole map; cannot normalise")
    return g / peak


def apply_soft_aperture(intensity, mask) -> np.ndarray:
    intensity = np.asarray(intensity, dtype=float)
    mask = np.asarray(mask, dtype=float)
    if intensity.shape != mask.shape:
        raise ValueError(f"shape mismatch: intensity {intensity.shape}, mask {mask.shape}")
    return intensity * mask


def half_max_band(dkmap: PhaseMismatchMap, mask: np.ndarray, nbins: int = 2048) -> tuple[float, float]:
    """Angular band ``(theta_lo, theta_hi)`` in which the radially binned mask is at least 1/2.

    Only meaningful for :class:`RadialQuadratic` maps. The band is the
    contiguous run of bins around the mask maximum.
    """
    model = dkmap.model
    if not isinstance(model, RadialQuadratic):
        raise TypeError("half-maximum band needs a radial dk model")
    theta = model.theta(dkmap.grid).ravel()
    m = np.asarray(mask, dtype=float).ravel()
    edges = np.linspace(0.0, theta.max(), nbins + 1)
    idx = np.clip(np.digitize(theta, edges) - 1, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    prof = np.bincount(idx, weights=m, minlength=nbins)
    filled = counts > 0
    prof[filled] /= counts[filled]
    peak = int(np.argmax(np.where(filled, prof, -1.0)))
    lo = hi = peak
    while lo > 0 and (not filled[lo - 1] or prof[lo - 1] >= 0.5):
        lo -= 1
    while hi < nbins - 1 and (not filled[hi + 1] or prof[hi + 1] >= 0.5):
        hi += 1
    return float(edges[lo]), float(edges[hi + 1])
