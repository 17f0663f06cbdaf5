"""Uniform-grid functions, quadrature, Fourier transforms and smooth low-pass filtering.

Functions live on a large interval (1D) or square (2D) standing in for the
whole line/plane; everything downstream assumes the numerically significant
support sits well inside the window (positive support margin).

Conventions:
  * L^p norms use composite trapezoid quadrature on the uniform grid.
  * The Fourier transform carries the 2*pi in the exponent,
    F(z) = integral f(x) exp(-2*pi*i*x*z) dx, so a Gaussian exp(-pi x^2)
    is its own transform.
  * Smooth cutoffs are built from the C-infinity ramp based on exp(-1/t);
    see `smooth_ramp01`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid1D",
    "Grid2D",
    "GridFunction",
    "SpectrumFunction",
    "default_grid_1d",
    "default_grid_2d",
    "lp_norm",
    "weighted_lp_norm",
    "fourier",
    "inverse_fourier",
    "smooth_ramp01",
    "lowpass_profile",
    "smooth_lowpass",
    "save_csv",
    "load_csv",
    "to_json_dict",
    "from_json_dict",
]

_SUPPORT_RTOL = 1e-12


@dataclass
class Grid1D:
    """Uniform 1D grid: points origin + spacing*m for m = 0..count-1."""

    origin: float
    spacing: float
    count: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.count}")

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    @property
    def length(self) -> float:
        return self.spacing * (self.count - 1)

    @property
    def nyquist(self) -> float:
        return 0.5 / self.spacing

    @property
    def resolution_exponent(self) -> int:
        """Largest j with 2^-j <= spacing (exact for dyadic spacings)."""
        return int(round(-np.log2(self.spacing)))

    def index_of(self, x: float) -> float:
        return (x - self.origin) / self.spacing


@dataclass
class Grid2D:
    """Tensor grid: per-axis Grid1D pair (x runs along axis 0 of value arrays)."""

    gx: Grid1D
    gy: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gx.count, self.gy.count)

    @property
    def spacings(self) -> tuple[float, float]:
        return (self.gx.spacing, self.gy.spacing)


def default_grid_1d() -> Grid1D:
    """Default fine grid: h = 2^-10 on [-16, 16)."""
    h = 2.0**-10
    return Grid1D(-16.0, h, 32768)


def default_grid_2d() -> Grid2D:
    """Default fine grid: h = 2^-7 on [-8, 8)^2."""
    h = 2.0**-7
    g = Grid1D(-8.0, h, 2048)
    return Grid2D(g, Grid1D(-8.0, h, 2048))


class GridFunction:
    """A real-valued function tabulated on a Grid1D or Grid2D.

    Values are treated as immutable after construction. `support_margin` is
    the distance from the numerically significant support (relative threshold
    1e-12) to the domain boundary.
    """

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=float)
        if isinstance(grid, Grid1D):
            if values.shape != (grid.count,):
                raise ValueError(
                    f"value shape {values.shape} does not match 1D grid count {grid.count}"
                )
        elif isinstance(grid, Grid2D):
            if values.shape != grid.shape:
                raise ValueError(
                    f"value shape {values.shape} does not match 2D grid shape {grid.shape}"
                )
        else:
            raise TypeError(f"unsupported grid type {type(grid)!r}")
        if not np.all(np.isfinite(values)):
            bad = int(np.count_nonzero(~np.isfinite(values)))
            raise ValueError(f"grid function has {bad} non-finite values")
        self.grid = grid
        self.values = values

    @property
    def ndim(self) -> int:
        return 1 if isinstance(self.grid, Grid1D) else 2

    def copy_with(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def significant_support(self) -> tuple[tuple[float, float], ...]:
        """Per-axis hull of points where |f| exceeds 1e-12 * max|f|."""
        v = np.abs(self.values)
        peak = v.max()
        axes = (self.grid,) if self.ndim == 1 else (self.grid.gx, self.grid.gy)
        if peak == 0.0:
            return tuple((g.x[0], g.x[0]) for g in axes)
        mask = v > _SUPPORT_RTOL * peak
        hulls = []
        for axis, g in enumerate(axes):
            proj = mask if self.ndim == 1 else mask.any(axis=1 - axis)
            idx = np.nonzero(proj)[0]
            hulls.append((g.x[idx[0]], g.x[idx[-1]]))
        return tuple(hulls)

    @property
    def support_margin(self) -> float:
        axes = (self.grid,) if self.ndim == 1 else (self.grid.gx, self.grid.gy)
        margins = []
        for (lo, hi), g in zip(self.significant_support(), axes):
            margins.append(min(lo - g.x[0], g.x[-1] - hi))
        return float(min(margins))

    def interpolate(self, points) -> np.ndarray:
        """Linear (1D) / bilinear (2D) interpolation at off-grid points.

        Points outside the domain are rejected; trace evaluation depends on it.
        """
        if self.ndim == 1:
            pts = np.asarray(points, dtype=float)
            g = self.grid
            if pts.min() < g.x[0] - 1e-12 or pts.max() > g.x[-1] + 1e-12:
                raise ValueError("interpolation point outside grid domain")
            return np.interp(pts, g.x, self.values)
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        out = np.empty(len(pts))
        gx, gy = self.grid.gx, self.grid.gy
        ix = (pts[:, 0] - gx.origin) / gx.spacing
        iy = (pts[:, 1] - gy.origin) / gy.spacing
        if ix.min() < -1e-9 or ix.max() > gx.count - 1 + 1e-9:
            raise ValueError("interpolation point outside grid domain (x)")
        if iy.min() < -1e-9 or iy.max() > gy.count - 1 + 1e-9:
            raise ValueError("interpolation point outside grid domain (y)")
        i0 = np.clip(np.floor(ix).astype(int), 0, gx.count - 2)
        j0 = np.clip(np.floor(iy).astype(int), 0, gy.count - 2)
        tx = np.clip(ix - i0, 0.0, 1.0)
        ty = np.clip(iy - j0, 0.0, 1.0)
        v = self.values
        out = (
            v[i0, j0] * (1 - tx) * (1 - ty)
            + v[i0 + 1, j0] * tx * (1 - ty)
            + v[i0, j0 + 1] * (1 - tx) * ty
            + v[i0 + 1, j0 + 1] * tx * ty
        )
        return out


class SpectrumFunction:
    """Discrete spectrum of a GridFunction; frequencies in numpy fft order."""

    def __init__(self, grid, freqs, values):
        self.grid = grid
        self.freqs = freqs  # 1D array, or (fx, fy) tuple in 2D
        self.values = np.asarray(values, dtype=complex)

    @property
    def ndim(self) -> int:
        return 1 if isinstance(self.grid, Grid1D) else 2

    def energy(self) -> np.ndarray:
        """|F|^2 times the frequency cell volume (discrete Plancherel weights)."""
        if self.ndim == 1:
            dz = 1.0 / (self.grid.count * self.grid.spacing)
        else:
            dz = 1.0 / (
                self.grid.gx.count
                * self.grid.gx.spacing
                * self.grid.gy.count
                * self.grid.gy.spacing
            )
        return np.abs(self.values) ** 2 * dz

    def abs_freq(self) -> np.ndarray:
        """|zeta| per bin (euclidean norm in 2D)."""
        if self.ndim == 1:
            return np.abs(self.freqs)
        fx, fy = self.freqs
        return np.sqrt(fx[:, None] ** 2 + fy[None, :] ** 2)


def quad_weights(grid) -> np.ndarray:
    """Composite-trapezoid weights (endpoints halved); outer product in 2D."""
    if isinstance(grid, Grid1D):
        w = np.full(grid.count, grid.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w
    return np.outer(quad_weights(grid.gx), quad_weights(grid.gy))


def lp_norm(f: GridFunction, p: float) -> float:
    """Trapezoid L^p norm of f over its grid, 1 <= p < infinity."""
    if not (1.0 <= p < np.inf):
        raise ValueError(f"p must lie in [1, inf), got {p}")
    w = quad_weights(f.grid)
    return float(np.sum(w * np.abs(f.values) ** p) ** (1.0 / p))


def weighted_lp_norm(f: GridFunction, weight, p: float) -> float:
    """L^p norm of weight(x)*f(x); `weight` is a callable on coordinates or an array."""
    if not (1.0 <= p < np.inf):
        raise ValueError(f"p must lie in [1, inf), got {p}")
    if callable(weight):
        if f.ndim == 1:
            wv = np.asarray(weight(f.grid.x), dtype=float)
        else:
            X, Y = np.meshgrid(f.grid.gx.x, f.grid.gy.x, indexing="ij")
            wv = np.asarray(weight(X, Y), dtype=float)
    else:
        wv = np.asarray(weight, dtype=float)
    if wv.shape != f.values.shape:
        raise ValueError("weight shape does not match grid function")
    if not np.all(np.isfinite(wv)) or np.any(wv < 0):
        raise ValueError("weight must be nonnegative and finite on the grid")
    w = quad_weights(f.grid)
    return float(np.sum(w * (wv * np.abs(f.values)) ** p) ** (1.0 / p))


def _check_pow2(n: int, what: str):
    if n & (n - 1) != 0:
        raise ValueError(f"{what} count must be a power of two for the fast transform, got {n}")


def fourier(f: GridFunction) -> SpectrumFunction:
    """Discrete approximation of the continuous transform (2*pi convention).

    Includes the spacing factor and the origin phase, so values approximate
    F(z) = integral f exp(-2*pi*i*x*z) dx at the fft frequency bins.
    """
    if f.ndim == 1:
        g = f.grid
        _check_pow2(g.count, "grid")
        freqs = np.fft.fftfreq(g.count, g.spacing)
        vals = g.spacing * np.exp(-2j * np.pi * freqs * g.origin) * np.fft.fft(f.values)
        return SpectrumFunction(g, freqs, vals)
    gx, gy = f.grid.gx, f.grid.gy
    _check_pow2(gx.count, "x grid")
    _check_pow2(gy.count, "y grid")
    fx = np.fft.fftfreq(gx.count, gx.spacing)
    fy = np.fft.fftfreq(gy.count, gy.spacing)
    phase = np.exp(-2j * np.pi * (fx[:, None] * gx.origin + fy[None, :] * gy.origin))
    vals = gx.spacing * gy.spacing * phase * np.fft.fft2(f.values)
    return SpectrumFunction(f.grid, (fx, fy), vals)


def inverse_fourier(F: SpectrumFunction, assume_real: bool = True) -> GridFunction:
    """Invert `fourier`. With assume_real the (tiny) imaginary part is dropped."""
    if F.ndim == 1:
        g = F.grid
        spec = np.exp(2j * np.pi * F.freqs * g.origin) * F.values / g.spacing
        vals = np.fft.ifft(spec)
    else:
        gx, gy = F.grid.gx, F.grid.gy
        fx, fy = F.freqs
        phase = np.exp(2j * np.pi * (fx[:, None] * gx.origin + fy[None, :] * gy.origin))
        vals = np.fft.ifft2(phase * F.values / (gx.spacing * gy.spacing))
    if assume_real:
        vals = np.real(vals)
    else:
        vals = np.real_if_close(vals, tol=1e6)
        if np.iscomplexobj(vals):
            raise ValueError("inverse transform is substantially complex; spectrum lacks conjugate symmetry")
    return GridFunction(F.grid, np.real(vals))


def smooth_ramp01(t) -> np.ndarray:
    """C-infinity monotone ramp: 0 for t <= 0, 1 for t >= 1.

    Built from r(t) = exp(-1/t): ramp(t) = r(t) / (r(t) + r(1-t)). This exact
    profile is part of the package contract so transition-band values are
    reproducible.
    """
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        num = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        den = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return num / (num + den)


def lowpass_profile(abs_freq, inner: float, outer: float) -> np.ndarray:
    """Smooth multiplier: 1 for |z| <= inner, 0 for |z| >= outer."""
    return smooth_ramp01((outer - np.asarray(abs_freq, dtype=float)) / (outer - inner))


def smooth_lowpass(f: GridFunction, inner: float, outer: float) -> GridFunction:
    """Multiply the spectrum by the C-infinity low-pass profile (per axis in 2D)."""
    if not (0 < inner < outer):
        raise ValueError(f"need 0 < inner < outer, got inner={inner}, outer={outer}")
    F = fourier(f)
    if f.ndim == 1:
        if outer >= f.grid.nyquist * (1 + 1e-12):
            raise ValueError(f"outer={outer} exceeds Nyquist frequency {f.grid.nyquist}")
        mult = lowpass_profile(np.abs(F.freqs), inner, outer)
    else:
        nyq = min(f.grid.gx.nyquist, f.grid.gy.nyquist)
        if outer >= nyq * (1 + 1e-12):
            raise ValueError(f"outer={outer} exceeds Nyquist frequency {nyq}")
        fx, fy = F.freqs
        mult = lowpass_profile(np.abs(fx), inner, outer)[:, None] * lowpass_profile(
            np.abs(fy), inner, outer
        )[None, :]
    return inverse_fourier(SpectrumFunction(F.grid, F.freqs, F.values * mult))


# ---------------------------------------------------------------------------
# serialization

def save_csv(f: GridFunction, path):
    """CSV dump: header `x,value` (1D) or `x,y,value` (2D), 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        if f.ndim == 1:
            fh.write("x,value\n")
            for xi, vi in zip(f.grid.x, f.values):
                fh.write(f"{xi:.17g},{vi:.17g}\n")
        else:
            fh.write("x,y,value\n")
            xs, ys = f.grid.gx.x, f.grid.gy.x
            for i, xi in enumerate(xs):
                for j, yj in enumerate(ys):
                    fh.write(f"{xi:.17g},{yj:.17g},{f.values[i, j]:.17g}\n")


def load_csv(path) -> GridFunction:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    if data.shape[1] == 2:
        x, v = data[:, 0], data[:, 1]
        spacing = float(x[1] - x[0])
        grid = Grid1D(float(x[0]), spacing, len(x))
        return GridFunction(grid, v)
    if data.shape[1] == 3:
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        gx = Grid1D(float(xs[0]), float(xs[1] - xs[0]), len(xs))
        gy = Grid1D(float(ys[0]), float(ys[1] - ys[0]), len(ys))
        vals = data[:, 2].reshape(len(xs), len(ys))
        return GridFunction(Grid2D(gx, gy), vals)
    raise ValueError(f"unrecognized CSV layout with {data.shape[1]} columns")


def to_json_dict(f: GridFunction) -> dict:
    if f.ndim == 1:
        g = f.grid
        return {
            "grid": {"origin": g.origin, "spacing": g.spacing, "count": g.count},
            "values": f.values.tolist(),
        }
    gx, gy = f.grid.gx, f.grid.gy
    return {
        "grid": {
            "x": {"origin": gx.origin, "spacing": gx.spacing, "count": gx.count},
            "y": {"origin": gy.origin, "spacing": gy.spacing, "count": gy.count},
        },
        "values": f.values.reshape(-1).tolist(),
    }


def from_json_dict(d: dict) -> GridFunction:
    g = d["grid"]
    if "origin" in g:
        grid = Grid1D(g["origin"], g["spacing"], g["count"])
        return GridFunction(grid, np.asarray(d["values"]))
    gx = Grid1D(g["x"]["origin"], g["x"]["spacing"], g["x"]["count"])
    gy = Grid1D(g["y"]["origin"], g["y"]["spacing"], g["y"]["count"])
    vals = np.asarray(d["values"]).reshape(gx.count, gy.count)
    return GridFunction(Grid2D(gx, gy), vals)


def save_json(f: GridFunction, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(f), fh)


def load_json(path) -> GridFunction:
    with open(path, encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
