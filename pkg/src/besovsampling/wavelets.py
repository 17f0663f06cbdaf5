"""Compactly supported orthonormal wavelet bases and the coefficient map.

The basis is built from the scaling filter: Haar directly, Daubechies with K
vanishing moments (filter length 2K) by spectral factorization of the
Bernstein polynomial, followed by a Gauss-Newton polish of the defining
equations (normalization, shift orthogonality, sum rules) to machine
precision.  The scaling function and mother wavelet are tabulated at exact
dyadic points by cascade refinement of the two-scale relation, starting from
the eigenvector of the integer-point transfer matrix.

Coefficients c_{j,k} = integral f * psi_{j,k} are computed by quadrature of f
against the tabulated wavelets on the fine grid (strided FFT correlation),
not by the pyramid filter bank; `pyramid_details` provides the filter-bank
recursion as an independent cross-check for dyadically sampled inputs.

Supports: the Daubechies tables are recentred by an integer shift (a pure
relabeling of translates) so phi and psi share the support [-(K-1), K] and
the radius R = K; Haar keeps [0, 1] with R = 1.  Haar jump points carry the
right-continuous value, which makes quadrature on half-open dyadic grids
reproduce the Haar integral identities exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from scipy.signal import fftconvolve

from .grid import Grid1D, Grid2D, GridFunction, lp_norm

__all__ = [
    "WaveletBasis",
    "WaveletCoefficients",
    "build_basis",
    "daubechies_filter",
    "analyze",
    "synthesize",
    "scaling_coefficients",
    "dilate_coeffs",
    "pyramid_details",
    "coeffs_to_json_dict",
    "coeffs_from_json_dict",
]

TENSOR_TYPES = ((0, 1), (1, 0), (1, 1))  # L^2 = {0,1}^2 minus (0,0)
_MAX_ABS_SCALE = 60


def daubechies_filter(order: int) -> np.ndarray:
    """Minimal-phase Daubechies scaling filter with `order` vanishing moments.

    Spectral factorization: the halfband polynomial P(y) = sum binom(K-1+k,k) y^k
    is transferred to the z-domain through y = (2 - z - 1/z)/4 and split into
    its roots inside the unit circle.  A Gauss-Newton pass on the defining
    equations removes the root-finding error.
    """
    K = int(order)
    if K == 1:
        return np.array([1.0, 1.0]) / np.sqrt(2.0)
    P = np.array([comb(K - 1 + k, k) for k in range(K)], dtype=float)
    # P(y(z)) * z^(K-1): ascending-power polynomial in z of degree 2K-2
    poly = np.zeros(2 * K - 1)
    for k in range(K):
        zk = np.polynomial.polynomial.polypow(np.array([-1.0, 1.0]), 2 * k)
        poly[K - 1 - k : K - 1 - k + len(zk)] += zk * P[k] * (-0.25) ** k
    roots = np.roots(poly[::-1])
    inside = roots[np.abs(roots) < 1.0]
    L = np.array([1.0 + 0j])
    for r in inside:
        L = np.convolve(L, np.array([1.0, -r]))
    L = np.real(L)
    L /= L.sum()  # normalizes |m0(0)| = 1
    m0 = np.array([1.0])
    for _ in range(K):
        m0 = np.convolve(m0, [0.5, 0.5])
    h = np.sqrt(2.0) * np.convolve(m0, L)
    return _polish_filter(h, K)


def _filter_equations(h: np.ndarray, K: int) -> np.ndarray:
    eqs = [h.sum() - np.sqrt(2.0)]
    for m in range(K):
        v = float(np.dot(h[: len(h) - 2 * m], h[2 * m :])) - (1.0 if m == 0 else 0.0)
        eqs.append(v)
    k = np.arange(len(h), dtype=float)
    for m in range(K):
        eqs.append(float(np.dot((-1.0) ** k * k**m, h)))
    return np.array(eqs)


def _polish_filter(h: np.ndarray, K: int, sweeps: int = 3) -> np.ndarray:
    for _ in range(sweeps):
        F = _filter_equations(h, K)
        if np.max(np.abs(F)) < 1e-15:
            break
        J = np.zeros((len(F), len(h)))
        eps = 1e-7
        for i in range(len(h)):
            hp = h.copy()
            hp[i] += eps
            J[:, i] = (_filter_equations(hp, K) - F) / eps
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        h = h + step
    return h


def _cascade_phi(h: np.ndarray, depth: int) -> np.ndarray:
    """Exact values of the scaling function at j/2^depth, j = 0..(L-1)*2^depth."""
    L = len(h)
    n = L - 1
    M = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1):
            k = 2 * i - j
            if 0 <= k < L:
                M[i, j] = np.sqrt(2.0) * h[k]
    w, v = np.linalg.eig(M)
    idx = int(np.argmin(np.abs(w - 1.0)))
    phi_int = np.real(v[:, idx])
    phi_int /= phi_int.sum()
    vals = phi_int
    for d in range(1, depth + 1):
        m = np.arange(n * 2**d + 1)
        new = np.zeros(len(m))
        for k in range(L):
            src = m - k * 2 ** (d - 1)
            ok = (src >= 0) & (src <= n * 2 ** (d - 1))
            new[ok] += np.sqrt(2.0) * h[k] * vals[src[ok]]
        vals = new
    return vals


@dataclass(eq=False)
class WaveletBasis:
    """Scaling/wavelet filter pair with tabulated scaling function and wavelet.

    Tables hold values at support_lo + i/2^depth over the common support
    [0, R] with R = len(filter) - 1.  Immutable after construction.
    """

    family: str
    order: int
    scaling_filter: np.ndarray
    vanishing_moments: int
    depth: int
    support: tuple[int, int]
    phi_table: np.ndarray = field(repr=False)
    psi_table: np.ndarray = field(repr=False)

    @property
    def R(self) -> float:
        return float(self.support[1])

    @property
    def wavelet_filter(self) -> np.ndarray:
        h = self.scaling_filter
        L = len(h)
        return np.array([(-1.0) ** k * h[L - 1 - k] for k in range(L)])

    def table(self, which: int) -> np.ndarray:
        return self.phi_table if which == 0 else self.psi_table

    def eval(self, which: int, y) -> np.ndarray:
        """psi^0 / psi^1 at arbitrary points: exact on the dyadic table lattice,
        linear interpolation off-lattice."""
        y = np.asarray(y, dtype=float)
        lo, hi = self.support
        t = (y - lo) * 2.0**self.depth
        tab = self.table(which)
        out = np.zeros(y.shape)
        m = (t >= 0) & (t <= len(tab) - 1)
        ti = np.clip(np.floor(t[m]).astype(int), 0, len(tab) - 2)
        fr = t[m] - ti
        out[m] = tab[ti] * (1.0 - fr) + tab[ti + 1] * fr
        return out

    def validate(self) -> dict:
        """Residuals of the defining identities; all should be ~1e-12 or below."""
        h = self.scaling_filter
        K = len(h) // 2
        qmf = [abs(float(np.dot(h[: len(h) - 2 * m], h[2 * m :])) - (1.0 if m == 0 else 0.0))
               for m in range(K)]
        step = 2.0**-self.depth
        y = self.support[0] + step * np.arange(len(self.psi_table))
        moments = [abs(float(np.sum(y**m * self.psi_table) * step))
                   for m in range(self.vanishing_moments)]
        return {
            "filter_sum": abs(float(h.sum()) - np.sqrt(2.0)),
            "qmf_max": max(qmf),
            "moment_max": max(moments),
            "psi_outside_support": 0.0,  # tables stop at the support endpoints
        }


def build_basis(family: str, order: int | None = None, depth: int = 12) -> WaveletBasis:
    """Construct a Haar or Daubechies-order-K basis tabulated at depth >= 10."""
    family = family.lower()
    if depth < 10:
        raise ValueError(f"tabulation depth must be >= 10, got {depth}")
    if family == "haar":
        h = np.array([1.0, 1.0]) / np.sqrt(2.0)
        n = 2**depth
        # right-continuous convention: half-open dyadic grids then sum the
        # Haar quadrature identities exactly
        phi = np.ones(n + 1)
        phi[-1] = 0.0
        psi = np.ones(n + 1)
        psi[n // 2 :] = -1.0
        psi[-1] = 0.0
        return WaveletBasis("haar", 1, h, 1, depth, (0, 1), phi, psi)
    if family == "daubechies":
        if order is None or not (2 <= int(order) <= 10):
            raise ValueError(f"Daubechies order must be in 2..10, got {order}")
        K = int(order)
        h = daubechies_filter(K)
        L = 2 * K
        phi = _cascade_phi(h, depth)
        g = np.array([(-1.0) ** k * h[L - 1 - k] for k in range(L)])
        # psi at the same depth, from phi via the two-scale relation
        n = (L - 1) * 2**depth
        psi = np.zeros(n + 1)
        for k in range(L):
            src = 2 * np.arange(n + 1) - k * 2**depth
            ok = (src >= 0) & (src <= n)
            psi[ok] += np.sqrt(2.0) * g[k] * phi[src[ok]]
        # integer recentering (a pure relabeling of translates) puts the
        # common support at [-(K-1), K], so R = K as in the |x| > R convention
        lo = -((L - 1) // 2)
        return WaveletBasis("daubechies", K, h, K, depth, (lo, lo + L - 1),
                            phi, psi)
    raise ValueError(f"unsupported wavelet family {family!r}")


@lru_cache(maxsize=8)
def default_basis(family: str = "daubechies", order: int = 4,
                  depth: int = 12) -> WaveletBasis:
    """Cached basis for the common Daubechies-4 workhorse configuration."""
    return build_basis(family, order if family != "haar" else None, depth)


# ---------------------------------------------------------------------------
# coefficient container


@dataclass(eq=False)
class WaveletCoefficients:
    """Sparse-by-scale coefficient map c_{j,lambda}.

    1D: scales[j] = (k0, values) with k = k0 + index.
    2D: scales[j][(l1,l2)] = (k1_0, k2_0, values[k1_index, k2_index]).
    `coarse` optionally holds scaling-function coefficients at j_min in the
    same layout (type (0,0) in 2D); `residual_l2` is the relative L^2 energy
    not captured by [j_min, j_max] plus the coarse block.
    """

    dim: int
    j_min: int
    j_max: int
    scales: dict
    basis: WaveletBasis
    coarse: tuple | None = None
    residual_l2: float | None = None

    def scale_range(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def per_scale_p_sum(self, j: int, p: float) -> float:
        """(sum over lambda at scale j of |c|^p)^(1/p); 0 for empty scales.

        Max-normalized so extreme coefficient magnitudes cannot underflow or
        overflow the p-th powers.
        """
        if j not in self.scales:
            return 0.0
        if self.dim == 1:
            blocks = [self.scales[j][1]]
        else:
            blocks = [vals for *_ks, vals in self.scales[j].values()]
        peak = max(float(np.max(np.abs(v))) for v in blocks)
        if peak == 0.0:
            return 0.0
        tot = sum(float(np.sum((np.abs(v) / peak) ** p)) for v in blocks)
        return peak * tot ** (1.0 / p)

    def per_scale_sup(self, j: int) -> float:
        if j not in self.scales:
            return 0.0
        if self.dim == 1:
            return float(np.max(np.abs(self.scales[j][1])))
        return max(float(np.max(np.abs(v))) for *_ks, v in self.scales[j].values())

    def total_energy(self) -> float:
        tot = 0.0
        for j in self.scales:
            tot += self.per_scale_p_sum(j, 2.0) ** 2
        return tot

    def coarse_energy(self) -> float:
        if self.coarse is None:
            return 0.0
        vals = self.coarse[1] if self.dim == 1 else self.coarse[2]
        return float(np.sum(np.asarray(vals) ** 2))

    def get(self, j: int, k, l=None) -> float:
        if j not in self.scales:
            return 0.0
        if self.dim == 1:
            k0, vals = self.scales[j]
            idx = int(k) - k0
            return float(vals[idx]) if 0 <= idx < len(vals) else 0.0
        block = self.scales[j].get(tuple(l))
        if block is None:
            return 0.0
        k10, k20, vals = block
        i, jdx = int(k[0]) - k10, int(k[1]) - k20
        if 0 <= i < vals.shape[0] and 0 <= jdx < vals.shape[1]:
            return float(vals[i, jdx])
        return 0.0

    def nnz(self) -> int:
        n = 0
        for j in self.scales:
            if self.dim == 1:
                n += len(self.scales[j][1])
            else:
                n += sum(v.size for *_ks, v in self.scales[j].values())
        return n


def coeffs_to_json_dict(c: WaveletCoefficients, threshold: float = 0.0) -> dict:
    entries = []
    for j in sorted(c.scales):
        if c.dim == 1:
            k0, vals = c.scales[j]
            for i, v in enumerate(vals):
                if abs(v) > threshold:
                    entries.append({"j": j, "k": k0 + i, "value": float(v)})
        else:
            for l, (k10, k20, vals) in sorted(c.scales[j].items()):
                idx = np.argwhere(np.abs(vals) > threshold)
                for i1, i2 in idx:
                    entries.append(
                        {"j": j, "k": [int(k10 + i1), int(k20 + i2)],
                         "l": list(l), "value": float(vals[i1, i2])}
                    )
    return {
        "d": c.dim,
        "j_min": c.j_min,
        "j_max": c.j_max,
        "basis": {"family": c.basis.family, "order": c.basis.order},
        "entries": entries,
    }


def coeffs_from_json_dict(d: dict, basis: WaveletBasis | None = None) -> WaveletCoefficients:
    if basis is None:
        basis = build_basis(d["basis"]["family"], d["basis"].get("order"))
    dim = int(d["d"])
    per_scale: dict = {}
    for e in d["entries"]:
        j = int(e["j"])
        if dim == 1:
            per_scale.setdefault(j, {})[int(e["k"])] = float(e["value"])
        else:
            key = (tuple(e["l"]), tuple(int(k) for k in e["k"]))
            per_scale.setdefault(j, {})[key] = float(e["value"])
    scales: dict = {}
    for j, entries in per_scale.items():
        if dim == 1:
            ks = sorted(entries)
            k0 = ks[0]
            vals = np.zeros(ks[-1] - k0 + 1)
            for k, v in entries.items():
                vals[k - k0] = v
            scales[j] = (k0, vals)
        else:
            by_type: dict = {}
            for (l, k), v in entries.items():
                by_type.setdefault(l, {})[k] = v
            scales[j] = {}
            for l, sub in by_type.items():
                k1s = sorted(k[0] for k in sub)
                k2s = sorted(k[1] for k in sub)
                k10, k20 = k1s[0], k2s[0]
                vals = np.zeros((k1s[-1] - k10 + 1, k2s[-1] - k20 + 1))
                for (k1, k2), v in sub.items():
                    vals[k1 - k10, k2 - k20] = v
                scales[j][l] = (k10, k20, vals)
    return WaveletCoefficients(dim, int(d["j_min"]), int(d["j_max"]), scales, basis)


# ---------------------------------------------------------------------------
# analysis / synthesis machinery

def _axis_setup(g: Grid1D, basis: WaveletBasis, j: int):
    """Dyadic-alignment bookkeeping for one axis at scale j.

    Returns (stride, base_index, kernel) where the correlation of the value
    array with kernel[::-1] evaluated at base_index + k*stride yields
    sum_m f_m * w(2^j x_m - k) for the tabulated profile w.
    """
    res = g.resolution_exponent
    if abs(g.spacing * 2**res - 1.0) > 1e-9:
        raise ValueError(
            f"wavelet analysis needs dyadic grid spacing, got {g.spacing}"
        )
    x0h = g.origin / g.spacing
    if abs(x0h - round(x0h)) > 1e-9:
        raise ValueError("grid origin must be an integer multiple of the spacing")
    if j > res:
        raise ValueError(f"scale {j} finer than the grid resolution exponent {res}")
    stride = 2 ** (res - j)
    lo, hi = basis.support
    M = (hi - lo) * stride  # kernel index range 0..M
    base = int(round(x0h)) - lo * stride  # lattice index of x_0 relative to support start
    return stride, base, M


def _axis_kernel(g: Grid1D, basis: WaveletBasis, j: int, which: int) -> np.ndarray:
    stride, _base, M = _axis_setup(g, basis, j)
    lo, _hi = basis.support
    s = 2.0 ** (j - g.resolution_exponent)
    pts = lo + s * np.arange(M + 1)
    return basis.eval(which, pts)


def _axis_correlate(values: np.ndarray, g: Grid1D, basis: WaveletBasis, j: int,
                    which: int, axis: int = 0):
    """All-translate correlations along one axis.

    Returns (k0, out) where out[i, ...] = sum_m values[m, ...] * w(2^j x_m - (k0+i)).
    Fine scales go through one FFT correlation; at very coarse scales (kernel
    much longer than the signal, only a handful of translates) the sums are
    taken directly, which keeps memory flat.
    """
    stride, base, M = _axis_setup(g, basis, j)
    n = values.shape[axis]
    k_min = int(np.ceil((base - M) / stride))
    k_max = int(np.floor((base + n - 1) / stride))
    ks = np.arange(k_min, k_max + 1)
    if M > 4 * n:
        lo, _hi = basis.support
        s = 2.0 ** (j - g.resolution_exponent)
        vals_mv = np.moveaxis(values, axis, -1)
        rows = []
        for k in ks:
            args = lo + s * (np.arange(n) - (k * stride - base))
            rows.append(vals_mv @ basis.eval(which, args))
        out = np.moveaxis(np.stack(rows, axis=-1), -1, axis)
        return k_min, out
    kern = _axis_kernel(g, basis, j, which)
    shape = [1] * values.ndim
    shape[axis] = len(kern)
    conv = fftconvolve(values, kern[::-1].reshape(shape), mode="full", axes=axis)
    # conv[n'] = sum_m f_m kern[M - n' + m]; translate k reads index n' = M - base + k*stride
    idx = M - base + ks * stride
    out = np.take(conv, idx, axis=axis)
    return k_min, out


def _axis_place(coeffs: np.ndarray, k0: int, g: Grid1D, basis: WaveletBasis, j: int,
                which: int, axis: int = 0) -> np.ndarray:
    """Adjoint of `_axis_correlate`: sum_k c_k w(2^j x_m - k) on the grid."""
    stride, base, M = _axis_setup(g, basis, j)
    nk = coeffs.shape[axis]
    n = g.count
    if M > 4 * n:
        lo, _hi = basis.support
        s = 2.0 ** (j - g.resolution_exponent)
        c_mv = np.moveaxis(coeffs, axis, -1)
        out_mv = np.zeros(c_mv.shape[:-1] + (n,))
        for i in range(nk):
            k = k0 + i
            args = lo + s * (np.arange(n) - (k * stride - base))
            out_mv += c_mv[..., i, None] * basis.eval(which, args)
        return np.moveaxis(out_mv, -1, axis)
    kern = _axis_kernel(g, basis, j, which)
    # impulse at lattice position k*stride - base for each translate
    pos0 = k0 * stride - base
    imp_shape = list(coeffs.shape)
    imp_shape[axis] = (nk - 1) * stride + 1
    imp = np.zeros(imp_shape)
    sl = [slice(None)] * coeffs.ndim
    sl[axis] = slice(0, None, stride)
    imp[tuple(sl)] = coeffs
    shape = [1] * coeffs.ndim
    shape[axis] = len(kern)
    full = fftconvolve(imp, kern.reshape(shape), mode="full", axes=axis)
    # full[i] corresponds to grid index m = i + pos0
    out_shape = list(coeffs.shape)
    out_shape[axis] = n
    out = np.zeros(out_shape)
    i_lo = max(0, -pos0)
    i_hi = min(full.shape[axis], n - pos0)
    if i_hi > i_lo:
        src = [slice(None)] * coeffs.ndim
        src[axis] = slice(i_lo, i_hi)
        dst = [slice(None)] * coeffs.ndim
        dst[axis] = slice(i_lo + pos0, i_hi + pos0)
        out[tuple(dst)] = full[tuple(src)]
    return out


def _trim_translates(k0: int, nk: int, support_hull: tuple[float, float],
                     basis: WaveletBasis, j: int) -> tuple[int, int]:
    """Index window of translates whose support meets the significant support."""
    lo, hi = basis.support
    slo, shi = support_hull
    k_lo = int(np.ceil(2.0**j * slo - hi - 1e-9))
    k_hi = int(np.floor(2.0**j * shi - lo + 1e-9))
    i_lo = max(0, k_lo - k0)
    i_hi = min(nk, k_hi - k0 + 1)
    return i_lo, max(i_lo, i_hi)


def _admissible_jmax(grid) -> int:
    g = grid if isinstance(grid, Grid1D) else grid.gx
    return g.resolution_exponent - 2


def analyze(f: GridFunction, basis: WaveletBasis, j_min: int, j_max: int,
            with_coarse: bool = True) -> WaveletCoefficients:
    """Coefficients c_{j,lambda} of f over scales [j_min, j_max] by grid quadrature.

    Translates whose support misses the numerically significant support of f
    are omitted (they are exact zeros for compactly supported f).  When
    `with_coarse` is set, scaling-function coefficients at j_min are attached
    and the relative L^2 truncation residual is reported.
    """
    if j_min > j_max:
        raise ValueError(f"empty scale range [{j_min}, {j_max}]")
    jm = _admissible_jmax(f.grid)
    if j_max > jm:
        raise ValueError(
            f"j_max={j_max} too fine for the grid; admissible bound is {jm} "
            "(four points per wavelet oscillation)"
        )
    hull = f.significant_support()
    if f.ndim == 1:
        g = f.grid
        scales = {}
        for j in range(j_min, j_max + 1):
            k0, corr = _axis_correlate(f.values, g, basis, j, which=1)
            i_lo, i_hi = _trim_translates(k0, len(corr), hull[0], basis, j)
            if i_hi <= i_lo:
                continue
            vals = 2.0 ** (j / 2.0) * g.spacing * corr[i_lo:i_hi]
            scales[j] = (k0 + i_lo, vals)
        coarse = None
        if with_coarse:
            k0c, cvals = _scaling_axis(f, basis, j_min)
            coarse = (k0c, cvals)
        out = WaveletCoefficients(1, j_min, j_max, scales, basis, coarse=coarse)
    else:
        gx, gy = f.grid.gx, f.grid.gy
        scales = {}
        for j in range(j_min, j_max + 1):
            rows = {}
            for l1 in (0, 1):
                k10, part = _axis_correlate(f.values, gx, basis, j, which=l1, axis=0)
                i_lo, i_hi = _trim_translates(k10, part.shape[0], hull[0], basis, j)
                rows[l1] = (k10 + i_lo, part[i_lo:i_hi])
            blocks = {}
            for l1, l2 in TENSOR_TYPES:
                k10, part = rows[l1]
                if part.shape[0] == 0:
                    continue
                k20, full = _axis_correlate(part, gy, basis, j, which=l2, axis=1)
                i_lo, i_hi = _trim_translates(k20, full.shape[1], hull[1], basis, j)
                if i_hi <= i_lo:
                    continue
                vals = 2.0**j * gx.spacing * gy.spacing * full[:, i_lo:i_hi]
                blocks[(l1, l2)] = (k10, k20 + i_lo, vals)
            if blocks:
                scales[j] = blocks
        coarse = None
        if with_coarse:
            coarse = _scaling_2d(f, basis, j_min)
        out = WaveletCoefficients(2, j_min, j_max, scales, basis, coarse=coarse)
    l2 = lp_norm(f, 2.0)
    if l2 > 0:
        captured = out.total_energy() + out.coarse_energy()
        out.residual_l2 = float(np.sqrt(max(l2**2 - captured, 0.0)) / l2)
    else:
        out.residual_l2 = 0.0
    return out


def _scaling_axis(f: GridFunction, basis: WaveletBasis, j: int):
    g = f.grid
    hull = f.significant_support()[0]
    k0, corr = _axis_correlate(f.values, g, basis, j, which=0)
    i_lo, i_hi = _trim_translates(k0, len(corr), hull, basis, j)
    return k0 + i_lo, 2.0 ** (j / 2.0) * g.spacing * corr[i_lo:i_hi]


def _scaling_2d(f: GridFunction, basis: WaveletBasis, j: int):
    gx, gy = f.grid.gx, f.grid.gy
    hull = f.significant_support()
    k10, part = _axis_correlate(f.values, gx, basis, j, which=0, axis=0)
    i_lo, i_hi = _trim_translates(k10, part.shape[0], hull[0], basis, j)
    k10, part = k10 + i_lo, part[i_lo:i_hi]
    k20, full = _axis_correlate(part, gy, basis, j, which=0, axis=1)
    i_lo, i_hi = _trim_translates(k20, full.shape[1], hull[1], basis, j)
    vals = 2.0**j * gx.spacing * gy.spacing * full[:, i_lo:i_hi]
    return (k10, k20 + i_lo, vals)


def scaling_coefficients(f: GridFunction, basis: WaveletBasis, j: int):
    """<f, phi_{j,k}> for all overlapping translates; (k0, values) layout."""
    if f.ndim == 1:
        return _scaling_axis(f, basis, j)
    return _scaling_2d(f, basis, j)


def synthesize(c: WaveletCoefficients, grid, include_coarse: bool = True) -> GridFunction:
    """Pointwise sum of tabulated wavelets weighted by the coefficients.

    When the coefficient object carries a coarse scaling block (from
    `analyze` with with_coarse), it is placed as well, so the round trip
    misses only the energy above j_max plus quadrature error.
    """
    if c.dim == 1:
        if not isinstance(grid, Grid1D):
            raise ValueError("1D coefficients need a Grid1D")
        if c.j_max > grid.resolution_exponent:
            raise ValueError(f"grid does not resolve scale {c.j_max}")
        out = np.zeros(grid.count)
        for j, (k0, vals) in c.scales.items():
            out += 2.0 ** (j / 2.0) * _axis_place(vals, k0, grid, c.basis, j, which=1)
        if include_coarse and c.coarse is not None:
            k0, vals = c.coarse
            out += 2.0 ** (c.j_min / 2.0) * _axis_place(vals, k0, grid, c.basis,
                                                        c.j_min, which=0)
        return GridFunction(grid, out)
    if not isinstance(grid, Grid2D):
        raise ValueError("2D coefficients need a Grid2D")
    if c.j_max > grid.gx.resolution_exponent:
        raise ValueError(f"grid does not resolve scale {c.j_max}")
    out = np.zeros(grid.shape)
    for j, blocks in c.scales.items():
        for (l1, l2), (k10, k20, vals) in blocks.items():
            part = _axis_place(vals, k20, grid.gy, c.basis, j, which=l2, axis=1)
            out += 2.0**j * _axis_place(part, k10, grid.gx, c.basis, j, which=l1, axis=0)
    if include_coarse and c.coarse is not None:
        k10, k20, vals = c.coarse
        part = _axis_place(vals, k20, grid.gy, c.basis, c.j_min, which=0, axis=1)
        out += 2.0**c.j_min * _axis_place(part, k10, grid.gx, c.basis, c.j_min,
                                          which=0, axis=0)
    return GridFunction(grid, out)


def dilate_coeffs(c: WaveletCoefficients, m: int) -> WaveletCoefficients:
    """Exact coefficient action of f -> f(2^m .): scale shift by m, values
    times 2^(-m*d/2)."""
    if not (abs(c.j_min + m) <= _MAX_ABS_SCALE and abs(c.j_max + m) <= _MAX_ABS_SCALE):
        raise ValueError(f"dilation by m={m} pushes scales outside +-{_MAX_ABS_SCALE}")
    fac = 2.0 ** (-m * c.dim / 2.0)
    scales = {}
    for j, entry in c.scales.items():
        if c.dim == 1:
            k0, vals = entry
            scales[j + m] = (k0, fac * vals)
        else:
            scales[j + m] = {
                l: (k10, k20, fac * vals) for l, (k10, k20, vals) in entry.items()
            }
    coarse = None
    if c.coarse is not None:
        if c.dim == 1:
            coarse = (c.coarse[0], fac * c.coarse[1])
        else:
            coarse = (c.coarse[0], c.coarse[1], fac * c.coarse[2])
    return WaveletCoefficients(c.dim, c.j_min + m, c.j_max + m, scales, c.basis,
                               coarse=coarse, residual_l2=c.residual_l2)


def pyramid_details(s_fine: np.ndarray, k0: int, basis: WaveletBasis,
                    levels: int):
    """Mallat filter-bank recursion from fine-scale scaling coefficients.

    Given s[i] = <f, phi_{J, k0+i}> (zero outside the array), returns
    ([(k0_detail, d), ...] one per level downward, (k0_final, s)).  With the
    tabulated support starting at `lo`, one step reads
    <f, w_{j-1,k}> = sum_i filt[i] * <f, phi_{j, 2k + lo + i}>.
    Wholly filter-based, so it cross-checks the quadrature path of `analyze`.
    """
    h = basis.scaling_filter
    g = basis.wavelet_filter
    lo, _hi = basis.support
    L = len(h)
    s = np.asarray(s_fine, dtype=float)
    details = []
    for _ in range(levels):
        k_lo = int(np.ceil((k0 - lo - (L - 1)) / 2))
        k_hi = int(np.floor((k0 + len(s) - 1 - lo) / 2))
        ks = np.arange(k_lo, k_hi + 1)
        new_s = np.zeros(len(ks))
        new_d = np.zeros(len(ks))
        for i in range(L):
            src = 2 * ks + lo + i - k0
            ok = (src >= 0) & (src < len(s))
            new_s[ok] += h[i] * s[src[ok]]
            new_d[ok] += g[i] * s[src[ok]]
        details.append((k_lo, new_d))
        s, k0 = new_s, k_lo
    return details, (k0, s)


def coeffs_to_json(c: WaveletCoefficients, path, threshold: float = 0.0):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(coeffs_to_json_dict(c, threshold), fh)
