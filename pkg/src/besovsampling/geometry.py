"""Sampling sets: 1D irregular sequences with cells, and 2D carrier geometries.

1D sequences are strictly increasing point sets {a_n} covering a working
interval, with cells I_n = [(a_{n-1}+a_n)/2, (a_n+a_{n+1})/2] and cell
lengths b_n; boundary cells are half cells so that sum(b_n) tiles the
interval exactly.

2D geometries attach transversal cells H_a with measures nu_a = phi * dH^m
to a carrier G.  Variants:

  hyperplane-union   horizontal lines y = a_n, vertical-segment cells (m=1)
  perturbed-graph    lines bent by a bounded-slope profile, cells follow (m=1)
  curve-family       near-vertical curves pinned to x ~ b*k; discrete anchor
                     set with square cells of l-inf radius b/4 (m=2)
  concentric-circles circles |x| = r_n with radial-segment cells (m=1)
  spiral             polar graph r = rho(theta), radial-segment cells (m=1)

Carriers are discretized into anchor nodes with H^(d-m) quadrature weights
(arc length for m=1, counting for m=2); the same nodes drive trace
integrals.  Everything is trimmed to a bounded window; probes for the
condition checks stay away from a b-collar of the boundary.

Condition checks are Monte-Carlo over a recorded probe family (isotropic
Gaussian bumps of width >= b); for circles and the spiral the comparison
integral carries the weight max(1, r) dr dsigma instead of Lebesgue measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import erf, i0e

__all__ = [
    "SamplingSequence1D",
    "SamplingGeometry2D",
    "GeometryConditionsReport",
    "random_sequence",
    "regular_sequence",
    "build_geometry",
    "check_conditions",
    "cell_measures",
    "geometry_to_json_dict",
    "geometry_from_json_dict",
]

VARIANTS = (
    "hyperplane-union",
    "perturbed-graph",
    "curve-family",
    "concentric-circles",
    "spiral",
)


def window_for_grid(grid) -> tuple[float, float]:
    """Square working window matching a (half-open) 2D grid span."""
    gx, gy = grid.gx, grid.gy
    return (max(gx.x[0], gy.x[0]), min(gx.x[-1], gy.x[-1]))


# ---------------------------------------------------------------------------
# 1D sequences

@dataclass(eq=False)
class SamplingSequence1D:
    """Increasing sample points with gap bound b and the attached cells."""

    points: np.ndarray
    b: float
    strict: bool = False

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if len(self.points) < 3:
            raise ValueError("need at least 3 sample points")
        gaps = np.diff(self.points)
        if np.any(gaps <= 0):
            raise ValueError("sample points must be strictly increasing")
        if np.any(gaps > self.b * (1 + 1e-12)):
            raise ValueError(f"a gap exceeds the bound b={self.b}")
        if self.strict and np.any(gaps < self.b / 2 * (1 - 1e-12)):
            raise ValueError(f"strict mode requires gaps >= b/2={self.b / 2}")

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.points)

    @property
    def cell_lengths(self) -> np.ndarray:
        """b_n = |I_n|; half cells at the two ends so the cells tile exactly."""
        g = self.gaps
        b_n = np.empty(len(self.points))
        b_n[1:-1] = (g[:-1] + g[1:]) / 2.0
        b_n[0] = g[0] / 2.0
        b_n[-1] = g[-1] / 2.0
        return b_n

    @property
    def cells(self) -> np.ndarray:
        """Cell endpoints, shape (n, 2)."""
        p = self.points
        mids = (p[:-1] + p[1:]) / 2.0
        lo = np.concatenate([[p[0]], mids])
        hi = np.concatenate([mids, [p[-1]]])
        return np.column_stack([lo, hi])

    def rescaled(self, m: int) -> "SamplingSequence1D":
        """Dyadic rescale a_n -> 2^-m a_n (matches dilating f by 2^m)."""
        return SamplingSequence1D(self.points * 2.0**-m, self.b * 2.0**-m, self.strict)


def random_sequence(b: float, interval: tuple[float, float], seed: int,
                    strict: bool = True, lattice: float | None = None
                    ) -> SamplingSequence1D:
    """Seeded sequence covering `interval` with gaps in [b/2, b] (strict) or
    (0, b] (loose).

    The raw gaps overshoot the interval and are rescaled down onto it; strict
    draws start slightly above b/2 so the rescale never violates the lower
    bound.  With `lattice` set, points are snapped to that lattice (gaps stay
    admissible as long as lattice <= b/8), which makes downstream grid
    sampling exact.
    """
    lo, hi = float(interval[0]), float(interval[1])
    L = hi - lo
    if not (b > 0) or L < 4 * b:
        raise ValueError(f"need interval length >= 4b, got length {L}, b={b}")
    rng = np.random.default_rng(seed)
    margin = 2.0 * b / L
    gaps = []
    total = 0.0
    while total < L:
        if strict:
            g = rng.uniform(b / 2 * (1 + margin), b)
        else:
            g = rng.uniform(0.05 * b, b * (1 - margin))
        gaps.append(g)
        total += g
    gaps = np.asarray(gaps) * (L / total)
    pts = lo + np.concatenate([[0.0], np.cumsum(gaps)])
    pts[-1] = hi
    if lattice is not None:
        if lattice > b / 8:
            raise ValueError("lattice snapping needs lattice <= b/8")
        pts = np.round(pts / lattice) * lattice
        # snapping must not push the endpoints outside the working interval
        pts = np.clip(pts, math.ceil(lo / lattice - 1e-9) * lattice,
                      math.floor(hi / lattice + 1e-9) * lattice)
        pts = np.unique(pts)
    return SamplingSequence1D(pts, b, strict=strict)


def regular_sequence(b: float, interval: tuple[float, float]) -> SamplingSequence1D:
    """Arithmetic sequence with gap exactly b; interval length must be a
    multiple of b."""
    lo, hi = float(interval[0]), float(interval[1])
    n = (hi - lo) / b
    if abs(n - round(n)) > 1e-9:
        raise ValueError(f"interval length {hi - lo} is not a multiple of b={b}")
    pts = np.linspace(lo, hi, int(round(n)) + 1)
    return SamplingSequence1D(pts, b, strict=True)


# ---------------------------------------------------------------------------
# 2D geometries

@dataclass(eq=False)
class SamplingGeometry2D:
    """Discretized 2D sampling geometry.

    anchors:        (N, 2) carrier nodes
    anchor_weights: H^(d-m) quadrature weight per node (arc length for m=1,
                    1.0 for m=2)
    Cells are segments (cell_a/cell_b endpoints, m=1) or l-inf balls
    (cell_centers/cell_radius, m=2); `phi` is the constant cell density.
    `boundary_flags` marks anchors whose cell was trimmed by the window.
    """

    variant: str
    m: int
    b: float
    C0: float
    D: float
    window: tuple[float, float]
    anchors: np.ndarray
    anchor_weights: np.ndarray
    phi: float = 1.0
    C0_equiv: float | None = None
    cell_a: np.ndarray | None = None
    cell_b: np.ndarray | None = None
    cell_centers: np.ndarray | None = None
    cell_radius: float | None = None
    boundary_flags: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return 2

    def n_anchors(self) -> int:
        return len(self.anchors)

    def lattice_nodes(self) -> np.ndarray:
        """Node set Lambda_G used by averaging/reconstruction."""
        if self.params.get("drop_line") is not None:
            raise ValueError("a deliberately broken geometry has no "
                             "reconstruction lattice")
        if self.variant == "hyperplane-union":
            lo, hi = self.window
            heights = self.params["heights"]
            xs = np.arange(lo, hi + 1e-12, self.b)
            X, Y = np.meshgrid(xs, heights, indexing="ij")
            return np.column_stack([X.ravel(), Y.ravel()])
        if self.variant == "curve-family":
            return self.anchors.copy()
        raise ValueError(f"variant {self.variant!r} has no reconstruction lattice")


def _arc_nodes_on_lines(heights, window, step):
    lo, hi = window
    n = max(2, int(math.ceil((hi - lo) / step)) + 1)
    xs = np.linspace(lo, hi, n)
    w = np.full(n, (hi - lo) / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    anchors, weights, line_idx = [], [], []
    for i, y in enumerate(heights):
        anchors.append(np.column_stack([xs, np.full(n, y)]))
        weights.append(w)
        line_idx.append(np.full(n, i, dtype=int))
    return np.vstack(anchors), np.concatenate(weights), np.concatenate(line_idx), xs


def build_geometry(variant: str, params: dict) -> SamplingGeometry2D:
    """Construct a sampling geometry on the window.

    Common params: b, window=(lo, hi), seed, step (carrier quadrature step,
    default 2^-7), C0, D.  Variant-specific parameters are documented inline.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown geometry variant {variant!r}; choose from {VARIANTS}")
    b = float(params["b"])
    window = tuple(params.get("window", (-8.0, 8.0)))
    step = float(params.get("step", 2.0**-7))
    seed = params.get("seed", 0)
    lo, hi = window

    if variant in ("hyperplane-union", "perturbed-graph"):
        # heights a_n: strict random sequence unless given explicitly
        if "heights" in params:
            heights = np.asarray(params["heights"], dtype=float)
            seq = SamplingSequence1D(heights, b, strict=params.get("strict", True))
        else:
            seq = random_sequence(b, window, seed, strict=params.get("strict", True))
            heights = seq.points
        # cells span to the midlines of the neighbors, half cells at the ends;
        # clipping to the window happens after boundary flagging
        heights_full = heights.copy()
        mids = (heights[:-1] + heights[1:]) / 2.0
        y_lo = np.concatenate([[heights[0] - b / 2], mids])
        y_hi = np.concatenate([mids, [heights[-1] + b / 2]])
        drop = params.get("drop_line")
        if drop is not None:
            # deliberate defect: remove one carrier line together with its
            # cells, leaving an uncovered band (cells are NOT re-derived)
            keep = np.ones(len(heights), bool)
            keep[int(drop)] = False
            heights, y_lo, y_hi = heights[keep], y_lo[keep], y_hi[keep]
        anchors, weights, line_idx, xs = _arc_nodes_on_lines(heights, window, step)
        if variant == "perturbed-graph":
            amp = float(params.get("amp", b))
            freq = float(params.get("freq", 0.5))
            if amp * freq > float(params.get("slope_bound", 1.0)):
                raise ValueError(
                    f"perturbation slope {amp * freq} exceeds bound "
                    f"{params.get('slope_bound', 1.0)}")
            bend = amp * np.sin(freq * anchors[:, 0])
            # arc length weight for y = f(x) + a_n
            slope = amp * freq * np.cos(freq * anchors[:, 0])
            weights = weights * np.sqrt(1.0 + slope**2)
            anchors = anchors.copy()
            anchors[:, 1] = np.clip(anchors[:, 1] + bend, lo, hi)
        else:
            bend = np.zeros(len(anchors))
        raw_lo = y_lo[line_idx] + bend
        raw_hi = y_hi[line_idx] + bend
        ca = np.column_stack([anchors[:, 0], np.clip(raw_lo, lo, hi)])
        cb = np.column_stack([anchors[:, 0], np.clip(raw_hi, lo, hi)])
        flags = (raw_lo < lo) | (raw_hi > hi)  # window-trimmed cells
        g = SamplingGeometry2D(
            variant, 1, b, float(params.get("C0", 10.0)),
            float(params.get("D", 4.0)),
            window, anchors, weights, cell_a=ca, cell_b=cb,
            C0_equiv=float(params.get("C0_equiv", 1.1)),
            boundary_flags=flags,
            params={"heights": heights_full.tolist(), "seed": seed, "step": step,
                    **({k: params[k] for k in ("amp", "freq", "drop_line")
                        if params.get(k) is not None})},
        )
        return g

    if variant == "curve-family":
        # near-vertical curves x = b*k + wiggle(y), anchors at y-spacing b,
        # square cells of l-inf radius b/4 centered on the lattice x = b*k
        rng = np.random.default_rng(seed)
        # keep curves (lattice position +- wiggle b/4) inside the window
        ks = np.arange(math.ceil((lo + b / 4) / b), math.floor((hi - b / 4) / b) + 1)
        ys = np.arange(lo + b / 2, hi - b / 2 + 1e-12, b)
        anchors = []
        for k in ks:
            if params.get("straight", False):
                wig = np.zeros(len(ys))
            else:
                ph = rng.uniform(0, 2 * np.pi)
                wig = (b / 4) * np.sin(2 * np.pi * ys / (hi - lo) * rng.integers(1, 4) + ph)
            anchors.append(np.column_stack([b * k + wig, ys]))
        anchors = np.vstack(anchors)
        centers = anchors.copy()
        centers[:, 0] = np.round(centers[:, 0] / b) * b  # squares sit on the lattice
        g = SamplingGeometry2D(
            variant, 2, b, float(params.get("C0", 8.0)), float(params.get("D", 9.0)),
            window, anchors, np.ones(len(anchors)),
            C0_equiv=float(params.get("C0_equiv", 6.0)),
            cell_centers=centers, cell_radius=b / 4.0,
            boundary_flags=np.zeros(len(anchors), bool),
            params={"seed": seed, "n_curves": len(ks)},
        )
        return g

    if variant == "concentric-circles":
        rmax = float(params.get("rmax", min(abs(lo), abs(hi)) - b))
        rng = np.random.default_rng(seed)
        if "radii" in params:
            radii = np.asarray(params["radii"], dtype=float)
        else:
            radii = [float(params.get("r0", 0.75 * b))]
            while radii[-1] < rmax:
                radii.append(radii[-1] + rng.uniform(b / 2 * 1.001, b * 0.999))
            radii = np.asarray(radii[:-1] if radii[-1] > rmax else radii)
        gaps = np.diff(radii)
        if np.any(gaps <= b / 2) or np.any(gaps >= b):
            raise ValueError("circle radii gaps must lie strictly in (b/2, b)")
        mids = (radii[:-1] + radii[1:]) / 2.0
        seg_lo = np.concatenate([[0.0], mids])
        seg_hi = np.concatenate([mids, [radii[-1] + gaps[-1] / 2 if len(gaps) else radii[-1] + b / 2]])
        seg_hi = np.minimum(seg_hi, rmax + b)
        anchors, weights, ca, cb, flags = [], [], [], [], []
        for i, r in enumerate(radii):
            n = max(8, int(math.ceil(2 * np.pi * r / step)))
            th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
            u = np.column_stack([np.cos(th), np.sin(th)])
            anchors.append(r * u)
            weights.append(np.full(n, 2 * np.pi * r / n))
            ca.append(seg_lo[i] * u)
            cb.append(seg_hi[i] * u)
            flags.append(np.full(n, i == len(radii) - 1))
        g = SamplingGeometry2D(
            variant, 1, b, float(params.get("C0", 10.0)), float(params.get("D", 4.0)),
            window, np.vstack(anchors), np.concatenate(weights),
            C0_equiv=float(params.get("C0_equiv", 1.5)),
            cell_a=np.vstack(ca), cell_b=np.vstack(cb),
            boundary_flags=np.concatenate(flags),
            params={"radii": radii.tolist(), "seed": seed, "step": step, "rmax": rmax},
        )
        return g

    # spiral: r = rho(theta), rho(2*pi*k) = r_k, radial cells [r_{k-1}, r_{k+1}]
    rmax = float(params.get("rmax", min(abs(lo), abs(hi)) - b))
    rng = np.random.default_rng(seed)
    radii = [float(params.get("r0", 0.75 * b))]
    while radii[-1] < rmax:
        radii.append(radii[-1] + rng.uniform(b / 2 * 1.001, b * 0.999))
    radii = np.asarray(radii)
    thetas_knots = 2 * np.pi * np.arange(len(radii))
    rho = PchipInterpolator(thetas_knots, radii)
    n_per_turn = max(32, int(params.get("n_per_turn", 2 * math.pi * rmax / step)))
    anchors, weights, ca, cb, flags = [], [], [], [], []
    for k in range(len(radii) - 1):
        th = np.linspace(2 * np.pi * k, 2 * np.pi * (k + 1), n_per_turn, endpoint=False)
        r = rho(th)
        dr = rho.derivative()(th)
        u = np.column_stack([np.cos(th), np.sin(th)])
        anchors.append(r[:, None] * u)
        weights.append(np.sqrt(r**2 + dr**2) * (2 * np.pi / n_per_turn))
        r_in = radii[k - 1] if k >= 1 else 0.0
        r_out = radii[k + 1]
        ca.append(r_in * u)
        cb.append(r_out * u)
        flags.append(np.full(n_per_turn, k >= len(radii) - 2))
    g = SamplingGeometry2D(
        variant, 1, b, float(params.get("C0", 12.0)), float(params.get("D", 4.0)),
        window, np.vstack(anchors), np.concatenate(weights),
        C0_equiv=float(params.get("C0_equiv", 3.0)),
        cell_a=np.vstack(ca), cell_b=np.vstack(cb),
        boundary_flags=np.concatenate(flags),
        params={"radii": radii.tolist(), "seed": seed, "n_per_turn": n_per_turn,
                "rmax": rmax},
    )
    return g


def cell_measures(obj) -> np.ndarray:
    """nu_a(H_a) per anchor (1D: the cell lengths b_n)."""
    if isinstance(obj, SamplingSequence1D):
        return obj.cell_lengths
    g = obj
    if g.m == 1:
        return g.phi * np.linalg.norm(g.cell_b - g.cell_a, axis=1)
    return np.full(g.n_anchors(), g.phi * (2.0 * g.cell_radius) ** 2)


# ---------------------------------------------------------------------------
# condition checks

@dataclass
class GeometryConditionsReport:
    variant: str
    n_probes: int
    seed: int
    declared_C0: float
    declared_D: float
    equiv_lower: float
    equiv_upper: float
    equiv_C0: float
    mes2_lower: float
    mes2_upper: float
    mes2_C0: float
    mes_C0: float
    multiplicity_max: int | None
    diam_range: tuple[float, float]
    passes: dict
    failures: list

    def all_pass(self) -> bool:
        return all(self.passes.values())

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["diam_range"] = list(self.diam_range)
        return d


def _probe_params(rng, window, b, radial_max=None):
    """Isotropic Gaussian probe exp(-pi |x-c|^2 / w^2), width >= b, center in
    the probe-safe region (a b-collar plus 20% margin off the boundary)."""
    lo, hi = window
    pad = 0.2 * (hi - lo) / 2 + b
    w = rng.uniform(b, 4 * b)
    if radial_max is not None:
        rc = rng.uniform(0.0, max(radial_max - pad, b))
        th = rng.uniform(0, 2 * np.pi)
        c = np.array([rc * math.cos(th), rc * math.sin(th)])
    else:
        c = rng.uniform(lo + pad, hi - pad, size=2)
    return c, w


def _gauss_plane_integral(w: float) -> float:
    # integral over R^2 of exp(-pi |x-c|^2 / w^2)
    return w * w


def _gauss_segment_integral(a, bpt, c, w):
    """Exact integral of the Gaussian probe along segments a->bpt (vectorized)."""
    a = np.atleast_2d(a)
    bpt = np.atleast_2d(bpt)
    d = bpt - a
    L = np.linalg.norm(d, axis=1)
    L = np.where(L == 0, 1e-300, L)
    u = d / L[:, None]
    rel = c[None, :] - a
    t0 = np.einsum("ij,ij->i", rel, u)          # foot of perpendicular
    h2 = np.einsum("ij,ij->i", rel, rel) - t0**2
    pref = np.exp(-np.pi * np.maximum(h2, 0.0) / w**2)
    srt = math.sqrt(math.pi) / w
    val = pref * (w / 2.0) * (erf(srt * (L - t0)) - erf(srt * (-t0)))
    return val


def _gauss_square_integral(centers, radius, c, w):
    """Probe integral over axis-aligned squares (vectorized, exact erf form)."""
    srt = math.sqrt(math.pi) / w
    out = np.ones(len(centers))
    for axis in range(2):
        lo = centers[:, axis] - radius - c[axis]
        hi = centers[:, axis] + radius - c[axis]
        out *= (w / 2.0) * (erf(srt * hi) - erf(srt * lo))
    return out


def _radial_profile_integral(tgrid, weight, c, w):
    """integral weight(t) * [angular integral of probe on circle radius t] dt.

    The angular integral of exp(-pi |x-c|^2 / w^2) over directions at radius
    t reduces exactly to the Bessel form
    2*pi * exp(-pi (t - rc)^2 / w^2) * i0e(2*pi*t*rc / w^2) with rc = |c|;
    the outer integral against dt carries the given radial weight.
    """
    rc = float(np.linalg.norm(c))
    arg = 2.0 * np.pi * tgrid * rc / w**2
    vals = 2.0 * np.pi * np.exp(-np.pi * (tgrid - rc) ** 2 / w**2) * i0e(arg)
    return float(np.trapezoid(weight * vals, tgrid))


def equiv_lhs_for_probe(g: SamplingGeometry2D, center, width: float) -> float:
    """Carrier/cell double integral of the Gaussian probe (exact erf forms)."""
    c = np.asarray(center, dtype=float)
    if g.m == 1:
        seg = _gauss_segment_integral(g.cell_a, g.cell_b, c, width)
        return float(np.sum(g.anchor_weights * g.phi * seg))
    sq = _gauss_square_integral(g.cell_centers, g.cell_radius, c, width)
    return float(np.sum(g.anchor_weights * g.phi * sq))


def equiv_ratio_for_probe(g: SamplingGeometry2D, center, width: float) -> float:
    """LHS / Lebesgue-integral ratio for one probe (the eq. (ii) lower side)."""
    return equiv_lhs_for_probe(g, center, width) / _gauss_plane_integral(width)


def check_conditions(g: SamplingGeometry2D, n_probes: int = 1000, seed: int = 0
                     ) -> GeometryConditionsReport:
    """Monte-Carlo certificates for the covering/measure conditions.

    (a) the two-sided integral comparison on Gaussian-bump probes (for
        circles/spiral the right-hand side carries the max(1,r) dr dsigma
        weight), (b) cell Ahlfors bounds nu_a(B(x,R) cap H_a) vs min(R,b)^m
        with x on the cell, (c) the carrier-measure growth bound
        H^(d-m)(G cap B(x,R)) <= C0 R^(d-m) max(1, R/b)^m, and, for m=2, the
        covering multiplicity of the radius-b cubes.
    """
    if n_probes < 10:
        raise ValueError("probe budget too small; need at least 10")
    rng = np.random.default_rng(seed)
    lo, hi = g.window
    b = g.b
    radial = g.variant in ("concentric-circles", "spiral")
    rmax = g.params.get("rmax")
    failures: list = []

    # --- (a) integral comparison
    # lower bound always against the Lebesgue integral; for circles/spiral the
    # upper bound is taken against the weighted measure max(1, r) dr dsigma.
    # Each probe integrates over every cell, so the budget share is capped;
    # the extremal ratios stabilize long before that.
    n_equiv = min(400, max(10, n_probes // 5))
    lo_ratios, hi_ratios = [], []
    for _ in range(n_equiv):
        c, w = _probe_params(rng, g.window, b, radial_max=rmax if radial else None)
        lhs = equiv_lhs_for_probe(g, c, w)
        lebesgue = _gauss_plane_integral(w)
        if radial:
            tgrid = np.linspace(0.0, rmax + 2 * b, 4096)
            upper_ref = _radial_profile_integral(tgrid, np.maximum(1.0, tgrid), c, w)
        else:
            upper_ref = lebesgue
        lo_ratios.append(lhs / lebesgue)
        hi_ratios.append(lhs / upper_ref)
    equiv_lower = float(np.min(lo_ratios))
    equiv_upper = float(np.max(hi_ratios))
    equiv_C0 = max(equiv_upper, 1.0 / max(equiv_lower, 1e-300))

    # --- (b) cell Ahlfors regularity
    interior = (np.zeros(g.n_anchors(), bool) if g.boundary_flags is None
                else ~g.boundary_flags)
    idx_pool = np.nonzero(interior)[0]
    if len(idx_pool) == 0:
        idx_pool = np.arange(g.n_anchors())
    n_mes2 = max(10, n_probes // 2)
    picks = rng.choice(idx_pool, size=n_mes2)
    lo_c, hi_c = np.inf, 0.0
    for i in picks:
        R = float(np.exp(rng.uniform(math.log(b / 8), math.log(4 * b))))
        if g.m == 1:
            A, Bp = g.cell_a[i], g.cell_b[i]
            t = rng.uniform(0.0, 1.0)
            x = A + t * (Bp - A)
            length = _segment_ball_length(A, Bp, x, R) * g.phi
        else:
            cen = g.cell_centers[i]
            x = cen + rng.uniform(-g.cell_radius, g.cell_radius, size=2)
            length = _square_ball_area(cen, g.cell_radius, x, R) * g.phi
        ratio = length / min(R, b) ** g.m
        lo_c, hi_c = min(lo_c, ratio), max(hi_c, ratio)
    mes2_lower, mes2_upper = float(lo_c), float(hi_c)
    mes2_C0 = max(mes2_upper, 1.0 / max(mes2_lower, 1e-300))

    # --- (c) carrier measure growth
    n_mes = max(10, n_probes // 2)
    mes_c = 0.0
    for _ in range(n_mes):
        x = rng.uniform(lo + b, hi - b, size=2)
        R = float(np.exp(rng.uniform(math.log(b / 2), math.log((hi - lo) / 4))))
        inside = np.linalg.norm(g.anchors - x[None, :], axis=1) <= R
        if g.m == 1:
            meas = float(np.sum(g.anchor_weights[inside]))
        else:
            meas = float(np.count_nonzero(inside))
        denom = R ** (2 - g.m) * max(1.0, R / b) ** g.m
        mes_c = max(mes_c, meas / denom)

    # --- covering multiplicity (m=2 only)
    mult_max = None
    if g.m == 2:
        n_cov = 10000
        pts = rng.uniform(lo + b, hi - b, size=(n_cov, 2))
        mult = np.zeros(n_cov, dtype=int)
        for e in g.anchors:
            near = (np.abs(pts[:, 0] - e[0]) <= b) & (np.abs(pts[:, 1] - e[1]) <= b)
            mult += near
        if np.any(mult == 0):
            failures.append("radius-b cubes fail to cover some probe points")
        mult_max = int(mult.max())

    # --- cell diameters (interior cells only; l-inf diameter for squares)
    if g.m == 1:
        diam = np.linalg.norm(g.cell_b - g.cell_a, axis=1)[interior]
        if len(diam) == 0:
            diam = np.linalg.norm(g.cell_b - g.cell_a, axis=1)
    else:
        diam = np.array([2.0 * g.cell_radius])
    diam_range = (float(diam.min()), float(diam.max()))
    # circles keep the long innermost cell reaching to the origin; the spiral
    # cells span two consecutive radii gaps -- both inherit wider bounds
    diam_cap = {"concentric-circles": 1.5 * b, "spiral": 2.0 * b}.get(g.variant, b)

    passes = {
        "equiv": equiv_C0 <= (g.C0_equiv or g.C0),
        "mes2": mes2_C0 <= g.C0,
        "mes": mes_c <= g.C0,
        "diam": diam_range[0] >= b / 2 * (1 - 1e-9)
                and diam_range[1] <= diam_cap * (1 + 1e-9),
    }
    if g.m == 2:
        passes["cover_multiplicity"] = mult_max is not None and mult_max <= g.D
    if not passes["equiv"]:
        failures.append(
            f"empirical equivalence constant {equiv_C0:.3g} exceeds declared "
            f"C0_equiv={g.C0_equiv or g.C0}")
    return GeometryConditionsReport(
        g.variant, n_probes, seed, g.C0, g.D,
        equiv_lower, equiv_upper, equiv_C0,
        mes2_lower, mes2_upper, mes2_C0, float(mes_c),
        mult_max, diam_range, passes, failures,
    )


def _segment_ball_length(A, B, x, R) -> float:
    d = B - A
    L2 = float(d @ d)
    if L2 == 0:
        return 0.0
    # |A + t d - x|^2 <= R^2
    rel = A - x
    a = L2
    bq = 2.0 * float(rel @ d)
    cq = float(rel @ rel) - R * R
    disc = bq * bq - 4 * a * cq
    if disc <= 0:
        return 0.0
    sq = math.sqrt(disc)
    t1 = max(0.0, (-bq - sq) / (2 * a))
    t2 = min(1.0, (-bq + sq) / (2 * a))
    return max(0.0, t2 - t1) * math.sqrt(L2)


def _square_ball_area(center, radius, x, R, n: int = 129) -> float:
    xs = np.linspace(center[0] - radius, center[0] + radius, n)
    dx = xs - x[0]
    inside = R * R - dx * dx
    half = np.sqrt(np.maximum(inside, 0.0))
    y_lo = np.maximum(center[1] - radius, x[1] - half)
    y_hi = np.minimum(center[1] + radius, x[1] + half)
    chord = np.maximum(y_hi - y_lo, 0.0) * (inside > 0)
    return float(np.trapezoid(chord, xs))


# ---------------------------------------------------------------------------
# JSON round trip

def geometry_to_json_dict(g: SamplingGeometry2D) -> dict:
    return {
        "variant": g.variant,
        "b": g.b,
        "C0": g.C0,
        "C0_equiv": g.C0_equiv,
        "D": g.D,
        "window": list(g.window),
        "params": g.params,
    }


def geometry_from_json_dict(d: dict) -> SamplingGeometry2D:
    params = dict(d.get("params", {}))
    if "seed" in d:
        params.setdefault("seed", d["seed"])
    params["b"] = d["b"]
    params["window"] = tuple(d.get("window", (-8.0, 8.0)))
    params["C0"] = d.get("C0", 8.0)
    if d.get("C0_equiv") is not None:
        params["C0_equiv"] = d["C0_equiv"]
    params["D"] = d.get("D", 9.0)
    return build_geometry(d["variant"], params)
