"""Coupling-plane sweeps: direction fields, streamlines, scans, decay rates.

Every operation evaluates the variational machinery point by point and
returns plain arrays; CSV writers live here too so the command-line layer
and the experiment scripts share one deterministic on-disk format.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .util import fmt, parallel_map
from .vagp import fold_angle, lifetime, optimal_angle, solve

#: streamlines stop within this distance of a registered singular coupling
SINGULARITY_RADIUS = 0.02

#: grid nodes closer than this to a singular coupling are flagged
NODE_FLAG_TOL = 1e-12


def singular_points(k: int) -> tuple:
    """Macroscopically degenerate couplings visible to a k-body ansatz."""
    pts = [(0.0, 0.0), (2.0, 0.0)]
    if k >= 4:
        pts.append((1.0, 0.0))
    if k >= 7:
        pts.append((2.0 / 3.0, 0.0))
    return tuple(pts)


@dataclass(frozen=True)
class FlowField:
    """Optimal-direction data on a rectangular (h, g) grid."""

    k: int
    h_values: np.ndarray
    g_values: np.ndarray
    phi_opt: np.ndarray      # shape (len(h_values), len(g_values))
    norm_opt: np.ndarray
    norm_orth: np.ndarray
    anisotropy: np.ndarray   # log10(norm_orth / norm_opt)
    singular_mask: np.ndarray


def _field_node(args):
    point, k = args
    od = optimal_angle(point, k)
    return od.phi_opt, od.norm_opt, od.norm_orth, od.anisotropy


def compute_field(domain, resolution, k: int, workers=None) -> FlowField:
    """Evaluate the optimal direction on every node of a rectangular grid.

    ``domain`` is (hmin, hmax, gmin, gmax); ``resolution`` is points per axis
    (one integer or an (nh, ng) pair, each >= 2).
    """
    hmin, hmax, gmin, gmax = domain
    nh, ng = (resolution, resolution) if np.isscalar(resolution) else resolution
    if nh < 2 or ng < 2:
        raise ValueError("resolution must be >= 2 per axis")
    hs = np.linspace(hmin, hmax, nh)
    gs = np.linspace(gmin, gmax, ng)
    sing = singular_points(k)
    nodes = [((h, g), k) for h in hs for g in gs]
    rows = parallel_map(_field_node, nodes, workers)
    phi = np.empty((nh, ng))
    n_opt = np.empty((nh, ng))
    n_orth = np.empty((nh, ng))
    aniso = np.empty((nh, ng))
    mask = np.zeros((nh, ng), dtype=bool)
    it = iter(rows)
    for i, h in enumerate(hs):
        for j, g in enumerate(gs):
            phi[i, j], n_opt[i, j], n_orth[i, j], aniso[i, j] = next(it)
            if any(math.hypot(h - sh, g - sg) < NODE_FLAG_TOL for sh, sg in sing):
                mask[i, j] = True
    return FlowField(
        k=k, h_values=hs, g_values=gs, phi_opt=phi,
        norm_opt=n_opt, norm_orth=n_orth, anisotropy=aniso, singular_mask=mask,
    )


@dataclass(frozen=True)
class Streamline:
    points: np.ndarray  # (n, 2)
    termination: str    # singularity_proximity | domain_boundary | max_steps


def integrate_streamline(
    k: int,
    domain,
    start,
    initial_direction,
    step: float = 0.01,
    max_steps: int = 2000,
) -> Streamline:
    """Trace the optimal-direction field from ``start``.

    The field is a line field (phi and phi + pi are the same direction); each
    evaluation is signed to keep the tangent continuous, seeded by
    ``initial_direction``.  Fourth-order integration with on-demand solves -
    no grid interpolation, for accuracy near the singular couplings.
    """
    hmin, hmax, gmin, gmax = domain
    sing = singular_points(k)
    start = (float(start[0]), float(start[1]))
    if not (hmin <= start[0] <= hmax and gmin <= start[1] <= gmax):
        raise ValueError(f"start {start} outside domain")
    if any(math.hypot(start[0] - sh, start[1] - sg) < SINGULARITY_RADIUS
           for sh, sg in sing):
        raise ValueError(f"start {start} is inside a singular region")

    ref = np.asarray(initial_direction, dtype=float)
    nrm = np.linalg.norm(ref)
    if nrm == 0:
        raise ValueError("initial direction must be nonzero")
    ref = ref / nrm

    def tangent(pt, reference):
        phi = optimal_angle(pt, k).phi_opt
        u = np.array([math.cos(phi), math.sin(phi)])
        return u if float(u @ reference) >= 0.0 else -u

    pts = [np.array(start)]
    termination = "max_steps"
    x = np.array(start)
    for _ in range(max_steps):
        k1 = tangent(x, ref)
        k2 = tangent(x + 0.5 * step * k1, k1)
        k3 = tangent(x + 0.5 * step * k2, k2)
        k4 = tangent(x + step * k3, k3)
        ref = (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        ref = ref / np.linalg.norm(ref)
        x = x + step * ref
        pts.append(x.copy())
        if any(math.hypot(x[0] - sh, x[1] - sg) < SINGULARITY_RADIUS
               for sh, sg in sing):
            termination = "singularity_proximity"
            break
        if not (hmin <= x[0] <= hmax and gmin <= x[1] <= gmax):
            termination = "domain_boundary"
            break
    return Streamline(points=np.array(pts), termination=termination)


def fit_power_law(r, y):
    """Least-squares exponent of y ~ r^a on a log-log scale."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    good = (r > 0) & (y > 0)
    if good.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(r[good]), np.log(y[good]), 1)
    return float(slope)


@dataclass(frozen=True)
class NormScan:
    theta: float
    r_values: np.ndarray
    norm_opt: np.ndarray
    norm_orth: np.ndarray
    exponent_opt: float
    exponent_orth: float


def norm_scan(theta: float, r_values, k: int, workers=None) -> NormScan:
    """Directional norms along the ray g = h tan(theta), with power-law fits."""
    r_values = np.asarray(r_values, dtype=float)
    if np.any(r_values <= 0):
        raise ValueError("the ray scan excludes r = 0")
    pts = [((r * math.cos(theta), r * math.sin(theta)), k) for r in r_values]
    rows = parallel_map(_field_node, pts, workers)
    n_opt = np.array([row[1] for row in rows])
    n_orth = np.array([row[2] for row in rows])
    return NormScan(
        theta=theta,
        r_values=r_values,
        norm_opt=n_opt,
        norm_orth=n_orth,
        exponent_opt=fit_power_law(r_values, n_opt),
        exponent_orth=fit_power_law(r_values, n_orth),
    )


#: distinguished coefficient combinations: the domain-wall-conserving flip
#: (divergent near the origin) and the symmetric two-site flip (order one)
COMBO_LABELS = ("Y-ZYZ", "YZ+ZY")


@dataclass(frozen=True)
class CoefficientScan:
    """Per-word weights |c_n|^2 along a ray, for both extremal directions."""

    theta: float
    r_values: np.ndarray
    words: list
    weights_opt: np.ndarray    # (n_r, n_words)
    weights_orth: np.ndarray
    combos_opt: np.ndarray     # (n_r, len(COMBO_LABELS))
    combos_orth: np.ndarray

    def weight(self, word: str, direction: str) -> np.ndarray:
        w = self.weights_opt if direction == "optimal" else self.weights_orth
        return w[:, self.words.index(word)]

    def combo(self, label: str, direction: str) -> np.ndarray:
        w = self.combos_opt if direction == "optimal" else self.combos_orth
        return w[:, COMBO_LABELS.index(label)]


def _combo_weights(coeffs, idx):
    a = (coeffs[idx["Y"]] - coeffs[idx["ZYZ"]]) / math.sqrt(2.0)
    b = (coeffs[idx["YZ"]] + coeffs[idx["ZY"]]) / math.sqrt(2.0)
    return (a * a, b * b)


def coefficient_scan(theta: float, r_values, k: int = 3) -> CoefficientScan:
    """Coefficient weights vs distance from the origin along a fixed ray."""
    r_values = np.asarray(r_values, dtype=float)
    if np.any(r_values <= 0):
        raise ValueError("the ray scan excludes r = 0")
    words = None
    rows_opt, rows_orth, combos_opt, combos_orth = [], [], [], []
    for r in r_values:
        pt = (r * math.cos(theta), r * math.sin(theta))
        od = optimal_angle(pt, k)
        s_opt = solve(pt, od.phi_opt, k)
        s_orth = solve(pt, od.phi_orth, k)
        if words is None:
            words = s_opt.basis.word_strings()
            idx = {w: i for i, w in enumerate(words)}
        rows_opt.append(s_opt.coeffs**2)
        rows_orth.append(s_orth.coeffs**2)
        combos_opt.append(_combo_weights(s_opt.coeffs, idx))
        combos_orth.append(_combo_weights(s_orth.coeffs, idx))
    return CoefficientScan(
        theta=theta,
        r_values=r_values,
        words=words,
        weights_opt=np.array(rows_opt),
        weights_orth=np.array(rows_orth),
        combos_opt=np.array(combos_opt),
        combos_orth=np.array(combos_orth),
    )


@dataclass(frozen=True)
class GammaEntry:
    h: float
    g: float
    k: int
    phi: float
    gamma: float


def _gamma_node(args):
    point, k = args
    od = optimal_angle(point, k)
    lt = lifetime(point, od.phi_opt, k)
    return GammaEntry(
        h=point[0], g=point[1], k=k, phi=od.phi_opt, gamma=lt.gamma
    )


def gamma_sweep(points, k_values, workers=None) -> list:
    """Decay rate of the dressed conjugate operator along a 1D cut.

    The deformation direction at each point is the optimal one for the
    corresponding ansatz size.
    """
    jobs = [(tuple(p), k) for k in k_values for p in points]
    return parallel_map(_gamma_node, jobs, workers)


def line_cut(axis: str, fixed: float, values) -> list:
    """Points along a cut: axis='h' varies h at g=fixed, 'g' the converse,
    'diag' walks (r/sqrt2, r/sqrt2)."""
    if axis == "h":
        return [(float(v), fixed) for v in values]
    if axis == "g":
        return [(fixed, float(v)) for v in values]
    if axis == "diag":
        s = 1.0 / math.sqrt(2.0)
        return [(float(v) * s, float(v) * s) for v in values]
    raise ValueError(f"unknown cut axis {axis!r}")


# -- CSV output ---------------------------------------------------------------


def write_flow_csv(field: FlowField, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["h", "g", "phi_opt", "norm_opt", "norm_orth", "anisotropy"])
        for i, h in enumerate(field.h_values):
            for j, g in enumerate(field.g_values):
                w.writerow([
                    fmt(h), fmt(g), fmt(field.phi_opt[i, j]),
                    fmt(field.norm_opt[i, j]), fmt(field.norm_orth[i, j]),
                    fmt(field.anisotropy[i, j]),
                ])


def write_streamline_csv(line: Streamline, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["step", "h", "g"])
        for n, (h, g) in enumerate(line.points):
            w.writerow([n, fmt(h), fmt(g)])


def write_gamma_csv(entries, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["h", "g", "k", "gamma"])
        for e in entries:
            w.writerow([fmt(e.h), fmt(e.g), e.k, fmt(e.gamma)])


def write_norm_scan_csv(scan: NormScan, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["r", "norm_opt", "norm_orth"])
        for r, a, b in zip(scan.r_values, scan.norm_opt, scan.norm_orth):
            w.writerow([fmt(r), fmt(a), fmt(b)])


def write_coefficient_scan_csv(scan: CoefficientScan, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        header = ["r", "direction"] + scan.words + list(COMBO_LABELS)
        w.writerow(header)
        for label, weights, combos in (
            ("optimal", scan.weights_opt, scan.combos_opt),
            ("orthogonal", scan.weights_orth, scan.combos_orth),
        ):
            for i, r in enumerate(scan.r_values):
                row = [fmt(r), label]
                row += [fmt(x) for x in weights[i]]
                row += [fmt(x) for x in combos[i]]
                w.writerow(row)
