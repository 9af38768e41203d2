"""Minimal analytical global placer.

Objective: log-sum-exp smoothed HPWL plus a density spreading force, driven
by projected gradient descent with a multiplicative density-weight schedule.
This is deliberately simple — its job is producing deterministic, comparable
iteration counts for different initializations, not competing with production
placers.

The spreading force is electrostatic: bins carry charge equal to their
occupancy minus the grid average, the potential solves a Neumann Poisson
problem on the bin grid, and each cell descends its overlap-weighted
potential. Unlike a local overfill penalty — whose gradient vanishes in the
interior of a uniformly overfull cluster, so clusters can only peel from the
surface — the electrostatic field moves interior cells immediately. Iteration
counts then reflect how far an initialization is from an organized, spread
state instead of measuring pile-peeling depth.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dctn, idctn

from .errors import DivergenceError
from .gift import GiftConfig, initial_signal
from .metrics import DensityGrid, GridConfig, _bin_span, density_map, hpwl, overflow
from .netlist import Design

log = logging.getLogger(__name__)

MAX_MOVE_BINS = 1.0     # per-iteration displacement cap, in bin widths
LAMBDA_BALANCE = 1.0    # default density-weight scale relative to the wirelength force


@dataclass
class PlacerConfig:
    gamma: float | None = None          # LSE smoothing; default 1% of region width
    lambda0: float | None = None        # initial density weight; default balances the forces
    lambda_growth: float = 1.03         # per-iteration multiplier
    step: float | None = None           # fixed step; default: per-cell saturated steps
    max_iters: int = 1000
    stop_overflow: float = 0.15
    grid: GridConfig | None = None      # default: bins sized to the average movable cell
    seed: int = 0

    def __post_init__(self) -> None:
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.lambda_growth < 1.0:
            raise ValueError("lambda_growth must be >= 1")
        if not 0.0 < self.stop_overflow < 1.0:
            raise ValueError("stop_overflow must be in (0, 1)")


@dataclass
class TraceRecord:
    iteration: int
    wl: float
    hpwl: float
    overflow: float
    lam: float
    seconds: float


@dataclass
class PlacerTrace:
    records: list[TraceRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration if self.records else 0

    def write_csv(self, path: str, include_seconds: bool = True) -> None:
        """Dump the trace; pass include_seconds=False for byte-reproducible files."""
        with open(path, "w") as f:
            f.write("iter,wl,hpwl,overflow,lambda" + (",seconds\n" if include_seconds else "\n"))
            for r in self.records:
                row = f"{r.iteration},{r.wl:.10g},{r.hpwl:.10g},{r.overflow:.10g},{r.lam:.10g}"
                f.write(row + (f",{r.seconds:.6f}\n" if include_seconds else "\n"))


def smooth_wirelength_grad(design: Design, g: np.ndarray, gamma: float) -> tuple[float, np.ndarray]:
    """Per-net log-sum-exp HPWL surrogate and its exact gradient.

    Per net and axis: gamma*(log sum e^{x/gamma} + log sum e^{-x/gamma}),
    an upper bound on the bounding-box span that tightens as gamma -> 0.
    Fixed-cell gradient entries are zeroed.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    g = np.asarray(g, dtype=float)
    grad = np.zeros_like(g)
    net_start, pin_cell, pin_dx, pin_dy = design.pin_table()
    if pin_cell.size == 0:
        return 0.0, grad
    degrees = np.diff(net_start)
    starts = net_start[:-1][degrees > 0]
    if starts.size == 0:
        return 0.0, grad
    seg_sizes = np.diff(np.append(starts, pin_cell.size))

    value = 0.0
    for axis, offs in ((0, pin_dx), (1, pin_dy)):
        p = g[pin_cell, axis] + offs
        hi_n = np.maximum.reduceat(p, starts)
        lo_n = np.minimum.reduceat(p, starts)
        # max-shifted exponentials keep everything in (0, 1]
        ea = np.exp((p - np.repeat(hi_n, seg_sizes)) / gamma)
        eb = np.exp((np.repeat(lo_n, seg_sizes) - p) / gamma)
        sa_n = np.add.reduceat(ea, starts)
        sb_n = np.add.reduceat(eb, starts)
        value += float(np.sum(hi_n - lo_n + gamma * (np.log(sa_n) + np.log(sb_n))))
        weights = ea / np.repeat(sa_n, seg_sizes) - eb / np.repeat(sb_n, seg_sizes)
        np.add.at(grad[:, axis], pin_cell, weights)
    grad[design.fixed_mask()] = 0.0
    return value, grad


def _field_weighted_grad(
    design: Design, g: np.ndarray, dens: DensityGrid, bin_field: np.ndarray
) -> np.ndarray:
    """Accumulate sum_b field_b * d(overlap area of cell i with bin b)/d(x_i, y_i).

    The x-overlap with a bin changes at rate +-1 while the corresponding cell
    edge lies strictly inside the bin (piecewise-linear overlap); edges frozen
    by the region clip have zero derivative. Fixed cells get zero rows.
    """
    region = design.region
    g = np.asarray(g, dtype=float)
    grad = np.zeros_like(g)
    w, h = design.sizes()
    x0 = np.clip(g[:, 0] - w / 2.0, region.xmin, region.xmax)
    x1 = np.clip(g[:, 0] + w / 2.0, region.xmin, region.xmax)
    y0 = np.clip(g[:, 1] - h / 2.0, region.ymin, region.ymax)
    y1 = np.clip(g[:, 1] + h / 2.0, region.ymin, region.ymax)
    free_lo_x = (g[:, 0] - w / 2.0 > region.xmin).astype(float)
    free_hi_x = (g[:, 0] + w / 2.0 < region.xmax).astype(float)
    free_lo_y = (g[:, 1] - h / 2.0 > region.ymin).astype(float)
    free_hi_y = (g[:, 1] + h / 2.0 < region.ymax).astype(float)

    active = np.flatnonzero(~design.fixed_mask() & (x1 > x0) & (y1 > y0))
    if active.size == 0:
        return grad
    x0, x1, y0, y1 = x0[active], x1[active], y0[active], y1[active]
    ix0, ix1 = _bin_span(x0, x1, region.xmin, dens.bin_w, dens.nx)
    iy0, iy1 = _bin_span(y0, y1, region.ymin, dens.bin_h, dens.ny)

    def _axis(lo, hi, i_first, span_off, origin, width, free_lo, free_hi):
        b = i_first + span_off
        bs = origin + b * width
        be = bs + width
        ell = np.maximum(np.minimum(hi, be) - np.maximum(lo, bs), 0.0)
        d_ell = np.where(hi < be, free_hi, 0.0) - np.where(lo > bs, free_lo, 0.0)
        d_ell = np.where(ell > 0.0, d_ell, 0.0)
        return b, ell, d_ell

    gx = np.zeros(active.size)
    gy = np.zeros(active.size)
    for dx in range(int((ix1 - ix0).max()) + 1):
        in_x = dx <= ix1 - ix0
        bx, lx, dlx = _axis(x0, x1, ix0, dx, region.xmin, dens.bin_w,
                            free_lo_x[active], free_hi_x[active])
        for dy in range(int((iy1 - iy0).max()) + 1):
            in_y = dy <= iy1 - iy0
            by, ly, dly = _axis(y0, y1, iy0, dy, region.ymin, dens.bin_h,
                                free_lo_y[active], free_hi_y[active])
            use = in_x & in_y
            f = np.where(use, bin_field[np.minimum(bx, dens.nx - 1), np.minimum(by, dens.ny - 1)], 0.0)
            gx += f * dlx * ly
            gy += f * lx * dly
    grad[active, 0] = gx
    grad[active, 1] = gy
    return grad


def density_penalty_grad(
    design: Design, g: np.ndarray, grid: GridConfig | None = None
) -> tuple[float, np.ndarray, DensityGrid]:
    """Quadratic overfill penalty sum_b max(0, rho_b - rho_t*bin_area)^2.

    The gradient follows each cell's overlap derivatives; fixed cells
    contribute density but receive zero gradient.
    """
    dens = density_map(design, g, grid)
    excess = np.maximum(0.0, dens.rho - dens.rho_t * dens.bin_area)
    value = float(np.sum(excess * excess))
    if value == 0.0:
        return value, np.zeros_like(np.asarray(g, dtype=float)), dens
    return value, _field_weighted_grad(design, g, dens, 2.0 * excess), dens


def _poisson_potential(q: np.ndarray, bin_w: float, bin_h: float) -> np.ndarray:
    """Solve the 5-point Neumann Poisson problem lap(phi) = -q on the bin grid.

    Neumann (mirror) boundaries diagonalize under the type-II cosine
    transform; the zero-total-charge mode is projected out.
    """
    nx, ny = q.shape
    wx = (2.0 - 2.0 * np.cos(np.pi * np.arange(nx) / nx)) / bin_w**2
    wy = (2.0 - 2.0 * np.cos(np.pi * np.arange(ny) / ny)) / bin_h**2
    denom = wx[:, None] + wy[None, :]
    q_hat = dctn(q, type=2, norm="ortho")
    phi_hat = np.zeros_like(q_hat)
    nonzero = denom > 0
    phi_hat[nonzero] = q_hat[nonzero] / denom[nonzero]
    return idctn(phi_hat, type=2, norm="ortho")


def electrostatic_grad(
    design: Design, g: np.ndarray, grid: GridConfig | None = None
) -> tuple[float, np.ndarray, DensityGrid]:
    """Electrostatic spreading energy 0.5 * sum_b q_b * phi_b and its gradient.

    Bins carry charge q = occupancy - mean occupancy (signed: underfull areas
    attract), the potential solves a Neumann Poisson problem, and the exact
    position gradient is the potential-weighted overlap derivative
    d(energy)/dx_i = sum_b phi_b * d(rho_b)/dx_i, since the solve is
    self-adjoint and the potential is mean-free. The energy is nonnegative
    and zero exactly at uniform occupancy, so a uniform placement feels no
    force. Fixed cells contribute charge but receive zero gradient.
    """
    dens = density_map(design, g, grid)
    q = dens.rho - float(np.mean(dens.rho))
    phi = _poisson_potential(q, dens.bin_w, dens.bin_h)
    value = 0.5 * float(np.sum(q * phi))
    return value, _field_weighted_grad(design, g, dens, phi), dens


def default_placer_bins(design: Design) -> GridConfig:
    """Bins matching the average movable cell dimension.

    Bins no larger than the cells guarantee every cell straddles bin
    boundaries, so the overlap gradient never vanishes over an interval; and
    because the per-iteration displacement cap is one bin width, bins as
    large as the cells maximize transport speed.
    """
    w, h = design.sizes()
    mov = ~design.fixed_mask()
    aw = float(w[mov].mean()) if mov.any() else float(w.mean()) if w.size else 1.0
    ah = float(h[mov].mean()) if mov.any() else float(h.mean()) if h.size else 1.0
    nx = int(np.clip(round(design.region.width / max(aw, 1e-9)), 4, 512))
    ny = int(np.clip(round(design.region.height / max(ah, 1e-9)), 4, 512))
    return GridConfig(nx=nx, ny=ny)


def balanced_lambda0(design: Design, config: PlacerConfig) -> float:
    """Density weight equalizing the two force magnitudes at a canonical state.

    The calibration state is the seeded center-cloud (the same scattered
    signal the filter pipeline starts from), NOT the placement being
    optimized: calibrating at g0 would hand different effective schedules to
    different initializations of the same design, making iteration counts
    incomparable across them — and it is degenerate at a coincident stack,
    where the wirelength gradient nearly vanishes.
    """
    grid = config.grid or default_placer_bins(design)
    gamma = config.gamma if config.gamma is not None else 0.01 * design.region.width
    cloud = initial_signal(design, GiftConfig(seed=config.seed))
    _, wl_grad = smooth_wirelength_grad(design, cloud, gamma)
    _, d_grad, _ = electrostatic_grad(design, cloud, grid)
    wl_norm = float(np.abs(wl_grad).sum())
    d_norm = float(np.abs(d_grad).sum())
    if wl_norm <= 0.0 or d_norm <= 0.0:
        return LAMBDA_BALANCE
    return LAMBDA_BALANCE * wl_norm / d_norm


def run_placer(
    design: Design, g0: np.ndarray, config: PlacerConfig | None = None
) -> tuple[np.ndarray, PlacerTrace]:
    """Projected gradient descent until overflow <= stop_overflow or budget ends.

    Update: g <- clamp(g - step * (grad_wl + lambda * grad_density)), with
    lambda growing multiplicatively each iteration. Fixed rows of g0 are never
    touched. Raises DivergenceError when the objective stops being finite.
    """
    config = config or PlacerConfig()
    grid = config.grid or default_placer_bins(design)
    gamma = config.gamma if config.gamma is not None else 0.01 * design.region.width

    g = np.array(g0, dtype=float)
    if g.shape != (design.num_cells, 2):
        raise ValueError(f"g0 shape {g.shape} does not match design with {design.num_cells} cells")
    if not np.all(np.isfinite(g)):
        raise DivergenceError("objective not finite at iteration 0")
    region = design.region
    movable = ~design.fixed_mask()
    g[movable, 0] = np.clip(g[movable, 0], region.xmin, region.xmax)
    g[movable, 1] = np.clip(g[movable, 1], region.ymin, region.ymax)

    t_start = time.perf_counter()
    trace = PlacerTrace()

    wl_val, wl_grad = smooth_wirelength_grad(design, g, gamma)
    d_val, d_grad, dens = electrostatic_grad(design, g, grid)
    lam = config.lambda0 if config.lambda0 is not None else balanced_lambda0(design, config)
    ovf = overflow(dens)
    trace.records.append(
        TraceRecord(0, wl_val, hpwl(design, g), ovf, lam, time.perf_counter() - t_start)
    )
    if ovf <= config.stop_overflow:
        trace.converged = True
        return g, trace

    # With config.step set, the update rule is applied literally. The default
    # is a saturated per-cell step: cells move along their own negative
    # gradient at a speed proportional to its magnitude relative to the RMS,
    # capped at one bin per iteration — the density weight grows without
    # bound, so any constant step would eventually overshoot.
    max_move = MAX_MOVE_BINS * min(dens.bin_w, dens.bin_h)
    for it in range(1, config.max_iters + 1):
        obj = wl_val + lam * d_val
        grad = wl_grad + lam * d_grad
        if not (np.isfinite(obj) and np.all(np.isfinite(grad))):
            raise DivergenceError(f"objective not finite at iteration {it}")
        if config.step is not None:
            g = _advance(g, grad, config.step, movable, region)
        else:
            mag = np.hypot(grad[movable, 0], grad[movable, 1])
            if mag.size == 0 or not np.any(mag > 0):
                log.info("zero gradient at iteration %d; stopping", it)
                break
            ref = float(np.sqrt(np.mean(mag**2)))
            scale = np.minimum(max_move / ref, max_move / np.maximum(mag, 1e-300))
            g = _advance(g, grad, scale[:, None], movable, region)
        wl_val, wl_grad = smooth_wirelength_grad(design, g, gamma)
        d_val, d_grad, dens = electrostatic_grad(design, g, grid)

        lam *= config.lambda_growth
        ovf = overflow(dens)
        trace.records.append(
            TraceRecord(it, wl_val, hpwl(design, g), ovf, lam, time.perf_counter() - t_start)
        )
        if ovf <= config.stop_overflow:
            trace.converged = True
            break
    return g, trace


def _advance(g, grad, step, movable, region) -> np.ndarray:
    out = g.copy()
    out[movable] -= step * grad[movable]
    out[movable, 0] = np.clip(out[movable, 0], region.xmin, region.xmax)
    out[movable, 1] = np.clip(out[movable, 1], region.ymin, region.ymax)
    return out
