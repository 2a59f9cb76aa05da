"""Gaussian jammed-relay rate expressions and their numerical maximization.

The model: a sender with per-symbol power budget P splits into a component
heard by the destination (share alpha) and a component heard by the relay on
an orthogonal band; the relay spends power P1; a jammer adds an arbitrary
state sequence of per-symbol power at most Lambda at the destination, while
the relay link only sees thermal noise of variance sigma2.

All rates are in bits per channel use (log base 2).

The core objective for a power split (alpha, rho) is

    F(alpha, rho) = min{ 0.5*log2(1 + (P1 + a*P + 2*rho*sqrt(a*P*P1)) / Lambda),
                         0.5*log2(1 + (1-a)*P / sigma2)
                           + 0.5*log2(1 + (1-rho^2)*a*P / Lambda) }

with a = alpha.  The shared-randomness (random-code) capacity is the
unconstrained maximum of F over the unit square; the deterministic-code lower
and upper bounds maximize F over the feasibility regions

    lower:  (1-rho^2)*a*P > Lambda   and
            (P1/P)*(sqrt(P1) + rho*sqrt(a*P))^2 > Lambda + (1-rho^2)*a*P
    upper:  P1 + a*P + 2*rho*sqrt(a*P*P1) >= Lambda

where the strict inequalities are implemented as >= with a small margin and
an empty region yields rate 0 plus an infeasibility flag.
"""

import math
from dataclasses import dataclass

import numpy as np

LOG2 = np.log(2.0)

#: margin used to implement the strict inequalities of the lower-bound region
FEASIBILITY_EPS = 1e-12


class GaussianParamError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianSfdParams:
    """Power constraint tuple (P, P1, Lambda, sigma2)."""

    P: float
    P1: float
    Lambda: float
    sigma2: float

    def __post_init__(self):
        vals = (self.P, self.P1, self.Lambda, self.sigma2)
        if not all(np.isfinite(v) for v in vals):
            raise GaussianParamError("all parameters must be finite")
        if self.P < 0 or self.P1 < 0:
            raise GaussianParamError("P and P1 must be >= 0")
        if self.Lambda <= 0 or self.sigma2 <= 0:
            raise GaussianParamError("Lambda and sigma2 must be > 0")


@dataclass(frozen=True)
class PowerSplit:
    """Optimization variables: destination power share alpha, correlation rho."""

    alpha: float
    rho: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.rho <= 1.0):
            raise GaussianParamError("alpha and rho must lie in [0, 1]")


@dataclass(frozen=True)
class GridOptions:
    """Grid step on the (alpha, rho) square plus local zoom refinement."""

    step: float = 1e-3
    refine_rounds: int = 12
    refine_points: int = 41


@dataclass(frozen=True)
class BoundsReport:
    random_capacity: float
    det_lower: float
    det_upper: float
    direct_transmission: float
    random_split: PowerSplit
    lower_split: PowerSplit
    upper_split: PowerSplit
    lower_feasible: bool
    upper_feasible: bool


def _half_log2_1p(x):
    return 0.5 * np.log1p(np.maximum(x, 0.0)) / LOG2


def _fg_arrays(params, A, R):
    """Vectorized objective over alpha array A and rho array R (same shape)."""
    P, P1, Lam, s2 = params.P, params.P1, params.Lambda, params.sigma2
    cross = 2.0 * R * np.sqrt(A * P * P1)
    term1 = _half_log2_1p((P1 + A * P + cross) / Lam)
    term2 = _half_log2_1p((1.0 - A) * P / s2) + _half_log2_1p((1.0 - R * R) * A * P / Lam)
    return np.minimum(term1, term2)


def f_g(params: GaussianSfdParams, split: PowerSplit) -> float:
    """Evaluate the min-of-two-rates objective at one power split."""
    return float(_fg_arrays(params, np.asarray(split.alpha), np.asarray(split.rho)))


def _lower_mask(params, A, R):
    P, P1, Lam = params.P, params.P1, params.Lambda
    if P <= 0.0:
        return np.zeros_like(A, dtype=bool)
    c1 = (1.0 - R * R) * A * P >= Lam + FEASIBILITY_EPS
    c2 = (P1 / P) * (np.sqrt(P1) + R * np.sqrt(A * P)) ** 2 >= Lam + (1.0 - R * R) * A * P + FEASIBILITY_EPS
    return c1 & c2


def _upper_mask(params, A, R):
    P, P1, Lam = params.P, params.P1, params.Lambda
    return P1 + A * P + 2.0 * R * np.sqrt(A * P * P1) >= Lam


def _argmax_masked(ax, vals, mask):
    """Best cell of a precomputed value grid under an optional mask.

    Returns (value, alpha, rho, feasible).  The C-ordered flat argmax makes
    ties resolve to the lexicographically smallest (alpha, rho).
    """
    if mask is not None:
        if not mask.any():
            return 0.0, 0.0, 0.0, False
        vals = np.where(mask, vals, -np.inf)
    k = int(np.argmax(vals))
    i, j = divmod(k, ax.size)
    return float(vals[i, j]), float(ax[i]), float(ax[j]), True


def _zoom_refine(params, mask_fn, seeds, opts):
    """Shrinking local grids around each (alpha, rho, value) seed."""
    best_v, best_a, best_r = -np.inf, 0.0, 0.0
    npts = opts.refine_points
    for a0, r0, v0 in seeds:
        if v0 > best_v:
            best_v, best_a, best_r = v0, a0, r0
        w = 2.0 * opts.step
        ca, cr = a0, r0
        for _ in range(opts.refine_rounds):
            ax = np.linspace(max(0.0, ca - w), min(1.0, ca + w), npts)
            rx = np.linspace(max(0.0, cr - w), min(1.0, cr + w), npts)
            A, R = ax[:, None], rx[None, :]
            vals = _fg_arrays(params, A, R)
            if mask_fn is not None:
                feas = mask_fn(params, A, R)
                if not feas.any():
                    break
                vals = np.where(feas, vals, -np.inf)
            k = int(np.argmax(vals))
            i, j = divmod(k, npts)
            ca, cr = float(ax[i]), float(rx[j])
            if vals[i, j] > best_v:
                best_v, best_a, best_r = float(vals[i, j]), ca, cr
            w *= 0.5
    return best_v, best_a, best_r


def random_code_capacity(params: GaussianSfdParams, opts: GridOptions | None = None):
    """Shared-randomness capacity: max of the objective over the unit square.

    Returns (rate, PowerSplit).
    """
    opts = opts or GridOptions()
    if params.P == 0.0:
        return 0.0, PowerSplit(0.0, 0.0)
    m = int(round(1.0 / opts.step))
    ax = np.linspace(0.0, 1.0, m + 1)
    vals = _fg_arrays(params, ax[:, None], ax[None, :])
    v, a, r, _ = _argmax_masked(ax, vals, None)
    v, a, r = _zoom_refine(params, None, [(a, r, v)], opts)
    v, a, r = _ridge_polish(params, None, a, r, v, opts)
    return v, PowerSplit(a, r)


def det_code_bounds(params: GaussianSfdParams, opts: GridOptions | None = None) -> BoundsReport:
    """Deterministic-code lower/upper bounds plus the unconstrained maximum.

    Guarantees det_lower <= det_upper <= random_capacity exactly: the lower
    region is contained in the upper region, which sits inside the unit
    square, and every refined optimum is offered as a candidate to every
    program whose region contains it.  In the regime where one optimizer's
    point is feasible for all three programs the reported rates coincide to
    machine precision.
    """
    opts = opts or GridOptions()
    m = int(round(1.0 / opts.step))
    ax = np.linspace(0.0, 1.0, m + 1)
    A, R = ax[:, None], ax[None, :]
    vals = _fg_arrays(params, A, R)
    v_lo, a_lo, r_lo, feas_lo = _argmax_masked(ax, vals, _lower_mask(params, A, R))
    v_up, a_up, r_up, feas_up = _argmax_masked(ax, vals, _upper_mask(params, A, R))
    v_rc, a_rc, r_rc, _ = _argmax_masked(ax, vals, None)

    if feas_lo:
        v_lo, a_lo, r_lo = _zoom_refine(params, _lower_mask, [(a_lo, r_lo, v_lo)], opts)
        v_lo, a_lo, r_lo = _ridge_polish(params, _lower_mask, a_lo, r_lo, v_lo, opts)
    if feas_up:
        v_up, a_up, r_up = _zoom_refine(params, _upper_mask, [(a_up, r_up, v_up)], opts)
        v_up, a_up, r_up = _ridge_polish(params, _upper_mask, a_up, r_up, v_up, opts)
    v_rc, a_rc, r_rc = _zoom_refine(params, None, [(a_rc, r_rc, v_rc)], opts)
    v_rc, a_rc, r_rc = _ridge_polish(params, None, a_rc, r_rc, v_rc, opts)

    # cross-inject each refined point into the programs whose region holds it
    cands = [(v_rc, a_rc, r_rc)]
    if feas_up:
        cands.append((v_up, a_up, r_up))
    if feas_lo:
        cands.append((v_lo, a_lo, r_lo))
    if feas_lo:
        v_lo, a_lo, r_lo = max(
            [(v_lo, a_lo, r_lo)]
            + [c for c in cands if _point_feasible(params, _lower_mask, c[1], c[2])])
    if feas_up:
        v_up, a_up, r_up = max(
            [(v_up, a_up, r_up)]
            + [c for c in cands if _point_feasible(params, _upper_mask, c[1], c[2])])
        if feas_lo and v_lo > v_up:
            v_up, a_up, r_up = v_lo, a_lo, r_lo
    v_rc, a_rc, r_rc = max([(v_rc, a_rc, r_rc)] + [(v_up, a_up, r_up)] * feas_up
                           + [(v_lo, a_lo, r_lo)] * feas_lo)

    return BoundsReport(
        random_capacity=v_rc,
        det_lower=v_lo if feas_lo else 0.0,
        det_upper=v_up if feas_up else 0.0,
        direct_transmission=direct_transmission_rate(params),
        random_split=PowerSplit(a_rc, r_rc),
        lower_split=PowerSplit(a_lo, r_lo),
        upper_split=PowerSplit(a_up, r_up),
        lower_feasible=feas_lo,
        upper_feasible=feas_up,
    )


def _point_feasible(params, mask_fn, a, r):
    return bool(mask_fn(params, np.asarray(a), np.asarray(r)))


def _fg_scalar(params, a, r):
    P, P1, Lam, s2 = params.P, params.P1, params.Lambda, params.sigma2
    t1 = 0.5 * math.log1p(max((P1 + a * P + 2.0 * r * math.sqrt(a * P * P1)) / Lam, 0.0)) / LOG2
    t2 = (0.5 * math.log1p(max((1.0 - a) * P / s2, 0.0))
          + 0.5 * math.log1p(max((1.0 - r * r) * a * P / Lam, 0.0))) / LOG2
    return min(t1, t2)


def _lower_feas_scalar(params, a, r):
    P, P1, Lam = params.P, params.P1, params.Lambda
    if P <= 0.0:
        return False
    c1 = (1.0 - r * r) * a * P >= Lam + FEASIBILITY_EPS
    c2 = (P1 / P) * (math.sqrt(P1) + r * math.sqrt(a * P)) ** 2 \
        >= Lam + (1.0 - r * r) * a * P + FEASIBILITY_EPS
    return c1 and c2


def _upper_feas_scalar(params, a, r):
    P, P1, Lam = params.P, params.P1, params.Lambda
    return P1 + a * P + 2.0 * r * math.sqrt(a * P * P1) >= Lam


def _scalar_feasibility(mask_fn):
    if mask_fn is None:
        return None
    return {id(_lower_mask): _lower_feas_scalar,
            id(_upper_mask): _upper_feas_scalar}[id(mask_fn)]


def _rho_interval(params, mask_fn, a):
    """Feasible rho interval at fixed alpha, or None when empty.

    Every constraint is monotone in rho, so the feasible set per alpha is an
    interval whose endpoints are located by bisection.
    """
    if mask_fn is None:
        return 0.0, 1.0
    scalar_feas = _scalar_feasibility(mask_fn)

    def feas(r):
        return scalar_feas(params, a, r)

    f0, f1 = feas(0.0), feas(1.0)
    if f0 and f1:
        return 0.0, 1.0
    if not f0 and not f1:
        # the set could still be an interior interval for the lower region
        # (c1 caps rho from above, c2 bounds it from below)
        probe = np.linspace(0.0, 1.0, 65)
        hits = [r for r in probe if feas(r)]
        if not hits:
            return None
        inner = hits[len(hits) // 2]
        lo = _bisect_feasibility(feas, 0.0, inner, want_left_infeasible=True)
        hi = _bisect_feasibility(feas, inner, 1.0, want_left_infeasible=False)
        return lo, hi
    if f0:
        return 0.0, _bisect_feasibility(feas, 0.0, 1.0, want_left_infeasible=False)
    return _bisect_feasibility(feas, 0.0, 1.0, want_left_infeasible=True), 1.0


def _bisect_feasibility(feas, lo, hi, want_left_infeasible, iters=80):
    """Boundary of a one-sided feasible interval; returns a feasible endpoint."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feas(mid) == want_left_infeasible:
            hi = mid
        else:
            lo = mid
    return hi if want_left_infeasible else lo


def _ridge_polish(params, mask_fn, a0, r0, v0, opts):
    """Nested coordinate golden refinement around (a0, r0).

    Inner pass: exact golden maximization over the feasible rho interval (the
    objective along rho is the min of an increasing and a decreasing term,
    hence unimodal).  Outer pass: golden over alpha of the inner value.
    Returns the best of the polish and the seed; every reported value is an
    exact objective evaluation at a feasible point.
    """
    from .optimize import golden_section_max

    def inner(a):
        iv = _rho_interval(params, mask_fn, a)
        if iv is None:
            return -np.inf, r0
        r, v = golden_section_max(lambda rr: _fg_scalar(params, a, rr),
                                  iv[0], iv[1], tol=1e-12)
        return v, r

    a_c, w = a0, 8.0 * opts.step
    best = (v0, a0, r0)
    for _ in range(2):
        lo, hi = max(0.0, a_c - w), min(1.0, a_c + w)
        a_best, _ = golden_section_max(lambda aa: inner(aa)[0], lo, hi, tol=1e-11)
        v_in, r_best = inner(a_best)
        scalar_feas = _scalar_feasibility(mask_fn)
        if np.isfinite(v_in) and v_in > best[0] and (
                scalar_feas is None or scalar_feas(params, a_best, r_best)):
            best = (v_in, a_best, r_best)
        a_c = best[1]
    return best


def direct_transmission_rate(params: GaussianSfdParams) -> float:
    """Rate of ignoring the relay band: objective at (1, 0) when P > Lambda, else 0."""
    if params.P > params.Lambda:
        return f_g(params, PowerSplit(1.0, 0.0))
    return 0.0


def gavc_point_to_point(P: float, Lambda: float, sigma2: float):
    """Jammed point-to-point Gaussian channel: (random_rate, deterministic_rate).

    random_rate = 0.5*log2(1 + P/(sigma2+Lambda)); without shared randomness
    the rate survives exactly when Lambda < P, and collapses to 0 otherwise.
    """
    if Lambda <= 0 or sigma2 <= 0 or P < 0:
        raise GaussianParamError("need P >= 0 and Lambda, sigma2 > 0")
    random_rate = float(_half_log2_1p(P / (sigma2 + Lambda)))
    det_rate = random_rate if Lambda < P else 0.0
    return random_rate, det_rate


def primitive_gaussian_capacity(P: float, Lambda: float, C1: float,
                                opts: GridOptions | None = None):
    """Capacity of the relay-over-a-bit-pipe variant: 1-D maximization over alpha.

    objective(alpha) = 0.5*log2(1 + alpha*P/Lambda)
                       + min(C1, 0.5*log2(1 + (1-alpha)*P/Lambda))

    Returns (rate, alpha_star).
    """
    if C1 < 0:
        raise GaussianParamError("C1 must be >= 0")
    if Lambda <= 0:
        raise GaussianParamError("Lambda must be > 0")
    opts = opts or GridOptions()
    if P == 0.0:
        return 0.0, 0.0

    def obj(alpha):
        a = np.asarray(alpha)
        return _half_log2_1p(a * P / Lambda) + np.minimum(C1, _half_log2_1p((1.0 - a) * P / Lambda))

    from .optimize import zoom_grid_max_1d

    coarse = int(round(1.0 / opts.step)) + 1
    a_star, v = zoom_grid_max_1d(obj, 0.0, 1.0, coarse=coarse,
                                 rounds=opts.refine_rounds, points=opts.refine_points)
    return float(v), float(a_star)


@dataclass(frozen=True)
class SweepRow:
    P: float
    random_capacity: float
    det_lower: float
    det_upper: float
    direct_transmission: float


def figure_sweep(p_values, Lambda: float, sigma2: float,
                 opts: GridOptions | None = None):
    """Bounds as a function of P with P1 = P; one SweepRow per requested P."""
    p_values = [float(p) for p in p_values]
    if not p_values:
        raise GaussianParamError("empty sweep range")
    rows = []
    for p in p_values:
        params = GaussianSfdParams(P=p, P1=p, Lambda=Lambda, sigma2=sigma2)
        rep = det_code_bounds(params, opts)
        rows.append(SweepRow(P=p,
                             random_capacity=rep.random_capacity,
                             det_lower=rep.det_lower,
                             det_upper=rep.det_upper,
                             direct_transmission=rep.direct_transmission))
    return rows


def sweep_range(p_min: float, p_max: float, step: float):
    """Inclusive arithmetic grid from p_min to p_max."""
    if step <= 0:
        raise GaussianParamError("step must be > 0")
    if p_max < p_min:
        raise GaussianParamError("empty sweep range")
    count = int(np.floor((p_max - p_min) / step + 1e-9)) + 1
    return [p_min + i * step for i in range(count)]


def write_sweep_csv(rows, path):
    """CSV with 9 significant digits per value."""
    with open(path, "w") as fh:
        fh.write("P,random_capacity,det_lower,det_upper,direct_transmission\n")
        for r in rows:
            fh.write(",".join(f"{v:.9g}" for v in
                              (r.P, r.random_capacity, r.det_lower,
                               r.det_upper, r.direct_transmission)) + "\n")


def gaussian_mi_quadrature(P: float, N: float, order: int = 120) -> float:
    """I(X; X+S) for independent X ~ N(0,P), S ~ N(0,N) by Gauss-Hermite quadrature.

    Integrates the differential entropies of X+S and S numerically; the
    closed form is 0.5*log2(1 + P/N).  Used as an independent cross-check of
    the rate formulas.
    """
    nodes, weights = np.polynomial.hermite.hermgauss(order)

    def entropy_bits(var):
        # h(Y) = -E[log2 f(Y)] for Y ~ N(0, var), with y = sqrt(2 var) x
        y = np.sqrt(2.0 * var) * nodes
        log_f = -0.5 * y * y / var - 0.5 * np.log(2.0 * np.pi * var)
        return float(-(weights * log_f).sum() / np.sqrt(np.pi) / LOG2)

    return entropy_bits(P + N) - entropy_bits(N)
