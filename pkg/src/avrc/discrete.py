"""Finite-alphabet jammed relay channels: information quantities and verdicts.

A channel here is a 4-index kernel W[x, s, y, y1]: for each input x and state
s, a joint pmf over the destination output y and the relay observation y1.
The relay talks to the destination over a noiseless link of `relay_rate` bits
per use.  The module computes exact finite-sum mutual informations, decides
symmetrizability by linear programming, classifies degradedness by factor
checks, evaluates the cutset and decode-forward bounds by nested simplex
optimization, and applies the capacity classification rules.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .optimize import search_simplex, simplex_grid, _simplex_count

PMF_TOL = 1e-12


class ChannelFormatError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    """Requested alphabet sizes exceed the configured optimization budget."""


def validate_pmf(p, tol=PMF_TOL):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ChannelFormatError("pmf must be a nonempty vector")
    if (p < -tol).any() or abs(p.sum() - 1.0) > tol:
        raise ChannelFormatError("pmf entries must be >= 0 and sum to 1")
    return np.clip(p, 0.0, None)


@dataclass(frozen=True)
class Dmc:
    """State-dependent relay channel kernel plus the relay-link rate (bits/use)."""

    kernel: np.ndarray  # shape (X, S, Y, Y1)
    relay_rate: float = 0.0

    def __post_init__(self):
        W = np.asarray(self.kernel, dtype=float)
        if W.ndim != 4:
            raise ChannelFormatError("kernel must have shape (X, S, Y, Y1)")
        if (W < -PMF_TOL).any():
            raise ChannelFormatError("kernel entries must be >= 0")
        sums = W.sum(axis=(2, 3))
        bad = np.argwhere(np.abs(sums - 1.0) > PMF_TOL)
        if bad.size:
            x, s = bad[0]
            raise ChannelFormatError(
                f"slice (x={x}, s={s}) sums to {sums[x, s]!r}, not 1")
        if self.relay_rate < 0:
            raise ChannelFormatError("relay_rate must be >= 0")
        object.__setattr__(self, "kernel", W)

    @property
    def nx(self):
        return self.kernel.shape[0]

    @property
    def ns(self):
        return self.kernel.shape[1]

    @property
    def ny(self):
        return self.kernel.shape[2]

    @property
    def ny1(self):
        return self.kernel.shape[3]

    def receiver_marginal(self):
        """W[x, s, y]: destination-output marginal."""
        return self.kernel.sum(axis=3)

    def relay_marginal(self):
        """W[x, s, y1]: relay-observation marginal."""
        return self.kernel.sum(axis=2)

    def joint_output(self):
        """W[x, s, (y, y1)] flattened over the output pair."""
        X, S, Y, Y1 = self.kernel.shape
        return self.kernel.reshape(X, S, Y * Y1)


def dmc_from_json(obj) -> Dmc:
    """Parse {"X":..,"S":..,"Y":..,"Y1":..,"C1":..,"W":[[[[...]]]]}, W indexed [x][s][y][y1]."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        dims = tuple(int(obj[k]) for k in ("X", "S", "Y", "Y1"))
        c1 = float(obj["C1"])
        W = np.asarray(obj["W"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ChannelFormatError(f"malformed channel object: {exc}") from exc
    if W.shape != dims:
        raise ChannelFormatError(f"W has shape {W.shape}, expected {dims}")
    return Dmc(kernel=W, relay_rate=c1)


def dmc_to_json(dmc: Dmc) -> dict:
    return {"X": dmc.nx, "S": dmc.ns, "Y": dmc.ny, "Y1": dmc.ny1,
            "C1": dmc.relay_rate, "W": dmc.kernel.tolist()}


# ---------------------------------------------------------------------------
# mutual information (exact finite sums, in bits)
# ---------------------------------------------------------------------------

def mutual_information(p, q, channel) -> float:
    """I(X; O) for X ~ p, S ~ q independent, pushed through channel[x, s, o]."""
    W = np.asarray(channel, dtype=float)
    p = validate_pmf(p)
    q = validate_pmf(q)
    if W.ndim != 3 or W.shape[0] != p.size or W.shape[1] != q.size:
        raise ChannelFormatError("channel dimensions do not match the pmfs")
    wq = np.einsum("s,xso->xo", q, W)
    return float(_mi_rows(p[None, :], wq[None, :, :])[0])


def _mi_rows(P, WQ):
    """I(X;O) for batched priors P (N,X) and batched row kernels WQ (N,X,O)."""
    joint = P[:, :, None] * WQ
    out = joint.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log2(np.where(joint > 0, WQ, 1.0)) - np.log2(
            np.where(joint > 0, out[:, None, :], 1.0))
    return (np.where(joint > 0, joint * ratio, 0.0)).sum(axis=(1, 2))


def _wq_batch(Q, W3):
    """Averaged kernels for a batch of state pmfs: (N,S)x(X,S,O) -> (N,X,O)."""
    return np.einsum("ns,xso->nxo", Q, W3)


def _mi_uy_rows(Pux, WQ):
    """I(U;O) for fixed joint p(u,x) and batched kernels WQ (N,X,O)."""
    J = np.einsum("ux,nxo->nuo", Pux, WQ)
    pu = Pux.sum(axis=1)
    out = J.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log2(np.where(J > 0, J, 1.0)) - np.log2(
            np.where(J > 0, pu[None, :, None] * out[:, None, :], 1.0))
    return (np.where(J > 0, J * ratio, 0.0)).sum(axis=(1, 2))


def _mi_xy_given_u_rows(Pux, WQ):
    """I(X;O|U) for fixed joint p(u,x) and batched kernels WQ (N,X,O)."""
    pu = Pux.sum(axis=1)
    T = Pux[None, :, :, None] * WQ[:, None, :, :]   # (N,U,X,O)
    J = T.sum(axis=2)                               # (N,U,O)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (np.log2(np.where(T > 0, WQ[:, None, :, :], 1.0))
                 + np.log2(np.where(T > 0, pu[None, :, None, None], 1.0))
                 - np.log2(np.where(T > 0, J[:, :, None, :], 1.0)))
    return (np.where(T > 0, T * ratio, 0.0)).sum(axis=(1, 2, 3))


# ---------------------------------------------------------------------------
# symmetrizability (linear feasibility via an LP on the max residual)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymVerdict:
    symmetrizable: bool
    witness: np.ndarray | None
    max_residual: float


def residual_of_witness(channel, J) -> float:
    """Max absolute defect of the averaging identity for a candidate J(s|x)."""
    W = np.asarray(channel, dtype=float)
    J = np.asarray(J, dtype=float)
    lhs = np.einsum("xso,ts->xto", W, J)   # sum_s W(o|x,s) J(s|t)
    return float(np.abs(lhs - lhs.transpose(1, 0, 2)).max())


def symmetrizability(channel, tol: float = 1e-9) -> SymVerdict:
    """Decide whether some J(s|x) averages the channel into a symmetric one.

    Minimizes the maximum violation of

        sum_s W(o|x,s) J(s|xt)  ==  sum_s W(o|xt,s) J(s|x)    for all x, xt, o

    over row-stochastic J, and declares symmetrizable iff the optimum is
    within tol.  The returned witness is re-verified independently.
    """
    W = np.asarray(channel, dtype=float)
    if W.ndim != 3:
        raise ChannelFormatError("channel must have shape (X, S, O)")
    X, S, O = W.shape
    if X == 1:
        J = np.full((1, S), 1.0 / S)
        return SymVerdict(True, J, residual_of_witness(W, J))

    nvar = X * S + 1   # J entries plus the residual bound t

    def jidx(x, s):
        return x * S + s

    rows, rhs = [], []
    for x in range(X):
        for xt in range(x + 1, X):
            for o in range(O):
                row = np.zeros(nvar)
                row[[jidx(xt, s) for s in range(S)]] += W[x, :, o]
                row[[jidx(x, s) for s in range(S)]] -= W[xt, :, o]
                row[-1] = -1.0
                rows.append(row.copy())
                rhs.append(0.0)
                row[:-1] *= -1.0
                rows.append(row)
                rhs.append(0.0)
    A_ub = np.array(rows)
    b_ub = np.array(rhs)
    A_eq = np.zeros((X, nvar))
    for x in range(X):
        A_eq[x, x * S:(x + 1) * S] = 1.0
    b_eq = np.ones(X)
    c = np.zeros(nvar)
    c[-1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * (X * S) + [(0, None)], method="highs")
    if not res.success:
        raise RuntimeError(f"symmetrizability LP failed: {res.message}")
    J = np.clip(res.x[:-1].reshape(X, S), 0.0, None)
    J /= J.sum(axis=1, keepdims=True)
    resid = residual_of_witness(W, J)
    ok = resid <= tol
    return SymVerdict(ok, J if ok else None, resid)


# ---------------------------------------------------------------------------
# degradedness factor checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegradednessReport:
    label: str            # strongly_degraded | reversely_strongly_degraded |
                          # degraded_only | reversely_degraded_only | neither
    degraded: bool
    reversely_degraded: bool
    factors: dict = field(default_factory=dict)


def _safe_div(num, den):
    out = np.where(den > 0, num, 0.0) / np.where(den > 0, den, 1.0)
    return out


def degradedness_classify(dmc: Dmc, tol: float = 1e-9) -> DegradednessReport:
    """Test the two factorizations of the kernel and their state-independent forms.

    Candidate factors are extracted from conditionals of the kernel (inputs
    mixed uniformly); conditionals of zero-probability events default to
    uniform rows, which never enter the reconstruction residual because the
    corresponding kernel mass is zero.
    """
    W = dmc.kernel
    X, S, Y, Y1 = W.shape
    m_relay = dmc.relay_marginal()       # (X,S,Y1)
    m_recv = dmc.receiver_marginal()     # (X,S,Y)

    # degraded: W = m_relay(y1|x,s) * B(y|y1,s)
    num = W.sum(axis=0)                  # (S,Y,Y1)
    den = m_relay.sum(axis=0)            # (S,Y1)
    B = _safe_div(num.transpose(2, 0, 1), den.T[:, :, None])   # (Y1,S,Y)
    B = np.where(den.T[:, :, None] > 0, B, 1.0 / Y)
    recon = np.einsum("xsk,ksy->xsyk", m_relay, B)
    degraded = bool(np.abs(recon - W).max() <= tol)

    # reversely degraded: W = m_recv(y|x,s) * B1(y1|y,s)
    num_r = W.sum(axis=0)                # (S,Y,Y1)
    den_r = m_recv.sum(axis=0)           # (S,Y)
    B1 = _safe_div(num_r.transpose(1, 0, 2), den_r.T[:, :, None])  # (Y,S,Y1)
    B1 = np.where(den_r.T[:, :, None] > 0, B1, 1.0 / Y1)
    recon_r = np.einsum("xsy,ysk->xsyk", m_recv, B1)
    reversely = bool(np.abs(recon_r - W).max() <= tol)

    # strongly degraded: relay marginal state-independent on top of degraded
    relay_dev = float(np.abs(m_relay - m_relay.mean(axis=1, keepdims=True)).max())
    strongly = degraded and relay_dev <= tol

    # reversely strongly degraded: a single B1(y1|y) reconstructs the kernel
    num_p = W.sum(axis=(0, 1))           # (Y,Y1)
    den_p = m_recv.sum(axis=(0, 1))      # (Y,)
    B1p = _safe_div(num_p, den_p[:, None])
    B1p = np.where(den_p[:, None] > 0, B1p, 1.0 / Y1)
    recon_p = np.einsum("xsy,yk->xsyk", m_recv, B1p)
    reversely_strongly = bool(np.abs(recon_p - W).max() <= tol)

    if strongly:
        label = "strongly_degraded"
    elif reversely_strongly:
        label = "reversely_strongly_degraded"
    elif degraded:
        label = "degraded_only"
    elif reversely:
        label = "reversely_degraded_only"
    else:
        label = "neither"
    factors = {
        "relay_marginal": m_relay,
        "receiver_marginal": m_recv,
        "degraded_factor": B,
        "reverse_factor": B1,
        "state_free_reverse_factor": B1p,
    }
    return DegradednessReport(label=label, degraded=degraded,
                              reversely_degraded=reversely, factors=factors)


# ---------------------------------------------------------------------------
# cutset and decode-forward bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundOptions:
    q_resolution: int = 64
    p_resolution: int = 128
    refine_rounds: int = 8
    multistart_top: int = 6
    aux_starts: int = 12
    seed: int = 0
    max_grid_points: int = 200_000
    max_kernel_entries: int = 1_000_000


def _check_budget(dmc, opts):
    if dmc.kernel.size > opts.max_kernel_entries:
        raise ResourceLimitError(
            f"kernel has {dmc.kernel.size} entries, budget {opts.max_kernel_entries}")
    for k, res in ((dmc.ns, opts.q_resolution), (dmc.nx, opts.p_resolution)):
        if k <= 3:
            continue
        if _simplex_count(k, 12) > opts.max_grid_points:
            raise ResourceLimitError(f"simplex dimension {k} exceeds the grid budget")


def _normalize_state_set(dmc, state_set):
    if state_set is None or (isinstance(state_set, str) and state_set == "simplex"):
        return None
    Q = np.atleast_2d(np.asarray(state_set, dtype=float))
    if Q.shape[1] != dmc.ns:
        raise ChannelFormatError("state set rows must be pmfs over S")
    for row in Q:
        validate_pmf(row)
    return Q


def _min_over_q(objective_batch, ns, qset, opts, rng):
    """Minimize a batched function of q over the simplex or an explicit set."""
    if qset is not None:
        vals = objective_batch(qset)
        k = int(np.argmin(vals))
        return qset[k], float(vals[k])
    res = opts.q_resolution if ns <= 3 else None
    q, v = search_simplex(objective_batch, ns, minimize=True, resolution=res,
                          rounds=opts.refine_rounds, top=opts.multistart_top,
                          rng=rng, max_grid_points=opts.max_grid_points)
    return q, v


def cutset_bound(dmc: Dmc, state_set=None, opts: BoundOptions | None = None) -> float:
    """inf over state pmfs of max over input pmfs of
    min{ I(X;Y) + C1, I(X;Y,Y1) }."""
    opts = opts or BoundOptions()
    _check_budget(dmc, opts)
    qset = _normalize_state_set(dmc, state_set)
    rng = np.random.default_rng(opts.seed)
    W_y = dmc.receiver_marginal()
    W_j = dmc.joint_output()
    c1 = dmc.relay_rate

    def inner_max(q):
        wq_y = _wq_batch(q[None, :], W_y)[0]
        wq_j = _wq_batch(q[None, :], W_j)[0]

        def f_batch(P):
            return np.minimum(_mi_rows(P, np.broadcast_to(wq_y, (P.shape[0],) + wq_y.shape)) + c1,
                              _mi_rows(P, np.broadcast_to(wq_j, (P.shape[0],) + wq_j.shape)))

        res = opts.p_resolution if dmc.nx <= 3 else None
        _, v = search_simplex(f_batch, dmc.nx, resolution=res,
                              rounds=opts.refine_rounds, top=opts.multistart_top,
                              rng=rng, max_grid_points=opts.max_grid_points)
        return v

    def outer_batch(Q):
        return np.array([inner_max(q) for q in Q])

    _, v = _min_over_q(outer_batch, dmc.ns, qset, opts, rng)
    return float(v)


def _q_pool(dmc, qset, opts, rng):
    """Fixed pool of state pmfs used while searching over inputs.

    Final values are always re-evaluated with a refined q-minimization, so
    this pool only steers the search.
    """
    if qset is not None:
        return qset
    if dmc.ns <= 3:
        return simplex_grid(dmc.ns, opts.q_resolution)
    return np.concatenate([np.eye(dmc.ns),
                           np.full((1, dmc.ns), 1.0 / dmc.ns),
                           rng.dirichlet(np.ones(dmc.ns), size=192)])


def _mi_xy_grid(Pb, WQ):
    """I(X;O) for candidate priors Pb (C,X) against kernels WQ (N,X,O) -> (C,N)."""
    joint = Pb[:, None, :, None] * WQ[None, :, :, :]
    out = joint.sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log2(np.where(joint > 0, WQ[None, :, :, :], 1.0)) - np.log2(
            np.where(joint > 0, out[:, :, None, :], 1.0))
    return (np.where(joint > 0, joint * ratio, 0.0)).sum(axis=(2, 3))


def _mi_uy_grid(Pb, WQ):
    """I(U;O) for candidate joints Pb (C,U,X) against kernels WQ (N,X,O) -> (C,N)."""
    J = np.einsum("cux,nxo->cnuo", Pb, WQ)
    pu = Pb.sum(axis=2)
    out = J.sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log2(np.where(J > 0, J, 1.0)) - np.log2(
            np.where(J > 0, pu[:, None, :, None] * out[:, :, None, :], 1.0))
    return (np.where(J > 0, J * ratio, 0.0)).sum(axis=(2, 3))


def _mi_xyu_grid(Pb, WQ):
    """I(X;O|U) for candidate joints Pb (C,U,X) against kernels WQ (N,X,O) -> (C,N)."""
    pu = Pb.sum(axis=2)
    T = Pb[:, None, :, :, None] * WQ[None, :, None, :, :]   # (C,N,U,X,O)
    J = T.sum(axis=3)                                       # (C,N,U,O)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (np.log2(np.where(T > 0, WQ[None, :, None, :, :], 1.0))
                 + np.log2(np.where(T > 0, pu[:, None, :, None, None], 1.0))
                 - np.log2(np.where(T > 0, J[:, :, :, None, :], 1.0)))
    return (np.where(T > 0, T * ratio, 0.0)).sum(axis=(2, 3, 4))


def _qmin_xy_refined(p, W3, dmc, qset, opts, rng):
    """Tight min over q of I(X;O) at a fixed prior p."""
    def over_q(Q):
        return _mi_rows(np.broadcast_to(p, (Q.shape[0], p.size)), _wq_batch(Q, W3))
    return _min_over_q(over_q, dmc.ns, qset, opts, rng)[1]


def _df_direct(dmc, qset, opts, rng):
    """max_p of min_q I(X;Y): the no-relay-help rate.  Returns (value, p*)."""
    W_y = dmc.receiver_marginal()
    WQ = _wq_batch(_q_pool(dmc, qset, opts, rng), W_y)

    def obj_p(P):
        return _mi_xy_grid(P, WQ).min(axis=1)

    res = opts.p_resolution if dmc.nx <= 3 else None
    p, _ = search_simplex(obj_p, dmc.nx, resolution=res, rounds=opts.refine_rounds,
                          top=2, rng=rng, max_grid_points=opts.max_grid_points)
    return _qmin_xy_refined(p, W_y, dmc, qset, opts, rng), p


def _df_full(dmc, qset, opts, rng):
    """max_p of min{min_q I(X;Y) + C1, min_q I(X;Y1)}.  Returns (value, p*)."""
    W_y = dmc.receiver_marginal()
    W_1 = dmc.relay_marginal()
    c1 = dmc.relay_rate
    WQy = _wq_batch(_q_pool(dmc, qset, opts, rng), W_y)
    WQ1 = _wq_batch(_q_pool(dmc, qset, opts, rng), W_1)

    def obj_p(P):
        return np.minimum(_mi_xy_grid(P, WQy).min(axis=1) + c1,
                          _mi_xy_grid(P, WQ1).min(axis=1))

    res = opts.p_resolution if dmc.nx <= 3 else None
    p, _ = search_simplex(obj_p, dmc.nx, resolution=res, rounds=opts.refine_rounds,
                          top=2, rng=rng, max_grid_points=opts.max_grid_points)
    v = min(_qmin_xy_refined(p, W_y, dmc, qset, opts, rng) + c1,
            _qmin_xy_refined(p, W_1, dmc, qset, opts, rng))
    return float(v), p


def df_bound(dmc: Dmc, state_set=None, aux_size: int | None = None,
             mode: str = "aux", opts: BoundOptions | None = None) -> float:
    """Partial decode-forward lower bound.

    mode "direct": U absent — max_p min_q I(X;Y).
    mode "full":   U = X — max_p min{min_q I(X;Y)+C1, min_q I(X;Y1)}.
    mode "aux":    free auxiliary of cardinality aux_size (default |X|+1);
                   maximizes over joints p(u,x) the displayed combination

        min{ [min_q I(U;Y)] + [min_q I(X;Y|U)] + C1,
             [min_q I(U;Y1)] + [min_q I(X;Y|U)] }

    with each minimum over q taken separately, by seeded multi-start search.
    The "direct" and "full" optima are embedded as starting points, so the
    general mode never reports less than the special modes.
    """
    opts = opts or BoundOptions()
    _check_budget(dmc, opts)
    qset = _normalize_state_set(dmc, state_set)
    rng = np.random.default_rng(opts.seed)

    if mode == "direct":
        return _df_direct(dmc, qset, opts, rng)[0]
    if mode == "full":
        return _df_full(dmc, qset, opts, rng)[0]
    if mode != "aux":
        raise ValueError("mode must be one of direct|full|aux")

    nu = aux_size if aux_size is not None else dmc.nx + 1
    if nu < 1:
        raise ChannelFormatError("aux cardinality must be >= 1")
    nx = dmc.nx
    W_y = dmc.receiver_marginal()
    W_1 = dmc.relay_marginal()
    c1 = dmc.relay_rate
    WQy = _wq_batch(_q_pool(dmc, qset, opts, rng), W_y)
    WQ1 = _wq_batch(_q_pool(dmc, qset, opts, rng), W_1)

    v_direct, p_direct = _df_direct(dmc, qset, opts, rng)
    v_full, p_full = _df_full(dmc, qset, opts, rng)

    # embed the special modes into the joint p(u,x)
    start_direct = np.zeros((nu, nx))
    start_direct[0, :] = p_direct
    start_full = np.zeros((nu, nx))
    start_full[:nx, :nx] = np.diag(p_full)

    dim = nu * nx
    starts = [start_direct.ravel(), start_full.ravel(), np.full(dim, 1.0 / dim)]
    starts += [rng.dirichlet(np.ones(dim)) for _ in range(opts.aux_starts)]

    def batch_obj(Pflat):
        Pb = Pflat.reshape(-1, nu, nx)
        term_b = _mi_xyu_grid(Pb, WQy).min(axis=1)
        term_a = _mi_uy_grid(Pb, WQy).min(axis=1)
        term_c = _mi_uy_grid(Pb, WQ1).min(axis=1)
        return np.minimum(term_a + term_b + c1, term_c + term_b)

    p_best, _ = search_simplex(batch_obj, dim, resolution=None,
                               rounds=opts.refine_rounds, top=opts.multistart_top,
                               rng=rng, extra_starts=np.array(starts),
                               max_grid_points=opts.max_grid_points)

    # re-evaluate the winner with tight per-term q-minimizations
    Pux = p_best.reshape(nu, nx)

    def term(fn, W3):
        def over_q(Q):
            return fn(Pux, _wq_batch(Q, W3))
        return _min_over_q(over_q, dmc.ns, qset, opts, rng)[1]

    a = term(_mi_uy_rows, W_y)
    b = term(_mi_xy_given_u_rows, W_y)
    c = term(_mi_uy_rows, W_1)
    v = min(a + b + c1, c + b)
    return float(max(v, v_direct, v_full))


def minimax_receiver_information(dmc: Dmc, order: str = "qp",
                                 opts: BoundOptions | None = None) -> float:
    """min-max (order "qp") or max-min (order "pq") of I(X;Y) over q and p."""
    opts = opts or BoundOptions()
    _check_budget(dmc, opts)
    rng = np.random.default_rng(opts.seed)
    W_y = dmc.receiver_marginal()

    if order == "pq":
        return _df_direct(dmc, None, opts, rng)[0]
    if order != "qp":
        raise ValueError("order must be 'qp' or 'pq'")

    def outer_batch(Q):
        vals = np.empty(Q.shape[0])
        for i, q in enumerate(Q):
            wq = _wq_batch(q[None, :], W_y)[0]

            def f_batch(P, wq=wq):
                return _mi_rows(P, np.broadcast_to(wq, (P.shape[0],) + wq.shape))

            res = opts.p_resolution if dmc.nx <= 3 else None
            _, vals[i] = search_simplex(f_batch, dmc.nx, resolution=res,
                                        rounds=opts.refine_rounds, top=2, rng=rng,
                                        max_grid_points=opts.max_grid_points)
        return vals

    _, v = _min_over_q(outer_batch, dmc.ns, None, opts, rng)
    return float(v)


# ---------------------------------------------------------------------------
# capacity classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CapacityClassification:
    verdict: str                 # equals_random_capacity | zero | undetermined
    clause: int | None           # which classification rule fired (1..4)
    df_lower: float | None
    cs_upper: float | None
    exact_value: float | None
    relay_marginal_symmetrizable: bool
    joint_output_symmetrizable: bool
    degradedness: str
    aux_size: int | None = None


def classify_capacity(dmc: Dmc, tol: float = 1e-9,
                      opts: BoundOptions | None = None) -> CapacityClassification:
    """Apply the deterministic-code capacity rules in order of decisiveness.

    1. joint-output channel symmetrizable        -> capacity 0
    2. relay marginal non-symmetrizable, C1 > 0  -> capacity equals the
       shared-randomness capacity; if additionally reversely strongly
       degraded or strongly degraded (with distinct relay rows) the value is
       computed in closed form, otherwise the decode-forward / cutset
       sandwich is attached.
    Anything else is undetermined (bounds still attached).
    """
    opts = opts or BoundOptions()
    joint = symmetrizability(dmc.joint_output(), tol)
    if joint.symmetrizable:
        return CapacityClassification(
            verdict="zero", clause=4, df_lower=0.0, cs_upper=0.0, exact_value=0.0,
            relay_marginal_symmetrizable=symmetrizability(dmc.relay_marginal(), tol).symmetrizable,
            joint_output_symmetrizable=True,
            degradedness=degradedness_classify(dmc, tol).label)

    relay = symmetrizability(dmc.relay_marginal(), tol)
    deg = degradedness_classify(dmc, tol)
    if not relay.symmetrizable and dmc.relay_rate > 0:
        if deg.label == "reversely_strongly_degraded":
            v = minimax_receiver_information(dmc, "qp", opts)
            return CapacityClassification("equals_random_capacity", 2, v, v, v,
                                          False, False, deg.label)
        if deg.label == "strongly_degraded":
            m1 = deg.factors["relay_marginal"].mean(axis=1)   # (X,Y1), state-free
            rows_distinct = bool(np.abs(m1[:, None, :] - m1[None, :, :]).max() > tol)
            if rows_distinct:
                v = _strongly_degraded_value(dmc, m1, opts)
                return CapacityClassification("equals_random_capacity", 3, v, v, v,
                                              False, False, deg.label)
        aux = dmc.nx + 1
        r_df = df_bound(dmc, None, aux, "aux", opts)
        r_cs = cutset_bound(dmc, None, opts)
        return CapacityClassification("equals_random_capacity", 1, r_df, r_cs, None,
                                      False, False, deg.label, aux_size=aux)

    aux = dmc.nx + 1
    r_df = df_bound(dmc, None, aux, "aux", opts)
    r_cs = cutset_bound(dmc, None, opts)
    return CapacityClassification("undetermined", None, r_df, r_cs, None,
                                  relay.symmetrizable, False, deg.label, aux_size=aux)


def _strongly_degraded_value(dmc, relay_rows, opts):
    """max_p min{ min_q I(X;Y) + C1, I(X;Y1) } with a state-free relay marginal."""
    rng = np.random.default_rng(opts.seed)
    W_y = dmc.receiver_marginal()
    c1 = dmc.relay_rate
    W1 = relay_rows[:, None, :]   # fake single-state kernel for I(X;Y1)

    def obj_p(P):
        vals = np.empty(P.shape[0])
        i_xy1 = _mi_rows(P, np.broadcast_to(W1[:, 0, :], (P.shape[0],) + relay_rows.shape))
        for i, p in enumerate(P):
            def over_q(Q, p=p):
                return _mi_rows(np.broadcast_to(p, (Q.shape[0], p.size)), _wq_batch(Q, W_y))
            _, v = _min_over_q(over_q, dmc.ns, None, opts, rng)
            vals[i] = min(v + c1, i_xy1[i])
        return vals

    res = min(opts.p_resolution, 32) if dmc.nx <= 3 else None
    _, v = search_simplex(obj_p, dmc.nx, resolution=res, rounds=opts.refine_rounds,
                          top=2, rng=rng, max_grid_points=opts.max_grid_points)
    return float(v)


# ---------------------------------------------------------------------------
# the binary illustrative channel and its length-1 zero-error code
# ---------------------------------------------------------------------------

def binary_pipe_dmc(relay_rate: float = 1.0) -> Dmc:
    """Y = X + S over {0,1,2}; Y1 = X(1-S) over {0,1}; noiseless unit-rate pipe."""
    W = np.zeros((2, 2, 3, 2))
    for x in range(2):
        for s in range(2):
            W[x, s, x + s, x * (1 - s)] = 1.0
    return Dmc(kernel=W, relay_rate=relay_rate)


@dataclass(frozen=True)
class SingleUseTrial:
    message: int
    state: int
    y: int
    y1: int
    decoded: int
    error: int


def single_use_code_table():
    """Exhaustive (message, state) table of the length-1 code on binary_pipe_dmc.

    Encoder sends the message bit; the relay forwards its observation over
    the pipe; the decoder maps y=0 -> 0, y=2 -> 1, y=1 -> the forwarded bit.
    All four trials decode correctly, certifying one bit per use with zero
    error against every state choice.
    """
    rows = []
    for m in range(2):
        for s in range(2):
            y = m + s
            y1 = m * (1 - s)
            ell = y1
            decoded = 0 if y == 0 else (1 if y == 2 else ell)
            rows.append(SingleUseTrial(m, s, y, y1, decoded, int(decoded != m)))
    return rows
