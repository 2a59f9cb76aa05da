"""Block-Markov spherical codec for the jammed Gaussian relay channel.

B blocks of n symbols carry B-1 message pairs (m1, m2): the m1 stream is
decoded by the relay from the orthogonal band and retransmitted with a
one-block delay; the destination decodes backwards, first recovering every
m1 from the following block's relay contribution, then every m2 from its own
block.  Codeword tables are drawn uniformly on the sphere (seeded), so
minimum-distance decoding over each equal-energy table reduces to a maximum
correlation, which is evaluated with exact zero ties on all-zero inputs.

Power accounting, with split (alpha, rho), backoff delta and gamma = P1/P:

    x1(m1)            = sqrt(n*gamma*(P-delta)) * a(m1)        relay codeword
    x'(m1, m2 | prev) = rho*sqrt(alpha/gamma) * x1(prev) + beta * v(m1, m2)
    beta              = sqrt(n*(1-rho^2)*alpha*(P-delta))
    x''(m1)           rescaled Gaussian rows of power n*(1-alpha)*P

A block whose x' exceeds the power budget n*alpha*P is sent as zero (flagged).
"""

from dataclasses import dataclass

import numpy as np

from .gaussian import LOG2, GaussianSfdParams, PowerSplit

FIXED_INDEX = 0   # boundary message carried by the final block and block 0's "previous"


class CodecConfigError(ValueError):
    pass


class CodebookBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CodebookConfig:
    n: int
    num_blocks: int
    rate_relayed: float     # bits/use carried by the m1 stream
    rate_direct: float      # bits/use carried by the m2 stream
    params: GaussianSfdParams
    split: PowerSplit
    delta: float | None = None   # power backoff; default 0.01 * P
    seed: int = 0


def codebook_config_to_json(config: CodebookConfig) -> dict:
    """Serializable view; codebooks regenerate from config + seed, never the tables."""
    return {"n": config.n, "blocks": config.num_blocks,
            "rate_relayed": config.rate_relayed, "rate_direct": config.rate_direct,
            "P": config.params.P, "P1": config.params.P1,
            "Lambda": config.params.Lambda, "sigma2": config.params.sigma2,
            "alpha": config.split.alpha, "rho": config.split.rho,
            "delta": config.delta, "seed": config.seed}


def codebook_config_from_json(obj) -> CodebookConfig:
    import json

    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    params = GaussianSfdParams(P=float(obj["P"]), P1=float(obj["P1"]),
                               Lambda=float(obj["Lambda"]), sigma2=float(obj["sigma2"]))
    return CodebookConfig(
        n=int(obj["n"]), num_blocks=int(obj["blocks"]),
        rate_relayed=float(obj["rate_relayed"]), rate_direct=float(obj["rate_direct"]),
        params=params, split=PowerSplit(alpha=float(obj["alpha"]), rho=float(obj["rho"])),
        delta=None if obj.get("delta") is None else float(obj["delta"]),
        seed=int(obj.get("seed", 0)))


def achievable_rate_pair(params: GaussianSfdParams, split: PowerSplit):
    """Asymptotic per-use rate pair (relayed, direct) supported by this split.

    relayed: 0.5*log2( ((gamma + a + 2 rho sqrt(a gamma)) P + Lambda)
                        / ((1 - rho^2) a P + Lambda) )
    direct:  0.5*log2( ((1 - rho^2) a P + Lambda) / Lambda )
    """
    P, P1, Lam = params.P, params.P1, params.Lambda
    if P <= 0:
        return 0.0, 0.0
    a, rho = split.alpha, split.rho
    g = P1 / P
    num = (g + a + 2.0 * rho * np.sqrt(a * g)) * P + Lam
    mid = (1.0 - rho * rho) * a * P + Lam
    return float(0.5 * np.log(num / mid) / LOG2), float(0.5 * np.log(mid / Lam) / LOG2)


def split_feasible_for_codebook(params: GaussianSfdParams, split: PowerSplit) -> bool:
    """Strict feasibility of the deterministic-code lower-bound region."""
    P, P1, Lam = params.P, params.P1, params.Lambda
    if P <= 0:
        return False
    a, rho = split.alpha, split.rho
    c1 = (1.0 - rho * rho) * a * P > Lam
    c2 = (P1 / P) * (np.sqrt(P1) + rho * np.sqrt(a * P)) ** 2 > Lam + (1.0 - rho * rho) * a * P
    return bool(c1 and c2)


def _unit_rows(rng, count, n):
    rows = rng.standard_normal((count, n))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return rows


class SfdCodebook:
    """Immutable codeword tables for one (config, seed)."""

    def __init__(self, config: CodebookConfig, max_table_bytes: int = 1 << 30):
        p, sp = config.params, config.split
        if p.P <= 0 or p.P1 <= 0:
            raise CodecConfigError("codebook needs P > 0 and P1 > 0")
        delta = 0.01 * p.P if config.delta is None else float(config.delta)
        if not (0.0 < delta < p.P):
            raise CodecConfigError("delta must satisfy 0 < delta < P")
        if config.n < 1 or config.num_blocks < 2:
            raise CodecConfigError("need n >= 1 and at least 2 blocks")
        m1 = int(np.floor(2.0 ** (config.n * config.rate_relayed)))
        m2 = int(np.floor(2.0 ** (config.n * config.rate_direct)))
        if m1 < 2 or m2 < 2:
            raise CodecConfigError(
                f"message counts ({m1}, {m2}) below 2; raise the rates or n")
        for cnt in ((m1 + m1 * m2 + 2 * m1) * config.n * 8,):
            if cnt > max_table_bytes:
                raise CodebookBudgetError(
                    f"codeword tables need {cnt} bytes, budget {max_table_bytes}")

        self.config = config
        self.n = config.n
        self.num_blocks = config.num_blocks
        self.m1_count = m1
        self.m2_count = m2
        self.delta = delta
        self.gamma = p.P1 / p.P
        self.beta = float(np.sqrt(config.n * (1.0 - sp.rho ** 2) * sp.alpha * (p.P - delta)))
        self.combine = sp.rho * np.sqrt(sp.alpha / self.gamma)
        self.clip_budget = config.n * sp.alpha * p.P
        self.split_feasible = split_feasible_for_codebook(p, sp)

        rng = np.random.default_rng(np.random.SeedSequence(config.seed))
        self.a = _unit_rows(rng, m1, config.n)
        self.v = _unit_rows(rng, m1 * m2, config.n).reshape(m1, m2, config.n)
        self.x1 = np.sqrt(config.n * self.gamma * (p.P - delta)) * self.a
        direct_power = config.n * (1.0 - sp.alpha) * p.P
        x2 = rng.standard_normal((m1, config.n))
        norms = np.linalg.norm(x2, axis=1, keepdims=True)
        self.x2 = x2 * (np.sqrt(direct_power) / norms) if direct_power > 0 else np.zeros_like(x2)

    def x_prime(self, m1, m2, m1_prev):
        """Destination-band codeword before the power clip."""
        return self.combine * self.x1[m1_prev] + self.beta * self.v[m1, m2]


def build_codebook(config: CodebookConfig, max_table_bytes: int = 1 << 30) -> SfdCodebook:
    return SfdCodebook(config, max_table_bytes)


@dataclass(frozen=True)
class TransmittedBlock:
    x_prime: np.ndarray
    x_direct: np.ndarray
    power_clipped: bool


def encode(codebook: SfdCodebook, messages) -> list:
    """Map B-1 message pairs to B transmitted blocks.

    messages is a (B-1, 2) array of (m1, m2) indices; the final block carries
    the fixed pair.  A block whose destination component overshoots the
    budget n*alpha*P is replaced by zero and flagged.
    """
    msgs = np.asarray(messages, dtype=int)
    B = codebook.num_blocks
    if msgs.shape != (B - 1, 2):
        raise CodecConfigError(f"expected {(B - 1, 2)} message array, got {msgs.shape}")
    if (msgs < 0).any() or (msgs[:, 0] >= codebook.m1_count).any() \
            or (msgs[:, 1] >= codebook.m2_count).any():
        raise CodecConfigError("message index out of range")
    chain = np.vstack([msgs, [[FIXED_INDEX, FIXED_INDEX]]])
    blocks = []
    prev = FIXED_INDEX
    for b in range(B):
        m1, m2 = int(chain[b, 0]), int(chain[b, 1])
        xp = codebook.x_prime(m1, m2, prev)
        clipped = bool(xp @ xp > codebook.clip_budget)
        if clipped:
            xp = np.zeros(codebook.n)
        blocks.append(TransmittedBlock(xp, codebook.x2[m1], clipped))
        prev = m1
    return blocks


def _argmax_corr(table, y):
    """Index maximizing <y, row>; equal-energy rows make this min-distance.

    Returns (index, tie_count) with exact-equality ties resolved downward.
    """
    corr = table @ y
    k = int(np.argmax(corr))
    ties = int((corr == corr[k]).sum()) - 1
    return k, ties


def relay_process(codebook: SfdCodebook, y1_block, mode: str = "min_distance",
                  true_index: int | None = None):
    """One relay step: estimate the m1 of this block, emit next block's codeword."""
    if mode == "ideal":
        if true_index is None:
            raise CodecConfigError("ideal relay mode needs the true index")
        m_bar = int(true_index)
    elif mode == "min_distance":
        m_bar, _ = _argmax_corr(codebook.x2, np.asarray(y1_block, dtype=float))
    else:
        raise CodecConfigError("relay mode must be min_distance or ideal")
    return m_bar, codebook.x1[m_bar]


def relay_chain(codebook: SfdCodebook, y1_blocks, mode: str = "min_distance",
                true_indices=None):
    """Run the relay over all blocks: x1 of block 0 is fixed, then one-block delay.

    Returns (estimates (B-1,), x1_blocks (B, n)).
    """
    B, n = codebook.num_blocks, codebook.n
    y1_blocks = np.asarray(y1_blocks, dtype=float)
    if y1_blocks.shape != (B, n):
        raise CodecConfigError(f"expected {(B, n)} relay observations")
    x1_out = np.empty((B, n))
    x1_out[0] = codebook.x1[FIXED_INDEX]
    est = np.empty(B - 1, dtype=int)
    for b in range(B - 1):
        true_b = None if true_indices is None else int(true_indices[b])
        est[b], nxt = relay_process(codebook, y1_blocks[b], mode, true_b)
        x1_out[b + 1] = nxt
    return est, x1_out


@dataclass(frozen=True)
class DecodeResult:
    m_relayed: np.ndarray   # (B-1,) estimates of the m1 stream
    m_direct: np.ndarray    # (B-1,) estimates of the m2 stream
    tie_count: int


def decode_backward(codebook: SfdCodebook, y_blocks) -> DecodeResult:
    """Two backward passes over the received blocks.

    Pass 1, for b = B-2..0: m1_hat[b] minimizes
        || y[b+1] - (1 + rho*sqrt(alpha/gamma)) * x1(m) ||.
    Pass 2, for b = B-2..0: with prev = m1_hat[b-1] (fixed index at b=0),
    m2_hat[b] minimizes
        || y[b] - x1(prev) - x_prime(m1_hat[b], m | prev) ||.
    Exact distance ties resolve to the smallest index and are counted.
    """
    B, n = codebook.num_blocks, codebook.n
    y_blocks = np.asarray(y_blocks, dtype=float)
    if y_blocks.shape != (B, n):
        raise CodecConfigError(f"expected {(B, n)} received blocks")
    scale = 1.0 + codebook.combine
    ties = 0
    m1_hat = np.empty(B - 1, dtype=int)
    for b in range(B - 2, -1, -1):
        k, t = _argmax_corr(scale * codebook.x1, y_blocks[b + 1])
        m1_hat[b] = k
        ties += t
    m2_hat = np.empty(B - 1, dtype=int)
    for b in range(B - 2, -1, -1):
        prev = FIXED_INDEX if b == 0 else m1_hat[b - 1]
        resid = y_blocks[b] - scale * codebook.x1[prev]
        k, t = _argmax_corr(codebook.beta * codebook.v[m1_hat[b]], resid)
        m2_hat[b] = k
        ties += t
    return DecodeResult(m1_hat, m2_hat, ties)


# ---------------------------------------------------------------------------
# shared time-permutation wrapper
# ---------------------------------------------------------------------------

def draw_permutation(n: int, rng) -> np.ndarray:
    return rng.permutation(n)


class PlainCode:
    """Direct view of a codebook with the encode/relay/decode entry points."""

    def __init__(self, codebook: SfdCodebook):
        self.codebook = codebook

    def encode(self, messages):
        return encode(self.codebook, messages)

    def relay_chain(self, y1_blocks, mode="min_distance", true_indices=None):
        return relay_chain(self.codebook, y1_blocks, mode, true_indices)

    def decode(self, y_blocks):
        return decode_backward(self.codebook, y_blocks)


class PermutedCode(PlainCode):
    """Randomized code: one shared permutation of the per-block time axis.

    Transmitted blocks (sender and relay) pass through the inverse
    permutation; every received block is permuted back before standard
    processing.  The identity permutation reproduces the plain code exactly.
    """

    def __init__(self, codebook: SfdCodebook, perm):
        super().__init__(codebook)
        perm = np.asarray(perm, dtype=int)
        if perm.shape != (codebook.n,) or not np.array_equal(np.sort(perm), np.arange(codebook.n)):
            raise CodecConfigError("perm must be a permutation of range(n)")
        self.perm = perm
        self.inv = np.argsort(perm)

    def encode(self, messages):
        blocks = encode(self.codebook, messages)
        return [TransmittedBlock(b.x_prime[self.inv], b.x_direct[self.inv],
                                 b.power_clipped) for b in blocks]

    def relay_chain(self, y1_blocks, mode="min_distance", true_indices=None):
        y1 = np.asarray(y1_blocks, dtype=float)[:, self.perm]
        est, x1_blocks = relay_chain(self.codebook, y1, mode, true_indices)
        return est, x1_blocks[:, self.inv]

    def decode(self, y_blocks):
        return decode_backward(self.codebook, np.asarray(y_blocks, dtype=float)[:, self.perm])


def permutation_wrap(codebook: SfdCodebook, seed: int) -> PermutedCode:
    """Draw the shared permutation from a seed and wrap the codebook."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return PermutedCode(codebook, draw_permutation(codebook.n, rng))
