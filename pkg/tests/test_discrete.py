import json

import numpy as np
import pytest

from avrc.discrete import (
    BoundOptions,
    ChannelFormatError,
    Dmc,
    ResourceLimitError,
    binary_pipe_dmc,
    classify_capacity,
    cutset_bound,
    degradedness_classify,
    df_bound,
    dmc_from_json,
    dmc_to_json,
    minimax_receiver_information,
    mutual_information,
    residual_of_witness,
    single_use_code_table,
    symmetrizability,
)

FAST = BoundOptions(q_resolution=48, p_resolution=64, refine_rounds=6, aux_starts=6)


def additive_channel():
    W = np.zeros((2, 2, 3))
    for x in range(2):
        for s in range(2):
            W[x, s, x + s] = 1.0
    return W


def relay_product_channel():
    W = np.zeros((2, 2, 2))
    for x in range(2):
        for s in range(2):
            W[x, s, x * (1 - s)] = 1.0
    return W


def exhaustive_mi(p, q, W):
    # independent finite-sum oracle
    X, S, O = W.shape
    joint = np.zeros((X, O))
    for x in range(X):
        for s in range(S):
            joint[x] += p[x] * q[s] * W[x, s]
    out = joint.sum(axis=0)
    total = 0.0
    for x in range(X):
        for o in range(O):
            if joint[x, o] > 0:
                total += joint[x, o] * np.log2(joint[x, o] / (p[x] * out[o]))
    return total


# ---------------------------------------------------------------------------
# types and serialization
# ---------------------------------------------------------------------------

def test_dmc_validation_reports_offending_slice():
    W = np.zeros((2, 2, 2, 2))
    W[:, :, 0, 0] = 1.0
    W[1, 1, 0, 0] = 0.5
    with pytest.raises(ChannelFormatError, match=r"x=1, s=1"):
        Dmc(W)


def test_dmc_json_round_trip():
    dmc = binary_pipe_dmc()
    blob = json.dumps(dmc_to_json(dmc))
    back = dmc_from_json(blob)
    assert np.array_equal(back.kernel, dmc.kernel)
    assert back.relay_rate == 1.0
    with pytest.raises(ChannelFormatError):
        dmc_from_json({"X": 2, "S": 2, "Y": 3, "Y1": 2, "C1": 1.0, "W": [[0.0]]})


# ---------------------------------------------------------------------------
# mutual information
# ---------------------------------------------------------------------------

def test_mi_identity_channel():
    W = np.zeros((2, 1, 2))
    W[0, 0, 0] = W[1, 0, 1] = 1.0
    assert abs(mutual_information([0.5, 0.5], [1.0], W) - 1.0) < 1e-12


def test_mi_independent_output():
    W = np.tile(np.array([0.3, 0.7]), (2, 2, 1))
    assert abs(mutual_information([0.5, 0.5], [0.4, 0.6], W)) < 1e-12


def test_mi_additive_uniform_half_bit():
    v = mutual_information([0.5, 0.5], [0.5, 0.5], additive_channel())
    assert abs(v - 0.5) < 1e-12   # H(Y) = 1.5, H(Y|X) = 1


def test_mi_matches_exhaustive_oracle_randomized():
    rng = np.random.default_rng(5)
    for _ in range(20):
        X, S, O = rng.integers(2, 5, 3)
        W = rng.dirichlet(np.ones(O), size=(X, S))
        p = rng.dirichlet(np.ones(X))
        q = rng.dirichlet(np.ones(S))
        assert abs(mutual_information(p, q, W) - exhaustive_mi(p, q, W)) < 1e-10


def test_mi_permutation_invariance():
    rng = np.random.default_rng(6)
    W = rng.dirichlet(np.ones(4), size=(3, 2))
    p = rng.dirichlet(np.ones(3))
    q = rng.dirichlet(np.ones(2))
    base = mutual_information(p, q, W)
    px = rng.permutation(3)
    po = rng.permutation(4)
    assert abs(mutual_information(p[px], q, W[px][:, :, po]) - base) < 1e-12


def test_mi_dimension_mismatch():
    with pytest.raises(ChannelFormatError):
        mutual_information([0.5, 0.5], [1.0], np.ones((3, 1, 2)) / 2)


# ---------------------------------------------------------------------------
# symmetrizability
# ---------------------------------------------------------------------------

def test_additive_channel_witness_is_the_matching_rule():
    verdict = symmetrizability(additive_channel())
    assert verdict.symmetrizable
    assert verdict.max_residual <= 1e-9
    assert np.allclose(verdict.witness, np.eye(2), atol=1e-9)
    assert residual_of_witness(additive_channel(), np.eye(2)) <= 1e-12


def test_relay_product_channel_witness_is_the_crossing_rule():
    verdict = symmetrizability(relay_product_channel())
    assert verdict.symmetrizable
    assert residual_of_witness(relay_product_channel(), verdict.witness) <= 1e-9
    # the crossing rule J(s|x) = 1{s = 1-x} is an exact witness
    assert residual_of_witness(relay_product_channel(),
                               np.array([[0.0, 1.0], [1.0, 0.0]])) <= 1e-12


def test_state_free_identity_not_symmetrizable():
    W = np.zeros((2, 2, 2))
    for x in range(2):
        W[x, :, x] = 1.0
    verdict = symmetrizability(W)
    assert not verdict.symmetrizable
    assert verdict.max_residual > 0.5
    assert verdict.witness is None


def test_single_input_vacuous():
    W = np.random.default_rng(0).dirichlet(np.ones(3), size=(1, 2))
    verdict = symmetrizability(W)
    assert verdict.symmetrizable and verdict.max_residual <= 1e-12


def test_ternary_additive_channel_symmetrizable():
    # Y = X + S over 0..4 with ternary input and state: the matching rule
    # J(s|x) = 1{s=x} makes the averaged channel symmetric
    W = np.zeros((3, 3, 5))
    for x in range(3):
        for s in range(3):
            W[x, s, x + s] = 1.0
    verdict = symmetrizability(W)
    assert verdict.symmetrizable
    assert residual_of_witness(W, np.eye(3)) <= 1e-12


def test_returned_witnesses_reverify_randomized():
    rng = np.random.default_rng(9)
    for _ in range(15):
        W = rng.dirichlet(np.ones(3), size=(2, 2))
        verdict = symmetrizability(W)
        if verdict.symmetrizable:
            assert residual_of_witness(W, verdict.witness) <= 1e-9


# ---------------------------------------------------------------------------
# degradedness
# ---------------------------------------------------------------------------

def test_strongly_degraded_by_construction():
    rng = np.random.default_rng(1)
    A = rng.dirichlet(np.ones(2), size=2)            # (X, Y1), state-free
    B = rng.dirichlet(np.ones(3), size=(2, 2))       # (Y1, S, Y)
    W = np.einsum("xk,ksy->xsyk", A, B)
    rep = degradedness_classify(Dmc(W, 1.0))
    assert rep.label == "strongly_degraded"


def test_reversely_strongly_degraded_by_construction():
    rng = np.random.default_rng(2)
    A = rng.dirichlet(np.ones(3), size=(2, 2))       # (X, S, Y)
    B = rng.dirichlet(np.ones(2), size=3)            # (Y, Y1), state-free
    W = np.einsum("xsy,yk->xsyk", A, B)
    rep = degradedness_classify(Dmc(W, 1.0))
    assert rep.label == "reversely_strongly_degraded"


def test_binary_pipe_is_reversely_degraded_only():
    rep = degradedness_classify(binary_pipe_dmc())
    assert rep.label == "reversely_degraded_only"
    assert rep.reversely_degraded and not rep.degraded


def test_degraded_only_with_state_dependent_relay_factor():
    rng = np.random.default_rng(14)
    m1 = rng.dirichlet(np.ones(2), size=(2, 2))      # (X, S, Y1), s-dependent
    B = rng.dirichlet(np.ones(3), size=(2, 2))       # (Y1, S, Y)
    W = np.einsum("xsk,ksy->xsyk", m1, B)
    rep = degradedness_classify(Dmc(W, 1.0))
    assert rep.label == "degraded_only"


def test_mi_bounds_property():
    rng = np.random.default_rng(15)
    for _ in range(20):
        X, S, O = rng.integers(2, 5, 3)
        W = rng.dirichlet(np.ones(O), size=(X, S))
        p = rng.dirichlet(np.ones(X))
        q = rng.dirichlet(np.ones(S))
        v = mutual_information(p, q, W)
        assert -1e-12 <= v <= np.log2(X) + 1e-12


# ---------------------------------------------------------------------------
# cutset / decode-forward bounds
# ---------------------------------------------------------------------------

def test_cutset_zero_for_useless_outputs():
    v = cutset_bound(Dmc(np.full((2, 2, 2, 2), 0.25), 1.0), opts=FAST)
    assert abs(v) < 1e-9


def test_cutset_binary_pipe_is_one_bit():
    v = cutset_bound(binary_pipe_dmc(), opts=FAST)
    assert abs(v - 1.0) < 1e-3


def test_cutset_additive_receiver_only():
    # Y = X + S with a constant relay observation and no pipe: the value is
    # the saddle of I(X;Y), which a nested exhaustive grid puts at 0.5
    W = additive_channel()[:, :, :, None]
    v = cutset_bound(Dmc(W, 0.0), opts=FAST)
    assert abs(v - 0.5) < 1e-3


def test_df_direct_equals_maxmin_oracle():
    v = df_bound(binary_pipe_dmc(), mode="direct", opts=FAST)
    assert abs(v - 0.5) < 1e-3     # saddle of I(X; X+S)


def test_df_full_on_strongly_degraded_toy():
    # Y = X + S, Y1 = X noiselessly, pipe rate 0.5:
    # max_p min{min_q I(X;X+S) + 0.5, H(X)} = 1 at the uniform input
    W = np.zeros((2, 2, 3, 2))
    for x in range(2):
        for s in range(2):
            W[x, s, x + s, x] = 1.0
    toy = Dmc(W, relay_rate=0.5)
    v = df_bound(toy, mode="full", opts=FAST)
    assert abs(v - 1.0) < 2e-3


def test_aux_information_terms_embedding_identities():
    # with U = X (diagonal joint) the U-terms reduce to plain I(X;O) and the
    # conditional term vanishes; with U independent of X they swap roles
    from avrc.discrete import _mi_uy_rows, _mi_xy_given_u_rows, _wq_batch

    rng = np.random.default_rng(21)
    W = rng.dirichlet(np.ones(3), size=(2, 2))
    q = rng.dirichlet(np.ones(2))
    p = rng.dirichlet(np.ones(2))
    WQ = _wq_batch(q[None, :], W)
    i_xy = mutual_information(p, q, W)

    diag = np.diag(p)
    assert abs(_mi_uy_rows(diag, WQ)[0] - i_xy) < 1e-12
    assert abs(_mi_xy_given_u_rows(diag, WQ)[0]) < 1e-12

    u_marg = rng.dirichlet(np.ones(3))
    indep = u_marg[:, None] * p[None, :]
    assert abs(_mi_uy_rows(indep, WQ)[0]) < 1e-12
    assert abs(_mi_xy_given_u_rows(indep, WQ)[0] - i_xy) < 1e-12


def test_df_general_dominates_special_modes():
    rng = np.random.default_rng(4)
    for _ in range(3):
        W = rng.dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2)
        dmc = Dmc(W, relay_rate=float(rng.uniform(0, 1)))
        v_dir = df_bound(dmc, mode="direct", opts=FAST)
        v_aux = df_bound(dmc, mode="aux", opts=FAST)
        assert v_aux >= v_dir - 1e-6


def test_df_cutset_sandwich_randomized():
    rng = np.random.default_rng(8)
    for _ in range(5):
        W = rng.dirichlet(np.ones(4), size=(2, 2)).reshape(2, 2, 2, 2)
        dmc = Dmc(W, relay_rate=float(rng.uniform(0, 1.2)))
        assert df_bound(dmc, opts=FAST) <= cutset_bound(dmc, opts=FAST) + 1e-3


def test_explicit_state_set():
    dmc = binary_pipe_dmc()
    qset = np.array([[1.0, 0.0], [0.0, 1.0]])
    v_restricted = cutset_bound(dmc, state_set=qset, opts=FAST)
    v_full = cutset_bound(dmc, opts=FAST)
    assert v_restricted >= v_full - 1e-6
    d_restricted = df_bound(dmc, state_set=qset, mode="direct", opts=FAST)
    d_full = df_bound(dmc, mode="direct", opts=FAST)
    assert d_restricted >= d_full - 1e-6
    # a single-point state set reduces both infima to plain evaluations
    point = np.array([[0.5, 0.5]])
    v_point = cutset_bound(dmc, state_set=point, opts=FAST)
    assert v_point >= v_full - 1e-6


def test_three_letter_state_alphabet():
    rng = np.random.default_rng(31)
    W = rng.dirichlet(np.ones(4), size=(2, 3)).reshape(2, 3, 2, 2)
    dmc = Dmc(W, relay_rate=0.5)
    lo = df_bound(dmc, mode="direct", opts=FAST)
    hi = cutset_bound(dmc, opts=FAST)
    assert 0.0 <= lo <= hi + 1e-3


def test_resource_budget_error():
    W = np.full((2, 2, 2, 2), 0.25)
    with pytest.raises(ResourceLimitError):
        cutset_bound(Dmc(W, 0.0), opts=BoundOptions(max_kernel_entries=4))


# ---------------------------------------------------------------------------
# minimax equality
# ---------------------------------------------------------------------------

def test_minimax_orders_agree_on_reversely_strongly_degraded():
    rng = np.random.default_rng(12)
    for _ in range(3):
        A = rng.dirichlet(np.ones(3), size=(2, 2))
        B = rng.dirichlet(np.ones(2), size=3)
        W = np.einsum("xsy,yk->xsyk", A, B)
        dmc = Dmc(W, 1.0)
        v_qp = minimax_receiver_information(dmc, "qp", FAST)
        v_pq = minimax_receiver_information(dmc, "pq", FAST)
        assert abs(v_qp - v_pq) < 1e-3


def test_minimax_orders_agree_on_strongly_degraded_program():
    # both nestings of the pipe-limited program
    # min{ I_q(X;Y) + C1, I(X;Y1) } agree (concave in p, quasi-convex in q)
    rng = np.random.default_rng(13)
    for _ in range(3):
        A = rng.dirichlet(np.ones(2), size=2)            # state-free (X, Y1)
        B = rng.dirichlet(np.ones(3), size=(2, 2))       # (Y1, S, Y)
        W = np.einsum("xk,ksy->xsyk", A, B)
        dmc = Dmc(W, relay_rate=float(rng.uniform(0.1, 0.8)))
        # order max_p min_q via the library's full decode-forward mode
        v_pq = df_bound(dmc, mode="full", opts=FAST)
        # order min_q max_p via an exhaustive nested grid (independent)
        W_y = dmc.receiver_marginal()
        ps = np.linspace(1e-6, 1 - 1e-6, 201)
        qs = np.linspace(0, 1, 201)
        v_qp = np.inf
        for qa in qs:
            q = np.array([qa, 1 - qa])
            best = -np.inf
            for pa in ps:
                p = np.array([pa, 1 - pa])
                v = min(mutual_information(p, q, W_y) + dmc.relay_rate,
                        mutual_information(p, q, dmc.relay_marginal()))
                best = max(best, v)
            v_qp = min(v_qp, best)
        assert abs(v_qp - v_pq) < 1e-3


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classify_zero_when_joint_output_symmetrizable():
    W = np.zeros((2, 2, 3, 3))
    for x in range(2):
        for s in range(2):
            W[x, s, x + s, x + s] = 1.0
    cls = classify_capacity(Dmc(W, 1.0), opts=FAST)
    assert cls.verdict == "zero" and cls.clause == 4


def test_classify_binary_pipe_undetermined_not_zero():
    cls = classify_capacity(binary_pipe_dmc(), opts=FAST)
    assert cls.verdict == "undetermined"
    assert cls.relay_marginal_symmetrizable
    assert not cls.joint_output_symmetrizable
    assert cls.df_lower <= cls.cs_upper + 1e-3
    # consistency hook: the exhaustive single-use table certifies one bit with
    # zero error, so the classification must not be "zero"
    assert all(r.error == 0 for r in single_use_code_table())


def test_classify_strongly_degraded_closed_form():
    # Y = X + S, Y1 = X noiselessly, pipe rate 0.5: distinct relay rows, so
    # the capacity equals max_p min{min_q I(X;X+S) + C1, I(X;Y1)} = 1
    W = np.zeros((2, 2, 3, 2))
    for x in range(2):
        for s in range(2):
            W[x, s, x + s, x] = 1.0
    cls = classify_capacity(Dmc(W, relay_rate=0.5), opts=FAST)
    assert cls.verdict == "equals_random_capacity" and cls.clause == 3
    assert abs(cls.exact_value - 1.0) < 2e-3


def test_classify_sandwich_clause_without_degradedness():
    # state-dependent crossover on BOTH outputs with flip mass bounded away
    # from the correct mass: no factorization holds, neither marginal is
    # symmetrizable, so the verdict is the sandwich clause
    W = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for s, (ey, e1) in enumerate(((0.05, 0.1), (0.2, 0.15))):
            for y in range(2):
                for y1 in range(2):
                    py = 1 - ey if y == x else ey
                    p1 = 1 - e1 if y1 == x else e1
                    W[x, s, y, y1] = py * p1
    cls = classify_capacity(Dmc(W, relay_rate=0.5), opts=FAST)
    assert cls.verdict == "equals_random_capacity" and cls.clause == 1
    assert cls.aux_size == 3
    assert 0.0 < cls.df_lower <= cls.cs_upper + 1e-3


def test_classify_reversely_strongly_degraded_closed_form():
    # binary channel whose state picks the crossover (0.05 or 0.2), relay
    # observation a noisy state-free copy of Y: the flip mass never reaches
    # the correct mass, so neither marginal is symmetrizable, and the value
    # is min over q of the BSC capacity 1 - h2(0.05 + 0.15 q)
    A = np.zeros((2, 2, 2))
    for x in range(2):
        for s, eps in enumerate((0.05, 0.2)):
            A[x, s, x] = 1 - eps
            A[x, s, 1 - x] = eps
    B = np.array([[0.9, 0.1], [0.1, 0.9]])
    W = np.einsum("xsy,yk->xsyk", A, B)
    cls = classify_capacity(Dmc(W, relay_rate=1.0), opts=FAST)
    assert cls.degradedness == "reversely_strongly_degraded"
    assert cls.verdict == "equals_random_capacity" and cls.clause == 2
    h2 = lambda e: -e * np.log2(e) - (1 - e) * np.log2(1 - e)
    assert abs(cls.exact_value - (1 - h2(0.2))) < 2e-3
