"""Tour of the finite-alphabet machinery on one telling example.

The channel: the destination sees Y = X + S over {0,1,2}; the relay sees
Y1 = X(1-S); the relay forwards one noiseless bit per use.  Both single-link
views of this channel are breakable by a state-averaging witness, yet the
pair (Y, Y1) is not -- and a one-symbol code proves the full bit goes
through.  The module verdicts below walk that story end to end.

Run:  python demos/discrete_channel_tour.py
"""

import numpy as np

from avrc.discrete import (
    binary_pipe_dmc,
    classify_capacity,
    cutset_bound,
    degradedness_classify,
    df_bound,
    residual_of_witness,
    single_use_code_table,
    symmetrizability,
)

dmc = binary_pipe_dmc()
print("kernel shape (X,S,Y,Y1):", dmc.kernel.shape, " pipe rate:", dmc.relay_rate)

print("\n1. Symmetrizability of each view")
for name, chan in [("destination Y", dmc.receiver_marginal()),
                   ("relay Y1", dmc.relay_marginal()),
                   ("joint (Y, Y1)", dmc.joint_output())]:
    v = symmetrizability(chan)
    print(f"   {name:15s} symmetrizable={v.symmetrizable!s:5s} residual={v.max_residual:.2e}")
print("   closed-form witnesses re-verified:",
      residual_of_witness(dmc.receiver_marginal(), np.eye(2)) <= 1e-12,
      residual_of_witness(dmc.relay_marginal(), np.array([[0., 1.], [1., 0.]])) <= 1e-12)

print("\n2. Degradedness:", degradedness_classify(dmc).label)

print("\n3. Rate bounds")
print(f"   decode-forward (direct mode): {df_bound(dmc, mode='direct'):.4f}")
print(f"   decode-forward (general):     {df_bound(dmc):.4f}")
print(f"   cutset:                       {cutset_bound(dmc):.4f}")

print("\n4. Classification")
cls = classify_capacity(dmc)
print(f"   verdict: {cls.verdict} (clause {cls.clause}), "
      f"bounds [{cls.df_lower:.4f}, {cls.cs_upper:.4f}]")

print("\n5. The single-use code settles it: one full bit, zero error")
print("   message state y y1 decoded error")
for r in single_use_code_table():
    print(f"   {r.message:7d} {r.state:5d} {r.y} {r.y1:2d} {r.decoded:7d} {r.error:5d}")
print("\nBoth single links are breakable, the pair is not: the relay's bit is"
      "\nexactly the side information the destination needs at y = 1.")
