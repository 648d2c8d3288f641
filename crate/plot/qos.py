"""Q factors per geometry and mode from qos.csv."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1] if len(sys.argv) > 1 else "out/qos.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "qos.png"
d = pd.read_csv(src, comment="#")
fig, ax = plt.subplots()
for i, g in d.groupby("spec_index"):
    ax.semilogy(g.l, g.q_total, "o-", label=f"spec {i}: {g.a.iloc[0]}x{g.c.iloc[0]}x{g.b.iloc[0]} m")
ax.set_xlabel("l (TE10l)")
ax.set_ylabel("Q_total")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize="small")
fig.savefig(dst, dpi=150, bbox_inches="tight")
