"""Per-frame bit errors and EVM from link_blocks.csv."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1] if len(sys.argv) > 1 else "out/link_blocks.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "blocks.png"
d = pd.read_csv(src, comment="#", na_values=["nan"])
x = range(len(d))
fig, (a, b) = plt.subplots(2, 1, sharex=True)
a.bar(x, d.bit_errors, width=1.0)
a.set_ylabel("bit errors")
b.plot(x, 100 * d.evm_rms, ".")
b.set_ylabel("EVM (%)")
b.set_xlabel("frame (trial-major)")
missed = d.index[~d.detected]
for m in missed:
    a.axvline(m, color="r", alpha=0.4)
fig.savefig(dst, dpi=150, bbox_inches="tight")
