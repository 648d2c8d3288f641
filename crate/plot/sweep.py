"""BER vs Eb/N0 from sweep.csv, with Wilson intervals and the AWGN curve."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1] if len(sys.argv) > 1 else "out/sweep.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "sweep.png"
d = pd.read_csv(src, comment="#")
lo = (d.ber - d.ber_ci_low).clip(lower=0)
hi = d.ber_ci_high - d.ber
fig, ax = plt.subplots()
ax.errorbar(d.ebn0_db, d.ber, yerr=[lo, hi], fmt="o", capsize=3, label="measured")
ax.semilogy(d.ebn0_db, d.awgn_reference_ber, "-", label="0.5 erfc(sqrt(Eb/N0))")
ax.set_xlabel("Eb/N0 (dB)")
ax.set_ylabel("BER")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.savefig(dst, dpi=150, bbox_inches="tight")
