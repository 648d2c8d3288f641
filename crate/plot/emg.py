"""EMG demo timeline from emg_demo.csv: commands, joint angle and tilt."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

src = sys.argv[1] if len(sys.argv) > 1 else "out/emg_demo.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "emg.png"
d = pd.read_csv(src, comment="#")
fig, (a, b) = plt.subplots(2, 1, sharex=True)
labels = sorted(set(d.true_label) | set(d.link_decision))
code = {k: i for i, k in enumerate(labels)}
a.step(d.window, d.true_label.map(code), where="mid", label="true")
a.plot(d.window, d.link_decision.map(code), "x", label="received")
a.set_yticks(range(len(labels)), labels)
a.legend(fontsize="small")
b.plot(d.window, d.joint_target_deg, "--", label="target")
b.plot(d.window, d.joint_angle_deg, label="joint angle")
b.plot(d.window, d.tilt_deg, label="tilt")
for w in d.window[d.fall_action == "decelerate"]:
    b.axvline(w, color="r", alpha=0.4)
b.set_xlabel("window")
b.set_ylabel("degrees")
b.legend(fontsize="small")
fig.savefig(dst, dpi=150, bbox_inches="tight")
