# %% [markdown]
# # Sweeping tie-line reactance and inertia
#
# The weaker the tie, the slower the interconnection mode.  A heavy machine
# in area 2 slows it down as well.

# %%
from pathlib import Path

import numpy as np

from interarea import parse_scenario, sweep
from interarea.svg import line_plot

net = parse_scenario("paper-case1").network
x = np.linspace(1 / 15, 1.0, 30)
rows = sweep(net, "lines.2-3.x", x, max_workers=4)
for r in rows[::6]:
    print(f"X_tie = {r.value:.3f} p.u.  ->  {r.frequency:.4f} rad/s")
assert np.all(np.diff([r.frequency for r in rows]) <= 0)

# %%
for r in sweep(net, "generators.3.M", [3.2, 10.0, 32.0]):
    print(f"M_3 = {r.value:5.1f}  ->  {r.frequency:.4f} rad/s")

# %%
out = Path("figures")
out.mkdir(exist_ok=True)
(out / "sweep.svg").write_text(line_plot([("interconnection mode", x, [r.frequency for r in rows])],
                                         "tie-line reactance [p.u.]", "frequency [rad/s]"))
