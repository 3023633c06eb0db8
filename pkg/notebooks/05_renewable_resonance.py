# %% [markdown]
# # A renewable source in resonance with the inter-area mode
#
# Replace the load at bus 1 by a source whose output rate varies as
# A sin(w t).  Forcing at the interconnection frequency makes the undamped
# inter-area oscillation grow linearly; forcing at half that frequency gives a
# bounded beat.

# %%
from pathlib import Path

from interarea import build_model, parse_scenario, resonance_experiment
from interarea.svg import line_plot

s = parse_scenario("paper-renewable")
model = build_model(s.network)
res = resonance_experiment(model, s.network, s.signal.omega, amplitude=s.signal.amplitude, bus=s.signal.bus)
print(f"growth at {res.omega:.4f} rad/s: {res.resonant_growth:.2f}")
print(f"growth at {0.5 * res.omega:.4f} rad/s: {res.off_resonant_growth:.2f}")

# %%
out = Path("figures")
out.mkdir(exist_ok=True)
svg = line_plot(
    [("resonant forcing", res.resonant.t, res.resonant_series.inter_area),
     ("half-frequency forcing", res.off_resonant.t, res.off_resonant_series.inter_area)],
    "time [s]", "inter-area rate [p.u./s]", "Renewable forcing at bus 1")
(out / "resonance.svg").write_text(svg)
