# %% [markdown]
# # Modes and participation factors
#
# Eigenvalues of the reduced model for the built-in scenarios, with the
# states that participate in each oscillatory mode.

# %%
import numpy as np

from interarea import (build_model, builtin_names, classify_modes, dominant_states, eigen_decompose,
                       parse_scenario, participation_factors)

for name in ("paper-case1", "paper-case2", "paper-case3", "paper-inertia2"):
    s = parse_scenario(name)
    model = build_model(s.network, s.form)
    modes = eigen_decompose(model.A, model.label_names)
    cls = classify_modes(modes, s.zero_tol)
    p = participation_factors(modes)
    print(f"{name}: {len(cls.zero)} zero modes")
    for pair in cls.oscillatory:
        print(f"   {pair.frequency:.4f} rad/s  ->  {', '.join(dominant_states(p, pair.upper))}")

# %% [markdown]
# The zero eigenvalue of each connected component is a 2x2 Jordan block
# (a common angle drift).  The solver reports it as a repeated eigenvalue
# and flags the deficiency instead of inventing a second eigenvector.

# %%
s = parse_scenario("paper-case1")
modes = eigen_decompose(build_model(s.network).A)
print("defective:", modes.eigenvalues[modes.defective])
print(f"residual {modes.residual:.1e}, biorthogonality {modes.biorthogonality:.1e}")

# %% [markdown]
# The participation matrix itself.  Columns of the defective zero modes are
# NaN.  Note the slow mode of case 2: generator 1 sits just below the 0.1
# threshold.

# %%
s = parse_scenario("paper-case2")
model = build_model(s.network)
modes = eigen_decompose(model.A, model.label_names)
p = participation_factors(modes)
i = modes.nearest(0.8274)
for label, value in zip(modes.labels, p.values[:, i]):
    print(f"{label:>10}  {value:.4f}")

# %%
print(builtin_names())
