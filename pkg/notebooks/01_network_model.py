# %% [markdown]
# # From network data to a state-space model
#
# The three-bus, two-area test system: buses 1 and 2 form area 1, bus 3 is
# area 2, and line 2-3 is the tie-line.  Every bus carries a generator with a
# co-located load, so no bus has to be eliminated.

# %%
import numpy as np

from interarea import Bus, GeneratorParams, Line, build_model, build_network, jacobian, reduce_network

np.set_printoptions(precision=4, suppress=True)

gen = GeneratorParams(M=3.2)
net = build_network(
    [Bus("1", generator=gen), Bus("2", generator=gen), Bus("3", generator=gen)],
    [Line("1", "2", 1 / 15), Line("2", "3", 1 / 15)],
    {"1": ["1", "2"], "2": ["3"]},
)
print("tie-lines:", [ln.name for ln in net.tie_lines])

# %% [markdown]
# At flat start the power-angle Jacobian is the susceptance-weighted
# Laplacian of the line graph.

# %%
J = jacobian(net)
print(J)
print("row sums:", J.sum(axis=1))

# %% [markdown]
# Putting a pure load bus between two machines shows the Schur-complement
# reduction at work: two susceptances of 15 in series act like one of 7.5,
# and a load change at the midpoint is shared equally by both machines.

# %%
mid = build_network(
    [Bus("1", generator=gen), Bus("2", kind="load"), Bus("3", generator=gen)],
    [Line("1", "2", 1 / 15), Line("2", "3", 1 / 15)],
    {"1": ["1", "2", "3"]},
)
red = reduce_network(mid)
print("K_P =\n", red.K_P)
print("D_P =\n", red.D_P)

# %% [markdown]
# The reduced model keeps the speed deviation and electrical power of each
# machine; the full model adds turbine power and valve position.

# %%
reduced = build_model(net)
full = build_model(net, "full")
print(reduced.label_names)
print(full.label_names)
print(reduced.A)
