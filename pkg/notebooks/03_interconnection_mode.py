# %% [markdown]
# # Finding the interconnection mode
#
# Compare the connected system (CIS) with the same system with its tie-lines
# removed (DIS).  Oscillatory CIS modes without a DIS partner exist only
# because the areas are tied together.

# %%
from interarea import build_model, disconnect_ties, eigen_decompose, identify_interconnection_mode, parse_scenario


def spectrum(network):
    model = build_model(network)
    return eigen_decompose(model.A, model.label_names)


for name in ("paper-case1", "paper-case2", "paper-inertia2"):
    net = parse_scenario(name).network
    match = identify_interconnection_mode(spectrum(net), spectrum(disconnect_ties(net)))
    print(f"{name}: interconnection mode(s) {[round(float(f), 4) for f in match.interconnection_frequencies]} rad/s, "
          f"zero modes CIS {match.cis_zero_count} / DIS {match.dis_zero_count}")
    for i, j, dist in match.pairs:
        print(f"    CIS {match.cis.eigenvalues[i]:.4f} paired with DIS {match.dis.eigenvalues[j]:.4f}")

# %% [markdown]
# The same comparison from the command line:
#
#     interarea modes-compare --scenario paper-case1
