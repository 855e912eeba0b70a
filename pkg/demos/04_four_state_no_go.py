"""Four assigned states that admit no linear extension.

Assign reservoir states to the four Bloch-axis states x+, x-, z+, z-: pure
pointer states to the x pair, the maximally mixed state to the z pair. The
maximally mixed system state then has two convex decompositions over the
table -- (x+ + x-)/2 and (z+ + z-)/2 -- whose assigned images disagree. No
single linear map can honor both, so the table is witness to a conflict
rather than a partial description of some linear assignment.
"""

import numpy as np

from qdynmaps import matcore, opendyn, states

bloch = {"x+": (1, 0, 0), "x-": (-1, 0, 0), "z+": (0, 0, 1), "z-": (0, 0, -1)}
reservoir = {
    "x+": states.projector(states.ket(0, 2)),
    "x-": states.projector(states.ket(1, 2)),
    "z+": states.I2 / 2,
    "z-": states.I2 / 2,
}
names = list(bloch)
table = opendyn.TabulatedAssignment(
    pairs=tuple(
        (states.from_bloch(bloch[n]), matcore.kron(states.from_bloch(bloch[n]), reservoir[n]))
        for n in names
    ),
    d_s=2, d_r=2,
)

print("assigned pairs:")
for n in names:
    print(f"  {n}: reservoir = {'|0><0|' if n == 'x+' else '|1><1|' if n == 'x-' else 'I/2'}")

result = opendyn.extend_linearly(table)
print(f"\nextension outcome: {result.outcome}")
conf = result.conflict

def show(weights, indices):
    return " + ".join(f"{w:.2f} {names[k]}" for w, k in zip(weights, indices))

print(f"  decomposition A: {show(conf.weights_a, conf.indices_a)}")
print(f"  decomposition B: {show(conf.weights_b, conf.indices_b)}")
print(f"  both recombine to I/2 "
      f"(residuals {matcore.trace_norm(conf.recombined_a - states.I2 / 2):.1e}, "
      f"{matcore.trace_norm(conf.recombined_b - states.I2 / 2):.1e})")
print(f"  trace distance between the two assigned images: {conf.image_gap:.4f}")
print("  the x decomposition carries one full bit of reservoir correlation; "
      "the z decomposition carries none")

tau = states.from_bloch((0.2, 0.1, -0.3))
product_table = opendyn.TabulatedAssignment(
    pairs=tuple((a, matcore.kron(a, tau)) for a, _ in table.pairs), d_s=2, d_r=2)
result2 = opendyn.extend_linearly(product_table)
print(f"\nsame four system states, one shared reservoir state: {result2.outcome}")
print(f"  recovered map is the product assignment: "
      f"{isinstance(result2.extension, opendyn.ProductAssignment)}")
print("consistency + linearity + positivity everywhere leaves only rho -> rho (x) tau")
