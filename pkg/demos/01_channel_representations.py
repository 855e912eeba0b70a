"""A qubit channel in three equivalent representations.

Builds an amplitude-damping channel from Kraus operators, converts it to a
transfer matrix and a Choi matrix, recovers Kraus operators from the Choi
matrix, and checks that every road leads back to the same map.
"""

import numpy as np

from qdynmaps import channels, matcore, states

gamma = 0.3
kraus = channels.KrausSet(ops=(
    np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]], dtype=complex),
    np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex),
))
t = channels.transfer_from_kraus(kraus)

print(f"amplitude damping, gamma = {gamma}")
print(f"trace preserving: {t.is_trace_preserving()}")
print(f"unital:           {t.is_unital()}  (damping has a fixed point at |0><0|, not I/2)")

choi = channels.choi_of(t)
spectrum = matcore.herm_eig(choi).eigenvalues
print(f"\nChoi spectrum: {np.round(spectrum, 6)}")
print(f"CP: {channels.is_cp(t).is_cp}  (all Choi eigenvalues nonnegative)")

recovered = channels.kraus_from_choi(choi, 2, 2)
t2 = channels.transfer_from_kraus(recovered)
print(f"\nKraus rank recovered from the Choi matrix: {len(recovered.ops)}")
print(f"transfer round-trip residual: {np.abs(t2.transfer - t.transfer).max():.2e}")

rho = states.from_bloch((0.6, 0.0, -0.2))
print(f"\ninput Bloch vector:  {np.round(states.to_bloch(rho), 4)}")
print(f"output Bloch vector: {np.round(states.to_bloch(t.apply(rho)), 4)}")
print("the z component is pulled toward +1: relaxation toward the ground state")
