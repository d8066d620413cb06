#!/usr/bin/env python3
# Positive functionals: vector states, dual norms, orthogonality with
# witnesses, domination with certified gammas, GNS and Radon-Nikodym.

import numpy as np

from starrep import (
    Structure,
    difference_norm,
    embeds_as_subrepresentation,
    generate_algebra,
    gns,
    gns_intertwiner,
    is_dominated,
    is_orthogonal,
    orthogonality_witness,
    radon_nikodym_operator,
    types_dominated,
    types_orthogonal,
    vector_state,
)

e1 = np.array([1, 0], dtype=complex)
e2 = np.array([0, 1], dtype=complex)
u = np.array([1, 1], dtype=complex) / np.sqrt(2)

diag = Structure(generate_algebra([np.diag([1.0, 0.0])]), vectors={})
phi1, phi2, phiu = (vector_state(diag, v) for v in (e1, e2, u))

print("||phi_e1 - phi_e2|| =", difference_norm(phi1, phi2), "= ||phi|| + ||psi||")
print("so the axis states are orthogonal:", is_orthogonal(phi1, phi2))

wit = orthogonality_witness(phi1, phi2, 1e-6)
print("witness element:\n", np.round(wit.element.real, 6))
print("phi(1 - a) =", wit.phi_gap, " psi(a) =", wit.psi_gap)

ok, gamma = is_dominated(phi1, phiu)
print("\nphi_e1 <= gamma * phi_u with least gamma =", round(gamma, 9))
print("so (H_e1, e1) embeds into (H_u, u):", embeds_as_subrepresentation(diag, e1, u))

rn = radon_nikodym_operator(diag, u, e1)
print("Radon-Nikodym operator on H_u:\n", np.round(rn.operator.real, 6))
print("its copy of e1 inside H_u:", np.round(rn.v_copy, 6))

# GNS: the trace state on the diagonal algebra is cyclic on two dimensions
from starrep import PositiveFunctional
trace_state = PositiveFunctional(diag.algebra, np.eye(2))
rep = gns(diag.algebra, trace_state)
print("\nGNS of the trace state: dimension", rep.space_dim,
      " cyclic norm", round(float(np.linalg.norm(rep.cyclic)), 6))
print("state round-trip defect:", rep.roundtrip_defect)

# equal states are exactly the pointedly isomorphic GNS representations
r1 = gns(diag.algebra, phi1)
r2 = gns(diag.algebra, vector_state(diag, np.exp(0.3j) * e1))
_, defect = gns_intertwiner(r1, r2)
print("intertwiner defect for a phase-rotated copy:", defect)

# the subtle full-matrix-algebra case: phi_e1 and phi_e2 are orthogonal
# functionals although e1 and e2 generate unitarily equivalent cyclic
# representations; domination (the pointed notion) correctly fails
m2 = Structure(generate_algebra([np.array([[0, 1], [0, 0]], dtype=complex)]))
q1, q2 = vector_state(m2, e1), vector_state(m2, e2)
print("\non full M_2: orthogonal states:", is_orthogonal(q1, q2),
      " pointed embedding:", embeds_as_subrepresentation(m2, e1, e2))

# type-level relations over a base reduce to residual states
print("\ntp(e1) and tp(e2) orthogonal over {}:", types_orthogonal(diag, e1, e2, []))
print("tp(u) dominates tp(e1) over {}:", types_dominated(diag, u, e1, []))
