#!/usr/bin/env python3
# Definable and algebraic closures in a small representation.
#
# The running example: the diagonal algebra acting on C^2, once purely
# essential and once with the second axis declared discrete.

import numpy as np

from starrep import Structure, acl, cyclic_subspace, essential_discrete_parts
from starrep import generate_algebra, orthonormalize

e1 = np.array([1, 0], dtype=complex)
e2 = np.array([0, 1], dtype=complex)
u = np.array([1, 1], dtype=complex) / np.sqrt(2)

# the algebra generated by diag(1, 0) is all diagonal matrices
algebra = generate_algebra([np.diag([1.0, 0.0])])
print("algebra span dimension:", algebra.size)          # 2

s = Structure(algebra, vectors={"e1": e1, "e2": e2, "u": u})

# dcl(E) is the cyclic subspace: everything the algebra generates from E
print("dcl({})   has dimension", cyclic_subspace(s, []).dim)        # 0
print("dcl({e1}) has dimension", cyclic_subspace(s, [e1]).dim)      # 1
print("dcl({u})  has dimension", cyclic_subspace(s, [u]).dim)       # 2: diag action separates the axes

# with no discrete part, acl agrees with dcl
print("acl({}) =", acl(s, []).dim, "dimensional")

# now declare span{e2} discrete; it is invariant under the diagonal action
s_hd = Structure(algebra, discrete=orthonormalize([e2], 2),
                 vectors={"e1": e1, "e2": e2, "u": u})
print("\nwith H_d = span{e2}:")
print("acl({}) =", acl(s_hd, []).dim, "dimensional  (the discrete part)")

# every vector splits into an essential and a discrete component
v_e, v_d = essential_discrete_parts(s_hd, u)
print("u splits into essential", np.round(v_e, 4), "and discrete", np.round(v_d, 4))
print("norms add in squares:",
      np.isclose(np.linalg.norm(u) ** 2,
                 np.linalg.norm(v_e) ** 2 + np.linalg.norm(v_d) ** 2))
