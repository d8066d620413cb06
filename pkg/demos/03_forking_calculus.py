#!/usr/bin/env python3
# The independence calculus: verdicts with defects, non-forking extensions
# into a fresh summand, canonical bases, Morley averages and finite bases.

import numpy as np

from starrep import (
    Structure,
    acl,
    canonical_base,
    descriptor_distance,
    finite_base,
    generate_algebra,
    is_independent,
    morley_average_check,
    nonforking_extension,
    project,
    type_of,
)

e1 = np.array([1, 0], dtype=complex)
e2 = np.array([0, 1], dtype=complex)
u = np.array([1, 1], dtype=complex) / np.sqrt(2)

s = Structure(generate_algebra([np.diag([1.0, 0.0])]),
              vectors={"e1": e1, "e2": e2, "u": u})

# axis vectors are independent over the empty set; u is entangled with e1
print("e1 indep e2:", is_independent(s, e1, [], [e2]).verdict)
rep = is_independent(s, u, [], [e1])
print("u indep e1:", rep.verdict, " defect =", round(rep.defect, 6), "= 1/sqrt(2)")

# the canonical base of tp(u / {e1}) is the projection onto the e1-orbit
print("canonical base of tp(u/{e1}):", np.round(canonical_base(s, u, [e1]), 6))

# a non-forking extension adds a fresh essential summand carrying the residual
shat, u_prime = nonforking_extension(s, e1, [], [e1])
print("\nextension lives in dimension", shat.dim)
print("u' =", np.round(u_prime, 6), " orthogonal to the original e1:",
      abs(np.vdot(np.concatenate([e1, [0]]), u_prime)) < 1e-12)

# stationarity: different seeds give the same type over the larger base
descs = []
for seed in (1, 2):
    sx, vx = nonforking_extension(s, u, [], [e1], seed=seed)
    f = [np.concatenate([e1, np.zeros(sx.dim - 2)])]
    res = np.atleast_2d(vx - project(acl(sx, f), vx))
    descs.append(type_of(sx, res, f))
print("two-seed descriptor distance:", descriptor_distance(*descs))

# Morley averages converge to the stationary part at the 1/sqrt(k) rate
print("\nMorley averages of tp(u/{e1}):")
for k in (1, 4, 16, 64):
    mc = morley_average_check(s, u, [e1], k)
    print(f"  k={k:3d}: distance {mc.distance:.6f}  law {mc.residual_norm/np.sqrt(k):.6f}")

# superstability at desk scale: a finite sub-base within epsilon
pool = [e1, e2, u]
fb = finite_base(s, u, pool, 1e-6)
print("\nfinite base picked indices", fb.indices, "out of", len(pool),
      "with defect", fb.defect)
print("moved copy is independent from the pool over the sub-base:",
      is_independent(s, fb.replacements, fb.subset, pool).verdict)
