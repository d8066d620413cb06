"""The forking calculus: independence verdicts, type descriptors, non-forking
extensions, canonical bases, averaged copies and finite bases.

A tuple is independent from F over E when its projections onto acl(E) and
acl(E u F) coincide.  Types are captured by the projections onto the cyclic
subspace of the base together with the moment data of the residuals.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import ToleranceBreach, haar_unitary, project
from .representation import Structure, acl, cyclic_subspace, extend_with_summand

_WORD_LENGTH_CAP = 12
_WORD_COUNT_CAP = 300_000


def _as_tuple(vectors, n: int):
    """Normalize a vector / iterable of vectors into a (t, n) array plus a flag."""
    arr = np.asarray(vectors, dtype=complex)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != n:
        raise ValueError(f"vectors of length {arr.shape[1]} do not fit dimension {n}")
    return arr, single


def _letters(s: Structure):
    """Generator and adjoint-of-generator matrices indexing canonical words."""
    mats = []
    for g in s.algebra.generators:
        mats.append(np.asarray(g, dtype=complex))
    for g in s.algebra.generators:
        mats.append(np.asarray(g, dtype=complex).conj().T)
    return mats


def spanning_word_length(s: Structure) -> int:
    """Smallest L such that words of length <= L in the generators and their
    adjoints span the acting algebra.  Cached on the structure."""
    if s._words is not None:
        return s._words
    letters = _letters(s)
    n = s.dim
    target = s.algebra.size
    if not letters and target > 1:
        raise RuntimeError(
            "the acting algebra has no generators; word moments are unavailable")
    flat = np.eye(n, dtype=complex).reshape(1, -1)
    from .algebra import _append_to_row_basis, _orthonormal_rows
    q = _orthonormal_rows(flat, s.tol)
    current = [np.eye(n, dtype=complex)]
    length = 0
    while q.shape[0] < target:
        length += 1
        if length > _WORD_LENGTH_CAP or len(current) * max(len(letters), 1) > _WORD_COUNT_CAP:
            raise RuntimeError("generator words failed to span the algebra within the cap")
        nxt = [m @ w for m in letters for w in current]
        q = _append_to_row_basis(q, np.array([m.ravel() for m in nxt]), s.tol)
        current = nxt
    s._words = length
    return length


def _word_moment_map(s: Structure, residuals: np.ndarray, length: int) -> dict:
    """Moments <pi(w) r_j, r_k> for every word w up to the given length.

    Words are tuples of letter indices (generators first, then adjoints),
    applied right to left; the empty word is the identity.
    """
    letters = _letters(s)
    t = residuals.shape[0]
    moments = {(): residuals @ residuals.conj().T}
    level = {(): residuals}
    for _ in range(length):
        nxt = {}
        for w, vecs in level.items():
            for i, m in enumerate(letters):
                imgs = vecs @ m.T
                key = (i,) + w
                nxt[key] = imgs
                moments[key] = imgs @ residuals.conj().T
        level = nxt
    return moments


@dataclass
class TypeDescriptor:
    """Type data of a tuple over a base set: projections onto the base's cyclic
    subspace plus the residual moments against every algebra basis element."""

    base_projections: np.ndarray          # (t, n)
    moment_tensor: np.ndarray             # (algebra size, t, t)
    structure: Structure = field(repr=False, default=None)
    residuals: np.ndarray = field(repr=False, default=None)

    @property
    def tuple_len(self) -> int:
        return self.base_projections.shape[0]

    def word_moments(self, length: int | None = None) -> dict:
        if length is None:
            length = spanning_word_length(self.structure)
        return _word_moment_map(self.structure, self.residuals, length)


def type_of(s: Structure, vectors, base) -> TypeDescriptor:
    """Descriptor of tp(vectors / base) under the structure's semantics."""
    vs, _ = _as_tuple(vectors, s.dim)
    he = cyclic_subspace(s, base)
    bp = np.array([project(he, v) for v in vs])
    res = vs - bp
    moments = np.einsum("dab,jb,ka->djk", s.algebra.basis, res, res.conj())
    return TypeDescriptor(bp, moments, s, res)


def descriptor_distance(d1: TypeDescriptor, d2: TypeDescriptor) -> float:
    """Largest entrywise deviation between two descriptors.

    Descriptors from the same structure compare projections and basis moments
    directly; descriptors from different structures with matched generator
    labelings compare projections and generator-word moments instead.
    """
    if d1.tuple_len != d2.tuple_len:
        raise ValueError("descriptors describe tuples of different lengths")
    same_algebra = d1.structure is d2.structure or (
        d1.structure.algebra.basis.shape == d2.structure.algebra.basis.shape
        and np.array_equal(d1.structure.algebra.basis, d2.structure.algebra.basis))
    dist = 0.0
    if d1.base_projections.shape == d2.base_projections.shape:
        dist = float(np.max(np.abs(d1.base_projections - d2.base_projections), initial=0.0))
    elif same_algebra:
        raise ValueError("descriptors live in mismatched ambient dimensions")
    if same_algebra:
        dist = max(dist, float(np.max(np.abs(d1.moment_tensor - d2.moment_tensor), initial=0.0)))
        return dist
    if len(d1.structure.algebra.generators) != len(d2.structure.algebra.generators):
        raise ValueError("descriptors come from structures with mismatched generators")
    length = max(spanning_word_length(d1.structure), spanning_word_length(d2.structure))
    m1 = d1.word_moments(length)
    m2 = d2.word_moments(length)
    for w in m1:
        dist = max(dist, float(np.max(np.abs(m1[w] - m2[w]), initial=0.0)))
    return dist


def descriptors_close(d1: TypeDescriptor, d2: TypeDescriptor, tol: float | None = None) -> bool:
    if tol is None:
        tol = d1.structure.tol.eq_abs
    return descriptor_distance(d1, d2) <= tol


@dataclass
class IndependenceReport:
    """Outcome of an independence query, with the raw defect for re-thresholding."""

    verdict: bool
    defect: float
    witnesses: list  # per tuple entry: (projection onto acl(E), onto acl(E u F))

    def __bool__(self):
        return self.verdict


def is_independent(s: Structure, vectors, base, extra) -> IndependenceReport:
    """Whether the tuple is independent from `extra` over `base`.

    True when each entry's projection onto acl(base u extra) already lies in
    acl(base); the defect is the largest projection displacement.
    """
    vs, _ = _as_tuple(vectors, s.dim)
    small = acl(s, base)
    big = acl(s, list(base) + list(extra))
    witnesses = []
    defect = 0.0
    for v in vs:
        p1 = project(small, v)
        p2 = project(big, v)
        witnesses.append((p1, p2))
        defect = max(defect, float(np.linalg.norm(p2 - p1)))
    return IndependenceReport(defect <= s.tol.eq_abs, defect, witnesses)


def _check_base_extension(base, extra, tol) -> None:
    extra = [np.asarray(f, dtype=complex).ravel() for f in extra]
    for e in base:
        e = np.asarray(e, dtype=complex).ravel()
        if not any(f.size == e.size and np.linalg.norm(e - f) <= tol for f in extra):
            raise ValueError("the extension base must contain every base vector")


def nonforking_extension(s: Structure, vectors, base, extension, seed: int | None = None):
    """Non-forking extension of tp(vectors / base) to the larger base.

    Returns (extended structure, extended tuple).  The structure gains one
    fully essential summand carrying the compression onto the joint cyclic
    subspace of the residuals; each output vector is the base projection plus
    the fresh embedded copy of its residual.  Both defining conditions (the
    projection match and the residual type match) are verified numerically
    before returning.
    """
    vs, single = _as_tuple(vectors, s.dim)
    _check_base_extension(base, extension, s.tol.eq_abs)
    base_cl = acl(s, base)
    proj = np.array([project(base_cl, v) for v in vs])
    res = vs - proj

    hr = cyclic_subspace(s, list(res))
    rot = None
    if seed is not None and hr.dim:
        rot = haar_unitary(hr.dim, np.random.default_rng([seed, 0x0F0E]))
    shat = extend_with_summand(s, hr.basis, rotation=rot)
    emb = shat.embedding
    n, k = s.dim, emb.shape[1]

    compressed = res @ emb.conj()
    vprime = np.hstack([proj, compressed])
    f_emb = [np.concatenate([np.asarray(f, dtype=complex).ravel(),
                             np.zeros(k, dtype=complex)]) for f in extension]

    ext_cl = acl(shat, f_emb)
    tol = s.tol.eq_abs
    for j in range(vs.shape[0]):
        want = np.concatenate([proj[j], np.zeros(k, dtype=complex)])
        got = project(ext_cl, vprime[j])
        if np.linalg.norm(got - want) > 100 * tol * max(1.0, np.linalg.norm(vs[j])):
            raise ToleranceBreach(
                f"non-forking projection condition failed by {np.linalg.norm(got - want):.2e}")
    d_old = type_of(s, res, base)
    residual_new = vprime - np.array([project(ext_cl, w) for w in vprime])
    d_new = type_of(shat, residual_new, f_emb)
    gap = descriptor_distance(d_old, d_new)
    if gap > 100 * tol * max(1.0, float(np.max(np.abs(vs)))):
        raise ToleranceBreach(f"residual type condition failed by {gap:.2e}")
    if single:
        return shat, vprime[0]
    return shat, vprime


def canonical_base(s: Structure, vectors, base):
    """Canonical base of tp(vectors / base): projections onto the base's cyclic subspace."""
    vs, single = _as_tuple(vectors, s.dim)
    he = cyclic_subspace(s, base)
    out = np.array([project(he, v) for v in vs])
    return out[0] if single else out


@dataclass
class MorleyCheck:
    """Average of independent copies and its distance to the stationary part."""

    average: np.ndarray
    distance: float
    residual_norm: float
    copies: np.ndarray


def morley_average_check(s: Structure, v: np.ndarray, base, k: int) -> MorleyCheck:
    """Average k successive non-forking copies of v over the base.

    The copies share the projection onto acl(base) and carry fresh mutually
    orthogonal residual summands, so the distance of the k-average to the
    stationary part is exactly ||residual|| / sqrt(k).  The copies are built
    in one k-fold direct sum (identical to iterating the extension); copy
    orthogonality and the compression isometry are verified numerically.
    """
    if k < 1:
        raise ValueError("the copy count must be at least 1")
    v = np.asarray(v, dtype=complex).ravel()
    base_cl = acl(s, base)
    p = project(base_cl, v)
    r = v - p
    hr = cyclic_subspace(s, [r])
    b = hr.basis
    size = b.shape[1]
    rc = b.conj().T @ r
    if abs(np.linalg.norm(rc) - np.linalg.norm(r)) > 100 * s.tol.eq_abs * max(1.0, np.linalg.norm(r)):
        raise ToleranceBreach("residual compression is not isometric")
    _verify_compressed_moments(s, r, b, rc)

    n = s.dim
    total = n + k * size
    copies = np.zeros((k, total), dtype=complex)
    copies[:, :n] = p
    for i in range(k):
        copies[i, n + i * size: n + (i + 1) * size] = rc
    tails = copies[:, n:]
    gram = tails @ tails.conj().T
    expect = np.linalg.norm(r) ** 2 * np.eye(k)
    if np.max(np.abs(gram - expect)) > 100 * s.tol.eq_abs * max(1.0, np.linalg.norm(r) ** 2):
        raise ToleranceBreach("independent copies are not orthonormal")
    average = copies.mean(axis=0)
    limit = np.concatenate([p, np.zeros(k * size, dtype=complex)])
    distance = float(np.linalg.norm(average - limit))
    return MorleyCheck(average, distance, float(np.linalg.norm(r)), copies)


def _verify_compressed_moments(s: Structure, r: np.ndarray, b: np.ndarray, rc: np.ndarray):
    """Spot-check that compression preserves generator-word moments up to length 3."""
    gens = s.algebra.generators
    comp = [b.conj().T @ g @ b for g in gens]
    tol = 100 * s.tol.eq_abs * max(1.0, float(np.linalg.norm(r)) ** 2)
    for length in range(4):
        for word in itertools.product(range(len(gens)), repeat=length):
            x, y = r, rc
            for i in word:
                x = gens[i] @ x
                y = comp[i] @ y
            if abs(np.vdot(r, x) - np.vdot(rc, y)) > tol:
                raise ToleranceBreach("compression does not preserve residual moments")


@dataclass
class FiniteBase:
    """Greedy finite base: indices into F, the chosen sublist, and the moved tuple."""

    indices: list
    subset: list
    replacements: np.ndarray
    defect: float


def finite_base(s: Structure, vectors, pool, epsilon: float) -> FiniteBase:
    """Finite sub-base over which a small perturbation of the tuple is independent.

    Greedily adds elements of the pool whose closures most reduce the worst
    projection defect, stopping once every entry moved by less than epsilon.
    Each replacement keeps the residual and swaps the full-pool projection for
    the sub-pool projection, which makes the independence exact.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be strictly positive")
    vs, single = _as_tuple(vectors, s.dim)
    pool = [np.asarray(f, dtype=complex).ravel() for f in pool]
    full_cl = acl(s, pool)
    targets = np.array([project(full_cl, v) for v in vs])

    chosen: list[int] = []

    def worst_defect(idx_list):
        sub_cl = acl(s, [pool[i] for i in idx_list])
        return max(
            (float(np.linalg.norm(targets[j] - project(sub_cl, vs[j])))
             for j in range(vs.shape[0])),
            default=0.0,
        ), sub_cl

    current, sub_cl = worst_defect(chosen)
    while current >= epsilon:
        best = None
        for i in range(len(pool)):
            if i in chosen:
                continue
            cand_cl = acl(s, [pool[j] for j in chosen] + [pool[i]])
            if cand_cl.dim <= sub_cl.dim:
                continue
            score = max(
                float(np.linalg.norm(targets[j] - project(cand_cl, vs[j])))
                for j in range(vs.shape[0]))
            if best is None or score < best[0] - 1e-15:
                best = (score, i)
        if best is None:
            break
        chosen.append(best[1])
        current, sub_cl = worst_defect(chosen)

    replacements = vs - targets + np.array([project(sub_cl, v) for v in vs])
    out = replacements[0] if single else replacements
    return FiniteBase(list(chosen), [pool[i] for i in chosen], out, current)
