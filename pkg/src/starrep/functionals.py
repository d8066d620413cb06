"""Positive linear functionals on a matrix *-algebra.

A functional is stored through its representing element under the trace
pairing, phi(a) = Tr(rho^H a), with rho inside the algebra span.  Positivity
is equivalent to rho being PSD; transporting rho to the Wedderburn block
basis turns every norm, orthogonality and domination question into
eigenvalue arithmetic on the compressed blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import StarAlgebra, conditional_expectation
from .linalg import ToleranceBreach, project, psd_sqrt
from .representation import Structure, acl, cyclic_subspace, essential_discrete_parts


class PositiveFunctional:
    """A positive linear functional given by its in-algebra trace representative."""

    def __init__(self, algebra: StarAlgebra, rep: np.ndarray, validate: bool = True):
        rep = np.asarray(rep, dtype=complex)
        if rep.shape != (algebra.dim, algebra.dim):
            raise ValueError(f"representative must be {algebra.dim}x{algebra.dim}")
        if validate:
            inside = conditional_expectation(rep, algebra)
            if np.linalg.norm(inside - rep) > 1e-6 * max(1.0, np.linalg.norm(rep)):
                raise ValueError("representative does not lie in the algebra span")
            rep = (inside + inside.conj().T) / 2
            w = np.linalg.eigvalsh(rep)
            if w.size and w[0] < -algebra.tol.psd_abs * max(1.0, abs(w[-1])):
                raise ValueError(f"functional is not positive (min eigenvalue {w[0]:.3e})")
        self.algebra = algebra
        self.rep = rep

    def __call__(self, a: np.ndarray) -> complex:
        return complex(np.trace(self.rep.conj().T @ np.asarray(a, dtype=complex)))

    def norm(self) -> float:
        """For a positive functional the norm is the value at the identity."""
        return float(np.real(np.trace(self.rep)))

    def __repr__(self):
        return f"PositiveFunctional(dim={self.algebra.dim}, norm={self.norm():.6g})"


def vector_state(s: Structure, v: np.ndarray) -> PositiveFunctional:
    """The state a -> <pi(a) v, v> of a vector, as an in-algebra representative."""
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != s.dim:
        raise ValueError(f"vector of length {v.size} does not fit dimension {s.dim}")
    rho = conditional_expectation(np.outer(v, v.conj()), s.algebra)
    return PositiveFunctional(s.algebra, rho, validate=False)


def _hermitian_blocks(algebra: StarAlgebra, rep: np.ndarray):
    dec = algebra.block_decomposition()
    parts = dec.block_parts(rep)
    return dec, [(p + p.conj().T) / 2 for p in parts]


def functional_norm(algebra: StarAlgebra, rep: np.ndarray) -> float:
    """Dual norm of a Hermitian functional: multiplicity-weighted blockwise trace norm."""
    rep = np.asarray(rep, dtype=complex)
    if np.linalg.norm(rep - rep.conj().T) > 1e-6 * max(1.0, np.linalg.norm(rep)):
        raise ValueError("functional representative is not Hermitian")
    dec, parts = _hermitian_blocks(algebra, rep)
    total = 0.0
    for (k, m), sigma in zip(dec.blocks, parts):
        total += m * float(np.sum(np.abs(np.linalg.eigvalsh(sigma))))
    return total


def difference_norm(phi: PositiveFunctional, psi: PositiveFunctional) -> float:
    _same_algebra(phi, psi)
    return functional_norm(phi.algebra, phi.rep - psi.rep)


def _same_algebra(phi: PositiveFunctional, psi: PositiveFunctional):
    if phi.algebra is not psi.algebra and not phi.algebra.spans_equal(psi.algebra):
        raise ValueError("functionals live on different algebras")


def _support_projector(sigma: np.ndarray, tol) -> np.ndarray:
    w, v = np.linalg.eigh((sigma + sigma.conj().T) / 2)
    if w.size == 0:
        return np.zeros_like(sigma)
    cut = max(tol.psd_abs, tol.rank_rel * max(float(w[-1]), 0.0))
    keep = v[:, w > cut]
    return keep @ keep.conj().T


def _supports_orthogonal(phi: PositiveFunctional, psi: PositiveFunctional) -> bool:
    dec, parts_phi = _hermitian_blocks(phi.algebra, phi.rep)
    _, parts_psi = _hermitian_blocks(psi.algebra, psi.rep)
    tol = phi.algebra.tol
    for sp, sq in zip(parts_phi, parts_psi):
        pp = _support_projector(sp, tol)
        pq = _support_projector(sq, tol)
        if np.linalg.norm(pp @ pq) > 1e-6:
            return False
    return True


def is_orthogonal(phi: PositiveFunctional, psi: PositiveFunctional) -> bool:
    """Orthogonality of positive functionals: ||phi - psi|| = ||phi|| + ||psi||.

    The norm criterion is cross-checked against blockwise support
    orthogonality of the representatives; a disagreement raises, since both
    must coincide in finite dimension.
    """
    _same_algebra(phi, psi)
    gap = abs(difference_norm(phi, psi) - (phi.norm() + psi.norm()))
    by_norm = gap <= max(phi.algebra.tol.eq_abs, 1e-10 * (phi.norm() + psi.norm()))
    by_support = _supports_orthogonal(phi, psi)
    if by_norm != by_support:
        raise ToleranceBreach(
            f"orthogonality criteria disagree (norm gap {gap:.3e}, support {by_support})")
    return by_norm


@dataclass
class OrthogonalityWitness:
    """A positive norm-one element separating two functionals, or the best floor."""

    success: bool
    element: np.ndarray | None
    phi_gap: float
    psi_gap: float
    floor: float


def orthogonality_witness(phi: PositiveFunctional, psi: PositiveFunctional,
                          epsilon: float) -> OrthogonalityWitness:
    """Positive a with ||a|| <= 1, phi(I - a) < eps and psi(a) < eps, when one exists.

    The witness is the spectral support-complement projection of psi's block
    representative, which lies in the algebra.  When the functionals are not
    orthogonal the result reports the best achievable floor over the tested
    spectral projections of psi.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be strictly positive")
    _same_algebra(phi, psi)
    algebra = phi.algebra
    dec, parts_psi = _hermitian_blocks(algebra, psi.rep)
    tol = algebra.tol

    candidates = []
    # kernel-of-support projection plus every spectral cut of psi's blocks
    thresholds = [None]
    pooled = sorted({round(float(x), 14) for sigma in parts_psi
                     for x in np.linalg.eigvalsh(sigma) if x > tol.psd_abs})
    thresholds.extend(pooled)
    for th in thresholds:
        blocks = []
        for sigma in parts_psi:
            w, v = np.linalg.eigh((sigma + sigma.conj().T) / 2)
            if th is None:
                cut = max(tol.psd_abs, tol.rank_rel * max(float(w[-1]), 0.0) if w.size else 0.0)
            else:
                cut = th + 1e-12
            kill = v[:, w <= cut]
            blocks.append(kill @ kill.conj().T)
        candidates.append(dec.assemble(blocks))

    best = None
    for a in candidates:
        pg = float(np.real(phi(np.eye(algebra.dim)) - phi(a)))
        sg = float(np.real(psi(a)))
        score = max(pg, sg)
        if best is None or score < best[0]:
            best = (score, a, pg, sg)
    score, a, pg, sg = best
    if pg < epsilon and sg < epsilon:
        return OrthogonalityWitness(True, a, pg, sg, score)
    return OrthogonalityWitness(False, None, pg, sg, score)


def is_dominated(phi: PositiveFunctional, psi: PositiveFunctional):
    """Whether gamma * psi - phi is positive for some gamma > 0, with the least gamma.

    Holds exactly when phi's block supports are contained in psi's; the least
    gamma is the largest generalized eigenvalue of the representatives on
    psi's support, certified PSD before returning.
    """
    _same_algebra(phi, psi)
    algebra = phi.algebra
    tol = algebra.tol
    dec, parts_phi = _hermitian_blocks(algebra, phi.rep)
    _, parts_psi = _hermitian_blocks(algebra, psi.rep)
    gamma = 0.0
    for sp, sq in zip(parts_phi, parts_psi):
        w, v = np.linalg.eigh((sq + sq.conj().T) / 2)
        cut = max(tol.psd_abs, tol.rank_rel * max(float(w[-1]), 0.0) if w.size else 0.0)
        keep = w > cut
        kernel = v[:, ~keep]
        if kernel.shape[1]:
            leak = float(np.linalg.norm(kernel.conj().T @ sp @ kernel))
            if leak > tol.psd_abs * max(1.0, float(np.linalg.norm(sp))):
                return False, None
        if not np.any(keep):
            continue
        bs = v[:, keep]
        s_psi = bs.conj().T @ sq @ bs
        s_phi = bs.conj().T @ sp @ bs
        inv_sqrt = np.linalg.inv(psd_sqrt(s_psi, tol))
        ratios = np.linalg.eigvalsh(inv_sqrt @ s_phi @ inv_sqrt.conj().T)
        if ratios.size:
            gamma = max(gamma, float(ratios[-1]))
    gamma = max(gamma, 0.0)
    slack = np.linalg.eigvalsh(gamma * psi.rep - phi.rep)
    if slack.size and slack[0] < -tol.psd_abs * max(1.0, gamma):
        raise ToleranceBreach(
            f"certified gamma fails positivity (min eigenvalue {slack[0]:.3e})")
    return True, gamma


class GnsRep:
    """Cyclic representation built from a positive functional.

    `action` holds one matrix per algebra basis element; `coord_map` sends
    basis coefficient vectors to quotient coordinates; the cyclic vector is
    the class of the identity.
    """

    def __init__(self, algebra: StarAlgebra, space_dim: int, action: np.ndarray,
                 cyclic: np.ndarray, coord_map: np.ndarray,
                 roundtrip_defect: float, star_hom_defect: float):
        self.algebra = algebra
        self.space_dim = int(space_dim)
        self.action = action
        self.cyclic = cyclic
        self.coord_map = coord_map
        self.roundtrip_defect = float(roundtrip_defect)
        self.star_hom_defect = float(star_hom_defect)

    def quotient_vector(self, m: np.ndarray) -> np.ndarray:
        """Image of an algebra element's class in the representation space."""
        return self.coord_map @ self.algebra.coefficients(m)

    def act(self, m: np.ndarray) -> np.ndarray:
        """Action of an arbitrary algebra element (expanded on the basis)."""
        c = self.algebra.coefficients(m)
        return np.einsum("k,kab->ab", c, self.action)

    def state_values(self) -> np.ndarray:
        """<pi(b) v, v> over the algebra basis; equals the source functional."""
        return np.einsum("kab,b,a->k", self.action, self.cyclic, self.cyclic.conj())

    def __repr__(self):
        return f"GnsRep(space_dim={self.space_dim})"


def gns(algebra: StarAlgebra, phi: PositiveFunctional, verify: bool = True) -> GnsRep:
    """Gelfand-Naimark-Segal construction for a positive functional.

    The Gram matrix of the basis under phi(b^H c) is diagonalized; directions
    below the relative rank cutoff form the null space and are quotiented
    away.  Left multiplication pushed through the quotient gives the action,
    and the class of the identity is the cyclic vector.
    """
    if phi.algebra is not algebra and not phi.algebra.spans_equal(algebra):
        raise ValueError("functional lives on a different algebra")
    if phi.norm() <= algebra.tol.eq_abs:
        raise ValueError("the functional is degenerate (vanishes at the identity)")
    basis = algebra.basis
    d, n = basis.shape[0], algebra.dim
    weighted = basis @ phi.rep
    gram = np.einsum("kab,jab->kj", weighted.conj(), basis)
    gram = (gram + gram.conj().T) / 2
    w, v = np.linalg.eigh(gram)
    w = w[::-1]
    v = v[:, ::-1]
    keep = w > algebra.tol.rank_rel * max(float(w[0]), 0.0)
    r = int(np.sum(keep))
    lam = w[:r]
    vk = v[:, :r]
    coord_map = (np.sqrt(lam)[:, None]) * vk.conj().T          # (r, d)
    inv = vk * (1.0 / np.sqrt(lam))[None, :]                   # (d, r)

    prods = np.einsum("iab,jbc->ijac", basis, basis)
    lmul = np.einsum("kab,ijab->ikj", basis.conj(), prods) / max(n, 1)
    action = np.einsum("rk,ikj,js->irs", coord_map, lmul, inv)
    cyclic = coord_map @ algebra.coefficients(np.eye(n, dtype=complex))

    rep = GnsRep(algebra, r, action, cyclic, coord_map, 0.0, 0.0)
    roundtrip = float(np.max(np.abs(rep.state_values()
                                    - np.array([phi(b) for b in basis]))))
    adj_coeff = np.array([algebra.coefficients(b.conj().T) for b in basis])
    comp = np.einsum("iab,jbc->ijac", action, action)
    expected = np.einsum("ikj,kab->ijab", lmul, action)
    star_defect = float(np.max(np.abs(comp - expected))) if comp.size else 0.0
    adj_expected = np.einsum("ik,kab->iab", adj_coeff, action)
    adj_actual = action.conj().transpose(0, 2, 1)
    if action.size:
        star_defect = max(star_defect, float(np.max(np.abs(adj_actual - adj_expected))))
    rep.roundtrip_defect = roundtrip
    rep.star_hom_defect = star_defect

    if verify:
        scale = max(1.0, phi.norm())
        if roundtrip > 100 * algebra.tol.eq_abs * scale:
            raise ToleranceBreach(f"GNS state round trip off by {roundtrip:.2e}")
        if star_defect > 100 * algebra.tol.eq_abs * max(1.0, float(np.max(np.abs(action)))):
            raise ToleranceBreach(f"GNS action fails *-homomorphism by {star_defect:.2e}")
        orbit = action @ cyclic
        if np.linalg.matrix_rank(orbit) < r:
            raise ToleranceBreach("GNS cyclic vector does not generate the space")
    return rep


def gns_intertwiner(rep1: GnsRep, rep2: GnsRep):
    """Best unitary intertwiner matching cyclic vectors, with its defect.

    Returns (U, defect) where defect bounds the violation of U pi_1 = pi_2 U,
    U v_1 = v_2 and unitarity; a defect at tolerance certifies the two
    representations pointedly isomorphic.
    """
    if rep1.space_dim != rep2.space_dim:
        return None, float("inf")
    y1 = np.concatenate([rep1.action @ rep1.cyclic, rep1.cyclic[None, :]], axis=0).T
    y2 = np.concatenate([rep2.action @ rep2.cyclic, rep2.cyclic[None, :]], axis=0).T
    u, *_ = np.linalg.lstsq(y1.T, y2.T, rcond=None)
    u = u.T
    defect = float(np.max(np.abs(u @ y1 - y2)))
    defect = max(defect, float(np.max(np.abs(u.conj().T @ u - np.eye(rep1.space_dim)))))
    inter = np.einsum("ab,kbc->kac", u, rep1.action) - np.einsum("kab,bc->kac", rep2.action, u)
    if inter.size:
        defect = max(defect, float(np.max(np.abs(inter))))
    return u, defect


def embeds_as_subrepresentation(s: Structure, v: np.ndarray, w: np.ndarray) -> bool:
    """Whether the cyclic representation of v embeds into that of w (pointedly).

    Decided by state domination phi_v <= phi_w and cross-checked by direct
    solvability of the orbit map pi(a) w -> pi(a) v, which exists and is
    bounded exactly under domination.
    """
    v = np.asarray(v, dtype=complex).ravel()
    w = np.asarray(w, dtype=complex).ravel()
    dominated, _ = is_dominated(vector_state(s, v), vector_state(s, w))

    ow = np.einsum("kab,b->ka", s.algebra.basis, w).T        # (n, d) orbit of w
    ov = np.einsum("kab,b->ka", s.algebra.basis, v).T
    _, sv, vh = np.linalg.svd(ow)
    cutoff = s.tol.rank_rel * max(float(sv[0]) if sv.size else 0.0, 1.0)
    rank = int(np.sum(sv > cutoff))
    null = vh[rank:].conj().T
    leak = float(np.linalg.norm(ov @ null)) if null.size else 0.0
    solvable = leak <= 1e-6 * max(1.0, float(np.linalg.norm(ov)))
    if solvable != dominated:
        raise ToleranceBreach(
            f"domination and orbit-map solvability disagree (leak {leak:.3e})")
    return dominated


@dataclass
class RadonNikodym:
    """Positive commutant operator T on H_w with T w = v', phi_{v'} = phi_v."""

    operator: np.ndarray      # acting on H_w coordinates
    basis: np.ndarray         # orthonormal basis of H_w inside the ambient space
    v_copy: np.ndarray        # the realized copy of v, in ambient coordinates
    gamma: float


def radon_nikodym_operator(s: Structure, w: np.ndarray, v: np.ndarray):
    """The Radon-Nikodym operator realizing phi_v inside the cyclic space of w.

    Returns None when phi_v is not dominated by phi_w.  Otherwise solves the
    sesquilinear system <D pi(a) w, pi(b) w> = phi_v(b^H a) on H_w, takes the
    positive square root T and certifies positivity, commutation with the
    compressed algebra, and that the copy T w carries the state of v.
    """
    v = np.asarray(v, dtype=complex).ravel()
    w = np.asarray(w, dtype=complex).ravel()
    phi_v, phi_w = vector_state(s, v), vector_state(s, w)
    dominated, gamma = is_dominated(phi_v, phi_w)
    if not dominated:
        return None

    hw = cyclic_subspace(s, [w])
    b = hw.basis
    h = b.shape[1]
    if h == 0:
        return RadonNikodym(np.zeros((0, 0), dtype=complex), b,
                            np.zeros(s.dim, dtype=complex), float(gamma or 0.0))
    comp = np.einsum("pa,kab,bq->kpq", b.conj().T, s.algebra.basis, b)
    wc = b.conj().T @ w
    y = (comp @ wc).T                                        # (h, d), columns pi(b_k) w
    weighted = s.algebra.basis @ phi_v.rep
    m = np.einsum("kab,jab->kj", weighted.conj(), s.algebra.basis)
    m = (m + m.conj().T) / 2
    pinv = np.linalg.pinv(y, rcond=1e-12)
    d_op = pinv.conj().T @ m @ pinv
    d_op = (d_op + d_op.conj().T) / 2

    tol = s.tol
    resid = float(np.linalg.norm(y.conj().T @ d_op @ y - m))
    if resid > 1e-6 * max(1.0, float(np.linalg.norm(m))):
        raise ToleranceBreach(f"Radon-Nikodym system inconsistent by {resid:.2e}")
    eigs = np.linalg.eigvalsh(d_op)
    if eigs.size and eigs[0] < -tol.psd_abs * max(1.0, float(eigs[-1])):
        raise ToleranceBreach(f"Radon-Nikodym operator not PSD ({eigs[0]:.3e})")
    t_op = psd_sqrt(d_op, tol)
    comm_defect = max(
        (float(np.linalg.norm(t_op @ c - c @ t_op)) for c in comp), default=0.0)
    if comm_defect > 1e-6 * max(1.0, float(np.linalg.norm(t_op))):
        raise ToleranceBreach(f"Radon-Nikodym operator leaves the commutant by {comm_defect:.2e}")
    copy_c = t_op @ wc
    copy = b @ copy_c
    state_gap = max(
        (abs(vector_state(s, copy)(bb) - phi_v(bb)) for bb in s.algebra.basis), default=0.0)
    if state_gap > 1e-6 * max(1.0, phi_v.norm()):
        raise ToleranceBreach(f"realized copy carries the wrong state (gap {state_gap:.2e})")
    return RadonNikodym(t_op, b, copy, float(gamma or 0.0))


def _residual_essential(s: Structure, v: np.ndarray, base) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    r = v - project(acl(s, base), v)
    r_e, _ = essential_discrete_parts(s, r)
    return r_e


def types_orthogonal(s: Structure, v: np.ndarray, w: np.ndarray, base) -> bool:
    """Orthogonality of tp(v/base) and tp(w/base) via residual vector states."""
    rv = _residual_essential(s, v, base)
    rw = _residual_essential(s, w, base)
    return is_orthogonal(vector_state(s, rv), vector_state(s, rw))


def types_dominated(s: Structure, v: np.ndarray, w: np.ndarray, base) -> bool:
    """Whether tp(v/base) dominates tp(w/base): the w-residual state is
    dominated by the v-residual state."""
    rv = _residual_essential(s, v, base)
    rw = _residual_essential(s, w, base)
    return is_dominated(vector_state(s, rw), vector_state(s, rv))[0]
