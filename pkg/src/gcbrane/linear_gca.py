"""Linear generalized complex structures on V + V* and brane splittings.

Vectors in the double V + V* are length-2m rational rows (X, xi).  The
pairing is the canonical half-sum <X+xi, Y+eta> = (xi(Y) + eta(X))/2,
and a structure is a 2m x 2m rational matrix squaring to -1 and
orthogonal for that pairing.  `split_linear_brane` runs the explicit
complement construction that puts the structure into the block form

    [[-I, P], [0, I^T]]

by a B-field gauge, with the brane becoming an I-complex subspace and
its generalized tangent space becoming the standard one.  All choices
are made deterministically (scan order, never magnitude), so identical
inputs give identical splittings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PreconditionError
from . import linalg as la

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def pairing(u, v):
    """Half-sum pairing of two rows in V + V*."""
    m = len(u) // 2
    total = Fraction(0)
    for i in range(m):
        total += u[i] * v[m + i] + u[m + i] * v[i]
    return total * HALF


def _to_frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def _is_antisymmetric(A):
    n = len(A)
    return all(A[i][j] == -A[j][i] for i in range(n) for j in range(n))


def _block(op, r0, c0, m):
    return [[op[r0 + i][c0 + j] for j in range(m)] for i in range(m)]


@dataclass
class LinearGC:
    """A 2m x 2m rational operator on V + V*."""

    op: list

    def __post_init__(self):
        self.op = _to_frac_matrix(self.op)
        if len(self.op) % 2 or any(len(r) != len(self.op) for r in self.op):
            raise ValueError("operator must be square of even size")

    @property
    def m(self):
        return len(self.op) // 2

    def apply(self, v):
        return la.mat_vec(self.op, v)


def real_poisson(gc: LinearGC):
    """Upper-right block V* -> V, the real Poisson bivector."""
    return _block(gc.op, 0, gc.m, gc.m)


def check_gc(gc: LinearGC) -> dict:
    """Exact report: square is -1, pairing-orthogonal, Poisson antisym."""
    op = gc.op
    m = gc.m
    sq = la.mat_mul(op, op)
    minus_id = la.mat_scale(Fraction(-1), la.eye(2 * m, ONE))
    square_ok = sq == minus_id
    # orthogonality: op^T G op == G; G op just swaps halves of the rows
    # (times 1/2), so only one real product is needed.
    G_op = [[HALF * x for x in op[m + i]] for i in range(m)] + [
        [HALF * x for x in op[i]] for i in range(m)
    ]
    G = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        G[i][m + i] = HALF
        G[m + i][i] = HALF
    orth_ok = la.mat_mul(la.transpose(op), G_op) == G
    P = real_poisson(gc)
    p_ok = _is_antisymmetric(P)
    return {
        "square_ok": square_ok,
        "orthogonal_ok": orth_ok,
        "poisson_antisym_ok": p_ok,
        "ok": square_ok and orth_ok and p_ok,
    }


def make_symplectic_gc(omega) -> LinearGC:
    omega = _to_frac_matrix(omega)
    m = len(omega)
    if m % 2:
        raise ValueError("symplectic form needs even dimension")
    if not _is_antisymmetric(omega):
        raise ValueError("omega must be antisymmetric")
    try:
        om_inv = la.inverse(omega)
    except ValueError:
        raise ValueError("omega must be invertible") from None
    op = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            op[i][m + j] = om_inv[i][j]
            op[m + i][j] = -omega[i][j]
    return LinearGC(op)


def make_complex_gc(I) -> LinearGC:
    I = _to_frac_matrix(I)
    m = len(I)
    if la.mat_mul(I, I) != la.mat_scale(Fraction(-1), la.eye(m, ONE)):
        raise ValueError("I must square to -identity")
    op = [[ZERO] * (2 * m) for _ in range(2 * m)]
    It = la.transpose(I)
    for i in range(m):
        for j in range(m):
            op[i][j] = -I[i][j]
            op[m + i][m + j] = It[i][j]
    return LinearGC(op)


def make_complex_poisson_gc(I, P) -> LinearGC:
    I = _to_frac_matrix(I)
    P = _to_frac_matrix(P)
    m = len(I)
    if la.mat_mul(I, I) != la.mat_scale(Fraction(-1), la.eye(m, ONE)):
        raise ValueError("I must square to -identity")
    if not _is_antisymmetric(P):
        raise ValueError("P must be antisymmetric")
    if la.mat_mul(I, P) != la.mat_mul(P, la.transpose(I)):
        raise ValueError("incompatible blocks: I P != P I^T, square is not -1")
    op = [[ZERO] * (2 * m) for _ in range(2 * m)]
    It = la.transpose(I)
    for i in range(m):
        for j in range(m):
            op[i][j] = -I[i][j]
            op[i][m + j] = P[i][j]
            op[m + i][m + j] = It[i][j]
    return LinearGC(op)


def _exp_b_matrix(B):
    m = len(B)
    E = la.eye(2 * m, ONE)
    for i in range(m):
        for j in range(m):
            E[m + i][j] = B[i][j]
    return E


def b_transform(gc: LinearGC, B) -> LinearGC:
    """Conjugate by the gauge transform X + xi -> X + xi + B(X)."""
    B = _to_frac_matrix(B)
    if not _is_antisymmetric(B):
        raise ValueError("B must be antisymmetric")
    E = _exp_b_matrix(B)
    Einv = _exp_b_matrix(la.mat_neg(B))
    return LinearGC(la.mat_mul(E, la.mat_mul(gc.op, Einv)))


# -- branes -----------------------------------------------------------------


def annihilator_rows(S_rows, m):
    """N*S embedded in V + V* as rows (0, xi)."""
    if not S_rows:
        return [
            [ZERO] * m + [ONE if j == i else ZERO for j in range(m)]
            for i in range(m)
        ]
    xis = la.kernel_basis(_to_frac_matrix(S_rows))
    return [[ZERO] * m + list(xi) for xi in xis]


def anchor_rows(rows):
    """Anchor image a(span) as a row basis in V."""
    m = len(rows[0]) // 2 if rows else 0
    return la.row_basis([row[:m] for row in rows])


@dataclass
class LinearBrane:
    S_rows: list
    tau_rows: list

    def __post_init__(self):
        self.S_rows = la.row_basis(_to_frac_matrix(self.S_rows)) if self.S_rows else []
        self.tau_rows = la.row_basis(_to_frac_matrix(self.tau_rows))


def brane_tangent_from_F(S_rows, F, m) -> LinearBrane:
    """tau = {X + xi : X in S, xi|_S = F(X)} + N*S, the F-twisted tangent.

    F is an antisymmetric matrix on ambient coordinates (only its
    restriction to S matters).
    """
    F = _to_frac_matrix(F)
    if not _is_antisymmetric(F):
        raise ValueError("F must be antisymmetric")
    S_rows = _to_frac_matrix(S_rows)
    rows = [list(X) + la.mat_vec(F, X) for X in S_rows]
    rows += annihilator_rows(S_rows, m)
    return LinearBrane(S_rows, rows)


def lagrangian_tau(gc: LinearGC, S_rows) -> LinearBrane:
    """tau = gc(N*S) + N*S for a Lagrangian S of the real Poisson."""
    m = gc.m
    S_rows = _to_frac_matrix(S_rows)
    P = real_poisson(gc)
    if la.rank(P) != m:
        raise PreconditionError("real Poisson block is not invertible")
    omega = la.inverse(P)  # inverse symplectic form, up to sign convention
    for u in S_rows:
        for v in S_rows:
            val = sum(omega[i][j] * u[i] * v[j] for i in range(m) for j in range(m))
            if val:
                raise PreconditionError(
                    f"S is not Lagrangian: omega(u,v) = {val} for basis vectors"
                )
    if 2 * len(S_rows) != m:
        raise PreconditionError("Lagrangian subspace must have half dimension")
    ann = annihilator_rows(S_rows, m)
    rows = [gc.apply(x) for x in ann] + ann
    return LinearBrane(S_rows, rows)


def check_linear_brane(gc: LinearGC, brane: LinearBrane) -> dict:
    """Exact report: maximal isotropic, gc-invariant, anchored on S,
    and coisotropy P(N*S) inside S."""
    m = gc.m
    tau = brane.tau_rows
    iso_ok = len(tau) == m and all(
        pairing(u, v) == 0 for u in tau for v in tau
    )
    tau_span = la.Span(tau)
    inv_ok = all(tau_span.contains(gc.apply(u)) for u in tau)
    anchor = anchor_rows(tau)
    anchor_ok = la.row_basis(brane.S_rows) == anchor if brane.S_rows else not anchor
    P = real_poisson(gc)
    s_span = la.Span(brane.S_rows or [])
    coiso_ok = True
    for row in annihilator_rows(brane.S_rows, m):
        img = la.mat_vec(P, row[m:])
        if any(img) and not s_span.contains(img):
            coiso_ok = False
            break
    return {
        "isotropic_ok": iso_ok,
        "invariant_ok": inv_ok,
        "anchor_ok": anchor_ok,
        "coisotropic_ok": coiso_ok,
        "ok": iso_ok and inv_ok and anchor_ok and coiso_ok,
    }


# -- the splitting ----------------------------------------------------------


def _invariant_complement(gc, inside_rows, sub_rows):
    """Greedy gc-invariant complement of span(sub) in span(inside).

    Scans the basis of `inside` in order; a vector c outside the current
    span contributes the pair {c, gc(c)}, which enlarges the span by two
    because the span stays gc-invariant throughout.
    """
    sp = la.Span(sub_rows)
    added = []
    for c in inside_rows:
        if not sp.add(c):
            continue
        gcc = gc.apply(c)
        if not sp.add(gcc):
            raise AssertionError("invariant pair failed to add two dimensions")
        added.extend([list(c), gcc])
    return added


def _project_onto(target_rows, along_rows, vs):
    """Components of each v in span(target) along span(along)."""
    cols = la.transpose([list(r) for r in target_rows] + [list(r) for r in along_rows])
    X = la.solve_multi(cols, la.transpose([list(v) for v in vs]))
    if X is None:
        raise AssertionError("vector outside the direct sum being projected in")
    outs = []
    for j in range(len(vs)):
        out = [ZERO] * len(vs[j])
        for i, row in enumerate(target_rows):
            out = la.vec_add(out, la.vec_scale(X[i][j], row))
        outs.append(out)
    return outs


@dataclass
class LinearSplitting:
    U_rows: list
    I: list
    P: list
    B: list
    gauge_op: list
    U_N: list = field(default_factory=list)
    U_P: list = field(default_factory=list)
    U_S: list = field(default_factory=list)


def split_linear_brane(gc: LinearGC, brane: LinearBrane) -> LinearSplitting:
    """Split off the brane: gauge the structure into holomorphic Poisson
    block form with S complex and tau standard.

    Follows the complement construction: W = N*S + gc(N*S) sits inside
    tau; U_S completes it invariantly in tau; U_P is spanned by the
    paired combinations f + gc(g), gc(f) - g over a complement of
    N*S n gc(N*S); U_N is an isotropized invariant complement in the
    orthogonal space of the rest.  U = U_N + U_P + U_S is isotropic,
    invariant, and anchors onto all of V, which is exactly what the
    block form needs.
    """
    m = gc.m
    rep = check_gc(gc)
    if not rep["ok"]:
        raise PreconditionError(f"not a generalized complex structure: {rep}")
    brep = check_linear_brane(gc, brane)
    if not brep["ok"]:
        raise PreconditionError(f"not a linear brane: {brep}")
    if len(brane.S_rows) % 2:
        raise PreconditionError(
            "S must be even-dimensional; the parity hypothesis fails for "
            f"dim S = {len(brane.S_rows)}"
        )

    S = brane.S_rows
    tau = brane.tau_rows
    nstar = annihilator_rows(S, m)

    v_rows = [[ONE if j == i else ZERO for j in range(2 * m)] for i in range(m)]

    # Fast path: already in block form with the standard tangent space.
    if all(not gc.op[m + i][j] for i in range(m) for j in range(m)):
        I_blk = la.mat_neg(_block(gc.op, 0, 0, m))
        same_tau = la.row_basis([r[:m] + [ZERO] * m for r in S] + nstar) == tau
        form_ok = _block(gc.op, m, m, m) == la.transpose(I_blk)
        if same_tau and form_ok:
            U_S = [list(r[:m]) + [ZERO] * m for r in S]
            U_N = _invariant_complement(gc, v_rows, U_S)
            return LinearSplitting(
                U_rows=v_rows,
                I=I_blk,
                P=real_poisson(gc),
                B=la.zeros(m, m, ONE),
                gauge_op=[list(r) for r in gc.op],
                U_N=U_N,
                U_P=[],
                U_S=U_S,
            )

    gc_nstar = [gc.apply(x) for x in nstar]
    K = la.intersect_rowspaces(nstar, gc_nstar)
    W = la.row_basis(nstar + gc_nstar)

    U_S = _invariant_complement(gc, tau, W)

    # Pair a complement of K inside N*S in scan order and combine.
    comp = la.extend_basis(K, nstar)
    if len(comp) % 2:
        raise AssertionError("complement of the invariant core has odd dimension")
    U_P = []
    for i in range(0, len(comp), 2):
        f, g = comp[i], comp[i + 1]
        U_P.append(la.vec_add(f, gc.apply(g)))
        U_P.append(la.vec_sub(gc.apply(f), g))

    UPS = la.row_basis(U_P + U_S)
    if len(UPS) != len(U_P) + len(U_S):
        raise AssertionError("U_P and U_S overlap")

    # Orthogonal space of U_P + U_S, and an invariant complement D in it.
    G_rows = []
    for u in UPS:
        G_rows.append([HALF * u[m + i] for i in range(m)] + [HALF * u[i] for i in range(m)])
    omega_space = la.kernel_basis(G_rows) if G_rows else [
        [ONE if j == i else ZERO for j in range(2 * m)] for i in range(2 * m)
    ]
    D = _invariant_complement(gc, omega_space, UPS)

    # tau projects into D onto an invariant isotropic T_D; complete it
    # invariantly by C and tilt C onto its pairing-dual to isotropize.
    T_D = la.row_basis(_project_onto(D, UPS, nstar)) if nstar else []
    C = _invariant_complement(gc, D, T_D)

    U_N = []
    if C:
        M = [[pairing(t, cl) for t in T_D] for cl in C]
        for c in C:
            rhs = [-HALF * pairing(c, cl) for cl in C]
            coeffs = la.solve(M, rhs)
            if coeffs is None:
                raise AssertionError("pairing between T_D and C is degenerate")
            corr = list(c)
            for x, t in zip(coeffs, T_D):
                corr = la.vec_add(corr, la.vec_scale(x, t))
            U_N.append(corr)

    U = la.row_basis(U_N + U_P + U_S)
    if len(U) != m:
        raise AssertionError(f"splitting has rank {len(U)}, expected {m}")
    u_span = la.Span(U)
    for u in U:
        for v in U:
            if pairing(u, v):
                raise AssertionError("constructed splitting is not isotropic")
        if not u_span.contains(gc.apply(u)):
            raise AssertionError("constructed splitting is not invariant")

    # U is the graph of an antisymmetric B over V; gauge it flat.
    top = la.transpose([u[:m] for u in U])
    bottom = la.transpose([u[m:] for u in U])
    B = la.mat_mul(bottom, la.inverse(top))
    if not _is_antisymmetric(B):
        raise AssertionError("graph matrix of the splitting is not antisymmetric")
    E = _exp_b_matrix(B)
    Einv = _exp_b_matrix(la.mat_neg(B))
    gauged = la.mat_mul(Einv, la.mat_mul(gc.op, E))
    if any(gauged[m + i][j] for i in range(m) for j in range(m)):
        raise AssertionError("gauged operator kept a lower-left block")
    I_blk = la.mat_neg(_block(gauged, 0, 0, m))
    if _block(gauged, m, m, m) != la.transpose(I_blk):
        raise AssertionError("gauged operator is not in the expected block form")

    return LinearSplitting(
        U_rows=U,
        I=I_blk,
        P=_block(gauged, 0, m, m),
        B=B,
        gauge_op=gauged,
        U_N=la.row_basis(U_N) if U_N else [],
        U_P=la.row_basis(U_P) if U_P else [],
        U_S=la.row_basis(U_S) if U_S else [],
    )


def verify_splitting(gc: LinearGC, brane: LinearBrane, spl: LinearSplitting) -> dict:
    """The three postconditions, checked exactly and independently."""
    m = gc.m
    minus_id = la.mat_scale(Fraction(-1), la.eye(m, ONE))
    block_ok = (
        all(not spl.gauge_op[m + i][j] for i in range(m) for j in range(m))
        and _block(spl.gauge_op, m, m, m) == la.transpose(spl.I)
        and la.mat_mul(spl.I, spl.I) == minus_id
        and _is_antisymmetric(spl.P)
    )
    S = brane.S_rows
    s_span = la.Span(S)
    s_complex_ok = all(s_span.contains(la.mat_vec(spl.I, x[:m])) for x in S)
    # s(S) is the part of U anchoring into S: U n (S + V*).
    s_plus_vstar = [list(x) + [ZERO] * m for x in S] + [
        [ZERO] * m + [ONE if j == i else ZERO for j in range(m)] for i in range(m)
    ]
    sS_basis = la.intersect_rowspaces(spl.U_rows, s_plus_vstar)
    nstar = annihilator_rows(S, m)
    tau_ok = la.row_basis(sS_basis + nstar) == brane.tau_rows and len(
        sS_basis
    ) + len(nstar) == len(brane.tau_rows)
    return {
        "block_form_ok": block_ok,
        "s_complex_ok": s_complex_ok,
        "tau_standard_ok": tau_ok,
        "ok": block_ok and s_complex_ok and tau_ok,
    }


# -- seeded instances -------------------------------------------------------


def _rand_frac(rng, span=2):
    return Fraction(rng.randrange(-span, span + 1), rng.randrange(1, 3))


def _rand_invertible(rng, m):
    while True:
        A = [[_rand_frac(rng) for _ in range(m)] for _ in range(m)]
        if la.rank(A) == m:
            return A


def _rand_antisym(rng, m, tangent_block_only=None):
    B = [[ZERO] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if tangent_block_only is not None and i >= tangent_block_only and j >= tangent_block_only:
                continue
            x = _rand_frac(rng)
            B[i][j] = x
            B[j][i] = -x
    return B


def standard_complex_matrix(m):
    """Pairs (x_0, x_1), (x_2, x_3), ... each rotated a quarter turn."""
    I = [[ZERO] * m for _ in range(m)]
    for i in range(0, m, 2):
        I[i][i + 1] = Fraction(-1)
        I[i + 1][i] = ONE
    return I


def random_split_instance(rng, n_real, s=None):
    """A seeded (gc, brane) pair with a known hidden splitting.

    Starts from the standard complex structure with a compatible random
    Poisson block vanishing on the normal directions, takes the first s
    coordinates as the brane, and hides the block form behind a random
    base change and a random B-gauge.
    """
    m = n_real
    if m % 2 or m < 2:
        raise ValueError("n_real must be even and positive")
    if s is None:
        s = 2 * rng.randrange(1, m // 2 + 1)
    if s % 2 or not (0 < s <= m):
        raise ValueError("brane dimension must be even and positive")
    I0 = standard_complex_matrix(m)
    C = _rand_antisym(rng, m, tangent_block_only=s)
    P0 = la.mat_sub(C, la.mat_mul(I0, la.mat_mul(C, la.transpose(I0))))
    gc0 = make_complex_poisson_gc(I0, P0)

    S0 = [[ONE if j == i else ZERO for j in range(m)] for i in range(s)]
    tau0 = [list(r) + [ZERO] * m for r in S0] + annihilator_rows(S0, m)

    A = _rand_invertible(rng, m)
    A_inv = la.inverse(A)
    Ainv_t = la.transpose(A_inv)
    At = la.transpose(A)
    # conjugate blockwise by diag(A, A^-T): cheaper than a 2m product
    op1 = [[ZERO] * (2 * m) for _ in range(2 * m)]
    tl = la.mat_mul(A, la.mat_mul(la.mat_neg(I0), A_inv))
    tr = la.mat_mul(A, la.mat_mul(P0, At))
    br = la.mat_mul(Ainv_t, la.mat_mul(la.transpose(I0), At))
    for i in range(m):
        for j in range(m):
            op1[i][j] = tl[i][j]
            op1[i][m + j] = tr[i][j]
            op1[m + i][m + j] = br[i][j]
    big = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            big[i][j] = A[i][j]
            big[m + i][m + j] = Ainv_t[i][j]
    S1 = [la.mat_vec(A, r) for r in S0]
    tau1 = [la.mat_vec(big, r) for r in tau0]

    B = _rand_antisym(rng, m)
    gc = b_transform(LinearGC(op1), B)
    E = _exp_b_matrix(B)
    tau2 = [la.mat_vec(E, r) for r in tau1]
    return gc, LinearBrane(S1, tau2)
