"""Shift equivalence of square non-negative integer matrices over Z.

A lag-l shift equivalence (R, S) satisfies R A = B R, S B = A S, R S = B^l
and S R = A^l.  The decision procedure is tri-state:

  yes      a witness (R, S, lag) verified by exact multiplication;
  no       a named invariant of the associated gauge modules differs;
  unknown  the bounded search space is exhausted.

The "no" invariants are genuine invariants of the module coker(x*I - A^t):
the characteristic polynomial away from zero, and for each battery
polynomial p the colimit of coker(p(A^t)) along the shift, compared through
its eventual torsion and its eventual rational rank.  Comparing raw
invariant factors of p(A^t) would not be sound for p with non-unit constant
term, so the stabilized form is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import FgAbGroup, GroupMorphism, eventual_image, torsion_subgroup
from .intlinalg import (
    IntMatrix,
    charpoly,
    kernel_basis,
    matrix_rank,
    poly_eval_matrix,
    smith_normal_form,
    solve,
)


@dataclass
class ShiftEqResult:
    verdict: str  # 'yes' | 'no' | 'unknown'
    r: IntMatrix = None
    s: IntMatrix = None
    lag: int = 0
    invariant: str = ""

    def witness_for_swapped(self):
        """yes(R, S, l) for (A, B) certifies (B, A) with the roles swapped."""
        if self.verdict != "yes":
            raise ValueError("no witness to swap")
        return ShiftEqResult("yes", r=self.s, s=self.r, lag=self.lag)


def validate_ck_matrix(a: IntMatrix, name="matrix"):
    n = a.rows
    if a.cols != n:
        raise ValueError(f"{name} must be square")
    for i in range(n):
        for j in range(n):
            if a.data[i][j] < 0:
                raise ValueError(f"{name} has a negative entry at ({i}, {j})")
    for i in range(n):
        if all(e == 0 for e in a.data[i]):
            raise ValueError(f"{name}: row {i} vanishes identically")
    for j in range(n):
        if all(a.data[i][j] == 0 for i in range(n)):
            raise ValueError(f"{name}: column {j} vanishes identically")


def verify_shift_equivalence(a, b, r, s, lag):
    return (
        r @ a == b @ r
        and s @ b == a @ s
        and r @ s == _power(b, lag)
        and s @ r == _power(a, lag)
    )


def _power(m, k):
    out = IntMatrix.identity(m.rows)
    base = m
    while k:
        if k & 1:
            out = out @ base
        base = base @ base
        k >>= 1
    return out


def charpoly_away_from_zero(a: IntMatrix):
    """Coefficients of det(xI - A) with all factors of x divided out."""
    coeffs = charpoly(a)
    first = next((i for i, c in enumerate(coeffs) if c != 0), len(coeffs) - 1)
    return coeffs[first:]


def _eventual_invariant(a: IntMatrix, poly):
    """(eventual torsion invariant factors, eventual rank) of
    colim(coker p(A^t), A^t), an isomorphism invariant of the gauge module."""
    at = a.transpose()
    pa = poly_eval_matrix(poly, at)
    n = a.rows
    c = FgAbGroup(n, pa)
    shift = GroupMorphism(c, c, at)  # A^t commutes with p(A^t)
    tors, embed = torsion_subgroup(c)
    # restrict the shift to the torsion subgroup
    stacked = embed.matrix.hstack(c.relations)
    ssnf = smith_normal_form(stacked)
    cols = []
    for j in range(tors.ngens):
        z = solve(stacked, shift.matrix.apply(embed.matrix.column(j)), snf=ssnf)
        assert z is not None, "shift must preserve torsion"
        cols.append(z[: tors.ngens])
    shift_t = GroupMorphism(tors, tors, IntMatrix.from_columns(cols, rows=tors.ngens))
    ev, _, _ = eventual_image(shift_t)
    # eventual rational rank: rank of shift^dim on C tensor Q
    dim = n - matrix_rank(pa)
    power = _power(at, max(dim, 1))
    rk = matrix_rank(power.hstack(pa)) - matrix_rank(pa)
    return ev.invariant_factors, rk


def battery(a: IntMatrix, b: IntMatrix, kmax=8):
    """Named battery of gauge-module invariants evaluated for both inputs."""
    ks = sorted(range(-kmax, kmax + 1), key=lambda k: (abs(k), k < 0))
    polys = [(f"x - {k}" if k >= 0 else f"x + {-k}", [-k, 1]) for k in ks]
    polys.append(("charpoly(A)", charpoly(a)))
    cb = charpoly(b)
    if cb != charpoly(a):
        polys.append(("charpoly(B)", cb))
    return polys


def distinguishing_invariant(a: IntMatrix, b: IntMatrix, kmax=8):
    """Name of an invariant separating the two gauge modules, or None."""
    ca, cb = charpoly_away_from_zero(a), charpoly_away_from_zero(b)
    if ca != cb:
        return "characteristic polynomial away from zero"
    for name, poly in battery(a, b, kmax):
        if _eventual_invariant(a, poly) != _eventual_invariant(b, poly):
            return f"colimit of coker(p(A^t)) for p = {name}"
    return None


def _intertwiner_basis(a: IntMatrix, b: IntMatrix):
    """Basis of {R : R A = B R} as matrices (B side is m x m, A side n x n)."""
    n, m = a.rows, b.rows
    op = a.transpose().kron(IntMatrix.identity(m)) - IntMatrix.identity(n).kron(b)
    kb = kernel_basis(op)
    return [_unvec(kb.column(j), m, n) for j in range(kb.cols)]


def _unvec(vec, rows, cols):
    return IntMatrix(rows, cols, [[vec[j * rows + i] for j in range(cols)] for i in range(rows)])


def _vec(m):
    out = []
    for j in range(m.cols):
        out.extend(m.column(j))
    return out


def _solve_for_s(a, b, r, lag):
    """Solve the linear system S B = A S, R S = B^lag, S R = A^lag over Z."""
    n, m = a.rows, b.rows
    # unknowns vec(S), S is n x m
    eq1 = b.transpose().kron(IntMatrix.identity(n)) - IntMatrix.identity(m).kron(a)
    eq2 = IntMatrix.identity(m).kron(r)  # vec(R S) = (I kron R) vec(S)
    eq3 = r.transpose().kron(IntMatrix.identity(n))  # vec(S R)
    lhs = eq1.vstack(eq2).vstack(eq3)
    rhs = [0] * (m * n) + _vec(_power(b, lag)) + _vec(_power(a, lag))
    x = solve(lhs, rhs)
    if x is None:
        return None
    return _unvec(x, n, m)


def _l1_sphere(count, weight, cap):
    """Vectors in Z^count of L1 norm `weight` with entries bounded by cap."""

    def rec(i, remaining):
        if i == count - 1:
            if remaining > cap:
                return
            if remaining == 0:
                yield [0]
            else:
                yield [remaining]
                yield [-remaining]
            return
        for take in range(min(remaining, cap) + 1):
            for rest in rec(i + 1, remaining - take):
                if take == 0:
                    yield [0] + rest
                else:
                    yield [take] + rest
                    yield [-take] + rest

    yield from rec(0, weight)


def _coefficient_vectors(count, bound, budget):
    """Nonzero integer coefficient vectors by increasing L1 norm, capped."""
    if count == 0:
        return
    emitted = 0
    for weight in range(1, bound * count + 1):
        for vec in _l1_sphere(count, weight, bound):
            yield vec
            emitted += 1
            if emitted >= budget:
                return


def shift_equivalent(a: IntMatrix, b: IntMatrix, max_lag=6, max_entry=8, budget=2000) -> ShiftEqResult:
    """Bounded shift-equivalence decision, tri-state."""
    validate_ck_matrix(a, "A")
    validate_ck_matrix(b, "B")

    if a == b:
        r = IntMatrix.identity(a.rows)
        res = ShiftEqResult("yes", r=r, s=a.copy(), lag=1)
        assert verify_shift_equivalence(a, b, res.r, res.s, res.lag)
        return res

    inv = distinguishing_invariant(a, b, kmax=max_entry)
    if inv is not None:
        return ShiftEqResult("no", invariant=inv)

    basis = _intertwiner_basis(a, b)
    for coeffs in _coefficient_vectors(len(basis), max_entry, budget):
        r = IntMatrix.zeros(b.rows, a.rows)
        for c, mat in zip(coeffs, basis):
            if c:
                r = r + mat.scaled(c)
        if r.is_zero():
            continue
        for lag in range(1, max_lag + 1):
            s = _solve_for_s(a, b, r, lag)
            if s is not None and verify_shift_equivalence(a, b, r, s, lag):
                return ShiftEqResult("yes", r=r, s=s, lag=lag)
    return ShiftEqResult("unknown")
