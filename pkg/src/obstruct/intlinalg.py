"""Exact integer linear algebra.

Arbitrary-precision matrices over Z, Smith normal form with recorded
unimodular transforms, integer kernels, exact linear solves and column
lattice arithmetic.  Everything runs on plain Python ints, so no overflow
can occur at any intermediate step.

Conventions:
  * matrices act on column vectors; the column span of a matrix is called
    its (column) lattice;
  * vectors are plain lists/tuples of ints.
"""

from __future__ import annotations


class IntMatrix:
    """Dense integer matrix, row-major.

    Treated as immutable after construction; all operations return fresh
    matrices.  Zero-row and zero-column shapes are legal everywhere.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data):
        if len(data) != rows:
            raise ValueError(f"expected {rows} rows, got {len(data)}")
        for r in data:
            if len(r) != cols:
                raise ValueError(f"expected {cols} cols, got {len(r)}")
        self.rows = rows
        self.cols = cols
        self.data = [list(map(int, r)) for r in data]

    @classmethod
    def from_rows(cls, data):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries, rows=None, cols=None):
        n = len(entries)
        rows = n if rows is None else rows
        cols = n if cols is None else cols
        m = cls.zeros(rows, cols)
        for i, d in enumerate(entries):
            m.data[i][i] = int(d)
        return m

    @classmethod
    def from_columns(cls, columns, rows=None):
        if not columns:
            if rows is None:
                raise ValueError("rows required for empty column list")
            return cls.zeros(rows, 0)
        rows = len(columns[0])
        return cls(rows, len(columns), [[c[i] for c in columns] for i in range(rows)])

    def copy(self):
        return IntMatrix(self.rows, self.cols, self.data)

    def __eq__(self, other):
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {self.data})"

    def is_zero(self):
        return all(all(e == 0 for e in r) for r in self.data)

    def is_identity(self):
        return self.rows == self.cols and self == IntMatrix.identity(self.rows)

    def column(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def transpose(self):
        return IntMatrix(
            self.cols, self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def __add__(self, other):
        self._shape_check(other)
        return IntMatrix(
            self.rows, self.cols,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
        )

    def __sub__(self, other):
        self._shape_check(other)
        return IntMatrix(
            self.rows, self.cols,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
        )

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, [[-a for a in r] for r in self.data])

    def scaled(self, c):
        return IntMatrix(self.rows, self.cols, [[c * a for a in r] for r in self.data])

    def _shape_check(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        bt = other.transpose().data
        out = [
            [sum(a * b for a, b in zip(row, col)) for col in bt]
            for row in self.data
        ]
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec):
        """Matrix times column vector."""
        if len(vec) != self.cols:
            raise ValueError(f"vector length {len(vec)} != cols {self.cols}")
        return [sum(a * b for a, b in zip(row, vec)) for row in self.data]

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return IntMatrix(
            self.rows, self.cols + other.cols,
            [ra + rb for ra, rb in zip(self.data, other.data)],
        )

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def kron(self, other):
        """Kronecker product, blocks self[i][j] * other."""
        rows = self.rows * other.rows
        cols = self.cols * other.cols
        out = [[0] * cols for _ in range(rows)]
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i][j]
                if a == 0:
                    continue
                for k in range(other.rows):
                    orow = other.data[k]
                    trow = out[i * other.rows + k]
                    base = j * other.cols
                    for l in range(other.cols):
                        if orow[l]:
                            trow[base + l] += a * orow[l]
        return IntMatrix(rows, cols, out)

    @staticmethod
    def block_diag(blocks, rows=0, cols=0):
        total_r = sum(b.rows for b in blocks) or rows
        total_c = sum(b.cols for b in blocks) or cols
        out = [[0] * total_c for _ in range(total_r)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                out[r0 + i][c0:c0 + b.cols] = list(b.data[i])
            r0 += b.rows
            c0 += b.cols
        return IntMatrix(total_r, total_c, out)

    def submatrix(self, row_idx, col_idx):
        return IntMatrix(
            len(row_idx), len(col_idx),
            [[self.data[i][j] for j in col_idx] for i in row_idx],
        )

    def max_abs(self):
        return max((abs(e) for r in self.data for e in r), default=0)

    def to_text(self):
        """Shared matrix text format: `rows cols` then the entry rows."""
        lines = [f"{self.rows} {self.cols}"]
        for r in self.data:
            lines.append(" ".join(str(e) for e in r))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.strip().splitlines()]
        if not lines:
            raise ValueError("empty matrix text")
        head = lines[0].split()
        if len(head) != 2:
            raise ValueError(f"bad matrix header {lines[0]!r}")
        rows, cols = int(head[0]), int(head[1])
        if len(lines) != rows + 1:
            raise ValueError(f"expected {rows} entry rows, got {len(lines) - 1}")
        data = []
        for ln in lines[1:]:
            entries = [int(tok) for tok in ln.split()]
            if len(entries) != cols:
                raise ValueError(f"expected {cols} entries in row {ln!r}")
            data.append(entries)
        return cls(rows, cols, data)


class SmithDecomposition:
    """U @ A @ V == D with U, V unimodular, D diagonal with d_i | d_{i+1} >= 0.

    Also carries the inverses of U and V, so both changes of coordinates
    are available without further solving.
    """

    __slots__ = ("matrix", "U", "D", "V", "Uinv", "Vinv", "diag", "rank")

    def __init__(self, matrix, U, D, V, Uinv, Vinv):
        self.matrix = matrix
        self.U = U
        self.D = D
        self.V = V
        self.Uinv = Uinv
        self.Vinv = Vinv
        k = min(D.rows, D.cols)
        self.diag = [D.data[i][i] for i in range(k)]
        self.rank = sum(1 for d in self.diag if d != 0)

    def diagonal_padded(self, n):
        """First n diagonal entries, padding with zeros past min(rows, cols)."""
        return [self.diag[i] if i < len(self.diag) else 0 for i in range(n)]


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form with minimal-absolute-value pivoting.

    Pivot choice: smallest |entry| among the remaining block, ties broken by
    lowest row then lowest column.  This keeps intermediate entries small and
    makes the output deterministic for a fixed input.
    """
    m, n = a.rows, a.cols
    D = [row[:] for row in a.data]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Uinv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Vinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_sub(r, s, q):
        # row_r -= q * row_s on D and U; inverse column op on Uinv
        Dr, Ds = D[r], D[s]
        for j in range(n):
            Dr[j] -= q * Ds[j]
        Ur, Us = U[r], U[s]
        for j in range(m):
            Ur[j] -= q * Us[j]
        for i in range(m):
            Uinv[i][s] += q * Uinv[i][r]

    def col_sub(c, d, q):
        # col_c -= q * col_d on D and V; inverse row op on Vinv
        for i in range(m):
            D[i][c] -= q * D[i][d]
        for i in range(n):
            V[i][c] -= q * V[i][d]
        Vd, Vc = Vinv[d], Vinv[c]
        for j in range(n):
            Vd[j] += q * Vc[j]

    def row_swap(r, s):
        D[r], D[s] = D[s], D[r]
        U[r], U[s] = U[s], U[r]
        for i in range(m):
            Uinv[i][r], Uinv[i][s] = Uinv[i][s], Uinv[i][r]

    def col_swap(c, d):
        for i in range(m):
            D[i][c], D[i][d] = D[i][d], D[i][c]
        for i in range(n):
            V[i][c], V[i][d] = V[i][d], V[i][c]
        Vinv[c], Vinv[d] = Vinv[d], Vinv[c]

    def row_negate(r):
        D[r] = [-x for x in D[r]]
        U[r] = [-x for x in U[r]]
        for i in range(m):
            Uinv[i][r] = -Uinv[i][r]

    def find_pivot(t):
        best = None
        for i in range(t, m):
            Di = D[i]
            for j in range(t, n):
                e = Di[j]
                if e != 0:
                    v = abs(e)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 1:
                            return best
        return best

    t = 0
    limit = min(m, n)
    while t < limit:
        piv = find_pivot(t)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        if D[t][t] < 0:
            row_negate(t)
        while True:
            # clear column t then row t; remainders may create smaller pivots
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    q = D[i][t] // p
                    row_sub(i, t, q)
                    if D[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    q = D[t][j] // p
                    col_sub(j, t, q)
                    if D[t][j] != 0:
                        dirty = True
            if dirty:
                piv = find_pivot(t)
                _, pi, pj = piv
                if pi != t or pj != t:
                    if pi != t:
                        row_swap(t, pi)
                    if pj != t:
                        col_swap(t, pj)
                if D[t][t] < 0:
                    row_negate(t)
                continue
            # column and row are clean; enforce divisibility of the block

            p = D[t][t]
            offender = None
            for i in range(t + 1, m):
                Di = D[i]
                for j in range(t + 1, n):
                    if Di[j] % p != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_sub(t, offender, -1)  # row_t += row_offender
        t += 1

    um = IntMatrix(m, m, U)
    vm = IntMatrix(n, n, V)
    dm = IntMatrix(m, n, D)
    return SmithDecomposition(a, um, dm, vm, IntMatrix(m, m, Uinv), IntMatrix(n, n, Vinv))


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel {x : a @ x = 0}, as matrix columns.

    The returned lattice is saturated (the kernel of an integer matrix
    always is).
    """
    s = smith_normal_form(a)
    cols = [s.V.column(j) for j in range(s.rank, a.cols)]
    return IntMatrix.from_columns(cols, rows=a.cols)


def solve(a: IntMatrix, b, snf=None):
    """One integer solution x of a @ x = b, or None if none exists."""
    s = snf if snf is not None else smith_normal_form(a)
    y = s.U.apply(b)
    xprime = [0] * a.cols
    for i in range(a.rows):
        d = s.diag[i] if i < len(s.diag) else 0
        if d == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % d != 0:
                return None
            if i < a.cols:
                xprime[i] = y[i] // d
    return s.V.apply(xprime)


class ColumnLattice:
    """Column span of an integer matrix with membership and exact solves."""

    __slots__ = ("gens", "snf")

    def __init__(self, gens: IntMatrix):
        self.gens = gens
        self.snf = smith_normal_form(gens)

    @property
    def ambient_dim(self):
        return self.gens.rows

    def contains(self, v) -> bool:
        y = self.snf.U.apply(v)
        for i in range(self.gens.rows):
            d = self.snf.diag[i] if i < len(self.snf.diag) else 0
            if d == 0:
                if y[i] != 0:
                    return False
            elif y[i] % d != 0:
                return False
        return True

    def solve(self, v):
        return solve(self.gens, v, snf=self.snf)

    def basis(self) -> IntMatrix:
        """A lattice basis: d_i * (Uinv column i) over the nonzero diagonal."""
        s = self.snf
        cols = []
        for i, d in enumerate(s.diag):
            if d != 0:
                col = s.Uinv.column(i)
                cols.append([d * e for e in col])
        return IntMatrix.from_columns(cols, rows=self.gens.rows)

    def saturation_basis(self) -> IntMatrix:
        """Basis of {v : k*v in lattice for some k != 0}."""
        s = self.snf
        cols = [s.Uinv.column(i) for i in range(s.rank)]
        return IntMatrix.from_columns(cols, rows=self.gens.rows)


def lattice_basis(gens: IntMatrix) -> IntMatrix:
    return ColumnLattice(gens).basis()


def lattices_equal(a: IntMatrix, b: IntMatrix) -> bool:
    """Do two generating matrices span the same column lattice?"""
    if a.rows != b.rows:
        raise ValueError("ambient dimension mismatch")
    la, lb = ColumnLattice(a), ColumnLattice(b)
    return all(lb.contains(a.column(j)) for j in range(a.cols)) and all(
        la.contains(b.column(j)) for j in range(b.cols)
    )


def matrix_rank(a: IntMatrix) -> int:
    return smith_normal_form(a).rank


def is_unimodular(a: IntMatrix) -> bool:
    if a.rows != a.cols:
        return False
    s = smith_normal_form(a)
    return all(d == 1 for d in s.diag) and len(s.diag) == a.rows


def charpoly(a: IntMatrix):
    """Coefficients [c_0, ..., c_n] of det(x*I - A) = sum c_k x^k, c_n = 1.

    Faddeev-LeVerrier; every division is exact over Z (asserted).
    """
    n = a.rows
    if a.cols != n:
        raise ValueError("characteristic polynomial needs a square matrix")
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    M = IntMatrix.identity(n)
    for k in range(1, n + 1):
        AM = a @ M
        tr = sum(AM.data[i][i] for i in range(n))
        assert tr % k == 0, "Faddeev-LeVerrier division must be exact"
        c = -(tr // k)
        coeffs[n - k] = c
        M = AM + IntMatrix.identity(n).scaled(c)
    return coeffs


def poly_eval_matrix(coeffs, a: IntMatrix) -> IntMatrix:
    """Evaluate sum c_k x^k at a square matrix (Horner)."""
    n = a.rows
    out = IntMatrix.zeros(n, n)
    for c in reversed(coeffs):
        out = out @ a + IntMatrix.identity(n).scaled(c)
    return out
