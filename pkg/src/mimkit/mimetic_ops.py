"""Order-k mimetic divergence/gradient operators on a staggered 1D grid.

Builds, for order k in {2, 4} on a grid with N cells and spacing h:

* ``D``  (N x (N+1)):   node field -> cell-center derivative values,
* ``G``  ((N+1) x (N+2)): extended-center field -> node derivative values,
* ``D_hat`` ((N+2) x (N+1)): ``D`` with zero first/last rows appended,
* ``Q``  ((N+2) diagonal), ``P`` ((N+1) diagonal): strictly positive
  quadrature weights defining the discrete inner products,
* ``B_hat = Q*D_hat + G^T*P`` ((N+2) x (N+1)): the boundary operator,
* ``L = D_hat*G`` ((N+2) x (N+2)): the Laplacian,
* ``I_D`` ((N+2) x (N+1)), ``I_G`` ((N+1) x (N+2)): interpolants.

Interior rows of G and D are the standard centered staggered stencils of
order k; boundary rows are one-sided width-(k+1) stencils whose coefficients
solve the Vandermonde exactness system on monomials x^0..x^k.  Quadrature
weights are forced by the discrete conservation law ``1^T Q D_hat v =
v_N - v_0`` (interior weights equal h); node weights minimize the column-wise
duality defect of ``B_hat`` with the corner weight pinned so that
``B_hat[0,0] = -1`` exactly.

Everything is constructed in exact rational arithmetic per (k, N) and scaled
by h on conversion to sparse float matrices; construction results are cached.

Structure of ``B_hat``: the first/last rows are exactly ``-/+1`` at the
corner entry and zero elsewhere; every row beyond a fixed-depth boundary
closure zone (independent of N) is exactly zero.  Rows inside the closure
zone carry the duality defect, which cannot be removed: no operator family
with degree-k exact boundary rows, strictly positive weights and an exact
conservation law can make all interior rows of ``B_hat`` vanish.  For k=4
the conservation solve has a geometric tail decaying ~26x per cell; weights
are truncated to h beyond ``_Q_ZONE`` cells (conservation residual ~1e-14)
with a full exact solve for small N.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import ConstructionError
from .grid_fields import (
    CenterField,
    ExtendedField,
    NodeField,
    StaggeredGrid1D,
)

__all__ = [
    "SUPPORTED_ORDERS",
    "MimeticOperatorSet",
    "build_gradient",
    "build_divergence",
    "extend_divergence",
    "build_quadratures",
    "boundary_operator",
    "laplacian",
    "build_interpolants",
    "build_operator_set",
    "mimetic_identity_residual",
    "dump_operator",
]

SUPPORTED_ORDERS = (2, 4)

_F0 = Fraction(0)
_F1 = Fraction(1)
_HALF = Fraction(1, 2)

# Cells per side over which k=4 quadrature weights may deviate from h.  The
# conservation recursion has a geometric mode decaying ~26x per cell, so
# truncating at this depth leaves a residual ~1e-14 (machine-level) while
# keeping the deviation zone, and hence the B_hat closure zone, N-independent.
_Q_ZONE = 12
# Nodes per side over which node weights may deviate from h (must cover the
# quadrature deviation zone plus the stencil width).
_P_ZONE = 16

# Standard interior stencils (unit spacing): row i of G touches extended
# column i+off; row r of D (centered at x = r + 1/2) touches node r+off.
_STD_G = {
    2: {0: Fraction(-1), 1: Fraction(1)},
    4: {-1: Fraction(1, 24), 0: Fraction(-27, 24), 1: Fraction(27, 24), 2: Fraction(-1, 24)},
}
_STD_D = _STD_G


# ---------------------------------------------------------------------------
# exact rational construction (unit spacing)
# ---------------------------------------------------------------------------

def _solve_exact(A, b):
    """Gauss-Jordan elimination over Fractions; raises on singular systems."""
    n, m = len(A), len(A[0])
    M = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    row = 0
    pivots = []
    for col in range(m):
        piv = next((r for r in range(row, n) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        pv = M[row][col]
        M[row] = [x / pv for x in M[row]]
        for r in range(n):
            if r != row and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    for r in range(row, n):
        if all(x == 0 for x in M[r][:m]) and M[r][m] != 0:
            raise ConstructionError("inconsistent stencil/weight system")
    if len(pivots) < m:
        raise ConstructionError("underdetermined stencil/weight system")
    x = [_F0] * m
    for i, col in enumerate(pivots):
        x[col] = M[i][m]
    return x


def _derivative_row(points, x0, k):
    """Stencil coefficients c with sum_i c_i*t_i^s = s*x0^(s-1) for s = 0..k."""
    A = [[t**s for t in points] for s in range(k + 1)]
    b = [_F0 if s == 0 else s * x0 ** (s - 1) for s in range(k + 1)]
    return _solve_exact(A, b)


def _interp_row(points, x0):
    """Interpolation coefficients c with sum_i c_i*t_i^s = x0^s for all s."""
    deg = len(points) - 1
    A = [[t**s for t in points] for s in range(deg + 1)]
    b = [x0**s for s in range(deg + 1)]
    return _solve_exact(A, b)


def _ext_coords(N):
    return [_F0] + [Fraction(2 * j - 1, 2) for j in range(1, N + 1)] + [Fraction(N)]


def _node_coords(N):
    return [Fraction(i) for i in range(N + 1)]


def _build_g_rows(k, N):
    """Gradient rows (unit spacing) as a list of {column: coefficient} dicts."""
    xs = _ext_coords(N)
    rows = [dict() for _ in range(N + 1)]
    nb = 1 if k == 2 else 2  # one-sided rows per side
    for i in range(N + 1):
        if i < nb or i > N - nb:
            im = min(i, N - i)
            if k == 2:
                pts_idx = [0, 1, 2]
            else:
                # Both one-sided rows use the window anchored at the boundary
                # point.  Shifting row 1 one slot inward (dropping xi_0) makes
                # the composed Laplacian non-normal enough to grow complex
                # eigenvalue pairs with Re(lambda) ~ 1/h, i.e. an exponential
                # instability of the semi-discrete wave system; anchoring both
                # rows at xi_0 keeps the spectrum real and non-positive.
                pts_idx = [0, 1, 2, 3, 4]
            coeffs = _derivative_row([xs[j] for j in pts_idx], Fraction(im), k)
            for j, c in zip(pts_idx, coeffs):
                if i < nb:
                    rows[i][j] = c
                else:
                    rows[i][N + 1 - j] = -c
        else:
            for off, c in _STD_G[k].items():
                rows[i][i + off] = c
    return rows


def _build_d_rows(k, N):
    """Divergence rows (unit spacing); row r is centered at x = r + 1/2."""
    nds = _node_coords(N)
    rows = [dict() for _ in range(N)]
    nb = 0 if k == 2 else 1
    for r in range(N):
        if r < nb or r > N - 1 - nb:
            rm = min(r, N - 1 - r)
            pts_idx = [0, 1, 2, 3, 4]
            coeffs = _derivative_row([nds[j] for j in pts_idx], Fraction(2 * rm + 1, 2), k)
            for j, c in zip(pts_idx, coeffs):
                if r < nb:
                    rows[r][j] = c
                else:
                    rows[r][N - j] = -c
        else:
            for off, c in _STD_D[k].items():
                rows[r][r + off] = c
    return rows


def _build_q(k, N, d_rows):
    """Interior center weights q_0..q_{N-1} forced by the conservation law
    sum_r q_r*D[r,i] = -delta_{i,0} + delta_{i,N}."""
    if k == 2:
        # the two-point stencil telescopes; q = 1 satisfies every column
        return [_F1] * N
    m = _Q_ZONE
    if N >= 2 * m + 4:
        # solve the boundary zone exactly with the tail pinned to 1
        A, b = [], []
        for i in range(m):
            A.append([d_rows[r].get(i, _F0) for r in range(m)])
            tail = sum(d_rows[r].get(i, _F0) for r in range(m, min(N, i + 3)))
            b.append((Fraction(-1) if i == 0 else _F0) - tail)
        zone = _solve_exact(A, b)
        q = zone + [_F1] * (N - 2 * m) + list(reversed(zone))
    else:
        A = [[d_rows[r].get(i, _F0) for r in range(N)] for i in range(N + 1)]
        b = [_F0] * (N + 1)
        b[0], b[N] = Fraction(-1), _F1
        q = _solve_exact(A[:N], b[:N])
        residual = sum(qr * ar for qr, ar in zip(q, A[N])) - b[N]
        if residual != 0:
            raise ConstructionError("conservation system inconsistent", k, N)
    return q


def _build_p(k, N, g_rows, d_ext_rows, q_hat):
    """Node weights: corner pinned so B_hat[0,0] = -1 exactly; every other
    boundary-zone weight is the exact least-squares minimizer of its B_hat
    column's defect; interior weights are exactly 1 (i.e. h)."""
    p = [_F1] * (N + 1)
    p[0] = p[N] = -1 / g_rows[0][0]
    M = min(_P_ZONE, (N - 1) // 2)
    for i in range(1, M + 1):
        num = _F0
        den = _F0
        for j, g in g_rows[i].items():
            num += q_hat[j] * d_ext_rows[j].get(i, _F0) * g
            den += g * g
        p[i] = -num / den if den != 0 else _F1
        p[N - i] = p[i]
    return p


def _build_interp_rows(k, N):
    """Interpolant rows: I_D node->extended, I_G extended->node.  Local
    polynomial interpolation of degree k-1 (exact on monomials <= k-1);
    boundary rows are exact at the boundary point itself."""
    xs = _ext_coords(N)
    nds = _node_coords(N)
    # one interior template per operator (centered k-point interpolation)
    if k == 2:
        id_tpl = {-1: _HALF, 0: _HALF}       # center j-1/2 from nodes j-1, j
        ig_tpl = {0: _HALF, 1: _HALF}        # node i from centers i-1/2, i+1/2
    else:
        mid = _interp_row([Fraction(s) for s in (-2, -1, 0, 1)], Fraction(-1, 2))
        id_tpl = {off: c for off, c in zip((-2, -1, 0, 1), mid)}
        ig_tpl = {off: c for off, c in zip((-1, 0, 1, 2), mid)}

    id_rows = [dict() for _ in range(N + 2)]
    id_rows[0][0] = _F1
    id_rows[N + 1][N] = _F1
    for j in range(1, N + 1):
        lo = 1 if k == 2 else 2
        if lo <= j <= N + 1 - lo:
            id_rows[j] = {j + off: c for off, c in id_tpl.items()}
        else:
            jm = min(j, N + 1 - j)
            pts_idx = list(range(4))
            coeffs = _interp_row([nds[t] for t in pts_idx], xs[jm])
            for t, c in zip(pts_idx, coeffs):
                id_rows[j][t if j == jm else N - t] = c

    ig_rows = [dict() for _ in range(N + 1)]
    ig_rows[0][0] = _F1
    ig_rows[N][N + 1] = _F1
    for i in range(1, N):
        lo = 1 if k == 2 else 2
        if lo <= i <= N - lo:
            ig_rows[i] = {i + off: c for off, c in ig_tpl.items()}
        else:
            im = min(i, N - i)
            pts_idx = list(range(4))  # nearest four extended centers
            coeffs = _interp_row([xs[t] for t in pts_idx], nds[im])
            for t, c in zip(pts_idx, coeffs):
                ig_rows[i][t if i == im else N + 1 - t] = c
    return id_rows, ig_rows


def _validate_order_cells(k, N):
    if k not in SUPPORTED_ORDERS:
        raise ValueError(f"order k must be one of {SUPPORTED_ORDERS}, got {k}")
    if N < 2 * k:
        raise ValueError(f"operator construction requires n_cells >= 2k = {2 * k}, got {N}")


@lru_cache(maxsize=64)
def _rational_construction(k: int, N: int):
    """All operator blocks for (k, N) in exact rational, unit-spacing form."""
    _validate_order_cells(k, N)
    g_rows = _build_g_rows(k, N)
    d_rows = _build_d_rows(k, N)
    q = _build_q(k, N, d_rows)
    q_hat = [_HALF] + q + [_HALF]
    d_ext_rows = [dict()] + d_rows + [dict()]
    p = _build_p(k, N, g_rows, d_ext_rows, q_hat)
    if min(q_hat) <= 0 or min(p) <= 0:
        raise ConstructionError("non-positive quadrature weight", k, N)

    # B_hat = Q*D_hat + G^T*P assembled exactly; spacing cancels, so the
    # unit-spacing sum is the physical matrix, with exact zeros off the zone.
    b_rows = [dict() for _ in range(N + 2)]
    for j in range(1, N + 1):
        for i, c in d_rows[j - 1].items():
            b_rows[j][i] = b_rows[j].get(i, _F0) + q_hat[j] * c
    for i in range(N + 1):
        for j, g in g_rows[i].items():
            b_rows[j][i] = b_rows[j].get(i, _F0) + g * p[i]
    for row in b_rows:
        for i in [i for i, v in row.items() if v == 0]:
            del row[i]

    # unit-spacing Laplacian D_hat * G (physical scaling: 1/h^2)
    l_rows = [dict() for _ in range(N + 2)]
    for j in range(1, N + 1):
        for c, dv in d_rows[j - 1].items():
            for m_col, gv in g_rows[c].items():
                l_rows[j][m_col] = l_rows[j].get(m_col, _F0) + dv * gv
    for row in l_rows:
        for i in [i for i, v in row.items() if v == 0]:
            del row[i]

    id_rows, ig_rows = _build_interp_rows(k, N)
    return {
        "g_rows": g_rows,
        "d_rows": d_rows,
        "q_hat": q_hat,
        "p": p,
        "b_rows": b_rows,
        "l_rows": l_rows,
        "id_rows": id_rows,
        "ig_rows": ig_rows,
    }


# ---------------------------------------------------------------------------
# float sparse assembly
# ---------------------------------------------------------------------------

def _rows_to_csr(rows, n_cols, scale=1.0) -> sp.csr_matrix:
    data, indices, indptr = [], [], [0]
    for row in rows:
        for col in sorted(row):
            indices.append(col)
            data.append(float(row[col]) * scale)
        indptr.append(len(indices))
    mat = sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
        shape=(len(rows), n_cols),
    )
    return mat


def build_gradient(k: int, grid: StaggeredGrid1D) -> sp.csr_matrix:
    """(N+1) x (N+2) gradient: extended-center samples -> node derivatives."""
    cons = _rational_construction(k, grid.n_cells)
    return _rows_to_csr(cons["g_rows"], grid.n_cells + 2, 1.0 / grid.h)


def build_divergence(k: int, grid: StaggeredGrid1D) -> sp.csr_matrix:
    """N x (N+1) divergence: node samples -> cell-center derivatives."""
    cons = _rational_construction(k, grid.n_cells)
    return _rows_to_csr(cons["d_rows"], grid.n_cells + 1, 1.0 / grid.h)


def extend_divergence(D) -> sp.csr_matrix:
    """Pad D with a zero first and last row: (N+2) x (N+1)."""
    D = sp.csr_matrix(D)
    zero = sp.csr_matrix((1, D.shape[1]))
    return sp.vstack([zero, D, zero], format="csr")


def build_quadratures(k: int, grid: StaggeredGrid1D, D=None, G=None):
    """Diagonal quadrature matrices (Q, P), strictly positive, interior
    weights equal to h.  Boundary weights solve the small linear system that
    enforces the discrete conservation law and minimize the duality defect of
    Q*D_hat + G^T*P (deviation-from-h minimizing solution).

    D and G, when given, are shape-checked against the grid (the weights are
    derived from the cached exact construction for the same (k, N)).
    """
    N = grid.n_cells
    for mat, shape, name in ((D, (N, N + 1), "D"), (G, (N + 1, N + 2), "G")):
        if mat is not None and tuple(mat.shape) != shape:
            raise ValueError(f"{name} has shape {tuple(mat.shape)}, expected {shape} for this grid")
    cons = _rational_construction(k, N)
    q_diag = np.array([float(w) for w in cons["q_hat"]]) * grid.h
    p_diag = np.array([float(w) for w in cons["p"]]) * grid.h
    return sp.diags(q_diag, format="csr"), sp.diags(p_diag, format="csr")


def boundary_operator(Q, D_hat, G, P) -> sp.csr_matrix:
    """B_hat = Q*D_hat + G^T*P ((N+2) x (N+1)) from the given matrices."""
    n_ext, n_node = D_hat.shape
    if Q.shape != (n_ext, n_ext) or G.shape != (n_node, n_ext) or P.shape != (n_node, n_node):
        raise ValueError(
            "inconsistent operator shapes: "
            f"Q{tuple(Q.shape)}, D_hat{tuple(D_hat.shape)}, G{tuple(G.shape)}, P{tuple(P.shape)}"
        )
    return (Q @ D_hat + G.T @ P).tocsr()


def laplacian(D_hat, G) -> sp.csr_matrix:
    """L = D_hat * G ((N+2) x (N+2)); first/last rows zero."""
    if D_hat.shape[1] != G.shape[0]:
        raise ValueError(f"shape mismatch: D_hat{tuple(D_hat.shape)} @ G{tuple(G.shape)}")
    return (D_hat @ G).tocsr()


def build_interpolants(k: int, grid: StaggeredGrid1D):
    """(I_D, I_G): node->extended and extended->node interpolation matrices."""
    cons = _rational_construction(k, grid.n_cells)
    N = grid.n_cells
    return (_rows_to_csr(cons["id_rows"], N + 1), _rows_to_csr(cons["ig_rows"], N + 2))


@dataclass(frozen=True, eq=False)
class MimeticOperatorSet:
    """All order-k operators for one grid, plus the weighted inner products."""

    order: int
    grid: StaggeredGrid1D
    D: sp.csr_matrix
    G: sp.csr_matrix
    D_hat: sp.csr_matrix
    Q: sp.csr_matrix
    P: sp.csr_matrix
    B_hat: sp.csr_matrix
    I_D: sp.csr_matrix
    I_G: sp.csr_matrix
    L: sp.csr_matrix
    q_diag: np.ndarray
    p_diag: np.ndarray

    def _check(self, x, length: int, kind, what: str) -> np.ndarray:
        if isinstance(x, (NodeField, CenterField, ExtendedField)):
            if not isinstance(x, kind):
                raise ValueError(f"{what} expects a {kind.__name__}, got {type(x).__name__}")
            x = x.values
        arr = np.asarray(x, dtype=float)
        if arr.shape != (length,):
            raise ValueError(f"{what} expects length {length}, got shape {arr.shape}")
        return arr

    def inner_q(self, f, g) -> float:
        """<f, g>_Q over extended-center fields."""
        n = self.grid.n_cells + 2
        f = self._check(f, n, ExtendedField, "inner_q")
        g = self._check(g, n, ExtendedField, "inner_q")
        return float(np.dot(f * self.q_diag, g))

    def inner_p(self, u, v) -> float:
        """<u, v>_P over node fields."""
        n = self.grid.n_cells + 1
        u = self._check(u, n, NodeField, "inner_p")
        v = self._check(v, n, NodeField, "inner_p")
        return float(np.dot(u * self.p_diag, v))


@lru_cache(maxsize=64)
def build_operator_set(k: int, grid: StaggeredGrid1D) -> MimeticOperatorSet:
    """Build (or fetch from cache) the full operator set for (k, grid).

    B_hat and L are assembled in exact rational arithmetic (the identity
    B_hat = Q*D_hat + G^T*P is exact by construction and h-independent), so
    rows outside the boundary closure zone are exactly zero.
    """
    N = grid.n_cells
    cons = _rational_construction(k, N)
    D = _rows_to_csr(cons["d_rows"], N + 1, 1.0 / grid.h)
    G = _rows_to_csr(cons["g_rows"], N + 2, 1.0 / grid.h)
    D_hat = extend_divergence(D)
    q_diag = np.array([float(w) for w in cons["q_hat"]]) * grid.h
    p_diag = np.array([float(w) for w in cons["p"]]) * grid.h
    Q = sp.diags(q_diag, format="csr")
    P = sp.diags(p_diag, format="csr")
    B_hat = _rows_to_csr(cons["b_rows"], N + 1)
    L = _rows_to_csr(cons["l_rows"], N + 2, 1.0 / grid.h**2)
    I_D = _rows_to_csr(cons["id_rows"], N + 1)
    I_G = _rows_to_csr(cons["ig_rows"], N + 2)
    return MimeticOperatorSet(
        order=k, grid=grid, D=D, G=G, D_hat=D_hat, Q=Q, P=P, B_hat=B_hat,
        I_D=I_D, I_G=I_G, L=L, q_diag=q_diag, p_diag=p_diag,
    )


def mimetic_identity_residual(ops: MimeticOperatorSet, v, f_hat) -> float:
    """|<D_hat v, f>_Q + <v, G f>_P - (v_N f_N - v_0 f_0)|.

    The discrete Gauss identity; O(h) for smooth fields with nonzero
    boundary values, machine-zero when the boundary terms are inert.
    """
    N = ops.grid.n_cells
    v = ops._check(v, N + 1, NodeField, "mimetic_identity_residual v")
    f_hat = ops._check(f_hat, N + 2, ExtendedField, "mimetic_identity_residual f_hat")
    lhs = ops.inner_q(ops.D_hat @ v, f_hat) + ops.inner_p(v, ops.G @ f_hat)
    boundary = v[-1] * f_hat[-1] - v[0] * f_hat[0]
    return abs(lhs - boundary)


def dump_operator(matrix, file=None) -> str:
    """Serialize a sparse operator as matrix-market-style triples.

    One line per stored entry: ``row col value`` with 17 significant digits,
    sorted row-major.  Returns the text; also writes to ``file`` if given.
    """
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    buf = io.StringIO()
    for idx in order:
        buf.write(f"{coo.row[idx]} {coo.col[idx]} {coo.data[idx]:.17g}\n")
    text = buf.getvalue()
    if file is not None:
        file.write(text)
    return text
