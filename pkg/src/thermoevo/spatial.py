"""Staggered one-dimensional discretization of the spatial block operator.

Velocity and temperature unknowns live at the interior grid nodes (their
boundary values are pinned to zero and omitted, realizing the Dirichlet
closures); stress and heat flux live at the cell midpoints.  The two-point
difference matrix and its exact negative transpose make the assembled block
operator antisymmetric to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import svd

from .errors import InputError

__all__ = [
    "Grid1D",
    "DiscreteSpatialOperator",
    "build_operators",
    "verify_skew_adjoint",
    "mode_decomposition",
    "write_operator_coo",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on (0, L) with ``n_cells`` cells."""

    length: float
    n_cells: int

    def __post_init__(self):
        if not (self.length > 0):
            raise InputError("domain length must be positive")
        if self.n_cells < 2:
            raise InputError("need at least 2 cells")

    @property
    def h(self) -> float:
        return self.length / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells - 1

    @property
    def n_faces(self) -> int:
        return self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.n_cells)

    @property
    def faces(self) -> np.ndarray:
        return self.h * (np.arange(self.n_cells) + 0.5)


@dataclass(frozen=True)
class DiscreteSpatialOperator:
    """Assembled antisymmetric block operator and its difference blocks."""

    grid: Grid1D
    d_grad: sp.csr_matrix
    d_div: sp.csr_matrix
    a_h: sp.csr_matrix
    node_to_face: sp.csr_matrix
    block_sizes: tuple = field(init=False)

    def __post_init__(self):
        n_nodes, n_faces = self.grid.n_nodes, self.grid.n_faces
        object.__setattr__(self, "block_sizes", (n_nodes, n_faces, n_nodes, n_faces))

    @property
    def n_dof(self) -> int:
        return sum(self.block_sizes)

    def block_slices(self) -> list:
        offsets = np.concatenate([[0], np.cumsum(self.block_sizes)])
        return [slice(int(offsets[i]), int(offsets[i + 1])) for i in range(4)]


def build_operators(grid: Grid1D) -> DiscreteSpatialOperator:
    """Two-point staggered differences with Dirichlet closures on v and theta.

    The gradient maps interior-node values to cell midpoints using zero
    boundary values; the divergence is its exact negative transpose.  The
    block operator couples (v, sigma) and (theta, q) with the signs of the
    continuous skew-selfadjoint operator.
    """
    n = grid.n_cells
    inv_h = 1.0 / grid.h
    rows, cols, vals = [], [], []
    for f in range(n):
        right = f + 1  # node index of the right end of cell f (1..n-1 interior)
        if right <= n - 1:
            rows.append(f)
            cols.append(right - 1)
            vals.append(inv_h)
        left = f
        if left >= 1:
            rows.append(f)
            cols.append(left - 1)
            vals.append(-inv_h)
    d_grad = sp.csr_matrix((vals, (rows, cols)), shape=(n, n - 1))
    d_div = (-d_grad.T).tocsr()

    avg_rows, avg_cols, avg_vals = [], [], []
    for f in range(n):
        for node in (f, f + 1):
            if 1 <= node <= n - 1:
                avg_rows.append(f)
                avg_cols.append(node - 1)
                avg_vals.append(0.5)
    node_to_face = sp.csr_matrix((avg_vals, (avg_rows, avg_cols)), shape=(n, n - 1))

    grad_t = d_grad.T.tocsr()
    a_h = sp.bmat(
        [
            [None, grad_t, None, None],
            [-d_grad, None, None, None],
            [None, None, None, -grad_t],
            [None, None, d_grad, None],
        ],
        format="csr",
    )
    return DiscreteSpatialOperator(grid, d_grad, d_div, a_h, node_to_face)


def verify_skew_adjoint(a_h, n_pairs: int = 100, seed: int = 0) -> float:
    """Maximum relative pairing residual |<A u, w> + <u, A w>| over random pairs."""
    a_h = sp.csr_matrix(a_h)
    n = a_h.shape[0]
    scale = sp.linalg.norm(a_h, 1)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        u = rng.standard_normal(n)
        w = rng.standard_normal(n)
        residual = abs(float((a_h @ u) @ w + u @ (a_h @ w)))
        worst = max(worst, residual / (np.linalg.norm(u) * np.linalg.norm(w) * scale))
    return worst


def mode_decomposition(op: DiscreteSpatialOperator) -> tuple:
    """Singular triplets of the difference matrix, ascending in wavenumber.

    Returns ``(s, node_vecs, face_vecs, face_null)`` with ``d_grad @
    node_vecs[:, k] == s[k] * face_vecs[:, k]`` exactly by construction and
    ``face_null`` spanning the complement of the gradient's range (the
    discrete constant-flux direction).
    """
    dense = op.d_grad.toarray()
    w_mat, s_desc, vt = svd(dense, full_matrices=True)
    order = np.argsort(s_desc)
    s = s_desc[order]
    node_vecs = vt[order].T
    face_vecs = (dense @ node_vecs) / s[None, :]
    face_null = w_mat[:, op.grid.n_nodes:]
    return s, node_vecs, face_vecs, face_null


def write_operator_coo(matrix, path_or_buffer) -> None:
    """Plain-text sparse export: one ``row col value`` line per entry."""
    coo = sp.coo_matrix(matrix)
    def _write(fh):
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {format(v, '.17g')}\n")
    if hasattr(path_or_buffer, "write"):
        _write(path_or_buffer)
    else:
        with open(path_or_buffer, "w", encoding="utf-8") as fh:
            _write(fh)
