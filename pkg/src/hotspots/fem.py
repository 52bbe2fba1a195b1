"""P1 finite-element assembly and generalized eigensolves.

Stiffness uses the exact edge-vector (cotangent) formula, mass the exact
consistent element matrix (A/12)[[2,1,1],[1,2,1],[1,1,2]]; both are assembled
with a deterministic COO->CSR reduction.  Eigenpairs come from shift-invert
Lanczos (ARPACK) on the sigma-shifted operator K + sigma*M with a fixed,
seeded starting vector, so repeated runs are bit-identical; small problems
fall back to a dense solve.  The contract is the residual bound checked at
the end, not the iteration internals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh

from .errors import ConvergenceFailure, NoInteriorVertices, ZeroVector
from .meshing import TriMesh

SIGMA_SHIFT_REL = 1e-3
DENSE_CUTOFF = 400
DEGENERACY_REL_GAP = 1e-6  # eigenspace-sampling trigger
DEGENERACY_FLAG_REL_GAP = 1e-2  # looser report-level "nearly degenerate" flag
EIGENSPACE_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with M-orthonormal vertex-valued eigenvectors."""

    eigenvalues: np.ndarray   # (k,)
    eigenvectors: np.ndarray  # (n, k)
    residuals: np.ndarray     # (k,) ||K v - mu M v|| / ((1+mu) ||M v||)
    boundary_condition: str   # 'neumann' | 'dirichlet'


def _element_geometry(mesh: TriMesh):
    t = mesh.triangles
    p = mesh.vertices
    # e[i] is the edge opposite local vertex i
    e0 = p[t[:, 2]] - p[t[:, 1]]
    e1 = p[t[:, 0]] - p[t[:, 2]]
    e2 = p[t[:, 1]] - p[t[:, 0]]
    area = 0.5 * (e2[:, 0] * (-e1[:, 1]) - e2[:, 1] * (-e1[:, 0]))
    return t, (e0, e1, e2), area


def assemble_stiffness(mesh: TriMesh) -> sp.csr_matrix:
    """K_ij = sum_elements integral grad(phi_i).grad(phi_j); exact for P1."""
    t, e, area = _element_geometry(mesh)
    rows, cols, vals = [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(t[:, i])
            cols.append(t[:, j])
            vals.append(np.einsum("kd,kd->k", e[i], e[j]) / (4.0 * area))
    n = mesh.vertex_count
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return mat.tocsr()


def assemble_mass(mesh: TriMesh, lumped: bool = False) -> sp.csr_matrix:
    t, _, area = _element_geometry(mesh)
    n = mesh.vertex_count
    if lumped:
        diag = np.zeros(n)
        for i in range(3):
            np.add.at(diag, t[:, i], area / 3.0)
        return sp.diags(diag).tocsr()
    rows, cols, vals = [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(t[:, i])
            cols.append(t[:, j])
            vals.append(area * ((2.0 if i == j else 1.0) / 12.0))
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return mat.tocsr()


def rayleigh(k_mat, m_mat, v: np.ndarray) -> float:
    """v'Kv / v'Mv."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ZeroVector("Rayleigh quotient of the zero vector")
    return float(v @ (k_mat @ v)) / float(v @ (m_mat @ v))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0.0:
            out[:, j] = -out[:, j]
    return out


def _m_orthonormalize(vecs: np.ndarray, m_mat) -> np.ndarray:
    out = vecs.copy()
    for j in range(out.shape[1]):
        for i in range(j):
            out[:, j] -= (out[:, i] @ (m_mat @ out[:, j])) * out[:, i]
        out[:, j] /= np.sqrt(out[:, j] @ (m_mat @ out[:, j]))
    return out


def _residuals(k_mat, m_mat, vals, vecs) -> np.ndarray:
    res = np.empty(len(vals))
    for i, mu in enumerate(vals):
        v = vecs[:, i]
        mv = m_mat @ v
        res[i] = np.linalg.norm(k_mat @ v - mu * mv) / ((1.0 + mu) * np.linalg.norm(mv))
    return res


def _smallest_pairs(k_mat, m_mat, k: int, sigma: float, seed: int):
    n = k_mat.shape[0]
    if n <= DENSE_CUTOFF or k >= n - 1:
        vals, vecs = eigh(k_mat.toarray(), m_mat.toarray())
        return vals[:k], vecs[:, :k]
    shifted = (k_mat + sigma * m_mat).tocsc()
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = spla.eigsh(
            shifted, k=k, M=m_mat.tocsc(), sigma=0.0, which="LM", v0=v0, maxiter=500
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(
            f"ARPACK: {len(exc.eigenvalues)} of {k} pairs converged in 500 iterations"
        ) from exc
    order = np.argsort(vals)
    return vals[order] - sigma, vecs[:, order]


def solve_neumann(k_mat, m_mat, k: int, tol: float = 1e-8, seed: int = 0) -> Spectrum:
    """Smallest k Neumann pairs of K v = mu M v.

    mu_1 = 0 is reported exactly, with the M-normalized constant vector; the
    remaining vectors are M-orthonormalized against it.
    """
    if k < 2:
        raise ValueError("need k >= 2 for the Neumann problem")
    n = k_mat.shape[0]
    sigma = SIGMA_SHIFT_REL * (k_mat.diagonal().sum() / n)
    vals, vecs = _smallest_pairs(k_mat, m_mat, k, sigma, seed)

    const = np.ones(n)
    const /= np.sqrt(const @ (m_mat @ const))
    vecs = np.column_stack([const, vecs[:, 1:]])
    vals = np.concatenate([[0.0], vals[1:]])
    vecs = _fix_signs(_m_orthonormalize(vecs, m_mat))

    res = _residuals(k_mat, m_mat, vals, vecs)
    if np.any(res > tol):
        raise ConvergenceFailure(f"residuals {res} exceed tol {tol}")
    return Spectrum(vals, vecs, res, "neumann")


def solve_dirichlet(mesh: TriMesh, k: int, tol: float = 1e-8, seed: int = 0,
                    k_mat=None, m_mat=None) -> Spectrum:
    """Smallest k Dirichlet pairs; boundary rows/columns eliminated, vectors
    reported with zeros on boundary vertices."""
    interior = mesh.interior_mask
    if not np.any(interior):
        raise NoInteriorVertices("Dirichlet problem needs interior vertices")
    if k_mat is None:
        k_mat = assemble_stiffness(mesh)
    if m_mat is None:
        m_mat = assemble_mass(mesh)
    idx = np.nonzero(interior)[0]
    k_red = k_mat[np.ix_(idx, idx)].tocsr()
    m_red = m_mat[np.ix_(idx, idx)].tocsr()
    k_eff = min(k, len(idx))
    vals, vecs_red = _smallest_pairs(k_red, m_red, k_eff, 0.0, seed)
    vecs_red = _fix_signs(_m_orthonormalize(vecs_red, m_red))
    res = _residuals(k_red, m_red, vals, vecs_red)
    if np.any(res > tol):
        raise ConvergenceFailure(f"residuals {res} exceed tol {tol}")
    vecs = np.zeros((mesh.vertex_count, k_eff))
    vecs[idx] = vecs_red
    return Spectrum(vals, vecs, res, "dirichlet")


def mu2_eigenspace(spectrum: Spectrum, seed: int = 0) -> list[np.ndarray]:
    """Eigenvectors to analyze for the second Neumann eigenvalue.

    When the mu_2/mu_3 relative gap is below DEGENERACY_REL_GAP the full
    2-dimensional basis is returned plus EIGENSPACE_SAMPLES seeded random
    unit combinations, exercising "any second eigenfunction".
    """
    vals = spectrum.eigenvalues
    vecs = spectrum.eigenvectors
    out = [vecs[:, 1]]
    if len(vals) >= 3 and (vals[2] - vals[1]) / vals[1] < DEGENERACY_REL_GAP:
        out.append(vecs[:, 2])
        rng = np.random.default_rng(seed)
        for _ in range(EIGENSPACE_SAMPLES):
            alpha = rng.standard_normal(2)
            alpha /= np.linalg.norm(alpha)
            out.append(alpha[0] * vecs[:, 1] + alpha[1] * vecs[:, 2])
    return out


def nearly_degenerate_pair(spectrum: Spectrum) -> bool:
    vals = spectrum.eigenvalues
    return len(vals) >= 3 and (vals[2] - vals[1]) / vals[1] <= DEGENERACY_FLAG_REL_GAP
