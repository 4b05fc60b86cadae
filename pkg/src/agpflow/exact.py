"""Dense finite-chain backend: materialization, spectra, exact gauge potential.

Periodic chains up to L = 14 sites (a 16384^2 dense matrix) are supported;
everything is plain dense linear algebra, chosen for determinism over speed.
Used to validate the symbolic string algebra and as the reference gauge
potential on small systems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .ansatz import build_basis
from .pauli import TransOp

L_MAX = 14


def _string_coo(letters, pos: int, L: int):
    """Column/row/amplitude arrays of one Pauli string placed at ``pos``.

    Basis states are integers where bit j = 1 means spin down at site j.
    """
    dim = 1 << L
    src = np.arange(dim, dtype=np.int64)
    dst = src.copy()
    amp = np.ones(dim, dtype=complex)
    for i, a in enumerate(letters):
        if a == 0:
            continue
        j = (pos + i) % L
        bit = (src >> j) & 1
        if a == 1:  # X: flip
            dst ^= 1 << j
        elif a == 2:  # Y: flip with phase +i on up, -i on down
            dst ^= 1 << j
            amp = amp * np.where(bit == 0, 1j, -1j)
        else:  # Z
            amp = amp * (1.0 - 2.0 * bit)
    return dst, src, amp


def zero_momentum_csr(letters, L: int) -> sp.csr_matrix:
    """Sparse matrix of the zero-momentum sum of one anchored word."""
    letters = tuple(letters)
    if len(letters) > L:
        raise ValueError(f"word support {len(letters)} exceeds L={L}")
    dim = 1 << L
    rows, cols, vals = [], [], []
    for p in range(L):
        r, c, a = _string_coo(letters, p, L)
        rows.append(r)
        cols.append(c)
        vals.append(a)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    return mat.tocsr()


def materialize_sparse(op: TransOp, L: int) -> sp.csr_matrix:
    if L > L_MAX:
        raise ValueError(f"L={L} exceeds the dense-backend cap {L_MAX}")
    if op.support > L:
        raise ValueError(f"operator support {op.support} exceeds L={L}")
    dim = 1 << L
    acc = sp.csr_matrix((dim, dim), dtype=complex)
    for w, c in op.terms.items():
        acc = acc + c * zero_momentum_csr(w, L)
    return acc


@dataclass(frozen=True)
class DenseOperator:
    """A 2^L x 2^L matrix realization of an operator on the periodic chain."""

    L: int
    matrix: np.ndarray


def materialize(op: TransOp, L: int) -> DenseOperator:
    """Sum of the L cyclic translations of each word, scaled by coefficients."""
    return DenseOperator(L=L, matrix=materialize_sparse(op, L).toarray())


@dataclass(frozen=True)
class SpectrumData:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns


def spectrum(op: DenseOperator) -> SpectrumData:
    """Full Hermitian eigendecomposition with a deterministic phase convention.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive (ties broken by lowest index).
    """
    w, v = np.linalg.eigh(op.matrix)
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    phase = lead / np.abs(lead)
    v = v / phase[None, :]
    if not np.iscomplexobj(op.matrix):
        v = v.real
    return SpectrumData(eigenvalues=w, eigenvectors=v)


def exact_agp(
    H: DenseOperator, dH: DenseOperator, degeneracy_tol: float | None = None
) -> DenseOperator:
    """Exact gauge potential from the eigenbasis of H.

    A = i sum_{m != n} |m> <m|dH|n> <n| / (e_n - e_m), with matrix elements
    inside degenerate blocks (gap below ``degeneracy_tol``) set to zero - the
    minimal-norm gauge choice.  Default tolerance: 1e-10 * max|e|.
    """
    spec = spectrum(H)
    e, v = spec.eigenvalues, spec.eigenvectors
    if degeneracy_tol is None:
        degeneracy_tol = 1e-10 * max(np.abs(e).max(), 1.0)
    dh_eig = v.conj().T @ dH.matrix @ v
    gaps = e[None, :] - e[:, None]  # gaps[m, n] = e_n - e_m
    keep = np.abs(gaps) > degeneracy_tol
    a_eig = np.zeros_like(dh_eig)
    a_eig[keep] = 1j * dh_eig[keep] / gaps[keep]
    mat = v @ a_eig @ v.conj().T
    return DenseOperator(L=H.L, matrix=mat)


def energy_variance(state: np.ndarray, H) -> float:
    """<H^2> - <H>^2 for a normalized state; H dense or sparse."""
    mat = H.matrix if isinstance(H, DenseOperator) else H
    hs = mat @ state
    mean = np.vdot(state, hs).real
    return float(np.vdot(hs, hs).real - mean * mean)


def mid_spectrum_state(spec: SpectrumData):
    """Eigenpair whose energy is closest to the mean eigenvalue.

    Ties break toward the lowest index, making the choice reproducible.
    """
    target = spec.eigenvalues.mean()
    idx = int(np.argmin(np.abs(spec.eigenvalues - target)))
    return idx, spec.eigenvectors[:, idx]


def dense_vagp(point, phi: float, L: int, k: int, parity_filter: bool = True):
    """Finite-L variational gauge potential assembled with dense traces.

    Unlike the symbolic path this handles word wrap-around on the ring, so it
    stays valid all the way to the complete zero-momentum basis k = L (where
    anchored words become an overcomplete spanning set and the pseudo-inverse
    picks the minimal-norm coefficients).

    Returns (A: DenseOperator, coeffs, residual).
    """
    import math

    from .pauli import build_hamiltonian
    from .vagp import _pinv_solve, direction_operator

    h, g = point
    basis = build_basis(k, parity_filter)
    H = materialize_sparse(build_hamiltonian(h, g), L)
    dH = materialize_sparse(direction_operator(phi), L)
    dim = 1 << L
    norm = L * dim
    k_rows = np.empty((len(basis), dim * dim), dtype=complex)
    for n, w in enumerate(basis.words):
        O = zero_momentum_csr(w, L)
        k_rows[n] = (O @ H - H @ O).toarray().ravel()
    gram = (k_rows @ k_rows.conj().T).real / norm
    gram = 0.5 * (gram + gram.T)
    dh_flat = dH.toarray().ravel()
    rhs = (1j * (k_rows.conj() @ dh_flat)).real / norm
    coeffs = _pinv_solve(gram, rhs).ravel()
    a_mat = np.zeros((dim, dim), dtype=complex)
    for c, w in zip(coeffs, basis.words):
        if c != 0.0:
            a_mat += c * zero_momentum_csr(w, L).toarray()
    dh_norm = float((np.abs(dh_flat) ** 2).sum()) / norm
    residual = max(dh_norm - float(rhs @ coeffs), 0.0)
    return DenseOperator(L=L, matrix=a_mat), coeffs, residual
