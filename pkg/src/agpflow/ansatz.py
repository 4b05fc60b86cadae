"""Variational operator basis and assembly of the quadratic minimization system.

The k-body basis collects every anchored Pauli word of support <= k, ordered
by support and then lexicographically, so coefficient vectors are comparable
across runs.  With the default parity filter only words with an odd number of
Y letters are kept: the gauge potential of a real Hamiltonian is purely
imaginary in the computational basis, hence spanned by odd-Y words.

Minimizing the action over an ansatz A = sum_n c_n O_n is a linear problem;
``assemble`` builds its normal equations

    gram[n, m] = <[O_n, H], [O_m, H]>        rhs[n] = i <[O_n, H], dH>

exactly, via the symbolic commutator algebra.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import product

import numpy as np
import scipy.sparse as sp

from .pauli import TransOp, trans_commutator, word_str


@dataclass(frozen=True)
class AnsatzBasis:
    """Ordered canonical word basis with support up to ``k``."""

    k: int
    words: tuple
    parity_filter: bool

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {w: n for n, w in enumerate(self.words)}
        )

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def index(self, word) -> int:
        return self._index[tuple(word)]

    def to_transop(self, coeffs) -> TransOp:
        return TransOp._make(
            {w: complex(c) for w, c in zip(self.words, coeffs)}
        )

    def word_strings(self) -> list:
        return [word_str(w) for w in self.words]


def build_basis(k: int, parity_filter: bool = True) -> AnsatzBasis:
    """All anchored words of support <= k, odd-Y filtered by default."""
    if k < 1:
        raise ValueError(f"ansatz size must be >= 1, got k={k}")
    words = []
    for ell in range(1, k + 1):
        if ell == 1:
            candidates = [(a,) for a in (1, 2, 3)]
        else:
            candidates = [
                (a, *mid, b)
                for a in (1, 2, 3)
                for mid in product((0, 1, 2, 3), repeat=ell - 2)
                for b in (1, 2, 3)
            ]
        for w in candidates:
            if parity_filter and sum(1 for l in w if l == 2) % 2 == 0:
                continue
            words.append(w)
    words.sort(key=lambda w: (len(w), w))
    return AnsatzBasis(k=k, words=tuple(words), parity_filter=parity_filter)


@dataclass(frozen=True)
class AdjointSystem:
    """Normal equations of the action minimization for one (H, dH) pair."""

    basis: AnsatzBasis
    gram: np.ndarray
    rhs: np.ndarray


def commutator_rows(basis: AnsatzBasis, H: TransOp):
    """Sparse matrix R with row n = Im coefficients of [O_n, H].

    For Hermitian H the commutator [O_n, H] has purely imaginary coefficients,
    so R is real and K_n = i * R[n].  Returns (R, vocab) where vocab maps each
    canonical word appearing in any commutator to its column.
    """
    vocab: dict = {}
    rows, cols, vals = [], [], []
    for n, w in enumerate(basis.words):
        comm = trans_commutator(TransOp._make({w: 1.0 + 0j}), H)
        for cw, cc in comm.terms.items():
            if abs(cc.real) > 1e-12:
                raise ValueError("commutator rows require a Hermitian H")
            col = vocab.setdefault(cw, len(vocab))
            rows.append(n)
            cols.append(col)
            vals.append(cc.imag)
    R = sp.csr_matrix(
        (vals, (rows, cols)), shape=(len(basis), max(len(vocab), 1))
    )
    return R, vocab


def assemble(basis: AnsatzBasis, H: TransOp, dH: TransOp) -> AdjointSystem:
    """Gram matrix and right-hand side for minimizing ||dH + i[A, H]||^2."""
    if not H.is_hermitian() or not dH.is_hermitian():
        raise ValueError("H and dH must be Hermitian (real coefficients)")
    R, vocab = commutator_rows(basis, H)
    gram = np.asarray((R @ R.T).todense(), dtype=float)
    gram = 0.5 * (gram + gram.T)
    d = np.zeros(R.shape[1])
    for w, c in dH.terms.items():
        col = vocab.get(w)
        if col is not None:
            d[col] = c.real
    rhs = R @ d
    return AdjointSystem(basis=basis, gram=gram, rhs=np.asarray(rhs))


# -- Ising fast path ---------------------------------------------------------
#
# For H = ZZ + h Z + g X the commutator rows are linear in (1, h, g):
# R(h, g) = R_zz + h R_z + g R_x.  The gram matrix is then a fixed quadratic
# combination of six precomputed sparse blocks, and the rhs for dH in the
# (Z, X) plane comes from two fixed columns of R.  Everything h/g-independent
# is cached per (k, parity_filter).


@dataclass(frozen=True)
class IsingStructure:
    basis: AnsatzBasis
    blocks: dict          # (a, b) -> sparse R_a R_b^T for a <= b in (zz, z, x)
    rhs_cols: dict        # (a, target) -> dense column R_a[:, word(target)]

    def gram(self, h: float, g: float) -> np.ndarray:
        b = self.blocks
        acc = (
            b[("zz", "zz")]
            + h * h * b[("z", "z")]
            + g * g * b[("x", "x")]
            + h * _sym(b[("zz", "z")])
            + g * _sym(b[("zz", "x")])
            + h * g * _sym(b[("z", "x")])
        )
        gram = np.asarray(acc.todense(), dtype=float)
        return 0.5 * (gram + gram.T)

    def rhs(self, h: float, g: float, dh_z: float, dh_x: float) -> np.ndarray:
        c = self.rhs_cols
        out = dh_z * (c[("zz", "z")] + h * c[("z", "z")] + g * c[("x", "z")])
        out += dh_x * (c[("zz", "x")] + h * c[("z", "x")] + g * c[("x", "x")])
        return out


def _sym(m):
    return m + m.T


@functools.lru_cache(maxsize=8)
def ising_structure(k: int, parity_filter: bool = True) -> IsingStructure:
    basis = build_basis(k, parity_filter)
    parts = {"zz": TransOp({(3, 3): 1.0}), "z": TransOp({(3,): 1.0}),
             "x": TransOp({(1,): 1.0})}
    vocab: dict = {}
    mats = {}
    for name, op in parts.items():
        rows, cols, vals = [], [], []
        for n, w in enumerate(basis.words):
            comm = trans_commutator(TransOp._make({w: 1.0 + 0j}), op)
            for cw, cc in comm.terms.items():
                col = vocab.setdefault(cw, len(vocab))
                rows.append(n)
                cols.append(col)
                vals.append(cc.imag)
        mats[name] = (rows, cols, vals)
    ncols = max(len(vocab), 1)
    R = {
        name: sp.csr_matrix((vals, (rows, cols)), shape=(len(basis), ncols))
        for name, (rows, cols, vals) in mats.items()
    }
    order = ("zz", "z", "x")
    blocks = {}
    for i, a in enumerate(order):
        for b in order[i:]:
            blocks[(a, b)] = (R[a] @ R[b].T).tocsr()
    rhs_cols = {}
    for a in order:
        for target, letters in (("z", (3,)), ("x", (1,))):
            col = vocab.get(letters)
            if col is None:
                rhs_cols[(a, target)] = np.zeros(len(basis))
            else:
                rhs_cols[(a, target)] = np.asarray(
                    R[a][:, col].todense()
                ).ravel()
    return IsingStructure(basis=basis, blocks=blocks, rhs_cols=rhs_cols)


def ising_system(k: int, h: float, g: float, parity_filter: bool = True):
    """Gram matrix plus rhs vectors for dH = Z and dH = X at one (h, g).

    Returns (basis, gram, rhs_z, rhs_x); any direction follows by linearity.
    """
    struct = ising_structure(k, parity_filter)
    gram = struct.gram(h, g)
    rhs_z = struct.rhs(h, g, 1.0, 0.0)
    rhs_x = struct.rhs(h, g, 0.0, 1.0)
    return struct.basis, gram, rhs_z, rhs_x
