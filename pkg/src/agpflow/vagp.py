"""Variational gauge-potential solver: coefficients, directional norms, angles.

The deformation direction in the (h, g) coupling plane is an angle phi, with
dH = cos(phi) Z + sin(phi) X.  The action is quadratic in the ansatz
coefficients, so one pseudo-inverse solve per direction gives the minimizer;
solutions at phi = 0 and phi = pi/2 span every other direction by linearity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .ansatz import AnsatzBasis, ising_system
from .pauli import TransOp, trans_commutator, trans_inner

#: singular values of the gram matrix below this fraction of the largest are
#: treated as null space in the pseudo-inverse
PINV_CUTOFF = 1e-10

#: quadratic form treated as direction-independent below this spread
ISOTROPY_TOL = 1e-12

# above this basis size a Cholesky solve (with residual check) replaces the
# eigen-decomposition pseudo-inverse; the gram matrix is strictly positive
# definite away from the singular couplings, where the fallback still applies
_DENSE_EIG_MAX = 1500


class DegenerateSystemError(RuntimeError):
    """Gram matrix has a null direction that the rhs projects onto.

    This cannot happen for the Ising model with a k-body basis (the rhs is
    always in the row space); raised defensively for malformed systems.
    """


def _pinv_solve(gram: np.ndarray, rhs_cols: np.ndarray) -> np.ndarray:
    """Minimal-norm solution of gram @ c = rhs for one or more rhs columns."""
    rhs_cols = np.atleast_2d(rhs_cols.T).T  # (n, m)
    n = gram.shape[0]
    if n > _DENSE_EIG_MAX:
        try:
            cf = sla.cho_factor(gram, check_finite=False)
            sol = sla.cho_solve(cf, rhs_cols, check_finite=False)
            resid = np.abs(gram @ sol - rhs_cols).max()
            scale = max(np.abs(rhs_cols).max(), 1.0)
            if resid <= 1e-8 * scale:
                return sol
        except sla.LinAlgError:
            pass
        # singular or ill-conditioned: fall through to the eigen path
    w, U = np.linalg.eigh(gram)
    cutoff = PINV_CUTOFF * max(w[-1], 0.0)
    proj = U.T @ rhs_cols
    null = w <= cutoff
    if np.any(null):
        bad = np.abs(proj[null]).max()
        if bad > 1e-8 * max(1.0, np.abs(rhs_cols).max()):
            raise DegenerateSystemError(
                f"rhs projects onto gram null space (|proj| = {bad:.3e})"
            )
        proj[null] = 0.0
    inv_w = np.where(null, 0.0, 1.0 / np.where(null, 1.0, w))
    return U @ (inv_w[:, None] * proj)


@dataclass(frozen=True)
class VagpSolution:
    """Minimizer of the action at one coupling point and direction."""

    basis: AnsatzBasis
    coeffs: np.ndarray
    norm_sq: float
    residual: float
    point: tuple
    direction: float

    def to_transop(self) -> TransOp:
        return self.basis.to_transop(self.coeffs)

    def to_json_dict(self) -> dict:
        h, g = self.point
        return {
            "h": h,
            "g": g,
            "k": self.basis.k,
            "phi": self.direction,
            "coeffs": [
                {"word": w, "value": float(c)}
                for w, c in zip(self.basis.word_strings(), self.coeffs)
            ],
            "norm_sq": self.norm_sq,
            "residual": self.residual,
        }


def solve_directions(point, k: int, parity_filter: bool = True):
    """Coefficient vectors for the two axis directions dH = Z and dH = X.

    Returns (basis, c_h, c_g); both solves share one gram factorization.
    """
    h, g = point
    basis, gram, rhs_z, rhs_x = ising_system(k, float(h), float(g), parity_filter)
    sol = _pinv_solve(gram, np.column_stack([rhs_z, rhs_x]))
    return basis, sol[:, 0], sol[:, 1], (rhs_z, rhs_x)


def _solution_from_coeffs(basis, point, phi, coeffs, rhs) -> VagpSolution:
    coeffs = np.asarray(coeffs, dtype=float)
    # residual of the quadratic form: <dH,dH> - rhs.coeffs, with <dH,dH> = 1
    residual = max(1.0 - float(rhs @ coeffs), 0.0)
    return VagpSolution(
        basis=basis,
        coeffs=coeffs,
        norm_sq=float(coeffs @ coeffs),
        residual=residual,
        point=(float(point[0]), float(point[1])),
        direction=float(phi),
    )


def solve(point, phi: float, k: int, parity_filter: bool = True) -> VagpSolution:
    """Best k-body gauge potential at ``point`` for a deformation along ``phi``."""
    basis, c_h, c_g, (rhs_z, rhs_x) = solve_directions(point, k, parity_filter)
    cp, sp_ = math.cos(phi), math.sin(phi)
    coeffs = cp * c_h + sp_ * c_g
    rhs = cp * rhs_z + sp_ * rhs_x
    return _solution_from_coeffs(basis, point, phi, coeffs, rhs)


def fold_angle(phi: float) -> float:
    """Representative of phi modulo pi inside [-pi/2, pi/2)."""
    phi = math.remainder(phi, math.pi)
    if phi >= math.pi / 2:
        phi -= math.pi
    elif phi < -math.pi / 2:
        phi += math.pi
    return phi


def radial_angle(h: float, g: float) -> float:
    return fold_angle(math.atan2(g, h))


@dataclass(frozen=True)
class OptimalDirection:
    """Extremal deformation directions of the gauge-potential norm."""

    phi_opt: float
    phi_orth: float
    norm_opt: float
    norm_orth: float
    isotropic: bool = False

    @property
    def anisotropy(self) -> float:
        """log10 of orthogonal-to-optimal norm ratio (>= 0 up to tolerance)."""
        if self.norm_opt == 0.0:
            return math.inf
        return math.log10(self.norm_orth / self.norm_opt)


def optimal_angle(point, k: int, parity_filter: bool = True) -> OptimalDirection:
    """Direction minimizing the per-site norm, plus the orthogonal maximum.

    The squared norm at angle phi is a quadratic form in (cos phi, sin phi)
    built from the two axis solutions; its eigenvectors give the extrema.
    """
    _, c_h, c_g, _ = solve_directions(point, k, parity_filter)
    q_hh = float(c_h @ c_h)
    q_gg = float(c_g @ c_g)
    q_hg = float(c_h @ c_g)
    spread = math.hypot(q_hh - q_gg, 2 * q_hg)
    mean = 0.5 * (q_hh + q_gg)
    if spread <= ISOTROPY_TOL * max(1.0, mean):
        n = math.sqrt(max(mean, 0.0))
        return OptimalDirection(0.0, fold_angle(math.pi / 2), n, n, True)
    lo = mean - 0.5 * spread
    hi = mean + 0.5 * spread
    # eigenvector for the smaller eigenvalue of [[q_hh, q_hg], [q_hg, q_gg]]
    if q_hh - lo >= q_gg - lo:
        v = (-q_hg, q_hh - lo)
    else:
        v = (q_gg - lo, -q_hg)
    phi_opt = fold_angle(math.atan2(v[1], v[0]))
    return OptimalDirection(
        phi_opt=phi_opt,
        phi_orth=fold_angle(phi_opt + math.pi / 2),
        norm_opt=math.sqrt(max(lo, 0.0)),
        norm_orth=math.sqrt(max(hi, 0.0)),
    )


@dataclass(frozen=True)
class LifetimeResult:
    """Decay rate of the dressed conjugate operator G = dH + i[A, H]."""

    gamma: float
    dh_conserved: bool = False


def lifetime(point, phi: float, k: int, parity_filter: bool = True) -> LifetimeResult:
    """State-averaged decay rate Gamma of G = dH + i[A, H].

    Gamma^2 = <[H, G], [H, G]> / <G, G>, computed in the exact string algebra.
    A zero denominator means dH is fully generated by the commutator, i.e. G
    vanishes and the conservation is exact.
    """
    from .pauli import build_hamiltonian

    h, g = point
    sol = solve(point, phi, k, parity_filter)
    H = build_hamiltonian(h, g)
    dH = direction_operator(phi)
    A = sol.to_transop()
    G = dH + 1j * trans_commutator(A, H)
    gg = trans_inner(G, G).real
    if gg <= 1e-24:
        return LifetimeResult(gamma=0.0, dh_conserved=True)
    HG = trans_commutator(H, G)
    num = trans_inner(HG, HG).real
    return LifetimeResult(gamma=math.sqrt(max(num, 0.0) / gg))


def direction_operator(phi: float) -> TransOp:
    """Unit deformation dH = cos(phi) Z + sin(phi) X."""
    return TransOp({(3,): math.cos(phi), (1,): math.sin(phi)})
