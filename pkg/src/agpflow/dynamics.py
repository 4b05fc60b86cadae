"""Schrodinger evolution along coupling-space paths, with optional local
counterdiabatic driving, plus the product-state library for the protected
("dark") preparation scenarios.

A protocol interpolates (h, g) from a start to an end point through a ramp
lambda(t); the drive Hamiltonian is H(lambda(t)) + lambda_dot(t) * A(lambda(t))
where A is the k-body variational gauge potential conjugate to the path
direction, precomputed on a lambda grid and linearly interpolated.  States are
propagated with a fixed-step classical 4th-order integrator and renormalized
every step; a drifting norm aborts the run rather than silently degrading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .ansatz import ising_structure
from .exact import energy_variance, materialize, mid_spectrum_state, spectrum, zero_momentum_csr
from .pauli import TransOp, build_hamiltonian
from .vagp import _pinv_solve

#: any single integration step changing the norm by more than this aborts
NORM_DRIFT_ABORT = 1e-8


class NormDriftError(RuntimeError):
    pass


@dataclass(frozen=True)
class RampProtocol:
    """Ramp lambda: [0, T] -> [0, 1] and the straight coupling path it drives."""

    kind: str  # 'sin_square' or 'linear'
    T: float
    start: tuple
    end: tuple

    def __post_init__(self):
        if self.kind not in ("sin_square", "linear"):
            raise ValueError(f"unknown ramp kind {self.kind!r}")
        if self.T < 0:
            raise ValueError("protocol duration must be >= 0")

    def lam(self, t: float) -> float:
        if self.kind == "linear":
            return t / self.T
        s = math.sin(math.pi * t / (2 * self.T))
        return math.sin(0.5 * math.pi * s * s) ** 2

    def lam_dot(self, t: float) -> float:
        if self.kind == "linear":
            return 1.0 / self.T
        a = math.pi * t / (2 * self.T)
        s2 = math.sin(a) ** 2
        return (
            math.sin(math.pi * s2)
            * (math.pi / 2)
            * math.sin(2 * a)
            * (math.pi / (2 * self.T))
        )

    def point(self, lam: float) -> tuple:
        h0, g0 = self.start
        h1, g1 = self.end
        return (h0 + lam * (h1 - h0), g0 + lam * (g1 - g0))

    @property
    def direction(self) -> tuple:
        """Path tangent d(h, g)/d(lambda)."""
        return (self.end[0] - self.start[0], self.end[1] - self.start[1])


@dataclass(frozen=True)
class CdConfig:
    """Counterdiabatic assistance: k = 0 evolves the bare Hamiltonian."""

    k: int = 0
    grid_points: int = 101
    interpolation: str = "linear"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("ansatz size k must be >= 0")
        if self.interpolation != "linear":
            raise ValueError("only linear coefficient interpolation is supported")
        if self.grid_points < 2:
            raise ValueError("need at least 2 grid points along the path")


@dataclass
class EvolutionResult:
    times: np.ndarray
    lams: np.ndarray
    hs: np.ndarray
    gs: np.ndarray
    energies: np.ndarray
    variances: np.ndarray
    final_state: np.ndarray
    max_norm_drift: float

    @property
    def final_variance(self) -> float:
        return float(self.variances[-1])


def path_coefficients(protocol: RampProtocol, cd: CdConfig):
    """Gauge-potential coefficients on a uniform lambda grid along the path.

    The deformation is the unnormalized path tangent, so that lambda_dot * A
    is the counterdiabatic term for the lambda parametrization.  Singular grid
    points (degenerate gram) fall back to the pseudo-inverse automatically.
    """
    struct = ising_structure(cd.k, True)
    dh, dg = protocol.direction
    lams = np.linspace(0.0, 1.0, cd.grid_points)
    coeffs = np.empty((cd.grid_points, len(struct.basis)))
    for i, lam in enumerate(lams):
        h, g = protocol.point(lam)
        gram = struct.gram(h, g)
        rhs = struct.rhs(h, g, dh, dg)
        coeffs[i] = _pinv_solve(gram, rhs).ravel()
    return struct.basis, lams, coeffs


class _PathDrive:
    """Callable producing -i H_CD(t) psi with precomputed sparse pieces."""

    def __init__(self, protocol, cd, L):
        self.protocol = protocol
        self.cd = cd
        dim = 1 << L
        self.diag_zz = zero_momentum_csr((3, 3), L).diagonal().real
        self.diag_z = zero_momentum_csr((3,), L).diagonal().real
        self.mat_x = zero_momentum_csr((1,), L).real.tocsr()
        if cd.k > 0:
            basis, lams, coeffs = path_coefficients(protocol, cd)
            self.lams = lams
            self.coeffs = coeffs
            # stacked word matrices: one matvec yields all word actions
            self.stacked = sp.vstack(
                [zero_momentum_csr(w, L) for w in basis.words]
            ).tocsr()
            self.n_words = len(basis)
            self.dim = dim
        else:
            self.stacked = None

    def coeff_at(self, lam: float) -> np.ndarray:
        x = np.clip(lam, 0.0, 1.0) * (len(self.lams) - 1)
        i = min(int(x), len(self.lams) - 2)
        s = x - i
        return (1.0 - s) * self.coeffs[i] + s * self.coeffs[i + 1]

    def bare_apply(self, h, g, psi):
        return (
            self.diag_zz * psi
            + h * (self.diag_z * psi)
            + g * (self.mat_x @ psi)
        )

    def rhs(self, t, psi):
        lam = self.protocol.lam(t)
        h, g = self.protocol.point(lam)
        out = self.bare_apply(h, g, psi)
        if self.stacked is not None:
            ldot = self.protocol.lam_dot(t)
            if ldot != 0.0:
                c = self.coeff_at(lam)
                blocks = (self.stacked @ psi).reshape(self.n_words, self.dim)
                out = out + ldot * (c @ blocks)
        return -1j * out


def _rk4_run(rhs, psi, t0, n_steps, dt, observer=None):
    """Fixed-step RK4 with per-step renormalization and drift monitoring."""
    max_drift = 0.0
    t = t0
    for step in range(n_steps):
        k1 = rhs(t, psi)
        k2 = rhs(t + 0.5 * dt, psi + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, psi + (0.5 * dt) * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        nrm = float(np.linalg.norm(psi))
        drift = abs(nrm - 1.0)
        if drift > NORM_DRIFT_ABORT:
            raise NormDriftError(
                f"norm drift {drift:.3e} at step {step + 1} exceeds "
                f"{NORM_DRIFT_ABORT:.0e}; reduce dt (currently {dt:.3e})"
            )
        max_drift = max(max_drift, drift)
        psi = psi / nrm
        t = t0 + (step + 1) * dt
        if observer is not None:
            observer(step + 1, t, psi)
    return psi, max_drift


def evolve(
    initial: np.ndarray,
    protocol: RampProtocol,
    cd: CdConfig,
    L: int,
    dt: float | None = None,
    record_every: int | None = None,
) -> EvolutionResult:
    """Integrate the driven Schrodinger equation along the protocol.

    Records the energy and energy variance against the instantaneous bare
    Hamiltonian H(lambda(t)) at sampled steps.  ``dt`` defaults to 1e-3 * T.
    """
    psi = np.asarray(initial, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    if dt is None:
        dt = 1e-3 * protocol.T
    n_steps = max(int(round(protocol.T / dt)), 1)
    dt = protocol.T / n_steps
    if record_every is None:
        record_every = max(n_steps // 500, 1)
    drive = _PathDrive(protocol, cd, L)

    rows = []

    def measure(step, t, state):
        if step % record_every and step != n_steps:
            return
        lam = drive.protocol.lam(t)
        h, g = drive.protocol.point(lam)
        hpsi = drive.bare_apply(h, g, state)
        e = float(np.vdot(state, hpsi).real)
        var = float(np.vdot(hpsi, hpsi).real - e * e)
        rows.append((t, lam, h, g, e, var))

    measure(0, 0.0, psi)
    final, max_drift = _rk4_run(drive.rhs, psi, 0.0, n_steps, dt, measure)
    arr = np.array(rows)
    return EvolutionResult(
        times=arr[:, 0],
        lams=arr[:, 1],
        hs=arr[:, 2],
        gs=arr[:, 3],
        energies=arr[:, 4],
        variances=arr[:, 5],
        final_state=final,
        max_norm_drift=max_drift,
    )


def dress(
    initial: np.ndarray,
    start: tuple,
    end: tuple,
    L: int,
    *,
    k: int | None = None,
    exact: bool = False,
    steps: int = 1000,
    grid_points: int = 101,
) -> np.ndarray:
    """Infinitely fast protocol: integrate i dpsi/dlambda = A(lambda) psi.

    With ``exact=True`` the dense exact gauge potential (for the path
    direction) is evaluated on the fly; otherwise the k-body variational one
    is used from the precomputed grid.
    """
    if exact == (k is not None):
        raise ValueError("choose exactly one of k=<ansatz size> or exact=True")
    proto = RampProtocol("linear", 1.0, tuple(start), tuple(end))
    dh, dg = proto.direction
    psi = np.asarray(initial, dtype=complex)

    if exact:
        from .exact import exact_agp

        dH = TransOp({(3,): dh, (1,): dg})

        def a_apply(lam, state):
            H = materialize(build_hamiltonian(*proto.point(lam)), L)
            A = exact_agp(H, materialize(dH, L))
            return A.matrix @ state

    else:
        cd = CdConfig(k=k, grid_points=grid_points)
        drive = _PathDrive(proto, cd, L)

        def a_apply(lam, state):
            c = drive.coeff_at(lam)
            blocks = (drive.stacked @ state).reshape(drive.n_words, drive.dim)
            return c @ blocks

    def rhs(lam, state):
        return -1j * a_apply(lam, state)

    dl = 1.0 / steps
    final, _ = _rk4_run(rhs, psi, 0.0, steps, dl)
    return final


@dataclass(frozen=True)
class SweepEntry:
    start: tuple
    end: tuple
    rate: float
    variance: float


def _stable_dt(protocol: RampProtocol, L: int) -> float:
    # crude spectral-radius bound keeps the per-step drift ~(rho dt)^6 small
    hmax = max(abs(protocol.start[0]), abs(protocol.end[0]))
    gmax = max(abs(protocol.start[1]), abs(protocol.end[1]))
    rho = L * (1.0 + hmax + gmax)
    return 0.05 / rho


def sweep_rate(
    paths,
    rates,
    L: int,
    k: int = 0,
    kind: str = "linear",
    dt: float | None = None,
) -> list:
    """Final energy variance per (path, ramp rate), mid-spectrum initial state.

    ``paths`` is a list of (start, end) coupling pairs; ``rates`` are values
    of 1/T.  The initial state for each path is the eigenstate of H(start)
    nearest the middle of the spectrum.
    """
    out = []
    for start, end in paths:
        spec = spectrum(materialize(build_hamiltonian(*start), L))
        _, psi0 = mid_spectrum_state(spec)
        for rate in rates:
            proto = RampProtocol(kind, 1.0 / rate, tuple(start), tuple(end))
            step = dt if dt is not None else min(1e-3 * proto.T, _stable_dt(proto, L))
            res = evolve(psi0, proto, CdConfig(k=k), L, dt=step)
            out.append(
                SweepEntry(
                    start=tuple(start),
                    end=tuple(end),
                    rate=rate,
                    variance=res.final_variance,
                )
            )
    return out


# -- product states near the down-projected-flip singularity -----------------


@dataclass(frozen=True)
class ProductState:
    label: str
    pattern: str  # 'u' / 'd' per site, site 0 first
    dark: bool


def basis_state(pattern: str) -> np.ndarray:
    """State vector of a z-product state; bit j set means spin down at site j."""
    L = len(pattern)
    idx = 0
    for j, ch in enumerate(pattern):
        if ch == "d":
            idx |= 1 << j
        elif ch != "u":
            raise ValueError(f"pattern must be 'u'/'d' only, got {pattern!r}")
    psi = np.zeros(1 << L, dtype=complex)
    psi[idx] = 1.0
    return psi


def is_dark(pattern: str) -> bool:
    """True when the down-projected spin flip annihilates the product state.

    The flip acts only on sites whose both neighbours point down, so darkness
    is a local pattern constraint checked directly.
    """
    L = len(pattern)
    return not any(
        pattern[(j - 1) % L] == "d" and pattern[(j + 1) % L] == "d"
        for j in range(L)
    )


def dark_state_library(L: int) -> list:
    """Reference product states for protocols out of the (2, 0) coupling.

    Contains the period-4 dark state and the bright Neel state (any even L
    divisible by 4), plus one non-symmetric dark/bright pair at L = 12.
    """
    if L % 2:
        raise ValueError("dark-state library requires even L")
    states = []
    if L % 4 == 0:
        states.append(ProductState("period4_dark", "uudd" * (L // 4), True))
    states.append(ProductState("neel_bright", "ud" * (L // 2), False))
    if L == 12:
        states.append(ProductState("nonsym_dark", "duuduuuduuuu", True))
        states.append(ProductState("nonsym_bright", "duududduuddd", False))
    for st in states:
        if is_dark(st.pattern) != st.dark:
            raise AssertionError(f"darkness mismatch for {st.label}")
    return states
