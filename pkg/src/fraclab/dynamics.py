"""Spectral propagation of fractional Schrodinger and wave dynamics.

All evolution happens on eigenbasis coefficients, so the free flows are exact
(phase rotations); time discretization enters only through the forcing
quadrature of the controlled Schrodinger equation, handled by an exponential
integrator with trapezoidal interaction-picture quadrature.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import FraclabError
from .regions import ObservationRegion
from .spectra import Spectrum

__all__ = [
    "ModalState",
    "WaveModalState",
    "SourceSignal",
    "project_initial_datum",
    "reconstruct",
    "schrodinger_evolve",
    "schrodinger_forced_evolve",
    "wave_evolve",
    "wave_energy",
    "modal_invariants",
]


@dataclass(frozen=True)
class ModalState:
    """Coefficients of a Schrodinger state in the truncated eigenbasis.

    `basis` records which normalization the coefficients refer to: "phi"
    (unit discrete L2 norm) or "theta" (energy normalization, phi_k divided
    by sqrt(1 + lambda_k)).
    """

    coefficients: np.ndarray
    time: float
    spectrum: Spectrum
    basis: str = "phi"

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=complex)
        if a.ndim != 1 or len(a) < 1:
            raise ValueError("coefficients must form a nonempty vector")
        if len(a) > self.spectrum.modes:
            raise ValueError(
                f"state has {len(a)} modes but spectrum holds {self.spectrum.modes}"
            )
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("coefficients must be finite")
        if self.basis not in ("phi", "theta"):
            raise ValueError(f"basis must be 'phi' or 'theta', got {self.basis!r}")
        object.__setattr__(self, "coefficients", a)
        object.__setattr__(self, "time", float(self.time))

    @property
    def modes(self):
        return len(self.coefficients)

    @property
    def eigenvalues(self):
        return self.spectrum.eigenvalues[: self.modes]

    def to_basis(self, basis):
        """Re-express the same state in the other normalization."""
        if basis == self.basis:
            return self
        scale = np.sqrt(1.0 + self.eigenvalues)
        if basis == "phi":
            return replace(self, coefficients=self.coefficients / scale, basis="phi")
        if basis == "theta":
            return replace(self, coefficients=self.coefficients * scale, basis="theta")
        raise ValueError(f"basis must be 'phi' or 'theta', got {basis!r}")


@dataclass(frozen=True)
class WaveModalState:
    """Position and velocity coefficients of a wave state (phi basis)."""

    position: np.ndarray
    velocity: np.ndarray
    time: float
    spectrum: Spectrum

    def __post_init__(self):
        a = np.asarray(self.position, dtype=complex)
        b = np.asarray(self.velocity, dtype=complex)
        if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
            raise ValueError("position and velocity must be equal-length vectors")
        if len(a) > self.spectrum.modes:
            raise ValueError(
                f"state has {len(a)} modes but spectrum holds {self.spectrum.modes}"
            )
        if not (np.all(np.isfinite(a.view(float))) and np.all(np.isfinite(b.view(float)))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "position", a)
        object.__setattr__(self, "velocity", b)
        object.__setattr__(self, "time", float(self.time))

    @property
    def modes(self):
        return len(self.position)

    @property
    def eigenvalues(self):
        return self.spectrum.eigenvalues[: self.modes]


@dataclass(frozen=True)
class SourceSignal:
    """Time samples of a source/control on the observation nodes.

    `values[j, i]` is the source at time j*dt on the i-th region node; the
    samples span [0, (len-1)*dt].
    """

    values: np.ndarray
    dt: float

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError("source needs at least two time samples of node values")
        if not float(self.dt) > 0.0:
            raise ValueError(f"sample step must be positive, got {self.dt}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def duration(self):
        return self.dt * (self.values.shape[0] - 1)


def _basis_matrix(spectrum, modes, basis):
    if basis == "phi":
        return spectrum.vectors[:, :modes]
    return spectrum.theta_vectors()[:, :modes]


def project_initial_datum(u0, spectrum, modes=None, basis="phi"):
    """Expand nodal samples over the first `modes` eigenfunctions.

    For the phi basis the coefficients are plain discrete L2 projections
    a_k = h * sum_i u0(x_i) phi_k(x_i).  For the theta basis they are the
    H^s-orthonormal projections (the L2 formula scaled by sqrt(1+lambda_k)),
    so that reconstruct(project(u)) is the spectral truncation of u in either
    basis.
    """
    u0 = np.asarray(u0)
    n = spectrum.grid.n_interior
    if u0.shape != (n,):
        raise ValueError(f"expected {n} nodal samples, got shape {u0.shape}")
    k = spectrum.modes if modes is None else int(modes)
    if not 1 <= k <= spectrum.modes:
        raise ValueError(f"modes must lie in [1, {spectrum.modes}], got {modes}")
    a = spectrum.h * (spectrum.vectors[:, :k].T @ u0)
    if basis == "theta":
        a = a * np.sqrt(1.0 + spectrum.eigenvalues[:k])
    elif basis != "phi":
        raise ValueError(f"basis must be 'phi' or 'theta', got {basis!r}")
    return ModalState(coefficients=a, time=0.0, spectrum=spectrum, basis=basis)


def reconstruct(state, node_indices=None):
    """Nodal values sum_k a_k basis_k(x_i), optionally on a node subset."""
    phi = _basis_matrix(state.spectrum, state.modes, state.basis)
    if node_indices is not None:
        phi = phi[np.asarray(node_indices)]
    return phi @ state.coefficients


def modal_invariants(state):
    """The three conserved sums (sum |a|^2, sum lambda |a|^2, sum lambda^2 |a|^2)."""
    p = np.abs(state.coefficients) ** 2
    lam = state.eigenvalues
    return float(p.sum()), float((lam * p).sum()), float((lam**2 * p).sum())


def schrodinger_evolve(state, duration):
    """Advance the free Schrodinger flow: a_k <- a_k exp(i lambda_k t).  Exact."""
    t = float(duration)
    a = state.coefficients * np.exp(1j * state.eigenvalues * t)
    return replace(state, coefficients=a, time=state.time + t)


def _forced_increment(lam, h, phi_region, blocks):
    """Quadrature of f_k(t) e^(-i lambda_k t) over sample blocks.

    `blocks` yields (times, samples) pairs covering [0, T] contiguously with
    shared endpoints; f_k(t_j) = h * sum_{i in region} samples[j,i] phi_k(x_i).
    Blocks with an even number of uniform intervals use composite Simpson
    (O(dt^4)); others fall back to the trapezoidal rule (O(dt^2)).  Shared
    endpoints compose exactly under either rule.
    """
    total = np.zeros(len(lam), dtype=complex)
    for times, samples in blocks:
        f = h * (samples @ phi_region)  # (n_t, K)
        g = f * np.exp(-1j * np.outer(times, lam))
        dt = times[1] - times[0]
        intervals = len(times) - 1
        if intervals >= 2 and intervals % 2 == 0:
            w = np.ones(len(times))
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            total += (dt / 3.0) * (w @ g)
        else:
            total += dt * (g[0] + g[-1]) / 2.0 + dt * g[1:-1].sum(axis=0)
    return total


def schrodinger_forced_evolve(state, source, region, duration=None):
    """Solve i u_t + A u = source on the region over the source's time span.

    Modal form a_k' = i lambda_k a_k - i f_k(t) with f_k the L2 projection
    of the source restricted to the region nodes.  The interaction-picture
    integral is evaluated on the sample grid by composite Simpson when the
    sample count allows it (odd count, even intervals) and the trapezoidal
    rule otherwise; with a vanishing source this reduces exactly to the free
    flow.  States in either basis are accepted; the update runs in the phi
    basis and the result is returned in the input basis.
    """
    if not isinstance(source, SourceSignal):
        raise TypeError("source must be a SourceSignal")
    if not isinstance(region, ObservationRegion):
        raise TypeError("region must be an ObservationRegion")
    work = state.to_basis("phi")
    idx = region.node_indices(work.spectrum.grid)
    if source.values.shape[1] != len(idx):
        raise ValueError(
            f"source carries {source.values.shape[1]} node columns, region has {len(idx)} nodes"
        )
    T = source.duration
    if duration is not None and abs(float(duration) - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"source spans {T}, requested duration {duration}")
    lam = work.eigenvalues
    phi_region = work.spectrum.vectors[idx, : work.modes]
    times = source.dt * np.arange(source.values.shape[0])
    integral = _forced_increment(lam, work.spectrum.h, phi_region, [(times, source.values)])
    a = np.exp(1j * lam * T) * (work.coefficients - 1j * integral)
    out = replace(work, coefficients=a, time=work.time + T)
    return out.to_basis(state.basis)


def wave_evolve(state, duration):
    """Advance the wave flow by closed-form rotation at frequencies lambda_k."""
    if not isinstance(state, WaveModalState):
        raise TypeError("wave_evolve expects a WaveModalState")
    lam = state.eigenvalues
    if np.any(lam <= 0.0):
        raise FraclabError("wave evolution requires strictly positive eigenvalues")
    t = float(duration)
    c, s = np.cos(lam * t), np.sin(lam * t)
    a = state.position * c + state.velocity * (s / lam)
    b = -state.position * lam * s + state.velocity * c
    return replace(state, position=a, velocity=b, time=state.time + t)


def wave_energy(state):
    """Conserved energy sum(lambda^2 |a|^2 + |b|^2) of a wave state."""
    lam = state.eigenvalues
    return float(np.sum(lam**2 * np.abs(state.position) ** 2 + np.abs(state.velocity) ** 2))
