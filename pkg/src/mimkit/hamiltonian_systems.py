"""Semi-discrete Hamiltonian systems over staggered-grid field pairs.

Each system couples a right-hand side ``rhs(t, u, v) -> (du/dt, dv/dt)`` with
the energy functional it (approximately) conserves:

* ``WaveSystem``: the linear wave equation with homogeneous Dirichlet
  conditions, ``u_t = v``, ``v_t = L u + F``, with energy
  ``H = (1/2)(<v, v>_Q + <G u, G u>_P)``; both fields live on extended
  centers.
* ``ShallowWaterSystem``: the nonlinear shallow-water equations with surface
  elevation ``e`` on extended centers and velocity ``u`` on nodes,
  ``e_t = -D_hat((d0 + I_G e) * u)``, ``u_t = -g G e - u * G(I_D u)``, with
  energy ``H = (1/2)(g <e, e>_Q + <(d0 + I_G e) u, u>_P)``.
* ``HarmonicOscillator``: the two-dimensional oracle ``u' = v, v' = -u`` with
  ``H = (u^2 + v^2)/2`` and a closed-form rotation solution, used to pin
  integrator orders and sign conventions.

Boundary handling: rhs implementations force the boundary entries of the
rates to zero, so explicit updates never move boundary values; systems also
expose ``apply_boundary`` (a projection for the Dirichlet wave system, the
identity elsewhere) which integrators apply after stages/steps.

Rate arrays returned by ``rhs``/``position_rate``/``velocity_rate`` may alias
the inputs and must be treated as read-only by callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import NumericalFailure
from .grid_fields import StaggeredGrid1D
from .mimetic_ops import MimeticOperatorSet

__all__ = [
    "HamiltonianSystem",
    "WaveState",
    "ShallowWaterState",
    "WaveSystem",
    "ShallowWaterSystem",
    "HarmonicOscillator",
    "wave_rhs",
    "wave_hamiltonian",
    "wave_standing_exact",
    "gaussian_ic",
    "shallow_water_ic",
    "shallow_water_rhs",
    "shallow_water_hamiltonian",
    "harmonic_oscillator",
]


class HamiltonianSystem:
    """A Hamiltonian ODE system: rhs + energy + layouts + boundary handler.

    ``position_layout`` / ``velocity_layout`` name where each field lives
    ("extended", "node", or "scalar").  ``wave_speed`` (when not None) is the
    characteristic speed used by CFL-based step selection.
    """

    name: str = "abstract"
    position_layout: str = "extended"
    velocity_layout: str = "extended"
    wave_speed: Optional[float] = None

    def rhs(self, t: float, u: np.ndarray, v: np.ndarray):
        raise NotImplementedError

    def energy(self, u: np.ndarray, v: np.ndarray) -> float:
        raise NotImplementedError

    def position_rate(self, t: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """du/dt alone (splitting schemes' drift); defaults to rhs()[0]."""
        return self.rhs(t, u, v)[0]

    def velocity_rate(self, t: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """dv/dt alone (splitting schemes' kick); defaults to rhs()[1]."""
        return self.rhs(t, u, v)[1]

    def apply_boundary(self, u: np.ndarray, v: np.ndarray):
        """Project a state onto the boundary conditions (default: identity)."""
        return u, v

    def quadratic_parts(self, u, v, d_u, d_v):
        """(E, T) with H(state + s*d) - H(state) = s*E + (1/2)s^2*T.

        Only defined when the energy is a quadratic form; the analytic
        relaxation parameter is gamma = -2E/(dt*T).
        """
        raise NumericalFailure(
            f"{self.name}: energy is not a quadratic form; "
            "analytic relaxation is unavailable (use the bisection mode)"
        )


@dataclass(frozen=True)
class WaveState:
    """Wave-equation state: displacement and velocity on extended centers."""

    u: np.ndarray
    v: np.ndarray

    def arrays(self):
        return self.u, self.v


@dataclass(frozen=True)
class ShallowWaterState:
    """Shallow-water state: elevation e (extended), velocity u (node), plus
    still-water depth d0 and gravity g.  Requires d0 + e > 0 everywhere."""

    e: np.ndarray
    u: np.ndarray
    d0: float = 1.0
    g: float = 1.0

    def arrays(self):
        return self.e, self.u


def _pair(state):
    if hasattr(state, "arrays"):
        return state.arrays()
    u, v = state
    return np.asarray(u, dtype=float), np.asarray(v, dtype=float)


class WaveSystem(HamiltonianSystem):
    """u_t = v, v_t = L u + F with homogeneous Dirichlet conditions.

    ``source`` may be None, a static extended-center array, or a callable
    ``t -> extended-center array``.
    """

    name = "wave"
    position_layout = "extended"
    velocity_layout = "extended"
    wave_speed = 1.0

    def __init__(self, ops: MimeticOperatorSet, source=None):
        self.ops = ops
        self.source = source

    def _source_at(self, t: float):
        if self.source is None:
            return None
        return self.source(t) if callable(self.source) else self.source

    def rhs(self, t, u, v):
        n = self.ops.grid.n_cells + 2
        if len(u) != n or len(v) != n:
            raise ValueError(f"wave state must be two extended fields of length {n}")
        dv = self.ops.L @ u
        F = self._source_at(t)
        if F is not None:
            dv = dv + np.asarray(F, dtype=float)
        dv[0] = dv[-1] = 0.0
        return v.copy(), dv

    def position_rate(self, t, u, v):
        return v

    def velocity_rate(self, t, u, v):
        dv = self.ops.L @ u
        F = self._source_at(t)
        if F is not None:
            dv = dv + np.asarray(F, dtype=float)
        dv[0] = dv[-1] = 0.0
        return dv

    def energy(self, u, v):
        gu = self.ops.G @ u
        return 0.5 * (self.ops.inner_q(v, v) + self.ops.inner_p(gu, gu))

    def apply_boundary(self, u, v):
        u = np.array(u, dtype=float)
        v = np.array(v, dtype=float)
        u[0] = u[-1] = 0.0
        v[0] = v[-1] = 0.0
        return u, v

    def quadratic_parts(self, u, v, d_u, d_v):
        G = self.ops.G
        gu, gdu = G @ u, G @ d_u
        E = self.ops.inner_q(v, d_v) + self.ops.inner_p(gu, gdu)
        T = self.ops.inner_q(d_v, d_v) + self.ops.inner_p(gdu, gdu)
        return E, T


class ShallowWaterSystem(HamiltonianSystem):
    """Nonlinear shallow water: e_t = -D_hat((d0 + I_G e) u),
    u_t = -g G e - u * G(I_D u); energy is non-quadratic."""

    name = "shallow_water"
    position_layout = "extended"
    velocity_layout = "node"

    def __init__(self, ops: MimeticOperatorSet, d0: float = 1.0, g: float = 1.0):
        self.ops = ops
        self.d0 = float(d0)
        self.g = float(g)
        self.wave_speed = float(np.sqrt(self.g * self.d0))

    def _depth_nodes(self, e):
        """Total depth at nodes; aborts on non-positive depth."""
        if self.d0 + np.min(e) <= 0.0:
            raise NumericalFailure(
                f"non-positive total depth: min(d0 + e) = {self.d0 + float(np.min(e)):.3e}"
            )
        depth = self.d0 + self.ops.I_G @ e
        if np.min(depth) <= 0.0:
            raise NumericalFailure(
                f"non-positive total depth at nodes: min = {float(np.min(depth)):.3e}"
            )
        return depth

    def rhs(self, t, e, u):
        de = self.position_rate(t, e, u)
        du = self.velocity_rate(t, e, u)
        return de, du

    def position_rate(self, t, e, u):
        depth = self._depth_nodes(e)
        de = -(self.ops.D_hat @ (depth * u))
        de[0] = de[-1] = 0.0
        return de

    def velocity_rate(self, t, e, u):
        if self.d0 + np.min(e) <= 0.0:
            raise NumericalFailure(
                f"non-positive total depth: min(d0 + e) = {self.d0 + float(np.min(e)):.3e}"
            )
        du = -self.g * (self.ops.G @ e) - u * (self.ops.G @ (self.ops.I_D @ u))
        du[0] = du[-1] = 0.0
        return du

    def energy(self, e, u):
        depth = self.d0 + self.ops.I_G @ e
        return 0.5 * (self.g * self.ops.inner_q(e, e) + self.ops.inner_p(depth * u, u))


class HarmonicOscillator(HamiltonianSystem):
    """u' = v, v' = -u on length-1 arrays; H = (u^2 + v^2)/2.

    The exact flow is rotation: u(t) = u0 cos t + v0 sin t,
    v(t) = -u0 sin t + v0 cos t.
    """

    name = "harmonic_oscillator"
    position_layout = "scalar"
    velocity_layout = "scalar"
    wave_speed = None

    def rhs(self, t, u, v):
        return v.copy(), -u

    def position_rate(self, t, u, v):
        return v

    def velocity_rate(self, t, u, v):
        return -u

    def energy(self, u, v):
        return 0.5 * float(u @ u + v @ v)

    def quadratic_parts(self, u, v, d_u, d_v):
        E = float(u @ d_u + v @ d_v)
        T = float(d_u @ d_u + d_v @ d_v)
        return E, T

    @staticmethod
    def initial_state(u0: float = 1.0, v0: float = 0.0):
        return np.array([float(u0)]), np.array([float(v0)])

    @staticmethod
    def exact_solution(t: float, u0: float = 1.0, v0: float = 0.0):
        c, s = np.cos(t), np.sin(t)
        return np.array([u0 * c + v0 * s]), np.array([-u0 * s + v0 * c])


def harmonic_oscillator() -> HarmonicOscillator:
    """The 2-dimensional oscillator oracle with exact-solution accessor."""
    return HarmonicOscillator()


# ---------------------------------------------------------------------------
# free-function forms and initial conditions
# ---------------------------------------------------------------------------

def wave_rhs(ops: MimeticOperatorSet, state, source=None):
    """(du/dt, dv/dt) for the wave system; boundary entries of dv/dt are 0."""
    u, v = _pair(state)
    return WaveSystem(ops, source).rhs(0.0, u, v)


def wave_hamiltonian(ops: MimeticOperatorSet, state) -> float:
    """H = (1/2)(<v, v>_Q + <G u, G u>_P)."""
    u, v = _pair(state)
    return WaveSystem(ops).energy(u, v)


def wave_standing_exact(x, t):
    """Standing-wave solution u(x, t) = sin(pi x) cos(pi t) on [0, 1]
    (zero-boundary, zero-source); reference for convergence studies."""
    return np.sin(np.pi * np.asarray(x, dtype=float)) * np.cos(np.pi * t)


def gaussian_ic(
    grid: StaggeredGrid1D,
    center: float = 0.5,
    width: float = 0.1,
    amplitude: float = 1.0,
) -> WaveState:
    """Gaussian displacement pulse amplitude*exp(-((x-center)/width)^2)
    sampled at extended centers, boundary entries zeroed; zero velocity.
    Defaults reproduce exp(-100 (x - 1/2)^2)."""
    x = grid.extended
    u = amplitude * np.exp(-(((x - center) / width) ** 2))
    u[0] = u[-1] = 0.0
    v = np.zeros_like(u)
    return WaveState(u=u, v=v)


def shallow_water_ic(
    grid: StaggeredGrid1D,
    offset: float = 1.0,
    amplitude: float = 0.1,
    center: float = 0.0,
    width: float = 1.0,
    d0: float = 1.0,
    g: float = 1.0,
) -> ShallowWaterState:
    """Still velocity with a Gaussian elevation bump
    offset + amplitude*exp(-((x-center)/width)^2) at extended centers.
    Defaults reproduce eta = 1 + 0.1 exp(-x^2), u = 0."""
    x = grid.extended
    e = offset + amplitude * np.exp(-(((x - center) / width) ** 2))
    u = np.zeros(grid.n_cells + 1)
    return ShallowWaterState(e=e, u=u, d0=float(d0), g=float(g))


def shallow_water_rhs(ops: MimeticOperatorSet, state: ShallowWaterState):
    """(de/dt, du/dt); boundary entries forced to zero; aborts on
    non-positive total depth."""
    e, u = _pair(state)
    d0 = getattr(state, "d0", 1.0)
    g = getattr(state, "g", 1.0)
    return ShallowWaterSystem(ops, d0=d0, g=g).rhs(0.0, e, u)


def shallow_water_hamiltonian(ops: MimeticOperatorSet, state: ShallowWaterState) -> float:
    """H = (1/2)(g <e, e>_Q + <(d0 + I_G e) u, u>_P)."""
    e, u = _pair(state)
    d0 = getattr(state, "d0", 1.0)
    g = getattr(state, "g", 1.0)
    return ShallowWaterSystem(ops, d0=d0, g=g).energy(e, u)
