"""Explicit time integrators for Hamiltonian field systems.

Schemes (``SchemeKind``):

* ``RK4`` — the classical fourth-order Runge-Kutta method.
* ``RRK_analytic`` / ``RRK_bisection`` — relaxation RK4: after forming the
  RK4 increment d, the update ``state + gamma*dt*d`` uses the relaxation
  parameter gamma that restores the energy exactly, found in closed form for
  quadratic energies or by bisection in general.  Time advances by
  ``gamma*dt`` (configurable to plain ``dt``).
* ``ForestRuth`` — the 4th-order 4-stage symplectic splitting
  (3 force evaluations; the last kick weight is zero).
* ``PEFRL`` — the position-extended Forest-Ruth-like 4th-order splitting
  (4 force evaluations, optimized error constant).
* ``Leapfrog`` — 2nd-order staggered kick-drift (1 force evaluation); the
  integration loop uses the algebraically equivalent synchronized
  drift-kick-drift form so recorded (t, H) samples are time-aligned.
* ``Composition4`` — the 5-stage 4th-order palindromic composition
  (5 force evaluations).

Splitting schemes assume the separable pattern u' = f(v), v' = F(u); for
systems that are not exactly separable (shallow water) they are applied in
lockstep form: each drift uses the current velocity field, each kick the
already-updated position field.  Energy is then conserved approximately
rather than exactly.

``integrate`` drives any scheme to ``t_end`` (shortening the final step to
land exactly, except relaxation schemes, whose accumulated ``gamma*dt`` may
overshoot by less than one step; the record keeps the true final time) and
records the energy trace.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NumericalFailure
from .grid_fields import StaggeredGrid1D
from .hamiltonian_systems import HamiltonianSystem

__all__ = [
    "ButcherTableau",
    "TABLEAU_RK4",
    "TABLEAU_IMPLICIT_MIDPOINT",
    "symplecticity_residual",
    "SchemeKind",
    "normalize_scheme",
    "RunRecord",
    "rk4_step",
    "rrk_gamma_analytic",
    "rrk_gamma_bisection",
    "rrk_step",
    "forest_ruth_step",
    "pefrl_step",
    "leapfrog_step",
    "leapfrog_synchronized_step",
    "composition4_step",
    "integrate",
    "cfl_dt",
]

State = Tuple[np.ndarray, np.ndarray]


# ---------------------------------------------------------------------------
# Butcher tableaus and the symplecticity residual
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ButcherTableau:
    """Runge-Kutta coefficients (a, b, c); sum(b) must equal 1.

    The explicit schemes used here have strictly lower-triangular ``a``;
    implicit tableaus (e.g. the midpoint rule) may still be constructed for
    the symplecticity-residual check — query ``is_explicit``.
    """

    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    def __post_init__(self):
        s = len(self.b)
        if len(self.c) != s or len(self.a) != s or any(len(row) != s for row in self.a):
            raise ValueError("inconsistent tableau dimensions")
        if abs(sum(self.b) - 1.0) > 1e-12:
            raise ValueError(f"tableau is inconsistent: sum(b) = {sum(self.b)!r} != 1")

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def is_explicit(self) -> bool:
        return all(
            self.a[i][j] == 0.0 for i in range(self.stages) for j in range(i, self.stages)
        )


TABLEAU_RK4 = ButcherTableau(
    a=((0.0, 0.0, 0.0, 0.0), (0.5, 0.0, 0.0, 0.0), (0.0, 0.5, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0)),
    b=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    c=(0.0, 0.5, 0.5, 1.0),
)

TABLEAU_IMPLICIT_MIDPOINT = ButcherTableau(a=((0.5,),), b=(1.0,), c=(0.5,))


def symplecticity_residual(tableau: ButcherTableau) -> float:
    """max |b_i a_ij + b_j a_ji - b_i b_j|; zero for symplectic tableaus."""
    a, b = tableau.a, tableau.b
    s = tableau.stages
    return max(
        abs(b[i] * a[i][j] + b[j] * a[j][i] - b[i] * b[j])
        for i in range(s)
        for j in range(i, s)
    )


# ---------------------------------------------------------------------------
# scheme registry
# ---------------------------------------------------------------------------

class SchemeKind(str, Enum):
    RK4 = "RK4"
    RRK_ANALYTIC = "RRK_analytic"
    RRK_BISECTION = "RRK_bisection"
    FOREST_RUTH = "ForestRuth"
    PEFRL = "PEFRL"
    LEAPFROG = "Leapfrog"
    COMPOSITION4 = "Composition4"

    @property
    def rhs_evals_per_step(self) -> int:
        return _RHS_EVALS[self]

    @property
    def is_relaxation(self) -> bool:
        return self in (SchemeKind.RRK_ANALYTIC, SchemeKind.RRK_BISECTION)

    @property
    def nominal_order(self) -> int:
        return 2 if self is SchemeKind.LEAPFROG else 4


_RHS_EVALS = {
    SchemeKind.RK4: 4,
    SchemeKind.RRK_ANALYTIC: 4,
    SchemeKind.RRK_BISECTION: 4,
    SchemeKind.FOREST_RUTH: 3,
    SchemeKind.PEFRL: 4,
    SchemeKind.LEAPFROG: 1,
    SchemeKind.COMPOSITION4: 5,
}

_SCHEME_ALIASES = {
    "rk4": SchemeKind.RK4,
    "rrk": SchemeKind.RRK_ANALYTIC,
    "rrk_analytic": SchemeKind.RRK_ANALYTIC,
    "rrk_bisection": SchemeKind.RRK_BISECTION,
    "rrk-root": SchemeKind.RRK_BISECTION,
    "rrk_root": SchemeKind.RRK_BISECTION,
    "forestruth": SchemeKind.FOREST_RUTH,
    "forest_ruth": SchemeKind.FOREST_RUTH,
    "fruth": SchemeKind.FOREST_RUTH,
    "fr": SchemeKind.FOREST_RUTH,
    "pefrl": SchemeKind.PEFRL,
    "leapfrog": SchemeKind.LEAPFROG,
    "lf": SchemeKind.LEAPFROG,
    "composition4": SchemeKind.COMPOSITION4,
    "comp4": SchemeKind.COMPOSITION4,
}


def normalize_scheme(name) -> SchemeKind:
    """Resolve a scheme name or alias (case-insensitive) to a SchemeKind."""
    if isinstance(name, SchemeKind):
        return name
    key = str(name).strip().lower()
    try:
        return _SCHEME_ALIASES[key]
    except KeyError:
        valid = ", ".join(kind.value for kind in SchemeKind)
        raise ValueError(f"unknown scheme {name!r}; expected one of: {valid}") from None


# ---------------------------------------------------------------------------
# Runge-Kutta and relaxation steps
# ---------------------------------------------------------------------------

def _rk4_increment(system: HamiltonianSystem, state: State, t: float, dt: float):
    """b-weighted RK4 increment (d_u, d_v): the update is state + dt*d."""
    u, v = state
    a, b, c = TABLEAU_RK4.a, TABLEAU_RK4.b, TABLEAU_RK4.c
    ks = []
    for i in range(4):
        ui, vi = u, v
        for j in range(i):
            if a[i][j] != 0.0:
                ku, kv = ks[j]
                ui = ui + dt * a[i][j] * ku
                vi = vi + dt * a[i][j] * kv
        if i > 0:
            ui, vi = system.apply_boundary(ui, vi)
        ks.append(system.rhs(t + c[i] * dt, ui, vi))
    d_u = sum(bi * ku for bi, (ku, kv) in zip(b, ks))
    d_v = sum(bi * kv for bi, (ku, kv) in zip(b, ks))
    return d_u, d_v


def rk4_step(system: HamiltonianSystem, state: State, t: float, dt: float) -> State:
    """One classical RK4 step; dt = 0 returns the state unchanged."""
    u, v = state
    if dt == 0.0:
        return u, v
    d_u, d_v = _rk4_increment(system, state, t, dt)
    return system.apply_boundary(u + dt * d_u, v + dt * d_v)


def rrk_gamma_analytic(system: HamiltonianSystem, state: State, d_u, d_v, dt: float) -> float:
    """Closed-form relaxation parameter for quadratic energies.

    With E = <v, d_v>_Q + <G u, G d_u>_P and T = <d_v, d_v>_Q +
    <G d_u, G d_u>_P, the energy change of ``state + gamma*dt*d`` is
    ``gamma*dt*E + (1/2)(gamma*dt)^2*T``; its nontrivial root is
    gamma = -2E/(dt*T).  Returns 1 when d vanishes (E = T = 0).
    """
    u, v = state
    E, T = system.quadratic_parts(u, v, d_u, d_v)
    if T == 0.0:
        if E == 0.0:
            return 1.0
        raise NumericalFailure(
            f"relaxation has no root: quadratic term vanished with E = {E:.3e}"
        )
    return -2.0 * E / (dt * T)


def rrk_gamma_bisection(
    system: HamiltonianSystem, state: State, d_u, d_v, dt: float, tol: float = 1e-12
) -> float:
    """Relaxation parameter by bisection on r(g) = H(state + g*dt*d) - H(state).

    Starts from the bracket [0.5, 1.5], expanding geometrically up to
    [0.1, 2.0] if the residual does not change sign; terminates when the
    bracket width drops below ``tol`` or after 200 iterations.
    """
    u, v = state
    h0 = system.energy(u, v)

    def residual(g: float) -> float:
        uu, vv = system.apply_boundary(u + g * dt * d_u, v + g * dt * d_v)
        return system.energy(uu, vv) - h0

    if residual(1.0) == 0.0:
        return 1.0
    lo, hi = 0.5, 1.5
    r_lo, r_hi = residual(lo), residual(hi)
    while r_lo * r_hi > 0.0 and (lo > 0.1 or hi < 2.0):
        lo = max(0.1, 0.5 * lo)
        hi = min(2.0, 1.5 * hi)
        r_lo, r_hi = residual(lo), residual(hi)
    if r_lo == 0.0:
        return lo
    if r_hi == 0.0:
        return hi
    if r_lo * r_hi > 0.0:
        raise NumericalFailure(
            "relaxation bisection found no sign change on [0.1, 2.0]: "
            f"r(0.1) = {r_lo:.3e}, r(2.0) = {r_hi:.3e}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        if r_mid == 0.0:
            return mid
        if r_lo * r_mid < 0.0:
            hi, r_hi = mid, r_mid
        else:
            lo, r_lo = mid, r_mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def rrk_step(
    system: HamiltonianSystem,
    state: State,
    t: float,
    dt: float,
    mode: str = "analytic",
    tol: float = 1e-12,
    gamma_override: Optional[float] = None,
):
    """One relaxation-RK4 step: RK4 stages, then state + gamma*dt*d.

    Returns (new_state, gamma).  ``gamma_override`` forces a fixed gamma
    (gamma = 1 reproduces rk4_step exactly).
    """
    u, v = state
    d_u, d_v = _rk4_increment(system, state, t, dt)
    if gamma_override is not None:
        gamma = float(gamma_override)
    elif mode == "analytic":
        gamma = rrk_gamma_analytic(system, state, d_u, d_v, dt)
    elif mode == "bisection":
        gamma = rrk_gamma_bisection(system, state, d_u, d_v, dt, tol=tol)
    else:
        raise ValueError(f"unknown relaxation mode {mode!r}; expected 'analytic' or 'bisection'")
    new = system.apply_boundary(u + gamma * dt * d_u, v + gamma * dt * d_v)
    return new, gamma


# ---------------------------------------------------------------------------
# symplectic splitting steps
# ---------------------------------------------------------------------------

_FR_X = (2.0 ** (1.0 / 3.0) + 2.0 ** (-1.0 / 3.0) - 1.0) / 6.0
_FR_C = (_FR_X + 0.5, -_FR_X, -_FR_X, _FR_X + 0.5)
_FR_D = (2.0 * _FR_X + 1.0, -4.0 * _FR_X - 1.0, 2.0 * _FR_X + 1.0, 0.0)

_PEFRL_XI = +0.1644986515575760
_PEFRL_LAMBDA = -0.02094333910398989
_PEFRL_CHI = +1.235692651138917
# alternating drift/kick weights; drifts sum to 1: 2*xi + 2*chi + (1-2(chi+xi))
_PEFRL_DRIFTS = (
    _PEFRL_XI,
    _PEFRL_CHI,
    1.0 - 2.0 * (_PEFRL_CHI + _PEFRL_XI),
    _PEFRL_CHI,
    _PEFRL_XI,
)
_PEFRL_KICKS = (
    (1.0 - 2.0 * _PEFRL_LAMBDA) / 2.0,
    _PEFRL_LAMBDA,
    _PEFRL_LAMBDA,
    (1.0 - 2.0 * _PEFRL_LAMBDA) / 2.0,
)

_SQRT19 = math.sqrt(19.0)
_COMP4_BETA = (
    (14.0 - _SQRT19) / 108.0,
    (-23.0 - 20.0 * _SQRT19) / 270.0,
    1.0 / 5.0,
    (-2.0 + 10.0 * _SQRT19) / 135.0,
    (146.0 + 5.0 * _SQRT19) / 540.0,
)
# alpha_k = beta_{6-k} (palindromic pairing); alpha_0 = 0
_COMP4_ALPHA = tuple(reversed(_COMP4_BETA))


def _drift(system, t, u, v, w, dt):
    return u + (w * dt) * system.position_rate(t, u, v) if w != 0.0 else u


def _kick(system, t, u, v, w, dt):
    return v + (w * dt) * system.velocity_rate(t, u, v) if w != 0.0 else v


def forest_ruth_step(system: HamiltonianSystem, state: State, t: float, dt: float) -> State:
    """Forest-Ruth splitting: drifts (x+1/2, -x, -x, x+1/2), kicks
    (2x+1, -4x-1, 2x+1, 0) with x = (2^(1/3) + 2^(-1/3) - 1)/6."""
    u, v = state
    for ci, di in zip(_FR_C, _FR_D):
        u = _drift(system, t, u, v, ci, dt)
        v = _kick(system, t, u, v, di, dt)
    return system.apply_boundary(u, v)


def pefrl_step(system: HamiltonianSystem, state: State, t: float, dt: float) -> State:
    """PEFRL splitting: drift xi, kick (1-2*lambda)/2, drift chi, kick lambda,
    drift 1-2(chi+xi), kick lambda, drift chi, kick (1-2*lambda)/2, drift xi."""
    u, v = state
    for i in range(4):
        u = _drift(system, t, u, v, _PEFRL_DRIFTS[i], dt)
        v = _kick(system, t, u, v, _PEFRL_KICKS[i], dt)
    u = _drift(system, t, u, v, _PEFRL_DRIFTS[4], dt)
    return system.apply_boundary(u, v)


def leapfrog_step(system: HamiltonianSystem, state_staggered: State, t: float, dt: float) -> State:
    """Staggered leapfrog kick-drift: input (u at t+dt/2, v at t); the kick
    v += dt*F(u_half) is the single force evaluation, then u_half drifts by
    dt*v_new.  Output is (u at t+3dt/2, v at t+dt)."""
    u_half, v = state_staggered
    v = _kick(system, t, u_half, v, 1.0, dt)
    u_half = _drift(system, t, u_half, v, 1.0, dt)
    return system.apply_boundary(u_half, v)


def leapfrog_synchronized_step(system: HamiltonianSystem, state: State, t: float, dt: float) -> State:
    """Synchronized drift-kick-drift form of the staggered leapfrog (the
    half-drifts telescope into the staggered scheme, so the trajectory is
    algebraically identical); one force evaluation, time-aligned output.

    This symmetric form is what ``integrate`` runs (recorded (t, H) samples
    need time-aligned fields) and is the variant that is exactly
    time-reversible under dt -> -dt; the staggered kick-drift map's inverse
    is instead its adjoint (drift-kick with -dt).
    """
    u, v = state
    u = _drift(system, t, u, v, 0.5, dt)
    v = _kick(system, t + 0.5 * dt, u, v, 1.0, dt)
    u = _drift(system, t + dt, u, v, 0.5, dt)
    return system.apply_boundary(u, v)


def composition4_step(system: HamiltonianSystem, state: State, t: float, dt: float) -> State:
    """Five-stage fourth-order palindromic composition: sub-steps
    u += (beta_k + alpha_{k-1})*dt*f(v), v += (beta_k + alpha_k)*dt*F(u)
    for k = 1..5 with alpha_0 = 0, then the closing drift alpha_5*dt."""
    u, v = state
    alpha_prev = 0.0
    for beta_k, alpha_k in zip(_COMP4_BETA, _COMP4_ALPHA):
        u = _drift(system, t, u, v, beta_k + alpha_prev, dt)
        v = _kick(system, t, u, v, beta_k + alpha_k, dt)
        alpha_prev = alpha_k
    u = _drift(system, t, u, v, alpha_prev, dt)
    return system.apply_boundary(u, v)


# ---------------------------------------------------------------------------
# integration loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunRecord:
    """Energy trace of one integration run.

    ``times`` are the recorded instants (strictly increasing, starting at 0);
    ``energies`` the matching H values; ``gammas`` the per-step relaxation
    parameters (relaxation schemes only, one entry per step, not subsampled);
    ``final_state`` the end state; ``final_time`` the true end time (equal to
    t_end except for relaxation schemes).
    """

    scheme: SchemeKind
    times: np.ndarray
    energies: np.ndarray
    gammas: Optional[np.ndarray]
    final_state: State
    final_time: float
    n_steps: int
    dt: float
    wall_seconds: float
    rhs_evals: int


def cfl_dt(grid: StaggeredGrid1D, cfl: float, wave_speed: float = 1.0) -> float:
    """dt = cfl * h / wave_speed."""
    if cfl <= 0.0:
        raise ValueError(f"cfl must be positive, got {cfl}")
    if wave_speed <= 0.0:
        raise ValueError(f"wave_speed must be positive, got {wave_speed}")
    return cfl * grid.h / wave_speed


_PLAIN_STEPPERS = {
    SchemeKind.RK4: rk4_step,
    SchemeKind.FOREST_RUTH: forest_ruth_step,
    SchemeKind.PEFRL: pefrl_step,
    SchemeKind.LEAPFROG: leapfrog_synchronized_step,
    SchemeKind.COMPOSITION4: composition4_step,
}


def integrate(
    system: HamiltonianSystem,
    scheme,
    state0: State,
    t_end: float,
    dt: float,
    record_every: int = 1,
    rrk_tol: float = 1e-12,
    rrk_advance: str = "gamma_dt",
) -> RunRecord:
    """Integrate to t_end, recording (t, H) at t = 0, every ``record_every``
    steps, and at the final step.

    Fixed-step schemes shorten the final step to land exactly on t_end.
    Relaxation schemes always take full steps of nominal size dt and advance
    time by gamma*dt (or plain dt with rrk_advance="plain_dt"), so the final
    time may exceed t_end by less than one step; the record keeps the true
    final time.  Raises NumericalFailure (tagged with the step index) when a
    step aborts or the energy becomes non-finite.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end <= 0.0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    record_every = int(record_every)
    if record_every < 1:
        raise ValueError(f"record_every must be a positive integer, got {record_every}")
    if rrk_advance not in ("gamma_dt", "plain_dt"):
        raise ValueError(f"rrk_advance must be 'gamma_dt' or 'plain_dt', got {rrk_advance!r}")
    kind = normalize_scheme(scheme)

    u, v = state0
    u, v = system.apply_boundary(np.asarray(u, dtype=float), np.asarray(v, dtype=float))

    times = [0.0]
    energies = [system.energy(u, v)]
    if not np.isfinite(energies[0]):
        raise NumericalFailure(f"non-finite initial energy: {energies[0]!r}")
    gammas = [] if kind.is_relaxation else None

    t = 0.0
    n_steps = 0
    tiny = 1e-12 * max(dt, t_end)
    start = time.perf_counter()
    try:
        if kind.is_relaxation:
            mode = "analytic" if kind is SchemeKind.RRK_ANALYTIC else "bisection"
            # If the discrete energy is not an invariant of the semi-discrete
            # flow (boundary quadrature defect), gamma decays geometrically
            # and t stops advancing; cap the step count so that stall raises
            # instead of looping forever.
            max_steps = 50 * max(1, math.ceil(t_end / dt)) + 1000
            while t < t_end - tiny:
                n_steps += 1
                if n_steps > max_steps:
                    raise NumericalFailure(
                        f"relaxation stalled: reached only t = {t:.6g} of "
                        f"{t_end:.6g} after {max_steps} steps (dt = {dt:.6g})"
                    )
                (u, v), gamma = rrk_step(system, (u, v), t, dt, mode=mode, tol=rrk_tol)
                advance = gamma * dt if rrk_advance == "gamma_dt" else dt
                if not advance > 0.0:
                    raise NumericalFailure(
                        f"relaxation parameter collapsed: gamma = {gamma!r}"
                    )
                t += advance
                gammas.append(gamma)
                if n_steps % record_every == 0:
                    _record(system, u, v, t, times, energies, n_steps)
            if times[-1] != t:
                _record(system, u, v, t, times, energies, n_steps)
        else:
            stepper = _PLAIN_STEPPERS[kind]
            total = max(1, math.ceil(t_end / dt - 1e-9))
            for i in range(1, total + 1):
                n_steps = i
                target = t_end if i == total else i * dt
                u, v = stepper(system, (u, v), t, target - t)
                t = target
                if i % record_every == 0 or i == total:
                    if times[-1] != t:
                        _record(system, u, v, t, times, energies, i)
    except NumericalFailure as exc:
        if not getattr(exc, "step_index_attached", False):
            exc.step_index_attached = True
            exc.args = (f"step {max(n_steps, 1)}: {exc.args[0] if exc.args else ''}",)
        raise
    wall = time.perf_counter() - start

    return RunRecord(
        scheme=kind,
        times=np.array(times),
        energies=np.array(energies),
        gammas=None if gammas is None else np.array(gammas),
        final_state=(u, v),
        final_time=t,
        n_steps=n_steps,
        dt=dt,
        wall_seconds=wall,
        rhs_evals=n_steps * kind.rhs_evals_per_step,
    )


def _record(system, u, v, t, times, energies, step_index):
    h_val = system.energy(u, v)
    if not np.isfinite(h_val):
        raise NumericalFailure(f"non-finite energy {h_val!r} at t = {t:.6g} (step {step_index})")
    times.append(t)
    energies.append(h_val)
