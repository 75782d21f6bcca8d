"""Fully nonlinear time-marching vortex-sheet solver for a 2D flexible wing.

The wing S_b occupies labels xi in (-1, 1) (leading edge -1) and moves
through fluid at rest with prescribed velocity.  Each step restructures
the vorticity a la Karman-Sears:

    gamma_0  quasi-steady bound density: steady-airfoil solve of the
             prescribed normal velocity with time frozen,
    gamma_1  bound correction cancelling the wake-induced normal
             velocity, so the prescribed normal velocity is reinstated,
    gamma_w  free wake elements, one shed per step at the trailing edge
             with strength closing the circulation ledger
             Gamma_0 + Gamma_1 + Gamma_w = 0 (start from rest),

after which the wake drifts with the local mean fluid velocity and each
element keeps its circulation forever (free-vortex material invariance).

Bound densities are expanded in the trailing-edge-smooth class

    gamma(theta) = a_0 cot(theta/2) + sum_m a_m sin(m theta),
    xi = -cos(theta),

for which the flat-plate airfoil operator diagonalises:
G[cot] = -1/2, G[sin m.] = cos(m.)/2, so the quasi-steady solve is a
cosine transform; camber enters through a regular residual kernel handled
by under-relaxed fixed-point iteration.  All flat-wing field inductions
use closed forms in the Joukowski variable, which is what keeps the
first shed (starting) vortex accurate - the anchor of the whole wake.

Complex velocities are reported as w = u - i v; the vortex-density sign
convention is the tangential-velocity jump u_s(+) - u_s(-).
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from .errors import (ConvergenceError, DomainError, LedgerFault,
                     NotReadyError)
from .kinematics import RigidWingMotion, WingShapeFunction
from .singular_kernels import joukowski_rho, sqrt_cut

__all__ = [
    "BoundSheet", "WakeSheet", "SolverState", "WagnerSolution",
    "new_simulation", "solve_quasisteady", "march_step", "run_simulation",
    "induced_velocity", "forces_impulse", "force_history",
    "wake_velocity_probe", "wagner_solve", "wagner_kernel",
    "shed_vortex_centroids", "street_pair_spacing", "SimulationResult",
]

KELVIN_TOL = 1e-10


# ----------------------------------------------------------------------
# bound-sheet mode machinery

def _cos_transform(theta, values):
    """Coefficients w_m of values = sum w_m cos(m theta) on the midpoint
    theta grid (exact for resolved cosine polynomials)."""
    n = len(theta)
    m = np.arange(n)
    mat = np.cos(np.outer(m, theta))
    w = (2.0 / n) * mat @ values
    w[0] *= 0.5
    return w


def _kutta_modes_from_normal_velocity(theta, v_n):
    """Solve G[gamma] = v_n in the trailing-edge-smooth class."""
    w = _cos_transform(theta, v_n)
    a = 2.0 * w
    a[0] = -2.0 * w[0]
    return a


def _gamma_values(theta, a):
    half = 0.5 * theta
    vals = a[0] * (np.cos(half) / np.sin(half))
    m = np.arange(1, len(a))
    vals = vals + np.sin(np.outer(theta, m)) @ a[1:]
    return vals


def _gamma_circulation(a):
    """int gamma dxi of the mode vector."""
    G = np.pi * a[0]
    if len(a) > 1:
        G += 0.5 * np.pi * a[1]
    return float(G)


def _gamma_first_moment(a):
    """int gamma xi dxi of the mode vector."""
    S = -0.5 * np.pi * a[0]
    if len(a) > 2:
        S -= 0.25 * np.pi * a[2]
    return float(S)


def _apply_flat_operator(theta, a):
    """G[gamma] at the nodes for a mode vector (flat-plate kernel)."""
    m = np.arange(1, len(a))
    return -0.5 * a[0] + 0.5 * (np.cos(np.outer(theta, m)) @ a[1:])


def _mode_cauchy_transform(a, zeta):
    """int gamma(xi')/(xi' - zeta) dxi' for the mode vector, off the cut."""
    zeta = np.asarray(zeta, dtype=complex)
    rho = joukowski_rho(zeta)
    # Horner-style evaluation of sum_m a_m (-rho)^m, cheaper than powers
    base = -rho
    acc = np.zeros_like(rho)
    for coef in a[:0:-1]:
        acc = (acc + coef) * base
    sin_part = np.pi * acc
    cot_part = a[0] * np.pi * (np.sqrt(zeta - 1.0) / np.sqrt(zeta + 1.0) - 1.0)
    return cot_part + sin_part


@dataclasses.dataclass
class BoundSheet:
    """Bound vorticity split on cosine-clustered collocation labels."""
    theta: np.ndarray
    xi: np.ndarray
    z: np.ndarray               # collocation positions, complex
    z_xi: np.ndarray
    a0: np.ndarray              # quasi-steady mode vector
    a1: np.ndarray              # wake-correction mode vector
    t: float

    @property
    def gamma0(self):
        return _gamma_values(self.theta, self.a0)

    @property
    def gamma1(self):
        return _gamma_values(self.theta, self.a1)

    @property
    def circulation0(self):
        return _gamma_circulation(self.a0)

    @property
    def circulation1(self):
        return _gamma_circulation(self.a1)


class WakeSheet:
    """Ordered free vortex elements; circulations are immutable once shed."""

    def __init__(self):
        self._z = np.empty(0, dtype=complex)
        self._dG = np.empty(0, dtype=float)
        self._label = np.empty(0, dtype=float)
        self._t_shed = np.empty(0, dtype=float)

    def __len__(self):
        return len(self._dG)

    def append(self, z, dG, label, t_shed):
        if len(self._label) and label <= self._label[-1]:
            raise DomainError("wake labels must increase with shed order")
        self._z = np.append(self._z, complex(z))
        self._dG = np.append(self._dG, float(dG))
        self._label = np.append(self._label, float(label))
        self._t_shed = np.append(self._t_shed, float(t_shed))

    @property
    def positions(self):
        return self._z

    @positions.setter
    def positions(self, new_z):
        if new_z.shape != self._z.shape:
            raise DomainError("advection cannot change the element count")
        self._z = np.asarray(new_z, dtype=complex)

    @property
    def circulations(self):
        view = self._dG.view()
        view.setflags(write=False)
        return view

    @property
    def labels(self):
        view = self._label.view()
        view.setflags(write=False)
        return view

    @property
    def shed_times(self):
        view = self._t_shed.view()
        view.setflags(write=False)
        return view

    @property
    def total_circulation(self):
        return float(np.sum(self._dG))


@dataclasses.dataclass
class SolverState:
    wing: WingShapeFunction
    dt: float
    n_modes: int
    delta_blob: float
    rho: float
    first_step_subcycles: int
    t: float = 0.0
    step_count: int = 0
    bound: BoundSheet | None = None
    wake: WakeSheet = dataclasses.field(default_factory=WakeSheet)
    ledger: list = dataclasses.field(default_factory=list)
    impulse_times: list = dataclasses.field(default_factory=list)
    impulse_linear: list = dataclasses.field(default_factory=list)
    impulse_angular: list = dataclasses.field(default_factory=list)
    _warned_close_wake: bool = False

    @property
    def kelvin_residual(self):
        if self.bound is None:
            return 0.0
        return abs(self.bound.circulation0 + self.bound.circulation1
                   + self.wake.total_circulation)


def new_simulation(wing: WingShapeFunction, dt: float, n_modes: int = 64,
                   delta_blob: float | None = None, rho: float = 1.0,
                   first_step_subcycles: int = 10) -> SolverState:
    """Fresh solver state at t = 0 (fluid at rest, empty wake)."""
    if dt <= 0:
        raise DomainError("time step must be positive")
    if delta_blob is None:
        delta_blob = 0.05 * wing.chord
    state = SolverState(wing=wing, dt=float(dt), n_modes=int(n_modes),
                        delta_blob=float(delta_blob), rho=float(rho),
                        first_step_subcycles=int(first_step_subcycles))
    state.bound = _solve_bound(state, 0.0)
    _record_impulse(state)
    return state


# ----------------------------------------------------------------------
# geometry / kinematics at the collocation nodes

def _collocation(wing, n):
    j = np.arange(1, n + 1)
    theta = (2.0 * j - 1.0) * np.pi / (2.0 * n)
    xi = -np.cos(theta)
    return theta, xi


def _wing_is_flat(wing):
    return isinstance(wing, RigidWingMotion)


def _normal_velocity(wing, xi, t):
    W = np.asarray(wing.W(xi, t), dtype=complex)
    z_xi = np.asarray(wing.Z_xi(xi, t), dtype=complex)
    return -np.imag(W * z_xi)


# ----------------------------------------------------------------------
# quasi-steady solve (including camber kernel)

def _camber_kernel_matrix(wing, theta, xi, z, z_xi, t):
    """K[gamma](xi_i) = (1/2pi) int g(xi', xi_i) gamma(xi')/(xi'-xi_i) dxi'
    as a matrix acting on node values of gamma (midpoint theta rule)."""
    n = len(xi)
    dz = z[None, :] - z[:, None]                     # Z(xi') - Z(xi)
    dxi = xi[None, :] - xi[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.real(z_xi[:, None] * dxi / dz) - 1.0
        ker = g / dxi
    # diagonal: limit -Re(Z_xixi / 2 Z_xi), curvature by finite difference
    h = 1e-5
    xi_p = np.clip(xi + h, -1.0, 1.0)
    xi_m = np.clip(xi - h, -1.0, 1.0)
    z_xixi = (np.asarray(wing.Z_xi(xi_p, t)) - np.asarray(wing.Z_xi(xi_m, t))) \
        / (xi_p - xi_m)
    np.fill_diagonal(ker, -np.real(z_xixi / (2.0 * z_xi)))
    w_theta = np.pi / n
    return ker * (np.sin(theta)[None, :] * w_theta) / (2.0 * np.pi)


def _solve_bound_modes(wing, theta, xi, z, z_xi, t, target_vn,
                       tol=1e-9, relax=0.8, max_iter=80):
    """Mode vector with G[gamma] + K[gamma] = target_vn, smooth at the
    trailing edge.  Flat wings solve in one transform (K = 0)."""
    if _wing_is_flat(wing):
        return _kutta_modes_from_normal_velocity(theta, target_vn)
    kmat = _camber_kernel_matrix(wing, theta, xi, z, z_xi, t)
    a = _kutta_modes_from_normal_velocity(theta, target_vn)
    history = []
    for _ in range(max_iter):
        vals = _gamma_values(theta, a)
        correction = kmat @ vals
        a_new = _kutta_modes_from_normal_velocity(theta, target_vn - correction)
        a = (1.0 - relax) * a + relax * a_new
        vals = _gamma_values(theta, a)
        resid = float(np.max(np.abs(
            _apply_flat_operator(theta, a) + kmat @ vals - target_vn)))
        history.append(resid)
        if resid < tol:
            return a
        if len(history) > 6 and resid > 10.0 * history[0]:
            break
    # damped retry before giving up
    if relax > 0.3:
        try:
            return _solve_bound_modes(wing, theta, xi, z, z_xi, t, target_vn,
                                      tol=tol, relax=0.5 * relax,
                                      max_iter=2 * max_iter)
        except ConvergenceError as err:
            history = history + err.history
    raise ConvergenceError(
        f"camber iteration stalled at residual {history[-1]:.3e}",
        history=history)


def solve_quasisteady(state_or_wing, t: float, n_modes: int = 64,
                      tol: float = 1e-9) -> BoundSheet:
    """Quasi-steady bound sheet of the prescribed motion at time t with the
    trailing-edge-smooth solution class (wake ignored, time a parameter)."""
    wing = state_or_wing.wing if isinstance(state_or_wing, SolverState) \
        else state_or_wing
    if isinstance(state_or_wing, SolverState):
        n_modes = state_or_wing.n_modes
    theta, xi = _collocation(wing, n_modes)
    z = np.asarray(wing.Z(xi, t), dtype=complex)
    z_xi = np.asarray(wing.Z_xi(xi, t), dtype=complex)
    vn = _normal_velocity(wing, xi, t)
    a0 = _solve_bound_modes(wing, theta, xi, z, z_xi, t, vn, tol=tol)
    return BoundSheet(theta=theta, xi=xi, z=z, z_xi=z_xi, a0=a0,
                      a1=np.zeros_like(a0), t=t)


def _solve_bound(state, t):
    return solve_quasisteady(state, t)


# ----------------------------------------------------------------------
# induced velocities

def _pairwise_conj_velocity(targets, src_z, src_dG, delta,
                            self_exclude: bool = False):
    """w = u - iv at ``targets`` from point vortices with blob smoothing,
    in float components for speed.  With ``self_exclude`` the k-th target
    ignores the k-th source (targets and sources are then the same set)."""
    tx, ty = np.real(targets), np.imag(targets)
    sx, sy = np.real(src_z), np.imag(src_z)
    n_t = len(tx)
    u = np.empty(n_t)
    v = np.empty(n_t)
    chunk = max(16, int(4_000_000 / max(len(src_dG), 1)))
    for i0 in range(0, n_t, chunk):
        i1 = min(i0 + chunk, n_t)
        dx = sx[None, :] - tx[i0:i1, None]
        dy = sy[None, :] - ty[i0:i1, None]
        denom = dx * dx + dy * dy + delta * delta
        if self_exclude:
            rows = np.arange(i0, i1)
            denom[rows - i0, rows] = np.inf
        np.divide(dx, denom, out=dx)
        np.divide(dy, denom, out=dy)
        u[i0:i1] = dx @ src_dG
        v[i0:i1] = dy @ src_dG
    # 1/(2 pi i) * (dx - i dy) = (-dy - i dx) / (2 pi)
    return (-v - 1j * u) / (2.0 * np.pi)


def _wake_velocity_at(points, wake_z, wake_dG, delta):
    """w = u - iv at ``points`` from wake elements with blob smoothing."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    if len(wake_dG) == 0:
        out = np.zeros(pts.shape, dtype=complex)
        return out if np.ndim(points) else out[0]
    out = _pairwise_conj_velocity(pts, wake_z, wake_dG, delta)
    return out if np.ndim(points) else out[0]


def _bound_velocity_at(state, bound, points, exclude_blob=False):
    """w = u - iv at field points from the bound sheet gamma_0 + gamma_1."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    a = bound.a0 + bound.a1
    wing = state.wing
    if _wing_is_flat(wing):
        th, th_rate = wing.pitch(bound.t)
        zc, _ = wing.translation(bound.t)
        rot = np.exp(1j * th)
        zeta = (pts - zc) / rot + wing.pivot
        val = _mode_cauchy_transform(a, zeta) / (2.0j * np.pi) / rot
        return val if np.ndim(points) else val[0]
    # curved wing: midpoint quadrature over the sheet
    gam = _gamma_values(bound.theta, a)
    w_theta = np.pi / len(bound.theta)
    weights = gam * np.sin(bound.theta) * w_theta
    dz = bound.z[None, :] - pts[:, None]
    val = (1.0 / dz) @ weights / (2.0j * np.pi)
    return val if np.ndim(points) else val[0]


def induced_velocity(state: SolverState, z):
    """Total complex velocity w = u - i v at ``z`` from bound and wake
    vorticity; wake points within the blob radius are smoothed, never
    singular."""
    if state.bound is None:
        return 0.0j
    return (_bound_velocity_at(state, state.bound, z)
            + _wake_velocity_at(z, state.wake.positions,
                                state.wake.circulations, state.delta_blob))


def wake_velocity_probe(state: SolverState, z):
    """Velocity at a fixed probe point (same field as induced_velocity;
    provided as the probe-series building block)."""
    return induced_velocity(state, z)


# ----------------------------------------------------------------------
# time marching

def _unit_vortex_normal_velocity(z_v, bound, delta=0.0):
    dz = z_v - bound.z
    denom = np.abs(dz) ** 2 + delta ** 2
    w = np.conj(dz) / denom / (2.0j * np.pi)
    return -np.imag(w * bound.z_xi)


def _unit_segment_normal_velocity(z_a, z_b, bound):
    """Normal velocity on the plate from unit circulation spread uniformly
    along the straight segment z_a -> z_b (the nascent wake sheet).

    Lumping the fresh sheet at a point under-weights the square-root
    trailing-edge kernel by a step-size-independent factor, so the shed
    strength is always sized with this sheet form.
    """
    span = z_b - z_a
    if abs(span) < 1e-14:
        return _unit_vortex_normal_velocity(0.5 * (z_a + z_b), bound)
    w = np.log((z_b - bound.z) / (z_a - bound.z)) / (2.0j * np.pi * span)
    return -np.imag(w * bound.z_xi)


def _near_wake_sheet_normal_velocity(z_near, dG_near, te, bound):
    """Plate-normal velocity of the youngest wake elements treated as a
    piecewise-uniform sheet: each element's circulation spreads over the
    segment between the midpoints to its neighbours, the youngest segment
    ending at the trailing edge."""
    k = len(z_near)
    edges = _near_wake_edges(z_near, te)
    out = np.zeros(len(bound.z))
    for j in range(k):
        out += dG_near[j] * _unit_segment_normal_velocity(
            edges[j + 1], edges[j], bound)
    return out


def _near_wake_edges(z_near, te):
    """Segment edges of the near-wake sheet reconstruction, oldest first,
    closing on the trailing edge."""
    k = len(z_near)
    edges = np.empty(k + 1, dtype=complex)
    edges[0] = z_near[0] + 0.5 * (z_near[0] - z_near[1]) if k > 1 else \
        z_near[0] + (z_near[0] - te)
    if k > 1:
        edges[1:-1] = 0.5 * (z_near[:-1] + z_near[1:])
    edges[-1] = te
    return edges


# --- exact trailing-edge-smooth response circulations (flat wings) ----
#
# A unit vortex at flat-map position zeta induces a bound response of
# circulation g(zeta) = Re{(zeta+1)/sqrt(zeta^2-1) - 1}; for a uniform
# unit segment the average has antiderivative
# B(zeta) = sqrt(zeta^2-1) + log(zeta + sqrt(zeta^2-1)) - zeta,
# the same function that integrates the linear wake kernel.  Using these
# closed forms keeps the shedding strength exact however close the young
# sheet sits to the trailing edge, where collocation cannot resolve it.

def _response_circulation_points(zeta):
    root = sqrt_cut(zeta)
    return np.real((zeta + 1.0) / root - 1.0)


def _response_antiderivative(zeta):
    root = sqrt_cut(zeta)
    return root + np.log(zeta + root) - zeta


def _response_circulation_segment(z_a, z_b):
    span = z_b - z_a
    if abs(span) < 1e-14:
        return float(_response_circulation_points(
            np.asarray(0.5 * (z_a + z_b), dtype=complex)))
    val = (_response_antiderivative(np.asarray(z_b, dtype=complex))
           - _response_antiderivative(np.asarray(z_a, dtype=complex))) / span
    return float(np.real(val))


def _retarget_circulation(a, target):
    """Shift the cot-mode coefficient so the mode vector carries exactly
    the closed-form response circulation (the collocation basis cannot
    resolve sources hugging the trailing edge)."""
    out = a.copy()
    out[0] += (target - _gamma_circulation(a)) / np.pi
    return out


def _record_impulse(state):
    bound = state.bound
    a = bound.a0 + bound.a1
    wing = state.wing
    if _wing_is_flat(wing):
        th, _ = wing.pitch(bound.t)
        zc, _ = wing.translation(bound.t)
        rot = np.exp(1j * th)
        S0 = _gamma_circulation(a)
        S1 = _gamma_first_moment(a)
        I_b = zc * S0 + rot * (S1 - wing.pivot * S0)
        # second moment int gamma |Z|^2: |Z|^2 = |zc|^2 + 2 Re(conj(zc) rot (xi-p)) + (xi-p)^2
        S2 = _gamma_second_moment(a)
        p = wing.pivot
        int_xi2 = S2 - 2.0 * p * S1 + p * p * S0
        A_b = (abs(zc) ** 2 * S0
               + 2.0 * np.real(np.conj(zc) * rot * (S1 - p * S0))
               + int_xi2)
    else:
        gam = _gamma_values(bound.theta, a)
        w_theta = np.pi / len(bound.theta)
        wts = gam * np.sin(bound.theta) * w_theta
        I_b = np.sum(wts * bound.z)
        A_b = np.sum(wts * np.abs(bound.z) ** 2)
    wz = state.wake.positions
    wG = state.wake.circulations
    I = I_b + np.sum(wG * wz)
    A = A_b + np.sum(wG * np.abs(wz) ** 2)
    state.impulse_times.append(state.t)
    state.impulse_linear.append(complex(I))
    state.impulse_angular.append(float(A))


def _gamma_second_moment(a):
    """int gamma xi^2 dxi: the cot mode contributes pi/2 and the sine
    modes couple only to m = 1, 3 through
    sin(t) cos^2(t) = sin(t)/4 + sin(3t)/4."""
    S = 0.5 * np.pi * a[0]
    if len(a) > 1:
        S += 0.125 * np.pi * a[1]
    if len(a) > 3:
        S += 0.125 * np.pi * a[3]
    return float(S)


def _advect(state, dt, skip_last):
    wake = state.wake
    k = len(wake)
    n_move = k - (1 if skip_last else 0)
    if n_move <= 0:
        return
    z_all = wake.positions
    dG = wake.circulations
    bound = state.bound

    def velocity(positions_moving):
        z_full = z_all.copy()
        z_full[:n_move] = positions_moving
        conj_v = _pairwise_conj_velocity(z_full, z_full, dG,
                                         state.delta_blob, self_exclude=True)
        conj_v = conj_v[:n_move]
        conj_v += _bound_velocity_at(state, bound, positions_moving)
        return np.conj(conj_v)   # d z / dt = u + i v

    z0 = z_all[:n_move]
    v1 = velocity(z0)
    zh = z0 + 0.5 * dt * v1
    v2 = velocity(zh)
    new = z_all.copy()
    new[:n_move] = z0 + dt * v2
    wake.positions = new


def _advance(state, dt):
    wing = state.wing
    t_old = state.t
    t_new = t_old + dt
    te_old = complex(wing.Z(1.0, t_old))
    te_new = complex(wing.Z(1.0, t_new))

    # (1) geometry advances, (2) quasi-steady bound sheet
    bound = _solve_bound(state, t_new)

    # resting wing with no history: nothing to shed or move
    vn = _normal_velocity(wing, bound.xi, t_new)
    if (len(state.wake) == 0 and np.max(np.abs(vn)) < 1e-14
            and abs(te_new - te_old) < 1e-14):
        state.bound = bound
        state.t = t_new
        state.step_count += 1
        _record_impulse(state)
        state.ledger.append((bound.circulation0, 0.0, 0.0))
        return state

    # (3) wake-induced normal velocity and its bound cancellation; inside
    # the square-root edge-kernel zone the young sheet is reconstructed
    # from the elements as uniform segments, points lump it only once the
    # kernel has flattened out
    flat = _wing_is_flat(wing)
    if flat:
        th_new, _ = wing.pitch(t_new)
        zc_new, _ = wing.translation(t_new)

        def to_map(z):
            return ((np.asarray(z, dtype=complex) - zc_new)
                    * np.exp(-1j * th_new) + wing.pivot)

    wz, wG = state.wake.positions, state.wake.circulations
    n_wake = len(state.wake)
    if n_wake:
        zone = 0.25 * wing.chord
        n_sheet = 0
        for d in np.abs(wz[::-1] - te_new):
            if d > zone or n_sheet >= 400:
                break
            n_sheet += 1
        n_sheet = max(n_sheet, 1)
        far_z, far_G = wz[:n_wake - n_sheet], wG[:n_wake - n_sheet]
        near_z, near_G = wz[n_wake - n_sheet:], wG[n_wake - n_sheet:]
        # the established sheet ends where the edge released it last step
        edges = _near_wake_edges(near_z, te_old)
        w_on_plate = _wake_velocity_at(bound.z, far_z, far_G, 0.0)
        vn_wake = -np.imag(w_on_plate * bound.z_xi)
        for j in range(n_sheet):
            vn_wake = vn_wake + near_G[j] * _unit_segment_normal_velocity(
                edges[j + 1], edges[j], bound)
    else:
        vn_wake = np.zeros_like(bound.xi)
    a1_base = _solve_bound_modes(wing, bound.theta, bound.xi, bound.z,
                                 bound.z_xi, t_new, -vn_wake)
    if flat and n_wake:
        # pin the response circulation to its closed form; collocation
        # cannot resolve the sheet right at the edge
        g_exact = 0.0
        if len(far_G):
            g_exact += float(far_G @ _response_circulation_points(to_map(far_z)))
        edges_m = to_map(edges)
        for j in range(n_sheet):
            g_exact += near_G[j] * _response_circulation_segment(
                edges_m[j + 1], edges_m[j])
        a1_base = _retarget_circulation(a1_base, g_exact)

    # (4) one new element at the midpoint of the trailing-edge travel,
    # strength from the circulation ledger (never a local extrapolation);
    # its bound response is that of the nascent sheet along the edge path
    z_shed = 0.5 * (te_old + te_new)
    vn_unit = _unit_segment_normal_velocity(te_new, te_old, bound)
    a1_unit = _solve_bound_modes(wing, bound.theta, bound.xi, bound.z,
                                 bound.z_xi, t_new, -vn_unit)
    if flat:
        a1_unit = _retarget_circulation(
            a1_unit,
            _response_circulation_segment(to_map(te_new), to_map(te_old)))
    G0 = _gamma_circulation(bound.a0)
    G1_base = _gamma_circulation(a1_base)
    G1_unit = _gamma_circulation(a1_unit)
    Gw_old = state.wake.total_circulation
    dG = -(G0 + G1_base + Gw_old) / (1.0 + G1_unit)
    bound.a1 = a1_base + dG * a1_unit

    # labels grow with the trailing-edge arc travelled, a wake coordinate
    label = (state.wake.labels[-1] + abs(te_new - te_old) + 1e-12
             if len(state.wake) else 1.0 + 0.5 * abs(te_new - te_old))
    state.wake.append(z_shed, dG, label, t_new)

    ledger = (G0, _gamma_circulation(bound.a1), state.wake.total_circulation)
    state.ledger.append(ledger)
    if abs(sum(ledger)) > KELVIN_TOL:
        raise LedgerFault(
            f"circulation ledger violated: {sum(ledger):.3e} at t={t_new}")

    # (5) advect the established wake with the refreshed flow field;
    # the just-shed element's in-step motion is its placement convention
    state.bound = bound
    _advect(state, dt, skip_last=True)

    # self-intersection diagnostic: settled wake elements (the freshly
    # shed ones legitimately hug the trailing edge) grazing the surface
    if not state._warned_close_wake and len(state.wake) > 20:
        settled = state.wake.positions[:-15]
        d_plate = np.min(np.abs(settled[:, None] - bound.z[None, :]))
        if d_plate < 0.05 * state.delta_blob:
            warnings.warn("wake sheet grazes the wing surface; geometry may "
                          "be self-intersecting", stacklevel=2)
            state._warned_close_wake = True

    state.t = t_new
    state.step_count += 1
    _record_impulse(state)
    return state


def march_step(state: SolverState):
    """Advance one nominal step; the very first step is sub-cycled to pin
    down the starting vortex."""
    if state.step_count == 0 and state.first_step_subcycles > 1:
        sub = state.first_step_subcycles
        for _ in range(sub):
            _advance(state, state.dt / sub)
        state.step_count = 1
        return state
    _advance(state, state.dt)
    return state


# ----------------------------------------------------------------------
# forces from the vortex impulse

def force_history(state: SolverState):
    """Arrays (t, F_x, F_z, torque_origin) by centred differencing of the
    vortex impulse sum Gamma_k Z_k over bound and wake; needs at least two
    completed steps.

    Signs follow the tangential-jump density convention and are anchored
    to the steady thin-airfoil limit: positive F_z is lift toward +z,
    torque is positive counterclockwise about the origin.
    """
    if len(state.impulse_times) < 3:
        raise NotReadyError("need at least 2 completed steps for forces")
    t = np.asarray(state.impulse_times)
    I = np.asarray(state.impulse_linear)
    A = np.asarray(state.impulse_angular)
    dI = np.gradient(I, t)
    dA = np.gradient(A, t)
    F = 1j * state.rho * dI
    torque = 0.5 * state.rho * dA
    return t, np.real(F), np.imag(F), torque


def forces_impulse(state: SolverState):
    """(F_x, F_z, torque-about-origin) at the most recent interior sample."""
    t, fx, fz, tq = force_history(state)
    return float(fx[-2]), float(fz[-2]), float(tq[-2])


# ----------------------------------------------------------------------
# Wagner's linear integral equation (the independent oracle)

def wagner_kernel(x):
    """sqrt((x+1)/(x-1)), the linear wake-influence weight."""
    x = np.asarray(x, dtype=float)
    return np.sqrt((x + 1.0) / (x - 1.0))


def _kernel_antiderivative(x):
    # int sqrt((x+1)/(x-1)) dx = sqrt(x^2-1) + arccosh(x)
    x = np.asarray(x, dtype=float)
    r = np.sqrt(np.maximum(x * x - 1.0, 0.0))
    return r + np.log(np.maximum(x + r, 1.0))


@dataclasses.dataclass
class WagnerSolution:
    times: np.ndarray
    sigma: np.ndarray        # shed-history density gamma_w(tau) at birth
    U: float
    gamma0: np.ndarray       # quasi-steady circulation history

    def x_front(self, t):
        """Reach of the starting vortex."""
        return 1.0 + self.U * t

    def gamma_w(self, x, t):
        """Wake density at body-frame station x at time t (frozen since
        shedding)."""
        x = np.asarray(x, dtype=float)
        tau = t - (x - 1.0) / self.U
        out = np.interp(tau, self.times, self.sigma, left=0.0, right=np.nan)
        return np.where((x >= 1.0) & (tau >= 0.0), out, 0.0)

    def net_wake_circulation(self, upto=None):
        """int gamma_w dx over the whole wake at each solved time."""
        dt = np.diff(self.times, prepend=0.0)
        cum = np.cumsum(self.sigma * self.U * dt)
        if upto is None:
            return cum
        return np.interp(upto, self.times, cum)

    def residual(self, k):
        """Integral-equation residual at solved step k (diagnostic)."""
        t = self.times[k]
        edges = 1.0 + self.U * (t - np.concatenate(([0.0], self.times[:k + 1])))
        A = _kernel_antiderivative(edges)
        w = A[:-1] - A[1:]
        return float(self.gamma0[k] + np.sum(w * self.sigma[:k + 1]))


def wagner_solve(gamma0_of_t, U: float, t_end: float, dt: float) -> WagnerSolution:
    """March the linear wake equation

        Gamma_0(t) + int_1^{1+Ut} sqrt((x+1)/(x-1)) gamma_w(x, t) dx = 0

    for the shed density, treating it as piecewise constant per step and
    integrating the kernel exactly over each slice (the integrable edge
    singularity is what keeps the small-time solve well conditioned).
    """
    if U <= 0 or dt <= 0:
        raise DomainError("wagner solve needs positive U and dt")
    times = np.arange(dt, t_end + 0.5 * dt, dt)
    n = len(times)
    sigma = np.zeros(n)
    g0 = np.asarray([float(gamma0_of_t(tk)) for tk in times])
    shed_edges = np.concatenate(([0.0], times))
    for k in range(n):
        t = times[k]
        edges = 1.0 + U * (t - shed_edges[:k + 2])
        A = _kernel_antiderivative(edges)
        w = A[:-1] - A[1:]          # weight of each shed slice, oldest first
        rhs = -g0[k] - np.sum(w[:k] * sigma[:k])
        sigma[k] = rhs / w[k]
    return WagnerSolution(times=times, sigma=sigma, U=U, gamma0=g0)


# ----------------------------------------------------------------------
# wake post-processing

def shed_vortex_centroids(state: SolverState, min_fraction: float = 0.05):
    """Cluster wake elements into shed vortices: maximal runs of equal
    circulation sign in shed order, each reduced to its strength-weighted
    centroid.  Runs weaker than ``min_fraction`` of the strongest are
    dropped as startup noise.  Returns (centroids, strengths) in shed
    order."""
    dG = state.wake.circulations
    z = state.wake.positions
    if len(dG) == 0:
        return np.empty(0, dtype=complex), np.empty(0)
    signs = np.sign(dG)
    runs = []
    start = 0
    for i in range(1, len(dG) + 1):
        if i == len(dG) or (signs[i] != signs[i - 1] and signs[i] != 0):
            runs.append((start, i))
            start = i
    cents, strengths = [], []
    for i0, i1 in runs:
        g = dG[i0:i1]
        tot = np.sum(g)
        wsum = np.sum(np.abs(g))
        if wsum == 0.0:
            continue
        cents.append(np.sum(np.abs(g) * z[i0:i1]) / wsum)
        strengths.append(tot)
    cents = np.asarray(cents, dtype=complex)
    strengths = np.asarray(strengths)
    if len(strengths) == 0:
        return cents, strengths
    keep = np.abs(strengths) >= min_fraction * np.max(np.abs(strengths))
    return cents[keep], strengths[keep]


def street_pair_spacing(state: SolverState, pair_index: int = 2):
    """Distance between the two vortex centers of the ``pair_index``-th
    counter-rotating pair (1-based) of the shed street."""
    cents, strengths = shed_vortex_centroids(state)
    i0 = 2 * (pair_index - 1)
    if len(cents) < i0 + 2:
        raise NotReadyError(
            f"only {len(cents)} shed vortices; pair {pair_index} not formed")
    return float(abs(cents[i0 + 1] - cents[i0]))


# ----------------------------------------------------------------------
# simulation driver

@dataclasses.dataclass
class SimulationResult:
    state: SolverState
    times: np.ndarray
    forces: np.ndarray           # columns F_x, F_z, torque
    probe_points: list
    probe_series: np.ndarray     # complex w = u - iv, shape (n_probe, n_t)
    kelvin_history: np.ndarray
    snapshots: list              # (t, labels, z, dG) tuples

    @property
    def kelvin_max(self):
        return float(np.max(self.kelvin_history)) if len(self.kelvin_history) else 0.0


def run_simulation(wing, dt, steps, n_modes=64, delta_blob=None, rho=1.0,
                   first_step_subcycles=10, probes=(), probe_frame=None,
                   snapshot_stride=0) -> SimulationResult:
    """March ``steps`` steps, recording forces, probe velocities and the
    per-step circulation-ledger residual.

    ``probes`` are points fixed in the frame translating with the wing's
    mean motion when ``probe_frame`` is a callable t -> complex offset
    (defaults to the wing translation), i.e. the wind-tunnel arrangement.
    """
    state = new_simulation(wing, dt, n_modes=n_modes, delta_blob=delta_blob,
                           rho=rho, first_step_subcycles=first_step_subcycles)
    if probe_frame is None and isinstance(wing, RigidWingMotion):
        def probe_frame(t):
            return complex(np.real(wing.translation(t)[0]))
    times, kelvin, probe_rows, snaps = [], [], [], []
    for _ in range(steps):
        march_step(state)
        times.append(state.t)
        kelvin.append(state.kelvin_residual)
        if probes:
            offset = probe_frame(state.t) if probe_frame else 0.0
            pts = np.asarray(probes, dtype=complex) + offset
            probe_rows.append(_probe_all(state, pts))
        if snapshot_stride and state.step_count % snapshot_stride == 0:
            snaps.append((state.t, state.wake.labels.copy(),
                          state.wake.positions.copy(),
                          state.wake.circulations.copy()))
    t_f, fx, fz, tq = force_history(state)
    forces = np.column_stack([np.interp(times, t_f, fx),
                              np.interp(times, t_f, fz),
                              np.interp(times, t_f, tq)])
    probe_series = (np.asarray(probe_rows, dtype=complex).T
                    if probe_rows else np.empty((len(probes), 0), dtype=complex))
    return SimulationResult(state=state, times=np.asarray(times),
                            forces=forces, probe_points=list(probes),
                            probe_series=probe_series,
                            kelvin_history=np.asarray(kelvin),
                            snapshots=snaps)


def _probe_all(state, pts):
    return (_bound_velocity_at(state, state.bound, pts)
            + _wake_velocity_at(pts, state.wake.positions,
                                state.wake.circulations, state.delta_blob))
