"""Reactive slender-body swimming mechanics.

At each longitudinal station x the cross flow is a 2D problem with added
mass m(x) = beta rho pi b(x)^2.  The transport operator is
D = d/dt + U d/dx; the specific lift (lateral force per unit length on
the body) is the negative material rate of change of the sectional fluid
momentum, dispatched by body-section regime:

    anterior / ribbon          L = -D(m W)
    trailing side edge         L = -m DW          (side fins shed sheets
                                                   that freeze the gap)
    behind an abrupt fin edge  L = -D(m W + mt(x) w(x_s, tau)),
                               tau = t - (x - x_s)/U the retarded time.

Power, wake-energy rate and thrust follow from the three motion-weighted
integrals of L; their instantaneous identity P = E + T U is algebraic in
the integrands, so it holds to round-off for any quadrature.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import singular_kernels as sk
from .errors import DomainError, NotYetShedError, SequencingError
from .kinematics import Backbone, MotionSpec, eval_plate_motion

__all__ = [
    "BodyPlanform", "ribbon_planform", "tapered_planform", "table_planform",
    "SectionLoad", "PerformanceRecord",
    "transverse_velocity", "section_lift", "instantaneous_PET",
    "mean_performance", "bound_vortex_sheet", "SheetStrength",
    "circulation", "reactive_force", "caudal_superposition", "CaudalFlow",
    "edge_graded_nodes",
]


# ----------------------------------------------------------------------
# planform

class BodyPlanform:
    """Half-depth profile b(x) with section markers and the added mass.

    ``half_depth`` and ``half_depth_dx`` are callables on (0, length).
    Markers: x_e is the widest section, x_s an optional abrupt fin
    trailing edge, x_c the caudal peduncle; 0 < x_e <= x_s < x_c < length
    whenever present.  ``added_mass_factor`` is the thickness correction
    (near 1 for real cross-sections).
    """

    def __init__(self, length, half_depth, half_depth_dx, *, x_e=None,
                 x_s=None, x_c=None, added_mass_factor: float = 1.0,
                 density: float = 1.0, fin_wake_added_mass=None):
        if length <= 0:
            raise DomainError("length must be positive")
        self.length = float(length)
        self.b = half_depth
        self.b_dx = half_depth_dx
        self.x_e = None if x_e is None else float(x_e)
        self.x_s = None if x_s is None else float(x_s)
        self.x_c = None if x_c is None else float(x_c)
        self.beta_m = float(added_mass_factor)
        self.rho = float(density)
        self._fin_wake_added_mass = fin_wake_added_mass
        self._validate()

    def _validate(self):
        markers = [m for m in (self.x_e, self.x_s, self.x_c) if m is not None]
        if markers != sorted(markers):
            raise DomainError("markers must be ordered x_e <= x_s < x_c")
        if self.x_s is not None and (self.x_e is None or self.x_c is None):
            raise DomainError("an abrupt fin edge needs both x_e and x_c")
        if self.x_c is not None and not (0.0 < self.x_c < self.length):
            raise DomainError("x_c must lie inside the body")
        xs = np.linspace(1e-6 * self.length, self.length * (1 - 1e-6), 257)
        if np.any(np.asarray(self.b(xs)) <= 0.0):
            raise DomainError("half depth must be positive on (0, length)")

    def mass(self, x):
        """Added mass per unit length m(x) = beta rho pi b^2."""
        return self.beta_m * self.rho * np.pi * np.asarray(self.b(x)) ** 2

    def mass_dx(self, x):
        return (2.0 * self.beta_m * self.rho * np.pi
                * np.asarray(self.b(x)) * np.asarray(self.b_dx(x)))

    def fin_wake_added_mass(self, x):
        """mt(x): added mass of the frozen wake segment behind an abrupt
        fin edge.  Default is the gap-filling form rho pi (b_s^2 - b^2)
        with b_s the half depth at the shedding edge."""
        if self.x_s is None:
            raise DomainError("planform has no abrupt fin edge")
        if self._fin_wake_added_mass is not None:
            return self._fin_wake_added_mass(x)
        b_s = float(self.b(self.x_s))
        return self.rho * np.pi * (b_s ** 2 - np.asarray(self.b(x)) ** 2)

    def fin_wake_added_mass_dx(self, x):
        if self._fin_wake_added_mass is not None:
            d = 1e-6 * self.length
            return ((self.fin_wake_added_mass(x + d)
                     - self.fin_wake_added_mass(x - d)) / (2 * d))
        return -2.0 * self.rho * np.pi * np.asarray(self.b(x)) * np.asarray(self.b_dx(x))

    def regime(self, x) -> str:
        if not 0.0 < x < self.length:
            raise DomainError(f"x = {x} outside the body (0, {self.length})")
        if self.x_e is None:
            return "ribbon"
        if x < self.x_e:
            return "anterior"
        if self.x_c is not None and x > self.x_c:
            return "caudal"
        if self.x_s is not None and x > self.x_s:
            return "abrupt-fin-wake"
        return "trailing-side-edge"


def ribbon_planform(half_depth: float, length: float, *, density: float = 1.0,
                    added_mass_factor: float = 1.0) -> BodyPlanform:
    """Constant-width ribbon plate."""
    b0 = float(half_depth)
    return BodyPlanform(length,
                        lambda x: np.full_like(np.asarray(x, dtype=float), b0),
                        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        density=density, added_mass_factor=added_mass_factor)


def tapered_planform(b_max: float, length: float, *, x_e=None, x_s=None,
                     x_c=None, density: float = 1.0,
                     added_mass_factor: float = 1.0) -> BodyPlanform:
    """Smooth fish-like profile b = b_max sin(pi x / length)^p-style shape
    peaking at x_e (default mid-body): b = b_max * sin(pi/2 * x/x_e) for
    x < x_e and a smooth cosine taper beyond."""
    x_e = float(x_e if x_e is not None else 0.45 * length)
    x_tail = float(x_c if x_c is not None else length)

    def b(x):
        x = np.asarray(x, dtype=float)
        rise = np.sin(0.5 * np.pi * np.clip(x / x_e, 0.0, 1.0))
        fall = 0.55 + 0.45 * np.cos(np.pi * np.clip((x - x_e) / (length - x_e), 0.0, 1.0))
        return b_max * np.where(x <= x_e, rise, fall)

    def b_dx(x):
        x = np.asarray(x, dtype=float)
        rise = (0.5 * np.pi / x_e) * np.cos(0.5 * np.pi * np.clip(x / x_e, 0.0, 1.0))
        fall = -0.45 * (np.pi / (length - x_e)) * np.sin(
            np.pi * np.clip((x - x_e) / (length - x_e), 0.0, 1.0))
        return b_max * np.where(x <= x_e, rise, fall)

    return BodyPlanform(length, b, b_dx, x_e=x_e, x_s=x_s, x_c=x_c,
                        density=density, added_mass_factor=added_mass_factor)


def _pchip_slopes(x, y):
    """Fritsch-Carlson monotone cubic slopes."""
    h = np.diff(x)
    delta = np.diff(y) / h
    d = np.zeros_like(y)
    d[1:-1] = np.where(delta[:-1] * delta[1:] > 0,
                       2.0 / (1.0 / np.where(delta[:-1] == 0, 1, delta[:-1])
                              + 1.0 / np.where(delta[1:] == 0, 1, delta[1:])),
                       0.0)
    d[0] = delta[0]
    d[-1] = delta[-1]
    return d


def table_planform(x_table, b_table, length=None, **kwargs) -> BodyPlanform:
    """Planform from a sampled half-depth table, monotone-cubic interpolated."""
    x_table = np.asarray(x_table, dtype=float)
    b_table = np.asarray(b_table, dtype=float)
    if x_table.ndim != 1 or x_table.shape != b_table.shape or len(x_table) < 3:
        raise DomainError("planform table needs matching 1-D arrays, >= 3 rows")
    if np.any(np.diff(x_table) <= 0):
        raise DomainError("planform table abscissae must increase")
    d = _pchip_slopes(x_table, b_table)
    length = float(length if length is not None else x_table[-1])

    def _segment(x):
        i = np.clip(np.searchsorted(x_table, x) - 1, 0, len(x_table) - 2)
        return i

    def b(x):
        x = np.asarray(x, dtype=float)
        i = _segment(x)
        h = x_table[i + 1] - x_table[i]
        u = (x - x_table[i]) / h
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u ** 2 * (3 - 2 * u)
        h11 = u ** 2 * (u - 1)
        return (h00 * b_table[i] + h10 * h * d[i]
                + h01 * b_table[i + 1] + h11 * h * d[i + 1])

    def b_dx(x):
        x = np.asarray(x, dtype=float)
        i = _segment(x)
        h = x_table[i + 1] - x_table[i]
        u = (x - x_table[i]) / h
        dh00 = 6 * u * (u - 1) / h
        dh10 = (3 * u ** 2 - 4 * u + 1)
        dh01 = -6 * u * (u - 1) / h
        dh11 = (3 * u ** 2 - 2 * u)
        return (dh00 * b_table[i] + dh10 * d[i]
                + dh01 * b_table[i + 1] + dh11 * d[i + 1])

    return BodyPlanform(length, b, b_dx, **kwargs)


# ----------------------------------------------------------------------
# record types

@dataclasses.dataclass
class SectionLoad:
    x: float
    momentum: float     # lateral fluid momentum per unit length, m W
    lift: float         # specific lift
    regime: str


@dataclasses.dataclass
class PerformanceRecord:
    power: float
    wake_energy_rate: float
    thrust: float
    speed: float

    @property
    def efficiency(self):
        """T U / P when power is being expended, else None."""
        if self.power > 0.0:
            return self.thrust * self.speed / self.power
        return None

    @property
    def conservation_residual(self) -> float:
        scale = abs(self.power) + abs(self.wake_energy_rate) + abs(
            self.thrust * self.speed)
        if scale == 0.0:
            return 0.0
        return abs(self.power - self.wake_energy_rate
                   - self.thrust * self.speed) / scale


# ----------------------------------------------------------------------
# sectional quantities

def transverse_velocity(spec: MotionSpec, U: float, x, t):
    """W = dh/dt + U dh/dx, the lateral velocity the body hands the slice."""
    _, h_x, h_t = eval_plate_motion(spec, x, t)
    return h_t + U * h_x


def _DW(spec, U, x, t):
    """Material rate DW = W_t + U W_x from the second-derivative jet."""
    return (spec.h_tt(x, t) + 2.0 * U * spec.h_xt(x, t)
            + U ** 2 * spec.h_xx(x, t))


def _W_x(spec, U, x, t):
    return spec.h_xt(x, t) + U * spec.h_xx(x, t)


def section_lift(planform: BodyPlanform, spec: MotionSpec, U: float,
                 x: float, t: float) -> SectionLoad:
    """Specific lift at station x, dispatched on the planform regime."""
    regime = planform.regime(x)
    spec.check_domain(x, t)
    m = float(planform.mass(x))
    W = float(transverse_velocity(spec, U, x, t))
    DW = float(_DW(spec, U, x, t))
    if regime in ("ribbon", "anterior", "caudal"):
        # full material derivative of the momentum, D(mW) = m DW + U m' W
        lift = -(m * DW + U * float(planform.mass_dx(x)) * W)
    elif regime == "trailing-side-edge":
        lift = -m * DW
    elif regime == "abrupt-fin-wake":
        tau = t - (x - planform.x_s) / U
        if tau < 0.0:
            raise NotYetShedError(
                f"retarded time {tau:.3e} < 0: wake slice for x = {x} not yet shed")
        w_fin = float(transverse_velocity(spec, U, planform.x_s, tau))
        # D applied to the frozen-segment term: the retarded argument is
        # constant along characteristics, only the mt(x) profile transports
        lift = -(m * DW + U * float(planform.mass_dx(x)) * W
                 + U * float(planform.fin_wake_added_mass_dx(x)) * w_fin)
    else:  # pragma: no cover
        raise DomainError(f"unknown regime {regime}")
    return SectionLoad(x=float(x), momentum=m * W, lift=float(lift),
                       regime=regime)


# ----------------------------------------------------------------------
# power / energy / thrust

def edge_graded_nodes(length: float, n: int = 128):
    """Gauss-Legendre nodes on cosine-graded panels, clustered at both
    body ends where lift integrands steepen."""
    n_panels = max(4, n // 16)
    edges = 0.5 * length * (1.0 - np.cos(np.linspace(0.0, np.pi, n_panels + 1)))
    per = max(4, int(np.ceil(n / n_panels)))
    gl_x, gl_w = np.polynomial.legendre.leggauss(per)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * (gl_x + 1.0) + a)
        ws.append(0.5 * (b - a) * gl_w)
    return np.concatenate(xs), np.concatenate(ws)


def instantaneous_PET(planform: BodyPlanform, spec: MotionSpec, U: float,
                      t: float, n_nodes: int = 128) -> PerformanceRecord:
    """Instantaneous power, wake-energy rate, thrust from the three
    motion-weighted integrals of the specific lift.

    The identity P = E + T U holds pointwise in the integrands, so the
    record's conservation residual is at round-off whatever the node
    count; a large residual therefore flags a quadrature fault.
    """
    xs, ws = edge_graded_nodes(planform.length, n_nodes)
    lifts = np.array([section_lift(planform, spec, U, x, t).lift for x in xs])
    h_x = spec.h_x(xs, t)
    h_t = spec.h_t(xs, t)
    W = h_t + U * h_x
    P = -np.sum(ws * h_t * lifts)
    E = -np.sum(ws * W * lifts)
    T = np.sum(ws * h_x * lifts)
    rec = PerformanceRecord(power=float(P), wake_energy_rate=float(E),
                            thrust=float(T), speed=float(U))
    if rec.conservation_residual > 1e-10:
        raise AssertionError(
            f"energy identity broken by quadrature: {rec.conservation_residual:.3e}")
    return rec


def mean_performance(m_tail: float, U: float, c: float,
                     mean_sq_slope: float) -> PerformanceRecord:
    """Period means for the distally progressing wave family.

        P = m U c (c - U) s,  E = (m/2) U (c - U)^2 s,
        T = (m/2) (c^2 - U^2) s,   s = mean of h_x^2 at the tail,

    giving the efficiency (c + U) / 2c independent of the wave's
    amplitude.  Thrust and power are positive for c > U and negative in
    the dragging regime c < U.
    """
    if c <= 0.0:
        raise DomainError("wave speed must be positive")
    if mean_sq_slope < 0.0:
        raise DomainError("mean square slope cannot be negative")
    s = float(mean_sq_slope)
    P = m_tail * U * c * (c - U) * s
    E = 0.5 * m_tail * U * (c - U) ** 2 * s
    T = 0.5 * m_tail * (c ** 2 - U ** 2) * s
    return PerformanceRecord(power=float(P), wake_energy_rate=float(E),
                             thrust=float(T), speed=float(U))


# ----------------------------------------------------------------------
# bound vortex sheet on the plate

@dataclasses.dataclass
class SheetStrength:
    gamma1: float       # chordwise component, odd in y, edge-singular
    gamma2: float       # spanwise component, even in y
    gamma1_dx: float
    gamma2_dy: float

    @property
    def divergence(self) -> float:
        return self.gamma1_dx + self.gamma2_dy


def bound_vortex_sheet(planform: BodyPlanform, spec: MotionSpec, U: float,
                       x: float, y: float, t: float) -> SheetStrength:
    """Layer-integrated vorticity (gamma1, gamma2) bound to the plate.

        gamma1 = -2 W y / sqrt(b^2 - y^2)     (jump v_- - v_+)
        gamma2 = -2 W_x sqrt(b^2 - y^2)

    Exact for the constant-width ribbon; with b = b(x) the same local
    formulas are returned.  The field is divergence-free and the vortex
    lines close into loops on the plate.  |y| >= b is rejected: the edge
    singularity of gamma1 is physical but not evaluable.
    """
    b = float(planform.b(x))
    if abs(y) >= b:
        raise DomainError(f"|y| = {abs(y)} is outside the open span (-{b}, {b})")
    W = float(transverse_velocity(spec, U, x, t))
    W_x = float(_W_x(spec, U, x, t))
    H = np.sqrt(b ** 2 - y ** 2)
    gamma1 = -2.0 * W * y / H
    gamma2 = -2.0 * W_x * H
    # analytic derivatives for the divergence identity (ribbon: b' = 0)
    gamma1_dx = -2.0 * W_x * y / H
    gamma2_dy = 2.0 * W_x * y / H
    return SheetStrength(gamma1=float(gamma1), gamma2=float(gamma2),
                         gamma1_dx=float(gamma1_dx), gamma2_dy=float(gamma2_dy))


def circulation(gamma2_midspan, x: float, t: float, x_max=None,
                n_nodes: int = 256) -> float:
    """Circulation of the contour wrapping the sheet up to station x:
    the running integral of the mid-span gamma2.

    ``x_max`` marks the reach of the starting vortex; beyond it there is
    no sheet, the potential jump closes, and the total circulation is
    zero (conservation from a start at rest), so 0 is returned directly.
    """
    if x < 0.0:
        raise DomainError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    if x_max is not None and x > x_max:
        return 0.0
    nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
    xs = 0.5 * (nodes + 1.0) * x
    ws = wts * 0.5 * x
    vals = np.asarray([gamma2_midspan(xi, t) for xi in xs])
    return float(np.sum(ws * vals))


# ----------------------------------------------------------------------
# large-amplitude reactive force

def reactive_force(bb: Backbone, planform: BodyPlanform, t: float,
                   n_nodes: int = 96):
    """Instantaneous reactive force (F_x, F_z) on a large-amplitude
    backbone; -F is the force the body puts on the fluid.

        F = [ m W (-Z_t, X_t) + (1/2) m W^2 tau ]_(xi = L)
            - d/dt  int_0^L m(xi) W n  dxi

    The caudal bracket is the momentum flux vacated past the tail plus
    the axial tail suction (1/2) m W^2 along the backbone tangent;
    equivalently [m W u_tau n - (1/2) m W^2 tau] with u_tau the
    tangential slip speed.  Period means reduce to the traveling-wave
    closed forms at small amplitude.
    """
    if planform.length != bb.length:
        raise DomainError("planform and backbone lengths differ")
    L = bb.length

    def terms(xi):
        j = bb.jet(xi, t)
        n = np.array([-j["Z_xi"], j["X_xi"]])
        u = np.array([j["X_t"], j["Z_t"]])
        W = float(u @ n)
        # exact time derivatives of W and n from the second-order jet
        n_t = np.array([-j["Z_xit"], j["X_xit"]])
        u_t = np.array([j["X_tt"], j["Z_tt"]])
        W_t = float(u_t @ n + u @ n_t)
        return j, n, u, W, n_t, W_t

    # caudal-end bracket, one-sided evaluation at xi = L
    jL, nL, uL, WL, _, _ = terms(L)
    tauL = np.array([jL["X_xi"], jL["Z_xi"]])
    mL = float(planform.mass(L))
    bracket = (mL * WL * np.array([-jL["Z_t"], jL["X_t"]])
               + 0.5 * mL * WL ** 2 * tauL)

    # d/dt of the momentum integral, integrand differentiated analytically
    nodes, wts = np.polynomial.legendre.leggauss(n_nodes)
    xs = 0.5 * (nodes + 1.0) * L
    ws = wts * 0.5 * L
    ddt = np.zeros(2)
    for xi, w in zip(xs, ws):
        _, n, _, W, n_t, W_t = terms(xi)
        m = float(planform.mass(xi))
        ddt += w * m * (W_t * n + W * n_t)

    F = bracket - ddt
    return float(F[0]), float(F[1])


# ----------------------------------------------------------------------
# caudal-fin superposition

@dataclasses.dataclass
class CaudalFlow:
    incident: object            # upstream sidewash field (may be None-like)
    fin_component: sk.CrossFlowField
    half_width: float

    def chi(self, zeta):
        val = self.fin_component.chi(zeta)
        if self.incident is not None:
            val = val + self.incident.chi(zeta)
        return val

    @property
    def fin_loading(self) -> float:
        """Added-mass-weighted upwash of the fin component; the sectional
        lateral momentum is rho pi b^2 times this."""
        return abs(self.fin_component.momentum_coefficient)


def caudal_superposition(incident_field, fin_half_width: float,
                         fin_upwash, *, n: int = 64) -> CaudalFlow:
    """Total caudal-section cross flow chi = chi_v + chi_c.

    ``incident_field`` is the transported upstream field (its sidewash on
    the fin line is subtracted from the fin's own normal velocity before
    the fin solve) or None for a clean-stream fin, in which case the
    result is identical to the anterior-section solve.  Passing a field
    without a sidewash evaluator raises SequencingError: the upstream
    characteristic transport has to run first.
    """
    grid = sk.ChebGrid(n, fin_half_width)
    if callable(fin_upwash):
        w_fin = grid.sample(fin_upwash)
    else:
        w_fin = np.full(grid.n, float(fin_upwash))
    if incident_field is None:
        w_eff = w_fin
    else:
        if not hasattr(incident_field, "sidewash"):
            raise SequencingError(
                "incident field lacks a sidewash evaluator; run the "
                "characteristic transport before the caudal solve")
        w_eff = w_fin - np.asarray(incident_field.sidewash(grid.y))
    fin = sk.cross_flow_solution(w_eff, half_width=fin_half_width, n=n)
    return CaudalFlow(incident=incident_field, fin_component=fin,
                      half_width=fin_half_width)
