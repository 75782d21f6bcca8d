"""Prescribed motion shape functions with exact space/time derivatives.

Three families live here:

* plate waveforms  z = h(x, t) on 0 <= x <= length (small-amplitude
  lateral sway of a slender body),
* large-amplitude backbones (X(xi, t), Z(xi, t)) parameterised by a
  material arc coordinate, inextensible by construction,
* flexible-wing shape functions Z(xi, t) = Z0 + exp(i theta) Zhat on the
  label interval xi in [-1, 1].

All evaluators are closed-form (no tabulated motions), so the transport
operator d/dt + U d/dx applied anywhere downstream stays at round-off
accuracy.  Sign conventions: z positive up, backbone normal
n = (-dZ/dxi, dX/dxi).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import (DomainError, InvalidBackboneError, InvalidShapeError,
                     KindMismatchError)

__all__ = [
    "MotionSpec", "TravelingWave", "AnalyticWaveform", "HeavePitchPlate",
    "eval_plate_motion",
    "Backbone", "RigidGlideBackbone", "RigidRotationBackbone",
    "TravelingWaveBackbone", "BackboneState", "backbone_state",
    "WingShapeFunction", "RigidWingMotion", "heave_wing", "pitch_wing",
    "heave_pitch_wing", "impulsive_start_wing", "ParabolicCamberWing",
    "WingKinematics", "wing_kinematics",
    "feathering_parameter", "smoothstep",
]


def _bump_exponent(u):
    """g(u) = 1/u - 1/(1-u) and its two derivatives, clipped safely."""
    u = np.clip(np.asarray(u, dtype=float), 1e-8, 1.0 - 1e-8)
    g = 1.0 / u - 1.0 / (1.0 - u)
    g1 = -1.0 / u ** 2 - 1.0 / (1.0 - u) ** 2
    g2 = 2.0 / u ** 3 - 2.0 / (1.0 - u) ** 3
    return g, g1, g2


def smoothstep(u):
    """C-infinity step 0 -> 1 on [0, 1]: 1 / (1 + exp(1/u - 1/(1-u))).

    All derivatives vanish at both ends, so envelopes built on it keep
    quadratures spectrally accurate across the ramp joints.
    """
    u_arr = np.asarray(u, dtype=float)
    g, _, _ = _bump_exponent(u_arr)
    val = 1.0 / (1.0 + np.exp(np.clip(g, -700.0, 700.0)))
    return np.where(u_arr <= 0.0, 0.0, np.where(u_arr >= 1.0, 1.0, val))


def _smoothstep_d1(u):
    u_arr = np.asarray(u, dtype=float)
    g, g1, _ = _bump_exponent(u_arr)
    s = 1.0 / (1.0 + np.exp(np.clip(g, -700.0, 700.0)))
    inside = (u_arr > 0.0) & (u_arr < 1.0)
    return np.where(inside, -s * (1.0 - s) * g1, 0.0)


def _smoothstep_d2(u):
    u_arr = np.asarray(u, dtype=float)
    g, g1, g2 = _bump_exponent(u_arr)
    s = 1.0 / (1.0 + np.exp(np.clip(g, -700.0, 700.0)))
    inside = (u_arr > 0.0) & (u_arr < 1.0)
    return np.where(inside,
                    s * (1.0 - s) * ((1.0 - 2.0 * s) * g1 ** 2 - g2), 0.0)


# ----------------------------------------------------------------------
# plate waveforms

class MotionSpec:
    """Base class for plate waveforms z = h(x, t).

    Subclasses provide h and its first/second partials; the base supplies
    domain checking and the (h, h_x, h_t) jet used by the flow solvers.
    """

    kind = "plate"

    def __init__(self, length: float):
        if length <= 0:
            raise DomainError("plate length must be positive")
        self.length = float(length)

    # subclasses implement: h, h_x, h_t, h_xx, h_xt, h_tt

    def check_domain(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(x < 0.0) or np.any(x > self.length):
            raise DomainError(
                f"x outside the plate [0, {self.length}]")
        if np.any(t < 0.0):
            raise DomainError("plate motion is defined for t >= 0")


class TravelingWave(MotionSpec):
    """Pure distally progressing wave h = A sin(k (x - c t) + phase).

    Satisfies h_t + c h_x = 0 identically, the defining property of the
    one-parameter wave family.
    """

    kind = "traveling-wave"

    def __init__(self, amplitude, wavenumber, wave_speed, length,
                 phase: float = 0.0):
        super().__init__(length)
        if wave_speed <= 0:
            raise DomainError("wave speed must be positive")
        self.amplitude = float(amplitude)
        self.wavenumber = float(wavenumber)
        self.wave_speed = float(wave_speed)
        self.phase = float(phase)

    def _arg(self, x, t):
        return self.wavenumber * (np.asarray(x, dtype=float)
                                  - self.wave_speed * np.asarray(t, dtype=float)) + self.phase

    def h(self, x, t):
        return self.amplitude * np.sin(self._arg(x, t))

    def h_x(self, x, t):
        return self.amplitude * self.wavenumber * np.cos(self._arg(x, t))

    def h_t(self, x, t):
        return -self.wave_speed * self.h_x(x, t)

    def h_xx(self, x, t):
        return -self.amplitude * self.wavenumber ** 2 * np.sin(self._arg(x, t))

    def h_xt(self, x, t):
        return -self.wave_speed * self.h_xx(x, t)

    def h_tt(self, x, t):
        return self.wave_speed ** 2 * self.h_xx(x, t)

    def mean_square_tail_slope(self) -> float:
        """Period mean of h_x^2 at any station (monochromatic wave)."""
        return 0.5 * (self.amplitude * self.wavenumber) ** 2


class AnalyticWaveform(MotionSpec):
    """Superposition of harmonics with an optional nose-quiet envelope.

    h(x, t) = env(x) * sum_j A_j sin(k_j x - omega_j t + phi_j)

    with env a quintic smoothstep rising from 0 over [0, ramp_length] and
    flat (identically 1) beyond, so the leading edge carries no lateral
    momentum flux and trailing-edge statistics are those of the raw wave.
    """

    kind = "analytic-waveform"

    def __init__(self, components, length, ramp_length: float = 0.0):
        super().__init__(length)
        comp = [(float(A), float(k), float(om), float(ph))
                for (A, k, om, ph) in components]
        if not comp:
            raise DomainError("waveform needs at least one component")
        if not 0.0 <= ramp_length <= length:
            raise DomainError("ramp_length must lie within the body")
        self.components = comp
        self.ramp_length = float(ramp_length)

    def _env(self, x):
        if self.ramp_length == 0.0:
            return np.ones_like(np.asarray(x, dtype=float)), 0.0, 0.0
        u = np.asarray(x, dtype=float) / self.ramp_length
        return (smoothstep(u), _smoothstep_d1(u) / self.ramp_length,
                _smoothstep_d2(u) / self.ramp_length ** 2)

    def _sums(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        s = sx = st = sxx = sxt = stt = 0.0
        for A, k, om, ph in self.components:
            arg = k * x - om * t + ph
            sin, cos = np.sin(arg), np.cos(arg)
            s = s + A * sin
            sx = sx + A * k * cos
            st = st - A * om * cos
            sxx = sxx - A * k * k * sin
            sxt = sxt + A * k * om * sin
            stt = stt - A * om * om * sin
        return s, sx, st, sxx, sxt, stt

    def h(self, x, t):
        e, _, _ = self._env(x)
        return e * self._sums(x, t)[0]

    def h_x(self, x, t):
        e, e1, _ = self._env(x)
        s, sx, *_ = self._sums(x, t)
        return e * sx + e1 * s

    def h_t(self, x, t):
        e, _, _ = self._env(x)
        return e * self._sums(x, t)[2]

    def h_xx(self, x, t):
        e, e1, e2 = self._env(x)
        s, sx, _, sxx, _, _ = self._sums(x, t)
        return e * sxx + 2.0 * e1 * sx + e2 * s

    def h_xt(self, x, t):
        e, e1, _ = self._env(x)
        _, _, st, _, sxt, _ = self._sums(x, t)
        return e * sxt + e1 * st

    def h_tt(self, x, t):
        e, _, _ = self._env(x)
        return e * self._sums(x, t)[5]


class HeavePitchPlate(MotionSpec):
    """Two-mode rigid motion with heave phase-lagged 90 degrees behind
    pitch about the axis at x = axis_x:

        h(x, t) = h0 cos(omega t) + alpha (x - axis_x) sin(omega t).
    """

    kind = "heave-pitch"

    def __init__(self, heave_amplitude, pitch_amplitude, omega, axis_x, length):
        super().__init__(length)
        self.heave_amplitude = float(heave_amplitude)
        self.pitch_amplitude = float(pitch_amplitude)
        self.omega = float(omega)
        self.axis_x = float(axis_x)

    def h(self, x, t):
        x = np.asarray(x, dtype=float)
        wt = self.omega * np.asarray(t, dtype=float)
        return (self.heave_amplitude * np.cos(wt)
                + self.pitch_amplitude * (x - self.axis_x) * np.sin(wt))

    def h_x(self, x, t):
        wt = self.omega * np.asarray(t, dtype=float)
        return self.pitch_amplitude * np.sin(wt) * np.ones_like(np.asarray(x, dtype=float))

    def h_t(self, x, t):
        x = np.asarray(x, dtype=float)
        wt = self.omega * np.asarray(t, dtype=float)
        return self.omega * (-self.heave_amplitude * np.sin(wt)
                             + self.pitch_amplitude * (x - self.axis_x) * np.cos(wt))

    def h_xx(self, x, t):
        return np.zeros_like(np.asarray(x, dtype=float) + np.asarray(t, dtype=float))

    def h_xt(self, x, t):
        wt = self.omega * np.asarray(t, dtype=float)
        return (self.omega * self.pitch_amplitude * np.cos(wt)
                * np.ones_like(np.asarray(x, dtype=float)))

    def h_tt(self, x, t):
        x = np.asarray(x, dtype=float)
        wt = self.omega * np.asarray(t, dtype=float)
        return -self.omega ** 2 * (self.heave_amplitude * np.cos(wt)
                                   + self.pitch_amplitude * (x - self.axis_x) * np.sin(wt))


def eval_plate_motion(spec, x, t):
    """(h, dh/dx, dh/dt) of a plate waveform at (x, t).

    Raises KindMismatchError for non-plate motions (backbones, wings) and
    DomainError outside 0 <= x <= length or t < 0.
    """
    if not isinstance(spec, MotionSpec):
        raise KindMismatchError(
            f"expected a plate waveform, got {type(spec).__name__}")
    spec.check_domain(x, t)
    return spec.h(x, t), spec.h_x(x, t), spec.h_t(x, t)


# ----------------------------------------------------------------------
# large-amplitude backbones

@dataclasses.dataclass
class BackboneState:
    """Kinematic state of one backbone station."""
    position: tuple
    tangent: tuple
    normal: tuple
    tangential_speed: float   # u . tau
    normal_speed: float       # u . n


class Backbone:
    """Trajectory (X(xi, t), Z(xi, t)), xi in [0, length] material arc.

    Subclasses provide ``jet(xi, t)`` returning the dict of X, Z and the
    partials X_xi, Z_xi, X_t, Z_t, X_xit, Z_xit, X_tt, Z_tt.  Built-ins
    are inextensible by construction (X_xi^2 + Z_xi^2 = 1).
    """

    kind = "backbone"

    def __init__(self, length: float):
        if length <= 0:
            raise DomainError("backbone length must be positive")
        self.length = float(length)

    def check_domain(self, xi, t):
        if np.any(np.asarray(xi) < 0) or np.any(np.asarray(xi) > self.length):
            raise DomainError("xi outside the backbone [0, length]")

    def jet(self, xi, t):  # pragma: no cover - abstract
        raise NotImplementedError


class RigidGlideBackbone(Backbone):
    """Straight backbone translating at constant speed toward -x."""

    def __init__(self, speed, length):
        super().__init__(length)
        self.speed = float(speed)

    def jet(self, xi, t):
        z = np.zeros_like(np.asarray(xi, dtype=float))
        one = np.ones_like(z)
        return dict(X=xi - self.speed * t, Z=z, X_xi=one, Z_xi=z,
                    X_t=-self.speed * one, Z_t=z, X_xit=z, Z_xit=z,
                    X_tt=z, Z_tt=z)


class RigidRotationBackbone(Backbone):
    """Straight backbone rotating rigidly about the origin at a set rate."""

    def __init__(self, rate, length):
        super().__init__(length)
        self.rate = float(rate)

    def jet(self, xi, t):
        xi = np.asarray(xi, dtype=float)
        a = self.rate * t
        c, s = np.cos(a), np.sin(a)
        w = self.rate
        return dict(X=xi * c, Z=xi * s,
                    X_xi=c * np.ones_like(xi), Z_xi=s * np.ones_like(xi),
                    X_t=-xi * s * w, Z_t=xi * c * w,
                    X_xit=-s * w * np.ones_like(xi),
                    Z_xit=c * w * np.ones_like(xi),
                    X_tt=-xi * c * w * w, Z_tt=-xi * s * w * w)


class TravelingWaveBackbone(Backbone):
    """Inextensible backbone carrying a distally progressing wave while
    gliding toward -x at the set speed.

        Z = A r(t) sin(k (xi - c t)),     r = smoothstep(t / ramp_time),
        X = -U t + int_0^xi sqrt(1 - Z_xi^2) ds.

    Inextensibility holds exactly; X and its time derivatives are Gauss
    quadratures of closed-form integrands (the arc integral never enters
    force formulas directly, only its derivatives do).
    """

    def __init__(self, amplitude, wavenumber, wave_speed, glide_speed,
                 length, ramp_time=1.0, quad_nodes: int = 120):
        super().__init__(length)
        if abs(amplitude * wavenumber) >= 1.0:
            raise InvalidBackboneError(
                "amplitude * wavenumber must be < 1 for an inextensible wave")
        self.amplitude = float(amplitude)
        self.wavenumber = float(wavenumber)
        self.wave_speed = float(wave_speed)
        self.glide_speed = float(glide_speed)
        self.ramp_time = float(ramp_time)
        nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
        self._nodes = nodes
        self._weights = weights

    def _ramp(self, t):
        if self.ramp_time <= 0:
            return 1.0, 0.0, 0.0
        u = t / self.ramp_time
        return (float(smoothstep(u)), float(_smoothstep_d1(u)) / self.ramp_time,
                float(_smoothstep_d2(u)) / self.ramp_time ** 2)

    def _z_jet(self, xi, t):
        """Z and partials at (xi, t) as closed forms."""
        A, k, c = self.amplitude, self.wavenumber, self.wave_speed
        r, r1, r2 = self._ramp(t)
        arg = k * (xi - c * t)
        sin, cos = np.sin(arg), np.cos(arg)
        Z = A * r * sin
        Z_xi = A * r * k * cos
        Z_t = A * (r1 * sin - r * k * c * cos)
        Z_xixi = -A * r * k * k * sin
        Z_xit = A * k * (r1 * cos + r * k * c * sin)
        Z_tt = A * (r2 * sin - 2.0 * r1 * k * c * cos - r * k * k * c * c * sin)
        return Z, Z_xi, Z_t, Z_xixi, Z_xit, Z_tt

    def jet(self, xi, t):
        xi = float(xi)
        Z, Z_xi, Z_t, Z_xixi, Z_xit, Z_tt = self._z_jet(xi, t)
        X_xi = np.sqrt(1.0 - Z_xi ** 2)
        # X_xit = d/dt sqrt(1 - Z_xi^2) = -Z_xi Z_xit / X_xi
        X_xit = -Z_xi * Z_xit / X_xi

        # arc integrals for X_t, X_tt over [0, xi]
        s = 0.5 * (self._nodes + 1.0) * xi
        w = self._weights * 0.5 * xi
        Zs, Zs_xi, _, _, Zs_xit, _ = self._z_jet(s, t)
        root = np.sqrt(1.0 - Zs_xi ** 2)
        integrand_t = -Zs_xi * Zs_xit / root
        X_t = -self.glide_speed + float(np.sum(w * integrand_t))

        # second time derivative of the integrand (closed form)
        A, k, c = self.amplitude, self.wavenumber, self.wave_speed
        r, r1, r2 = self._ramp(t)
        arg = k * (s - c * t)
        cos, sin = np.cos(arg), np.sin(arg)
        Zx = A * r * k * cos
        Zx_t = A * k * (r1 * cos + r * k * c * sin)
        Zx_tt = A * k * (r2 * cos + 2.0 * r1 * k * c * sin - r * k * k * c * c * cos)
        rt = np.sqrt(1.0 - Zx ** 2)
        d2 = -(Zx_t ** 2 + Zx * Zx_tt) / rt - (Zx * Zx_t) ** 2 / rt ** 3
        X_tt = float(np.sum(w * d2))

        X = -self.glide_speed * t + float(np.sum(w * root))
        return dict(X=X, Z=float(Z), X_xi=float(X_xi), Z_xi=float(Z_xi),
                    X_t=X_t, Z_t=float(Z_t), X_xit=float(X_xit),
                    Z_xit=float(Z_xit), X_tt=X_tt, Z_tt=float(Z_tt))


def backbone_state(bb: Backbone, xi, t,
                   inextensibility_tol: float = 1e-6) -> BackboneState:
    """Position, unit tangent/normal and the (U, W) velocity split.

    U is the forward tangential speed u . tau and W the sidewise normal
    speed u . n with u = (X_t, Z_t) and n = (-Z_xi, X_xi).
    """
    if not isinstance(bb, Backbone):
        raise KindMismatchError(f"expected a backbone, got {type(bb).__name__}")
    bb.check_domain(xi, t)
    j = bb.jet(xi, t)
    stretch = j["X_xi"] ** 2 + j["Z_xi"] ** 2
    if abs(stretch - 1.0) > inextensibility_tol:
        raise InvalidBackboneError(
            f"inextensibility violated at xi={xi}: |tau|^2 - 1 = {stretch - 1.0:.3e}")
    tau = (j["X_xi"], j["Z_xi"])
    n = (-j["Z_xi"], j["X_xi"])
    U = j["X_t"] * tau[0] + j["Z_t"] * tau[1]
    W = j["X_t"] * n[0] + j["Z_t"] * n[1]
    return BackboneState(position=(j["X"], j["Z"]), tangent=tau, normal=n,
                         tangential_speed=float(U), normal_speed=float(W))


# ----------------------------------------------------------------------
# flexible-wing shape functions

class WingShapeFunction:
    """Wing shape Z(xi, t) = Z0(t) + exp(i theta(t)) Zhat(xi, t) on
    xi in [-1, 1] (leading edge at -1, trailing edge at +1), with the
    label an arc coordinate so |dZ/dxi| = 1.

    Subclasses provide Z, Z_xi and the prescribed conjugate velocity
    W = d(Zbar)/dt; the chord (arc) length is 2.
    """

    kind = "flexible-wing"
    half_chord = 1.0

    @property
    def chord(self):
        return 2.0 * self.half_chord

    def check_domain(self, xi):
        if np.any(np.abs(np.asarray(xi)) > 1.0):
            raise DomainError("wing label xi must lie in [-1, 1]")

    def Z(self, xi, t):  # pragma: no cover - abstract
        raise NotImplementedError

    def Z_xi(self, xi, t):  # pragma: no cover - abstract
        raise NotImplementedError

    def W(self, xi, t):  # pragma: no cover - abstract
        raise NotImplementedError


class RigidWingMotion(WingShapeFunction):
    """Flat rigid wing: Z = Zc(t) + exp(i theta(t)) (xi - pivot).

    ``translation`` and ``pitch`` are callables returning (value, rate):
    translation -> (Zc, dZc/dt) complex, pitch -> (theta, dtheta/dt).
    The pitch rate convention is Omega = -dtheta/dt (positive nose-up).
    """

    def __init__(self, translation, pitch, pivot: float = 0.0):
        self.translation = translation
        self.pitch = pitch
        self.pivot = float(pivot)

    def Z(self, xi, t):
        zc, _ = self.translation(t)
        th, _ = self.pitch(t)
        return zc + np.exp(1j * th) * (np.asarray(xi, dtype=float) - self.pivot)

    def Z_xi(self, xi, t):
        th, _ = self.pitch(t)
        return np.exp(1j * th) * np.ones_like(np.asarray(xi, dtype=float))

    def Z_t(self, xi, t):
        zc, zc_t = self.translation(t)
        th, th_t = self.pitch(t)
        return zc_t + 1j * th_t * np.exp(1j * th) * (np.asarray(xi, dtype=float) - self.pivot)

    def W(self, xi, t):
        return np.conj(self.Z_t(xi, t))

    def theta(self, t):
        return self.pitch(t)[0]

    def angular_velocity(self, t):
        # Omega = -dtheta/dt, positive for nose-up pitching
        return -self.pitch(t)[1]


def heave_wing(U, omega, amplitude, phase: float = 0.0) -> RigidWingMotion:
    """Flat wing translating toward -x at speed U while heaving
    z = amplitude sin(omega t + phase) (starts from rest level at phase 0)."""
    def translation(t):
        return (-U * t + 1j * amplitude * math.sin(omega * t + phase),
                -U + 1j * amplitude * omega * math.cos(omega * t + phase))

    def pitch(t):
        return 0.0, 0.0

    return RigidWingMotion(translation, pitch)


def pitch_wing(U, omega, amplitude, pivot: float = 0.0) -> RigidWingMotion:
    """Flat wing translating toward -x while pitching
    theta = amplitude sin(omega t) about the label ``pivot``."""
    def translation(t):
        return -U * t + 0.0j, -U + 0.0j

    def pitch(t):
        return (amplitude * math.sin(omega * t),
                amplitude * omega * math.cos(omega * t))

    return RigidWingMotion(translation, pitch, pivot=pivot)


def heave_pitch_wing(U, omega, heave_amplitude, pitch_amplitude,
                     pivot: float) -> RigidWingMotion:
    """Heave lagging pitch by a quarter period (the two-mode form):
    z_heave = h0 cos(omega t), theta = alpha sin(omega t) about ``pivot``."""
    def translation(t):
        return (-U * t + 1j * heave_amplitude * math.cos(omega * t),
                -U - 1j * heave_amplitude * omega * math.sin(omega * t))

    def pitch(t):
        return (pitch_amplitude * math.sin(omega * t),
                pitch_amplitude * omega * math.cos(omega * t))

    return RigidWingMotion(translation, pitch, pivot=pivot)


def impulsive_start_wing(U, incidence) -> RigidWingMotion:
    """Flat wing at fixed incidence set impulsively into translation at
    speed U toward -x at t = 0."""
    def translation(t):
        return -U * t + 0.0j, -U + 0.0j

    def pitch(t):
        return incidence, 0.0

    return RigidWingMotion(translation, pitch)


class ParabolicCamberWing(WingShapeFunction):
    """Steady translating wing with a parabolic camber arc, arc-length
    parameterised so |dZ/dxi| = 1 exactly.

    Camber line: yhat = kappa (1 - xhat(xi)^2) in the body frame, with
    xhat(xi) found from the arc-length relation by Newton iteration and
    the derivative dxhat/dxi = 1/sqrt(1 + (dyhat/dxhat)^2) closed-form.
    """

    def __init__(self, U, camber, n_table: int = 2001):
        self.U = float(U)
        self.camber = float(camber)
        # arc length from xhat = 0: s(x) = int_0^x sqrt(1 + (2 kappa u)^2) du
        xs = np.linspace(-3.0, 3.0, n_table)
        integrand = np.sqrt(1.0 + (2.0 * self.camber * xs) ** 2)
        s = np.concatenate(([0.0], np.cumsum(
            0.5 * (integrand[1:] + integrand[:-1]) * np.diff(xs))))
        s -= np.interp(0.0, xs, s)
        self._xs, self._s = xs, s
        # half the arc budget on each side of xhat = 0
        self._scale = 1.0  # labels are arc length directly

    def _xhat(self, xi):
        xi = np.asarray(xi, dtype=float)
        x = np.interp(xi, self._s, self._xs)
        # Newton polish of s(x) = xi
        for _ in range(4):
            f = (np.interp(x, self._xs, self._s) - xi)
            fp = np.sqrt(1.0 + (2.0 * self.camber * x) ** 2)
            x = x - f / fp
        return x

    def Z(self, xi, t):
        self.check_domain(xi)
        x = self._xhat(xi)
        return -self.U * t + x + 1j * self.camber * (1.0 - x ** 2)

    def Z_xi(self, xi, t):
        x = self._xhat(xi)
        slope = -2.0 * self.camber * x
        dx = 1.0 / np.sqrt(1.0 + slope ** 2)
        return dx * (1.0 + 1j * slope)

    def W(self, xi, t):
        return np.full_like(np.asarray(xi, dtype=float), -self.U, dtype=complex)


@dataclasses.dataclass
class WingKinematics:
    position: complex
    conjugate_velocity: complex   # W = d(Zbar)/dt
    tangential_speed: float       # U_s
    normal_speed: float           # U_n, fed to the flow solver


def wing_kinematics(w: WingShapeFunction, xi, t,
                    arc_tol: float = 1e-6) -> WingKinematics:
    """Evaluate Z, W = d(Zbar)/dt and the split U_s - i U_n = W dZ/dxi."""
    if not isinstance(w, WingShapeFunction):
        raise KindMismatchError(
            f"expected a wing shape function, got {type(w).__name__}")
    w.check_domain(xi)
    z_xi = w.Z_xi(xi, t)
    stretch = np.abs(z_xi)
    if np.any(np.abs(stretch - 1.0) > arc_tol):
        raise InvalidShapeError(
            f"|dZ/dxi| = {stretch} deviates from 1 beyond {arc_tol}")
    W = w.W(xi, t)
    proj = W * z_xi
    return WingKinematics(position=complex(w.Z(xi, t)),
                          conjugate_velocity=complex(W),
                          tangential_speed=float(np.real(proj)),
                          normal_speed=float(-np.imag(proj)))


# ----------------------------------------------------------------------

def feathering_parameter(U, alpha, h, omega) -> float:
    """Proportional feathering theta = U alpha / (h omega).

    For the pitch-heave pair related through a bodily wave, alpha = k h
    with k = omega / c, this equals the speed ratio U / c.
    """
    if h * omega <= 0.0:
        raise DomainError("feathering needs h * omega > 0")
    return float(U) * float(alpha) / (float(h) * float(omega))
