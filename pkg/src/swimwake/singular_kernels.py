"""Singular-integral toolbox for cross-flow plane problems.

The cross-flow past a moving slender-body section is a boundary-value
problem on a cut (-b, b) of the complex plane zeta = y + i z.  Everything
here is built on Chebyshev machinery: a vortex density on the cut is
expanded as gamma(y) = sum 2 c_n T_n(y/b) / sqrt(1 - (y/b)^2), for which
the Cauchy transforms have closed forms in the Joukowski variable

    rho(w) = w - sqrt(w^2 - 1),   w = zeta / b,   |rho| <= 1 off the cut,

with the square root branched so that sqrt(w^2 - 1) -> w at infinity and
the cut lies on [-1, 1].  This keeps every operator spectrally accurate,
including at the edges where the density is square-root singular.

Operator conventions (density gamma is the jump v_plus - v_minus):

    upwash_from_vorticity:  W(y) = (1/2pi) PV int gamma(y')/(y'-y) dy'
    invert_upwash:          the unbounded-endpoint inverse with zero net
                            circulation (the cross-flow solution class),
                            gamma(y) = -(2/pi H(y)) PV int H(y') W(y')/(y'-y) dy'
                            where H(y) = sqrt(b^2 - y^2).
"""

from __future__ import annotations

import numpy as np

from .errors import AccuracyError, DomainError, StepResolutionError

__all__ = [
    "ChebGrid",
    "CrossFlowField",
    "AccelerationField",
    "pv_integral",
    "upwash_from_vorticity",
    "invert_upwash",
    "cross_flow_solution",
    "acceleration_potential",
    "CharacteristicTransport",
    "sqrt_cut",
    "joukowski_rho",
]


# ----------------------------------------------------------------------
# branch handling

def sqrt_cut(w):
    """sqrt(w^2 - 1) with the cut on [-1, 1] and sqrt -> w as |w| -> inf.

    Implemented as sqrt(w - 1) * sqrt(w + 1) with principal square roots;
    on the top of the cut this equals +i sqrt(1 - y^2), on the bottom
    -i sqrt(1 - y^2).
    """
    w = np.asarray(w, dtype=complex)
    return np.sqrt(w - 1.0) * np.sqrt(w + 1.0)


def joukowski_rho(w):
    """rho(w) = w - sqrt(w^2 - 1); |rho| <= 1 off the cut, -> 1/(2w) at inf."""
    return w - sqrt_cut(w)


# ----------------------------------------------------------------------
# grid and transforms

class ChebGrid:
    """Chebyshev-Gauss nodes on (-b, b) with the 1/sqrt endpoint weight.

    Nodes are strictly interior and symmetric about zero:
        y_j = b cos(theta_j),  theta_j = (2j - 1) pi / (2 n),  j = 1..n.
    """

    def __init__(self, n: int, half_width: float = 1.0):
        if n < 8:
            raise DomainError(f"grid needs at least 8 nodes, got {n}")
        if half_width <= 0:
            raise DomainError("half_width must be positive")
        self.n = int(n)
        self.half_width = float(half_width)
        j = np.arange(1, self.n + 1)
        self.theta = (2.0 * j - 1.0) * np.pi / (2.0 * self.n)
        self.s = np.cos(self.theta)            # unit-interval abscissae
        self.y = self.half_width * self.s      # physical nodes
        self.sin_theta = np.sin(self.theta)

    def sample(self, fn):
        """Values of ``fn`` at the nodes (accepts callables or arrays)."""
        if callable(fn):
            try:
                vals = np.asarray(fn(self.y), dtype=float)
                if vals.shape == self.y.shape:
                    return vals
            except (TypeError, ValueError):
                pass
            return np.asarray([fn(yj) for yj in self.y], dtype=float)
        vals = np.asarray(fn, dtype=float)
        if vals.shape != (self.n,):
            raise DomainError(
                f"expected {self.n} node values, got shape {vals.shape}")
        return vals

    def t_coefficients(self, values) -> np.ndarray:
        """Chebyshev-T coefficients a_0..a_{n-1} of data at the nodes."""
        v = self.sample(values)
        k = np.arange(self.n)
        # Gauss-Chebyshev quadrature of (2/pi) int f T_k / sqrt(1-s^2)
        mat = np.cos(np.outer(k, self.theta))
        a = (2.0 / self.n) * mat @ v
        a[0] *= 0.5
        return a

    def u_coefficients(self, values) -> np.ndarray:
        """Chebyshev-U coefficients b_1..b_n with f = sum b_k U_{k-1}."""
        v = self.sample(values)
        k = np.arange(1, self.n + 1)
        mat = np.sin(np.outer(k, self.theta)) * self.sin_theta
        return (2.0 / self.n) * mat @ v


def _eval_u_series(coeffs, s):
    """sum_k coeffs[k-1] U_{k-1}(s) for s in [-1, 1]."""
    s = np.asarray(s, dtype=float)
    theta = np.arccos(np.clip(s, -1.0, 1.0))
    sin_t = np.sin(theta)
    k = np.arange(1, len(coeffs) + 1)
    num = np.sin(np.multiply.outer(theta, k)) @ coeffs
    safe = np.where(sin_t > 1e-14, sin_t, 1.0)
    out = num / safe
    if np.any(sin_t <= 1e-14):
        # endpoint limit: U_{k-1}(+-1) = k (+-1)^{k-1}
        lim = (k * np.where(s[..., None] > 0, 1.0, (-1.0) ** (k - 1))) @ coeffs
        out = np.where(sin_t <= 1e-14, lim, out)
    return out


def _eval_t_series(coeffs, s):
    theta = np.arccos(np.clip(np.asarray(s, dtype=float), -1.0, 1.0))
    k = np.arange(len(coeffs))
    return np.cos(np.multiply.outer(theta, k)) @ coeffs


# ----------------------------------------------------------------------
# principal-value quadrature

def pv_integral(density, y, half_width: float = 1.0, n: int = 128,
                weight: str = "none") -> float:
    """PV int_{-b}^{b} density(y') / (y' - y) dy'.

    ``weight`` declares the endpoint behaviour of the density:
      * "none"          bounded, smooth density; subtracted-singularity
                        scheme on Gauss-Legendre panels,
      * "inverse_sqrt"  density = g(y)/sqrt(b^2-y^2) with g smooth,
      * "sqrt"          density = g(y)*sqrt(1-(y/b)^2) with g smooth;
    the weighted paths use exact Chebyshev closed forms.

    For y outside (-b, b) the integrand is regular and an ordinary
    quadrature path is used.
    """
    b = float(half_width)
    if weight not in ("none", "inverse_sqrt", "sqrt"):
        raise DomainError(f"unknown weight declaration {weight!r}")

    grid = ChebGrid(max(int(n), 8), b)

    if weight == "inverse_sqrt":
        g = _density_values(density, grid) * grid.sin_theta * b  # g = density*H
        a = grid.t_coefficients(g / b)
        if abs(y) < b:
            s = y / b
            return float(np.pi * _eval_u_series(a[1:], s))
        return float(_offcut_t_transform(a, y / b).real)

    if weight == "sqrt":
        vals = _density_values(density, grid)
        g = vals / grid.sin_theta                      # density = g * sqrt(1-s^2)
        c = grid.u_coefficients(g)
        if abs(y) < b:
            s = y / b
            return float(-np.pi * _eval_t_series(
                np.concatenate(([0.0], c)), s))
        return float(_offcut_u_transform(c, y / b).real)

    # plain smooth density
    return _pv_plain(density, y, b, n)


def _density_values(density, grid):
    if callable(density):
        return grid.sample(density)
    return grid.sample(density)


def _offcut_t_transform(a, w):
    """int T_k(s)/(sqrt(1-s^2)(s - w)) ds summed with coefficients a_k."""
    rho = joukowski_rho(complex(w))
    root = sqrt_cut(complex(w))
    k = np.arange(len(a))
    return -np.pi / root * np.sum(a * rho ** k)


def _offcut_u_transform(c, w):
    """int U_{k-1}(s) sqrt(1-s^2)/(s - w) ds summed with coefficients c_k."""
    rho = joukowski_rho(complex(w))
    k = np.arange(1, len(c) + 1)
    return -np.pi * np.sum(c * rho ** k)


def _pv_plain(density, y, b, n):
    """Subtract the singularity, integrate the smooth remainder."""
    fn = density if callable(density) else None
    if fn is None:
        raise DomainError("plain-weight PV quadrature needs a callable density")
    nodes, wts = np.polynomial.legendre.leggauss(max(int(n), 16))
    t = 0.5 * (nodes + 1.0) * 2.0 * b - b
    w_q = wts * b
    if abs(y) < b:
        if np.min(np.abs(t - y)) < 1e-13 * b:
            # automatic node shift: a node landed on the evaluation point
            nodes, wts = np.polynomial.legendre.leggauss(max(int(n), 16) + 1)
            t = 0.5 * (nodes + 1.0) * 2.0 * b - b
            w_q = wts * b
        fy = fn(y)
        smooth = (np.asarray([fn(tj) for tj in t]) - fy) / (t - y)
        return float(np.sum(w_q * smooth) + fy * np.log((b - y) / (b + y)))
    vals = np.asarray([fn(tj) for tj in t]) / (t - y)
    return float(np.sum(w_q * vals))


# ----------------------------------------------------------------------
# the airfoil operator pair

def upwash_from_vorticity(gamma, y, grid: ChebGrid | None = None,
                          half_width: float = 1.0, n: int = 128):
    """W(y) = (1/2pi) PV int gamma(y')/(y'-y) dy'.

    ``gamma`` may carry a square-root edge singularity; it is sampled at
    the interior Chebyshev nodes and regularised by the edge factor before
    the transform, so both bounded and edge-singular densities keep
    spectral accuracy.
    """
    grid = grid or ChebGrid(n, half_width)
    vals = grid.sample(gamma)
    q = vals * grid.sin_theta                 # q = gamma * sqrt(1 - s^2)
    a = grid.t_coefficients(q)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty(y_arr.shape, dtype=float)
    inside = np.abs(y_arr) < grid.half_width
    if np.any(inside):
        s = y_arr[inside] / grid.half_width
        out[inside] = 0.5 * _eval_u_series(a[1:], s)
    for idx in np.nonzero(~inside)[0]:
        out[idx] = (_offcut_t_transform(a, y_arr[idx] / grid.half_width)
                    .real / (2.0 * np.pi))
    return out if np.ndim(y) else float(out[0])


class VortexDensity:
    """A cut vortex density gamma = 2 sum c_n T_n(s) / sqrt(1 - s^2)."""

    def __init__(self, coeffs: np.ndarray, half_width: float):
        self.coeffs = np.asarray(coeffs, dtype=float)   # c_1..c_n
        self.half_width = float(half_width)

    def __call__(self, y):
        s = np.asarray(y, dtype=float) / self.half_width
        if np.any(np.abs(s) >= 1.0):
            raise DomainError("vortex density is defined on the open cut")
        t_series = _eval_t_series(np.concatenate(([0.0], self.coeffs)), s)
        return 2.0 * t_series / np.sqrt(1.0 - s ** 2)

    @property
    def net_circulation(self) -> float:
        # int 2 T_n(s)/sqrt(1-s^2) ds = 0 for n >= 1: the class carries no
        # net vortex at infinity, as the far-field decay condition demands.
        return 0.0


def invert_upwash(W, grid: ChebGrid | None = None, half_width: float = 1.0,
                  n: int = 128, roundtrip_tol: float = 1e-8) -> VortexDensity:
    """Solve W = upwash_from_vorticity(gamma) for the cross-flow class.

    The returned density is square-root singular at both edges and carries
    zero net circulation; the round-trip W -> gamma -> W is checked at the
    nodes and an AccuracyError raised if the residual exceeds
    ``roundtrip_tol`` (which flags under-resolved input, since the
    transform pair is exact on resolved data).
    """
    grid = grid or ChebGrid(n, half_width)
    w_vals = grid.sample(W)
    bcoef = grid.u_coefficients(w_vals)
    density = VortexDensity(bcoef, grid.half_width)
    # round-trip residual: G[gamma] equals the U-series resummation
    back = _eval_u_series(bcoef, grid.s)
    resid = float(np.max(np.abs(back - w_vals)))
    scale = 1.0 + float(np.max(np.abs(w_vals)))
    if resid > roundtrip_tol * scale:
        raise AccuracyError(
            f"upwash not resolved on {grid.n} nodes: round-trip residual "
            f"{resid:.3e}", residual=resid)
    return density


# ----------------------------------------------------------------------
# cross-flow fields

class _SheetField:
    """Closed-form field of a cut density with U-coefficients ``coeffs``."""

    def __init__(self, coeffs, half_width):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.half_width = float(half_width)

    def _derivative(self, zeta):
        w = np.asarray(zeta, dtype=complex) / self.half_width
        rho = joukowski_rho(w)
        root = sqrt_cut(w)
        k = np.arange(1, len(self.coeffs) + 1)
        powers = rho[..., None] ** k
        return 1j * (powers @ self.coeffs) / root

    def _potential(self, zeta):
        w = np.asarray(zeta, dtype=complex) / self.half_width
        rho = joukowski_rho(w)
        k = np.arange(1, len(self.coeffs) + 1)
        powers = rho[..., None] ** k
        return -1j * self.half_width * (powers @ (self.coeffs / k))

    def _potential_cut(self, y, side):
        s = np.asarray(y, dtype=float) / self.half_width
        if np.any(np.abs(s) > 1.0):
            raise DomainError("cut evaluation requires |y| <= b")
        theta = np.arccos(np.clip(s, -1.0, 1.0))
        k = np.arange(1, len(self.coeffs) + 1)
        series = np.sin(np.multiply.outer(theta, k)) @ (self.coeffs / k)
        sign = -1.0 if side == "upper" else 1.0
        return sign * self.half_width * series


class CrossFlowField(_SheetField):
    """Cross-flow complex velocity chi = v - i w and potential f = phi + i psi
    induced by a section with upwash W on the cut |y| < b.

    On the cut, chi(y +- i0) = +-gamma/2 - i W and phi_± = ∓ sum-form
    reducing to ∓ W sqrt(b^2 - y^2) for y-uniform W.
    """

    def __init__(self, upwash_coeffs, half_width, gamma: VortexDensity):
        super().__init__(upwash_coeffs, half_width)
        self.gamma = gamma

    def chi(self, zeta):
        return self._derivative(zeta)

    def f(self, zeta):
        return self._potential(zeta)

    def phi_cut(self, y, side="upper"):
        return self._potential_cut(y, side)

    def upwash(self, y):
        """w on the cut (equals the boundary data)."""
        s = np.asarray(y, dtype=float) / self.half_width
        return _eval_u_series(self.coeffs, s)

    def sidewash(self, y):
        """w = -Im(chi) evaluated just above the plane, valid on and off
        the cut (w is continuous across both the cut and free sheets)."""
        zeta = np.asarray(y, dtype=float) + 1e-30j
        return -np.imag(self.chi(zeta))

    @property
    def momentum_coefficient(self) -> float:
        """First U-coefficient of W; the sectional lateral fluid momentum
        is rho * pi * b^2 * this (the added-mass-weighted upwash)."""
        return float(self.coeffs[0])


class AccelerationField(_SheetField):
    """Acceleration potential F = Phi + i Psi with boundary data DW on the
    cut.  F is continuous at the edges y = +-b (smooth-leaving condition)
    and Phi_± = ∓ DW sqrt(b^2-y^2) for uniform DW."""

    def dF_dzeta(self, zeta):
        return self._derivative(zeta)

    def F(self, zeta):
        return self._potential(zeta)

    def Phi_cut(self, y, side="upper"):
        return self._potential_cut(y, side)


def cross_flow_solution(W, half_width: float = 1.0, n: int = 64) -> CrossFlowField:
    """Solve the section cross-flow for upwash W on the cut.

    The field satisfies w = W on the cut, decays like chi = O(zeta^-2),
    f = O(zeta^-1) far away, and reduces to the classical closed form
    chi = i W (zeta/sqrt(zeta^2-b^2) - 1) for y-uniform W.
    """
    grid = ChebGrid(n, half_width)
    gamma = invert_upwash(W, grid=grid)
    return CrossFlowField(gamma.coeffs, half_width, gamma)


def acceleration_potential(DW, half_width: float = 1.0, n: int = 64) -> AccelerationField:
    """Field of the material upwash rate DW; F(inf) = 0 by construction
    (coefficient form integrates the Joukowski series termwise, so no path
    routing around the cut is ever needed)."""
    grid = ChebGrid(n, half_width)
    gamma = invert_upwash(DW, grid=grid)
    return AccelerationField(gamma.coeffs, half_width)


# ----------------------------------------------------------------------
# characteristic-line integration  (f_t + U f_x = F)

class TransportedField:
    """Velocity-potential field at station x built by integrating the
    acceleration-potential family along x - U t = const."""

    def __init__(self, terms, inlet_field, x, t):
        # terms: list of (weight, AccelerationField) pairs
        self._terms = terms
        self._inlet = inlet_field
        self.x = x
        self.t = t

    def f(self, zeta):
        acc = np.zeros(np.shape(np.asarray(zeta)), dtype=complex)
        if self._inlet is not None:
            acc = acc + self._inlet.f(zeta)
        for wgt, fld in self._terms:
            acc = acc + wgt * fld.F(zeta)
        return acc

    def chi(self, zeta):
        acc = np.zeros(np.shape(np.asarray(zeta)), dtype=complex)
        if self._inlet is not None:
            acc = acc + self._inlet.chi(zeta)
        for wgt, fld in self._terms:
            acc = acc + wgt * fld.dF_dzeta(zeta)
        return acc

    def sidewash(self, y):
        zeta = np.asarray(y, dtype=float) + 1e-30j
        return -np.imag(self.chi(zeta))


class CharacteristicTransport:
    """Integrates D f = F along the linearised characteristics x - U t.

    ``field_family(x, t)`` must return the AccelerationField of the
    station at x evaluated at time t; ``inlet(t)`` returns the known
    velocity field at the start station (or None for zero inlet data).
    """

    def __init__(self, field_family, U: float, x_start: float, inlet=None,
                 n_nodes: int = 32, check_resolution: bool = True,
                 resolution_tol: float = 1e-8):
        if U <= 0:
            raise DomainError("characteristic transport needs U > 0")
        self.family = field_family
        self.U = float(U)
        self.x_start = float(x_start)
        self.inlet = inlet
        self.n_nodes = int(n_nodes)
        self.check_resolution = check_resolution
        self.resolution_tol = resolution_tol

    def _terms(self, x, t, n):
        nodes, wts = np.polynomial.legendre.leggauss(n)
        xs = self.x_start + 0.5 * (nodes + 1.0) * (x - self.x_start)
        ws = wts * 0.5 * (x - self.x_start) / self.U
        return [(w, self.family(xp, t - (x - xp) / self.U))
                for xp, w in zip(xs, ws)]

    def field_at(self, x: float, t: float) -> TransportedField:
        if x < self.x_start:
            raise DomainError("station lies upstream of the start station")
        inlet_field = None
        if self.inlet is not None:
            inlet_field = self.inlet(t - (x - self.x_start) / self.U)
        terms = self._terms(x, t, self.n_nodes)
        field = TransportedField(terms, inlet_field, x, t)
        if self.check_resolution and x > self.x_start:
            fine = TransportedField(self._terms(x, t, 2 * self.n_nodes),
                                    inlet_field, x, t)
            probe = 2.5j * max(abs(x), 1.0)
            coarse_v, fine_v = field.chi(probe), fine.chi(probe)
            scale = abs(fine_v) + 1e-30
            if abs(coarse_v - fine_v) > self.resolution_tol * (1.0 + scale):
                raise StepResolutionError(
                    "characteristic quadrature unresolved: refine n_nodes "
                    f"(change {abs(coarse_v - fine_v):.3e})")
        return field
