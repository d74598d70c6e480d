"""Nonlinear dispersion relations for the KdV soliton gas on the background.

The solitonic NDR pair couples the density of states u and flux v on a
spectral support Gamma in the Jacobian coordinate:

    int K(eta, beta) u(beta) dbeta + sigma(eta) u(eta) = -(i/2) [zeta(2 varpi3 eta)
        - 2 zeta(varpi3) eta + i pi chi(eta)/(2 varpi3)]
    int K(eta, beta) v(beta) dbeta + sigma(eta) v(eta) = (i/4) wp'(2 varpi3 eta)

with interaction kernel K(eta, beta) = ln|theta1(eta - beta)/theta1(eta - beta^star)|.
Both right-hand sides are real (the brackets are purely imaginary); the kernel
has an integrable ln|eta - beta| singularity on the diagonal, handled by a
Nystrom discretization in which the logarithmic part is integrated exactly
against piecewise-linear hat functions and the smooth remainder by the
matching trapezoid weights.

The tracer speed is s(eta) = -v(eta)/u(eta); the equation of state

    s(eta) = s0(eta) + int Delta(eta, beta) [s(eta) - s(beta)] u(beta) dbeta

is an algebraic consequence of the NDR pair, so its residual measures
discretization error only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .elliptic import CurveParams, JacobianPoint, theta1, weierstrass, zeta_half_period
from .errors import (
    DiagonalSingularity,
    NegativeDensityWarning,
    SingularSystem,
    ZeroDensityNode,
)
from .tau import quasi_momentum

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class GasInterval:
    """One support interval, fully inside the hot (chi=0) or cool (chi=1) segment."""

    chi: int
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 < self.lo < self.hi < 0.5:
            raise ValueError(f"interval ({self.lo}, {self.hi}) not inside (0, 1/2)")


@dataclass(frozen=True)
class GasModel:
    """Discretized gas: support, quadrature, sigma, and (after solving) u, v, s."""

    curve: CurveParams
    intervals: tuple[GasInterval, ...]
    n_per_interval: int
    nodes_r: np.ndarray          # real parts of the nodes
    nodes_chi: np.ndarray        # segment flag per node
    weights: np.ndarray          # trapezoid weights
    sigma: np.ndarray
    solved_u: np.ndarray | None = None
    solved_v: np.ndarray | None = None
    carrier_k: float | None = None
    carrier_w: float | None = None

    @property
    def betas(self) -> np.ndarray:
        return self.nodes_r + self.nodes_chi * self.curve.tau / 2.0

    @property
    def mus(self) -> np.ndarray:
        """beta - beta^star per node, the real numbers 2 r - 1."""
        return 2.0 * self.nodes_r - 1.0

    @property
    def speeds(self) -> np.ndarray:
        if self.solved_u is None:
            raise ZeroDensityNode("model not solved")
        if np.min(np.abs(self.solved_u)) < 1e-14:
            raise ZeroDensityNode("density of states vanishes at a node")
        return -self.solved_v / self.solved_u

    def jacobian_point(self, i: int) -> JacobianPoint:
        chi = int(self.nodes_chi[i])
        beta = self.nodes_r[i] + chi * self.curve.tau / 2.0
        return JacobianPoint(beta=complex(beta), chi=chi)


def interval_from_physical(curve: CurveParams, b_lo: float, b_hi: float) -> GasInterval:
    """Support interval from a physical spectral interval, endpoint-wise.

    Hot intervals (b < e3) map orientation-preservingly, cool ones
    (e2 < b < e1) reverse because wp decreases along that segment.
    """
    from .elliptic import invert_wp

    if not b_lo < b_hi:
        raise ValueError("need b_lo < b_hi")
    lo_pt = invert_wp(b_lo, curve)
    hi_pt = invert_wp(b_hi, curve)
    if lo_pt.chi != hi_pt.chi:
        raise ValueError("interval endpoints on different segments")
    r1, r2 = sorted((lo_pt.beta.real, hi_pt.beta.real))
    return GasInterval(lo_pt.chi, r1, r2)


def build_model(curve: CurveParams, intervals: list[GasInterval], sigma,
                n_per_interval: int = 64) -> GasModel:
    """Uniform nodes (endpoints included) with trapezoid weights per interval.

    sigma may be a scalar, an array over all nodes, or a callable of beta.
    """
    if n_per_interval < 8:
        raise ValueError("need at least 8 nodes per interval")
    rs, chis, ws = [], [], []
    for iv in intervals:
        r = np.linspace(iv.lo, iv.hi, n_per_interval)
        h = r[1] - r[0]
        w = np.full(n_per_interval, h)
        w[0] = w[-1] = h / 2.0
        rs.append(r)
        chis.append(np.full(n_per_interval, iv.chi, dtype=int))
        ws.append(w)
    nodes_r = np.concatenate(rs)
    nodes_chi = np.concatenate(chis)
    weights = np.concatenate(ws)
    if callable(sigma):
        sig = np.array([float(sigma(r + c * curve.tau / 2.0))
                        for r, c in zip(nodes_r, nodes_chi)])
    else:
        sig = np.broadcast_to(np.asarray(sigma, dtype=float), nodes_r.shape).copy()
    if np.min(sig) < 0.0:
        raise ValueError("sigma must be nonnegative")
    return GasModel(curve=curve, intervals=tuple(intervals),
                    n_per_interval=n_per_interval, nodes_r=nodes_r,
                    nodes_chi=nodes_chi, weights=weights, sigma=sig)


def interaction_kernel(eta: JacobianPoint, beta: JacobianPoint, curve: CurveParams) -> float:
    """ln|theta1(eta - beta) / theta1(eta - beta^star)|."""
    if abs(eta.beta - beta.beta) < 1e-13:
        raise DiagonalSingularity("kernel evaluated at eta == beta")
    num = theta1(eta.beta - beta.beta, curve.tau)
    den = theta1(eta.beta - beta.star(curve.tau), curve.tau)
    return float(np.log(abs(num / den)))


def free_speed_s0(eta: JacobianPoint, curve: CurveParams) -> float:
    """Free tracer speed; coincides with the group velocity formula."""
    s = 2.0 * curve.varpi3 * eta.beta
    _, wpp, zw = weierstrass(s, curve)
    denom = (zw - 2.0 * zeta_half_period(curve) * eta.beta
             + eta.chi * 1j * np.pi / (2.0 * curve.varpi3))
    return float((0.5 * wpp / denom).real)


def _hat_log_integrals(nodes: np.ndarray, x0: float) -> np.ndarray:
    """Exact integrals of ln|x0 - r| against the hat functions on the nodes."""

    def f1(u):
        return np.where(u == 0.0, 0.0, u * (np.log(np.abs(u) + (u == 0.0)) - 1.0))

    def f2(u):
        return np.where(u == 0.0, 0.0, 0.5 * u * u * np.log(np.abs(u) + (u == 0.0)) - 0.25 * u * u)

    n = nodes.size
    h = nodes[1] - nodes[0]
    out = np.zeros(n)

    def rising(a, b):
        # integral over [a, b] of (r - a)/h * ln|r - x0|
        ua, ub = a - x0, b - x0
        return ((f2(ub) - f2(ua)) + (x0 - a) * (f1(ub) - f1(ua))) / h

    def falling(a, b):
        # integral over [a, b] of (b - r)/h * ln|r - x0|
        ua, ub = a - x0, b - x0
        return ((b - x0) * (f1(ub) - f1(ua)) - (f2(ub) - f2(ua))) / h

    for j in range(n):
        if j > 0:
            out[j] += rising(nodes[j - 1], nodes[j])
        if j < n - 1:
            out[j] += falling(nodes[j], nodes[j + 1])
    return out


def _theta1_prime0(curve: CurveParams) -> float:
    return float(theta1(0.0, curve.tau, 1).real)


def kernel_row(model: GasModel, eta: JacobianPoint) -> np.ndarray:
    """Quadrature row: sum_j row[j] g_j ~ int K(eta, beta) g(beta) dbeta.

    On same-segment blocks the kernel is split as ln|r_eta - r| plus a smooth
    remainder; the logarithm is integrated exactly against the hat functions,
    the remainder by the trapezoid weights.
    """
    curve = model.curve
    tau_mod = curve.tau
    betas = model.betas
    stars = 1.0 - betas + model.nodes_chi * tau_mod
    row = np.zeros(model.nodes_r.size)
    th1p0 = _theta1_prime0(curve)
    per = model.n_per_interval
    for bi, iv in enumerate(model.intervals):
        cols = slice(bi * per, (bi + 1) * per)
        r_col = model.nodes_r[cols]
        w_col = model.weights[cols]
        diff = eta.beta - betas[cols]
        denom = np.abs(theta1(eta.beta - stars[cols], tau_mod))
        if eta.chi == iv.chi:
            x0 = eta.beta.real
            sep = x0 - r_col
            tiny = np.abs(sep) < 1e-13
            ratio = np.where(tiny, th1p0,
                             np.abs(theta1(diff, tau_mod)) / np.abs(sep + tiny))
            smooth = np.log(ratio) - np.log(denom)
            row[cols] = w_col * smooth + _hat_log_integrals(r_col, x0)
        else:
            row[cols] = w_col * (np.log(np.abs(theta1(diff, tau_mod))) - np.log(denom))
    return row


def kernel_matrix(model: GasModel) -> np.ndarray:
    """Quadrature matrix A with sum_j A[i, j] g_j ~ int K(eta_i, beta) g(beta) dbeta."""
    return np.stack([kernel_row(model, model.jacobian_point(i))
                     for i in range(model.nodes_r.size)])


def _rhs_vectors(model: GasModel) -> tuple[np.ndarray, np.ndarray]:
    """Real right-hand sides (p/2 for u, (i/4) wp' for v), reality asserted."""
    curve = model.curve
    n = model.nodes_r.size
    rhs_u = np.empty(n)
    rhs_v = np.empty(n)
    for i in range(n):
        pt = model.jacobian_point(i)
        p = quasi_momentum(pt, curve)
        val_u = -0.5j * p
        _, wpp, _ = weierstrass(2.0 * curve.varpi3 * pt.beta, curve)
        val_v = 0.25j * wpp
        for val in (val_u, val_v):
            if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
                raise SingularSystem(f"NDR right-hand side {val} not real")
        rhs_u[i] = val_u.real
        rhs_v[i] = val_v.real
    return rhs_u, rhs_v


def ndr_solve(model: GasModel) -> GasModel:
    """Solve the discretized NDR pair; returns a model with u, v filled in."""
    a = kernel_matrix(model)
    m = a + np.diag(model.sigma)
    cond = np.linalg.cond(m)
    if cond > _COND_LIMIT:
        raise SingularSystem(f"condition number {cond:.3e}")
    rhs_u, rhs_v = _rhs_vectors(model)
    u = np.linalg.solve(m, rhs_u)
    v = np.linalg.solve(m, rhs_v)
    for sol, rhs in ((u, rhs_u), (v, rhs_v)):
        defect = float(np.max(np.abs(m @ sol - rhs)))
        if defect > 1e-9 * (1.0 + float(np.max(np.abs(rhs)))):
            raise SingularSystem(f"solve defect {defect}")
    if np.min(u) < -1e-8:
        warnings.warn(f"density of states dips to {np.min(u)}", NegativeDensityWarning)
    return replace(model, solved_u=u, solved_v=v)


def carrier_quantities(model: GasModel) -> tuple[float, float]:
    """(k_tilde, w_tilde): carrier wave number and frequency of the gas."""
    if model.solved_u is None:
        raise ZeroDensityNode("model not solved")
    mus = model.mus
    base = 1.0 / (2.0 * abs(model.curve.varpi3))   # -i/(2 varpi3) as a real number
    k = 2.0 * np.pi * (np.sum(model.weights * mus * model.solved_u) + base)
    w = 2.0 * np.pi * np.sum(model.weights * mus * model.solved_v)
    return float(k), float(w)


def equation_of_state_residual(model: GasModel) -> float:
    """max_i |s_i - s0_i - int Delta(eta_i, beta)[s_i - s(beta)] u(beta) dbeta|.

    Delta(eta, beta) = i ln|theta1(eta-beta)/theta1(eta-beta^star)|^2 / P(eta)
    equals 2 K(eta, beta)/|P(eta)|; the integral reuses the log-subtracted
    quadrature, so the residual measures discretization only.
    """
    s = model.speeds
    a = kernel_matrix(model)
    out = 0.0
    for i in range(model.nodes_r.size):
        pt = model.jacobian_point(i)
        p_expr = quasi_momentum(pt, model.curve)     # purely imaginary, i |P|
        s0 = free_speed_s0(pt, model.curve)
        g = (s[i] - s) * model.solved_u
        integral = (2.0 / p_expr.imag) * float(a[i] @ g)
        out = max(out, abs(s[i] - s0 - integral))
    return out


def tracer_shift(model: GasModel, density: np.ndarray, eta: JacobianPoint) -> float:
    """Average total shift of a tracer soliton against the gas density.

    density holds the per-unit-beta soliton density on the model nodes (a
    unit-mass bump stands for one partner soliton); the prefactor 2/|P(eta)|
    matches the per-partner term of the averaged total-shift schedule.  The
    kernel integral reuses the log-subtracted row quadrature, applied to the
    sign-weighted density (slower partners push forward, faster ones back).
    """
    curve = model.curve
    density = np.asarray(density, dtype=float)
    p_abs = quasi_momentum(eta, curve).imag
    b_eta = weierstrass(2.0 * curve.varpi3 * eta.beta, curve)[0].real
    # velocity decreases monotonically with b on both segments, so b_eta > b
    # flags a faster partner; faster partners carry +K (push the tracer back,
    # K <= 0), matching the per-partner terms of the total-shift schedule
    signs = np.empty(model.nodes_r.size)
    for j in range(model.nodes_r.size):
        b_j = weierstrass(2.0 * curve.varpi3 * model.betas[j], curve)[0].real
        signs[j] = np.sign(b_eta - b_j)
    row = kernel_row(model, eta)
    return float((2.0 / p_abs) * (row @ (signs * density)))


def background_shift_rate(model: GasModel, density: np.ndarray) -> float:
    """Large-N background-shift rate A/N = int (beta - beta^star)/2 density dbeta."""
    density = np.asarray(density, dtype=float)
    return float(np.sum(model.weights * (model.mus / 2.0) * density))


def density_from_physical(model: GasModel, phys_density) -> np.ndarray:
    """Convert a density in the physical variable b to the beta coordinate.

    Applies the Jacobian factor 2 varpi3 wp'(2 varpi3 beta), which is real
    on both segments.
    """
    out = np.empty(model.nodes_r.size)
    for j in range(model.nodes_r.size):
        pt = model.jacobian_point(j)
        wp, wpp, _ = weierstrass(2.0 * model.curve.varpi3 * pt.beta, model.curve)
        jac = (2.0 * model.curve.varpi3 * wpp).real
        out[j] = phys_density(wp.real) * abs(jac)
    return out
