"""N-soliton tau function on the cnoidal background and u = 2 (ln tau)_xx.

The tau function is

    tau(x,t) = exp(-zeta(varpi3) x^2 / (8 varpi3))
               * det[1_N + G(x,t)] * theta3((x - x0)/(4 i varpi3) - A)

with background shift A = (1/2) sum_j (beta_j - beta_j^star) and

    G_lm = theta3(beta_l - beta_m^star + y - A)
           / (theta1(beta_m^star - beta_l) theta3(y - A))
           * sqrt(C_l C_m) exp(i pi (psi_l + psi_m)),

    psi_j = (x - x_j) P_j / (2 pi) + t E_j / (2 pi),
    y     = (x - x0) / (4 i varpi3).

Norming constants are kept positive,

    C_l = |theta1(beta_l - beta_l^star)|
          * prod_{k != l} |theta1(beta_k - beta_l^star) / theta1(beta_k - beta_l)|,

and the sign that the literal theta1(beta_l - beta_l^star) < 0 would carry is
absorbed by writing the denominator as theta1(beta_m^star - beta_l).  With
this pairing det[1 + G] reproduces the Fredholm expansion of the degenerated
Riemann theta term by term (the diagonal entries come out positive, matching
the two-addenda single-soliton form).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fd
from .elliptic import (
    CurveParams,
    JacobianPoint,
    invert_wp,
    log_theta1_derivatives,
    theta1,
    theta3,
    weierstrass,
    wp_on_segment,
    zeta_half_period,
)
from .errors import (
    BackgroundThetaZero,
    DuplicateSpectralPoint,
    GridTooCoarse,
    NonRealTau,
    PhaseOverflow,
)

_EXP_GUARD = 600.0
_REALITY_TOL = 1e-9


@dataclass(frozen=True)
class SpectralEntry:
    """One soliton: spectral point, Jacobian data, phase rates, norming."""

    b: float
    point: JacobianPoint
    beta: complex
    beta_star: complex
    P: complex            # quasi-momentum, in i*R_+
    E: complex            # quasi-energy, purely imaginary
    C_norm: float         # positive norming constant
    x_shift: float

    @property
    def p_abs(self) -> float:
        return self.P.imag

    @property
    def velocity(self) -> float:
        return -self.E.imag / self.P.imag


@dataclass(frozen=True)
class SolitonSpectrum:
    curve: CurveParams
    entries: tuple[SpectralEntry, ...]
    x0: float
    background_shift_A: float

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TauContext:
    """Everything needed to evaluate tau(x, t)."""

    curve: CurveParams
    spectrum: SolitonSpectrum
    quad_const: float     # C = zeta(varpi3) / (8 varpi3), real
    P_carrier: float      # -i pi / (2 varpi3), positive real

    @property
    def fd_step(self) -> float:
        # scale-aware step for the det-term second derivative
        return 1e-3 * self.curve.period_x


def quasi_momentum(point: JacobianPoint, curve: CurveParams) -> complex:
    """P(beta) = theta1'(beta)/theta1(beta)/(2 varpi3) + chi i pi/(2 varpi3)."""
    d1, _, _ = log_theta1_derivatives(point.beta, curve.tau)
    return d1 / (2.0 * curve.varpi3) + point.chi * 1j * np.pi / (2.0 * curve.varpi3)


def quasi_momentum_zeta_form(point: JacobianPoint, curve: CurveParams) -> complex:
    """Equivalent zeta-function form zeta(2 varpi3 b) - 2 zeta(varpi3) b (+ chi term)."""
    _, _, zw = weierstrass(2.0 * curve.varpi3 * point.beta, curve)
    z3 = zeta_half_period(curve)
    return zw - 2.0 * z3 * point.beta + point.chi * 1j * np.pi / (2.0 * curve.varpi3)


def quasi_energy(point: JacobianPoint, curve: CurveParams) -> complex:
    """E(beta) = -wp'(2 varpi3 beta) / 2."""
    _, wpp, _ = weierstrass(2.0 * curve.varpi3 * point.beta, curve)
    return -0.5 * wpp


def norming_constants(points: list[JacobianPoint], curve: CurveParams) -> np.ndarray:
    tau_mod = curve.tau
    betas = [p.beta for p in points]
    stars = [p.star(tau_mod) for p in points]
    out = np.empty(len(points))
    for l in range(len(points)):
        c = abs(theta1(betas[l] - stars[l], tau_mod))
        for k in range(len(points)):
            if k == l:
                continue
            c *= abs(theta1(betas[k] - stars[l], tau_mod) / theta1(betas[k] - betas[l], tau_mod))
        out[l] = c
    return out


def spectrum_from_points(curve: CurveParams, points: list[tuple[JacobianPoint, float]],
                         x0: float = 0.0) -> SolitonSpectrum:
    """Assemble a SolitonSpectrum from Jacobian points with x-shifts."""
    jps = [p for p, _ in points]
    half_im = curve.tau.imag / 2.0
    for p in jps:
        if not 0.0 < p.beta.real < 0.5:
            raise ValueError(f"Re(beta) = {p.beta.real} outside (0, 1/2)")
        if abs(p.beta.imag - p.chi * half_im) > 1e-12:
            raise ValueError(f"Im(beta) = {p.beta.imag} off the {p.kind} segment")
    for i in range(len(jps)):
        for j in range(i + 1, len(jps)):
            if abs(jps[i].beta - jps[j].beta) < 1e-10:
                raise DuplicateSpectralPoint(f"beta_{i} and beta_{j} coincide")
    cs = norming_constants(jps, curve)
    entries = []
    for (pt, x_shift), c in zip(points, cs):
        P = quasi_momentum(pt, curve)
        if abs(P.real) > 1e-12 * abs(P) or P.imag <= 0.0:
            raise NonRealTau(f"quasi-momentum {P} not in i*R_+")
        E = quasi_energy(pt, curve)
        entries.append(SpectralEntry(
            b=wp_on_segment(pt, curve),
            point=pt,
            beta=pt.beta,
            beta_star=pt.star(curve.tau),
            P=complex(0.0, P.imag),
            E=complex(0.0, E.imag),
            C_norm=float(c),
            x_shift=x_shift,
        ))
    shift_a = 0.5 * sum(e.point.mu() for e in entries)
    return SolitonSpectrum(curve=curve, entries=tuple(entries), x0=x0,
                           background_shift_A=shift_a)


def build_spectrum(curve: CurveParams, points: list[tuple[float, float]],
                   x0: float = 0.0) -> SolitonSpectrum:
    """SolitonSpectrum from physical spectral points (b, x_shift)."""
    bs = [b for b, _ in points]
    for i in range(len(bs)):
        for j in range(i + 1, len(bs)):
            if abs(bs[i] - bs[j]) < 1e-10 * max(1.0, abs(bs[i])):
                raise DuplicateSpectralPoint(f"b_{i} = b_{j} = {bs[i]}")
    jac = [(invert_wp(b, curve), xs) for b, xs in points]
    return spectrum_from_points(curve, jac, x0=x0)


def build_context(curve: CurveParams, spectrum: SolitonSpectrum) -> TauContext:
    z3 = zeta_half_period(curve)
    quad = z3 / (8.0 * curve.varpi3)
    if abs(quad.imag) > 1e-12 * max(1.0, abs(quad)):
        raise NonRealTau(f"quadratic constant {quad} not real")
    p_carrier = -1j * np.pi / (2.0 * curve.varpi3)
    return TauContext(curve=curve, spectrum=spectrum,
                      quad_const=float(quad.real), P_carrier=float(p_carrier.real))


# ----------------------------------------------------------------------------
# G matrix and determinant evaluation
# ----------------------------------------------------------------------------

def _background_theta(ctx: TauContext, xs: np.ndarray, order: int = 0):
    y = (xs - ctx.spectrum.x0) / (4j * ctx.curve.varpi3)
    return theta3(y.real - ctx.spectrum.background_shift_A, ctx.curve.tau, order)


def _a_tensor(ctx: TauContext, xs: np.ndarray) -> np.ndarray:
    """A_lm(x) = th3(beta_l - beta_m* + y - A) / (th1(beta_m* - beta_l) th3(y - A))."""
    sp = ctx.spectrum
    n = len(sp)
    xs = np.asarray(xs, dtype=float)
    y = (xs - sp.x0) / (4j * ctx.curve.varpi3)
    ybg = y.real - sp.background_shift_A
    th_bg = theta3(ybg, ctx.curve.tau)
    if np.min(np.abs(th_bg)) < 1e-13:
        raise BackgroundThetaZero("theta3 of the background phase vanished")
    a = np.empty((xs.size, n, n), dtype=complex)
    for l, el in enumerate(sp.entries):
        for m, em in enumerate(sp.entries):
            num = theta3(el.beta - em.beta_star + ybg, ctx.curve.tau)
            den = theta1(em.beta_star - el.beta, ctx.curve.tau)
            a[:, l, m] = num / (den * th_bg)
    return a


def _phase_exponents(ctx: TauContext, xs: np.ndarray, t: float) -> np.ndarray:
    """Real exponents of exp(i pi psi_j) at each x: shape (nx, N)."""
    sp = ctx.spectrum
    p = np.array([e.p_abs for e in sp.entries])
    ei = np.array([e.E.imag for e in sp.entries])
    xsh = np.array([e.x_shift for e in sp.entries])
    expo = -0.5 * (np.subtract.outer(np.asarray(xs, dtype=float), xsh) * p + t * ei)
    if expo.size and float(np.max(np.abs(expo))) > _EXP_GUARD:
        raise PhaseOverflow("soliton phase exponent exceeds double-precision range")
    return expo


def g_matrix(ctx: TauContext, x: float, t: float) -> np.ndarray:
    """The N x N matrix G(x, t) of the Fredholm determinant."""
    a = _a_tensor(ctx, np.array([x]))[0]
    expo = _phase_exponents(ctx, np.array([x]), t)[0]
    sqrt_c = np.sqrt([e.C_norm for e in ctx.spectrum.entries])
    d = sqrt_c * np.exp(expo)
    return a * np.outer(d, d)


def g_matrix_from_phases(spectrum: SolitonSpectrum, psis, beta_phase: float) -> np.ndarray:
    """G with free phases: psi_j the soliton phases, beta_phase the carrier one.

    Used by the degeneration experiments, where the phases are not tied to
    (x, t).
    """
    curve = spectrum.curve
    n = len(spectrum)
    psis = np.asarray(psis, dtype=complex)
    shift_a = spectrum.background_shift_A
    th_bg = theta3(beta_phase - shift_a, curve.tau)
    if abs(th_bg) < 1e-13:
        raise BackgroundThetaZero("theta3 of the carrier phase vanished")
    d = np.sqrt([e.C_norm for e in spectrum.entries]) * np.exp(1j * np.pi * psis)
    g = np.empty((n, n), dtype=complex)
    for l, el in enumerate(spectrum.entries):
        for m, em in enumerate(spectrum.entries):
            num = theta3(el.beta - em.beta_star + beta_phase - shift_a, curve.tau)
            den = theta1(em.beta_star - el.beta, curve.tau)
            g[l, m] = num / (den * th_bg) * d[l] * d[m]
    return g


def fredholm_factor(spectrum: SolitonSpectrum, psis, beta_phase: float) -> complex:
    """det(1 + G) * theta3(beta - A), the degeneration limit of the theta sum."""
    n = len(spectrum)
    th_bg = theta3(beta_phase - spectrum.background_shift_A, spectrum.curve.tau)
    if n == 0:
        return th_bg
    g = g_matrix_from_phases(spectrum, psis, beta_phase)
    return complex(np.linalg.det(np.eye(n) + g) * th_bg)


def _g_stack(ctx: TauContext, xs: np.ndarray, t: float,
             a: np.ndarray | None = None) -> np.ndarray:
    if a is None:
        a = _a_tensor(ctx, xs)
    expo = _phase_exponents(ctx, xs, t)
    sqrt_c = np.sqrt([e.C_norm for e in ctx.spectrum.entries])
    d = sqrt_c[None, :] * np.exp(expo)
    return a * d[:, :, None] * d[:, None, :]


def _det_one_plus_g(ctx: TauContext, xs: np.ndarray, t: float,
                    a: np.ndarray | None = None) -> np.ndarray:
    """det(1 + G) at each x, asserted real; returns a real array."""
    n = len(ctx.spectrum)
    xs = np.asarray(xs, dtype=float)
    if n == 0:
        return np.ones(xs.size)
    g = _g_stack(ctx, xs, t, a)
    if n == 1:
        det = 1.0 + g[:, 0, 0]
    elif n == 2:
        det = (1.0 + g[:, 0, 0]) * (1.0 + g[:, 1, 1]) - g[:, 0, 1] * g[:, 1, 0]
    else:
        det = np.linalg.det(np.eye(n)[None, :, :] + g)
    scale = np.abs(det) + 1.0
    if float(np.max(np.abs(det.imag) / scale)) > _REALITY_TOL:
        raise NonRealTau("det(1 + G) has a non-negligible imaginary part")
    return det.real


def _logdet_one_plus_g(ctx: TauContext, xs: np.ndarray, t: float,
                       a: np.ndarray | None = None) -> np.ndarray:
    """ln det(1 + G); goes through slogdet for N > 2 so wide phase ranges
    cannot overflow the determinant value itself."""
    n = len(ctx.spectrum)
    xs = np.asarray(xs, dtype=float)
    if n <= 2:
        det = _det_one_plus_g(ctx, xs, t, a)
        if np.min(det) <= 0.0:
            raise NonRealTau("det(1 + G) not positive on the evaluation grid")
        return np.log(det)
    g = _g_stack(ctx, xs, t, a)
    sign, logabs = np.linalg.slogdet(np.eye(n)[None, :, :] + g)
    if float(np.max(np.abs(sign - 1.0))) > _REALITY_TOL:
        raise NonRealTau("det(1 + G) not real positive on the evaluation grid")
    return logabs


def tau_grid(ctx: TauContext, xs, t: float) -> tuple[np.ndarray, np.ndarray]:
    """(tau, det(1+G)) on an array of x values at fixed t; both real arrays."""
    xs = np.asarray(xs, dtype=float)
    det = _det_one_plus_g(ctx, xs, t)
    th = _background_theta(ctx, xs)
    vals = np.exp(-ctx.quad_const * xs * xs) * det * th
    if float(np.max(np.abs(vals.imag) / (np.abs(vals) + 1e-300))) > _REALITY_TOL:
        raise NonRealTau("tau has a non-negligible imaginary part")
    return vals.real, det


def tau_eval(ctx: TauContext, x: float, t: float) -> float:
    """tau(x, t), real by construction (imaginary part asserted small)."""
    return float(tau_grid(ctx, np.array([x]), t)[0][0])


def u_background(ctx: TauContext, xs) -> np.ndarray:
    """Cnoidal part 2 d^2/dx^2 ln theta3(y - A) - zeta(varpi3)/(2 varpi3)."""
    xs = np.asarray(xs, dtype=float)
    t0 = _background_theta(ctx, xs, 0)
    t1 = _background_theta(ctx, xs, 1)
    t2 = _background_theta(ctx, xs, 2)
    d2log = (t2 / t0 - (t1 / t0) ** 2).real
    w3_abs = abs(ctx.curve.varpi3)
    return d2log / (8.0 * w3_abs * w3_abs) - 4.0 * ctx.quad_const


def _logdet_stencil(ctx: TauContext, xs: np.ndarray, t: float,
                    h: float | None = None) -> np.ndarray:
    """ln det(1 + G) at xs + k*h for k = -2..2; shape (nx, 5)."""
    if h is None:
        h = ctx.fd_step
    xs = np.asarray(xs, dtype=float)
    grid = (xs[:, None] + h * fd.D2_OFFSETS[None, :]).ravel()
    return _logdet_one_plus_g(ctx, grid, t).reshape(xs.size, 5)


def u_eval(ctx: TauContext, x: float, t: float) -> float:
    return float(u_grid(ctx, np.array([x]), t)[0])


def u_grid(ctx: TauContext, xs, t: float, richardson: bool = False) -> np.ndarray:
    """u(x, t) on an array of x values at fixed t.

    With richardson=True the determinant term combines the h and h/2
    stencils, cancelling the leading h^4 error of the shared engine.
    """
    xs = np.asarray(xs, dtype=float)
    u = u_background(ctx, xs)
    if len(ctx.spectrum) > 0:
        h = ctx.fd_step
        d2 = fd.second_derivative(_logdet_stencil(ctx, xs, t, h), h)
        if richardson:
            fine = fd.second_derivative(_logdet_stencil(ctx, xs, t, h / 2.0), h / 2.0)
            d2 = (16.0 * fine - d2) / 15.0
        u = u + 2.0 * d2
    return u


def logdet_x_analytic(ctx: TauContext, x: float, t: float) -> float:
    """d/dx ln det(1 + G) as trace((1+G)^{-1} dG/dx), fully analytic.

    Cross-check mode for the finite-difference engine: dG/dx follows from
    the theta log-derivatives of the numerator and background arguments plus
    the linear phase rates.
    """
    sp = ctx.spectrum
    n = len(sp)
    if n == 0:
        return 0.0
    curve = ctx.curve
    w4 = 4.0 * abs(curve.varpi3)
    y = (x - sp.x0) / w4 - sp.background_shift_A
    ld_bg = (theta3(y, curve.tau, 1) / theta3(y, curve.tau)) / w4
    g = g_matrix(ctx, x, t)
    rates = np.empty((n, n), dtype=complex)
    for l, el_ in enumerate(sp.entries):
        for m, em in enumerate(sp.entries):
            arg = el_.beta - em.beta_star + y
            ld_num = (theta3(arg, curve.tau, 1) / theta3(arg, curve.tau)) / w4
            rates[l, m] = ld_num - ld_bg - 0.5 * (el_.p_abs + em.p_abs)
    val = np.trace(np.linalg.solve(np.eye(n) + g, g * rates))
    if abs(val.imag) > _REALITY_TOL * (1.0 + abs(val)):
        raise NonRealTau(f"analytic log-derivative {val} not real")
    return float(val.real)


def u_field(ctx: TauContext, xs, ts) -> np.ndarray:
    """u sampled on a (t, x) grid; shape (nt, nx)."""
    xs = np.asarray(xs, dtype=float)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    out = np.empty((ts.size, xs.size))
    n = len(ctx.spectrum)
    ubg = u_background(ctx, xs)
    if n == 0:
        out[:] = ubg[None, :]
        return out
    h = ctx.fd_step
    grid = (xs[:, None] + h * fd.D2_OFFSETS[None, :]).ravel()
    a = _a_tensor(ctx, grid)
    for i, t in enumerate(ts):
        ld = _logdet_one_plus_g(ctx, grid, float(t), a=a).reshape(xs.size, 5)
        out[i] = ubg + 2.0 * fd.second_derivative(ld, h)
    return out


def kdv_residual(ctx: TauContext, x_span: tuple[float, float], nx: int,
                 t_span: tuple[float, float], nt: int) -> float:
    """max |u_t + u_xxx + 6 u u_x| over the interior of the sampled grid.

    All derivatives by the shared 4th-order stencils on the u field; the
    grid is extended by ghost layers so the requested span is fully interior.
    """
    if nx < 2 or nt < 2:
        raise GridTooCoarse("need at least 2 points per direction")
    dx = (x_span[1] - x_span[0]) / (nx - 1)
    dt = (t_span[1] - t_span[0]) / (nt - 1)
    if dx > ctx.curve.period_x / 9.0:
        raise GridTooCoarse(f"dx = {dx} under-resolves the cnoidal period")
    xs = x_span[0] + dx * np.arange(-3, nx + 3)
    ts = t_span[0] + dt * np.arange(-2, nt + 2)
    u = u_field(ctx, xs, ts)
    u_t = fd.first_derivative_axis(u, dt, axis=0)          # (nt, nx+6)
    u_x = fd.first_derivative_axis(u, dx, axis=1)[2:-2]    # (nt, nx+2)
    u_xxx = fd.third_derivative_axis(u, dx, axis=1)[2:-2]  # (nt, nx)
    mid = u[2:-2, 3:-3]
    resid = u_t[:, 3:-3] + u_xxx + 6.0 * mid * u_x[:, 1:-1]
    return float(np.max(np.abs(resid)))
