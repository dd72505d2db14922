"""Noise spectral density, decoherence curves, and T2 extraction.

The pipeline is N(omega) = \int_0^inf dq/(2pi) W_d(q) S(q, omega) followed
by <phi^2> = \int domega/(2pi) W_tau(omega) N(omega).  The q-integral runs
innermost; N(omega) is smooth away from omega = 0, so it is cached on an
adaptive log-log grid with cubic interpolation while the oscillatory omega
integral is done per filter lobe (panel width pi/tau) with Gauss-Kronrod
panels, a smooth 1/omega^2-envelope tail continuation, and an omega = u^2
endpoint substitution for the integrable 1/sqrt(omega) divergence of the
critical conserved model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.optimize import brentq
from scipy.special import sici

from .filters import (GeometryConfig, PulseSequence, filter_function,
                      jump_weights, momentum_filter)
from .models import ModelA, ModelB, as_lorentzian_model, lorentzian_coupling, lorentzian_parameters
from .quadrature import QuadratureError, integrate, log_edges

__all__ = [
    "QubitParams",
    "NoiseSpectrum",
    "DecoherenceCurve",
    "NoiseInterpolant",
    "NoCrossingError",
    "noise_spectral_density",
    "sample_noise_spectrum",
    "phi_squared",
    "decoherence_curve",
    "coherence",
    "t2_extract",
    "cpmg_closed_form",
    "filter_weight_integral",
    "sequence_at",
]


@dataclass(frozen=True)
class QubitParams:
    """Probe qubit: coupling kappa = gamma/(2 hbar) and depolarization time T1."""

    kappa: float = 1.0
    t1: float = math.inf

    def __post_init__(self):
        if not (self.kappa >= 0.0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be finite and non-negative")
        if not self.t1 > 0.0:
            raise ValueError("T1 must be positive (inf allowed)")


@dataclass
class NoiseSpectrum:
    """Tabulated N(omega) samples with quadrature tolerance and provenance."""

    omegas: np.ndarray
    densities: np.ndarray
    errors: np.ndarray
    tol_q: float
    provenance: dict = field(default_factory=dict)


@dataclass
class DecoherenceCurve:
    """<phi^2>(tau) samples with per-point error estimates and provenance.

    Keeps a handle to the evaluator context so t2_extract can refine roots
    on the continuous curve instead of interpolating samples.
    """

    taus: np.ndarray
    phi_sq: np.ndarray
    errors: np.ndarray
    seq: PulseSequence | None = None
    model: object | None = None
    geom: GeometryConfig | None = None
    provenance: dict = field(default_factory=dict)
    _spectrum: object = None

    def evaluate(self, tau: float) -> float:
        """Continuous <phi^2>(tau), reusing the cached spectrum if present."""
        if self.seq is None or self.model is None or self.geom is None:
            raise ValueError("curve carries no evaluator context")
        tol = self.provenance.get("tol_omega", 1e-6)
        return phi_squared(tau, self.seq, self.model, self.geom,
                           tol_omega=tol, spectrum=self._spectrum)


class NoCrossingError(ValueError):
    """Curve does not span 2<phi^2> = 1; carries the end values."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


def sequence_at(seq: PulseSequence, tau: float) -> PulseSequence:
    """The same sequence shape rescaled to total time tau.

    Ramsey/CPMG keep their kind and pulse count; custom switch times are
    scaled by tau/seq.tau so the waveform shape is preserved.
    """
    if tau == seq.tau:
        return seq
    if seq.kind == "custom":
        scale = tau / seq.tau
        return PulseSequence.custom(scale * np.asarray(seq.switch_times), tau, seq.kappa)
    if seq.kind == "cpmg":
        return PulseSequence.cpmg(seq.n_pulses, tau, seq.kappa)
    return PulseSequence.ramsey(tau, seq.kappa)


def _is_critical_ab(model) -> bool:
    return isinstance(model, (ModelA, ModelB)) and math.isinf(model.xi)


def _resonance_q(model, omega: float) -> float | None:
    """Momentum where the mode relaxation rate crosses omega (if any)."""
    m = model
    if omega <= 0.0:
        return None
    if isinstance(m, ModelA):
        val = omega / (m.gamma0 * m.J) - m.inv_xi_sq
        return math.sqrt(val) if val > 0.0 else None
    if isinstance(m, ModelB):
        # sigma_s J q^2 (q^2 + xi^-2) = omega
        ix2 = m.inv_xi_sq
        q2 = 0.5 * (-ix2 + math.sqrt(ix2**2 + 4.0 * omega / (m.sigma_s * m.J)))
        return math.sqrt(q2) if q2 > 0.0 else None
    if hasattr(m, "D_s"):
        return math.sqrt(omega / m.D_s)
    if hasattr(m, "gamma_rate"):
        val = omega / m.gamma_rate - 1.0
        return math.sqrt(val) / m.xi if val > 0.0 else None
    return None


def noise_spectral_density(omega, model, geom: GeometryConfig, *,
                           tol_q: float = 1e-8, q_max: float | None = None,
                           full_output: bool = False):
    """N(omega) by adaptive quadrature over q in (0, q_max].

    q_max defaults to 40/d (kernel suppressed by e^{-80} there).  omega may
    be a scalar or an array; N is even in omega.  At a critical point
    (xi = inf, Model A/B) the q-integral diverges at omega = 0 and inf is
    returned for that entry rather than a silently unconverged number.
    """
    m = as_lorentzian_model(model)
    w_in = np.abs(np.asarray(omega, dtype=float))
    if not np.all(np.isfinite(w_in)):
        raise ValueError("omega must be finite")
    w = np.atleast_1d(w_in)
    out = np.zeros(w.shape)
    err = np.zeros(w.shape)

    d_min = float(np.min(geom.depths))
    if q_max is None:
        q_max = 40.0 / d_min

    if m.T == 0.0:
        pass  # classical FDT: no fluctuations at T = 0
    else:
        div = (w == 0.0) & _is_critical_ab(m)
        out[div] = math.inf
        todo = ~div
        if np.any(todo):
            # chunk by decade so resonance breakpoints stay shared
            wt = w[todo]
            order = np.argsort(wt)
            dec = np.floor(np.log10(np.maximum(wt[order], 1e-300)))
            dec[wt[order] == 0.0] = -np.inf
            vals = np.empty(wt.shape)
            errs = np.empty(wt.shape)
            start = 0
            for i in range(1, wt.size + 1):
                if i == wt.size or dec[i] != dec[start]:
                    sel = order[start:i]
                    v, e = _noise_chunk(m, geom, wt[sel], tol_q, q_max, d_min)
                    vals[sel] = v
                    errs[sel] = e
                    start = i
            out[todo] = vals
            err[todo] = errs

    if np.ndim(omega) == 0:
        return (float(out[0]), float(err[0])) if full_output else float(out[0])
    out = out.reshape(w_in.shape)
    err = err.reshape(w_in.shape)
    return (out, err) if full_output else out


def _noise_chunk(m, geom, w_chunk, tol_q, q_max, d_min):
    temp = m.T

    def integrand(q):
        _, r_q = lorentzian_parameters(m, q)
        num = 2.0 * temp * np.asarray(lorentzian_coupling(m, q))
        wd = momentum_filter(q, geom)
        den = r_q[:, None] ** 2 + w_chunk[None, :] ** 2
        return (wd * num / (2.0 * math.pi))[:, None] / den

    edges = [x / d_min for x in (0.05, 0.2, 0.5, 1.0, 1.5, 2.5, 4.0, 8.0, 16.0)]
    xi = getattr(m, "xi", math.inf)
    if math.isfinite(xi):
        edges.append(1.0 / xi)
    for wv in (float(w_chunk.min()), float(w_chunk.max())):
        qr = _resonance_q(m, wv)
        if qr is not None and 0.0 < qr < q_max:
            edges.append(qr)
            edges.append(0.5 * qr)
    vals, errs, _ = integrate(integrand, 0.0, q_max, rtol=tol_q,
                              edges=edges, max_panels=8192)
    return np.atleast_1d(vals), np.atleast_1d(errs)


def sample_noise_spectrum(model, geom: GeometryConfig, omegas, *,
                          tol_q: float = 1e-8) -> NoiseSpectrum:
    """Tabulate N(omega) with per-point error estimates."""
    w = np.asarray(omegas, dtype=float)
    vals, errs = noise_spectral_density(w, model, geom, tol_q=tol_q, full_output=True)
    return NoiseSpectrum(omegas=w, densities=vals, errors=errs, tol_q=tol_q,
                         provenance={"model": repr(model), "geometry": repr(geom)})


class NoiseInterpolant:
    """Adaptive log-log cubic cache of N(omega) for one (model, geometry).

    The grid is refined until midpoint checks meet `tol` relative error and
    is extended on demand when queried outside the covered range.  Beyond
    the grid the cache extrapolates linearly in log-log space, which is the
    exact power-law continuation of every model's 1/omega^2 UV tail.
    """

    def __init__(self, model, geom: GeometryConfig, *, tol: float = 1e-4,
                 tol_q: float = 1e-8, points_per_decade: int = 12):
        self.model = as_lorentzian_model(model)
        self.geom = geom
        self.tol = tol
        self.tol_q = tol_q
        self.ppd = points_per_decade
        self.zero = self.model.T == 0.0
        self._logw = None
        self._logn = None
        self._spline = None
        self.n_exact_calls = 0

    def _exact(self, w):
        self.n_exact_calls += w.size
        return noise_spectral_density(w, self.model, self.geom, tol_q=self.tol_q)

    def _rebuild(self):
        self._spline = CubicSpline(self._logw, self._logn, bc_type="natural")

    def _insert(self, logw_new):
        n = np.log10(np.maximum(self._exact(10.0**logw_new), 1e-300))
        logw = np.concatenate([self._logw, logw_new])
        logn = np.concatenate([self._logn, n])
        order = np.argsort(logw)
        self._logw = logw[order]
        self._logn = logn[order]
        self._rebuild()

    def ensure(self, lo: float, hi: float):
        """Cover [lo, hi] (omega > 0) at the cache tolerance."""
        llo, lhi = math.log10(lo), math.log10(hi)
        if self._logw is None:
            n = max(4, int(math.ceil((lhi - llo) * self.ppd)))
            self._logw = np.linspace(llo, lhi, n + 1)
            self._logn = np.log10(np.maximum(self._exact(10.0**self._logw), 1e-300))
            self._rebuild()
        else:
            step = 1.0 / self.ppd
            add = []
            if llo < self._logw[0] - 1e-12:
                add.append(np.arange(self._logw[0] - step, llo - step, -step)[::-1])
            if lhi > self._logw[-1] + 1e-12:
                add.append(np.arange(self._logw[-1] + step, lhi + step, step))
            if add:
                self._insert(np.concatenate(add))
        self._refine(llo, lhi)

    def _refine(self, llo, lhi):
        for _ in range(8):
            mask = (self._logw[:-1] >= llo - 1e-12) & (self._logw[1:] <= lhi + 1e-12)
            if not np.any(mask):
                return
            mids = 0.5 * (self._logw[:-1] + self._logw[1:])[mask]
            exact = self._exact(10.0**mids)
            approx = 10.0 ** self._spline(mids)
            rel = np.abs(approx - exact) / np.maximum(np.abs(exact), 1e-300)
            bad = rel > self.tol
            if not np.any(bad):
                return
            n = np.log10(np.maximum(exact[bad], 1e-300))
            logw = np.concatenate([self._logw, mids[bad]])
            logn = np.concatenate([self._logn, n])
            order = np.argsort(logw)
            self._logw = logw[order]
            self._logn = logn[order]
            self._rebuild()

    def __call__(self, omega, extrapolate: bool = False):
        w = np.abs(np.asarray(omega, dtype=float))
        if self.zero:
            return np.zeros(w.shape)
        w = np.maximum(w, 1e-300)
        if self._logw is None or (not extrapolate and (
                w.min() < 10.0 ** self._logw[0] or w.max() > 10.0 ** self._logw[-1])):
            self.ensure(float(w.min()) / 3.0, float(w.max()) * 3.0)
        x = np.log10(w)
        y = self._spline(x)
        # linear log-log continuation outside the grid
        x0, x1 = self._logw[0], self._logw[-1]
        lo = x < x0
        hi = x > x1
        if np.any(lo):
            y[lo] = self._spline(x0) + self._spline(x0, 1) * (x[lo] - x0)
        if np.any(hi):
            y[hi] = self._spline(x1) + self._spline(x1, 1) * (x[hi] - x1)
        return 10.0**y


def _gk_panels(f, lo, hi):
    """Kronrod sums and errors per panel, scalar integrand."""
    from .quadrature import _NODES, _WGAUSS, _WK
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _NODES
    fx = f(x.ravel()).reshape(x.shape)
    k = (fx * _WK).sum(axis=1) * h
    g = (fx * _WGAUSS).sum(axis=1) * h
    return k, np.abs(k - g)


def _filter_weighted(seq: PulseSequence, spectrum, *, rtol: float,
                     sqrt_scale: float | None = None, max_lobes: int = 400000):
    """(1/pi) \int_0^inf W(omega) N(omega) domega with lobe-aligned panels.

    spectrum maps an omega array to N values.  Returns (value, error, diag).
    """
    tau, kap = seq.tau, seq.kappa
    if kap == 0.0:
        return 0.0, 0.0, {"n_lobes": 0, "omega_max": 0.0, "sqrt_substitution": False}
    h = math.pi / tau
    _, jumps = jump_weights(seq)
    sj2 = float(np.sum(jumps**2))
    n_seg = max(1, seq.n_pulses if seq.kind == "cpmg" else len(seq.switch_times))

    def f(w):
        return filter_function(w, seq) * spectrum(w) / math.pi

    total = 0.0
    err = 0.0
    start = 0.0
    used_sqrt = False
    if sqrt_scale is not None and sqrt_scale > 0.0:
        s = min(sqrt_scale, 0.5 * h)
        u_hi = math.sqrt(s)

        def g(u):
            w = u * u
            return 2.0 * u * filter_function(w, seq) * spectrum(w) / math.pi

        v, e, _ = integrate(g, 0.0, u_hi, rtol=0.25 * rtol,
                            edges=u_hi * np.array([1e-3, 1e-2, 0.1, 0.3, 0.7]),
                            max_panels=512)
        total += v
        err += e
        start = s
        used_sqrt = True

    # phase 1: extend lobe panels until the analytic tail estimate is small
    lo_list, hi_list, val_list, err_list = [], [], [], []
    k_next = int(math.ceil(start / h + 1e-9))
    if k_next * h > start + 1e-12 * h:
        lo0 = np.array([start])
        hi0 = np.array([k_next * h])
        v, e = _gk_panels(f, lo0, hi0)
        lo_list.append(lo0); hi_list.append(hi0)
        val_list.append(v); err_list.append(e)
        total += v.sum()
    # the smooth continuation below absorbs the 1/omega^2-envelope tail, so
    # extension only has to run until the oscillatory residual of that
    # continuation, ~(3(1+n_seg)/(tau Omega)) * tail, is inside the budget
    osc_per_omega = 3.0 * (1.0 + n_seg) / tau
    block = 16
    while True:
        k_hi = min(k_next + block, max_lobes)
        lo_b = h * np.arange(k_next, k_hi)
        hi_b = lo_b + h
        v, e = _gk_panels(f, lo_b, hi_b)
        lo_list.append(lo_b); hi_list.append(hi_b)
        val_list.append(v); err_list.append(e)
        total += float(v.sum())
        k_next = k_hi
        omega_end = k_next * h
        n_end = float(np.max(spectrum(np.array([omega_end]))))
        tail_est = kap**2 * sj2 * n_end / (math.pi * omega_end)
        resid_est = osc_per_omega / omega_end * tail_est
        scale = abs(total)
        if scale > 0.0 and k_next >= 32 and \
                tail_est <= 0.05 * scale and resid_est <= 0.5 * rtol * scale:
            break
        if k_next >= max_lobes:
            raise QuadratureError(
                "filter-weighted integral did not converge within the lobe budget",
                value=total, error=tail_est)
        block = min(block * 2, 8192)

    lo = np.concatenate(lo_list)
    hi = np.concatenate(hi_list)
    vals = np.concatenate(val_list)
    errs = np.concatenate(err_list)

    # phase 2: smooth tail continuation with the exact 1/omega^2 envelope
    omega_end = float(hi[-1])
    env = kap**2 * sj2 / math.pi

    if isinstance(spectrum, NoiseInterpolant):
        def tail_f(w):
            return env * spectrum(w, extrapolate=True) / w**2
    else:
        def tail_f(w):
            return env * spectrum(w) / w**2

    omega_far = omega_end * 1e9
    tail_val, tail_err, _ = integrate(tail_f, omega_end, omega_far, rtol=1e-3,
                                      edges=log_edges(omega_end, omega_far, 2),
                                      max_panels=1024)
    beyond = tail_f(np.array([omega_far]))[0] * omega_far  # <= integral of decreasing env
    osc = osc_per_omega / omega_end
    total += tail_val
    err += tail_err + beyond + osc * abs(tail_val)

    # phase 3: refine the worst panels until the budget is met
    for _ in range(60):
        tot_err = errs.sum() + err
        if tot_err <= rtol * abs(total) or errs.sum() <= 0.25 * rtol * abs(total):
            break
        n_split = min(max(8, lo.size // 8), 4096)
        idx = np.argpartition(errs, -n_split)[-n_split:]
        idx = idx[errs[idx] > 0.0]
        if idx.size == 0:
            break
        total -= vals[idx].sum()
        mid = 0.5 * (lo[idx] + hi[idx])
        nl = np.concatenate([lo[idx], mid])
        nh = np.concatenate([mid, hi[idx]])
        nv, ne = _gk_panels(f, nl, nh)
        total += nv.sum()
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        lo = np.concatenate([lo[keep], nl])
        hi = np.concatenate([hi[keep], nh])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])

    diag = {"n_lobes": int(k_next), "omega_max": omega_end,
            "sqrt_substitution": used_sqrt, "n_panels": int(lo.size)}
    return float(total), float(errs.sum() + err), diag


def phi_squared(tau: float, seq: PulseSequence, model=None, geom: GeometryConfig | None = None,
                *, tol_omega: float = 1e-6, tol_q: float = 1e-8,
                spectrum=None, full_output: bool = False):
    """Phase variance <phi^2> = \int domega/(2pi) W_tau(omega) N(omega).

    tau overrides the sequence's total time (the sequence shape is kept).
    Either (model, geom) or an explicit spectrum callable must be given;
    tests and closed-form comparisons pass analytic spectra directly.
    With full_output, returns (value, error_estimate, diagnostics); the
    diagnostics record whether the omega = u^2 endpoint substitution ran.
    """
    if not (math.isfinite(tau) and tau > 0.0):
        raise ValueError("tau must be positive and finite")
    s = sequence_at(seq, tau)
    cache_extra = 0.0
    if spectrum is None:
        if model is None or geom is None:
            raise ValueError("phi_squared needs a model and geometry (or a spectrum)")
        spectrum = NoiseInterpolant(model, geom, tol=max(1e-7, 0.25 * tol_omega),
                                    tol_q=tol_q)
    sqrt_scale = None
    m = as_lorentzian_model(model) if model is not None else None
    if isinstance(spectrum, NoiseInterpolant):
        m = spectrum.model
        cache_extra = spectrum.tol
    if isinstance(m, ModelB) and math.isinf(m.xi):
        g = geom if geom is not None else getattr(spectrum, "geom", None)
        d_min = float(np.min(g.depths)) if g is not None else 1.0
        sqrt_scale = 1e-2 * m.sigma_s * m.J / d_min**4

    value, err, diag = _filter_weighted(s, spectrum, rtol=tol_omega, sqrt_scale=sqrt_scale)
    err += cache_extra * abs(value)
    value = max(value, 0.0)
    if full_output:
        return value, err, diag
    return value


def decoherence_curve(taus, seq: PulseSequence, model, geom: GeometryConfig, *,
                      qubit: QubitParams | None = None, tol_omega: float = 1e-6,
                      tol_q: float = 1e-8) -> DecoherenceCurve:
    """Evaluate <phi^2> over a tau grid, sharing one cached spectrum."""
    ts = np.sort(np.asarray(taus, dtype=float))
    if ts.size == 0 or np.any(ts <= 0.0):
        raise ValueError("taus must be positive")
    cache = NoiseInterpolant(model, geom, tol=max(1e-7, 0.25 * tol_omega), tol_q=tol_q)
    vals = np.empty(ts.shape)
    errs = np.empty(ts.shape)
    diags = []
    for i, t in enumerate(ts):
        vals[i], errs[i], dg = phi_squared(t, seq, model, geom, tol_omega=tol_omega,
                                           tol_q=tol_q, spectrum=cache, full_output=True)
        diags.append(dg)
    prov = {"tol_omega": tol_omega, "tol_q": tol_q,
            "sqrt_substitution": any(d["sqrt_substitution"] for d in diags),
            "kappa": seq.kappa, "kind": seq.kind}
    if qubit is not None:
        prov["t1"] = qubit.t1
    return DecoherenceCurve(taus=ts, phi_sq=vals, errors=errs, seq=seq, model=model,
                            geom=geom, provenance=prov, _spectrum=cache)


def coherence(tau, qubit: QubitParams, phi_sq):
    """Coherence e^{-2 <phi^2>} e^{-tau/T1} in [0, 1]."""
    ps = np.asarray(phi_sq, dtype=float)
    if np.any(ps < 0.0):
        raise ValueError("phase variance must be non-negative")
    tt = np.asarray(tau, dtype=float)
    depol = np.exp(-tt / qubit.t1) if math.isfinite(qubit.t1) else np.ones_like(tt)
    out = np.exp(-2.0 * ps) * depol
    if np.ndim(phi_sq) == 0 and np.ndim(tau) == 0:
        return float(out)
    return out


def t2_extract(curve: DecoherenceCurve, qubit: QubitParams | None = None) -> float:
    """Root of 2 <phi^2>(tau) = 1 by bracketing plus continuous refinement.

    The crossing definition is T1-independent (qubit is accepted for
    interface symmetry).  Refinement uses the curve's live evaluator when
    present, otherwise a monotone log-log interpolant of the samples.
    """
    ts = np.asarray(curve.taus, dtype=float)
    ys = 2.0 * np.asarray(curve.phi_sq, dtype=float) - 1.0
    if ts.size < 2:
        raise NoCrossingError("need at least two samples", bracket=(ts, ys + 1.0))
    sign = np.sign(ys)
    crossings = np.nonzero(np.diff(sign >= 0))[0]
    if ys[0] == 0.0:
        return float(ts[0])
    if crossings.size == 0:
        raise NoCrossingError(
            f"2<phi^2> spans [{ys[0] + 1.0:.6g}, {ys[-1] + 1.0:.6g}] and never crosses 1",
            bracket=(float(ys[0] + 1.0), float(ys[-1] + 1.0)))
    i = int(crossings[0])
    a, b = float(ts[i]), float(ts[i + 1])

    has_context = curve.seq is not None and curve.model is not None and curve.geom is not None
    if has_context:
        fn = lambda t: 2.0 * curve.evaluate(t) - 1.0
    else:
        interp = PchipInterpolator(np.log(ts), np.log(np.maximum(curve.phi_sq, 1e-300)))
        fn = lambda t: 2.0 * math.exp(interp(math.log(t))) - 1.0
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        # sampled bracket disagrees with the refined evaluator; fall back
        return float(ts[i] + (ts[i + 1] - ts[i]) * (-ys[i]) / (ys[i + 1] - ys[i]))
    return float(brentq(fn, a, b, xtol=1e-12 * b, rtol=1e-12))


def cpmg_closed_form(tau: float, omega0: float, omega_p: float, amplitude: float) -> float:
    """Large-N CPMG phase variance for a Lorentzian noise spectrum.

    amplitude * (pi tau/(16 omega0)) [1 - tanh(x)/x], x = pi omega0/(2 omega_p).
    The bracket is evaluated by series below x = 1e-3 where the direct form
    loses digits to cancellation.  This equals the full nested quadrature
    with the exact finite-N filter (N large) for the spectrum
    N(omega) = A omega0/(omega0^2 + omega^2) when amplitude = 16 kappa^2 A/pi.
    """
    if omega0 <= 0.0 or omega_p <= 0.0:
        raise ValueError("omega0 and omega_p must be positive")
    x = 0.5 * math.pi * omega0 / omega_p
    if x < 1e-3:
        bracket = x * x / 3.0 - 2.0 * x**4 / 15.0 + 17.0 * x**6 / 315.0
    else:
        bracket = 1.0 - math.tanh(x) / x
    return amplitude * (math.pi * tau / (16.0 * omega0)) * bracket


def filter_weight_integral(seq: PulseSequence, *, rtol: float = 1e-9):
    """(1/pi) \int_0^inf W_tau(omega) domega, exactly kappa^2 tau in theory.

    Resolved lobes by Gauss-Kronrod panels plus the closed-form tail: from
    the jump expansion W = (kappa^2/omega^2)|sum_k J_k e^{-i omega u_k}|^2,
    \int_Omega^inf W domega = kappa^2 [sum J_k^2/Omega
        + sum_{k<l} 2 J_k J_l (cos(Omega D)/Omega - D (pi/2 - Si(Omega D)))]
    with D = u_l - u_k.  Returns (value, error_estimate).
    """
    tau, kap = seq.tau, seq.kappa
    h = math.pi / tau
    n_seg = max(1, seq.n_pulses if seq.kind == "cpmg" else len(seq.switch_times))
    k_end = 64 * n_seg
    omega_end = k_end * h

    def f(w):
        return filter_function(w, seq) / math.pi

    val, err, _ = integrate(f, 0.0, omega_end, rtol=rtol,
                            edges=h * np.arange(1, k_end), max_panels=64 * n_seg + 4096)

    times, jumps = jump_weights(seq)
    tail = float(np.sum(jumps**2)) / omega_end
    ii, jj = np.triu_indices(times.size, k=1)
    delta = times[jj] - times[ii]
    si, _ = sici(omega_end * delta)
    pair = 2.0 * jumps[ii] * jumps[jj] * (
        np.cos(omega_end * delta) / omega_end - delta * (0.5 * math.pi - si))
    tail += float(pair.sum())
    val += kap**2 * tail / math.pi
    return val, err
