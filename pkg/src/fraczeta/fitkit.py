"""Impedance-spectrum ingestion and depressed-arc model fitting.

Spectra travel as (omega, Z) pairs; files use the CSV schema
freq_hz,re_z_ohm,im_z_ohm with omega = 2*pi*freq_hz.  Fitting minimizes
the modulus-weighted squared residual sum |Z(omega;theta) - z|^2/|z|^2
by Nelder-Mead on smoothly reparametrized coordinates, after an internal
rescaling of impedance and frequency that makes the reported parameters
equivariant under unit changes.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .fracdyn import ColeColeModel, arc_fit, cole_cole_impedance

_HEADER = "freq_hz,re_z_ohm,im_z_ohm"


@dataclass(frozen=True)
class Spectrum:
    """Measured or synthetic impedance points, sorted by frequency."""

    points: tuple
    label: str = ""

    def __post_init__(self):
        w = [p[0] for p in self.points]
        if any(not (x > 0.0 and math.isfinite(x)) for x in w):
            raise ValueError("omegas must be positive and finite")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("omegas must be strictly increasing")

    def omegas(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    def z(self) -> np.ndarray:
        return np.array([p[1] for p in self.points], dtype=complex)


@dataclass(frozen=True)
class FitResult:
    model: ColeColeModel
    loss: float
    n_iter: int
    converged: bool
    per_param_uncertainty: dict

    def __post_init__(self):
        if not (self.loss >= 0.0):
            raise ValueError(f"loss must be nonnegative, got {self.loss}")


def load_spectrum(path, fmt: str = "csv") -> Spectrum:
    """Read a spectrum file; malformed rows are reported by line number."""
    if fmt != "csv":
        raise ValueError(f"unsupported format {fmt!r}")
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0].strip() != _HEADER:
        raise ValueError(f"{path}: first line must be the header {_HEADER!r}")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        if not ln.strip():
            continue
        parts = ln.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: line {i}: expected 3 comma-separated "
                             f"values, got {len(parts)}")
        try:
            f, re_z, im_z = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"{path}: line {i}: non-numeric value in "
                             f"{ln!r}") from None
        if not (f > 0.0 and math.isfinite(f)):
            raise ValueError(f"{path}: line {i}: frequency must be positive "
                             f"and finite, got {f}")
        rows.append((f, complex(re_z, im_z)))
    rows.sort(key=lambda r: r[0])
    for (f1, _), (f2, _) in zip(rows, rows[1:]):
        if f1 == f2:
            raise ValueError(f"{path}: duplicate frequency {f1}")
    pts = tuple((2.0 * math.pi * f, z) for f, z in rows)
    return Spectrum(points=pts, label=str(path))


def save_spectrum(spectrum: Spectrum, path) -> None:
    """Write the schema CSV using shortest round-trip decimals."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_HEADER + "\n")
        for w, z in spectrum.points:
            f = w / (2.0 * math.pi)
            fh.write(f"{f!r},{z.real!r},{z.imag!r}\n")


def synth_spectrum(model: ColeColeModel, omegas, noise_rel: float,
                   seed: int) -> Spectrum:
    """Model values plus independent Gaussian noise of scale
    noise_rel*|z| on the real and imaginary parts; deterministic per seed."""
    if noise_rel < 0.0:
        raise ValueError(f"noise_rel must be >= 0, got {noise_rel}")
    w = np.sort(np.asarray(omegas, dtype=float).ravel())
    z = cole_cole_impedance(model, w)
    if noise_rel > 0.0:
        rng = np.random.default_rng(seed)
        scale = noise_rel * np.abs(z)
        z = z + scale * rng.standard_normal(w.size) \
            + 1j * scale * rng.standard_normal(w.size)
    pts = tuple((float(wi), complex(zi)) for wi, zi in zip(w, z))
    return Spectrum(points=pts, label=f"synthetic seed={seed}")


def _softplus_inv(y: float) -> float:
    y = max(y, 1e-12)
    return y + math.log1p(-math.exp(-y)) if y > 1e-8 else math.log(math.expm1(y))


def _to_params(raw) -> tuple:
    a, b, c, d = raw
    return (float(expit(a)), math.exp(b), math.exp(c),
            float(np.logaddexp(0.0, d)))


def _heuristic_init(w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Starting point in raw coordinates, on already-normalized data."""
    re = z.real
    r_s0 = max(float(np.min(re)), 1e-6)
    r_ct0 = max(float(np.max(re) - np.min(re)), 1e-3)
    apex = int(np.argmax(-z.imag))
    tau0 = 1.0 / w[apex] if -z.imag[apex] > 0.0 else 1.0
    try:
        psi = arc_fit(z).depression_angle
        alpha0 = min(max(1.0 - 2.0 * psi / math.pi, 0.3), 0.99)
    except (ValueError, np.linalg.LinAlgError):
        alpha0 = 0.9
    logit0 = math.log(alpha0 / (1.0 - alpha0))
    return np.array([logit0, math.log(tau0), math.log(r_ct0),
                     _softplus_inv(r_s0)])


def fit_cole_cole(spec: Spectrum, init=None) -> FitResult:
    """Recover (alpha, tau, r_ct, r_s) from a spectrum.

    Box constraints ride on smooth transforms (alpha through a sigmoid,
    tau and r_ct through exp, r_s through softplus), so the simplex is
    unconstrained.  A single restart from the 10%-perturbed heuristic
    init runs when the first pass fails to converge.
    """
    n_pts = len(spec.points)
    if n_pts < 5:
        raise ValueError(f"need >= 5 points to fit, got {n_pts}")
    w_all = spec.omegas()
    z_all = spec.z()
    if np.any(np.abs(z_all) == 0.0):
        raise ValueError("zero-modulus impedance point cannot be weighted")
    span = float(w_all[-1] / w_all[0])
    if span < 3.0:
        warnings.warn("frequencies form a single cluster; the fit is "
                      "ill-conditioned", stacklevel=2)
    elif span < 100.0:
        warnings.warn("spectrum spans less than two decades of frequency; "
                      "parameters may be poorly constrained", stacklevel=2)

    # internal gauge: impedance in units of median |z|, frequency in
    # units of the geometric mean omega; the weighted loss is invariant
    z_scale = float(np.median(np.abs(z_all)))
    w_scale = float(np.exp(np.mean(np.log(w_all))))
    w = w_all / w_scale
    z = z_all / z_scale
    inv_mod2 = 1.0 / np.abs(z) ** 2

    def loss_raw(raw) -> float:
        alpha, tau, r_ct, r_s = _to_params(raw)
        try:
            model = ColeColeModel(alpha=alpha, tau=tau, r_ct=r_ct, r_s=r_s)
        except ValueError:
            return math.inf
        resid = cole_cole_impedance(model, w) - z
        return float(np.sum((resid.real ** 2 + resid.imag ** 2) * inv_mod2))

    if init is not None:
        x0 = np.array([math.log(init.alpha / (1.0 - init.alpha))
                       if init.alpha < 1.0 else 36.0,
                       math.log(init.tau * w_scale),
                       math.log(init.r_ct / z_scale),
                       _softplus_inv(init.r_s / z_scale)])
    else:
        x0 = _heuristic_init(w, z)

    opts = dict(maxiter=4000, maxfev=8000, xatol=1e-10, fatol=1e-14)
    res = minimize(loss_raw, x0, method="Nelder-Mead", options=opts)
    n_iter = int(res.nit)
    if not res.success:
        x1 = x0 * np.array([1.1, 0.9, 1.1, 0.9])
        res2 = minimize(loss_raw, x1, method="Nelder-Mead", options=opts)
        n_iter += int(res2.nit)
        if res2.fun < res.fun:
            res = res2

    alpha, tau_n, rct_n, rs_n = _to_params(res.x)
    model = ColeColeModel(alpha=alpha, tau=tau_n / w_scale,
                          r_ct=rct_n * z_scale, r_s=rs_n * z_scale)
    sig = _crude_uncertainty(loss_raw, res.x, float(res.fun), n_pts)
    # chain rule from raw coordinates back to natural parameters
    scale = {"alpha": alpha * (1.0 - alpha), "tau": tau_n / w_scale,
             "r_ct": rct_n * z_scale, "r_s": float(expit(res.x[3])) * z_scale}
    unc = {k: sig[i] * scale[k] for i, k in
           enumerate(("alpha", "tau", "r_ct", "r_s"))}
    return FitResult(model=model, loss=float(res.fun), n_iter=n_iter,
                     converged=bool(res.success), per_param_uncertainty=unc)


def _crude_uncertainty(loss_fn, x_opt, f_opt, n_pts) -> list:
    """Diagonal-curvature error bars: sqrt(2 s^2/kappa_i) with
    s^2 = loss/(2N - 4); nan where the curvature is not positive."""
    dof = max(2 * n_pts - 4, 1)
    s2 = max(f_opt, 0.0) / dof
    out = []
    for i in range(4):
        h = 1e-4 * max(1.0, abs(x_opt[i]))
        e = np.zeros(4)
        e[i] = h
        kappa = (loss_fn(x_opt + e) - 2.0 * f_opt + loss_fn(x_opt - e)) / h ** 2
        out.append(math.sqrt(2.0 * s2 / kappa) if kappa > 0.0 else math.nan)
    return out
