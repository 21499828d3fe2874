"""Discretized diffusion-with-killing dynamics on a 1D lattice.

A single symmetric transfer operator drives everything here: exact
propagators by repeated application, loop integrals by its spectrum,
Monte Carlo loop/path sampling against its free part, and the
forward/backward profile pair whose pointwise product is conserved.

Conventions.  The kernel matrix carries one factor of the site spacing
delta per step, so T^n composed over interior sites is the Riemann-sum
discretization of the continuum chain; densities are matrix entries
scaled back by 1/delta and the loop integral is the plain trace.
Natural units hbar = m = k_B = 1 by default, all overridable.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

_CHUNK = 20000  # paths sampled per block; fixed so ensembles are seed-stable


@dataclass(frozen=True)
class LoopLattice:
    """Uniform 1D site grid with a per-site potential and a time step.

    delta is the site spacing (x_max - x_min)/(n_sites - 1); the
    stability number hbar*eps/(mass*delta^2) is recorded and a warning
    is issued above 1.0 (single-step kernel wider than one cell).
    """

    x_min: float
    x_max: float
    n_sites: int
    eps: float
    mass: float
    hbar: float
    potential: tuple
    boundary: str

    def __post_init__(self):
        if not (self.x_max > self.x_min):
            raise ValueError("need x_max > x_min")
        if self.n_sites < 3:
            raise ValueError(f"need n_sites >= 3, got {self.n_sites}")
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be positive and finite, got {self.eps}")
        if not (self.mass > 0.0 and self.hbar > 0.0):
            raise ValueError("mass and hbar must be positive")
        if len(self.potential) != self.n_sites:
            raise ValueError("potential must have one value per site")
        if not all(math.isfinite(u) for u in self.potential):
            raise ValueError("potential values must be finite")
        if self.boundary not in ("periodic", "reflecting"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")
        if self.stability > 1.0:
            warnings.warn(
                f"stability number hbar*eps/(m*delta^2) = {self.stability:.3g} "
                "exceeds 1; the one-step kernel spans more than a cell",
                stacklevel=2)

    @property
    def delta(self) -> float:
        return (self.x_max - self.x_min) / (self.n_sites - 1)

    @property
    def stability(self) -> float:
        return self.hbar * self.eps / (self.mass * self.delta ** 2)

    def sites(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_sites)


def make_lattice(x_min, x_max, n_sites, eps, mass=1.0, hbar=1.0,
                 potential=None, boundary="periodic") -> LoopLattice:
    """Build a lattice; potential may be None (free), a callable of x,
    or a per-site array."""
    x = np.linspace(x_min, x_max, n_sites)
    if potential is None:
        u = np.zeros(n_sites)
    elif callable(potential):
        u = np.asarray([float(potential(xi)) for xi in x])
    else:
        u = np.asarray(potential, dtype=float)
    return LoopLattice(x_min=float(x_min), x_max=float(x_max),
                       n_sites=int(n_sites), eps=float(eps),
                       mass=float(mass), hbar=float(hbar),
                       potential=tuple(float(v) for v in u),
                       boundary=str(boundary))


@dataclass(frozen=True)
class TransferKernel:
    """One-step operator: symmetric, nonnegative, delta included."""

    matrix: np.ndarray
    eps: float
    delta: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("kernel entries must be finite")


@dataclass(frozen=True)
class PathEnsemble:
    """Sampled site trajectories with their potential weights."""

    n_paths: int
    n_steps: int
    seed: int
    paths: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be positive")


def _free_gaussian(lattice: LoopLattice) -> np.ndarray:
    """Free one-step matrix sqrt(m/2 pi hbar eps) e^{-m d^2/2 hbar eps} delta,
    with d the boundary-aware distance (periodic images or two mirrors)."""
    x = lattice.sites()
    m, hb, eps, d = lattice.mass, lattice.hbar, lattice.eps, lattice.delta
    pref = math.sqrt(m / (2.0 * math.pi * hb * eps)) * d
    scale = m / (2.0 * hb * eps)
    # every accumulation below pairs terms that transpose into each other,
    # so the matrix comes out symmetric to the bit, not just to rounding
    diff = x[:, None] - x[None, :]
    if lattice.boundary == "periodic":
        period = lattice.n_sites * d
        g = np.exp(-scale * diff ** 2)
        for j in range(1, 4):
            g += (np.exp(-scale * (diff + j * period) ** 2)
                  + np.exp(-scale * (diff - j * period) ** 2))
    else:
        ssum = x[:, None] + x[None, :]
        g = (np.exp(-scale * diff ** 2)
             + np.exp(-scale * (ssum - 2.0 * lattice.x_min) ** 2)
             + np.exp(-scale * (ssum - 2.0 * lattice.x_max) ** 2))
    return pref * g


def build_kernel(lattice: LoopLattice) -> TransferKernel:
    """Free Gaussian step dressed with e^{-eps u/2 hbar} on both sides,
    which keeps the matrix exactly symmetric."""
    u = np.asarray(lattice.potential)
    if not np.all(np.isfinite(u)):
        raise ValueError("potential values must be finite")
    half = np.exp(-lattice.eps * u / (2.0 * lattice.hbar))
    mat = np.outer(half, half) * _free_gaussian(lattice)
    return TransferKernel(matrix=mat, eps=lattice.eps, delta=lattice.delta)


def _check_sites(kernel_or_lattice, *sites):
    n = (kernel_or_lattice.matrix.shape[0]
         if isinstance(kernel_or_lattice, TransferKernel)
         else kernel_or_lattice.n_sites)
    for s in sites:
        if not isinstance(s, (int, np.integer)) or isinstance(s, bool):
            raise TypeError(f"site index must be an integer, got {s!r}")
        if not (0 <= s < n):
            raise ValueError(f"site index {s} outside [0, {n})")


def propagator(kernel: TransferKernel, x0: int, x1: int, n_steps: int) -> float:
    """Density q(x0 -> x1, n_steps*eps) = (T^n)[x0, x1] / delta."""
    _check_sites(kernel, x0, x1)
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    v = np.zeros(kernel.matrix.shape[0])
    v[x0] = 1.0
    for _ in range(n_steps):
        v = kernel.matrix @ v
    return float(v[x1]) / kernel.delta


def loop_partition(kernel: TransferKernel, n_steps: int) -> float:
    """Lattice loop integral over closed paths: Tr(T^n), via the spectrum
    of the symmetric operator."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    lam = np.linalg.eigvalsh(kernel.matrix)
    return float(np.sum(lam ** n_steps))


def path_entropy(kernel: TransferKernel, n_steps: int) -> float:
    """ln of the loop integral, in units of k_B."""
    z = loop_partition(kernel, n_steps)
    if not (z > 0.0):
        raise ArithmeticError(f"loop partition {z} is not positive")
    return math.log(z)


def fluctuation_bound(beta: float, dt: float, mass: float = 1.0,
                      hbar: float = 1.0) -> float:
    """Spatial fluctuation budget (beta*hbar/dt - 1) dt^2/m inside the
    quantum window 0 < dt <= beta*hbar; the window edge is thermal_time."""
    if not (beta > 0.0 and mass > 0.0 and hbar > 0.0):
        raise ValueError("beta, mass, hbar must be positive")
    if not (0.0 < dt <= beta * hbar):
        raise ValueError(
            f"dt = {dt} outside the quantum window (0, beta*hbar = "
            f"{beta * hbar}]; beyond it the spread is thermodynamic")
    return (beta * hbar / dt - 1.0) * dt * dt / mass


def thermal_time(beta: float, hbar: float = 1.0) -> float:
    """The parting scale tau = beta*hbar between loop-dominated and
    thermodynamic fluctuations (k_B absorbed into beta)."""
    if not (beta > 0.0 and hbar > 0.0):
        raise ValueError("beta and hbar must be positive")
    return beta * hbar


def forward_backward(kernel: TransferKernel, phi0, phi1, n_steps: int):
    """Advance phi0 forward and pull phi1 backward through the same
    symmetric kernel; rho_k = phi_k * phi_hat_k pointwise.

    Returns (phis, phi_hats, rhos), each of shape (n_steps+1, n_sites).
    delta * sum(rho_k) is the same inner product <T^k phi0, T^{n-k} phi1>
    at every k, so the density is conserved up to rounding.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    f0 = np.asarray(phi0, dtype=float)
    f1 = np.asarray(phi1, dtype=float)
    n = kernel.matrix.shape[0]
    for name, f in (("phi0", f0), ("phi1", f1)):
        if f.shape != (n,):
            raise ValueError(f"{name} must have one value per site")
        if not np.all(np.isfinite(f)) or np.any(f < 0.0):
            raise ValueError(f"{name} must be finite and nonnegative")
        if not np.any(f > 0.0):
            raise ValueError(f"{name} must not be identically zero")
    phis = np.empty((n_steps + 1, n))
    hats = np.empty((n_steps + 1, n))
    phis[0] = f0
    hats[n_steps] = f1
    for k in range(1, n_steps + 1):
        phis[k] = kernel.matrix @ phis[k - 1]
    for k in range(n_steps - 1, -1, -1):
        hats[k] = kernel.matrix @ hats[k + 1]
    return phis, hats, phis * hats


def _sample_bridge(g: np.ndarray, start: int, end: int, n_steps: int,
                   n_paths: int, rng) -> np.ndarray:
    """Exact lattice bridge: forward categorical sampling of the free
    chain pinned at both ends, using backward partials b_j = G^j[:, end].
    """
    n = g.shape[0]
    b = np.empty((n_steps, n))
    b[0] = 0.0
    b[0, end] = 1.0  # b_0 = e_end, used only to seed the recursion
    for j in range(1, n_steps):
        b[j] = g @ b[j - 1]
    paths = np.empty((n_paths, n_steps + 1), dtype=np.int64)
    paths[:, 0] = start
    paths[:, n_steps] = end
    for lo in range(0, n_paths, _CHUNK):
        cur = np.full(min(_CHUNK, n_paths - lo), start, dtype=np.int64)
        for k in range(1, n_steps):
            w = g[cur] * b[n_steps - k][None, :]
            cs = np.cumsum(w, axis=1)
            u = rng.random(cur.size) * cs[:, -1]
            cur = np.minimum((cs < u[:, None]).sum(axis=1), n - 1)
            paths[lo: lo + cur.size, k] = cur
    return paths


def _path_weights(lattice: LoopLattice, paths: np.ndarray) -> np.ndarray:
    """exp(-eps S_u/hbar) with the trapezoid action S_u = u0/2 + sum
    interior u + u_n/2 -- same split as the kernel, so weights times the
    free chain reproduce T^n exactly."""
    u = np.asarray(lattice.potential)
    s = u[paths].sum(axis=1) - 0.5 * (u[paths[:, 0]] + u[paths[:, -1]])
    return np.exp(-lattice.eps * s / lattice.hbar)


def sample_paths(lattice: LoopLattice, n_paths: int, n_steps: int, seed: int,
                 mode: str = "loop", start_site=None,
                 end_site=None) -> PathEnsemble:
    """Draw free-dynamics trajectories and attach their potential weights.

    open mode: continuum Gaussian increments of variance hbar*eps/m,
    folded at the boundary and snapped to the nearest site for recording.
    loop mode: lattice Brownian bridge pinned to the start site (end_site
    may override the return point, giving a pinned open bridge).
    Deterministic per seed.
    """
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if mode not in ("open", "loop"):
        raise ValueError(f"unknown mode {mode!r}")
    start = lattice.n_sites // 2 if start_site is None else start_site
    _check_sites(lattice, start)
    rng = np.random.default_rng(seed)
    if mode == "loop":
        end = start if end_site is None else end_site
        _check_sites(lattice, end)
        g = _free_gaussian(lattice)
        paths = _sample_bridge(g, start, end, n_steps, n_paths, rng)
    else:
        sd = math.sqrt(lattice.hbar * lattice.eps / lattice.mass)
        x0 = lattice.sites()[start]
        steps = rng.normal(0.0, sd, size=(n_paths, n_steps))
        pos = x0 + np.cumsum(steps, axis=1)
        span = lattice.x_max - lattice.x_min
        if lattice.boundary == "periodic":
            period = lattice.n_sites * lattice.delta
            idx = np.rint((pos - lattice.x_min) / lattice.delta).astype(np.int64)
            idx %= lattice.n_sites
        else:
            folded = span - np.abs(np.mod(pos - lattice.x_min, 2.0 * span) - span)
            idx = np.rint(folded / lattice.delta).astype(np.int64)
        paths = np.empty((n_paths, n_steps + 1), dtype=np.int64)
        paths[:, 0] = start
        paths[:, 1:] = idx
    return PathEnsemble(n_paths=int(n_paths), n_steps=int(n_steps),
                        seed=int(seed), paths=paths,
                        weights=_path_weights(lattice, paths))


def mc_propagator(lattice: LoopLattice, x0: int, x1: int, n_steps: int,
                  n_paths: int, seed: int):
    """Monte Carlo propagator estimate and its standard error.

    Importance-samples the free lattice bridge x0 -> x1 and averages the
    potential weights, scaled by the free density (G^n)[x0, x1]/delta;
    unbiased for propagator(build_kernel(lattice), x0, x1, n_steps).
    """
    _check_sites(lattice, x0, x1)
    free = make_lattice(lattice.x_min, lattice.x_max, lattice.n_sites,
                        lattice.eps, mass=lattice.mass, hbar=lattice.hbar,
                        potential=None, boundary=lattice.boundary)
    q_free = propagator(build_kernel(free), x0, x1, n_steps)
    ens = sample_paths(lattice, n_paths, n_steps, seed, mode="loop",
                       start_site=x0, end_site=x1)
    w = ens.weights
    est = q_free * float(np.mean(w))
    if n_paths > 1:
        se = q_free * float(np.std(w, ddof=1)) / math.sqrt(n_paths)
    else:
        se = float("nan")
    return est, se
