"""Augmented Lagrangian solver (s = 1, 2D): four block subproblems, a
closed-form/rootfinding pointwise minimizer for the gradient surrogate p,
and multiplier ascent.

The splitting introduces p = grad(phi), n = grad(phi)/|grad(phi)| and
q = div(n) with penalties r1, r2, r3 and multipliers lam1, lam2, lam3.

Discretization note: the constraint operators use the adjoint one-sided
pairs (backward gradient with forward divergence, backward divergence
with forward gradient). Deriving the block subproblems variationally
from these pairs reproduces the screened 5-point Laplacian of the phi
solve and the grad-div spectral system of the n solve exactly; mixing
central differences into the couplings instead leaves a mid-frequency
subspace driven but undamped, which blows up within ~10 iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import distance, grid, levelset, spectral
from .report import STOP_MAX_ITERS, STOP_TOL, RunReport

DIVERGENCE_LIMIT = 1e8
_TINY = 1e-12


@dataclass
class AlmConfig:
    eta: float = 1.0
    r1: float = 15.0
    r2: float = 10.0
    r3: float = 3.0
    beta: float = 0.1
    beta2: float = 1e-2
    epsilon: float = 1.0
    max_iters: int = 1500
    tol: float = 3e-3
    newton_tol: float = 1e-10
    newton_max: int = 50
    reinit_steps: int = 5
    reinit_dtau: float = 0.5
    grad_floor: float = 1e-8
    margin: float = 5.0
    energy_band: float | None = None

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        for name in ("r1", "r2", "r3", "beta", "beta2", "epsilon", "tol",
                     "newton_tol", "grad_floor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.newton_max < 1:
            raise ValueError("iteration limits must be positive")


@dataclass
class AlmState:
    phi: np.ndarray
    q: np.ndarray
    p: np.ndarray
    n: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    lam3: np.ndarray

    def fields(self):
        return (self.phi, self.q, self.p, self.n,
                self.lam1, self.lam2, self.lam3)


def grad_b(u: np.ndarray) -> np.ndarray:
    """Backward-difference gradient, the flavor tied to the p constraint."""
    return np.stack([grid.diff_backward(u, ax) for ax in range(u.ndim)],
                    axis=-1)


def div_f(v: np.ndarray) -> np.ndarray:
    """Forward-difference divergence, adjoint to grad_b."""
    return sum(grid.diff_forward(v[..., ax], ax) for ax in range(v.shape[-1]))


def div_b(v: np.ndarray) -> np.ndarray:
    """Backward-difference divergence, the flavor tied to the q constraint."""
    return sum(grid.diff_backward(v[..., ax], ax) for ax in range(v.shape[-1]))


def grad_f(u: np.ndarray) -> np.ndarray:
    """Forward-difference gradient, adjoint to div_b."""
    return np.stack([grid.diff_forward(u, ax) for ax in range(u.ndim)],
                    axis=-1)


def init_state(cloud: np.ndarray, dims, cfg: AlmConfig) -> AlmState:
    phi = levelset.initialize_phi(cloud, dims, cfg.margin)
    p = grad_b(phi)
    n = p / (grid.magnitude(p) + cfg.grad_floor)[..., None]
    return AlmState(
        phi=phi,
        q=levelset.curvature(phi, cfg.grad_floor),
        p=p,
        n=n,
        lam1=np.zeros_like(p),
        lam2=np.zeros_like(phi),
        lam3=np.zeros_like(p),
    )


# ---- block subproblems ----

def phi_subproblem(state: AlmState, d: np.ndarray, cfg: AlmConfig) -> np.ndarray:
    """Frozen-coefficient screened Laplacian solve for the level set."""
    eps = cfg.epsilon
    phi, p, q = state.phi, state.p, state.q
    pmag = grid.magnitude(p)
    rhs = (cfg.beta * phi
           + (d + cfg.eta * np.abs(q)) * 2.0 * eps * pmag * phi
           / (np.pi * (eps * eps + phi * phi) ** 2)
           - div_f(cfg.r1 * p + state.lam1))
    return spectral.solve_helmholtz(rhs, a=cfg.r1, b=cfg.beta)


def q_subproblem(state: AlmState, cfg: AlmConfig) -> np.ndarray:
    """Soft shrinkage of q* = div(n) - lam2/r2 with the pointwise threshold."""
    eps = cfg.epsilon
    qstar = div_b(state.n) - state.lam2 / cfg.r2
    thresh = (cfg.eta * eps * grid.magnitude(state.p)
              / (cfg.r2 * np.pi * (eps * eps + state.phi ** 2)))
    mag = np.abs(qstar)
    return np.where(mag > thresh, (1.0 - thresh / np.where(mag > 0, mag, 1.0))
                    * qstar, 0.0)


def p_coefficients(state: AlmState, d: np.ndarray, cfg: AlmConfig):
    """Node-wise (omega, mu, a, nu) of the p objective
    omega*|p| + mu/2*|p-a|^2 - (nu.p)*|p|."""
    eps = cfg.epsilon
    nmag2 = np.sum(state.n * state.n, axis=-1)
    omega = ((d + cfg.eta * np.abs(state.q)) * eps
             / (np.pi * (eps * eps + state.phi ** 2))
             + np.sum(state.lam3 * state.n, axis=-1))
    mu = cfg.r1 + cfg.r3 * (1.0 + nmag2)
    a = (state.lam3 + cfg.r1 * grad_b(state.phi) - state.lam1) \
        / mu[..., None]
    nu = cfg.r3 * state.n
    return omega, mu, a, nu


def p_objective(p, omega, mu, a, nu):
    """E(p) = omega*|p| + mu/2*|p - a|^2 - (nu.p)*|p|, vectorized."""
    pn = np.linalg.norm(p, axis=-1)
    return (omega * pn + 0.5 * mu * np.sum((p - a) ** 2, axis=-1)
            - np.sum(nu * p, axis=-1) * pn)


def theta_equation(theta, omega, mu, a_norm, nu_norm, alpha):
    """Stationarity of the p objective in the rotation angle.

    theta is the signed angle from a to p, alpha the signed angle from a
    to nu. Derived by eliminating the radius from the polar form of the
    objective; the root set contains the direction of every nonzero
    stationary point.
    """
    return (mu * a_norm * np.sin(theta)
            * (mu - 2.0 * nu_norm * np.cos(theta - alpha))
            + (mu * a_norm * np.cos(theta) - omega)
            * nu_norm * np.sin(theta - alpha))


def _theta_derivative(theta, omega, mu, a_norm, nu_norm, alpha):
    return (mu * a_norm * np.cos(theta)
            * (mu - 2.0 * nu_norm * np.cos(theta - alpha))
            + 2.0 * mu * a_norm * nu_norm * np.sin(theta)
            * np.sin(theta - alpha)
            - mu * a_norm * np.sin(theta) * nu_norm * np.sin(theta - alpha)
            + (mu * a_norm * np.cos(theta) - omega)
            * nu_norm * np.cos(theta - alpha))


def solve_theta(omega, mu, a_norm, nu_norm, alpha, tol=1e-10, maxiter=50):
    """One root of the angle equation: Newton from 0, bisection fallback.

    Raises ValueError when no sign change exists on [-pi, pi]; callers
    fall back to a polar grid search for that node.
    """
    theta = 0.0
    for _ in range(maxiter):
        f = theta_equation(theta, omega, mu, a_norm, nu_norm, alpha)
        if abs(f) <= tol:
            return float(np.clip(theta, -np.pi, np.pi))
        df = _theta_derivative(theta, omega, mu, a_norm, nu_norm, alpha)
        if df == 0.0:
            break
        step = f / df
        theta -= step
        if not -np.pi <= theta <= np.pi:
            break
    ts = np.linspace(-np.pi, np.pi, 257)
    vals = theta_equation(ts, omega, mu, a_norm, nu_norm, alpha)
    sign_change = np.nonzero(vals[:-1] * vals[1:] <= 0)[0]
    sign_change = [i for i in sign_change
                   if vals[i] != 0.0 or vals[i + 1] != 0.0]
    if len(sign_change) == 0:
        raise ValueError("no sign change of the angle equation on [-pi, pi]")
    i = sign_change[0]
    lo, hi, flo = ts[i], ts[i + 1], vals[i]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = theta_equation(mid, omega, mu, a_norm, nu_norm, alpha)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def p_grid_search(omega, mu, a, nu, n_angles=64, n_radii=64):
    """Coarse polar search plus one local refinement pass (scalar fallback)."""
    a = np.asarray(a, dtype=float)
    nu = np.asarray(nu, dtype=float)
    rmax = 2.0 * np.linalg.norm(a) + 2.0 * abs(omega) / mu
    if rmax <= 0:
        return np.zeros(2)
    ang = np.linspace(-np.pi, np.pi, n_angles, endpoint=False)
    rad = np.linspace(0.0, rmax, n_radii)
    pts = rad[:, None, None] * np.stack([np.cos(ang), np.sin(ang)], -1)[None]
    pts = pts.reshape(-1, 2)
    vals = p_objective(pts, omega, mu, a, nu)
    best = pts[np.argmin(vals)]
    span = rmax / n_radii
    xs = np.linspace(best[0] - span, best[0] + span, 33)
    ys = np.linspace(best[1] - span, best[1] + span, 33)
    fine = np.stack(np.meshgrid(xs, ys, indexing="ij"), -1).reshape(-1, 2)
    vals = p_objective(fine, omega, mu, a, nu)
    return fine[np.argmin(vals)]


def solve_p_batch(omega, mu, a, nu, scan: int = 81):
    """Minimize the p objective at every node (flat arrays, shape (k, 2)).

    Closed forms handle the degenerate cases; the general case brackets
    every root of the angle stationarity on [-pi, pi], reconstructs the
    candidate vector for each, and keeps the best by objective value.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    a = np.atleast_2d(np.asarray(a, dtype=float))
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    k = len(omega)
    a_norm = np.linalg.norm(a, axis=1)
    nu_norm = np.linalg.norm(nu, axis=1)
    if np.any(mu <= 2.0 * nu_norm):
        raise AssertionError("mu > 2|nu| violated; penalty weights corrupt")

    out = np.zeros((k, 2))
    best = p_objective(out, omega, mu, a, nu)  # value at p = 0

    flat = omega < mu * a_norm  # only these can have a nonzero minimizer
    # nu == 0: plain shrinkage of |p| toward a
    m = flat & (nu_norm <= _TINY) & (a_norm > _TINY)
    if np.any(m):
        out[m] = (1.0 - omega[m] / (mu[m] * a_norm[m]))[:, None] * a[m]
        best[m] = p_objective(out[m], omega[m], mu[m], a[m], nu[m])
    # a == 0, nu == 0, omega < 0: any direction of length -omega/mu
    m = flat & (nu_norm <= _TINY) & (a_norm <= _TINY)
    if np.any(m):
        out[m, 0] = -omega[m] / mu[m]
        best[m] = p_objective(out[m], omega[m], mu[m], a[m], nu[m])
    # a == 0, nu != 0, omega < 0: along +nu
    m = flat & (nu_norm > _TINY) & (a_norm <= _TINY)
    if np.any(m):
        out[m] = (-omega[m] / (mu[m] - 2.0 * nu_norm[m]))[:, None] \
            * nu[m] / nu_norm[m][:, None]
        best[m] = p_objective(out[m], omega[m], mu[m], a[m], nu[m])

    gen = np.nonzero(flat & (nu_norm > _TINY) & (a_norm > _TINY))[0]
    if len(gen):
        _general_case(gen, omega, mu, a, nu, a_norm, nu_norm, out, best, scan)
    return out


def _general_case(gen, omega, mu, a, nu, a_norm, nu_norm, out, best, scan):
    """Bracket all angle-equation roots for the generic nodes and keep the
    best reconstructed candidate per node (in place on out/best)."""
    g_omega, g_mu = omega[gen], mu[gen]
    g_a, g_nu = a[gen], nu[gen]
    g_an, g_nn = a_norm[gen], nu_norm[gen]
    alpha = np.arctan2(g_a[:, 0] * g_nu[:, 1] - g_a[:, 1] * g_nu[:, 0],
                       np.sum(g_a * g_nu, axis=1))
    ts = np.linspace(-np.pi, np.pi, scan)
    vals = theta_equation(ts[None, :], g_omega[:, None], g_mu[:, None],
                          g_an[:, None], g_nn[:, None], alpha[:, None])
    prod = vals[:, :-1] * vals[:, 1:]
    bracket = (prod <= 0) & ~((vals[:, :-1] == 0) & (vals[:, 1:] == 0))
    node, slot = np.nonzero(bracket)
    if len(node) == 0:
        return
    lo = np.full(len(node), 0.0) + ts[slot]
    hi = ts[slot + 1]
    flo = vals[node, slot]
    w, m_, an_, nn_, al_ = (g_omega[node], g_mu[node], g_an[node],
                            g_nn[node], alpha[node])
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        fm = theta_equation(mid, w, m_, an_, nn_, al_)
        go_hi = flo * fm <= 0
        hi = np.where(go_hi, mid, hi)
        lo = np.where(go_hi, lo, mid)
        flo = np.where(go_hi, flo, fm)
    theta = 0.5 * (lo + hi)

    ahat = g_a[node] / g_an[node][:, None]
    c, s = np.cos(theta), np.sin(theta)
    b = np.stack([c * ahat[:, 0] - s * ahat[:, 1],
                  c * ahat[:, 1] + s * ahat[:, 0]], axis=1)
    denom = m_ - 2.0 * np.sum(g_nu[node] * b, axis=1)  # >= mu - 2|nu| > 0
    rho = (m_ * np.sum(g_a[node] * b, axis=1) - w) / denom
    valid = rho > 0
    if not np.any(valid):
        return
    node = node[valid]
    cand = rho[valid][:, None] * b[valid]
    cval = p_objective(cand, g_omega[node], g_mu[node], g_a[node], g_nu[node])
    # per-node argmin over the candidate roots
    order = np.lexsort((cval, node))
    node_sorted = node[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = node_sorted[1:] != node_sorted[:-1]
    take = order[first]
    tgt = gen[node[take]]
    improve = cval[take] < best[tgt]
    tgt = tgt[improve]
    out[tgt] = cand[take][improve]
    best[tgt] = cval[take][improve]


def p_subproblem(state: AlmState, d: np.ndarray, cfg: AlmConfig) -> np.ndarray:
    omega, mu, a, nu = p_coefficients(state, d, cfg)
    shape = state.phi.shape
    p = solve_p_batch(omega.ravel(), mu.ravel(),
                      a.reshape(-1, 2), nu.reshape(-1, 2))
    return p.reshape(shape + (2,))


def n_subproblem(state: AlmState, cfg: AlmConfig) -> np.ndarray:
    """Screened grad-div solve for the unit-normal surrogate."""
    pmag = grid.magnitude(state.p)
    dconst = cfg.r3 * float((pmag ** 2).max()) + cfg.beta2
    rhs = ((dconst - cfg.r3 * pmag ** 2)[..., None] * state.n
           - grad_f(cfg.r2 * state.q + state.lam2)
           - (state.lam3 - cfg.r3 * state.p) * pmag[..., None])
    return spectral.solve_vector_helmholtz(rhs, a=cfg.r2, b=dconst)


def constraint_residuals(state: AlmState):
    """The three splitting constraint fields: p - grad(phi), q - div(n),
    |p| n - p."""
    res_p = state.p - grad_b(state.phi)
    res_q = state.q - div_b(state.n)
    res_n = state.n * grid.magnitude(state.p)[..., None] - state.p
    return res_p, res_q, res_n


def multiplier_update(state: AlmState, cfg: AlmConfig):
    """Ascent step on the multipliers; returns the residual norms used."""
    res_p, res_q, res_n = constraint_residuals(state)
    state.lam1 = state.lam1 + cfg.r1 * res_p
    state.lam2 = state.lam2 + cfg.r2 * res_q
    state.lam3 = state.lam3 + cfg.r3 * res_n
    return (float(np.sqrt((res_p ** 2).sum())),
            float(np.sqrt((res_q ** 2).sum())),
            float(np.sqrt((res_n ** 2).sum())))


def alm_run(cloud: np.ndarray, cfg: AlmConfig, dims) -> RunReport:
    """Full ALM reconstruction on a 2D grid."""
    dims = grid.check_dims(dims)
    if len(dims) != 2:
        raise ValueError("the augmented Lagrangian solver supports 2D only")
    cloud = distance.validate_cloud(cloud, dims)
    d = distance.cloud_distance(cloud, dims)
    state = init_state(cloud, dims, cfg)

    energy_trace = []
    residual_trace = []
    change_trace = []
    stop = STOP_MAX_ITERS
    iters = cfg.max_iters
    for k in range(1, cfg.max_iters + 1):
        phi_old = state.phi
        state.phi = phi_subproblem(state, d, cfg)
        state.q = q_subproblem(state, cfg)
        state.p = p_subproblem(state, d, cfg)
        state.n = n_subproblem(state, cfg)
        # multiplier ascent reads the state the subproblems produced;
        # reinitializing first would feed its deliberate constraint
        # violation into lam1, which winds up without bound
        residual_trace.append(multiplier_update(state, cfg))
        state.phi = levelset.reinitialize(state.phi, cfg.reinit_steps,
                                          cfg.reinit_dtau, cfg.grad_floor)

        for f in state.fields():
            if not np.all(np.isfinite(f)):
                raise RuntimeError(f"non-finite field at iteration {k}")
            if np.abs(f).max() > DIVERGENCE_LIMIT:
                raise RuntimeError("divergent (try smaller r3)")
        energy_trace.append(levelset.energy(
            state.phi, d, state.q, 1, cfg.eta, cfg.epsilon,
            band=cfg.energy_band, grad_floor=cfg.grad_floor))
        change = float(np.abs(state.phi - phi_old).max())
        change_trace.append(change)
        if change < cfg.tol:
            stop = STOP_TOL
            iters = k
            break
    return RunReport(phi=state.phi, iters=iters, stop=stop,
                     energy_trace=energy_trace, phi_change_trace=change_trace,
                     residual_trace=residual_trace)
