"""Training algorithms: Levenberg-Marquardt, Moller's scaled conjugate
gradient, and the Bayesian-regularized LM variant, plus the hidden-node
grid search.

The LM family minimizes F = beta*E_D + alpha*E_w where E_D is the sum of
squared residuals and E_w the sum of squared parameters. Plain LM is the
alpha = 0, beta = 1 case of the same engine, so pinning alpha to 0 in the
Bayesian variant reproduces LM's iterates exactly.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import mlp
from .errors import TrainingError
from .series_ops import PatternSet

log = logging.getLogger(__name__)

MU_MAX = 1e12
MU_FLOOR = 1e-20

ALGORITHMS = ("lm", "scg", "brnn")


@dataclass(frozen=True)
class TrainConfig:
    algorithm: str = "brnn"
    max_epochs: int = 1000
    objective_tolerance: float = 1e-7     # relative
    gradient_tolerance: float = 1e-6      # infinity norm
    mu_init: float = 1e-3
    mu_factor: float = 10.0
    seed: int = 0
    # brnn only: pin alpha (disables alpha/beta reestimation); None = adapt
    fixed_alpha: Optional[float] = None
    # scg only
    scg_sigma: float = 1e-4
    scg_lambda_init: float = 1e-6

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.objective_tolerance <= 0 or self.gradient_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.mu_factor <= 1.0:
            raise ValueError("mu_factor must exceed 1")


@dataclass(frozen=True)
class TrainReport:
    final_objective: float
    epoch_trace: tuple
    converged: bool
    epochs_used: int
    e_d: float
    e_w: float
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma_effective: Optional[float] = None

    def to_dict(self):
        return {
            "final_objective": self.final_objective,
            "epoch_trace": list(self.epoch_trace),
            "converged": self.converged,
            "epochs_used": self.epochs_used,
            "e_d": self.e_d,
            "e_w": self.e_w,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma_effective": self.gamma_effective,
        }


def _as_xy(patterns):
    if isinstance(patterns, PatternSet):
        return patterns.train_inputs, patterns.train_targets
    inputs, targets = patterns
    return np.asarray(inputs, dtype=float), np.asarray(targets, dtype=float)


def lm_least_squares(
    resid_jac: Callable,
    theta0: np.ndarray,
    config: TrainConfig,
    bayes: bool = False,
):
    """Damped Gauss-Newton engine shared by train_lm and train_brnn.

    resid_jac(theta) -> (residuals, jacobian) with jacobian = d(res)/d(theta).
    With bayes=True alpha/beta are reestimated from the Gauss-Newton Hessian
    after each accepted step (unless config.fixed_alpha pins alpha).
    """
    theta = np.asarray(theta0, dtype=float).copy()
    n_w = theta.size
    r, jac = resid_jac(theta)
    n_d = r.size
    if n_d == 0:
        raise TrainingError("no training patterns")
    e_d = float(r @ r)
    e_w = float(theta @ theta)
    reestimate = bayes and config.fixed_alpha is None
    alpha = float(config.fixed_alpha) if (bayes and config.fixed_alpha is not None) else 0.0
    beta = 1.0
    gamma = float(n_w)
    objective = beta * e_d + alpha * e_w
    if not np.isfinite(objective):
        raise TrainingError("non-finite objective at the initial point")
    mu = config.mu_init
    trace = [objective]
    converged = False
    epochs = 0
    eye = np.eye(n_w)
    for _ in range(config.max_epochs):
        grad = 2.0 * (beta * (jac.T @ r) + alpha * theta)
        if np.max(np.abs(grad)) < config.gradient_tolerance:
            converged = True
            break
        epochs += 1
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        while mu <= MU_MAX:
            lhs = beta * jtj + (beta * mu + alpha) * eye
            try:
                step = np.linalg.solve(lhs, -(beta * jtr + alpha * theta))
            except np.linalg.LinAlgError:
                mu *= config.mu_factor
                continue
            theta_new = theta + step
            r_new, jac_new = resid_jac(theta_new)
            e_d_new = float(r_new @ r_new)
            e_w_new = float(theta_new @ theta_new)
            obj_new = beta * e_d_new + alpha * e_w_new
            if not np.isfinite(obj_new):
                mu *= config.mu_factor
                continue
            if obj_new <= objective:
                accepted = True
                break
            mu *= config.mu_factor
        if not accepted:
            break  # damping overflow: no further descent possible
        mu_used = mu
        mu = max(mu / config.mu_factor, MU_FLOOR)
        rel_change = abs(objective - obj_new) / max(abs(objective), 1e-300)
        theta, r, jac = theta_new, r_new, jac_new
        e_d, e_w = e_d_new, e_w_new
        params_stable = True
        if reestimate:
            old_alpha, old_beta = alpha, beta
            # same damped factorization as the accepted step keeps H
            # positive definite even when J'J is rank deficient
            eig = np.clip(np.linalg.eigvalsh(jac.T @ jac), 0.0, None)
            tr_h_inv = float(np.sum(1.0 / (2.0 * (beta * (eig + mu_used) + alpha))))
            gamma = n_w - 2.0 * alpha * tr_h_inv
            if e_w > 0.0:
                alpha = gamma / (2.0 * e_w)
            if gamma <= n_d - 1 and e_d > 0.0:
                beta = (n_d - gamma) / (2.0 * e_d)
            if not (np.isfinite(alpha) and np.isfinite(beta)):
                raise TrainingError("non-finite alpha/beta reestimate")
            params_stable = (
                abs(alpha - old_alpha) <= config.objective_tolerance * max(abs(old_alpha), 1e-300)
                and abs(beta - old_beta) <= config.objective_tolerance * max(abs(old_beta), 1e-300)
            )
        objective = beta * e_d + alpha * e_w
        trace.append(objective)
        if rel_change < config.objective_tolerance and params_stable:
            converged = True
            break
    report = TrainReport(
        final_objective=objective,
        epoch_trace=tuple(trace),
        converged=converged,
        epochs_used=epochs,
        e_d=e_d,
        e_w=e_w,
        alpha=alpha if bayes else None,
        beta=beta if bayes else None,
        gamma_effective=gamma if bayes else None,
    )
    return theta, report


def scg_minimize(
    f: Callable,
    grad: Callable,
    x0: np.ndarray,
    max_iter: int = 1000,
    grad_tol: float = 1e-6,
    obj_tol: float = 1e-7,
    sigma0: float = 1e-4,
    lambda_init: float = 1e-6,
):
    """Moller's scaled conjugate gradient with finite-difference
    Hessian-vector products. Returns (x, trace, converged, iters);
    converged=True only when the gradient criterion is met."""
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    fx = float(f(x))
    g = grad(x)
    r = -g
    p = r.copy()
    lam = lambda_init
    lam_bar = 0.0
    success = True
    trace = [fx]
    converged = False
    iters = 0
    delta = 0.0
    pnorm2 = float(p @ p)
    if np.max(np.abs(g)) < grad_tol:
        return x, trace, True, 0
    for k in range(1, max_iter + 1):
        iters = k
        if success:
            pnorm2 = float(p @ p)
            if pnorm2 == 0.0:
                converged = np.max(np.abs(g)) < grad_tol
                break
            sigma = sigma0 / np.sqrt(pnorm2)
            s = (grad(x + sigma * p) - g) / sigma
            delta = float(p @ s)
        delta_k = delta + (lam - lam_bar) * pnorm2
        if delta_k <= 0.0:
            lam_bar = 2.0 * (lam - delta_k / pnorm2)
            delta_k = -delta_k + lam * pnorm2
            lam = lam_bar
        mu = float(p @ r)
        alpha = mu / delta_k
        f_new = float(f(x + alpha * p))
        comparison = 2.0 * delta_k * (fx - f_new) / (mu * mu)
        if np.isfinite(comparison) and comparison >= 0.0:
            x = x + alpha * p
            fx_old, fx = fx, f_new
            g = grad(x)
            r_new = -g
            lam_bar = 0.0
            success = True
            if k % n == 0:
                p = r_new.copy()
            else:
                beta_cg = float(r_new @ r_new - r_new @ r) / mu
                p = r_new + beta_cg * p
            r = r_new
            trace.append(fx)
            if comparison >= 0.75:
                lam = max(0.25 * lam, 1e-18)
            if np.max(np.abs(g)) < grad_tol:
                converged = True
                break
            if abs(fx_old - fx) < obj_tol * max(abs(fx_old), 1e-300):
                break  # objective stalled; gradient criterion not met
        else:
            lam_bar = lam
            success = False
        if comparison < 0.25:
            lam = lam + delta_k * (1.0 - comparison) / pnorm2
        if lam > 1e20:
            break
    return x, trace, converged, iters


def _network_resid_jac(model_template, inputs, targets):
    p = model_template.input_dim
    h = model_template.hidden_dim

    def resid_jac(theta):
        return mlp.batch_residuals_and_jacobian(
            mlp.unflatten(theta, p, h), inputs, targets
        )

    return resid_jac


def train_lm(model, patterns, config: TrainConfig):
    """Levenberg-Marquardt minimization of the sum of squared residuals."""
    inputs, targets = _as_xy(patterns)
    theta, report = lm_least_squares(
        _network_resid_jac(model, inputs, targets),
        mlp.flatten(model),
        config,
        bayes=False,
    )
    return mlp.unflatten(theta, model.input_dim, model.hidden_dim), report


def train_brnn(model, patterns, config: TrainConfig):
    """LM on F = beta*E_D + alpha*E_w with evidence-style alpha/beta updates.

    After each accepted step: H ~ 2*beta*J'J + 2*alpha*I,
    gamma = N_w - 2*alpha*tr(H^-1), alpha = gamma/(2*E_w),
    beta = (N_D - gamma)/(2*E_D). alpha starts at 0, beta at 1, with the
    first reestimation after the first accepted step."""
    inputs, targets = _as_xy(patterns)
    theta, report = lm_least_squares(
        _network_resid_jac(model, inputs, targets),
        mlp.flatten(model),
        config,
        bayes=True,
    )
    return mlp.unflatten(theta, model.input_dim, model.hidden_dim), report


def train_scg(model, patterns, config: TrainConfig):
    """Moller's scaled conjugate gradient on the sum of squared residuals."""
    inputs, targets = _as_xy(patterns)
    p, h = model.input_dim, model.hidden_dim
    resid_jac = _network_resid_jac(model, inputs, targets)

    def objective(theta):
        r, _ = resid_jac(theta)
        return float(r @ r)

    def gradient(theta):
        r, jac = resid_jac(theta)
        return 2.0 * (jac.T @ r)

    theta, trace, converged, iters = scg_minimize(
        objective,
        gradient,
        mlp.flatten(model),
        max_iter=config.max_epochs,
        grad_tol=config.gradient_tolerance,
        obj_tol=config.objective_tolerance,
        sigma0=config.scg_sigma,
        lambda_init=config.scg_lambda_init,
    )
    report = TrainReport(
        final_objective=trace[-1],
        epoch_trace=tuple(trace),
        converged=converged,
        epochs_used=iters,
        e_d=trace[-1],
        e_w=float(theta @ theta),
    )
    return mlp.unflatten(theta, p, h), report


_TRAINERS = {"lm": train_lm, "scg": train_scg, "brnn": train_brnn}


def train(model, patterns, config: TrainConfig):
    return _TRAINERS[config.algorithm](model, patterns, config)


def grid_search_hidden(patterns, h_range, config: TrainConfig):
    """Train one model per hidden size (seed derived as config.seed + h) and
    pick the size with the lowest final training MSE; ties go to the
    smaller h. Sizes whose training aborts are excluded."""
    h_values = list(h_range)
    if not h_values:
        raise ValueError("h_range must be non-empty")
    inputs, targets = _as_xy(patterns)
    n_train = targets.size
    results = []
    for h in h_values:
        model0 = mlp.init(inputs.shape[1], h, config.seed + h)
        try:
            trained, report = train(
                model0, (inputs, targets), replace(config, seed=config.seed + h)
            )
        except TrainingError as exc:
            log.warning("hidden size %d aborted: %s", h, exc)
            results.append({"hidden": h, "objective": None, "error": str(exc)})
            continue
        results.append({
            "hidden": h,
            "objective": report.e_d / n_train,
            "converged": report.converged,
            "epochs_used": report.epochs_used,
        })
    usable = [r for r in results if r["objective"] is not None]
    if not usable:
        raise TrainingError("every hidden size aborted during grid search")
    best = min(usable, key=lambda r: (r["objective"], r["hidden"]))
    return best["hidden"], results
