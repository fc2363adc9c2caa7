"""Self-weighted estimation and one-step efficient updates.

Two per-observation criteria are supported:

* exponential ("qmele"): l_t = log sqrt(h_t) + |eps_t| / sqrt(h_t), the
  likelihood under double-exponential innovations with E|eta| = 1, robust
  to heavy tails;
* gaussian ("qmle"): l_t = log h_t + eps_t^2 / h_t, the classical
  quasi-likelihood with E eta^2 = 1.

The self-weighted estimator minimizes (1/n) sum_t w_t l_t(theta) by a
derivative-free simplex search on transformed coordinates. The "local"
estimator takes a single Newton-type step from the self-weighted fit,

    theta_1 = theta_0 - [2 Sigma*(theta_0)]^{-1} T*(theta_0),

with the score T* and information-type matrix Sigma* evaluated without
weights, and reports sandwich standard errors (1/4) Sigma^-1 Omega Sigma^-1 / n.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exceptions import (
    DomainError,
    InsufficientDataError,
    SingularInformationError,
)
from .model import (
    H_OVERFLOW_LIMIT,
    ModelOrders,
    ParamVector,
    _check_finite,
    _eps_h,
    as_series,
    filter_series,
)
from .weights import WeightSpec, compute_weights

SW_QMELE = "sw_qmele"
LOCAL_QMELE = "local_qmele"
SW_QMLE = "sw_qmle"
LOCAL_QMLE = "local_qmle"
ESTIMATOR_KINDS = (SW_QMELE, LOCAL_QMELE, SW_QMLE, LOCAL_QMLE)

ETA2_FLOOR = 1.0 + 1e-6
COND_LIMIT = 1e12
MAX_STEP_HALVINGS = 30
_XCLIP = 60.0


@dataclass(frozen=True)
class G0Mode:
    """How to obtain the innovation density at zero, g(0).

    kind "kernel" estimates it from standardized residuals; "known" injects
    a user-supplied value (e.g. 0.5 for standardized double-exponential
    innovations in simulation studies).
    """

    kind: str = "kernel"
    value: float | None = None

    def __post_init__(self):
        if self.kind not in ("kernel", "known"):
            raise DomainError(f"unknown g0 mode {self.kind!r}")
        if self.kind == "known" and (self.value is None or self.value <= 0.0):
            raise DomainError("known g0 requires a positive value")

    @classmethod
    def kernel(cls):
        return cls("kernel")

    @classmethod
    def known(cls, value):
        return cls("known", float(value))


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 3000
    restarts: int = 5
    simplex_tolerance: float = 1e-7
    parameter_transform: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if self.restarts < 0:
            raise DomainError("restarts must be >= 0")
        if self.simplex_tolerance <= 0.0:
            raise DomainError("simplex_tolerance must be > 0")


@dataclass(frozen=True)
class FitConfig:
    weight_spec: WeightSpec = field(default_factory=WeightSpec)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    g0_mode: G0Mode = field(default_factory=G0Mode.kernel)
    seed: int = 0


@dataclass(frozen=True)
class FitResult:
    """A fitted model with its estimated sampling covariance.

    covariance already carries the (1/4) Sigma^-1 Omega Sigma^-1 / n scaling,
    i.e. it estimates Var(theta_hat); std_errors are the square roots of its
    diagonal. g0 and eta2 record the nuisance quantities used to build it.
    """

    theta_hat: ParamVector
    objective_value: float
    covariance: np.ndarray
    std_errors: np.ndarray
    converged: bool
    iterations: int
    estimator_kind: str
    g0: float = np.nan
    eta2: float = np.nan
    weights: np.ndarray | None = None
    shrink_count: int = 0

    @property
    def orders(self):
        return self.theta_hat.orders


# ---------------------------------------------------------------------------
# objectives


def _objective_values(eps, h, criterion):
    if criterion == "qmele":
        return 0.5 * np.log(h) + np.abs(eps) / np.sqrt(h)
    if criterion == "qmle":
        return np.log(h) + eps * eps / h
    raise DomainError(f"unknown criterion {criterion!r}")


def _objective(theta, y, w, criterion):
    """Weighted criterion mean; +inf if the filter leaves the finite range."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        eps, h = _eps_h(theta, y)
        val = float(np.mean(w * _objective_values(eps, h, criterion)))
    return val if np.isfinite(val) else np.inf


def _checked_objective(theta, data, weights, criterion):
    theta.validate()
    data = as_series(data)
    w = np.asarray(weights, dtype=float)
    if w.shape != data.values.shape:
        raise DomainError("weights must match the series length")
    with np.errstate(over="ignore", invalid="ignore"):
        eps, h = _eps_h(theta, data.values)
    # filter overflow propagates, as from filter_series
    _check_finite(eps, "eps")
    _check_finite(h, "h", limit=H_OVERFLOW_LIMIT)
    return float(np.mean(w * _objective_values(eps, h, criterion)))


def qmele_objective(theta, data, weights):
    """Self-weighted exponential criterion (1/n) sum w_t [log sqrt(h_t) + |eps_t|/sqrt(h_t)]."""
    return _checked_objective(theta, data, weights, "qmele")


def qmle_objective(theta, data, weights):
    """Self-weighted gaussian criterion (1/n) sum w_t [log h_t + eps_t^2/h_t]."""
    return _checked_objective(theta, data, weights, "qmle")


# ---------------------------------------------------------------------------
# scores and information-type matrices


def t_star(theta, data):
    """Exponential-criterion score sum

    T*(theta) = sum_t { h_t^{-1/2} (d eps_t/d theta) sign(eta_t)
                        + (2 h_t)^{-1} (d h_t/d theta) (1 - |eta_t|) },

    with sign(0) = 0. Equals n times the gradient of the unweighted
    exponential objective wherever no eta_t sits on the kink.
    """
    out = filter_series(theta, data)
    eta = out.eps / np.sqrt(out.h)
    sgn = np.sign(eta)
    return (sgn / np.sqrt(out.h)) @ out.deps + ((1.0 - np.abs(eta)) / (2.0 * out.h)) @ out.dh


def sigma_star(theta, data, g0):
    """Exponential-criterion information-type matrix sum

    Sigma*(theta) = sum_t { g0/h_t (d eps/d theta)(d eps/d theta)'
                            + (8 h_t^2)^{-1} (d h/d theta)(d h/d theta)' }.
    """
    if g0 <= 0.0:
        raise DomainError("g0 must be > 0")
    out = filter_series(theta, data)
    e_scale = g0 / out.h
    h_scale = 1.0 / (8.0 * out.h**2)
    return _weighted_cross(out.deps, e_scale) + _weighted_cross(out.dh, h_scale)


def _t_gauss(theta, data):
    """Gaussian-criterion score sum (gradient of sum_t [log h_t + eps_t^2/h_t])."""
    out = filter_series(theta, data)
    eta2 = out.eps**2 / out.h
    return (2.0 * out.eps / out.h) @ out.deps + ((1.0 - eta2) / out.h) @ out.dh


def _sigma_gauss(theta, data):
    """Gaussian-criterion half-Hessian sum, mirroring sigma_star."""
    out = filter_series(theta, data)
    return _weighted_cross(out.deps, 1.0 / out.h) + _weighted_cross(out.dh, 1.0 / (2.0 * out.h**2))


def _weighted_cross(mat, scale):
    return (mat * scale[:, None]).T @ mat


# ---------------------------------------------------------------------------
# nuisance estimates


def estimate_eta2(residuals):
    """Mean of squared standardized residuals, the plug-in for E eta^2."""
    r = np.asarray(residuals, dtype=float)
    if r.size == 0:
        raise DomainError("residuals must be nonempty")
    return float(np.mean(r * r))


def estimate_g0(residuals, mode=G0Mode.kernel()):
    """Innovation density at zero.

    Kernel mode evaluates a gaussian kernel density estimate at 0 with the
    bandwidth 1.06 * sigma_hat * n^{-1/5}, where sigma_hat is the robust
    scale min(std, IQR/1.349). Known mode returns the supplied value.
    """
    if mode.kind == "known":
        return float(mode.value)
    r = np.asarray(residuals, dtype=float)
    if r.size == 0:
        raise DomainError("residuals must be nonempty")
    sd = float(np.std(r, ddof=1)) if r.size > 1 else 0.0
    q75, q25 = np.percentile(r, [75.0, 25.0])
    iqr_scale = (q75 - q25) / 1.349
    sigma = min(x for x in (sd, iqr_scale) if x > 0.0) if max(sd, iqr_scale) > 0.0 else 0.0
    if sigma <= 0.0:
        raise DomainError("residuals have no spread; cannot estimate a density")
    bw = 1.06 * sigma * r.size ** (-0.2)
    u = r / bw
    return float(np.mean(np.exp(-0.5 * u * u)) / (bw * np.sqrt(2.0 * np.pi)))


# ---------------------------------------------------------------------------
# sandwich covariances


def _sym_inv(mat):
    """Inverse of a symmetric PSD matrix with a condition-number guard."""
    sym = 0.5 * (mat + mat.T)
    vals, vecs = np.linalg.eigh(sym)
    if vals[-1] <= 0.0 or vals[0] <= 0.0 or vals[-1] / vals[0] > COND_LIMIT:
        raise SingularInformationError(
            f"information matrix is numerically singular (eigenvalues {vals[0]:.3e}..{vals[-1]:.3e})"
        )
    return (vecs / vals) @ vecs.T


def covariance_self_weighted(theta, data, weights, g0, eta2):
    """Sampling covariance of the self-weighted estimator.

    Builds the sample averages

        Sigma_hat = (1/n) sum w_t [ g0/h_t deps deps' + (8 h_t^2)^{-1} dh dh' ],
        Omega_hat = (1/n) sum [ w_t^2/h_t deps deps'
                                + (eta2-1)/4 * w_t^2/h_t^2 dh dh' ],

    and returns (1/4) Sigma_hat^{-1} Omega_hat Sigma_hat^{-1} / n.
    """
    if g0 <= 0.0:
        raise DomainError("g0 must be > 0")
    if eta2 < 1.0:
        raise DomainError("eta2 must be >= 1 (E|eta| = 1 forces E eta^2 >= 1)")
    data = as_series(data)
    w = np.asarray(weights, dtype=float)
    if w.shape != data.values.shape:
        raise DomainError("weights must match the series length")
    out = filter_series(theta, data)
    n = data.n
    sig = (
        _weighted_cross(out.deps, g0 * w / out.h)
        + _weighted_cross(out.dh, w / (8.0 * out.h**2))
    ) / n
    omg = (
        _weighted_cross(out.deps, w * w / out.h)
        + _weighted_cross(out.dh, 0.25 * (eta2 - 1.0) * w * w / out.h**2)
    ) / n
    sig_inv = _sym_inv(sig)
    cov = 0.25 * sig_inv @ omg @ sig_inv / n
    return 0.5 * (cov + cov.T)


def covariance_local(theta, data, g0, eta2):
    """Sampling covariance of the one-step estimator (unit weights)."""
    data = as_series(data)
    return covariance_self_weighted(theta, data, np.ones(data.n), g0, eta2)


def _covariance_gauss(theta, data, weights, eta2, eta_sq_dev):
    """Gaussian-criterion sandwich with estimated residual moments.

    eta_sq_dev is the plug-in for E(1 - eta^2)^2; the score outer product is
        Omega = (1/n) sum w^2 [ 4 eta2 / h deps deps' + eta_sq_dev / h^2 dh dh' ].
    """
    data = as_series(data)
    w = np.asarray(weights, dtype=float)
    out = filter_series(theta, data)
    n = data.n
    sig = (
        _weighted_cross(out.deps, w / out.h) + _weighted_cross(out.dh, w / (2.0 * out.h**2))
    ) / n
    omg = (
        _weighted_cross(out.deps, 4.0 * eta2 * w * w / out.h)
        + _weighted_cross(out.dh, eta_sq_dev * w * w / out.h**2)
    ) / n
    sig_inv = _sym_inv(sig)
    cov = 0.25 * sig_inv @ omg @ sig_inv / n
    return 0.5 * (cov + cov.T)


# ---------------------------------------------------------------------------
# coordinate transform for the simplex search


def _to_unconstrained(theta):
    """Map a valid ParamVector to unconstrained coordinates.

    gamma passes through; alpha coordinates map by log; beta maps by the
    softmax-with-slack inverse z_j = log(beta_j / (1 - sum beta)).
    """
    o = theta.orders
    x = [theta.gamma]
    alpha_part = np.log(np.maximum(theta.delta[: 1 + o.r], 1e-300))
    x.append(alpha_part)
    if o.s > 0:
        slack = max(1.0 - theta.beta.sum(), 1e-12)
        x.append(np.log(np.maximum(theta.beta, 1e-12) / slack))
    return np.concatenate(x)


def _from_unconstrained(x, orders):
    """Inverse of _to_unconstrained; clips to keep exp in the finite range."""
    o = orders
    x = np.clip(np.asarray(x, dtype=float), -_XCLIP, _XCLIP)
    n_gamma = o.p + o.q + 1
    gamma = x[:n_gamma]
    alpha_part = np.exp(x[n_gamma : n_gamma + 1 + o.r])
    if o.s > 0:
        z = x[n_gamma + 1 + o.r :]
        zmax = max(0.0, float(np.max(z)))
        expz = np.exp(z - zmax)
        beta = expz / (np.exp(-zmax) + expz.sum())
    else:
        beta = np.empty(0)
    return ParamVector(orders, gamma, np.concatenate([alpha_part, beta]))


# ---------------------------------------------------------------------------
# initializer


def _long_ar_residuals(y, order):
    n = y.size
    order = max(1, min(order, n // 4))
    X = np.column_stack(
        [np.ones(n - order)] + [y[order - i - 1 : n - i - 1] for i in range(order)]
    )
    coef, *_ = np.linalg.lstsq(X, y[order:], rcond=None)
    resid = np.zeros(n)
    resid[order:] = y[order:] - X @ coef
    return resid


def _initial_params(y, orders):
    """Moment-based starting point: least-squares ARMA for gamma, a scaled
    variance proxy for alpha0 and mild fixed values for alpha/beta."""
    o = orders
    n = y.size
    if o.p == 0 and o.q == 0:
        mu = float(np.mean(y))
        phi = np.empty(0)
        psi = np.empty(0)
        resid = y - mu
    else:
        if o.q > 0:
            pre_resid = _long_ar_residuals(y, max(2 * (o.p + o.q), 5))
        else:
            pre_resid = None
        k = max(o.p, o.q)
        rows = np.arange(k, n)
        cols = [np.ones(rows.size)]
        for i in range(1, o.p + 1):
            cols.append(y[rows - i])
        for j in range(1, o.q + 1):
            cols.append(pre_resid[rows - j])
        X = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(X, y[rows], rcond=None)
        mu = float(coef[0])
        phi = np.clip(coef[1 : 1 + o.p], -0.97, 0.97)
        psi = np.clip(coef[1 + o.p :], -0.97, 0.97)
        resid = y[rows] - X @ np.concatenate([[mu], phi, psi])

    r2 = resid * resid
    proxy = min(float(np.mean(r2)), 10.0 * float(np.median(r2)) + 1e-12)
    alpha0 = max(0.5 * proxy, 1e-8)
    alpha = np.full(o.r, 0.05)
    beta = np.full(o.s, 0.5 / o.s) if o.s > 0 else np.empty(0)
    return ParamVector.from_parts(orders, mu, phi, psi, alpha0, alpha, beta)


# ---------------------------------------------------------------------------
# fitting


def fit_self_weighted(data, orders, config=FitConfig(), criterion="qmele"):
    """Minimize the self-weighted criterion over the constrained space.

    Runs a Nelder-Mead search from a moment-based initializer plus
    `config.optimizer.restarts` seeded random restarts around it, keeps the
    best local minimum, polishes it with one more simplex pass, and fills in
    the matching sandwich covariance.

    Returns a FitResult; converged=False flags that no simplex run met the
    termination tolerances (the best point found is still reported, with
    NaN covariance).
    """
    if criterion not in ("qmele", "qmle"):
        raise DomainError(f"unknown criterion {criterion!r}")
    data = as_series(data)
    y = data.values
    if not isinstance(orders, ModelOrders):
        orders = ModelOrders(*orders)
    if data.n < 10 * orders.m:
        raise InsufficientDataError(
            f"need n >= 10*m = {10 * orders.m} observations, have {data.n}"
        )

    w = compute_weights(data, config.weight_spec, orders)
    opt = config.optimizer
    init = _initial_params(y, orders)

    if not opt.parameter_transform:
        return _fit_raw(data, orders, config, criterion, init, w)

    def loss(x):
        return _objective(_from_unconstrained(x, orders), y, w, criterion)

    x0 = _to_unconstrained(init)
    rng = np.random.default_rng(config.seed)
    n_gamma = orders.p + orders.q + 1
    jitter_scale = np.concatenate([np.full(n_gamma, 0.3), np.full(orders.m - n_gamma, 0.7)])
    starts = [x0] + [x0 + rng.normal(0.0, 1.0, orders.m) * jitter_scale for _ in range(opt.restarts)]

    nm_options = dict(
        maxiter=opt.max_iter,
        maxfev=10 * opt.max_iter,
        xatol=opt.simplex_tolerance,
        fatol=opt.simplex_tolerance * 1e-3,
    )
    best = None
    total_iter = 0
    any_success = False
    for xs in starts:
        res = minimize(loss, xs, method="Nelder-Mead", options=nm_options)
        total_iter += res.nit
        any_success = any_success or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    # polish: restart the simplex at the incumbent to escape collapsed shapes
    res = minimize(loss, best.x, method="Nelder-Mead", options=nm_options)
    total_iter += res.nit
    any_success = any_success or bool(res.success)
    if res.fun <= best.fun:
        best = res

    theta_hat = _from_unconstrained(best.x, orders)
    return _finalize_fit(
        theta_hat,
        data,
        w,
        config,
        criterion,
        objective_value=float(best.fun),
        converged=any_success and np.isfinite(best.fun),
        iterations=total_iter,
    )


def _fit_raw(data, orders, config, criterion, init, w):
    """Untransformed-coordinate fallback; invalid points get +inf."""
    y = data.values
    opt = config.optimizer

    def loss(x):
        theta = ParamVector.from_theta(orders, x)
        if not theta.is_valid():
            return np.inf
        return _objective(theta, y, w, criterion)

    nm_options = dict(
        maxiter=opt.max_iter,
        maxfev=10 * opt.max_iter,
        xatol=opt.simplex_tolerance,
        fatol=opt.simplex_tolerance * 1e-3,
    )
    rng = np.random.default_rng(config.seed)
    x0 = init.theta
    starts = [x0] + [x0 * (1.0 + 0.2 * rng.normal(size=orders.m)) for _ in range(opt.restarts)]
    best = None
    total_iter = 0
    any_success = False
    for xs in starts:
        res = minimize(loss, xs, method="Nelder-Mead", options=nm_options)
        total_iter += res.nit
        any_success = any_success or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    theta_hat = ParamVector.from_theta(orders, best.x)
    return _finalize_fit(
        theta_hat,
        data,
        w,
        config,
        criterion,
        objective_value=float(best.fun),
        converged=any_success and np.isfinite(best.fun) and theta_hat.is_valid(),
        iterations=total_iter,
    )


def _residual_moments(theta, data, config):
    eps, h = _eps_h(theta, data.values)
    eta = eps / np.sqrt(h)
    eta2 = max(estimate_eta2(eta), ETA2_FLOOR)
    g0 = estimate_g0(eta, config.g0_mode)
    eta_sq_dev = float(np.mean((1.0 - eta * eta) ** 2))
    return eta, g0, eta2, eta_sq_dev


def _finalize_fit(theta_hat, data, w, config, criterion, objective_value, converged, iterations):
    kind = SW_QMELE if criterion == "qmele" else SW_QMLE
    m = theta_hat.m
    cov = np.full((m, m), np.nan)
    se = np.full(m, np.nan)
    g0 = eta2 = np.nan
    if converged:
        try:
            _, g0, eta2, eta_sq_dev = _residual_moments(theta_hat, data, config)
            if criterion == "qmele":
                cov = covariance_self_weighted(theta_hat, data, w, g0, eta2)
            else:
                cov = _covariance_gauss(theta_hat, data, w, eta2, eta_sq_dev)
            se = np.sqrt(np.maximum(np.diag(cov), 0.0))
        except (SingularInformationError, DomainError, ArithmeticError):
            cov = np.full((m, m), np.nan)
            se = np.full(m, np.nan)
    return FitResult(
        theta_hat=theta_hat,
        objective_value=objective_value,
        covariance=cov,
        std_errors=se,
        converged=converged,
        iterations=iterations,
        estimator_kind=kind,
        g0=float(g0),
        eta2=float(eta2),
        weights=w,
    )


def local_qmele_step(theta_init, data, g0=None, config=FitConfig()):
    """One Newton-type step from a converged self-weighted fit.

    The update direction is -[2 Sigma*]^{-1} T* for the exponential
    criterion (or its gaussian analogue when the initializer is a
    self-weighted gaussian fit). Steps that leave the constraint region are
    halved until feasible; the number of halvings is reported.

    g0 defaults to the config's g0 mode evaluated on the initializer's
    standardized residuals.
    """
    if not isinstance(theta_init, FitResult):
        raise DomainError("theta_init must be a FitResult from fit_self_weighted")
    if not theta_init.converged:
        raise DomainError("one-step update requires a converged initializer")
    data = as_series(data)
    theta0 = theta_init.theta_hat
    gaussian = theta_init.estimator_kind in (SW_QMLE, LOCAL_QMLE)

    eta0, g0_est, _, _ = _residual_moments(theta0, data, config)
    if g0 is None:
        g0 = g0_est

    if gaussian:
        T = _t_gauss(theta0, data)
        S = _sigma_gauss(theta0, data)
    else:
        T = t_star(theta0, data)
        S = sigma_star(theta0, data, g0)
    step = -_sym_inv(2.0 * S) @ T

    shrink = 0
    theta1 = ParamVector.from_theta(theta0.orders, theta0.theta + step)
    while not theta1.is_valid():
        shrink += 1
        if shrink > MAX_STEP_HALVINGS:
            raise DomainError("one-step update could not be shrunk into the feasible region")
        step = 0.5 * step
        theta1 = ParamVector.from_theta(theta0.orders, theta0.theta + step)

    eps1, h1 = _eps_h(theta1, data.values)
    eta1 = eps1 / np.sqrt(h1)
    eta2 = max(estimate_eta2(eta1), ETA2_FLOOR)
    if gaussian:
        eta_sq_dev = float(np.mean((1.0 - eta1 * eta1) ** 2))
        cov = _covariance_gauss(theta1, data, np.ones(data.n), eta2, eta_sq_dev)
    else:
        cov = covariance_local(theta1, data, g0, eta2)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    w = theta_init.weights
    objective = _objective(theta1, data.values, np.ones(data.n), "qmle" if gaussian else "qmele")
    return FitResult(
        theta_hat=theta1,
        objective_value=objective,
        covariance=cov,
        std_errors=se,
        converged=True,
        iterations=1,
        estimator_kind=LOCAL_QMLE if gaussian else LOCAL_QMELE,
        g0=float(g0),
        eta2=float(eta2),
        weights=w,
        shrink_count=shrink,
    )
