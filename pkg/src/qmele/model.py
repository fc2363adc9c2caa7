"""ARMA-GARCH parameterization, residual/volatility filtering and simulation.

The observation model is

    y_t = mu + sum_i phi_i y_{t-i} + sum_j psi_j e_{t-j} + e_t,
    e_t = eta_t sqrt(h_t),
    h_t = alpha0 + sum_i alpha_i e_{t-i}^2 + sum_j beta_j h_{t-j},

with i.i.d. innovations eta_t. Filtering treats pre-sample observations and
residuals as zeros and starts the volatility recursion at its zero-innovation
fixed point alpha0 / (1 - sum beta_j).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter, lfiltic

from .exceptions import DomainError, NumericOverflowError

H_OVERFLOW_LIMIT = 1e300

# closed-form absolute first moments of the unscaled innovation laws
_ABS_MEAN = {
    "laplace": 1.0,
    "normal": np.sqrt(2.0 / np.pi),
    "student_t3": 2.0 * np.sqrt(3.0) / np.pi,
}
_SECOND_MOMENT = {
    "laplace": 2.0,
    "normal": 1.0,
    "student_t3": 3.0,
}


@dataclass(frozen=True)
class ModelOrders:
    """Lag orders (p, q, r, s) of the ARMA(p,q)-GARCH(r,s) model."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("p", "q", "r", "s"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise DomainError(f"order {name} must be a nonnegative integer, got {v!r}")

    @property
    def m(self):
        """Total parameter dimension p+q+r+s+2."""
        return self.p + self.q + self.r + self.s + 2

    @property
    def max_lag(self):
        return max(self.p, self.q, self.r, self.s, 1)

    def param_names(self):
        names = ["mu"]
        names += [f"phi{i}" for i in range(1, self.p + 1)]
        names += [f"psi{i}" for i in range(1, self.q + 1)]
        names += ["alpha0"]
        names += [f"alpha{i}" for i in range(1, self.r + 1)]
        names += [f"beta{i}" for i in range(1, self.s + 1)]
        return names


@dataclass(frozen=True)
class ParamVector:
    """Model parameters theta = (gamma', delta')'.

    gamma = (mu, phi_1..phi_p, psi_1..psi_q) drives the conditional mean,
    delta = (alpha0, alpha_1..alpha_r, beta_1..beta_s) the conditional
    variance. Constraints: alpha0 > 0, alpha_i >= 0, beta_j >= 0 and
    sum_j beta_j < 1.
    """

    orders: ModelOrders
    gamma: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=float))
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=float))
        o = self.orders
        if self.gamma.shape != (o.p + o.q + 1,):
            raise DomainError(
                f"gamma must have length p+q+1={o.p + o.q + 1}, got {self.gamma.shape}"
            )
        if self.delta.shape != (o.r + o.s + 1,):
            raise DomainError(
                f"delta must have length r+s+1={o.r + o.s + 1}, got {self.delta.shape}"
            )

    @classmethod
    def from_parts(cls, orders, mu=0.0, phi=(), psi=(), alpha0=1.0, alpha=(), beta=()):
        gamma = np.concatenate([[mu], np.asarray(phi, float), np.asarray(psi, float)])
        delta = np.concatenate([[alpha0], np.asarray(alpha, float), np.asarray(beta, float)])
        return cls(orders, gamma, delta)

    @classmethod
    def from_theta(cls, orders, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (orders.m,):
            raise DomainError(f"theta must have length m={orders.m}, got {theta.shape}")
        k = orders.p + orders.q + 1
        return cls(orders, theta[:k], theta[k:])

    @property
    def mu(self):
        return float(self.gamma[0])

    @property
    def phi(self):
        return self.gamma[1 : 1 + self.orders.p]

    @property
    def psi(self):
        return self.gamma[1 + self.orders.p :]

    @property
    def alpha0(self):
        return float(self.delta[0])

    @property
    def alpha(self):
        return self.delta[1 : 1 + self.orders.r]

    @property
    def beta(self):
        return self.delta[1 + self.orders.r :]

    @property
    def theta(self):
        return np.concatenate([self.gamma, self.delta])

    @property
    def m(self):
        return self.orders.m

    def validate(self):
        """Raise DomainError if the variance constraints are violated."""
        if not np.all(np.isfinite(self.gamma)) or not np.all(np.isfinite(self.delta)):
            raise DomainError("parameters must be finite")
        if self.alpha0 <= 0.0:
            raise DomainError(f"alpha0 must be > 0, got {self.alpha0}")
        if np.any(self.alpha < 0.0):
            raise DomainError("alpha coefficients must be >= 0")
        if np.any(self.beta < 0.0):
            raise DomainError("beta coefficients must be >= 0")
        if self.beta.sum() >= 1.0:
            raise DomainError(f"sum of beta coefficients must be < 1, got {self.beta.sum()}")
        return self

    def is_valid(self):
        try:
            self.validate()
        except DomainError:
            return False
        return True

    @property
    def h_presample(self):
        """Zero-innovation fixed point alpha0 / (1 - sum beta), used for t <= 0."""
        return self.alpha0 / (1.0 - self.beta.sum())


@dataclass(frozen=True)
class InnovationDist:
    """Innovation law plus the scaling applied before use.

    kind is one of "laplace", "normal", "student_t3", "mixture"; a mixture
    draws N(0,1) with probability 1-epsilon and N(0,tau^2) with probability
    epsilon. standardization selects the identification convention:
    "abs_mean_one" rescales so E|eta| = 1, "var_one" so E eta^2 = 1, and
    "raw" leaves the law untouched. The rescaling constants are closed form.
    """

    kind: str
    standardization: str = "abs_mean_one"
    epsilon: float = 0.0
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in ("laplace", "normal", "student_t3", "mixture"):
            raise DomainError(f"unknown innovation kind {self.kind!r}")
        if self.standardization not in ("abs_mean_one", "var_one", "raw"):
            raise DomainError(f"unknown standardization {self.standardization!r}")
        if self.kind == "mixture":
            if not 0.0 <= self.epsilon <= 1.0:
                raise DomainError("mixture weight epsilon must be in [0, 1]")
            if self.tau <= 0.0:
                raise DomainError("mixture scale tau must be > 0")

    def _raw_abs_mean(self):
        if self.kind == "mixture":
            return np.sqrt(2.0 / np.pi) * (1.0 - self.epsilon + self.epsilon * self.tau)
        return _ABS_MEAN[self.kind]

    def _raw_second_moment(self):
        if self.kind == "mixture":
            return 1.0 - self.epsilon + self.epsilon * self.tau**2
        return _SECOND_MOMENT[self.kind]

    def scale_factor(self):
        """Multiplier applied to raw draws to enforce the standardization."""
        if self.standardization == "abs_mean_one":
            return 1.0 / self._raw_abs_mean()
        if self.standardization == "var_one":
            return 1.0 / np.sqrt(self._raw_second_moment())
        return 1.0

    def abs_mean(self):
        """E|eta| under the chosen standardization."""
        return self._raw_abs_mean() * self.scale_factor()

    def eta2(self):
        """E eta^2 under the chosen standardization."""
        return self._raw_second_moment() * self.scale_factor() ** 2

    def sample(self, rng, size):
        """Draw `size` standardized innovations from `rng`."""
        if self.kind == "laplace":
            raw = rng.laplace(0.0, 1.0, size)
        elif self.kind == "normal":
            raw = rng.standard_normal(size)
        elif self.kind == "student_t3":
            raw = rng.standard_t(3, size)
        else:
            raw = rng.standard_normal(size)
            wide = rng.random(size) < self.epsilon
            raw = np.where(wide, raw * self.tau, raw)
        return raw * self.scale_factor()


@dataclass(frozen=True)
class SeriesData:
    """Observed series y_1..y_n with the zero pre-sample convention."""

    values: np.ndarray
    presample: str = field(default="zeros")

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("series must be a nonempty 1-d vector")
        if not np.all(np.isfinite(v)):
            raise DomainError("series values must be finite")
        if self.presample != "zeros":
            raise DomainError("only the zero pre-sample policy is supported")

    @property
    def n(self):
        return self.values.size


@dataclass(frozen=True)
class FilterOutput:
    """Residuals, volatilities and their first derivatives w.r.t. theta.

    eps and h have length n; deps and dh are n x m with columns ordered as
    (mu, phi_1.., psi_1.., alpha0, alpha_1.., beta_1..). Columns of deps for
    the delta block are identically zero.
    """

    eps: np.ndarray
    h: np.ndarray
    deps: np.ndarray
    dh: np.ndarray


def as_series(data):
    if isinstance(data, SeriesData):
        return data
    return SeriesData(np.asarray(data, dtype=float))


def _shift(v, k, fill=0.0):
    """Lag a vector by k places, padding the head with `fill`."""
    if k == 0:
        return v.copy()
    out = np.empty_like(v)
    out[:k] = fill
    out[k:] = v[:-k]
    return out


def _iir(forcing, lag_coeffs, presample_value):
    """Run x_t = forcing_t + sum_j lag_coeffs[j] * x_{t-j} with constant
    pre-sample outputs x_k = presample_value for k <= 0."""
    lag_coeffs = np.asarray(lag_coeffs, dtype=float)
    if lag_coeffs.size == 0:
        return np.asarray(forcing, dtype=float).copy()
    a = np.concatenate([[1.0], -lag_coeffs])
    zi = lfiltic([1.0], a, y=np.full(lag_coeffs.size, presample_value))
    out, _ = lfilter([1.0], a, forcing, zi=zi)
    return out


def _eps_h(theta, y):
    """Residual and volatility recursions only (no derivatives).

    Does not raise on overflow; callers check finiteness.
    """
    o = theta.orders
    n = y.size
    u = y - theta.mu
    for i in range(1, o.p + 1):
        u = u - theta.phi[i - 1] * _shift(y, i)
    eps = _iir(u, -theta.psi, 0.0)
    e2 = eps * eps
    forcing = np.full(n, theta.alpha0)
    for i in range(1, o.r + 1):
        forcing = forcing + theta.alpha[i - 1] * _shift(e2, i)
    h = _iir(forcing, theta.beta, theta.h_presample)
    return eps, h


def filter_series(theta, data):
    """Filter a series through the model at parameters theta.

    Parameters
    ----------
    theta : ParamVector
    data : SeriesData or array_like

    Returns
    -------
    FilterOutput
        Residuals eps_t, volatilities h_t and the derivative recursions
        d eps_t / d theta and d h_t / d theta. Pre-sample y and eps are
        zeros; pre-sample h is the fixed point alpha0/(1 - sum beta), and
        the derivative recursions start from the exact derivatives of that
        fixed point so they agree with finite differences of this function
        at every t.

    Raises
    ------
    DomainError
        If theta violates the parameter constraints.
    NumericOverflowError
        If a recursion leaves the finite range (message names the first
        offending time index).
    """
    theta.validate()
    data = as_series(data)
    y = data.values
    o = theta.orders
    n, m = y.size, o.m

    with np.errstate(over="ignore", invalid="ignore"):
        eps, h = _eps_h(theta, y)
    _check_finite(eps, "eps")
    _check_finite(h, "h", limit=H_OVERFLOW_LIMIT)

    e2 = eps * eps
    h0 = theta.h_presample
    one_minus_bsum = 1.0 - theta.beta.sum()

    deps = np.zeros((n, m))
    dh = np.zeros((n, m))
    neg_psi = -theta.psi

    # mean-equation derivatives share the MA recursion with eps itself
    col = 0
    deps[:, col] = _iir(np.full(n, -1.0), neg_psi, 0.0)
    for i in range(1, o.p + 1):
        col += 1
        deps[:, col] = _iir(-_shift(y, i), neg_psi, 0.0)
    for k in range(1, o.q + 1):
        col += 1
        deps[:, col] = _iir(-_shift(eps, k), neg_psi, 0.0)

    # volatility derivatives: gamma block feeds through the ARCH terms
    n_gamma = o.p + o.q + 1
    if o.r > 0:
        for j in range(n_gamma):
            cross = eps * deps[:, j]
            f = np.zeros(n)
            for i in range(1, o.r + 1):
                f += 2.0 * theta.alpha[i - 1] * _shift(cross, i)
            dh[:, j] = _iir(f, theta.beta, 0.0)

    col = n_gamma
    dh[:, col] = _iir(np.ones(n), theta.beta, 1.0 / one_minus_bsum)
    for i in range(1, o.r + 1):
        col += 1
        dh[:, col] = _iir(_shift(e2, i), theta.beta, 0.0)
    db0 = theta.alpha0 / one_minus_bsum**2
    for k in range(1, o.s + 1):
        col += 1
        dh[:, col] = _iir(_shift(h, k, fill=h0), theta.beta, db0)

    return FilterOutput(eps=eps, h=h, deps=deps, dh=dh)


def _check_finite(v, name, limit=None):
    bad = ~np.isfinite(v)
    if limit is not None:
        bad |= np.abs(v) > limit
    if bad.any():
        t = int(np.argmax(bad)) + 1
        raise NumericOverflowError(f"{name} recursion overflowed at t={t}", t=t)


def simulate_with_innovations(theta, dist, n, burn_in=500, seed=0):
    """Simulate a path and return (y, eta) for the retained segment."""
    theta.validate()
    if n < 1:
        raise DomainError("n must be >= 1")
    if burn_in < 0:
        raise DomainError("burn_in must be >= 0")
    o = theta.orders
    rng = np.random.default_rng(seed)
    total = burn_in + n
    eta = dist.sample(rng, total)

    lag = o.max_lag
    y = np.zeros(total + lag)
    e = np.zeros(total + lag)
    h = np.empty(total + lag)
    h[:lag] = theta.h_presample

    mu = theta.mu
    phi, psi = theta.phi, theta.psi
    a0, alpha, beta = theta.alpha0, theta.alpha, theta.beta
    for t in range(lag, total + lag):
        ht = a0
        for i in range(1, o.r + 1):
            ht += alpha[i - 1] * e[t - i] ** 2
        for j in range(1, o.s + 1):
            ht += beta[j - 1] * h[t - j]
        if not np.isfinite(ht) or ht > H_OVERFLOW_LIMIT:
            raise NumericOverflowError(
                f"simulated volatility overflowed at t={t - lag + 1}", t=t - lag + 1
            )
        h[t] = ht
        et = eta[t - lag] * np.sqrt(ht)
        yt = mu + et
        for i in range(1, o.p + 1):
            yt += phi[i - 1] * y[t - i]
        for j in range(1, o.q + 1):
            yt += psi[j - 1] * e[t - j]
        e[t] = et
        y[t] = yt

    return y[lag + burn_in :].copy(), eta[burn_in:].copy()


def simulate(theta, dist, n, burn_in=500, seed=0):
    """Simulate n observations from the model (after a burn-in).

    Identical arguments, including the seed, reproduce the identical series.
    """
    y, _ = simulate_with_innovations(theta, dist, n, burn_in=burn_in, seed=seed)
    return SeriesData(y)


def log_return_transform(prices):
    """Convert a positive price series to 100x log returns.

    Returns a SeriesData of length len(prices)-1 with
    y_t = 100 * (log p_t - log p_{t-1}).
    """
    prices = np.asarray(prices, dtype=float)
    if prices.ndim != 1 or prices.size < 2:
        raise DomainError("need at least two prices")
    if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
        raise DomainError("prices must be finite and strictly positive")
    return SeriesData(100.0 * np.diff(np.log(prices)))
