"""Estimators shared by the experiments: tail exponents, scaling slopes,
martingale drift, and the lattice-to-continuum rescaling constants.

Confidence intervals use batch means over 32 batches assigned by
replicate index, so aggregation is independent of scheduling order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

N_BATCHES = 32


@dataclass
class StatReport:
    estimate: float
    se: float
    ci: tuple
    n: int
    method: str
    target: float | None = None
    tolerance: float | None = None
    passed: bool | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "estimate": self.estimate, "se": self.se,
            "ci": [self.ci[0], self.ci[1]], "n": self.n,
            "method": self.method,
        }
        if self.target is not None:
            out["target"] = self.target
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.passed is not None:
            out["pass"] = bool(self.passed)
        out.update(self.extra)
        return out


def judge(report: StatReport, target: float, tol: float) -> StatReport:
    report.target = target
    report.tolerance = tol
    report.passed = abs(report.estimate - target) <= tol
    return report


@dataclass(frozen=True)
class RescaleConstants:
    """Lattice-to-continuum factors at volume parameter n."""

    n: int

    @property
    def distance(self) -> float:
        return (9.0 / 8.0) ** 0.25 * self.n ** -0.25

    @property
    def mass(self) -> float:
        return 1.0 / (2.0 * self.n)

    @property
    def boundary_time(self) -> float:
        return (2.0 ** 1.5 / 3.0) * self.n ** 0.5


def batch_means(values: np.ndarray, index: np.ndarray | None = None,
                ) -> tuple[float, float]:
    """(mean, standard error) via 32 batch means keyed by replicate index."""
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if n == 0:
        raise ValueError("no samples")
    if index is None:
        index = np.arange(n)
    b = np.asarray(index) % N_BATCHES
    sums = np.zeros(N_BATCHES)
    cnts = np.zeros(N_BATCHES)
    np.add.at(sums, b, values)
    np.add.at(cnts, b, 1)
    used = cnts > 0
    means = sums[used] / cnts[used]
    k = used.sum()
    mean = float(values.mean())
    if k < 2:
        return mean, float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    se = float(means.std(ddof=1) / math.sqrt(k))
    return mean, se


def hill_exponent(samples: np.ndarray, k_min: float) -> tuple[float, int]:
    """Hill estimate of the pmf exponent (ccdf index + 1).

    A half-integer shift removes the leading discreteness bias when the
    samples are integers; continuous samples are used as they are.
    """
    s = np.asarray(samples, dtype=np.float64)
    exc = s[s >= k_min]
    if len(exc) < 100:
        raise ValueError(f"too few exceedances above {k_min}: {len(exc)}")
    integral = np.allclose(s, np.round(s))
    shift = 0.5 if integral else 0.0
    logs = np.log(exc + shift) - math.log(k_min - shift if k_min > shift else k_min)
    a_hat = 1.0 / logs.mean()
    return a_hat + 1.0, len(exc)


def ccdf_regression(samples: np.ndarray, lo: float, hi: float,
                    n_points: int = 12) -> tuple[float, float]:
    """(pmf exponent, slope se) from log-log regression of the empirical
    ccdf on a geometric grid in [lo, hi]."""
    s = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(s)
    ks = np.unique(np.round(np.geomspace(lo, hi, n_points)))
    ps = np.array([(n - np.searchsorted(s, k, side="left")) / n for k in ks])
    good = ps > 0
    if good.sum() < 3:
        raise ValueError("ccdf support too short for regression")
    x = np.log(ks[good])
    y = np.log(ps[good])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = max(len(x) - 2, 1)
    se = math.sqrt(float(resid @ resid) / dof / float(((x - x.mean()) ** 2).sum()))
    return 1.0 - slope, se


def tail_exponent(samples: np.ndarray, k_min: float,
                  index: np.ndarray | None = None) -> StatReport:
    """Power-law pmf exponent by Hill plus ccdf regression.

    The estimate is the Hill value; the regression value is reported
    alongside and a large disagreement marks the sample as
    non-power-law.
    """
    samples = np.asarray(samples)
    if len(samples) < 10_000:
        raise ValueError("need at least 1e4 samples")
    hill, n_exc = hill_exponent(samples, k_min)
    top = float(np.quantile(samples, 1 - 1e-5)) if len(samples) > 1e5 \
        else float(samples.max())
    reg, reg_se = ccdf_regression(samples, k_min, max(top, 4 * k_min))
    # jackknife-free SE for Hill: asymptotic alpha/sqrt(n)
    se = (hill - 1.0) / math.sqrt(n_exc)
    rep = StatReport(hill, se, (hill - 2 * se, hill + 2 * se), len(samples),
                     "hill+ccdf", extra={
                         "ccdf_exponent": reg, "ccdf_se": reg_se,
                         "exceedances": n_exc,
                         "power_law_like": bool(abs(hill - reg) < 0.5)})
    return rep


def scaling_slope(scales: np.ndarray, means: np.ndarray,
                  ses: np.ndarray | None = None) -> StatReport:
    """Weighted least-squares slope of log(mean) against log(scale)."""
    scales = np.asarray(scales, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    if np.any(means <= 0):
        raise ValueError("means must be positive for a log-log fit")
    x = np.log(scales)
    y = np.log(means)
    if ses is None:
        w = np.ones_like(x)
    else:
        rel = np.asarray(ses) / means
        rel = np.maximum(rel, 1e-9)
        w = 1.0 / rel ** 2
    xm = (w * x).sum() / w.sum()
    ym = (w * y).sum() / w.sum()
    sxx = (w * (x - xm) ** 2).sum()
    slope = float((w * (x - xm) * (y - ym)).sum() / sxx)
    resid = y - ym - slope * (x - xm)
    dof = max(len(x) - 2, 1)
    se = math.sqrt(float((w * resid ** 2).sum()) / dof / float(sxx))
    return StatReport(slope, se, (slope - 2 * se, slope + 2 * se),
                      len(scales), "wls-loglog")


def martingale_drift(values: np.ndarray, index: np.ndarray | None = None,
                     ) -> StatReport:
    """t-statistic of the mean of terminal increments against zero."""
    values = np.asarray(values, dtype=np.float64)
    mean, se = batch_means(values, index)
    t = mean / se if se > 0 else 0.0
    return StatReport(mean, se, (mean - 2 * se, mean + 2 * se), len(values),
                      "batch-means-t", extra={"t": t})


def geometric_chi_square(counts: dict, max_cell: int = 30) -> tuple[float, int]:
    """Chi-square statistic of terminal-time counts against the fitted
    geometric law; returns (statistic, degrees of freedom)."""
    total = sum(counts.values())
    mean = sum(k * v for k, v in counts.items()) / total
    p = 1.0 / mean  # geometric on {1, 2, ...}
    cells = []
    for k in range(1, max_cell + 1):
        cells.append((counts.get(k, 0), total * p * (1 - p) ** (k - 1)))
    tail_obs = total - sum(o for o, _ in cells)
    tail_exp = total * (1 - p) ** max_cell
    cells.append((tail_obs, tail_exp))
    stat = sum((o - e) ** 2 / e for o, e in cells if e > 0)
    # one parameter fitted from the data
    return stat, len(cells) - 2


def chi_square_gof(observed: np.ndarray, probs: np.ndarray) -> tuple[float, int]:
    """Chi-square statistic against fully specified cell probabilities,
    folding the remainder into a tail cell."""
    observed = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(probs, dtype=np.float64)
    n = observed.sum()
    exp = probs * n
    rest_p = 1.0 - probs.sum()
    stat = float(((observed - exp) ** 2 / np.maximum(exp, 1e-300)).sum())
    dof = len(observed) - 1
    if rest_p > 1e-12:
        dof += 1
    return stat, dof
