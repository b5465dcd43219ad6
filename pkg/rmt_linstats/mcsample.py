"""
Monte Carlo sampling of ensemble eigenvalues and empirical moments of linear statistics.

Two samplers are available:

    tridiagonal  the beta-Hermite and beta-Laguerre matrix models, with an affine map onto each
                 ensemble's weight
    mcmc         random-walk Metropolis on the log joint density, one coordinate at a time

Samples are drawn in independent streams seeded from a numpy SeedSequence. The number of streams does
not depend on the thread count, so a batch is bit-identical for a given (spec, count, seed, method).
"""
from __future__ import division

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from scipy.linalg import eigh_tridiagonal

from rmt_linstats.errors import DomainError, NumericalError, UnsupportedEnsembleError
from rmt_linstats.util import DotDict, frame_to_csv, get_thread_count, moment_report

logger = logging.getLogger(__name__)

METHODS = ("tridiagonal", "mcmc")
STREAMS = 4
BURN_IN = 10000
PILOT_SWEEPS = 2000
TUNING_INTERVAL = 100
TARGET_ACCEPTANCE = 0.35
MAX_CHAINS = 32
MAX_THIN = 1000


class SampleBatch(object):
    """Eigenvalue samples of one ensemble, sorted ascending within each sample.

    Attributes:
        spec (EnsembleSpec): the ensemble
        eigenvalues (ndarray): shape (count, N)
        seed (int): root seed of the streams
        method (str): "tridiagonal" or "mcmc"
        diagnostics (list): per-stream sampler diagnostics (mcmc only)
    """

    def __init__(self, spec, eigenvalues, seed, method, diagnostics=None):
        self.spec = spec
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.seed = seed
        self.method = method
        self.diagnostics = diagnostics or []

    def __repr__(self):
        return "SampleBatch(%r, count=%d, seed=%r, method=%r)" % (self.spec, self.count, self.seed, self.method)

    def __len__(self):
        return self.count

    @property
    def count(self):
        return self.eigenvalues.shape[0]

    def to_frame(self):
        columns = ["x%d" % (j + 1) for j in range(self.spec.N)]
        return pd.DataFrame(self.eigenvalues, columns=columns)

    def to_csv(self, path=None):
        """One row per sample, one column per sorted eigenvalue."""
        return frame_to_csv(self.to_frame(), path)

    def to_dict(self):
        return {
            "ensemble": self.spec.to_dict(),
            "count": self.count,
            "seed": self.seed,
            "method": self.method,
            "diagnostics": self.diagnostics,
        }


def _chi(rng, df):
    return np.sqrt(rng.chisquare(df))


def _hermite_sample(spec, rng):
    """Eigenvalues with density prop. to prod |x_j - x_k|^beta exp(-sum x^2 / 2)."""
    n, beta = spec.N, spec.beta
    diagonal = rng.standard_normal(n)
    if n == 1:
        return diagonal
    off = _chi(rng, beta * np.arange(n - 1, 0, -1)) / math.sqrt(2.0)
    return eigh_tridiagonal(diagonal, off, eigvals_only=True)


def _laguerre_shape(spec):
    """The parameter a of the beta-Laguerre model, whose density is prop. to
    prod |x_j - x_k|^beta prod x^(a - p) exp(-x / 2) with p = 1 + beta (N - 1) / 2."""
    p = 1.0 + spec.beta * (spec.N - 1) / 2.0
    if spec.beta == 1:
        return spec.alpha / 2.0 + p
    return spec.alpha + p


def _laguerre_sample(spec, rng):
    n, beta = spec.N, spec.beta
    a = _laguerre_shape(spec)
    d = _chi(rng, 2.0 * a - beta * np.arange(n))
    if n == 1:
        return d * d
    e = _chi(rng, beta * np.arange(n - 1, 0, -1))
    diagonal = d * d
    diagonal[1:] += e * e
    off = d[:-1] * e
    return eigh_tridiagonal(diagonal, off, eigvals_only=True)


def tridiagonal_scale(spec):
    """Factor mapping the matrix-model eigenvalues onto the ensemble's weight.

    The Hermite model has weight exp(-x^2/2): GOE needs no change, GUE and GSE (exp(-x^2)) use x/sqrt(2).
    The Laguerre model has exp(-x/2): LOE needs no change, LUE and LSE (exp(-x)) use x/2.
    """
    if spec.beta == 1:
        return 1.0
    return 1.0 / math.sqrt(2.0) if spec.family == "gaussian" else 0.5


def _tridiagonal_stream(spec, count, seed_sequence):
    rng = np.random.default_rng(seed_sequence)
    draw = _hermite_sample if spec.family == "gaussian" else _laguerre_sample
    scale = tridiagonal_scale(spec)
    samples = np.empty((count, spec.N))
    for i in range(count):
        samples[i] = np.sort(draw(spec, rng)) * scale
    return samples, None


def log_density(spec, x):
    """Unnormalized log joint density of the rows of x (shape (chains, N))."""
    x = np.atleast_2d(x)
    value = np.sum(spec.log_weight(x), axis=1)
    for k in range(1, spec.N):
        value = value + spec.beta * np.sum(np.log(np.abs(x[:, k:] - x[:, :-k])), axis=1)
    return value


def _initial_state(spec, chains):
    N = spec.N
    if spec.family == "gaussian":
        exponent, rate = spec._weight_parameters()
        spread = math.sqrt(max(1.0, spec.beta * N) / (2.0 * rate))
        start = np.linspace(-spread, spread, N) if N > 1 else np.zeros(1)
    else:
        start = np.linspace(1.0, 2.0 * spec.beta * N + 1.0, N)
    return np.tile(start, (chains, 1))


class MetropolisChains(object):
    """Independent random-walk Metropolis chains on the joint density, updated coordinate by coordinate."""

    def __init__(self, spec, rng, chains, step=0.5):
        self.spec = spec
        self.rng = rng
        self.state = _initial_state(spec, chains)
        self.step = step
        self.accepted = 0
        self.proposed = 0

    def _log_weight(self, x):
        with np.errstate(divide='ignore', invalid='ignore'):
            return self.spec.log_weight(x)

    def sweep(self):
        x = self.state
        chains, N = x.shape
        beta = self.spec.beta
        for k in range(N):
            old = x[:, k]
            new = old + self.step * self.rng.standard_normal(chains)
            others = np.delete(x, k, axis=1)
            with np.errstate(divide='ignore', invalid='ignore'):
                delta = self._log_weight(new) - self._log_weight(old)
                if N > 1:
                    delta = delta + beta * np.sum(np.log(np.abs(new[:, None] - others)) -
                                                  np.log(np.abs(old[:, None] - others)), axis=1)
            accept = np.log(self.rng.random(chains)) < np.where(np.isnan(delta), -np.inf, delta)
            x[:, k] = np.where(accept, new, old)
            self.accepted += int(np.count_nonzero(accept))
            self.proposed += chains

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposed if self.proposed else 0.0

    def reset_counts(self):
        self.accepted = self.proposed = 0

    def burn_in(self, sweeps):
        """Run the chains, adjusting the step size toward the target acceptance rate."""
        for done in range(1, sweeps + 1):
            self.sweep()
            if done % TUNING_INTERVAL == 0:
                self.step *= math.exp(self.acceptance_rate - TARGET_ACCEPTANCE)
                self.reset_counts()
        self.reset_counts()

    def autocorrelation_time(self, sweeps):
        """Integrated autocorrelation time of sum_j x_j, averaged over chains."""
        trace = np.empty((sweeps, self.state.shape[0]))
        for i in range(sweeps):
            self.sweep()
            trace[i] = np.sum(self.state, axis=1)
        centered = trace - trace.mean(axis=0)
        variance = np.mean(centered * centered)
        if variance == 0:
            return 1.0
        tau = 1.0
        for lag in range(1, sweeps // 2):
            rho = np.mean(centered[lag:] * centered[:-lag]) / variance
            if rho <= 0:
                break
            tau += 2.0 * rho
        return tau

    def collect(self, rounds, thin):
        out = np.empty((rounds,) + self.state.shape)
        for r in range(rounds):
            for _ in range(thin):
                self.sweep()
            out[r] = np.sort(self.state, axis=1)
        return out.reshape(-1, self.state.shape[1])


def _mcmc_stream(spec, count, seed_sequence, burn_in=BURN_IN):
    rng = np.random.default_rng(seed_sequence)
    chains = max(1, min(MAX_CHAINS, count))
    sampler = MetropolisChains(spec, rng, chains)
    sampler.burn_in(burn_in)
    tau = sampler.autocorrelation_time(PILOT_SWEEPS)
    thin = int(min(MAX_THIN, max(1, math.ceil(2.0 * tau))))
    sampler.reset_counts()
    rounds = int(math.ceil(count / chains))
    samples = sampler.collect(rounds, thin)[:count]
    diagnostics = {"chains": chains, "step": sampler.step, "acceptance_rate": sampler.acceptance_rate,
                   "autocorrelation_time": tau, "thin": thin}
    logger.debug("mcmc stream for %r: %r" % (spec, diagnostics))
    if not np.all(np.isfinite(samples)):
        raise NumericalError("the Metropolis sampler produced non-finite eigenvalues")
    return samples, diagnostics


def _stream_counts(count):
    streams = min(STREAMS, count)
    base, extra = divmod(count, streams)
    return [base + (1 if s < extra else 0) for s in range(streams)]


def sample(spec, count, seed=0, method="tridiagonal", burn_in=BURN_IN):
    """Draw count eigenvalue samples from the ensemble's joint density.

    Args:
        spec (EnsembleSpec): the ensemble
        count (int): number of samples, at least 1
        seed (int): root seed; streams use SeedSequence(seed).spawn
        method (str): "tridiagonal" or "mcmc"
        burn_in (int): Metropolis sweeps before sampling (mcmc only)

    Returns:
        SampleBatch
    """
    if method not in METHODS:
        raise UnsupportedEnsembleError("Unknown sampling method %r" % (method,))
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer, got %r" % (count,))
    count = int(count)
    counts = _stream_counts(count)
    children = np.random.SeedSequence(seed).spawn(len(counts))

    def run(index):
        if method == "tridiagonal":
            return _tridiagonal_stream(spec, counts[index], children[index])
        return _mcmc_stream(spec, counts[index], children[index], burn_in)

    threads = min(get_thread_count(), len(counts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(len(counts))))
    else:
        results = [run(index) for index in range(len(counts))]
    eigenvalues = np.concatenate([r[0] for r in results])
    diagnostics = [r[1] for r in results if r[1] is not None]
    logger.info("sampled %d x %s (N=%d) with %s" % (count, spec.name, spec.N, method))
    return SampleBatch(spec, eigenvalues, seed, method, diagnostics)


def linear_statistics(batch, F, rule=None):
    """sum_j F(rule(x_j)) for every sample; the rule defaults to the ensemble's scaling."""
    rule = batch.spec.scaling if rule is None else rule
    if F.is_zero:
        return np.zeros(batch.count)
    return np.sum(F(rule(batch.eigenvalues)), axis=1)


def jackknife_variance_error(values):
    """Jackknife standard error of the sample variance (ddof = 1), from closed-form leave-one-out values."""
    n = values.size
    if n < 3:
        return None
    total, squares = np.sum(values), np.sum(values * values)
    loo_mean = (total - values) / (n - 1)
    loo_var = (squares - values * values - (n - 1) * loo_mean * loo_mean) / (n - 2)
    spread = loo_var - loo_var.mean()
    return float(math.sqrt((n - 1) / n * np.sum(spread * spread)))


def linstat_moments(batch, F, rule=None):
    """Empirical mean and variance of the linear statistic with standard errors.

    Returns:
        MomentReport with method "Monte Carlo", mean_stderr, variance_stderr (jackknife) and samples
    """
    if batch.count < 1:
        raise DomainError("an empty batch has no moments")
    values = linear_statistics(batch, F, rule)
    n = values.size
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1)) if n > 1 else 0.0
    mean_stderr = math.sqrt(variance / n) if n > 1 else None
    return moment_report("Monte Carlo", mean, variance, ensemble=batch.spec.to_dict(), samples=n,
                         mean_stderr=mean_stderr, variance_stderr=jackknife_variance_error(values))


def mgf_estimate(batch, F, lam, rule=None):
    """Sample mean of exp(-lam sum_j F(rule(x_j))) with its standard error."""
    values = np.exp(-lam * linear_statistics(batch, F, rule))
    n = values.size
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else None
    return DotDict(value=float(np.mean(values)), stderr=stderr, samples=n, lam=lam)
