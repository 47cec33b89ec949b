"""Finite-sample oracles: packing/cover counts, Monte Carlo Rademacher
estimates and the teacher-student generalization-gap harness."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import hybrid
from .bounds import BoundBreakdown, generalization_bound_hybrid
from .errors import DivergenceError, ParameterError, ShapeError

METRICS = ("l2", "frobenius", "spectral", "x_l2")


@dataclass(frozen=True)
class MetricSpaceSample:
    """A finite point cloud with a named metric.

    ``points`` layout per metric:

    * ``"l2"``: (P, d) real vectors
    * ``"frobenius"``: (P, a, b) real or complex matrices
    * ``"spectral"``: (P, d, d) matrices, operator-norm distance
    * ``"x_l2"``: (P, N, o) hypothesis outputs on a fixed sample of N inputs;
      distance is the root mean over the sample of squared output distances
    """

    points: np.ndarray
    metric: str = "l2"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ParameterError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        pts = np.asarray(self.points)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] == 0:
            raise ParameterError("metric space sample is empty")
        if self.metric == "spectral" and (pts.ndim != 3 or pts.shape[1] != pts.shape[2]):
            raise ShapeError(f"spectral metric needs (P, d, d) points, got {pts.shape}")
        if self.metric == "x_l2" and pts.ndim == 2:
            pts = pts[:, :, None]
        object.__setattr__(self, "points", pts)
        flat = pts.reshape(pts.shape[0], -1)
        if self.metric == "x_l2":
            flat = flat / math.sqrt(pts.shape[1])
        if np.iscomplexobj(flat):
            flat = np.concatenate([flat.real, flat.imag], axis=1)
        # Euclidean embedding: exact for l2 / frobenius / x_l2, a screen for spectral
        object.__setattr__(self, "_flat", np.ascontiguousarray(flat, dtype=float))

    def __len__(self):
        return self.points.shape[0]

    def distances(self, i, idx):
        """Distances from point ``i`` to the points ``idx``."""
        idx = np.asarray(idx, dtype=int)
        if self.metric == "spectral":
            diff = self.points[idx] - self.points[i]
            return np.linalg.norm(diff, ord=2, axis=(1, 2))
        return np.linalg.norm(self._flat[idx] - self._flat[i], axis=1)

    def within(self, i, idx, radius):
        """Boolean mask ``d(i, idx) <= radius``."""
        idx = np.asarray(idx, dtype=int)
        frob = np.linalg.norm(self._flat[idx] - self._flat[i], axis=1)
        if self.metric != "spectral":
            return frob <= radius
        # ||A||_F / sqrt(d) <= ||A||_2 <= ||A||_F
        d = self.points.shape[1]
        mask = frob <= radius
        unsure = ~mask & (frob <= radius * math.sqrt(d))
        if np.any(unsure):
            mask[unsure] = self.distances(i, idx[unsure]) <= radius
        return mask

    def diameter(self):
        return max(float(self.distances(i, np.arange(len(self))).max()) for i in range(len(self)))


def greedy_packing(space, eps):
    """Indices of a maximal subset with pairwise distances strictly above ``2 eps``.

    Points are scanned in order and kept when they are farther than ``2 eps``
    from everything kept so far.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if len(space) == 0:
        raise ParameterError("empty space")
    remaining = np.arange(len(space))
    chosen = []
    while remaining.size:
        i = remaining[0]
        chosen.append(int(i))
        rest = remaining[1:]
        remaining = rest[~space.within(i, rest, 2 * eps)]
    return chosen


def greedy_packing_number(space, eps):
    """Size of :func:`greedy_packing`; a lower bound on the covering number at ``eps``."""
    return len(greedy_packing(space, eps))


def greedy_cover(space, eps):
    """Centres of a greedy ``eps``-cover of the sample (max-coverage heuristic).

    Each round picks the sample point whose closed ``eps``-ball holds the most
    still-uncovered points. Builds the full coverage matrix, so keep the
    sample to a few thousand points.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    P = len(space)
    if P == 0:
        raise ParameterError("empty space")
    every = np.arange(P)
    cover = np.array([space.within(i, every, eps) for i in range(P)])
    uncovered = np.ones(P, dtype=bool)
    counts = cover.sum(axis=1)
    centres = []
    while uncovered.any():
        c = int(np.argmax(counts))
        centres.append(c)
        newly = cover[c] & uncovered
        uncovered &= ~newly
        counts -= cover[:, newly].sum(axis=1)
    hit = cover[centres].any(axis=0)
    assert hit.all(), "greedy cover left points uncovered"
    return centres


def greedy_cover_number(space, eps):
    return len(greedy_cover(space, eps))


# ---------------------------------------------------------------------------
# Hypothesis-level oracles
# ---------------------------------------------------------------------------

def _inputs(X):
    return X.inputs if isinstance(X, hybrid.SampleSet) else np.atleast_2d(np.asarray(X, dtype=float))


def _outputs(h, X):
    if isinstance(h, hybrid.HybridModel):
        out = hybrid.predict_batch(h, X)
    else:
        out = np.asarray(h(X), dtype=float)
    return out.reshape(X.shape[0], -1)


def hypothesis_distance(h1, h2, X):
    """``sqrt(mean_j ||h1(x_j) - h2(x_j)||^2)`` over the sample."""
    X = _inputs(X)
    if X.shape[0] == 0:
        raise ParameterError("empty sample")
    a, b = _outputs(h1, X), _outputs(h2, X)
    if a.shape != b.shape:
        raise ShapeError(f"output shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=1))))


@dataclass(frozen=True)
class RademacherEstimate:
    mean: float
    stderr: float
    draws: int
    exhaustive: bool = False


def output_matrix(grid, X):
    """Values of scalar hypotheses on the sample, shape (H, N)."""
    X = _inputs(X)
    rows = []
    for h in grid:
        out = _outputs(h, X)
        if out.shape[1] != 1:
            raise ShapeError("Rademacher estimation needs scalar-output hypotheses")
        rows.append(out[:, 0])
    return np.array(rows)


def rademacher_from_values(values, draws=1000, seed=0, exhaustive=False):
    """Rademacher average of the rows of ``values`` (shape (H, N))."""
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[0] == 0:
        raise ParameterError("empty hypothesis grid")
    N = values.shape[1]
    if exhaustive:
        if N > 20:
            raise ParameterError(f"exhaustive signs need N <= 20, got {N}")
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=N)))
    else:
        if draws < 1:
            raise ParameterError("draws must be >= 1")
        rng = np.random.default_rng(seed)
        signs = rng.choice((-1.0, 1.0), size=(int(draws), N))
    sups = (signs @ values.T).max(axis=1) / N
    if exhaustive:
        return RademacherEstimate(float(sups.mean()), 0.0, len(signs), True)
    stderr = float(sups.std(ddof=1) / math.sqrt(len(sups))) if len(sups) > 1 else float("inf")
    return RademacherEstimate(float(sups.mean()), stderr, len(sups), False)


def monte_carlo_rademacher(grid, X, draws=1000, seed=0, exhaustive=False):
    """Estimate ``E_sigma sup_h (1/N) sum_i sigma_i h(x_i)`` over a finite grid.

    ``grid`` holds hybrid models or callables mapping an (N, d) array to N
    scalar outputs. With ``exhaustive=True`` all ``2^N`` sign patterns are
    enumerated and the result is exact.
    """
    grid = list(grid)
    if not grid:
        raise ParameterError("empty hypothesis grid")
    return rademacher_from_values(output_matrix(grid, X), draws, seed, exhaustive)


# ---------------------------------------------------------------------------
# Generalization-gap experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapRecord:
    seed: int
    N: int
    train_risk: float
    test_risk: float
    gap: float
    bound: BoundBreakdown
    test_stderr: float = float("nan")
    diverged: bool = False

    CSV_COLUMNS = ("seed", "N", "train_risk", "test_risk", "gap", "classical_term",
                   "quantum_term", "confidence_term", "bound_total")

    def csv_row(self):
        b = self.bound
        return (self.seed, self.N, self.train_risk, self.test_risk, self.gap,
                b.classical_term, b.quantum_term, b.confidence_term, b.total)


def _build_model(cfg, rng, on_sphere):
    c, n = cfg.circuit, cfg.net
    return hybrid.random_model(
        c.qubits, c.T, list(n.dims), n.alpha, rng, activation=n.activation,
        layout=c.layout, slots=c.slot_list, measured=c.measured_list, on_sphere=on_sphere)


def run_cell(cfg, seed, N):
    """One (seed, N) cell of the gap experiment."""
    d = cfg.data
    teacher = _build_model(cfg, np.random.default_rng([seed]), on_sphere=True)
    rng = np.random.default_rng([seed, N])
    train_set = hybrid.teacher_samples(teacher, N, d.input_radius, d.noise, rng)
    test_set = hybrid.teacher_samples(teacher, d.test_size, d.input_radius, d.noise, rng)
    if cfg.training.init == "teacher":
        student = teacher
    else:
        student = _build_model(cfg, rng, on_sphere=False)
    loss_spec = cfg.loss_spec()
    bound = generalization_bound_hybrid(cfg.bound_params(N))
    try:
        student = hybrid.train(student, loss_spec, train_set, cfg.training.steps,
                               cfg.training.lr, seed)
    except DivergenceError:
        nan = float("nan")
        return GapRecord(seed, N, nan, nan, nan, bound, nan, True)
    train_risk = hybrid.empirical_risk(student, loss_spec, train_set)
    test_losses = hybrid._per_sample_loss(
        loss_spec, hybrid.predict_batch(student, test_set.inputs), test_set.labels)
    test_risk = float(test_losses.mean())
    stderr = float(test_losses.std(ddof=1) / math.sqrt(len(test_losses)))
    return GapRecord(seed, N, train_risk, test_risk, test_risk - train_risk, bound, stderr)


def _run_cell_args(args):
    return run_cell(*args)


def run_gap_experiment(config, workers=None):
    """Train a student per (seed, N) cell and compare its gap with the bound.

    Returns records sorted by ``(N, seed)`` regardless of execution order.
    """
    cells = [(config, s, N) for N in config.data.n_train for s in config.seeds]
    workers = config.workers if workers is None else workers
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_cell_args, cells))
    else:
        records = [run_cell(*c) for c in cells]
    return sorted(records, key=lambda r: (r.N, r.seed))


def median_gaps(records):
    """Median gap per N over non-diverged records."""
    by_n = {}
    for r in records:
        if not r.diverged:
            by_n.setdefault(r.N, []).append(r.gap)
    return {N: float(np.median(g)) for N, g in sorted(by_n.items())}
