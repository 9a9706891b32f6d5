"""Stochastic continuous greedy ascent over a matroid polytope.

Per iteration: sample a realization, estimate its extension gradient at
the current point, fold it into the momentum average d, take the best
polytope vertex for d, and move 1/T of the way.  The iterate is kept as
an integer vertex-count vector, so the final point is exactly the
uniform average of the chosen vertices and feasibility is structural
(never projected or clipped).
"""

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .estimators import EstimatorConfig, evaluate_estimator
from .oracle import EXACT_LIMIT, enumerator_for
from .rngs import SeedStreams

TRAJECTORY_COLUMNS = (
    "t", "wall_ms", "estimator", "param", "utility", "d_norm", "v_support"
)


def default_rho(t):
    """Momentum schedule 4 / (t + 8)^(2/3); in (0, 1] for t >= 1."""
    return 4.0 / (t + 8.0) ** (2.0 / 3.0)


@dataclass(frozen=True)
class SCGConfig:
    iterations: int
    estimator: EstimatorConfig
    seed: int = 0
    rho: object = default_rho
    batch_size: int = 1
    utility_every: int = None  # None = auto cadence, 0 = never
    utility_draws: int = 64
    sampling_seed: int = None  # overrides the Bernoulli sample stream

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrajectoryRow:
    t: int
    wall_ms: float
    utility: float  # nan when not reported this iteration
    d_norm: float
    v_support: tuple
    gradient_norm: float = float("nan")  # in-memory only, not serialized


@dataclass
class Trajectory:
    n: int
    iterations: int
    estimator: str
    param: int
    seed: int
    rows: list = field(default_factory=list)
    vertex_counts: np.ndarray = None

    @property
    def y_final(self):
        return self.vertex_counts / self.iterations

    def reconstruct_counts(self):
        """Vertex counts re-accumulated from the recorded supports."""
        counts = np.zeros(self.n, dtype=np.int64)
        for row in self.rows:
            counts[list(row.v_support)] += 1
        return counts

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_COLUMNS)
            for row in self.rows:
                utility = "" if math.isnan(row.utility) else repr(row.utility)
                writer.writerow(
                    [
                        row.t,
                        repr(row.wall_ms),
                        self.estimator,
                        self.param,
                        utility,
                        repr(row.d_norm),
                        ";".join(str(i) for i in row.v_support),
                    ]
                )

    @classmethod
    def from_csv(cls, path, n=None):
        rows = []
        estimator, param = "", 0
        max_index = -1
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != TRAJECTORY_COLUMNS:
                raise ValueError(
                    f"unexpected trajectory columns {reader.fieldnames} "
                    f"in {path}"
                )
            for rec in reader:
                support = tuple(
                    int(tok) for tok in rec["v_support"].split(";") if tok
                )
                if support:
                    max_index = max(max_index, max(support))
                estimator = rec["estimator"]
                param = int(rec["param"])
                rows.append(
                    TrajectoryRow(
                        t=int(rec["t"]),
                        wall_ms=float(rec["wall_ms"]),
                        utility=(
                            float(rec["utility"]) if rec["utility"] else
                            float("nan")
                        ),
                        d_norm=float(rec["d_norm"]),
                        v_support=support,
                    )
                )
        if not rows:
            raise ValueError(f"empty trajectory file {path}")
        if n is None:
            n = max_index + 1
        traj = cls(
            n=n,
            iterations=len(rows),
            estimator=estimator,
            param=param,
            seed=0,
            rows=rows,
        )
        traj.vertex_counts = traj.reconstruct_counts()
        return traj


def estimate_utility(obj, y, rng, max_draws=64):
    """Estimated mean objective value at a fractional point.

    Exact per-realization extensions when the ground set is enumerable
    (averaged over all stored realizations); otherwise Monte Carlo over
    sampled realizations and one Bernoulli draw each.  Reporting noise
    never feeds back into the optimization state: callers pass the
    dedicated reporting stream.
    """
    y = np.asarray(y, dtype=np.float64)
    if obj.n <= EXACT_LIMIT:
        enum = enumerator_for(obj)
        return enum.mean_extension(y)
    total = 0.0
    draws = max(int(max_draws), 1)
    for _ in range(draws):
        z = obj.sample_realization(rng)
        x = (rng.random(obj.n) < y).astype(np.uint8)
        total += obj.f_eval(z, x)
    return total / draws


def _utility_schedule(T, every):
    if every == 0:
        return frozenset()
    if every is None:
        if T <= 1000:
            return frozenset(range(1, T + 1))
        marks = np.unique(
            np.round(np.logspace(0, math.log10(T), 200)).astype(int)
        )
        return frozenset(int(t) for t in marks if 1 <= t <= T) | {T}
    return frozenset(range(every, T + 1, every)) | {T}


def run_scg(obj, matroid, config):
    """Run the continuous greedy loop; returns the full trajectory.

    Row t records the state after iteration t: the momentum norm, the
    chosen vertex support, and (on reporting iterations) the estimated
    utility of the current point counts/T.  Wall time covers the
    optimization work only; utility reporting runs off the clock.
    """
    if matroid.n != obj.n:
        raise ValueError(
            f"matroid over {matroid.n} elements, objective over {obj.n}"
        )
    T = config.iterations
    streams = SeedStreams(config.seed)
    z_rng = streams.generator("realizations")
    if config.sampling_seed is not None:
        x_rng = SeedStreams(config.sampling_seed).generator("samples")
    else:
        x_rng = streams.generator("samples")
    report_rng = streams.generator("reporting")
    report_at = _utility_schedule(T, config.utility_every)

    d = np.zeros(obj.n)
    counts = np.zeros(obj.n, dtype=np.int64)
    trajectory = Trajectory(
        n=obj.n,
        iterations=T,
        estimator=config.estimator.label,
        param=config.estimator.param,
        seed=config.seed,
    )
    wall_ms = 0.0
    for t in range(1, T + 1):
        start = time.perf_counter()
        y = counts / T
        grads = []
        for _ in range(config.batch_size):
            z = obj.sample_realization(z_rng)
            try:
                grads.append(
                    evaluate_estimator(config.estimator, obj, z, y, rng=x_rng)
                )
            except Exception as exc:
                raise RuntimeError(
                    f"gradient estimation failed at iteration {t}: {exc}"
                ) from exc
        g = grads[0].values if len(grads) == 1 else np.mean(
            [gv.values for gv in grads], axis=0
        )
        rho = config.rho(t)
        d = (1.0 - rho) * d + rho * g
        v = matroid.linear_maximize(d)
        counts += v
        assert counts.max() <= T, "iterate left the unit cube"
        wall_ms += (time.perf_counter() - start) * 1e3

        utility = float("nan")
        if t in report_at:
            utility = estimate_utility(
                obj, counts / T, report_rng, config.utility_draws
            )
        trajectory.rows.append(
            TrajectoryRow(
                t=t,
                wall_ms=wall_ms,
                utility=utility,
                d_norm=float(np.linalg.norm(d)),
                v_support=tuple(int(i) for i in np.nonzero(v)[0]),
                gradient_norm=float(np.linalg.norm(g)),
            )
        )
    trajectory.vertex_counts = counts
    return trajectory
