"""Batch experiments: scaling studies over random instances and entropy traces.

Per-instance seeds come from ``numpy.random.SeedSequence(master, spawn_key=(n, i))``
so every record is reproducible on its own and independent of worker order.
"""
from __future__ import annotations

import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapacityError, NumericalError
from .gauge import (
    DENSE_LIMIT,
    DENSE_LIMIT_MANY,
    basis_state,
    build_gauge_matrix,
    diffuse_many,
    entropy,
    holonomy_apply,
    trivial_probability,
)
from .graph import Graph, generate_random_graph
from .solutions import enumerate_independent_sets, median_adjacency

__all__ = [
    "CASE_COLUMNS",
    "CaseResult",
    "ExperimentRecord",
    "FitResult",
    "case1_edges",
    "case2_edges",
    "entropy_trace",
    "fit_linear",
    "instance_seed",
    "predicted_max_independent_size",
    "records_csv",
    "run_case",
    "run_case1",
    "run_case2",
    "run_instance",
    "window_stats",
    "entropy_csv",
]

CASE_COLUMNS = "n,m,seed,theta,Ns,dn,cn,Sbar2pi,max_card,walltime_ms"
HARNESS_MAX_VERTICES = 63
DEFAULT_MAX_STATES = 2_000_000


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    intercept_stderr: float
    residual_variance: float
    points: int

    def to_dict(self) -> dict:
        return asdict(self)


def fit_linear(xs, ys) -> FitResult:
    """Ordinary least squares ``y = slope * x + intercept``.

    Standard errors use the residual variance with ``points - 2`` degrees of
    freedom (zero when only two points are given).
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be 1-d and of equal length")
    npts = x.size
    if npts < 2:
        raise ValueError("need at least two points")
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx <= 1e-300 * max(1.0, float(np.sum(x * x))):
        raise ValueError("degenerate abscissae: all x values are equal")
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (slope * x + intercept)
    dof = npts - 2
    var = float(np.sum(resid**2) / dof) if dof > 0 else 0.0
    se = math.sqrt(var / sxx)
    se_b = math.sqrt(var * (1.0 / npts + xbar * xbar / sxx))
    return FitResult(slope, intercept, se, se_b, var, npts)


def predicted_max_independent_size(n: float) -> float:
    """Almost-sure maximum independent set size of ``G(n, floor(n^2/4))``:
    ``4 (ln(n / (4 ln(n/2))) + 1)``."""
    if n <= 2:
        raise ValueError(f"formula needs n > 2, got {n}")
    return 4.0 * (math.log(n / (4.0 * math.log(n / 2.0))) + 1.0)


def case1_edges(n: int) -> int:
    return n


def case2_edges(n: int) -> int:
    return n * n // 4


def instance_seed(master: int, n: int, index: int) -> int:
    ss = np.random.SeedSequence(int(master), spawn_key=(int(n), int(index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass
class ExperimentRecord:
    n: int
    m: int
    index: int
    seed: int
    theta: float
    Ns: int = 0
    dn: float = float("nan")
    cn: float = float("nan")
    sbar: tuple[float, ...] = ()  # at t = 2 pi, 4 pi, 6 pi
    max_card: int = 0
    predicted_k: float | None = None
    walltime_ms: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def run_instance(
    n: int,
    m: int,
    index: int,
    seed: int,
    theta: float,
    dense_limit: int = DENSE_LIMIT,
    max_vertices: int = HARNESS_MAX_VERTICES,
    max_states: int = DEFAULT_MAX_STATES,
    with_prediction: bool = False,
) -> ExperimentRecord:
    """Generate one graph, run one to three loops from the empty set, measure."""
    rec = ExperimentRecord(n=n, m=m, index=index, seed=seed, theta=theta)
    if with_prediction:
        rec.predicted_k = predicted_max_independent_size(n)
    start = time.perf_counter()
    try:
        g = generate_random_graph(n, m, seed)
        b = enumerate_independent_sets(g, max_vertices=max_vertices)
        if b.size > max_states:
            raise CapacityError(f"{b.size} solutions exceed state limit {max_states}")
        A = build_gauge_matrix(b, median_adjacency(b), theta)
        loops = [basis_state(b)]
        for _ in range(3):
            loops.append(holonomy_apply(A, loops[-1], dense_limit=dense_limit))
        loops = loops[1:]
        rec.Ns = b.size
        rec.dn, rec.cn = trivial_probability(loops[0], b)
        rec.sbar = tuple(entropy(p) / math.log(b.size) for p in loops)
        rec.max_card = b.max_cardinality
    except (CapacityError, NumericalError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.walltime_ms = (time.perf_counter() - start) * 1000.0
    return rec


def _run_instance_args(args):
    return run_instance(*args)


@dataclass
class CaseResult:
    kind: str
    records: list[ExperimentRecord]
    summary: list[dict] = field(default_factory=list)
    fit_ns: FitResult | None = None
    fit_cn: FitResult | None = None

    @property
    def failures(self) -> list[ExperimentRecord]:
        return [r for r in self.records if not r.ok]


def _stderr(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else float("nan")


def _summarize(records, log) -> list[dict]:
    rows = []
    for n in sorted({r.n for r in records}):
        good = [r for r in records if r.n == n and r.ok]
        if not good:
            continue
        ns = np.array([r.Ns for r in good], dtype=float)
        cn = np.array([r.cn for r in good], dtype=float)
        log_cn = log(np.clip(cn, 1e-300, None))
        rows.append(
            {
                "n": n,
                "count": len(good),
                "mean_Ns": float(ns.mean()),
                "se_Ns": _stderr(ns),
                "mean_log_Ns": float(log(ns).mean()),
                "se_log_Ns": _stderr(log(ns)),
                "mean_cn": float(cn.mean()),
                "se_cn": _stderr(cn),
                "mean_log_cn": float(log_cn.mean()),
                "se_log_cn": _stderr(log_cn),
            }
        )
    return rows


def run_case(
    kind: str,
    n_values,
    instances: int,
    theta: float,
    seed: int,
    workers: int = 1,
    log_first: bool = False,
    dense_limit: int = DENSE_LIMIT,
    max_vertices: int = HARNESS_MAX_VERTICES,
) -> CaseResult:
    """Scaling study. ``kind`` is ``"case1"`` (m = n) or ``"case2"`` (m = floor(n^2/4)).

    Averages are taken over instances at each n before the logarithm, unless
    ``log_first`` is set. Fits need at least three distinct n.
    """
    if kind == "case1":
        edges, log = case1_edges, np.log2
        x_ns = lambda n: float(n)  # noqa: E731
        x_cn = x_ns
    elif kind == "case2":
        edges, log = case2_edges, np.log
        x_ns = lambda n: math.log(n / math.log(n / 2))  # noqa: E731
        x_cn = lambda n: math.log(n)  # noqa: E731
    else:
        raise ValueError(f"unknown case {kind!r}")
    n_values = sorted(set(int(n) for n in n_values))
    if instances < 1:
        raise ValueError("instances must be >= 1")
    for n in n_values:
        if kind == "case2" and n <= 2:
            raise ValueError(f"case2 needs n >= 3, got {n}")
        if edges(n) > n * (n - 1) // 2:
            raise ValueError(f"m={edges(n)} edges impossible for n={n}")
    jobs = [
        (n, edges(n), i, instance_seed(seed, n, i), float(theta), dense_limit, max_vertices,
         DEFAULT_MAX_STATES, kind == "case2")
        for n in n_values
        for i in range(instances)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_instance_args, jobs, chunksize=4))
    else:
        records = [run_instance(*job) for job in jobs]
    records.sort(key=lambda r: (r.n, r.index))

    summary = _summarize(records, log)
    result = CaseResult(kind, records, summary)
    if len(summary) >= 3:
        xs_ns = [x_ns(row["n"]) for row in summary]
        xs_cn = [x_cn(row["n"]) for row in summary]
        if log_first:
            y_ns = [row["mean_log_Ns"] for row in summary]
            y_cn = [row["mean_log_cn"] for row in summary]
        else:
            y_ns = [float(log(row["mean_Ns"])) for row in summary]
            y_cn = [float(log(row["mean_cn"])) for row in summary]
        result.fit_ns = fit_linear(xs_ns, y_ns)
        result.fit_cn = fit_linear(xs_cn, y_cn)
    return result


def run_case1(n_values, instances, theta=math.pi / 2, seed=0, **kw) -> CaseResult:
    return run_case("case1", n_values, instances, theta, seed, **kw)


def run_case2(n_values, instances, theta=1.2, seed=0, **kw) -> CaseResult:
    return run_case("case2", n_values, instances, theta, seed, **kw)


def _fmt(x) -> str:
    return "" if x is None else f"{x:.12g}"


def records_csv(records, timing: bool = False) -> str:
    """Case table. Wall time is left blank unless ``timing`` so output is reproducible."""
    out = io.StringIO()
    out.write(CASE_COLUMNS + "\n")
    for r in records:
        if not r.ok:
            continue
        sbar = r.sbar[0] if r.sbar else None
        wall = _fmt(r.walltime_ms) if timing else ""
        out.write(
            f"{r.n},{r.m},{r.seed},{_fmt(r.theta)},{r.Ns},{_fmt(r.dn)},{_fmt(r.cn)},"
            f"{_fmt(sbar)},{r.max_card},{wall}\n"
        )
    return out.getvalue()


def entropy_trace(g: Graph, theta: float, t_max: float, samples: int, dense_limit: int = DENSE_LIMIT_MANY):
    """``(t, S, Sbar)`` arrays on ``samples`` evenly spaced times in ``[0, t_max]``,
    diffusing from the empty set."""
    if samples < 2:
        raise ValueError("need at least two samples")
    b = enumerate_independent_sets(g)
    if b.size < 2:
        raise ValueError("entropy normalisation needs at least two solutions")
    A = build_gauge_matrix(b, median_adjacency(b), theta)
    ts = np.linspace(0.0, float(t_max), int(samples))
    states = diffuse_many(A, basis_state(b), ts, dense_limit=dense_limit)
    S = np.array([entropy(p) for p in states])
    return ts, S, S / math.log(b.size)


def window_stats(ts, values, t_lo: float, t_hi: float) -> tuple[float, float]:
    """Mean and standard deviation of samples with ``t_lo <= t <= t_hi``."""
    ts = np.asarray(ts)
    sel = (ts >= t_lo - 1e-12) & (ts <= t_hi + 1e-12)
    if not np.any(sel):
        raise ValueError("no samples in window")
    w = np.asarray(values)[sel]
    return float(w.mean()), float(w.std())


def entropy_csv(ts, S, Sbar) -> str:
    rows = ["t,S,Sbar"]
    rows += [f"{t:.12g},{s:.12g},{sb:.12g}" for t, s, sb in zip(ts, S, Sbar)]
    return "\n".join(rows) + "\n"
