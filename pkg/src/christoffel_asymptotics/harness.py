"""Scenario registry and runner for convergence experiments.

A scenario builds a measure and a predicted limit, computes lambda_n along
a ladder of degrees, scales by n^kappa and compares. Identity scenarios
compare two Christoffel functions that must coincide; the constructions
scenario reports the window integral of the local test polynomial.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

from .asymptotics import extrapolate, predict_endpoint, predict_interior
from .christoffel import IllConditionedError, lambda_sweep
from .equilibrium import density_for, endpoint_constant
from .geometry import Lemniscate, RealInterval, UnitCircle
from .measures import make_measure, sqrt_pullback
from .quadrature import QuadratureError
from .polynomials import ComplexPolynomial, aberth_roots

__all__ = [
    "DEFAULT_LADDER",
    "ScenarioConfig",
    "Row",
    "ConvergenceReport",
    "Scenario",
    "ScenarioError",
    "list_scenarios",
    "get_scenario",
    "run_scenario",
    "export",
    "to_csv",
    "to_json",
    "report_from_json",
    "parse_config_blocks",
    "ladder_for",
]

DEFAULT_LADDER = (16, 25, 40, 64, 100, 160, 200)
IDENTITY_LADDER = (5, 10, 20, 40)
CSV_HEADER = ("n", "lambda", "kappa", "scaled", "predicted", "ratio")


class ScenarioError(ValueError):
    """Unknown scenario or invalid configuration."""


@dataclass
class ScenarioConfig:
    """Inputs of one run.

    Attributes:
        scenario_id: Registered scenario name.
        alpha: Exponent; ``None`` picks the scenario default.
        n_ladder: Ascending degrees; empty picks the default ladder.
        precision_bits: Starting precision of the engine, or ``None``.
        tau: Window exponent of the constructions scenario.
        kappa: Scaling exponent override.
        endpoints: Interval endpoints override for interval scenarios.
        z0: Base point override.
        T: Lemniscate polynomial coefficients (lowest degree first) override.
        output: ``"csv"`` or ``"json"``.
    """

    scenario_id: str
    alpha: float | None = None
    n_ladder: tuple = ()
    precision_bits: int | None = None
    tau: float | None = None
    kappa: float | None = None
    endpoints: tuple | None = None
    z0: complex | None = None
    T: tuple | None = None
    output: str = "csv"

    def __post_init__(self):
        self.n_ladder = tuple(int(n) for n in self.n_ladder)
        if any(n < 1 for n in self.n_ladder) or list(self.n_ladder) != sorted(set(self.n_ladder)):
            raise ScenarioError("n_ladder must be strictly ascending positive integers")
        if self.output not in ("csv", "json"):
            raise ScenarioError("output must be csv or json")
        if self.endpoints is not None:
            self.endpoints = tuple(float(x) for x in self.endpoints)
        if self.T is not None:
            self.T = tuple(complex(x) for x in self.T)
        if self.z0 is not None:
            self.z0 = complex(self.z0)

    def echo(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                v = [v.real, v.imag]
            elif isinstance(v, tuple):
                v = [[x.real, x.imag] if isinstance(x, complex) else x for x in v]
            d[f.name] = v
        return d


@dataclass
class Row:
    n: int
    lam: float
    kappa: float
    scaled: float
    predicted: float
    ratio: float
    precision_bits: int | None = None
    error_estimate: float | None = None
    error: str | None = None


@dataclass
class ConvergenceReport:
    """Rows of (n, lambda, kappa, n^kappa lambda, predicted, ratio) plus the extrapolation."""

    scenario: dict
    kind: str
    rows: list
    extrapolated_limit: float
    extrapolated_ratio: float
    fit_residual: float
    timing: float = field(default=0.0, compare=False)

    @property
    def failed(self) -> bool:
        return any(r.error for r in self.rows)


@dataclass(frozen=True)
class Scenario:
    """A registered experiment.

    ``build(alpha, config)`` returns a dict with the measures and predictions
    the runner needs (see :func:`run_scenario`).
    """

    id: str
    kind: str
    description: str
    default_alpha: float
    build: Callable
    ladder: tuple = DEFAULT_LADDER


# ------------------------------------------------------------- builders


def _interval_prediction(measure):
    eq = density_for(measure)
    z0 = measure.z0.real
    if measure.location == "interior":
        return predict_interior(measure.w0, float(eq.eval(z0)), measure.alpha)
    ends = eq.endpoints
    return predict_endpoint(measure.w0, endpoint_constant(ends, z0), measure.alpha)


def _segments(endpoints):
    return [RealInterval(endpoints[2 * i], endpoints[2 * i + 1]) for i in range(len(endpoints) // 2)]


def _b_model1(alpha, cfg):
    m = make_measure([RealInterval(0.0, 1.0)], 0.0, alpha, label="|x|^alpha on [0,1] at 0")
    return {"measure": m, "prediction": predict_endpoint(1.0, 1.0 / math.pi, alpha)}


def _b_model2(alpha, cfg):
    m = make_measure([RealInterval(-1.0, 1.0)], 0.0, alpha, label="|x|^alpha on [-1,1] at 0")
    return {"measure": m, "prediction": predict_interior(1.0, 1.0 / math.pi, alpha)}


def _b_circle_lebesgue(alpha, cfg):
    m = make_measure([UnitCircle()], 1.0, 0.0, label="dtheta on the unit circle at 1")
    return {"measure": m, "prediction": predict_interior(1.0, 1.0 / (2 * math.pi), 0.0)}


def _b_circle_power(alpha, cfg):
    m = make_measure([UnitCircle()], 1j, alpha, label="|z-i|^alpha on the unit circle at i")
    return {"measure": m, "prediction": predict_interior(1.0, 1.0 / (2 * math.pi), alpha)}


def _b_circle_wT(alpha, cfg):
    scale = 2.0 ** (-alpha - 1.0)

    def w(z):
        return scale

    # |e^{2it}+1|^alpha |e^{2it}-1| = |z-i|^alpha |z+i|^alpha |z-1| |z+1| on |z| = 1
    m = make_measure(
        [UnitCircle()], 1j, alpha, w=w, label="model circle weight at i", factors=((-1j, alpha), (1.0, 1.0), (-1.0, 1.0))
    )
    return {"measure": m, "prediction": predict_interior(m.w0, 1.0 / (2 * math.pi), alpha)}


def _lemniscate_setup(cfg):
    coeffs = cfg.T if cfg.T is not None else (-0.5, 0.0, 1.0)
    T = ComplexPolynomial(tuple(coeffs))
    if cfg.z0 is not None:
        z0 = cfg.z0
    elif cfg.T is None:
        z0 = cmath.sqrt(0.5 + 1j)
    else:
        z0 = complex(aberth_roots(T.shift(1j).coeffs)[-1])
    return T, z0


def _b_lemniscate_power(alpha, cfg):
    T, z0 = _lemniscate_setup(cfg)
    m = make_measure([Lemniscate(T)], z0, alpha, label="|z-z0|^alpha on the lemniscate |T| = 1")
    omega = float(density_for(m).eval(z0))
    return {"measure": m, "prediction": predict_interior(1.0, omega, alpha)}


def _weight_interior(x):
    return 1 + x * x / 2


def _b_interval_interior(alpha, cfg):
    ends = cfg.endpoints or (-1.0, 1.0)
    z0 = cfg.z0.real if cfg.z0 is not None else 0.5
    m = make_measure(_segments(ends), z0, alpha, w=_weight_interior, label="(1+x^2/2)|x-z0|^alpha on an interval")
    return {"measure": m, "prediction": _interval_prediction(m)}


def _b_interval_endpoint(alpha, cfg):
    ends = cfg.endpoints or (-1.0, 1.0)
    z0 = cfg.z0.real if cfg.z0 is not None else ends[-1]
    m = make_measure(_segments(ends), z0, alpha, label="|x-a|^alpha at an endpoint a")
    return {"measure": m, "prediction": _interval_prediction(m)}


TWO_INTERVALS = (-1.0, -0.25, 0.25, 1.0)


def _b_two_intervals_interior(alpha, cfg):
    ends = cfg.endpoints or TWO_INTERVALS
    z0 = cfg.z0.real if cfg.z0 is not None else 0.6
    m = make_measure(_segments(ends), z0, alpha, label="two intervals, interior point")
    return {"measure": m, "prediction": _interval_prediction(m)}


def _b_two_intervals_endpoint(alpha, cfg):
    ends = cfg.endpoints or TWO_INTERVALS
    z0 = cfg.z0.real if cfg.z0 is not None else ends[2]
    m = make_measure(_segments(ends), z0, alpha, label="two intervals, inner endpoint")
    return {"measure": m, "prediction": _interval_prediction(m)}


def _b_identity_mod01(alpha, cfg):
    left = make_measure([RealInterval(0.0, 1.0)], 0.0, 0.5 * (alpha - 1.0), label="|x|^((alpha-1)/2) on [0,1]")
    right = make_measure([RealInterval(-1.0, 1.0)], 0.0, alpha, label="|x|^alpha on [-1,1]")
    return {"left": left, "right": right}


def _b_identity_pullback(alpha, cfg):
    left = make_measure([RealInterval(0.0, 1.0)], 0.0, alpha, label="|x|^alpha on [0,1]")
    return {"left": left, "right": sqrt_pullback(left)}


def _b_constructions_local(alpha, cfg):
    m = make_measure([RealInterval(-1.0, 1.0)], 0.0, alpha, label="|x|^alpha on [-1,1] at 0")
    return {"measure": m}


_REGISTRY = [
    Scenario("model1", "convergence", "|x|^alpha on [0,1] at the endpoint 0", 0.0, _b_model1),
    Scenario("model2", "convergence", "|x|^alpha on [-1,1] at the interior point 0", 0.0, _b_model2),
    Scenario("circle_lebesgue", "convergence", "arc length on the unit circle at 1", 0.0, _b_circle_lebesgue),
    Scenario("circle_power", "convergence", "|z-i|^alpha on the unit circle at i", 1.0, _b_circle_power),
    Scenario("circle_wT", "convergence", "|z^2+1|^alpha |z^2-1| / 2^(alpha+1) on the unit circle at i", 1.0, _b_circle_wT),
    Scenario("lemniscate_power", "convergence", "|z-z0|^alpha on {|z^2-1/2| = 1}, T(z0) = i", 0.0, _b_lemniscate_power),
    Scenario("interval_interior", "convergence", "(1+x^2/2)|x-1/2|^alpha on [-1,1] at 1/2", 0.0, _b_interval_interior),
    Scenario("interval_endpoint", "convergence", "|x-1|^alpha on [-1,1] at 1", 1.0, _b_interval_endpoint),
    Scenario("two_intervals_interior", "convergence", "[-1,-1/4] u [1/4,1] at 0.6", 0.0, _b_two_intervals_interior),
    Scenario("two_intervals_endpoint", "convergence", "[-1,-1/4] u [1/4,1] at the endpoint 1/4", 0.0, _b_two_intervals_endpoint),
    Scenario("identity_mod01", "identity", "lambda_n(|x|^((a-1)/2), [0,1]) against lambda_2n(|x|^a, [-1,1])", 2.0, _b_identity_mod01, IDENTITY_LADDER),
    Scenario("identity_pullback", "identity", "lambda_n(mu, 0) against lambda_2n of the square-root pullback", 0.0, _b_identity_pullback, IDENTITY_LADDER),
    Scenario("constructions_local", "construction", "window integral of the local test polynomial on [-1,1] at 0", 0.0, _b_constructions_local),
]


def list_scenarios() -> dict[str, Scenario]:
    """The registry, in a fixed order."""
    return {s.id: s for s in _REGISTRY}


def get_scenario(scenario_id: str) -> Scenario:
    try:
        return list_scenarios()[scenario_id]
    except KeyError:
        raise ScenarioError(f"unknown scenario {scenario_id!r}") from None


def ladder_for(scenario_id: str, nmax: int | None = None) -> tuple:
    """Default ladder, cut at ``nmax`` and closed by ``nmax`` itself."""
    ladder = get_scenario(scenario_id).ladder
    if nmax is None:
        return tuple(ladder)
    if nmax < 1:
        raise ScenarioError("nmax must be positive")
    return tuple(n for n in ladder if n < nmax) + (int(nmax),)


# --------------------------------------------------------------- running


def _nan_row(n, kappa, predicted, message):
    nan = math.nan
    return Row(n, nan, kappa, nan, predicted, nan, None, None, message)


def _finish(cfg, kind, rows, predicted_limit, t0, extrapolate_rows=True):
    good = [(r.n, r.scaled) for r in rows if r.error is None and math.isfinite(r.scaled)]
    if extrapolate_rows and len(good) >= 3:
        ex = extrapolate(good)
        lim, res = ex.limit, ex.residual
    elif good:
        lim, res = good[-1][1], math.inf
    else:
        lim, res = math.nan, math.inf
    ratio = lim / predicted_limit if predicted_limit and math.isfinite(lim) else math.nan
    return ConvergenceReport(cfg.echo(), kind, rows, lim, ratio, res, time.perf_counter() - t0)


def run_scenario(config: ScenarioConfig) -> ConvergenceReport:
    """Compute the rows of one scenario.

    Engine failures become per-row ``error`` entries and the run continues.
    """
    t0 = time.perf_counter()
    sc = get_scenario(config.scenario_id)
    alpha = sc.default_alpha if config.alpha is None else float(config.alpha)
    if sc.id == "circle_lebesgue":
        alpha = 0.0
    ladder = config.n_ladder or sc.ladder
    parts = sc.build(alpha, config)

    if sc.kind == "convergence":
        m, pred = parts["measure"], parts["prediction"]
        kappa = pred.kappa if config.kappa is None else float(config.kappa)
        rows = _sweep_rows(m, ladder, config.precision_bits, kappa, lambda n: pred.limit)
        return _finish(config, sc.kind, rows, pred.limit, t0)

    if sc.kind == "identity":
        left, right = parts["left"], parts["right"]
        rows = []
        try:
            lres = lambda_sweep(left, list(ladder), config.precision_bits)
            rres = lambda_sweep(right, [2 * n for n in ladder], config.precision_bits)
        except (IllConditionedError, QuadratureError) as exc:
            rows = [_nan_row(n, 0.0, math.nan, str(exc)) for n in ladder]
            return _finish(config, sc.kind, rows, 1.0, t0, extrapolate_rows=False)
        for a, b in zip(lres, rres):
            la, lb = float(a.lam), float(b.lam)
            rows.append(Row(a.n, la, 0.0, la, lb, float(a.lam / b.lam), a.precision_bits_used, a.error_estimate + b.error_estimate))
        rep = _finish(config, sc.kind, rows, 1.0, t0, extrapolate_rows=False)
        rep.extrapolated_limit = rows[-1].ratio
        rep.extrapolated_ratio = rows[-1].ratio
        return rep

    # construction
    from .constructions import verify_local_behavior

    m = parts["measure"]
    report = verify_local_behavior(None, m, None, list(ladder), tau=config.tau)
    kappa = alpha + 1.0 if config.kappa is None else float(config.kappa)
    rows = []
    for r in report.rows:
        integral = r["scaled_integral"] / r["n"] ** (alpha + 1.0)
        scaled = r["n"] ** kappa * integral
        rows.append(Row(r["n"], integral, kappa, scaled, report.limit, scaled / report.limit))
    return _finish(config, sc.kind, rows, report.limit, t0)


def _sweep_rows(measure, ladder, precision_bits, kappa, predicted):
    try:
        res = lambda_sweep(measure, list(ladder), precision_bits)
    except (IllConditionedError, QuadratureError):
        res = None
    if res is not None:
        return [_row(r, kappa, predicted(r.n)) for r in res]
    # fall back to one degree at a time so that only failing rows are lost
    rows = []
    for n in ladder:
        try:
            r = lambda_sweep(measure, [n], precision_bits)[0]
            rows.append(_row(r, kappa, predicted(n)))
        except (IllConditionedError, QuadratureError) as exc:
            rows.append(_nan_row(n, kappa, predicted(n), f"{type(exc).__name__}: {exc}"))
    return rows


def _row(r, kappa, predicted):
    lam = float(r.lam)
    scaled = float(r.lam * r.n ** kappa)
    return Row(r.n, lam, kappa, scaled, predicted, scaled / predicted, r.precision_bits_used, r.error_estimate)


# ---------------------------------------------------------------- export


def _g(x) -> str:
    return format(float(x), ".17g")


def to_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([str(int(r.n)), _g(r.lam), _g(r.kappa), _g(r.scaled), _g(r.predicted), _g(r.ratio)])
    return buf.getvalue()


def to_json(report: ConvergenceReport, include_timing: bool = False) -> str:
    d = asdict(report)
    if not include_timing:
        d.pop("timing")
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def report_from_json(text: str) -> ConvergenceReport:
    d = json.loads(text)
    rows = [Row(**r) for r in d.pop("rows")]
    return ConvergenceReport(rows=rows, **d)


def export(report: ConvergenceReport, fmt: str, path, include_timing: bool = False) -> None:
    """Write the report as CSV or JSON to ``path`` (``'\\n'`` line endings)."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report, include_timing)
    else:
        raise ScenarioError("format must be csv or json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ----------------------------------------------------------------- config


_KEYS = {"scenario", "scenario_id", "alpha", "n_ladder", "nmax", "precision_bits", "tau", "kappa", "endpoints", "z0", "T", "format", "output", "out"}


def _parse_complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def parse_config_blocks(text: str) -> list[tuple[ScenarioConfig, str | None]]:
    """Parse blank-line separated ``key=value`` blocks, one scenario each.

    Lines starting with ``#`` are comments. Returns (config, out path) pairs.
    """
    blocks, cur = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if cur:
                blocks.append(cur)
                cur = {}
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in _KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {k!r}")
        cur[k] = v
    if cur:
        blocks.append(cur)
    out = []
    for b in blocks:
        sid = b.get("scenario", b.get("scenario_id"))
        if sid is None:
            raise ScenarioError("every block needs a scenario")
        get_scenario(sid)
        try:
            if "n_ladder" in b:
                ladder = tuple(int(x) for x in b["n_ladder"].split(",") if x.strip())
            elif "nmax" in b:
                ladder = ladder_for(sid, int(b["nmax"]))
            else:
                ladder = ()
            cfg = ScenarioConfig(
                scenario_id=sid,
                alpha=float(b["alpha"]) if "alpha" in b else None,
                n_ladder=ladder,
                precision_bits=int(b["precision_bits"]) if "precision_bits" in b else None,
                tau=float(b["tau"]) if "tau" in b else None,
                kappa=float(b["kappa"]) if "kappa" in b else None,
                endpoints=tuple(float(x) for x in b["endpoints"].split(",")) if "endpoints" in b else None,
                z0=_parse_complex(b["z0"]) if "z0" in b else None,
                T=tuple(_parse_complex(x) for x in b["T"].split(",")) if "T" in b else None,
                output=b.get("format", b.get("output", "csv")),
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        out.append((cfg, b.get("out")))
    return out
