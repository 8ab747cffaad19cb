"""Seeded verification campaigns over random points of a metric family.

A :class:`CampaignSpec` fixes everything that influences the numbers: the
family selector, dimension, sample count, seed, sampling ranges, tolerances and
the list of checks.  :func:`cmd_verify` turns a spec into a
:class:`CurvatureReport`; the JSON rendering of a report is a pure function of
the spec apart from the ``runtime_ms`` field.
"""

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import curvature as cv
from . import families as fam
from .engine import (EvalPoint, determinant_formula, fundamental_tensor, point_scalars, spray,
                     spray_divergence)
from .errors import DomainError, WarpFinslerError
from .functions import as_function
from .oracle import (FDConfig, curvature_fd, hessian_fd, ricci_fd, relative_error,
                     spray_divergence_fd, spray_fd)

CHECKS = ("douglas", "douglas-ode", "berwald", "landsberg", "ricci", "projflat",
          "convexity", "oracle")
ORACLE_PARTS = ("oracle-hessian", "oracle-spray", "oracle-divergence",
                "oracle-douglas", "oracle-berwald")

DEFAULT_TOLERANCES = {
    "douglas": 1e-9,
    "douglas-ode": 1e-9,
    "berwald": 1e-9,
    "landsberg": 1e-9,
    "ricci": 1e-9,
    "projflat": 1e-5,
    "convexity": 0.0,
    "oracle-hessian": 1e-6,
    "oracle-spray": 1e-5,
    "oracle-divergence": 1e-5,
    "oracle-douglas": 1e-5,
    "oracle-berwald": 1e-5,
}


# -- family selection ------------------------------------------------------------

FAMILY_PARAMS = {
    "g-family": ("h", "G"),
    "randers": ("f", "g", "b"),
    "gc-family": ("kernel", "c", "g"),
    "flat": ("G",),
}


def build_family(selector):
    """Build a :class:`MetricFamily` from a JSON-friendly selector.

    ``{"preset": "example-3"}`` picks a preset; otherwise ``{"kind": ...}``
    plus the kind's parameters as expression strings or numbers.  ``rho`` and
    ``r_min`` are honoured in both forms.
    """
    sel = dict(selector)
    geom = {k: sel.pop(k) for k in ("rho", "r_min") if sel.get(k) is not None}
    sel = {k: v for k, v in sel.items() if v is not None}
    if "preset" in sel:
        name = sel.pop("preset")
        overrides = {k: (as_function(v) if k == "g" else v) for k, v in sel.items()}
        try:
            return fam.preset(name, **overrides, **geom)
        except KeyError as exc:
            raise DomainError(str(exc.args[0])) from None
        except TypeError:
            raise DomainError(f"preset {name!r} does not take parameters {sorted(overrides)}") from None
    kind = sel.pop("kind", None)
    if kind not in FAMILY_PARAMS:
        raise DomainError(f"unknown family {kind!r}; choose from {', '.join(FAMILY_PARAMS)}")
    missing = [p for p in FAMILY_PARAMS[kind] if p not in sel]
    if missing:
        raise DomainError(f"family {kind} needs parameters: {', '.join(missing)}")
    if kind == "g-family":
        return fam.g_family(sel["h"], sel["G"], **geom)
    if kind == "randers":
        return fam.randers_family(sel["f"], sel["g"], sel["b"], **geom)
    if kind == "gc-family":
        return fam.gc_family(sel["kernel"], float(sel["c"]), sel["g"], bound=sel.get("L"), **geom)
    return fam.flat_family(sel["G"], **geom)


# -- spec and report -------------------------------------------------------------

@dataclass(frozen=True)
class CampaignSpec:
    family: dict
    n: int = 3
    samples: int = 100
    seed: int = 0
    r_range: tuple = None
    y0_range: tuple = (-2.0, 2.0)
    u_range: tuple = (0.5, 2.0)
    tolerances: dict = field(default_factory=dict)
    checks: tuple = ("douglas",)
    strict: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("sample count must be at least 1")
        if self.n < 2:
            raise DomainError("n must be at least 2")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise DomainError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
        if not self.u_range[0] > 0 or self.u_range[0] > self.u_range[1]:
            raise DomainError(f"bad |ybar| range {self.u_range}")
        if self.y0_range[0] > self.y0_range[1]:
            raise DomainError(f"bad y0 range {self.y0_range}")

    def tolerance(self, name):
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def as_dict(self):
        out = asdict(self)
        out["checks"] = list(self.checks)
        for key in ("r_range", "y0_range", "u_range"):
            out[key] = None if out[key] is None else list(out[key])
        out["tolerances"] = {k: self.tolerance(k) for k in self.expanded_checks()}
        return out

    def expanded_checks(self):
        out = []
        for c in self.checks:
            out.extend(ORACLE_PARTS if c == "oracle" else (c,))
        return out


@dataclass
class CurvatureReport:
    spec: dict
    seed: int
    checks: list
    invalid_points: list
    runtime_ms: float
    per_point: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks)

    def as_dict(self, timing=True):
        out = {
            "tool_version": __version__,
            "spec": self.spec,
            "seed": self.seed,
            "checks": self.checks,
            "invalid_points": self.invalid_points,
        }
        if timing:
            out["runtime_ms"] = self.runtime_ms
        return out

    def to_json(self, timing=True):
        return json.dumps(_clean(self.as_dict(timing)), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "sup_norm", "tolerance", "pass", "failures", "points"])
        for c in self.checks:
            writer.writerow([c["name"], repr(c["sup_norm"]), repr(c["tolerance"]),
                             c["pass"], c["failures"], c["points"]])
        return buf.getvalue()

    def per_point_csv(self):
        names = [c["name"] for c in self.checks]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "x", "y"] + names)
        for row in self.per_point:
            writer.writerow([row["index"], " ".join(map(repr, row["x"])), " ".join(map(repr, row["y"]))]
                            + [repr(row["values"].get(k)) for k in names])
        return buf.getvalue()


def _clean(obj):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# -- sampling --------------------------------------------------------------------

def sample_points(family, spec):
    rng = np.random.default_rng(spec.seed)
    r_range = tuple(spec.r_range) if spec.r_range else (family.r_min, family.rho)
    lo, hi = r_range
    if not family.r_min <= lo < hi <= family.rho:
        raise DomainError(f"r range {r_range} outside [{family.r_min}, {family.rho})")
    return [fam.random_point(family, spec.n, rng, tuple(spec.y0_range), tuple(spec.u_range), r_range)
            for _ in range(spec.samples)]


# -- per-point checks ------------------------------------------------------------

def _convexity_violation(family, point):
    phi = family.phi_jet(point.z, point.r, (2, 0), check=False)
    p, pz, pzz = phi.value, phi.d(1), phi.d(2)
    omega, lam = 2 * p - point.z * pz, 2 * p * pzz - pz * pz
    return max(0.0, -min(omega, lam))


def _fd_relative(closed, fd, u, degree):
    # relative error on the scale-normalised tensors, with a unit floor so that
    # vanishing tensors are compared in absolute terms
    scale = u ** (-degree)
    return relative_error(closed * scale, fd * scale, floor=1.0)


def evaluate_point(family, point, names, cfg=None):
    """Per-check values at one point (each compared with ``<= tolerance``)."""
    cfg = cfg or FDConfig()
    names = set(names)
    out = {}
    if "convexity" in names:
        out["convexity"] = _convexity_violation(family, point)
        if out["convexity"] > 0:
            return out
    sc = point_scalars(family, point)
    u = point.u
    if "douglas" in names:
        out["douglas"] = cv.scaled_norm(cv.douglas_tensor(family, point, sc), u, -1)
    if "douglas-ode" in names:
        out["douglas-ode"] = max(map(abs, cv.douglas_ode_residuals(family, point.z, point.r, point.n, sc)))
    B = None
    if "berwald" in names or "oracle-berwald" in names:
        B = cv.berwald_tensor(family, point, sc)
    if "berwald" in names:
        out["berwald"] = cv.scaled_norm(B, u, -1)
    if "landsberg" in names:
        out["landsberg"] = cv.scaled_norm(cv.landsberg_tensor(family, point, sc), u, 0)
    if "ricci" in names:
        out["ricci"] = max(map(abs, cv.ricci_flat_residuals(family, point.z, point.r, point.n, sc)))
    if "projflat" in names:
        out["projflat"] = cv.projective_flat_residual(family, point, cfg)
    if "oracle-hessian" in names:
        out["oracle-hessian"] = relative_error(fundamental_tensor(family, point).g,
                                               hessian_fd(family, point, cfg))
    if "oracle-spray" in names:
        G = spray(family, point, sc)
        out["oracle-spray"] = relative_error(G, spray_fd(family, point, cfg), floor=u * u)
    if "oracle-divergence" in names:
        out["oracle-divergence"] = relative_error(
            spray_divergence(family, point, sc), spray_divergence_fd(family, point, cfg), floor=u)
    if "oracle-douglas" in names or "oracle-berwald" in names:
        Bfd, Dfd = curvature_fd(family, point, cfg)
        if "oracle-douglas" in names:
            out["oracle-douglas"] = _fd_relative(cv.douglas_tensor(family, point, sc), Dfd, u, -1)
        if "oracle-berwald" in names:
            out["oracle-berwald"] = _fd_relative(B, Bfd, u, -1)
    return out


def _point_dict(index, point):
    return {"index": index, "x": point.x.tolist(), "y": point.y.tolist()}


def _evaluate_all(family, points, names, workers, strict):
    def job(k):
        try:
            return k, evaluate_point(family, points[k], names), None
        except WarpFinslerError as exc:
            if strict:
                raise
            return k, None, f"{type(exc).__name__}: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(len(points))))
    else:
        results = [job(k) for k in range(len(points))]
    return sorted(results, key=lambda t: t[0])


def _aggregate(spec, points, results):
    checks = []
    for name in spec.expanded_checks():
        tol = spec.tolerance(name)
        worst, worst_k, failures, count = -math.inf, None, 0, 0
        for k, values, _ in results:
            if values is None or name not in values:
                continue
            v = values[name]
            count += 1
            failures += not v <= tol
            if v > worst:
                worst, worst_k = v, k
        entry = {
            "name": name,
            "sup_norm": worst if count else None,
            "tolerance": tol,
            "pass": bool(count and failures == 0),
            "failures": failures,
            "points": count,
            "worst_point": None,
        }
        if worst_k is not None:
            entry["worst_point"] = dict(_point_dict(worst_k, points[worst_k]), value=worst)
        checks.append(entry)
    return checks


def cmd_verify(spec, workers=1):
    """Run the requested checks at ``spec.samples`` random points."""
    start = time.perf_counter()
    family = build_family(spec.family)
    points = sample_points(family, spec)
    results = _evaluate_all(family, points, spec.expanded_checks(), workers, spec.strict)
    invalid = [dict(_point_dict(k, points[k]), error=err) for k, v, err in results if v is None]
    per_point = [dict(_point_dict(k, points[k]), values=v) for k, v, _ in results if v is not None]
    return CurvatureReport(
        spec=spec.as_dict(), seed=spec.seed, checks=_aggregate(spec, points, results),
        invalid_points=invalid, runtime_ms=1000.0 * (time.perf_counter() - start),
        per_point=per_point)


def cmd_oracle(spec, workers=1):
    """Closed forms against finite differences, one row per compared quantity."""
    oracle_spec = CampaignSpec(**{**asdict(spec), "checks": ("oracle",)})
    return cmd_verify(oracle_spec, workers)


def cmd_scan_convexity(spec, z_count=61, r_count=20):
    """Omega/Lambda scan over a (z, r) grid; ``first_failing_r`` is in ascending r."""
    start = time.perf_counter()
    family = build_family(spec.family)
    if spec.r_range:
        rs = np.linspace(spec.r_range[0], spec.r_range[1], r_count, endpoint=False)
    else:
        rs = fam.default_r_grid(family, r_count)
    report = fam.convexity_check(family, fam.default_z_grid(z_count), rs, n=spec.n, seed=spec.seed)
    body = report.as_dict()
    check = {
        "name": "convexity",
        "sup_norm": max(0.0, -min(report.min_omega, report.min_lambda)),
        "tolerance": 0.0,
        "pass": report.ok and report.hessian_agrees,
        "failures": len(report.failures),
        "points": report.points_checked,
        "worst_point": None,
    }
    if report.failures:
        z, r, omega, lam = report.failures[0]
        check["worst_point"] = {"z": z, "r": r, "omega": omega, "lambda": lam}
    scan_spec = spec.as_dict()
    scan_spec["checks"] = ["convexity"]
    scan_spec["tolerances"] = {"convexity": 0.0}
    return CurvatureReport(spec=scan_spec, seed=spec.seed, checks=[dict(check, scan=body)],
                           invalid_points=[], runtime_ms=1000.0 * (time.perf_counter() - start))


def cmd_point(selector, x, y, cfg=None):
    """Every computed quantity at one point, as a JSON-ready dict."""
    family = build_family(selector)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 3:
        raise DomainError("x and y must be vectors of equal length n + 1 >= 3")
    point = EvalPoint.from_vectors(x, y)
    family.check_r(point.r)
    sc = point_scalars(family, point)
    ft = fundamental_tensor(family, point)
    D = cv.douglas_tensor(family, point, sc)
    B = cv.berwald_tensor(family, point, sc)
    L = cv.landsberg_tensor(family, point, sc)
    out = {
        "tool_version": __version__,
        "family": family.describe(),
        "point": {"x": x.tolist(), "y": y.tolist(), "z": point.z, "r": point.r,
                  "s": point.s, "u": point.u},
        "scalars": {"phi": sc.phi.value, "omega": sc.omega.value, "lambda": sc.lam.value,
                    "U": sc.U.value, "V": sc.V.value, "W": sc.W.value,
                    "R": sc.R.value, "T": sc.T.value, "E": sc.E.value, "H": sc.H.value},
        "g": ft.g.tolist(),
        "ginv": ft.ginv.tolist(),
        "det": ft.det,
        "det_formula": determinant_formula(sc.omega.value, sc.lam.value, point.n),
        "spray": spray(family, point, sc).tolist(),
        "spray_divergence": spray_divergence(family, point, sc),
        "douglas": D.tolist(),
        "berwald": B.tolist(),
        "landsberg": L.tolist(),
        "norms": {"douglas": cv.scaled_norm(D, point.u, -1),
                  "berwald": cv.scaled_norm(B, point.u, -1),
                  "landsberg": cv.scaled_norm(L, point.u, 0)},
        "residuals": {
            "douglas_ode": list(cv.douglas_ode_residuals(family, point.z, point.r, point.n, sc)),
            "ricci": list(cv.ricci_flat_residuals(family, point.z, point.r, point.n, sc)),
            "phi_r": cv.phi_r(family, point.z, point.r),
        },
    }
    try:
        out["residuals"]["projflat"] = cv.projective_flat_residual(family, point, cfg)
        out["residuals"]["ricci_scalar_fd"] = ricci_fd(family, point, cfg)
    except WarpFinslerError as exc:
        out["residuals"]["projflat"] = None
        out["residuals"]["fd_error"] = str(exc)
    return _clean(out)


__all__ = [
    "CHECKS", "DEFAULT_TOLERANCES", "CampaignSpec", "CurvatureReport", "build_family",
    "sample_points", "evaluate_point", "cmd_verify", "cmd_oracle", "cmd_scan_convexity",
    "cmd_point",
]
