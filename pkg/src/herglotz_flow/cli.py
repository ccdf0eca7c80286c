"""herglotz-flow: experiment runner with JSON reports and CSV grids.

Exit codes: 0 all checks pass, 2 some numeric check failed, 1 usage or
config error.  Output files are written only after every check has run.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import mpmath
import numpy as np
import scipy

from . import __version__
from . import averaging as avg
from . import classify as cl
from . import fixtures as fx
from . import rankone as r1
from . import suite
from .errors import (ConvergenceError, DomainError, PreconditionError, QuadratureError,
                     StepFailure, TailFitError)
from .herglotz import EpsSchedule, HerglotzRep, boundary_value, herglotz_from_json
from .rankone import FiniteModel
from .sl2 import UNIPOTENT, LieElement
from .winding import xi_closed_form, xi_density, xi_values

COMMANDS = ("evaluate", "flow", "xi", "average", "global", "classify", "rankone", "extension", "suite")

_INTERVAL = {"type": "array", "items": {"type": ["number", "string"]}, "minItems": 2, "maxItems": 2}
_NUMBERS = {"type": "array", "items": {"type": "number"}}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "fixture": {
            "oneOf": [
                {"type": "object", "required": ["eigs", "phi"],
                 "properties": {"eigs": _NUMBERS, "phi": _NUMBERS}},
                {"type": "object", "required": ["constant"],
                 "properties": {"constant": {"type": "object", "required": ["re", "im"]}}},
                {"type": "object", "required": ["named"],
                 "properties": {"named": {"enum": sorted(fx.FIXTURES)}}},
                {"type": "object", "required": ["mu"],
                 "properties": {"A": {"type": "number", "minimum": 0},
                                "B": {"type": ["number", "string"]},
                                "mu": {"type": "object"}}},
            ]
        },
        "generator": {"type": "object", "required": ["alpha", "beta", "gamma"],
                      "properties": {k: {"type": "number"} for k in ("alpha", "beta", "gamma")}},
        "t_range": {"oneOf": [{"const": "global"},
                              {"type": "array", "items": {"type": "number"},
                               "minItems": 2, "maxItems": 2}]},
        "intervals": {"type": "array", "items": _INTERVAL},
        "schedule": {"type": "object",
                     "properties": {"eps_max": {"type": "number", "exclusiveMinimum": 0},
                                    "eps_min": {"type": "number", "exclusiveMinimum": 0},
                                    "points_per_decade": {"type": "integer", "minimum": 1},
                                    "extrapolation": {"enum": ["none", "richardson"]}},
                     "additionalProperties": False},
        "seed": {"type": "integer"},
        "outputs": {"type": "object",
                    "properties": {"json": {"type": "boolean"}, "csv": {"type": "boolean"}}},
        "out": {"type": "string"},
        "z_grid": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                              "minItems": 2, "maxItems": 2}},
        "t_grid": _NUMBERS,
        "lambda_grid": {"type": "object", "required": ["lo", "hi", "n"],
                        "properties": {"lo": {"type": "number"}, "hi": {"type": "number"},
                                       "n": {"type": "integer", "minimum": 1}}},
        "lambdas": _NUMBERS,
        "labels": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
        "random_draws": {"type": "integer", "minimum": 0},
        "sets": {"type": "object",
                 "properties": {k: {"type": "array", "items": _INTERVAL} for k in ("ac", "sc", "pp")}},
        "T_cut": {"type": "number", "exclusiveMinimum": 0},
        "criteria": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 13}},
    },
    "additionalProperties": False,
}

REQUIRED = {
    "evaluate": ("fixture",),
    "flow": ("fixture", "generator", "intervals"),
    "xi": ("fixture", "generator", "t_range", "lambda_grid"),
    "average": ("fixture", "generator", "t_range", "intervals"),
    "global": ("fixture", "generator", "intervals"),
    "classify": ("fixture",),
    "rankone": ("fixture", "t_range", "intervals"),
    "extension": ("fixture", "intervals"),
    "suite": (),
}


class ConfigError(ValueError):
    pass


def _num(v) -> float:
    return float(v) if not isinstance(v, str) else float(v.strip())


def load_fixture(doc: dict):
    if "named" in doc:
        return fx.FIXTURES[doc["named"]]()
    if "eigs" in doc:
        return FiniteModel.from_json(doc)
    if doc.get("B") == "plain":
        rep = HerglotzRep.from_json({**doc, "B": 0.0})
        return fx.plain_transform(rep.mu) if rep.A == 0 else HerglotzRep(
            rep.A, fx.plain_transform(rep.mu).B, rep.mu)
    return herglotz_from_json(doc)


def validate_config(command: str, config: dict) -> None:
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"{path}: {exc.message}") from None
    missing = [k for k in REQUIRED[command] if k not in config]
    if missing:
        raise ConfigError(f"{command} needs config keys: {', '.join(missing)}")
    for lo, hi in config.get("intervals", []):
        if not _num(lo) < _num(hi):
            raise ConfigError(f"interval ({lo}, {hi}) is empty")
    tr = config.get("t_range")
    if isinstance(tr, list) and not tr[0] <= tr[1]:
        raise ConfigError("t_range must satisfy t1 <= t2")


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def _digest(obj) -> str:
    return hashlib.sha256(_canonical(obj).encode()).hexdigest()


def _versions() -> dict:
    return {"herglotz_flow": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__, "mpmath": mpmath.__version__}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("HF_WORKERS", "1")))
    except ValueError:
        return 1


def _result(name, lhs, rhs, budget, *, residual=None, flagged=False) -> dict:
    res = abs(lhs - rhs) if residual is None else residual
    out = {"name": name, "lhs": float(lhs), "rhs": float(rhs), "residual": float(res),
           "budget": float(budget), "pass": bool(np.isfinite(res) and res <= budget)}
    if flagged:
        out["informational"] = True
        out["discrepant"] = not out["pass"]
    return out


def _fmt(x) -> str:
    return repr(float(x))


class Run:
    """State for one command: parsed inputs, results and pending CSV exports."""

    def __init__(self, command: str, config: dict, seed: int):
        self.command = command
        self.config = config
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.sched = EpsSchedule.from_json(config.get("schedule", {}))
        self.results: list[dict] = []
        self.data: dict = {}
        self.csv: dict[str, str] = {}
        self.timings: dict = {}

    @property
    def fixture(self):
        return load_fixture(self.config["fixture"])

    @property
    def generator(self) -> LieElement:
        return LieElement.from_json(self.config["generator"])

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [(_num(a), _num(b)) for a, b in self.config.get("intervals", [])]

    @property
    def t_range(self):
        tr = self.config.get("t_range", "global")
        return tr if tr == "global" else (float(tr[0]), float(tr[1]))

    def add_csv(self, name: str, header: str, columns: list[str], rows) -> None:
        buf = io.StringIO()
        buf.write(f"# {header}\n")
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(v) for v in r) + "\n")
        self.csv[name] = buf.getvalue()

    def report(self) -> dict:
        body = {"command": self.command, "inputs_digest": _digest(
                    {"command": self.command, "config": self.config, "seed": self.seed}),
                "results": self.results, "data": self.data, "versions": _versions()}
        body["report_digest"] = _digest({k: body[k] for k in ("command", "inputs_digest",
                                                            "results", "data")})
        if self.timings:
            body["timings"] = self.timings
        return body

    @property
    def passed(self) -> bool:
        ok = all(r["pass"] for r in self.results if not r.get("informational"))
        return ok and all(t["pass"] for t in self.timings.values())


# --------------------------------------------------------------------------
# commands


def cmd_evaluate(run: Run) -> None:
    M = run.fixture
    zs = np.array([complex(a, b) for a, b in run.config.get("z_grid", [[0.0, 1.0], [0.5, 0.1],
                                                                        [-1.0, 2.0]])])
    vals = np.asarray(M(zs))
    run.data["values"] = [{"re": z.real, "im": z.imag, "M_re": v.real, "M_im": v.imag}
                          for z, v in zip(zs, vals)]
    run.add_csv("evaluate", f"command=evaluate seed={run.seed}", ["z_re", "z_im", "M_re", "M_im"],
                [(z.real, z.imag, v.real, v.imag) for z, v in zip(zs, vals)])
    run.results.append(_result("Im M >= 0 on the grid", float(min(0.0, vals.imag.min())), 0.0, 0.0))


def cmd_flow(run: Run) -> None:
    X, M0, ivs = run.generator, run.fixture, run.intervals
    tr = run.t_range
    default = np.linspace(tr[0], tr[1], 11) if tr != "global" else np.linspace(-1, 1, 11)
    ts = [float(t) for t in run.config.get("t_grid", default)]
    rows, states = [], []
    for t in ts:
        st = avg.flow_state(X, M0, t, ivs, run.sched)
        states.append(st)
        rows.append((t, st.A_t, st.B_t, *(m for _, m in st.interval_masses)))
        # dynamical-system law: flow by t/2 from the state at t/2
        half = avg.FlowedHerglotz(X, t / 2, M0)
        again = avg.flow_state(X, half, t / 2, ivs, run.sched)
        worst = max(abs(a - b) for (_, a), (_, b) in zip(st.interval_masses, again.interval_masses))
        run.results.append(_result(f"mu_t = (mu_(t/2))_(t/2) at t={t}", worst, 0.0, 1e-8))
    cols = ["t", "A_t", "B_t", *(f"mass_{i}" for i in range(len(ivs)))]
    run.add_csv("flow", f"command=flow intervals={ivs} seed={run.seed}", cols, rows)
    run.data["states"] = [dict(zip(cols, map(float, r))) for r in rows]


def cmd_xi(run: Run) -> None:
    X, M0 = run.generator, run.fixture
    if run.t_range == "global":
        raise ConfigError("xi needs a finite t_range")
    t1, t2 = run.t_range
    g = run.config["lambda_grid"]
    lams = np.linspace(g["lo"], g["hi"], g["n"])
    sample = xi_density(X, M0, t1, t2, lams, run.sched)
    run.csv["xi"] = sample.to_csv(f"command=xi t1={t1!r} t2={t2!r} gamma={X.gamma!r} seed={run.seed}")
    run.data["converged_fraction"] = float(np.mean(sample.converged))
    if X.gamma > 0 and t1 < 0 < t2:
        worst = 0.0
        for lam, val in zip(lams, sample.xi_values):
            bv = boundary_value(M0, lam, run.sched)
            if bv.converged:
                worst = max(worst, abs(val - xi_closed_form(X, bv.value, t1, t2)))
        run.results.append(_result("winding density vs closed form", worst, 0.0, 1e-6))


def _global_rows(run: Run, X: LieElement, M0, interval) -> None:
    width = interval[1] - interval[0]
    res = avg.global_average(X, M0, interval, run.sched, T_cut=run.config.get("T_cut", 1e4))
    run.data.setdefault("global", []).append(
        {"interval": list(interval), "value": res.value, "case": res.case.value,
         "core": res.core, "tail": res.tail})
    if res.case.value == "III":
        target = abs(X.gamma) * avg.integrate_xi_global(X, M0, interval, run.sched)
        printed = abs(X.gamma) * avg.printed_global_density(X, M0, interval, run.sched)
        run.results.append(_result(f"global {interval} vs int xi_global", res.value, target, 1e-6))
        run.results.append(_result(f"global {interval} vs printed density variant", res.value,
                                   printed, 1e-6, flagged=True))
    else:
        run.results.append(_result(f"global {interval} vs |Delta|", res.value, width, 1e-3))


def cmd_average(run: Run) -> None:
    X, M0 = run.generator, run.fixture
    sets = run.config.get("sets")
    declared = None if sets is None else avg.InvariantSets(
        **{k: tuple((_num(a), _num(b)) for a, b in v) for k, v in sets.items()})
    for iv in run.intervals:
        if run.t_range == "global":
            _global_rows(run, X, M0, iv)
            total = None
        else:
            t1, t2 = run.t_range
            for method in ("contour", "pointwise"):
                res = avg.verify_mz(X, M0, iv, t1, t2, run.sched, method=method)
                run.results.append(_result(res.name, res.lhs, res.rhs, res.budget))
            total = res.lhs
        if declared is not None:
            t1, t2 = (None, None) if run.t_range == "global" else run.t_range
            parts = avg.part_rows(X, M0, iv, t1, t2, declared, run.sched)
            if total is None:
                total = run.data["global"][-1]["value"]
            run.data.setdefault("parts", []).append({"interval": list(iv), **parts})
            run.results.append(_result(f"ac + sc + pp = total on {iv}", sum(parts.values()),
                                       total, 1e-8))


def cmd_global(run: Run) -> None:
    X, M0 = run.generator, run.fixture
    for iv in run.intervals:
        _global_rows(run, X, M0, iv)


def cmd_classify(run: Run) -> None:
    M0 = run.fixture
    lams = list(run.config.get("lambdas", []))
    labels = {float(a): b for a, b in run.config.get("labels", [])}
    lams += [lam for lam in labels if lam not in lams]
    draws = run.config.get("random_draws", 0)
    if draws:
        lams += run.rng.uniform(-1.0, 2.0, size=draws).tolist()
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        classes = list(pool.map(lambda lam: cl.classify_point(M0, lam, run.sched), lams))
    run.data["points"] = [c.to_json(float(lam)) for lam, c in zip(lams, classes)]
    if labels:
        wrong = sum(c.kind.value != labels[lam] for lam, c in zip(lams, classes) if lam in labels)
        run.results.append(_result("misclassified labelled points", wrong, 0, 0, residual=wrong))


def cmd_rankone(run: Run) -> None:
    model = run.fixture
    if not isinstance(model, FiniteModel):
        raise ConfigError("rankone needs a FiniteModel fixture ({eigs, phi})")
    if run.t_range == "global":
        raise ConfigError("rankone needs a finite t_range")
    t1, t2 = run.t_range
    for t in (t1, t2):
        sp = r1.perturbed_spectrum(model, t)
        run.results.append(_result(f"weights sum to 1 at t={t}", sp.weights.sum(), 1.0, 1e-12))
    for iv in run.intervals:
        lhs, rhs, _ = r1.birman_solomyak_check(model, iv, t1, t2)
        run.results.append(_result(f"Birman-Solomyak {iv} [{t1}, {t2}]", lhs, rhs, 1e-8))
        uni = r1.universality_check(model, iv, run.config.get("T_cut", 1e4))
        run.results.append(_result(f"universality {iv}", uni.value, iv[1] - iv[0], 1e-3))
    draws = run.config.get("random_draws", 10)
    worst_res = worst_xi = 0.0

    for _ in range(draws):
        t = float(run.rng.uniform(-3, 3))
        z = complex(run.rng.uniform(-3, 3), run.rng.uniform(0.05, 2))
        worst_res = max(worst_res, r1.resolvent_identity_check(model, t, z))
        lam = float(run.rng.uniform(model.eig[0] - 2, model.eig[-1] + 2))
        counted = r1.spectral_shift_counting(model, t, lam)
        wound = xi_values(UNIPOTENT, model, t, [lam], run.sched)[0][0]
        worst_xi = max(worst_xi, abs(counted - wound))
    run.results.append(_result(f"resolvent identity, {draws} draws", worst_res, 0.0, 1e-10))
    run.results.append(_result(f"counting xi vs winding xi, {draws} draws", worst_xi, 0.0, 1e-8))


def cmd_extension(run: Run) -> None:
    M = run.fixture
    fam = avg.extension_family(M)
    zs = np.array([complex(run.rng.uniform(-3, 3), run.rng.uniform(0.05, 3)) for _ in range(10)])
    run.results.append(_result("f_tan(s)(N) vs rotation flow", avg.reparametrization_residual(fam, zs),
                               0.0, 1e-12))
    run.results.append(_result("Re N(i) = 0", float(fam.N(np.array([1j]))[0].real), 0.0, 1e-12))
    if isinstance(M, FiniteModel):
        n_trace = r1.n_function(M, zs)
        worst = float(np.max(np.abs(n_trace - fam.N(zs)) / np.maximum(1.0, np.abs(n_trace))))
        run.results.append(_result("trace formula vs z + (1 + z^2) M", worst, 0.0, 1e-12))
    for iv in run.intervals:
        res = avg.extension_average(fam, iv, run.sched)
        run.results.append(_result(f"average of nu_t on {iv}", res.value, iv[1] - iv[0], 1e-3))
        run.results.append(_result(f"with the printed 1/pi prefactor on {iv}",
                                   res.printed_normalization, iv[1] - iv[0], 1e-3, flagged=True))
    run.data["restriction"] = "bounded-support models only; the infinite-nu case is not certified"


def cmd_suite(run: Run) -> None:
    numbers = run.config.get("criteria")
    for cr in suite.run_suite(numbers, workers=_workers()):
        for row in cr.rows:
            if row.name.startswith("runtime"):
                continue
            d = row.to_json()
            d["name"] = f"[{cr.number}] {row.name}"
            run.results.append(d)
        run.timings[str(cr.number)] = {"seconds": cr.seconds, "budget": cr.runtime_budget,
                                       "pass": cr.seconds <= cr.runtime_budget}
        print(cr.summary(), file=sys.stderr)


HANDLERS = {"evaluate": cmd_evaluate, "flow": cmd_flow, "xi": cmd_xi, "average": cmd_average,
            "global": cmd_global, "classify": cmd_classify, "rankone": cmd_rankone,
            "extension": cmd_extension, "suite": cmd_suite}


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="herglotz-flow", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="JSON experiment config (optional for suite)")
    p.add_argument("--out", type=Path, help="directory for report JSON and CSV exports")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    return p


def _error(message: str) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return 1


def write_outputs(run: Run, report: dict, out: Path) -> list[Path]:
    outputs = run.config.get("outputs", {"json": True, "csv": True})
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if outputs.get("json", True):
        path = out / f"{run.command}.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        written.append(path)
    if outputs.get("csv", True):
        for name, text in run.csv.items():
            path = out / f"{name}.csv"
            path.write_text(text)
            written.append(path)
    return written


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config: dict = {}
    if args.config is not None:
        try:
            config = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            return _error(f"cannot read config: {exc}")
    elif args.command != "suite":
        return _error(f"{args.command} needs --config")
    try:
        validate_config(args.command, config)
        seed = args.seed if args.seed is not None else int(config.get("seed", suite.SEED))
        run = Run(args.command, config, seed)
        if "fixture" in config:
            run.fixture  # noqa: B018  (fail early on an unbuildable fixture)
        try:
            HANDLERS[args.command](run)
        except (QuadratureError, ConvergenceError, StepFailure, TailFitError) as exc:
            run.results.append(_result(f"{type(exc).__name__}: {exc}", math.nan, 0.0, 0.0,
                                       residual=math.inf))
    except (ConfigError, ValueError, KeyError, PreconditionError, DomainError) as exc:
        return _error(f"{type(exc).__name__}: {exc}")
    report = run.report()
    out = args.out or (Path(config["out"]) if "out" in config else None)
    if out is not None:
        write_outputs(run, report, out)
    print(json.dumps(report, indent=2, sort_keys=True, default=float))
    return 0 if run.passed else 2


if __name__ == "__main__":
    sys.exit(main())
