"""Scenario-driven command line entry point.

A scenario is a flat key=value file with dotted keys (``kernel.family=box``).
Each run executes one mode's pipeline and writes a human summary
(``summary.txt``), a machine report (``report.kv``), and CSV dumps of any
space-time fields, all deterministically formatted.

Exit codes: 0 = all checks pass, 1 = a principle conclusion was violated
although every hypothesis passed, 2 = hypotheses not satisfied (for the
counterexample mode the semantics invert: 0 means the violation WAS
reproduced), 3 = numerical failure, 4 = configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundFailedError,
    BoundViolatedError,
    ConfigError,
    NoExceedanceError,
    NonlocalLabError,
    SolverSingularError,
    StepDivergedError,
    UnstableTimestepError,
)
from .fundsol import (
    ConstCoeffParams,
    chapman_kolmogorov_gap,
    delta_family_check,
    discrete_gronwall,
    gamma_adjoint_eval,
    gamma_eval,
    gaussian_bound_check,
    mass_integral,
)
from .grid import Grid, discretize, spacetime_to_csv
from .kernels import KernelSpec, classify_kernel, jquotient_bound_check, kernel_norms
from .operator import make_operator, registry_names
from .principles import (
    HOLDS,
    THEOREM_APPLIES,
    CounterexampleConfig,
    InvariantRegionConfig,
    invariant_region_check,
    reproduce_counterexample,
    verify_comparison,
    verify_weak_minimum,
)
from .profiles import PROFILE_NAMES, make_profile
from .solver import SCHEMES, SolverConfig, solve_ibvp

MODES = ("kernel-report", "solve", "weak-minimum", "comparison",
         "counterexample", "invariant-region", "fundsol-verify", "gronwall")

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_HYPOTHESES = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4

OUTPUT_ROOT_ENV = "NONLOCALLAB_OUT"

# every key a scenario file may contain, with the modes that accept it
_KERNEL_KEYS = {"kernel.family", "kernel.sigma", "kernel.halfwidth",
                "kernel.height", "kernel.rate", "kernel.scale",
                "kernel.file", "kernel.dimension"}
_GRID_KEYS = {"grid.halfwidth", "grid.npoints", "grid.far_lo", "grid.far_hi"}
_SOLVER_KEYS = {"solver.dt", "solver.t_final", "solver.scheme",
                "solver.backend", "solver.truncation_monitor"}
_OPERATOR_KEYS = {"operator.name", "operator.diffusion", "operator.drift",
                  "operator.c", "operator.d"}
_PROFILE_KEYS = {"profile.name", "profile.sigma", "profile.amplitude",
                 "profile.halfwidth", "profile.center", "profile.value"}
_PROFILE_UP_KEYS = {k.replace("profile.", "profile_up.") for k in _PROFILE_KEYS}

_ALLOWED = {
    "kernel-report": _KERNEL_KEYS | _GRID_KEYS,
    "solve": _KERNEL_KEYS | _GRID_KEYS | _SOLVER_KEYS | _OPERATOR_KEYS | _PROFILE_KEYS,
    "weak-minimum": _KERNEL_KEYS | _GRID_KEYS | _SOLVER_KEYS | _OPERATOR_KEYS
    | _PROFILE_KEYS | {"tol.conclusion"},
    "comparison": _KERNEL_KEYS | _GRID_KEYS | _SOLVER_KEYS | _OPERATOR_KEYS
    | _PROFILE_KEYS | _PROFILE_UP_KEYS | {"tol.conclusion", "comparison.regime"},
    "counterexample": _KERNEL_KEYS | {
        "counterexample.diffusion", "counterexample.halfwidth",
        "counterexample.npoints", "counterexample.dt",
        "counterexample.t_final", "counterexample.delta"},
    "invariant-region": _KERNEL_KEYS | {
        "invariant.diffusion", "invariant.halfwidth", "invariant.npoints",
        "invariant.dt", "invariant.t_final", "invariant.tol"},
    "fundsol-verify": {"fundsol.diffusion", "fundsol.drift", "fundsol.zeroth",
                       "fundsol.dimension", "fundsol.horizon",
                       "fundsol.samples", "fundsol.seed"},
    "gronwall": {"gronwall.series", "gronwall.rate", "gronwall.t_final",
                 "gronwall.steps", "gronwall.tol"},
}
_COMMON = {"name", "mode", "out"}


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: str
    entries: tuple  # sorted ((key, value), ...) pairs, values as strings

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        allowed = _ALLOWED[self.mode] | _COMMON
        for key, _ in self.entries:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} for mode {self.mode!r}")

    def get(self, key: str, default=None) -> str | None:
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def require(self, key: str) -> str:
        val = self.get(key)
        if val is None:
            raise ConfigError(f"mode {self.mode!r} requires key {key!r}")
        return val

    def get_float(self, key: str, default=None):
        val = self.get(key)
        if val is None:
            return default
        try:
            return float(val)
        except ValueError as exc:
            raise ConfigError(f"key {key!r} must be a number, got {val!r}") from exc

    def get_int(self, key: str, default=None):
        val = self.get(key)
        if val is None:
            return default
        try:
            return int(val)
        except ValueError as exc:
            raise ConfigError(f"key {key!r} must be an integer, got {val!r}") from exc

    def serialize(self) -> str:
        lines = [f"name={self.name}", f"mode={self.mode}"]
        for k, v in self.entries:
            if k not in ("name", "mode"):
                lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"


def parse_scenario_text(text: str, overrides=()) -> Scenario:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, _, value = item.partition("=")
        entries[key.strip()] = value.strip()
    if "mode" not in entries:
        raise ConfigError("scenario must declare a mode")
    name = entries.get("name", "scenario")
    return Scenario(name=name, mode=entries["mode"],
                    entries=tuple(sorted(entries.items())))


def load_scenario(path, overrides=()) -> Scenario:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario_text(text, overrides)


# -- config -> domain objects ------------------------------------------------

def _build_kernel(sc: Scenario) -> KernelSpec:
    family = sc.require("kernel.family")
    dim = sc.get_int("kernel.dimension", 1)
    if family == "gaussian":
        return KernelSpec.gaussian(sc.get_float("kernel.sigma", 1.0), dim)
    if family == "box":
        return KernelSpec.box(sc.get_float("kernel.halfwidth", 1.0),
                              sc.get_float("kernel.height"), dim)
    if family == "triangle":
        return KernelSpec.triangle(sc.get_float("kernel.halfwidth", 1.0), dim)
    if family == "exponential":
        return KernelSpec.exponential(sc.get_float("kernel.rate", 1.0), dim)
    if family == "cauchy":
        return KernelSpec.cauchy(sc.get_float("kernel.scale", 1.0), dim)
    if family == "tabulated":
        return KernelSpec.from_text(sc.require("kernel.file"), dim)
    raise ConfigError(f"unknown kernel family {family!r}")


def _build_grid(sc: Scenario) -> Grid:
    return Grid(1, sc.get_float("grid.halfwidth", 20.0),
                sc.get_int("grid.npoints", 512),
                far_field=((sc.get_float("grid.far_lo", 0.0),
                            sc.get_float("grid.far_hi", 0.0)),))


def _build_solver_config(sc: Scenario) -> SolverConfig:
    scheme = sc.get("solver.scheme", "backward-euler")
    if scheme not in SCHEMES:
        raise ConfigError(f"solver.scheme must be one of {SCHEMES}")
    backend = sc.get("solver.backend", "fast")
    if backend not in ("fast", "direct"):
        raise ConfigError("solver.backend must be 'fast' or 'direct'")
    return SolverConfig(
        dt=sc.get_float("solver.dt", 1e-3),
        t_final=sc.get_float("solver.t_final", 1.0),
        scheme=scheme, backend=backend,
        truncation_monitor=sc.get("solver.truncation_monitor", "no") == "yes")


def _build_operator(sc: Scenario, kernel: KernelSpec):
    name = sc.require("operator.name")
    if name == "linear":
        return make_operator("linear", kernel,
                             diffusion=sc.get_float("operator.diffusion", 1.0),
                             drift=sc.get_float("operator.drift", 0.0),
                             c=sc.get_float("operator.c", 0.0),
                             d=sc.get_float("operator.d", 0.0))
    if name not in registry_names():
        raise ConfigError(f"operator.name must be one of {registry_names()}")
    return make_operator(name, kernel, D=sc.get_float("operator.diffusion", 1.0))


def _build_profile(sc: Scenario, prefix: str = "profile"):
    name = sc.get(f"{prefix}.name", "zero")
    if name not in PROFILE_NAMES:
        raise ConfigError(f"{prefix}.name must be one of {PROFILE_NAMES}")
    params = {}
    for p in ("sigma", "amplitude", "halfwidth", "center", "value"):
        val = sc.get_float(f"{prefix}.{p}")
        if val is not None:
            params[p] = val
    if name in ("front-smoothstep", "zero"):
        params = {}
    if name == "constant":
        params = {"value": params.get("value", 0.0)}
    return make_profile(name, **params)


# -- report emission ----------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def kv_line(condition: str, ref: str, passed, margin) -> str:
    return (f"condition={condition}; ref={ref}; "
            f"pass={_fmt(bool(passed))}; margin={_fmt(float(margin))}")


def emit_report(out_dir: str, scenario: Scenario, summary_lines, kv_lines,
                fields=None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(f"scenario: {scenario.name}\nmode: {scenario.mode}\n")
        fh.write("\n".join(summary_lines) + "\n")
    with open(os.path.join(out_dir, "report.kv"), "w") as fh:
        fh.write("\n".join(kv_lines) + "\n")
    for label, stf in (fields or {}).items():
        spacetime_to_csv(stf, os.path.join(out_dir, label))


def _verdict_lines(verdict, ref: str):
    lines = []
    for item in verdict.hypotheses.items:
        lines.append(kv_line(item.cond_id, ref, item.passed, item.margin))
    lines.append(kv_line("conclusion", ref, verdict.conclusion == HOLDS,
                         verdict.conclusion_margin))
    return lines


def _verdict_exit(verdict) -> int:
    if verdict.conclusion == HOLDS and verdict.applicability == THEOREM_APPLIES:
        return EXIT_OK
    if verdict.internal_inconsistency:
        return EXIT_INCONSISTENT
    return EXIT_HYPOTHESES


# -- mode pipelines -----------------------------------------------------------

def _run_kernel_report(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    cert = classify_kernel(kernel)
    m = cert.moments
    kv = [kv_line(c.cond_id, "kernel", c.passed,
                  c.measured if math.isfinite(c.measured) else math.inf)
          for c in cert.conditions]
    kv.append(kv_line("l1_norm", "kernel", math.isfinite(m.l1_norm), m.l1_norm))
    kv.append(kv_line("second_moment", "kernel", m.second_moment_finite,
                      m.second_moment))
    summary = [f"l1 norm: {_fmt(m.l1_norm)}",
               f"second moment: {_fmt(m.second_moment)}",
               f"normalized: {_fmt(m.normalized)}",
               f"even: {_fmt(m.is_even)}"]
    if m.second_moment_finite and sc.get("grid.npoints") is not None:
        jq = jquotient_bound_check(kernel, _build_grid(sc))
        kv.append(kv_line("jquotient_bound", "kernel",
                          jq.measured_max <= jq.bound + 1e-6,
                          jq.bound - jq.measured_max))
        summary.append(f"quotient bound {_fmt(jq.bound)}, "
                       f"measured {_fmt(jq.measured_max)}")
    emit_report(out_dir, sc, summary, kv)
    return EXIT_OK if cert.passes("integrable_nonnegative") else EXIT_HYPOTHESES


def _run_solve(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    grid = _build_grid(sc)
    op = _build_operator(sc, kernel)
    u0 = discretize(grid, _build_profile(sc), 0.0)
    sol = solve_ibvp(op, u0, _build_solver_config(sc))
    res_max = sol.metadata.get("residual_max")
    kv = [kv_line("completed", "solve", True, float(sol.times[-1])),
          kv_line("residual_max", "solve", True,
                  res_max if res_max is not None else 0.0)]
    trunc = sol.metadata.get("truncation_discrepancy")
    if trunc is not None:
        kv.append(kv_line("truncation_discrepancy", "solve", True, trunc))
    summary = [f"time levels: {len(sol)}",
               f"final sup norm: {_fmt(sol.final().sup_norm())}"]
    emit_report(out_dir, sc, summary, kv, fields={"solution": sol})
    return EXIT_OK


def _run_weak_minimum(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    grid = _build_grid(sc)
    op = _build_operator(sc, kernel)
    if op.linear is None:
        raise ConfigError("weak-minimum mode requires operator.name=linear")
    u0 = discretize(grid, _build_profile(sc), 0.0)
    sol = solve_ibvp(op, u0, _build_solver_config(sc))
    verdict = verify_weak_minimum(op, sol, tol=sc.get_float("tol.conclusion", 1e-8))
    emit_report(out_dir, sc, [f"conclusion: {verdict.conclusion}",
                              f"applicability: {verdict.applicability}"],
                _verdict_lines(verdict, "weak-minimum"), fields={"solution": sol})
    return _verdict_exit(verdict)


def _run_comparison(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    grid = _build_grid(sc)
    op = _build_operator(sc, kernel)
    if op.reaction is None:
        raise ConfigError("comparison mode requires a reaction operator")
    cfg = _build_solver_config(sc)
    low = solve_ibvp(op, discretize(grid, _build_profile(sc, "profile"), 0.0), cfg)
    up = solve_ibvp(op, discretize(grid, _build_profile(sc, "profile_up"), 0.0), cfg)
    regime = sc.get("comparison.regime", "moment-kernel")
    verdict = verify_comparison(op, low, up, regime=regime,
                                tol=sc.get_float("tol.conclusion", 1e-8))
    emit_report(out_dir, sc, [f"conclusion: {verdict.conclusion}",
                              f"applicability: {verdict.applicability}"],
                _verdict_lines(verdict, "comparison"),
                fields={"lower": low, "upper": up})
    return _verdict_exit(verdict)


def _run_counterexample(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    cfg = CounterexampleConfig(
        kernel=kernel,
        diffusion=sc.get_float("counterexample.diffusion", 0.1),
        halfwidth=sc.get_float("counterexample.halfwidth", 40.0),
        npoints=sc.get_int("counterexample.npoints", 2048),
        dt=sc.get_float("counterexample.dt", 1e-3),
        t_final=sc.get_float("counterexample.t_final", 1.0),
        delta=sc.get_float("counterexample.delta", 1e-3))
    try:
        rep = reproduce_counterexample(cfg)
    except NoExceedanceError as exc:
        emit_report(out_dir, sc, [f"no exceedance; max u = {_fmt(exc.max_value)}"],
                    [kv_line("overshoot_reproduced", "counterexample", False,
                             exc.max_value - 1.0)])
        return EXIT_HYPOTHESES
    kv = [
        kv_line("initial_growth_rate", "counterexample",
                rep.relative_gap <= 0.2, 0.2 - rep.relative_gap),
        kv_line("overshoot_reproduced", "counterexample", True,
                rep.max_u - 1.0 - cfg.delta),
    ]
    summary = [
        f"forward difference at x=0: {_fmt(rep.forward_difference)}",
        f"predictor 1 - Ju0(0): {_fmt(rep.predictor)}",
        f"first exceedance above 1+{_fmt(cfg.delta)} at t = {_fmt(rep.exceedance_time)}",
        f"max u over the run: {_fmt(rep.max_u)}",
    ]
    emit_report(out_dir, sc, summary, kv)
    # inverted semantics: reproducing the violation is the pass condition
    return EXIT_OK


def _run_invariant_region(sc: Scenario, out_dir: str) -> int:
    kernel = _build_kernel(sc)
    cfg = InvariantRegionConfig(
        kernel=kernel,
        diffusion=sc.get_float("invariant.diffusion", 0.1),
        halfwidth=sc.get_float("invariant.halfwidth", 40.0),
        npoints=sc.get_int("invariant.npoints", 2048),
        dt=sc.get_float("invariant.dt", 1e-3),
        t_final=sc.get_float("invariant.t_final", 2.0),
        tol=sc.get_float("invariant.tol", 1e-6))
    try:
        rep = invariant_region_check(cfg)
    except BoundViolatedError as exc:
        emit_report(out_dir, sc, [str(exc)],
                    [kv_line("bounds_hold", "invariant-region", False, 0.0)])
        return EXIT_INCONSISTENT
    kv = [
        kv_line("bounds_hold", "invariant-region", True,
                min(rep.min_u_clipped, rep.min_u_plain) + cfg.tol),
        kv_line("upper_bound", "invariant-region", True,
                1.0 + cfg.tol - max(rep.max_u_clipped, rep.max_u_plain)),
        kv_line("reactions_agree", "invariant-region", rep.passed,
                cfg.tol - rep.max_gap),
    ]
    summary = [
        f"clipped reaction range: [{_fmt(rep.min_u_clipped)}, {_fmt(rep.max_u_clipped)}]",
        f"plain reaction range: [{_fmt(rep.min_u_plain)}, {_fmt(rep.max_u_plain)}]",
        f"max gap between the two runs: {_fmt(rep.max_gap)}",
    ]
    emit_report(out_dir, sc, summary, kv)
    return EXIT_OK if rep.passed else EXIT_INCONSISTENT


def _run_fundsol_verify(sc: Scenario, out_dir: str) -> int:
    dim = sc.get_int("fundsol.dimension", 1)
    p = ConstCoeffParams(
        diffusion=sc.get_float("fundsol.diffusion", 1.0),
        drift=(sc.get_float("fundsol.drift", 0.0),) * dim,
        zeroth=sc.get_float("fundsol.zeroth", 0.0),
        dimension=dim)
    horizon = sc.get_float("fundsol.horizon", 1.0)
    kv = []
    mass = mass_integral(p, 0.0 if dim == 1 else (0.0, 0.0), 0.5)
    mass_target = math.exp(p.zeroth * 0.5)
    kv.append(kv_line("mass_identity", "fundsol",
                      abs(mass - mass_target) <= 1e-8,
                      1e-8 - abs(mass - mass_target)))
    adj_gap = abs(gamma_adjoint_eval(p, 0.3, 0.0, 0.7, 1.0)
                  - gamma_eval(p, 0.7, 1.0, 0.3, 0.0))
    kv.append(kv_line("adjoint_identity", "fundsol", adj_gap == 0.0, -adj_gap))
    if dim == 1:
        ck = chapman_kolmogorov_gap(p, 0.2, 1.0, -0.1, 0.0, 0.4)
        kv.append(kv_line("composition_identity", "fundsol", ck <= 1e-6, 1e-6 - ck))
    rows = delta_family_check(p, "bump", [0.0, 0.5] if dim == 1 else
                              [np.zeros(2)], (1e-1, 1e-2, 1e-3))
    devs = [d for _, d in rows]
    kv.append(kv_line("delta_family_decreasing", "fundsol",
                      all(a > b for a, b in zip(devs, devs[1:])),
                      devs[0] - devs[-1]))
    try:
        fit = gaussian_bound_check(p, horizon,
                                   samples=sc.get_int("fundsol.samples", 10000),
                                   seed=sc.get_int("fundsol.seed", 0))
    except BoundFailedError as exc:
        kv.append(kv_line("envelope_bounds", "fundsol", False, 0.0))
        emit_report(out_dir, sc, [str(exc)], kv)
        return EXIT_INCONSISTENT
    kv.append(kv_line("envelope_bounds", "fundsol", True, 1.0 - fit.max_ratio))
    kv.append(kv_line("positivity", "fundsol",
                      math.isfinite(fit.min_log_gamma), fit.min_log_gamma))
    summary = [f"mass integral: {_fmt(mass)} (target {_fmt(mass_target)})",
               f"envelope fit: kappa={_fmt(fit.kappa)}, lambda={_fmt(fit.lam)}",
               f"max ratio: {_fmt(fit.max_ratio)} over {fit.sample_count} samples"]
    emit_report(out_dir, sc, summary, kv)
    ok = all("pass=yes" in line for line in kv)
    return EXIT_OK if ok else EXIT_INCONSISTENT


def _run_gronwall(sc: Scenario, out_dir: str) -> int:
    series = sc.get("gronwall.series", "zero")
    rate = sc.get_float("gronwall.rate", 1.0)
    t_final = sc.get_float("gronwall.t_final", 1.0)
    steps = sc.get_int("gronwall.steps", 100)
    tol = sc.get_float("gronwall.tol", 1e-12)
    times = np.linspace(0.0, t_final, steps + 1)
    if series == "zero":
        psi = np.zeros_like(times)
    elif series == "linear":
        psi = times.copy()
    else:
        raise ConfigError("gronwall.series must be 'zero' or 'linear'")
    verdict = discrete_gronwall(times, psi, rate, tol=tol)
    kv = [kv_line("premise", "gronwall", verdict.premise_ok,
                  -1.0 if not verdict.premise_ok else 0.0),
          kv_line("conclusion", "gronwall", verdict.conclusion_ok,
                  (verdict.envelope_max - verdict.max_value)
                  if verdict.conclusion_asserted else -1.0)]
    summary = [f"premise holds: {_fmt(verdict.premise_ok)}",
               f"conclusion asserted: {_fmt(verdict.conclusion_asserted)}",
               f"max of the series: {_fmt(verdict.max_value)}"]
    if not verdict.premise_ok:
        summary.append(f"PREMISE_FAILED at index {verdict.first_violation}")
    emit_report(out_dir, sc, summary, kv)
    if not verdict.premise_ok:
        return EXIT_HYPOTHESES
    return EXIT_OK if verdict.conclusion_ok else EXIT_INCONSISTENT


_PIPELINES = {
    "kernel-report": _run_kernel_report,
    "solve": _run_solve,
    "weak-minimum": _run_weak_minimum,
    "comparison": _run_comparison,
    "counterexample": _run_counterexample,
    "invariant-region": _run_invariant_region,
    "fundsol-verify": _run_fundsol_verify,
    "gronwall": _run_gronwall,
}


def run_scenario(path, out_dir=None, overrides=()) -> int:
    try:
        sc = load_scenario(path, overrides)
        if out_dir is None:
            root = sc.get("out") or os.environ.get(OUTPUT_ROOT_ENV, "out")
            out_dir = os.path.join(root, sc.name)
        return _PIPELINES[sc.mode](sc, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepDivergedError, SolverSingularError, UnstableTimestepError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NonlocalLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nonlocallab",
        description="Run a numerical scenario for the non-local parabolic laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a scenario file")
    runp.add_argument("scenario", help="path to a key=value scenario file")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--override", action="append", default=[],
                      metavar="KEY=VALUE", help="override a scenario key")
    args = parser.parse_args(argv)
    return run_scenario(args.scenario, args.out, args.override)


if __name__ == "__main__":
    sys.exit(main())
