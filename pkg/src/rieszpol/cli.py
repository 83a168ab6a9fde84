"""Command-line interface.

    rieszpol polarize --domain circle --n 5 --p 2 --exact
    rieszpol sweep --domain circle --p 1 --n 1000:1000000:log --format csv
    rieszpol verify --suite circle_closed_forms
    rieszpol oracle --what wiener --domain sphere --d 2 --p 1
    rieszpol net --domain ball --d 2 --delta 1.0

Exit codes: 0 success, 1 verification failure, 2 solver nonconvergence,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from . import constants as C
from .domains import Configuration, Domain, maximal_delta_net
from .energy import EnergyOptions, energy, minimize_energy
from .experiments import SUITES, conjecture_explore, sweep, verify_suite
from .polarization import (
    NonConvergenceError,
    SolverOptions,
    equally_spaced_value,
    inner_min,
    maximize_polarization,
)
from .serialize import dumps

COMMANDS = ("polarize", "energy", "oracle", "sweep", "verify", "explore", "net")
ORACLES = ("wiener", "tau", "zeta", "epstein_hex", "cpd_lower", "sigma_p1", "bound", "equally_spaced", "chebyshev")
EXIT_OK, EXIT_VERIFY, EXIT_NONCONVERGED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(ValueError):
    pass


def parse_n_range(text: str) -> list:
    """Parse ``a:b:log[:k]``, ``a:b[:lin[:step]]`` or a comma list into sorted n values.

    A log range takes k points per decade (default 4), rounded and deduplicated,
    always including both ends.
    """
    text = text.strip()
    try:
        if "," in text:
            ns = [int(t) for t in text.split(",") if t.strip()]
        elif ":" in text:
            parts = text.split(":")
            a, b = int(parts[0]), int(parts[1])
            mode = parts[2] if len(parts) > 2 else "lin"
            if b < a:
                raise UsageError(f"--n: range end {b} is below start {a}")
            if mode == "log":
                if a < 1:
                    raise UsageError("--n: log ranges need a start >= 1")
                k = int(parts[3]) if len(parts) > 3 else 4
                if len(parts) > 4 or k < 1:
                    raise UsageError(f"--n: malformed log range {text!r}")
                count = max(2, int(round(k * math.log10(b / a))) + 1) if b > a else 1
                ns = sorted(set(int(round(x)) for x in np.geomspace(a, b, count)))
            elif mode == "lin":
                step = int(parts[3]) if len(parts) > 3 else 1
                if len(parts) > 4 or step < 1:
                    raise UsageError(f"--n: malformed linear range {text!r}")
                ns = list(range(a, b + 1, step))
            else:
                raise UsageError(f"--n: unknown range mode {mode!r}")
        else:
            ns = [int(text)]
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"--n: malformed value {text!r}") from None
    if not ns or min(ns) < 1:
        raise UsageError(f"--n: values must be positive integers, got {text!r}")
    return ns


@dataclass
class RunSpec:
    command: str
    domain: Optional[str] = None
    d: Optional[int] = None
    p: Optional[float] = None
    n: Optional[str] = None
    seed: int = 0
    tol: Optional[float] = None
    format: str = "json"
    output: Optional[str] = None
    exact: bool = False
    config: Optional[str] = None
    restarts: Optional[int] = None
    method: Optional[str] = None
    suite: Optional[str] = None
    what: Optional[str] = None
    kind: Optional[str] = None
    delta: Optional[float] = None
    extras: dict = field(default_factory=dict)

    @property
    def n_values(self) -> list:
        return parse_n_range(self.n) if self.n is not None else []

    def domain_obj(self) -> Domain:
        if self.domain is None:
            raise UsageError("--domain is required")
        return Domain.from_spec(self.domain, self.d)

    def to_argv(self) -> list:
        """Arguments that parse back to an equal RunSpec."""
        argv = [self.command]
        for f in fields(self):
            if f.name in ("command", "extras"):
                continue
            v = getattr(self, f.name)
            flag = "--" + f.name
            if isinstance(v, bool):
                if v:
                    argv.append(flag)
            elif v is not None and not (f.name == "seed" and v == 0) and not (f.name == "format" and v == _default_format(self.command)):
                argv += [flag, repr(v) if isinstance(v, float) else str(v)]
        return argv


def _default_format(command: str) -> str:
    return {"sweep": "csv", "explore": "csv", "oracle": "text"}.get(command, "json")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rieszpol", description="Riesz polarization and energy toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, n_required=False):
        sp.add_argument("--domain", choices=("circle", "sphere", "ball", "segment"))
        sp.add_argument("--d", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--n", required=n_required)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--format", choices=("json", "csv", "svg", "text"))
        sp.add_argument("--output")
        sp.add_argument("--restarts", type=int)

    sp = sub.add_parser("polarize", help="max-min polarization or the inner minimum of a configuration")
    common(sp)
    sp.add_argument("--exact", action="store_true", help="closed-form circle value")
    sp.add_argument("--config", help="configuration JSON file; computes its inner minimum")
    sp = sub.add_parser("energy", help="minimal energy, or the energy of a configuration")
    common(sp)
    sp.add_argument("--config")
    sp = sub.add_parser("oracle", help="closed-form constants")
    common(sp)
    sp.add_argument("--what", choices=ORACLES, required=True)
    sp.add_argument("--kind", choices=("lower", "upper"))
    sp = sub.add_parser("sweep", help="table over a range of n")
    common(sp, n_required=True)
    sp.add_argument("--method", choices=("exact_circle", "optimizer"))
    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp)
    sp.add_argument("--suite", choices=SUITES + ("all",), required=True)
    sp = sub.add_parser("explore", help="normalized values against conjectured limits")
    common(sp, n_required=True)
    sp = sub.add_parser("net", help="maximal delta-net")
    common(sp)
    sp.add_argument("--delta", type=float, required=True)
    return parser


def parse_args(argv: Sequence[str]) -> RunSpec:
    """Parse and validate a command line into a RunSpec; raises UsageError."""
    ns = _build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    values = {k: v for k, v in vars(ns).items() if k in {f.name for f in fields(RunSpec)}}
    spec = RunSpec(**values)
    if spec.format is None:
        spec.format = _default_format(spec.command)
    _validate(spec)
    return spec


def _validate(spec: RunSpec) -> None:
    if spec.p is not None and not spec.p > 0:
        raise UsageError("--p: p must be positive")
    if spec.tol is not None and not spec.tol > 0:
        raise UsageError("--tol: tolerance must be positive")
    if spec.restarts is not None and spec.restarts < 1:
        raise UsageError("--restarts: must be at least 1")
    if spec.delta is not None and not spec.delta > 0:
        raise UsageError("--delta: delta must be positive")
    if spec.n is not None:
        spec.n_values  # raises on malformed ranges
    if spec.domain is not None:
        if spec.domain in ("sphere", "ball") and spec.d is None:
            raise UsageError(f"--d is required for --domain {spec.domain}")
        try:
            spec.domain_obj()
        except ValueError as exc:
            raise UsageError(f"--d: {exc}") from None
    cmd = spec.command
    needs = {
        "polarize": ("domain", "p"),
        "energy": ("domain", "p"),
        "sweep": ("domain", "p", "n"),
        "explore": ("domain", "p", "n"),
        "net": ("domain",),
    }.get(cmd, ())
    for name in needs:
        if getattr(spec, name) is None:
            raise UsageError(f"--{name} is required for {cmd}")
    if cmd in ("polarize", "energy") and spec.config is None and spec.n is None:
        raise UsageError(f"--n is required for {cmd} unless --config is given")
    if cmd in ("polarize", "energy") and spec.n is not None and len(spec.n_values) != 1:
        raise UsageError(f"--n: {cmd} takes a single n")
    if spec.exact and spec.domain != "circle":
        raise UsageError("--exact: closed form available on the circle only")
    if cmd in ("sweep", "explore") and spec.format not in ("csv", "json", "svg"):
        raise UsageError(f"--format: {cmd} writes csv, json or svg")
    if cmd in ("polarize", "energy", "verify", "net") and spec.format not in ("json",):
        raise UsageError(f"--format: {cmd} writes json")
    if cmd == "sweep" and spec.method == "exact_circle" and spec.domain != "circle":
        raise UsageError("--method: exact_circle needs --domain circle")


# ---------------------------------------------------------------------------
# running


def _emit(spec: RunSpec, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if spec.output:
        with open(spec.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str) -> Configuration:
    with open(path, encoding="utf-8") as fh:
        return Configuration.from_json(json.load(fh))


def _run_polarize(spec: RunSpec) -> int:
    if spec.config:
        cfg = _load_config(spec.config)
        res = inner_min(cfg, spec.p, spec.tol or 1e-9)
        _emit(spec, dumps(res))
        return EXIT_OK
    n = spec.n_values[0]
    if spec.exact:
        _emit(spec, dumps({"domain": spec.domain_obj(), "n": n, "p": spec.p, "value": equally_spaced_value(n, spec.p)}))
        return EXIT_OK
    opts = SolverOptions(seed=spec.seed)
    if spec.restarts:
        opts.restarts = spec.restarts
    if spec.tol:
        opts.inner_tol = spec.tol
    res = maximize_polarization(spec.domain_obj(), n, spec.p, opts)
    _emit(spec, dumps(res))
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def _run_energy(spec: RunSpec) -> int:
    if spec.config:
        cfg = _load_config(spec.config)
        _emit(spec, dumps({"config": cfg, "p": spec.p, "energy": energy(cfg, spec.p)}))
        return EXIT_OK
    opts = EnergyOptions(seed=spec.seed)
    if spec.restarts:
        opts.restarts = spec.restarts
    if spec.tol:
        opts.gtol = spec.tol
    res = minimize_energy(spec.domain_obj(), spec.n_values[0], spec.p, opts)
    _emit(spec, dumps(res))
    return EXIT_OK


def _oracle_value(spec: RunSpec):
    w = spec.what

    def need(*names):
        for name in names:
            if getattr(spec, name) is None:
                raise UsageError(f"--{name} is required for --what {w}")

    if w == "wiener":
        need("domain", "p")
        return C.wiener_constant(spec.domain_obj(), spec.p)
    if w == "tau":
        need("d")
        return C.tau(spec.d)
    if w == "zeta":
        need("p")
        return C.riemann_zeta(spec.p)
    if w == "epstein_hex":
        need("p")
        return C.epstein_zeta_hex(spec.p)
    if w == "cpd_lower":
        need("p", "d")
        return C.c_pd_lower(spec.p, spec.d)
    if w == "sigma_p1":
        need("p")
        return C.conjectured_sigma_p1(spec.p)
    if w == "bound":
        need("domain", "p", "n", "kind")
        b = C.polarization_bound(spec.domain_obj(), spec.p, spec.n_values[0], spec.kind)
        return {"value": b.value, "kind": b.kind, "source": b.source,
                "conjectural": b.conjectural, "asymptotic": b.asymptotic}
    if w == "equally_spaced":
        need("p", "n")
        return equally_spaced_value(spec.n_values[0], spec.p)
    need("p", "n")
    if spec.p != int(spec.p):
        raise UsageError("--p: chebyshev closed form needs an even integer p")
    return C.chebyshev_closed_form(spec.n_values[0], int(spec.p))


def _run_oracle(spec: RunSpec) -> int:
    val = _oracle_value(spec)
    if spec.format == "text":
        text = repr(val) if isinstance(val, float) else "\n".join(f"{k}: {v!r}" for k, v in val.items())
    else:
        text = dumps({"what": spec.what, "value": val})
    _emit(spec, text)
    return EXIT_OK


def _table_text(spec: RunSpec, table) -> str:
    if spec.format == "csv":
        return table.to_csv()
    if spec.format == "svg":
        return table.to_svg()
    return dumps(table)


def _run_sweep(spec: RunSpec) -> int:
    dom = spec.domain_obj()
    method = spec.method or ("exact_circle" if dom.kind == "circle" else "optimizer")
    opts = SolverOptions(seed=spec.seed, restarts=spec.restarts or SolverOptions.restarts)
    table = sweep(dom, spec.p, spec.n_values, method, opts)
    _emit(spec, _table_text(spec, table))
    if method == "optimizer" and any("unconverged" in r.flags for r in table.rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


def _run_explore(spec: RunSpec) -> int:
    opts = SolverOptions(seed=spec.seed, restarts=spec.restarts or SolverOptions.restarts)
    table = conjecture_explore(spec.domain_obj(), spec.p, spec.n_values, opts)
    _emit(spec, _table_text(spec, table))
    return EXIT_OK


def _run_verify(spec: RunSpec) -> int:
    names = SUITES if spec.suite == "all" else (spec.suite,)
    reports = [verify_suite(name, spec.seed) for name in names]
    _emit(spec, dumps(reports[0] if len(reports) == 1 else reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def _run_net(spec: RunSpec) -> int:
    net = maximal_delta_net(spec.domain_obj(), spec.delta, seed=spec.seed)
    _emit(spec, dumps(net))
    return EXIT_OK


_RUNNERS = {
    "polarize": _run_polarize,
    "energy": _run_energy,
    "oracle": _run_oracle,
    "sweep": _run_sweep,
    "verify": _run_verify,
    "explore": _run_explore,
    "net": _run_net,
}


def run(spec: RunSpec) -> int:
    """Execute a validated RunSpec and return the process exit code."""
    try:
        return _RUNNERS[spec.command](spec)
    except (UsageError, C.RieszDomainError, C.UnavailableConstantError) as exc:
        print(f"rieszpol: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"rieszpol: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        spec = parse_args(argv)
    except UsageError as exc:
        print(f"rieszpol: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(spec)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
