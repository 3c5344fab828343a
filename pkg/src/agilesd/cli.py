"""Command-line front end: ``agilesd run|sweep|trace``.

Configuration is a line-oriented ``key=value`` file; command-line flags and
trailing ``key=value`` tokens override it. Unset keys take the values of the
paper's experiment table (1 Gbps links, 1 ms / 4 ms delays, 1000-byte
packets, drop-tail, 100 s).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

from .cca import CONTROLLERS, AgileParams
from .experiments import (
    ScenarioKind,
    ScenarioSpec,
    run_scenario,
    sweep,
    write_metrics_csv,
)
from .netsim import write_trace_csv

OUTPUT_DIR_ENV = "AGILESD_OUTPUT_DIR"
SCALED_BANDWIDTH = 100_000_000
SCALED_DURATION = 10.0


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key."""


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none") else float(text)


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "none") else int(text)


def _list(conv):
    def parse(text: str):
        text = text.strip()
        if text.lower() in ("", "none"):
            return None
        return tuple(conv(x) for x in text.split(",") if x.strip())
    return parse


def _str_list(text: str):
    return _list(str.strip)(text)


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "single"
    cca: tuple = ("agile-sd",)
    n_flows: Optional[int] = None
    buffer: int = 500
    per: float = 0.0
    duration: float = 100.0
    stagger: Optional[float] = None
    access_delays: Optional[tuple] = None
    link_capacity: int = 1_000_000_000
    bottleneck_delay: float = 0.004
    lambda_max: float = 3.0
    beta1: float = 0.90
    beta2: float = 0.95
    initial_cwnd: int = 2
    timeout_ssthresh_fraction: float = 0.5
    warmup: float = 0.0
    throughput: str = "goodput"
    seed: int = 1
    output_dir: str = "results"
    trace_interval: Optional[float] = 0.01
    scaled: bool = False
    buffers: tuple = (5, 25, 100, 250, 500)
    pers: tuple = (0.0, 1e-5, 1e-4)
    ccas: tuple = ("agile-sd", "cubic", "newreno")
    workers: int = 1

    def agile_params(self) -> AgileParams:
        return AgileParams(
            lambda_max=self.lambda_max,
            beta1=self.beta1,
            beta2=self.beta2,
            initial_cwnd=self.initial_cwnd,
        )

    def scenario_spec(self) -> ScenarioSpec:
        """Effective scenario; scaled mode swaps in 100 Mbps links and 10 s runs."""
        bandwidth, duration = self.link_capacity, self.duration
        stagger = self.stagger
        if self.scaled:
            bandwidth = SCALED_BANDWIDTH
            if stagger is not None:
                stagger *= SCALED_DURATION / duration
            duration = SCALED_DURATION
        return ScenarioSpec(
            kind=ScenarioKind(self.scenario),
            ccas=self.cca,
            n_flows=self.n_flows,
            buffer=self.buffer,
            per=self.per,
            duration=duration,
            stagger=stagger,
            access_delays=self.access_delays,
            seed=self.seed,
            bandwidth=bandwidth,
            bottleneck_delay=self.bottleneck_delay,
            agile=self.agile_params(),
            timeout_ssthresh_fraction=self.timeout_ssthresh_fraction,
            warmup=self.warmup * (SCALED_DURATION / self.duration if self.scaled else 1.0),
            throughput_mode=self.throughput,
            trace_interval=self.trace_interval,
        )


_PARSERS = {
    "scenario": str.strip,
    "cca": lambda t: tuple(x.strip() for x in t.replace("+", ",").split(",") if x.strip()),
    "n_flows": _opt_int,
    "buffer": int,
    "per": float,
    "duration": float,
    "stagger": _opt_float,
    "access_delays": _list(float),
    "link_capacity": lambda t: int(float(t)),
    "bottleneck_delay": float,
    "lambda_max": float,
    "beta1": float,
    "beta2": float,
    "initial_cwnd": int,
    "timeout_ssthresh_fraction": float,
    "warmup": float,
    "throughput": str.strip,
    "seed": int,
    "output_dir": str.strip,
    "trace_interval": _opt_float,
    "scaled": _bool,
    "buffers": _list(int),
    "pers": _list(float),
    "ccas": _str_list,
    "workers": int,
}

assert set(_PARSERS) == {f.name for f in fields(RunConfig)}


def _validate(cfg: RunConfig) -> None:
    def bad(key, why):
        raise ConfigError(f"{key}: {why}")

    if cfg.scenario not in {k.value for k in ScenarioKind}:
        bad("scenario", f"unknown scenario {cfg.scenario!r}")
    for name in cfg.cca:
        if name not in CONTROLLERS:
            bad("cca", f"unknown controller {name!r} (choose from {', '.join(sorted(CONTROLLERS))})")
    for entry in cfg.ccas or ():
        for name in entry.split("+"):
            if name not in CONTROLLERS:
                bad("ccas", f"unknown controller {name!r}")
    if cfg.n_flows is not None and cfg.n_flows < 1:
        bad("n_flows", "must be >= 1")
    if cfg.buffer < 1:
        bad("buffer", "must be >= 1 packet")
    if not 0.0 <= cfg.per <= 1.0:
        bad("per", f"must lie in [0, 1], got {cfg.per}")
    if cfg.duration <= 0:
        bad("duration", "must be positive")
    if cfg.link_capacity <= 0:
        bad("link_capacity", "must be positive")
    if cfg.bottleneck_delay < 0:
        bad("bottleneck_delay", "must be non-negative")
    if cfg.access_delays is not None and any(d < 0 for d in cfg.access_delays):
        bad("access_delays", "must be non-negative")
    if not 0.0 < cfg.beta1 < 1.0:
        bad("beta1", "must lie in (0, 1)")
    if not 0.0 < cfg.beta2 < 1.0:
        bad("beta2", "must lie in (0, 1)")
    if cfg.beta1 > cfg.beta2:
        bad("beta1", f"must not exceed beta2 ({cfg.beta1} > {cfg.beta2})")
    if cfg.lambda_max < 1.0:
        bad("lambda_max", "must be >= 1")
    if cfg.initial_cwnd < 1:
        bad("initial_cwnd", "must be >= 1")
    if not 0.0 < cfg.timeout_ssthresh_fraction <= 1.0:
        bad("timeout_ssthresh_fraction", "must lie in (0, 1]")
    if not 0.0 <= cfg.warmup < cfg.duration:
        bad("warmup", "must lie in [0, duration)")
    if cfg.throughput not in ("goodput", "raw"):
        bad("throughput", "must be 'goodput' or 'raw'")
    if cfg.trace_interval is not None and cfg.trace_interval <= 0:
        bad("trace_interval", "must be positive or none")
    if cfg.buffers is not None and any(b < 1 for b in cfg.buffers):
        bad("buffers", "every buffer must be >= 1")
    if cfg.pers is not None and any(not 0.0 <= p <= 1.0 for p in cfg.pers):
        bad("pers", "every PER must lie in [0, 1]")
    if cfg.workers < 1:
        bad("workers", "must be >= 1")
    try:
        cfg.scenario_spec()
    except ValueError as exc:
        raise ConfigError(f"scenario: {exc}") from None


def parse_pairs(lines: Sequence[str], origin: str = "<config>") -> dict:
    """Parse ``key=value`` lines (``#`` comments, blank lines allowed) into raw strings."""
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for token in line.split():
            if "=" not in token:
                raise ConfigError(f"{origin}:{lineno}: expected key=value, got {token!r}")
            key, value = token.split("=", 1)
            key = key.strip().replace("-", "_")
            if key not in _PARSERS:
                raise ConfigError(f"{key}: unknown key")
            out[key] = value
    return out


def parse_config(
    path: Optional[os.PathLike] = None,
    overrides: Optional[dict] = None,
    text: Optional[str] = None,
) -> RunConfig:
    """Build a validated ``RunConfig`` from a file (or text) plus overrides.

    ``overrides`` maps keys to raw strings or typed values and wins over the
    file. Unknown keys and out-of-range values raise ``ConfigError``.
    """
    raw: dict = {}
    if path is not None:
        raw.update(parse_pairs(Path(path).read_text().splitlines(), str(path)))
    if text is not None:
        raw.update(parse_pairs(text.splitlines()))
    values = {}
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        values["output_dir"] = env_dir
    for key, value in list(raw.items()) + list((overrides or {}).items()):
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise ConfigError(f"{key}: unknown key")
        if isinstance(value, str):
            try:
                value = _PARSERS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        values[key] = value
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def emit_config(cfg: RunConfig) -> str:
    """Render every key of ``cfg``; ``parse_config(text=emit_config(c)) == c``."""
    return "".join(f"{f.name}={_fmt(getattr(cfg, f.name))}\n" for f in fields(RunConfig))


# --------------------------------------------------------------------------
# Commands


def _summary(rep) -> str:
    spec = rep.spec
    return (
        f"scenario={spec.kind.value} cca={'+'.join(spec.ccas)} buffer={spec.buffer} "
        f"per={spec.per:g} seed={spec.seed} throughput_mbps={rep.aggregate_throughput / 1e6:.3f} "
        f"utilization={rep.utilization:.4f} loss_ratio={rep.loss_ratio:.6f} jfi={rep.jfi:.4f}"
    )


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    return out


def _stem(spec: ScenarioSpec) -> str:
    return f"{spec.kind.value}_{'+'.join(spec.ccas)}_b{spec.buffer}_per{spec.per:g}"


def cmd_run(cfg: RunConfig, with_trace: bool = False) -> int:
    out = _outdir(cfg)
    spec = cfg.scenario_spec()
    if not with_trace:
        spec = replace(spec, trace_interval=None)
    rep = run_scenario(spec)
    stem = _stem(spec)
    with open(out / f"metrics_{stem}.csv", "w", newline="") as fh:
        write_metrics_csv([rep], fh)
    if with_trace:
        with open(out / f"trace_{stem}.csv", "w", newline="") as fh:
            write_trace_csv(rep.result.trace, fh)
    print(_summary(rep))
    return 0


def cmd_trace(cfg: RunConfig) -> int:
    return cmd_run(cfg, with_trace=True)


def cmd_sweep(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    base = replace(cfg.scenario_spec(), trace_interval=None)
    reports = sweep(base, cfg.buffers, cfg.pers, cfg.ccas, workers=cfg.workers)
    with open(out / f"sweep_{base.kind.value}.csv", "w", newline="") as fh:
        write_metrics_csv(reports, fh)
    for rep in reports:
        print(_summary(rep))
    return 0


# flags that mirror config keys; (flag, key, help)
_FLAGS = [
    ("--config", None, "key=value configuration file"),
    ("--scenario", "scenario", "single | sequential | synchronous | inter-fairness | rtt-fairness"),
    ("--cca", "cca", "controller name, or names joined by '+' / ','"),
    ("--n-flows", "n_flows", "number of sender/receiver pairs"),
    ("--buffer", "buffer", "drop-tail buffer size in packets"),
    ("--per", "per", "packet error rate on the bottleneck"),
    ("--duration", "duration", "simulation time in seconds"),
    ("--stagger", "stagger", "start/stop offset between sequential flows (s)"),
    ("--access-delays", "access_delays", "comma-separated per-flow access delays (s)"),
    ("--link-capacity", "link_capacity", "capacity of every link (bit/s)"),
    ("--bottleneck-delay", "bottleneck_delay", "router-to-router delay (s)"),
    ("--lambda-max", "lambda_max", "Agile-SD maximum agility factor"),
    ("--beta1", "beta1", "Agile-SD decrease factor for slow-start losses"),
    ("--beta2", "beta2", "Agile-SD decrease factor for congestion-avoidance losses"),
    ("--initial-cwnd", "initial_cwnd", "initial window in segments"),
    ("--timeout-ssthresh-fraction", "timeout_ssthresh_fraction", "ssthresh = cwnd * f after a timeout"),
    ("--warmup", "warmup", "seconds excluded from throughput averages"),
    ("--throughput", "throughput", "goodput | raw"),
    ("--seed", "seed", "master random seed"),
    ("--output-dir", "output_dir", f"artifact directory (default ${OUTPUT_DIR_ENV} or ./results)"),
    ("--trace-interval", "trace_interval", "cwnd sampling period in seconds, or none"),
    ("--buffers", "buffers", "sweep: comma-separated buffer sizes"),
    ("--pers", "pers", "sweep: comma-separated packet error rates"),
    ("--ccas", "ccas", "sweep: comma-separated controllers ('a+b' for a mixed pair)"),
    ("--workers", "workers", "sweep: parallel worker processes"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agilesd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run one scenario and write its metrics CSV"),
        ("sweep", "run buffers x PERs x controllers and write one CSV"),
        ("trace", "run one scenario and also write its cwnd trace CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        for flag, key, h in _FLAGS:
            p.add_argument(flag, dest=key or "config", default=None, help=h)
        p.add_argument("--scaled", action="store_true", default=None,
                       help="100 Mbps / 10 s variant for quick checks")
        p.add_argument("overrides", nargs="*", metavar="key=value", help="extra config overrides")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = parse_pairs(args.overrides, "<args>")
        for _, key, _ in _FLAGS:
            if key is not None and getattr(args, key) is not None:
                overrides[key] = getattr(args, key)
        if args.scaled:
            overrides["scaled"] = True
        cfg = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"agilesd: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"agilesd: {exc}", file=sys.stderr)
        return 2
    command = {"run": cmd_run, "sweep": cmd_sweep, "trace": cmd_trace}[args.command]
    try:
        return command(cfg)
    except OSError as exc:
        print(f"agilesd: {exc}", file=sys.stderr)
        return 1
    except (ValueError, AssertionError) as exc:
        print(f"agilesd: simulation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
