"""Command-line front end.

    alladi sum --set beatty:pi --limit 1e7 --checkpoints 10,100,...,1e7
    alladi sato-tate --curve -1,1 --interval pi/3,2*pi/3 --limit 1e6
    alladi verify --limit 1e4
    alladi diagnostics --set ap:4:1 --limit 1e6 --checkpoints 1e3,1e4,1e5

Every flag may also come from a JSON file passed with --config; flags given
on the command line win.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, Decimal
from pathlib import Path

from .elliptic import Curve
from .errors import AlladiError, CheckFailure, ConfigError
from .numfield import NumberField, load_field
from .primesets import PrimeSet, density, parse_interval, parse_set
from .sums import (SumTrace, density_diagnostics, duality_sweep, partial_sum,
                   q_sum)

EXIT_OK = 0


def parse_count(text) -> int:
    """'1e6' or '1000000' -> 1000000; rejects non-integers."""
    if isinstance(text, int):
        return text
    s = str(text).strip().replace("_", "")
    try:
        v = int(s)
    except ValueError:
        try:
            d = Decimal(s)
        except Exception:
            raise ConfigError(f"not a number: {text!r}") from None
        if d != d.to_integral_value():
            raise ConfigError(f"not an integer: {text!r}") from None
        v = int(d)
    return v


def parse_checkpoints(text) -> list[int]:
    """Comma list; '...' continues the ratio of the two preceding entries."""
    if text is None:
        return []
    if isinstance(text, list):
        text = ",".join(str(t) for t in text)
    toks = [t.strip() for t in str(text).split(",") if t.strip()]
    out = []
    for i, t in enumerate(toks):
        if t != "...":
            out.append(parse_count(t))
            continue
        if len(out) < 2 or i + 1 >= len(toks):
            raise ConfigError("'...' needs two entries before it and one after")
        a, b = out[-2], out[-1]
        end = parse_count(toks[i + 1])
        if b <= a or b % a:
            raise ConfigError("'...' needs an integer ratio > 1")
        r = b // a
        v = b * r
        while v < end:
            out.append(v)
            v *= r
    return sorted(set(out))


def parse_curve(text: str, cm: bool = False) -> Curve:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"--curve expects A,B (integers), got {text!r}") from None
    return Curve(a, b, cm)


@dataclass
class ExperimentConfig:
    field: NumberField
    prime_set: PrimeSet | None
    limit: int
    checkpoints: list = field(default_factory=list)
    out: str | None = None
    workers: int = 1
    fmt: str = "table"
    curve: Curve | None = None
    interval: tuple | None = None
    set_text: str = ""

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.limit < 2:
            raise ConfigError("--limit must be >= 2")
        if any(c < 2 or c > self.limit for c in self.checkpoints):
            raise ConfigError(f"checkpoints must lie in [2, {self.limit}]")


_DEFAULTS = {
    "sum": {"set": "all", "limit": "1e4"},
    "sato-tate": {"curve": "-1,1", "interval": "pi/3,2*pi/3", "limit": "1e6",
                  "bad_primes": "count"},
    "verify": {"limit": "1e4"},
    "diagnostics": {"set": "all", "limit": "1e5"},
}


def _merged(args) -> dict:
    opts = dict(_DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in data.items()})
    for k, v in vars(args).items():
        if v is not None and k not in ("command", "config", "func"):
            opts[k] = v
    return opts


def build_config(args) -> ExperimentConfig:
    o = _merged(args)
    K = load_field(o["field"]) if o.get("field") else NumberField.rationals()
    curve = parse_curve(o["curve"], bool(o.get("cm"))) if o.get("curve") else None
    interval = parse_interval(o["interval"]) if o.get("interval") else None
    workers = int(o.get("workers") or 1)
    S = None
    if o.get("set"):
        S = parse_set(o["set"], curve, interval, workers,
                      o.get("bad_primes") or "exclude")
    limit = parse_count(o["limit"])
    cps = parse_checkpoints(o.get("checkpoints"))
    return ExperimentConfig(K, S, limit, cps, o.get("out"), workers,
                            o.get("format") or "table", curve, interval,
                            o.get("set") or "")


def _trunc5(v: float) -> str:
    return str(Decimal(repr(v)).quantize(Decimal("0.00001"), rounding=ROUND_DOWN)) + "..."


def render_table(trace: SumTrace, delta, title: str) -> str:
    w = max(len(f"{c.x}") for c in trace.checkpoints)
    w = max(w, 3)
    lines = [title, f"  {'X':>{w}} | S(X)", "  " + "-" * (w + 1) + "+" + "-" * 14]
    for c in trace.checkpoints:
        lines.append(f"  {c.x:>{w}} | {_trunc5(c.value)}")
    lines.append("  " + "=" * (w + 1) + "+" + "=" * 14)
    tail = _trunc5(delta) if delta is not None else "unknown"
    lines.append(f"  {'∞':>{w}} | {tail}")
    lines.append(f"  max summation error bound: {trace.error_bound:.1e}")
    return "\n".join(lines)


def _emit(cfg: ExperimentConfig, trace: SumTrace, delta, title):
    csv_text = trace.to_csv()
    if cfg.out:
        Path(cfg.out).write_text(csv_text)
    if cfg.fmt == "csv":
        sys.stdout.write(csv_text)
    else:
        print(render_table(trace, delta, title))


def cmd_sum(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    trace = partial_sum(cfg.field, cfg.prime_set, cfg.limit, cfg.checkpoints,
                        workers=cfg.workers)
    delta = density(cfg.prime_set, cfg.field)
    title = f"K = {cfg.field}, S = {cfg.set_text}, X <= {cfg.limit}"
    _emit(cfg, trace, delta, title)
    if cfg.fmt != "csv":
        print(f"  elapsed: {time.perf_counter() - t0:.1f}s")
    return EXIT_OK


def cmd_sato_tate(cfg: ExperimentConfig) -> int:
    S = cfg.prime_set
    trace = partial_sum(cfg.field, S, cfg.limit, cfg.checkpoints, workers=cfg.workers)
    lo, hi = S.lo, S.hi
    title = (f"E: {S.curve}, theta_p in [{lo:.5f}, {hi:.5f}], "
             f"bad primes: {S.bad_primes}")
    _emit(cfg, trace, S.density, title)
    if cfg.fmt != "csv":
        m = S.density
        print(f"  Sato-Tate measure: {m:.5f}" if m is not None
              else "  Sato-Tate measure: n/a (CM curve)")
    return EXIT_OK


def cmd_diagnostics(cfg: ExperimentConfig) -> int:
    d = density_diagnostics(cfg.field, cfg.prime_set, cfg.limit, cfg.checkpoints)
    text = d.to_csv()
    if cfg.out:
        Path(cfg.out).write_text(text)
    sys.stdout.write(text)
    if cfg.fmt != "csv":
        print(f"# delta = {d.density:.6f}; {d.notes}")
    return EXIT_OK


def _corrupted_mu(b):
    # negative control: wrong sign on every ideal of norm 6
    return -b.mu if b.norm == 6 else b.mu


def cmd_verify(cfg: ExperimentConfig, corrupt: bool = False) -> int:
    Q = NumberField.rationals()
    mu = _corrupted_mu if corrupt else None
    texts = [cfg.set_text] if cfg.prime_set is not None else ["all", "ap:4:1", "finite:2,5"]
    sets = [(t, cfg.prime_set if cfg.prime_set is not None else parse_set(t)) for t in texts]
    other = cfg.field if cfg.field.degree > 1 else NumberField.gaussian()
    X = cfg.limit
    results = []

    def check(name, ok, detail=""):
        results.append(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))

    for name, S in sets:
        bad = duality_sweep(Q, S, X, mu)
        check(f"duality over Q, S={name}, N <= {X}", not bad,
              f"{len(bad)} violations" if bad else "")
        Y = min(X, 2000)
        bad = duality_sweep(other, S, Y, mu)
        check(f"duality over {other}, S={name}, N <= {Y}", not bad,
              f"{len(bad)} violations" if bad else "")
    for name, S in sets:
        a = q_sum(Q, S, X, "enumerate")
        b = q_sum(Q, S, X, "smooth")
        c = q_sum(Q, S, X, "sieve")
        check(f"q_sum three-way consistency over Q, S={name}, X={X}",
              a == b == c, f"{a}, {b}, {c}")
    for name, S in sets:
        if S.density is None:
            continue
        grid = sorted({g for g in (10, 100, 1000, 10 ** 4, 10 ** 5, X) if 2 <= g <= X})
        d = density_diagnostics(Q, S, X, grid)
        es = [r.e_s for r in d.rows]
        vs = [r.v_s_proxy for r in d.rows]
        ok = (all(a <= b for a, b in zip(es, es[1:]))
              and all(a >= b for a, b in zip(vs, vs[1:])))
        check(f"e_S nondecreasing / v_S proxy nonincreasing, S={name}", ok)
    failed = results.count(False)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if failed:
        raise CheckFailure(f"{failed} check(s) failed")
    return EXIT_OK


def _add_common(p, *, need_set=True):
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    if need_set:
        p.add_argument("--set", help="prime set expression, e.g. beatty:pi")
    p.add_argument("--field", help="field description file (default: Q)")
    p.add_argument("--limit", help="largest norm X (accepts 1e6)")
    p.add_argument("--checkpoints", help="comma list, '...' extends a ratio")
    p.add_argument("--curve", help="A,B for y^2 = x^3 + Ax + B")
    p.add_argument("--cm", action="store_const", const=True, default=None,
                   help="declare the curve to have CM")
    p.add_argument("--interval", help="Sato-Tate interval, e.g. pi/3,2*pi/3")
    p.add_argument("--bad-primes", dest="bad_primes", choices=("exclude", "count"))
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="write the CSV trace here")
    p.add_argument("--format", choices=("csv", "table"))


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alladi", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("sum", help="partial sums -sum mu(a)/N(a) over D(K,S)"))
    st = sub.add_parser("sato-tate", help="partial sums for a Sato-Tate interval")
    _add_common(st, need_set=False)
    v = sub.add_parser("verify", help="duality, q_sum consistency, diagnostics")
    _add_common(v)
    v.add_argument("--corrupt-mu", action="store_true",
                   help="negative control: flip mu on norm-6 ideals")
    _add_common(sub.add_parser("diagnostics", help="pi_S, e_S, v_S on a grid"))
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "sato-tate":
            args.set = None
            cfg = build_config(args)
            if cfg.curve is None:
                raise ConfigError("sato-tate needs --curve")
            cfg.prime_set = parse_set(
                "sato-tate", cfg.curve, cfg.interval, cfg.workers,
                _merged(args).get("bad_primes") or "count")
            return cmd_sato_tate(cfg)
        cfg = build_config(args)
        if args.command == "sum":
            return cmd_sum(cfg)
        if args.command == "diagnostics":
            return cmd_diagnostics(cfg)
        return cmd_verify(cfg, corrupt=args.corrupt_mu)
    except AlladiError as exc:
        sys.stdout.flush()
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
