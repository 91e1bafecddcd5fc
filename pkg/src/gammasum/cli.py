"""Command-line front end: ``gammasum verify | table | sample``."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from . import identities as ids
from . import sampling
from .exceptions import DomainError, GammasumError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

REPORT_FIELDS = ("identity", "params", "lhs", "rhs", "abs_err", "rel_err", "tol", "passed", "note")
TABLE_FIELDS = ("b", "c", "lhs_series", "rhs_closed_form", "rel_err")
GRID_FIELDS = ("a", "b", "c", "n", "s", "lambda")
# flag name -> grid field
_FLAG_FIELD = {"a": "a", "b": "b", "c": "c", "n_order": "n", "s": "s", "lam": "lambda"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    identities: List[str] = field(default_factory=list)
    grid: Dict[str, List[float]] = field(default_factory=dict)
    tol: Dict[str, float] = field(default_factory=dict)
    tol_all: Optional[float] = None
    seed: int = 42
    n: int = 1_000_000
    fmt: str = "human"
    out: Optional[str] = None


# ---------------------------------------------------------------------------
# Number formatting
# ---------------------------------------------------------------------------

def fmt_num(x) -> str:
    """17 significant digits; non-finite values as ``inf``, ``-inf``, ``nan``."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _json_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, float)):
        s = fmt_num(v)
        # JSON has no non-finite literals; keep them as strings
        return json.dumps(s) if s in ("inf", "-inf", "nan") else s
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _parse_number(v):
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    return v


def to_json(rows: Sequence[dict]) -> str:
    if not rows:
        return "[]\n"
    return "[\n" + ",\n".join("  " + _json_value(r) for r in rows) + "\n]\n"


def reports_from_json(text: str) -> List[ids.VerificationReport]:
    out = []
    for d in json.loads(text):
        d = {k: _parse_number(v) for k, v in d.items()}
        out.append(ids.VerificationReport.from_dict(d))
    return out


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        cells = []
        for col in columns:
            v = r[col]
            if isinstance(v, dict):
                cells.append(_json_value(v))
            elif isinstance(v, str):
                cells.append(v)
            else:
                cells.append(fmt_num(v))
        w.writerow(cells)
    return buf.getvalue()


def reports_from_csv(text: str) -> List[ids.VerificationReport]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(ids.VerificationReport(
            row["identity"], json.loads(row["params"]),
            *(float(row[k]) for k in ("lhs", "rhs", "abs_err", "rel_err", "tol")),
            row["passed"] == "true", row["note"]))
    return out


def _human_reports(reports: Sequence[ids.VerificationReport]) -> str:
    lines = []
    for r in reports:
        p = " ".join(f"{k}={fmt_num(v)}" for k, v in r.params.items())
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.identity} [{p}] lhs={fmt_num(r.lhs)} rhs={fmt_num(r.rhs)} "
                     f"abs_err={fmt_num(r.abs_err)} rel_err={fmt_num(r.rel_err)} "
                     f"tol={fmt_num(r.tol)} :: {r.note}")
    n_pass = sum(r.passed for r in reports)
    lines.append(f"{n_pass}/{len(reports)} reports passed; suite "
                 f"{'PASSED' if ids.suite_passed(reports) else 'FAILED'}")
    return "\n".join(lines) + "\n"


def _human_table(rows: Sequence[dict]) -> str:
    lines = ["  ".join(f"{c:>24}" for c in TABLE_FIELDS)]
    for r in rows:
        lines.append("  ".join(f"{fmt_num(r[c]):>24}" for c in TABLE_FIELDS))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------

def load_default_suite() -> dict:
    text = resources.files("gammasum").joinpath("data/default_suite.json").read_text()
    return json.loads(text)


def _num_list(value, name: str, integer: bool = False) -> List[float]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        items = [value]
    elif isinstance(value, str):
        items = [t for t in value.split(",") if t.strip()]
    elif isinstance(value, list):
        items = value
    else:
        raise UsageError(f"{name}: expected a number or list, got {value!r}")
    out = []
    for t in items:
        try:
            v = float(t)
        except (TypeError, ValueError):
            raise UsageError(f"{name}: not a number: {t!r}") from None
        if not math.isfinite(v):
            raise UsageError(f"{name}: must be finite, got {t!r}")
        if integer:
            if v != int(v):
                raise UsageError(f"{name}: expected integers, got {t!r}")
            v = int(v)
        out.append(v)
    if not out:
        raise UsageError(f"{name}: empty list")
    return out


def _parse_tol(value, cfg: RunConfig) -> None:
    if isinstance(value, dict):
        items = list(value.items())
    elif isinstance(value, (int, float)):
        items = [(None, value)]
    else:
        items = []
        for part in str(value).split(","):
            key, _, val = part.rpartition("=")
            items.append((key.strip() or None, val))
    for key, val in items:
        try:
            v = float(val)
        except (TypeError, ValueError):
            raise UsageError(f"tol: not a number: {val!r}") from None
        if not v > 0 or not math.isfinite(v):
            raise UsageError(f"tol must be > 0, got {val!r}")
        if key is None:
            cfg.tol_all = v
        elif key not in ids.IDENTITIES:
            raise UsageError(f"tol: unknown identity {key!r}")
        else:
            cfg.tol[key] = v


def _apply(cfg: RunConfig, key: str, value) -> None:
    if value is None:
        return
    if key == "identity":
        names = value if isinstance(value, list) else [t.strip() for t in str(value).split(",") if t.strip()]
        for name in names:
            if name not in ids.IDENTITIES:
                raise UsageError(f"unknown identity {name!r}; choose from {', '.join(sorted(ids.IDENTITIES))}")
        if not names:
            raise UsageError("identity: empty list")
        cfg.identities = list(names)
    elif key in GRID_FIELDS:
        cfg.grid[key] = _num_list(value, key, integer=(key == "n"))
    elif key == "tol":
        _parse_tol(value, cfg)
    elif key == "seed":
        try:
            cfg.seed = sampling.parse_seed(value)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    elif key == "n_samples":
        try:
            cfg.n = int(value)
        except (TypeError, ValueError):
            raise UsageError(f"n: not an integer: {value!r}") from None
        if cfg.n < sampling.MIN_SAMPLES:
            raise UsageError(f"n must be >= {sampling.MIN_SAMPLES}, got {cfg.n}")
    elif key == "format":
        if value not in ("human", "json", "csv"):
            raise UsageError(f"format must be human, json or csv, got {value!r}")
        cfg.fmt = value
    elif key == "out":
        cfg.out = str(value)
    else:
        raise UsageError(f"unknown config key {key!r}")


# config-file keys -> internal keys; "n" in a config file is the sample count
# like --n, while grid orders use "n_order"
_FILE_KEYS = {"identity": "identity", "a": "a", "b": "b", "c": "c", "n_order": "n", "s": "s",
              "lambda": "lambda", "tol": "tol", "seed": "seed", "n": "n_samples",
              "format": "format", "out": "out"}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            if key not in _FILE_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            _apply(cfg, _FILE_KEYS[key], value)
    for flag, name in _FLAG_FIELD.items():
        _apply(cfg, name, getattr(args, flag))
    _apply(cfg, "identity", args.identity)
    _apply(cfg, "tol", args.tol)
    _apply(cfg, "seed", args.seed)
    _apply(cfg, "n_samples", args.n)
    _apply(cfg, "format", args.format)
    _apply(cfg, "out", args.out)
    return cfg


def _expand(group: dict) -> List[dict]:
    keys = [k for k in group if k != "identity"]
    return [dict(zip(keys, combo)) for combo in itertools.product(*(group[k] for k in keys))]


def resolve_points(cfg: RunConfig, suite: dict) -> List[Tuple[str, dict]]:
    """Turn the config into ``(identity, params)`` points.

    With no grid values the checked-in suite is used (filtered by identity).
    Otherwise each selected identity gets the Cartesian product of the given
    values, with unspecified fields taken from the suite's per-identity defaults.
    Without an identity filter, the identities that use any given field are selected.
    """
    if not cfg.grid:
        points = [(g["identity"], p) for g in suite["suite"] for p in _expand(g)
                  if not cfg.identities or g["identity"] in cfg.identities]
    else:
        selected = cfg.identities or [name for name, spec in ids.IDENTITIES.items()
                                      if any(f in cfg.grid for f in spec.fields)]
        points = []
        for name in selected:
            fields = ids.IDENTITIES[name].fields
            defaults = suite["defaults"][name]
            group = {f: cfg.grid.get(f, [defaults[f]]) for f in fields}
            points.extend((name, p) for p in _expand(group))
    if not points:
        raise UsageError("empty grid: nothing to verify")
    for name, p in points:
        try:
            ids.validate_point(name, p)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    return points


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        try:
            with open(cfg.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.out}: {exc}") from None
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> int:
    suite = load_default_suite()
    points = resolve_points(cfg, suite)
    tol = dict(cfg.tol)
    if cfg.tol_all is not None:
        for name, _ in points:
            tol.setdefault(name, cfg.tol_all)
    ctx = ids.SuiteContext(seed=cfg.seed, n_mc=cfg.n, tol=tol)
    reports = ids.run_suite(points, ctx)
    rows = [r.to_dict() for r in reports]
    if cfg.fmt == "json":
        text = to_json(rows)
    elif cfg.fmt == "csv":
        text = to_csv(rows, REPORT_FIELDS)
    else:
        text = _human_reports(reports)
    _emit(text, cfg)
    return EXIT_OK if ids.suite_passed(reports) else EXIT_FAIL


def table_rows(bs: Sequence[float], cs: Sequence[float]) -> List[dict]:
    rows = []
    for b in bs:
        for c in cs:
            series = ids.theorem2_lhs_series(b, c).value
            closed = ids.theorem2_closed_form(b, c)
            rows.append({"b": float(b), "c": float(c), "lhs_series": series,
                         "rhs_closed_form": closed, "rel_err": abs(series - closed) / abs(closed)})
    return rows


def cmd_table(cfg: RunConfig) -> int:
    extra = set(cfg.grid) - {"b", "c"}
    if extra:
        raise UsageError(f"table takes only --b and --c, got {sorted(extra)}")
    defaults = next(g for g in load_default_suite()["suite"] if g["identity"] == "thm2")
    bs = cfg.grid.get("b", defaults["b"])
    cs = cfg.grid.get("c", defaults["c"])
    for b in bs:
        for c in cs:
            try:
                ids.validate_point("thm2", {"b": b, "c": c})
            except DomainError as exc:
                raise UsageError(str(exc)) from None
    rows = table_rows(bs, cs)
    tol = cfg.tol.get("thm2", cfg.tol_all or ids.IDENTITIES["thm2"].tol)
    if cfg.fmt == "json":
        text = to_json(rows)
    elif cfg.fmt == "csv":
        text = to_csv(rows, TABLE_FIELDS)
    else:
        text = _human_table(rows)
    _emit(text, cfg)
    return EXIT_OK if all(r["rel_err"] <= tol for r in rows) else EXIT_FAIL


def cmd_sample(cfg: RunConfig) -> int:
    """Monte Carlo cross-checks: the exponential estimator when ``a, b, c`` are
    given, the mixture estimator when ``lambda`` is given."""
    extra = set(cfg.grid) - {"a", "b", "c", "lambda"}
    if extra:
        raise UsageError(f"sample takes --a, --b, --c, --lambda; got {sorted(extra)}")
    single = {}
    for k, v in cfg.grid.items():
        if len(v) != 1:
            raise UsageError(f"sample takes a single value for {k}")
        single[k] = v[0]
    points = []
    if "lambda" in single:
        p = {"a": single.get("a", 0.5), "b": single.get("b", 1.0), "lambda": single["lambda"]}
        points.append(("mixture_mc", p))
    if "c" in single or "lambda" not in single:
        p = {"a": single.get("a", 1.0), "b": single.get("b", 1.0), "c": single.get("c", 2.0)}
        points.append(("thm1_expectation", p))
    for name, p in points:
        try:
            ids.validate_point(name, p)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    lines = []
    ok = True
    for name, p in points:
        if name == "thm1_expectation":
            if ids.classify_convergence(p["a"], p["c"]) is ids.Convergence.DIVERGENT:
                raise UsageError("the expectation is infinite for a = 1, c = 1")
            est = ids.theorem1_rhs_expectation(ids.Params(p["a"], p["b"], p["c"]), cfg.n, cfg.seed)
            target = ids.theorem1_rhs_integral(ids.Params(p["a"], p["b"], p["c"]))
            label = "sqrt(pi/b) E[1{xi>=sqrt(1-a)}/(c xi^2+ac-1)]"
        else:
            est = sampling.mc_mixture_expectation(p["a"], p["b"], sampling.MixtureSpec(p["lambda"]),
                                                  cfg.n, cfg.seed)
            target = ids.mixture_expectation_by_conditioning(p["a"], p["b"], p["lambda"])
            label = "E[exp(a X^2/2 - 2b/X^2)]"
        passed = abs(est.mean - target.value) <= ids.MC_SIGMAS * est.std_error + target.est_abs_error
        ok = ok and passed
        params = " ".join(f"{k}={fmt_num(v)}" for k, v in p.items())
        lines.append(f"{'PASS' if passed else 'FAIL'} {name} [{params}] {label}\n"
                     f"  estimate   = {fmt_num(est.mean)} +/- {fmt_num(est.std_error)} (1 SE)\n"
                     f"  quadrature = {fmt_num(target.value)}\n"
                     f"  z          = {est.z_score(target.value):+.4f} (pass if |z| <= {ids.MC_SIGMAS:g})\n"
                     f"  n={est.n_samples} seed={est.seed}")
    _emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "table": cmd_table, "sample": cmd_sample}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gammasum", description=(
        "Verify series and integral identities for the upper incomplete Gamma function."))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "verify": "run identity checks over a parameter grid (default: the full built-in suite)",
        "table": "tabulate the order-derivative series against its Si/Ci closed form over (b, c)",
        "sample": "Monte Carlo estimate vs quadrature, pass/fail at 4 standard errors",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--identity", help="comma-separated identity ids: " + ", ".join(ids.IDENTITIES))
        p.add_argument("--a", help="comma-separated values of a")
        p.add_argument("--b", help="comma-separated values of b")
        p.add_argument("--c", help="comma-separated values of c")
        p.add_argument("--n-order", dest="n_order", help="comma-separated integer orders n")
        p.add_argument("--s", help="comma-separated values of s")
        p.add_argument("--lambda", dest="lam", help="comma-separated Beta(1, lambda) shapes")
        p.add_argument("--tol", help="tolerance override: VALUE or id=VALUE[,id=VALUE...]")
        p.add_argument("--seed", help="64-bit seed, decimal or 0x hex (default 42)")
        p.add_argument("--n", help="Monte Carlo sample count (default 1000000, minimum 1000)")
        p.add_argument("--format", help="human (default), json or csv")
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument("--config", help="JSON file with the same field names; flags win")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"gammasum: usage error: {exc}\n")
        return EXIT_USAGE
    except GammasumError as exc:
        sys.stderr.write(f"gammasum: error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
