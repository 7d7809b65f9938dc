"""rackmsr command line: build, verify, repair, report.

Exit codes: 0 success, 1 property failure, 2 config or validation error,
3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _backend
from .codes import CodeError, RackCode, build
from .gf import FieldError, field_from_json
from .identities import run_all
from .lambdas import LambdaError, LambdaExhausted, LambdaSet, explicit_lambdas, search_field, search_lambdas, verify_lambdas
from .matrix import MatrixError
from .params import ParamError, field_threshold, params_from_json
from .repair import RepairError, plan, repair

BUNDLE_MAGIC = "RACKMSR-BUNDLE"
BUNDLE_VERSION = 1

EXIT_OK, EXIT_PROPERTY, EXIT_INVALID, EXIT_EXHAUSTED = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


# build

def construct(config: dict) -> tuple[RackCode, dict]:
    """Field, coefficients and code from a run config."""
    if "params" not in config:
        raise ConfigError("config needs a params block")
    params = params_from_json(config["params"])
    lam_cfg = config.get("lambdas", {"mode": "explicit"})
    mode = lam_cfg.get("mode", "explicit")
    strategy = lam_cfg.get("strategy", "greedy")
    seed = int(lam_cfg.get("seed", 0))
    tries = int(lam_cfg.get("max_tries", 20000))
    fspec = config.get("field", "search")
    notes = {}
    if fspec == "search":
        field, lset = search_field(params, strategy, seed, tries)
        notes["field_searched"] = True
    else:
        field = field_from_json(fspec)
        if mode == "explicit":
            try:
                lset = explicit_lambdas(params, field)
            except LambdaError as exc:
                if not lam_cfg.get("fallback", True) or isinstance(exc, LambdaExhausted):
                    raise
                notes["explicit_failed"] = str(exc)
                lset = search_lambdas(params, field, strategy, seed, tries)
        elif mode == "search":
            lset = search_lambdas(params, field, strategy, seed, tries)
        else:
            raise ConfigError(f"unknown lambda mode {mode!r}")
    return build(params, field, lset), notes


def bundle_dict(code: RackCode, config: dict) -> dict:
    return {
        "magic": BUNDLE_MAGIC,
        "version": BUNDLE_VERSION,
        "field": code.field.to_json(),
        "params": code.params.to_json(),
        "lambdas": code.lambdas.to_json(code.field),
        "parity_hash": code.parity_hash(),
        "experiment": config.get("experiment", {}),
    }


def load_bundle(path) -> tuple[RackCode, dict]:
    data = _load_json(path)
    if data.get("magic") != BUNDLE_MAGIC:
        raise ConfigError(f"{path} is not a rackmsr bundle")
    if data.get("version") != BUNDLE_VERSION:
        raise ConfigError(f"unsupported bundle version {data.get('version')}")
    field = field_from_json(data["field"])
    params = params_from_json(data["params"])
    lset = LambdaSet.from_json(field, data["lambdas"])
    return build(params, field, lset), data


def summary(code: RackCode) -> dict:
    p = code.params
    return {
        "q": code.field.q,
        "l": p.l,
        "threshold_q": field_threshold(p),
        "lambda_mode": code.lambdas.mode,
        "theorem": p.theorem,
        "parity_hash": code.parity_hash(),
        "shortened": p.shortened,
    }


def cmd_build(args) -> int:
    config = _load_json(args.config)
    code, notes = construct(config)
    out = Path(args.output) if args.output else Path(args.config).with_suffix(".bundle.json")
    out.write_text(_dump(bundle_dict(code, config)) + "\n")
    info = summary(code) | notes | {"bundle": str(out)}
    print(_dump(info))
    return EXIT_OK


# verify

def _check_constraints(code: RackCode, bundle: dict) -> dict:
    res = verify_lambdas(code.params, code.field, code.lambdas)
    failed = []
    if not res.ok:
        failed.append(res.failing.describe() if res.failing else res.reason)
    if code.parity_hash() != bundle.get("parity_hash"):
        failed.append("parity hash does not match the bundle")
    return {"checked": res.checked, "failed": failed}


def _mds_mode(value) -> str | int | None:
    """'exhaustive', 'N', 'sample N', 'sample:N' or 'sample(N)'."""
    if value is None:
        return None
    text = " ".join(value) if isinstance(value, (list, tuple)) else str(value)
    text = text.strip().lower()
    if text == "exhaustive":
        return "exhaustive"
    for junk in ("sample", ":", "(", ")"):
        text = text.replace(junk, " ")
    try:
        count = int(text)
    except ValueError:
        raise ConfigError(f"--mds expects 'exhaustive' or a sample size, got {value!r}") from None
    if count < 1:
        raise ConfigError("sample size must be positive")
    return count


def _encode_random(code: RackCode, rng) -> np.ndarray | None:
    try:
        return code.encode(code.random_message(rng))
    except CodeError:
        return None


def cmd_verify(args) -> int:
    code, bundle = load_bundle(args.bundle)
    exp = bundle.get("experiment", {}).get("verify", {})
    explicit = args.mds is not None or args.folded or args.kernels
    mds = _mds_mode(args.mds if args.mds is not None else (None if explicit else exp.get("mds", "exhaustive")))
    folded = args.folded or (not explicit and exp.get("folded", True))
    kernels = args.kernels or (not explicit and exp.get("kernels", False))
    report = {"constraints": _check_constraints(code, bundle)}
    rng = np.random.default_rng(args.seed)
    if mds is not None:
        word = _encode_random(code, rng)
        if word is None:
            report["mds"] = {"checked": 0, "passed": 0, "failed": ["parity part is singular; cannot encode"]}
        else:
            sweep = code.mds_sweep(word, mds, args.seed)
            report["mds"] = {"checked": sweep["patterns"], "passed": sweep["passed"], "failed": sweep["failed"]}
    if folded:
        checks, failed = 0, []
        for w in range(code.params.u):
            rep = code.folded_mds_check(w, "exhaustive" if mds in (None, "exhaustive") else mds, args.seed)
            checks += rep["checked"]
            failed += [{"w": w, "racks": S} for S in rep["singular"]]
        for _ in range(args.words):
            word = _encode_random(code, rng)
            if word is None:
                failed.append({"encode": "parity part is singular"})
                break
            for w in range(code.params.u):
                checks += 1
                view = code.fold(word, w)
                if not code.folded_residual(view).is_zero():
                    failed.append({"w": w, "residual": "nonzero"})
        report["folded"] = {"checked": checks, "failed": failed}
    if kernels:
        for name, res in run_all(code.field, args.seed, args.trials).items():
            report[f"kernels.{name}"] = res
    ok = all(not r["failed"] for r in report.values())
    print(_dump({"ok": ok, "suites": report}))
    return EXIT_OK if ok else EXIT_PROPERTY


# repair

def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    return [int(x) for x in text.split(",") if x.strip()]


def _random_geometry(code: RackCode, rng: random.Random, host, failed, helpers, hs=None, hosts=None):
    p = code.params
    if host is None:
        host = rng.choice(hosts) if hosts else rng.randrange(p.n_bar)
    if failed is None:
        h = rng.choice(hs) if hs else rng.randint(1, min(p.h_max, p.u - p.v))
        failed = sorted(rng.sample(range(p.u), h))
    if helpers is None:
        others = [j for j in range(p.n_bar) if j != host]
        helpers = sorted(rng.sample(others, p.d_bar))
    return host, failed, helpers


def run_repair(code: RackCode, host, failed, helpers, extra, rng: random.Random, hs=None, hosts=None) -> tuple[dict, bool]:
    host, failed, helpers = _random_geometry(code, rng, host, failed, helpers, hs, hosts)
    if extra is None and len(failed) > code.params.u - code.params.v:
        extra = "auto"
    pl = plan(code, host, failed, helpers, extra)
    msg = np.array([rng.randrange(code.field.q) for _ in range(code.params.k * code.l)], dtype=np.int64)
    word = code.encode(msg)
    res = repair(code, word, pl)
    ok = all(np.array_equal(res.recovered[g], word[host * code.params.u + g]) for g in pl.failed)
    out = res.to_json() | {"host": host, "failed": list(pl.failed), "helpers": list(pl.helpers),
                           "extra": pl.extra, "recovered_ok": ok}
    return out, ok


def cmd_repair(args) -> int:
    code, bundle = load_bundle(args.bundle)
    p = code.params
    rng = random.Random(args.seed)
    extra = args.extra
    if extra is not None and extra != "auto":
        extra = int(extra)
    host, failed, helpers = args.host, _ints(args.failed), _ints(args.helpers)
    exp = bundle.get("experiment", {}).get("repair", {})
    geometry_given = host is not None or failed is not None or helpers is not None
    trials = args.trials if args.trials is not None else (1 if geometry_given else int(exp.get("trials", 1)))
    hs = [int(h) for h in exp.get("h", [])]
    hosts = [int(j) for j in exp.get("hosts", [])]
    bad_h = [h for h in hs if not 1 <= h <= p.h_max]
    if bad_h:
        raise ConfigError(f"experiment h values {bad_h} outside [1, {p.h_max}]")
    if any(not 0 <= j < p.n_bar for j in hosts):
        raise ConfigError(f"experiment hosts must lie in [0, {p.n_bar})")
    if trials <= 1:
        out, ok = run_repair(code, host, failed, helpers, extra, rng, hs, hosts)
        print(_dump(out))
        return EXIT_OK if ok else EXIT_PROPERTY
    runs = [run_repair(code, host, failed, helpers, extra, rng, hs, hosts) for _ in range(trials)]
    results = [r for r, _ in runs]
    ok = all(good for _, good in runs)
    agg = {
        "trials": len(results),
        "all_recovered": ok,
        "bandwidth_total": sum(r["bandwidth"] for r in results),
        "access_total": sum(r["access"] for r in results),
        "optimal_bw": sum(r["optimal_bw"] for r in results),
        "optimal_access": sum(r["optimal_access"] for r in results),
        "ratios": sorted({r["ratio"] for r in results}),
        "last_position_hosts": sum(
            code.params.rack_position(r["host"])[1] == code.params.s for r in results
        ),
    }
    print(_dump(agg))
    return EXIT_OK if ok else EXIT_PROPERTY


# report

REPORT_COLUMNS = ("bundle", "theorem", "n", "k", "u", "d_bar", "s", "l", "q", "bandwidth_ratio", "access_ratio")


def report_row(path, code: RackCode, seed: int) -> dict:
    p = code.params
    rng = random.Random(seed)
    host = 0
    failed = list(range(p.u - p.v))
    helpers = [j for j in range(p.n_bar) if j != host][: p.d_bar]
    out, ok = run_repair(code, host, failed, helpers, None, rng)
    if not ok:
        raise CodeError(f"repair failed while measuring {path}")
    access_ratio = Fraction(out["access"]) / Fraction(out["bound_access"])
    return {
        "bundle": str(path), "theorem": p.theorem, "n": p.n, "k": p.k, "u": p.u, "d_bar": p.d_bar,
        "s": p.s, "l": p.l, "q": code.field.q,
        "bandwidth_ratio": out["ratio"], "access_ratio": str(access_ratio),
    }


def render_table(rows: list[dict]) -> str:
    cells = [list(REPORT_COLUMNS)] + [[str(r[c]) for c in REPORT_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(REPORT_COLUMNS))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells)


def parse_table(text: str) -> list[dict]:
    lines = text.strip().splitlines()
    header = lines[0].split()
    return [dict(zip(header, line.split())) for line in lines[1:]]


def cmd_report(args) -> int:
    rows = [report_row(path, load_bundle(path)[0], args.seed) for path in args.bundles]
    if args.format == "json":
        print(_dump(rows))
    else:
        print(render_table(rows))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rackmsr", description=__doc__.splitlines()[0])
    parser.add_argument("--backend", action="store_true", help="print the kernel backend and exit")
    sub = parser.add_subparsers(dest="command")

    b = sub.add_parser("build", help="construct a code from a JSON config")
    b.add_argument("config")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run verification suites on a bundle")
    v.add_argument("bundle")
    v.add_argument("--mds", nargs="+", help="'exhaustive', a sample size, or 'sample N'")
    v.add_argument("--folded", action="store_true")
    v.add_argument("--kernels", action="store_true")
    v.add_argument("--trials", type=int, default=50, help="instances per kernel suite")
    v.add_argument("--words", type=int, default=10, help="random codewords for the folded residual")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("repair", help="encode, erase and repair inside one rack")
    r.add_argument("bundle")
    r.add_argument("--host", type=int)
    r.add_argument("--failed", help="comma-separated node positions in the host rack")
    r.add_argument("--helpers", help="comma-separated helper racks")
    r.add_argument("--extra", help="extra helper rack or 'auto' (needed when h > u-v)")
    r.add_argument("--trials", type=int, help="repeat with fresh random geometry (default from the bundle)")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_repair)

    p = sub.add_parser("report", help="tabulate measured repair ratios")
    p.add_argument("bundles", nargs="*")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.backend:
        print(_backend.name)
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_INVALID
    try:
        return args.func(args)
    except LambdaExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ConfigError, ParamError, LambdaError, FieldError, RepairError, CodeError, MatrixError,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
