"""Command-line driver: ``freechaos {moments,bounds,breuer-major,mc,verify}``.

Every command reads an optional JSON config, writes ``<command>.json``
(and a CSV table where one makes sense) into ``--out``, and embeds the
config digest and seed in each payload.  Exit status: 0 success, 1 a
failed check, 2 bad config or I/O.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

COMMANDS = ("moments", "bounds", "breuer-major", "mc", "verify")

# allowed keys and defaults per command
DEFAULTS: dict[str, dict] = {
    "moments": {"mode": "wigner", "kernels": None, "covariance": None, "q": None, "words": None},
    "bounds": {"kernels": None, "fisher": None},
    "breuer-major": {"H": 0.5, "q": 2, "times": [0.0, 1.0], "n_list": [32, 64, 128, 256], "seed": None},
    "mc": {"covariance": [[1.0]], "words": [[1, 1, 1, 1]], "N": 256, "reps": 10, "seed": None},
    "verify": {"profile": "quick", "seed": None},
}

ENV = {"config": "FREECHAOS_CONFIG", "out": "FREECHAOS_OUT", "seed": "FREECHAOS_SEED", "threads": "FREECHAOS_THREADS"}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict
    out: Path
    seed: int
    threads: int = 1
    config_path: str | None = None
    extra: dict = field(default_factory=dict)

    def digest(self) -> str:
        blob = json.dumps({"command": self.command, "params": self.params, "seed": self.seed},
                          sort_keys=True, separators=(",", ":"), default=_jsonable)
        return hashlib.sha256(blob.encode()).hexdigest()


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def load_config(command: str, path: str | None) -> dict:
    params = dict(DEFAULTS[command])
    if path is None:
        return params
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in params:
            raise ConfigError(f"unknown config key {key!r} for command {command!r}")
    params.update(raw)
    return params


def _resolve(args: argparse.Namespace) -> RunConfig:
    env = os.environ
    config_path = args.config or env.get(ENV["config"])
    params = load_config(args.command, config_path)
    seed_src = args.seed if args.seed is not None else env.get(ENV["seed"])
    if seed_src is None:
        seed_src = params.get("seed") if params.get("seed") is not None else 0
    try:
        seed = int(seed_src)
        threads = int(args.threads if args.threads is not None else env.get(ENV["threads"], 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad seed or threads value: {exc}") from exc
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if threads < 1:
        raise ConfigError("threads must be positive")
    if "seed" in params:
        params["seed"] = seed
    out = Path(args.out or env.get(ENV["out"], "."))
    return RunConfig(args.command, params, out, seed, threads, config_path)


# -- commands ---------------------------------------------------------------------

def _kernels(params: dict):
    from .kernels import from_spec

    specs = params.get("kernels")
    if not specs:
        raise ConfigError("'kernels' must be a non-empty list of kernel descriptions")
    try:
        return [from_spec(s) for s in specs]
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise ConfigError(f"bad entry in 'kernels': {exc}") from exc


def cmd_moments(cfg: RunConfig) -> tuple[dict, list[list] | None, bool]:
    from .wigner import WignerVector, q_family_moment, family_moment

    p = cfg.params
    words = p.get("words")
    if not words:
        raise ConfigError("'words' must be a non-empty list of index lists")
    rows = []
    if p["mode"] == "wigner":
        F = WignerVector.of(_kernels(p))
        for w in words:
            z = complex(F.joint_moment(w))
            rows.append([" ".join(map(str, w)), z.real, z.imag])
    elif p["mode"] == "family":
        if p.get("covariance") is None:
            raise ConfigError("'covariance' is required in family mode")
        for w in words:
            v = family_moment(p["covariance"], w) if p.get("q") is None else q_family_moment(p["covariance"], p["q"], w)
            rows.append([" ".join(map(str, w)), float(v), 0.0])
    else:
        raise ConfigError(f"unknown 'mode' {p['mode']!r}; expected 'wigner' or 'family'")
    payload = {"moments": [{"word": r[0], "re": r[1], "im": r[2]} for r in rows]}
    return payload, [["word", "re", "im"]] + rows, True


def cmd_bounds(cfg: RunConfig) -> tuple[dict, list[list] | None, bool]:
    from .stein import bound_report
    from .wigner import WignerVector

    F = WignerVector.of(_kernels(cfg.params))
    report = bound_report(F, cfg.params.get("fisher"))
    return report.to_dict(), None, True


def cmd_breuer_major(cfg: RunConfig) -> tuple[dict, list[list] | None, bool]:
    from .breuer_major import bm_rate_experiment

    p = cfg.params
    try:
        res = bm_rate_experiment(float(p["H"]), int(p["q"]), p["n_list"], p["times"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad breuer-major config: {exc}") from exc
    d = len(res.rows[0].x)
    table = [["n"] + [f"x_{i + 1}" for i in range(d)] + ["M", "dw_thm8", "slope"]]
    for r in res.rows:
        table.append([r.n, *r.x, r.m_of_f, "" if r.dw_thm8 is None else r.dw_thm8,
                      "" if r.slope is None else r.slope])
    payload = {"H": res.H, "q": res.q, "last_slope": res.last_slope, "aitken_slope": res.aitken_slope,
               "theoretical_rate": res.theoretical,
               "rows": [{"n": r.n, "x": r.x, "m_of_f": r.m_of_f, "dw_thm8": r.dw_thm8, "slope": r.slope}
                        for r in res.rows]}
    return payload, table, True


def cmd_mc(cfg: RunConfig) -> tuple[dict, list[list] | None, bool]:
    from .randmat import mc_compare

    p = cfg.params
    try:
        rows = mc_compare(p["covariance"], p["words"], int(p["N"]), int(p["reps"]), cfg.seed, cfg.threads)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad mc config: {exc}") from exc
    table = [["word", "prediction", "estimate", "stderr", "pass"]]
    table += [[" ".join(map(str, r.word)), r.prediction, r.estimate, r.stderr, int(r.passed)] for r in rows]
    return {"rows": [r.to_dict() for r in rows]}, table, all(r.passed for r in rows)


def cmd_verify(cfg: RunConfig) -> tuple[dict, list[list] | None, bool]:
    from .verify import run_profile

    try:
        results = run_profile(cfg.params["profile"], cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    table = [["check", "pass"]] + [[r.name, int(r.passed)] for r in results]
    return {"checks": [r.to_dict() for r in results]}, table, all(r.passed for r in results)


HANDLERS = {"moments": cmd_moments, "bounds": cmd_bounds, "breuer-major": cmd_breuer_major,
            "mc": cmd_mc, "verify": cmd_verify}


def _csv_text(table: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in table:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    payload, table, ok = HANDLERS[cfg.command](cfg)
    payload = {"command": cfg.command, "config_digest": cfg.digest(), "seed": cfg.seed,
               "config": cfg.params, "ok": ok, "result": payload}
    stem = cfg.command.replace("-", "_")
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / f"{stem}.json").write_text(_dump(payload))
        if table is not None:
            header = f"# config_digest={cfg.digest()} seed={cfg.seed}\n"
            (cfg.out / f"{stem}.csv").write_text(header + _csv_text(table))
    except OSError as exc:
        raise ConfigError(f"cannot write output: {exc}") from exc
    if table is not None:
        sys.stdout.write(_csv_text(table))
    print(f"{cfg.command}: {'ok' if ok else 'FAILED'} -> {cfg.out / (stem + '.json')}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freechaos", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help=f"JSON config (env {ENV['config']})")
    ap.add_argument("--out", help=f"output directory (env {ENV['out']}; default .)")
    ap.add_argument("--seed", help=f"unsigned 64-bit seed (env {ENV['seed']}; default 0)")
    ap.add_argument("--threads", help=f"worker threads for Monte Carlo (env {ENV['threads']}; default 1)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(_resolve(args))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
