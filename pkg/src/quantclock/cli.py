"""Configuration-driven command line front end.

Commands: ``simulate`` (clock draws or one path), ``sample`` (GGC
marginals), ``design`` (driving-law construction report), ``price``
(weighted Black-Scholes or double-exponential Monte Carlo), ``verify``
(the distributional battery).  Every run is specified by an INI-style
config file; the seed is mandatory, unknown keys are rejected, and a
given (config, seed) pair produces byte-identical outputs.

Exit codes: 0 success, 2 config error, 3 numeric error, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import battery
from . import rng as qrng
from .bdlp import preset_L, target_gamma
from .clock import clock_path, sample_clock_terminal
from .errors import (
    ConfigError,
    NumericsError,
    QuantclockError,
    VerificationError,
)
from .ggc import DirichletMeanLaw, double_cftp_many, ggc_sample
from .laws import BetaLaw, DegenerateLaw, OccupationLaw, UniformLaw
from .levy import (
    GGCSpec,
    gamma_subordinator,
    generalized_gamma_subordinator,
    psi_eval,
    stable_subordinator,
    tilted_stable_subordinator,
)
from .pricing import PricingInput, black_scholes, de_price, weighted_bs_price
from .quantiles import quantile_function
from .skeleton import sample_jumps

SCHEMA_VERSION = 1

_RUN_KEYS = {
    "command": str,
    "seed": int,
    "n": int,
    "out": str,
    "format": str,
    "threads": int,
}

_SECTION_KEYS = {
    "clock": {
        "quantile": str,
        "delta": float,
        "alpha": float,
        "b": float,
        "p": float,
        "driver": str,
        "theta": float,
        "driver_alpha": float,
        "driver_b": float,
        "driver_c": float,
        "t": float,
        "trunc": float,
        "path": str,
        "grid_points": int,
        "cgmy_v_variant": str,
        "g": float,
        "m": float,
    },
    "ggc": {
        "theta": float,
        "t": float,
        "r": str,
        "r_alpha": float,
        "r_a": float,
        "r_b": float,
        "r_c": float,
        "method": str,
    },
    "design": {
        "preset": str,
        "alpha": float,
        "theta": float,
        "delta": float,
        "g": float,
        "m": float,
        "cgmy_v_variant": str,
        "omega_grid": str,
    },
    "price": {
        "route": str,
        "model": str,
        "s0": float,
        "k": float,
        "r": float,
        "sigma": float,
        "tau": float,
        "theta": float,
        "kernel": str,
    },
    "verify": {"n": int, "checks": str},
}

_COMMANDS = ("simulate", "sample", "design", "price", "verify")


@dataclass
class RunConfig:
    command: str
    seed: int
    n: int
    out: str | None
    format: str
    threads: int
    sections: dict = field(default_factory=dict)
    digest: str = ""


def parse_config(text: str) -> RunConfig:
    """Parse and validate the flat key-value config; errors name every bad key."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable config: {exc}") from None
    problems = []
    if "run" not in cp:
        raise ConfigError("missing [run] section")
    for key in cp["run"]:
        if key not in _RUN_KEYS:
            problems.append(f"run.{key}")
    for sec in cp.sections():
        if sec == "run":
            continue
        if sec not in _SECTION_KEYS:
            problems.append(f"[{sec}]")
            continue
        for key in cp[sec]:
            if key not in _SECTION_KEYS[sec]:
                problems.append(f"{sec}.{key}")
    if problems:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(problems)))
    run = cp["run"]
    command = run.get("command", "")
    if command not in _COMMANDS:
        raise ConfigError(f"command must be one of {_COMMANDS}, got {command!r}")
    if "seed" not in run:
        raise ConfigError("seed is mandatory (reproducibility contract)")
    try:
        seed = int(run["seed"])
    except ValueError:
        raise ConfigError("seed must be an integer") from None
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed must fit in 64 unsigned bits")
    n = int(run.get("n", "10000"))
    if n <= 0:
        raise ConfigError("n must be positive")
    threads = int(run.get("threads", "1"))
    if threads <= 0:
        raise ConfigError("threads must be positive")
    fmt = run.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    sections = {}
    for sec in cp.sections():
        if sec == "run":
            continue
        parsed = {}
        for key, raw in cp[sec].items():
            typ = _SECTION_KEYS[sec][key]
            try:
                parsed[key] = typ(raw) if typ is not str else raw
            except ValueError:
                raise ConfigError(f"{sec}.{key} must be {typ.__name__}") from None
        sections[sec] = parsed
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return RunConfig(command, seed, n, run.get("out"), fmt, threads, sections, digest)


def _kernel_from(cfg_sec: dict):
    fam = cfg_sec.get("quantile", "identity")
    params = {}
    if fam == "power":
        params["delta"] = cfg_sec.get("delta", 1.0)
    elif fam == "arcsine_power":
        params["b"] = cfg_sec.get("b", 1.0)
    elif fam == "kumaraswamy":
        params["alpha"] = cfg_sec.get("alpha", 0.5)
        params["b"] = cfg_sec.get("b", 1.0)
    elif fam == "occupation":
        params["alpha"] = cfg_sec.get("alpha", 0.5)
    elif fam == "affine_uniform":
        params["p"] = cfg_sec.get("p", 1.0)
    elif fam not in ("arcsine", "identity"):
        raise ConfigError(f"unknown quantile family {fam!r}")
    return quantile_function(fam, params)


def _driver_from(cfg_sec: dict):
    fam = cfg_sec.get("driver", "gamma")
    if fam == "gamma":
        return gamma_subordinator(cfg_sec.get("theta", 1.0))
    if fam == "tilted_stable":
        return tilted_stable_subordinator(cfg_sec.get("driver_alpha", 0.5))
    if fam == "stable":
        return stable_subordinator(cfg_sec.get("driver_alpha", 0.5))
    if fam == "gen_gamma":
        return generalized_gamma_subordinator(
            cfg_sec.get("driver_c", 1.0),
            cfg_sec.get("driver_alpha", 0.5),
            cfg_sec.get("driver_b", 1.0),
        )
    if fam == "vg":
        return preset_L("vg", {"theta": cfg_sec.get("theta", 1.0)},
                        delta=cfg_sec.get("delta", 1.0)).l_spec
    if fam == "nig":
        return preset_L("nig", {"alpha": cfg_sec.get("driver_alpha", 0.5)},
                        delta=cfg_sec.get("delta", 1.0)).l_spec
    raise ConfigError(f"unknown driver family {fam!r}")


def _r_law_from(sec: dict):
    fam = sec.get("r", "degenerate")
    if fam == "degenerate":
        return DegenerateLaw(sec.get("r_c", 1.0))
    if fam == "uniform":
        return UniformLaw()
    if fam == "beta":
        return BetaLaw(sec.get("r_a", 0.5), sec.get("r_b", 0.5))
    if fam == "arcsine":
        return BetaLaw(0.5, 0.5)
    if fam == "occupation":
        return OccupationLaw(sec.get("r_alpha", 0.5))
    raise ConfigError(f"unknown GGC mixing law {fam!r}")


def _write_sample_csv(path: str, samples: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write("sample\n")
        for v in samples:
            fh.write(f"{v:.17g}\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def _chunked_draws(total: int, threads: int, seed: int, tag: int, worker):
    """Deterministic chunked Monte Carlo: one substream per fixed-size chunk.

    The chunk layout depends only on the total count, never on the thread
    count, and chunks are reassembled in order, so estimates are identical
    for any ``threads``.
    """
    chunk = 8192
    starts = list(range(0, total, chunk))
    jobs = [
        (i, min(chunk, total - s), qrng.substream(seed, tag, i))
        for i, s in enumerate(starts)
    ]
    out = [None] * len(jobs)

    def run_job(j):
        i, m, rr = j
        out[i] = worker(m, rr)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run_job, jobs))
    else:
        for j in jobs:
            run_job(j)
    return np.concatenate(out)


def _cmd_simulate(cfg: RunConfig):
    sec = cfg.sections.get("clock", {})
    q = _kernel_from(sec)
    spec = _driver_from(sec)
    t = sec.get("t", 1.0)
    trunc = sec.get("trunc", 1e-6)
    if str(sec.get("path", "false")).lower() in ("true", "1", "yes"):
        rng = qrng.substream(cfg.seed, 0)
        skel = sample_jumps(spec, t, trunc=trunc, rng=rng)
        grid = np.linspace(t / sec.get("grid_points", 256), t, sec.get("grid_points", 256))
        cp = clock_path(q, skel, grid)
        if cfg.format == "json":
            payload = _envelope(cfg, {"path": cp.summary()})
            return payload, None
        return None, [("time", "value"), cp.times, cp.values]
    draws = _chunked_draws(
        cfg.n, cfg.threads, cfg.seed, 0,
        lambda m, rr: sample_clock_terminal(q, spec, t, m, rr, trunc=trunc),
    )
    if cfg.format == "json":
        return _envelope(cfg, _summary(draws)), None
    return None, [("sample",), draws]


def _cmd_sample(cfg: RunConfig):
    sec = cfg.sections.get("ggc", {})
    g = GGCSpec(sec.get("theta", 1.0), _r_law_from(sec))
    t = sec.get("t", 1.0)
    method = sec.get("method", "auto")
    draws = _chunked_draws(
        cfg.n, cfg.threads, cfg.seed, 1,
        lambda m, rr: ggc_sample(g, t, rr, size=m, method=method),
    )
    if cfg.format == "json":
        return _envelope(cfg, _summary(draws)), None
    return None, [("sample",), draws]


def _cmd_design(cfg: RunConfig):
    sec = cfg.sections.get("design", {})
    preset = sec.get("preset")
    if preset is None:
        raise ConfigError("design needs design.preset")
    delta = sec.get("delta", 1.0)
    if preset == "vg":
        des = preset_L("vg", {"theta": sec.get("theta", 1.0)}, delta=delta)
    elif preset == "nig":
        des = preset_L("nig", {"alpha": sec.get("alpha", 0.5)}, delta=delta)
    elif preset == "cgmy":
        des = preset_L(
            "cgmy",
            {
                "alpha": sec.get("alpha", 0.35),
                "G": sec.get("g", 3.0),
                "M": sec.get("m", 5.0),
                "variant": sec.get("cgmy_v_variant", "tilt"),
            },
            delta=delta,
        )
    elif preset == "short_memory_gamma":
        des = preset_L("short_memory", {"target": target_gamma(sec.get("theta", 1.0))})
    else:
        raise ConfigError(f"unknown design preset {preset!r}")
    grid = [float(v) for v in sec.get("omega_grid", "0.25,0.5,1,2,4").split(",")]
    payload = _envelope(
        cfg,
        {
            "construction": des.construction,
            "notes": {k: str(v) for k, v in des.notes.items()},
            "psi_l": {f"{w:g}": float(psi_eval(des.l_spec, w)) for w in grid},
        },
    )
    return payload, None


def _cmd_price(cfg: RunConfig):
    sec = cfg.sections.get("price", {})
    inp = PricingInput(
        spot=sec.get("s0", 100.0),
        strike=sec.get("k", 100.0),
        rate=sec.get("r", 0.0),
        sigma=sec.get("sigma", 0.2),
        tau=sec.get("tau", 1.0),
        theta=sec.get("theta", 1.0),
    )
    route = sec.get("route", "weighted_bs")
    model = sec.get("model", "degenerate")
    if route == "black_scholes":
        price, se = black_scholes(inp), 0.0
    elif route == "weighted_bs":
        sampler = _marginal_sampler(model, inp)
        price, se = weighted_bs_price(
            lambda m, rr: sampler(m, rr), inp, cfg.n, qrng.substream(cfg.seed, 2)
        )
    elif route == "de":
        kernel = sec.get("kernel", "arcsine")
        r_law = {"arcsine": BetaLaw(0.5, 0.5), "uniform": UniformLaw()}.get(kernel)
        if r_law is None:
            raise ConfigError(f"unknown DE kernel {kernel!r}")
        p = 1.0 - math.exp(-inp.tau)
        law = DirichletMeanLaw(p, r_law)
        price, se = de_price(
            lambda m, rr: double_cftp_many(law, rr, m),
            inp,
            cfg.n,
            qrng.substream(cfg.seed, 2),
        )
    else:
        raise ConfigError(f"unknown pricing route {route!r}")
    payload = _envelope(
        cfg,
        {
            "price": price,
            "se": se,
            "model": model,
            "route": route,
            "params": {
                "s0": inp.spot, "k": inp.strike, "r": inp.rate,
                "sigma": inp.sigma, "tau": inp.tau, "theta": inp.theta,
            },
        },
    )
    return payload, None


def _marginal_sampler(model: str, inp: PricingInput):
    """Exact clock-marginal samplers for the designed price models."""
    if model == "degenerate":
        return lambda m, rr: np.full(m, inp.tau)
    if model == "gamma":
        return lambda m, rr: rr.gamma(inp.theta * inp.tau, size=m)
    if model == "nig":
        return lambda m, rr: rr.wald(inp.tau / 2.0, inp.tau * inp.tau / 2.0, m)
    raise ConfigError(f"unknown clock marginal model {model!r}")


def _cmd_verify(cfg: RunConfig):
    sec = cfg.sections.get("verify", {})
    n = sec.get("n", cfg.n)
    names = None
    if "checks" in sec:
        names = [s.strip() for s in sec["checks"].split(",") if s.strip()]
        unknown = [s for s in names if s not in battery.BATTERY]
        if unknown:
            raise ConfigError("unknown verify checks: " + ", ".join(unknown))
    results = battery.run_battery(cfg.seed, n=n, names=names)
    for r in results:
        print(r.line())
    payload = _envelope(
        cfg,
        {
            "results": [
                {"name": r.name, "passed": r.passed, "detail": r.detail}
                for r in results
            ]
        },
    )
    if not all(r.passed for r in results):
        return payload, None, VerificationError("verification battery failed")
    return payload, None, None


def _summary(draws: np.ndarray) -> dict:
    return {
        "n": int(draws.size),
        "mean": float(draws.mean()),
        "variance": float(draws.var(ddof=1)) if draws.size > 1 else 0.0,
        "min": float(draws.min()),
        "max": float(draws.max()),
        "samples": [float(v) for v in draws],
    }


def _envelope(cfg: RunConfig, payload: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "config_digest": cfg.digest,
        "command": cfg.command,
        **payload,
    }


def run(cfg: RunConfig) -> int:
    """Execute a parsed config; returns the process exit code."""
    verify_failure = None
    if cfg.command == "simulate":
        payload, table = _cmd_simulate(cfg)
    elif cfg.command == "sample":
        payload, table = _cmd_sample(cfg)
    elif cfg.command == "design":
        payload, table = _cmd_design(cfg)
    elif cfg.command == "price":
        payload, table = _cmd_price(cfg)
    elif cfg.command == "verify":
        payload, table, verify_failure = _cmd_verify(cfg)
    else:  # pragma: no cover - parse_config already rejects
        raise ConfigError(f"unknown command {cfg.command!r}")

    if cfg.out:
        if payload is not None:
            _write_json(cfg.out, payload)
        elif table is not None:
            header, *cols = table
            with open(cfg.out, "w") as fh:
                fh.write(",".join(header) + "\n")
                for row in zip(*cols):
                    fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    elif payload is not None and cfg.command != "verify":
        json.dump(payload, sys.stdout, sort_keys=True)
        sys.stdout.write("\n")

    if verify_failure is not None:
        raise verify_failure
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="quantclock",
        description="simulate, sample, design, price and verify quantile clocks",
    )
    ap.add_argument("command", choices=_COMMANDS, nargs="?", default=None,
                    help="overrides run.command from the config")
    ap.add_argument("--config", required=True, help="path to the INI run config")
    ap.add_argument("--seed", type=int, default=None, help="overrides run.seed")
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--out", default=None, help="overrides run.out")
    args = ap.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.command:
            cfg.command = args.command
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threads is not None:
            cfg.threads = args.threads
        if args.out is not None:
            cfg.out = args.out
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 4
    except (OSError,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QuantclockError as exc:
        print(f"numeric error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
