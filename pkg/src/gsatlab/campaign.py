"""Deterministic GSAT campaigns and their on-disk store.

Problem ``i`` is generated from ``derive_seed(master, "gen", i, 0)`` and try
``t`` on it runs on the stream ``derive_seed(master, "try", i, t)``. Nothing
else is random, so the store depends only on the configuration.

Store layout::

    <out>/manifest.json
    <out>/problems/problem_00000.cnf
    <out>/traces/problem_00000.trace.csv     all tries of one problem
    <out>/reports/                           written by analyze/report

While a campaign runs, finished tries sit in ``<out>/parts/`` and are listed
in ``<out>/completed.log``; both disappear once the store is sealed.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from pathlib import Path

from . import __version__
from .cnf import Formula, GeneratorSpec, emit_dimacs, generate_random_ksat, parse_dimacs
from .engine import Trace, run_try
from .rng import ALGORITHM, derive_seed
from .traceio import file_header, format_try, read_traces

log = logging.getLogger(__name__)

OUT_ENV = "GSATLAB_OUT"
MANIFEST = "manifest.json"


class StoreError(RuntimeError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    num_vars: int
    ratio: float = 4.3
    k: int = 3
    problems: int = 10
    tries: int = 10
    max_flips: int | None = None
    master_seed: int = 0
    horizon: int | None = None
    workers: int = 1
    clause_count: int | None = None

    def __post_init__(self):
        if self.num_vars < 1 or self.problems < 0 or self.tries < 1 or self.workers < 1:
            raise ValueError("num_vars, tries and workers must be positive; problems non-negative")
        if self.clause_count is None and self.ratio <= 0:
            raise ValueError("ratio must be positive")
        if self.max_flips is not None and self.max_flips < 1:
            raise ValueError("max_flips must be >= 1")

    @property
    def num_clauses(self) -> int:
        return self.clause_count if self.clause_count is not None else int(round(self.ratio * self.num_vars))

    @property
    def flips(self) -> int:
        """Max-flips per try; defaults to 2.5 N."""
        return self.max_flips if self.max_flips is not None else int(round(2.5 * self.num_vars))

    @property
    def curve_horizon(self) -> int:
        return self.horizon if self.horizon is not None else self.flips

    @property
    def name(self) -> str:
        return f"n{self.num_vars}_l{self.num_clauses}_k{self.k}"

    def problem_spec(self, i: int) -> GeneratorSpec:
        return GeneratorSpec(self.num_vars, self.num_clauses, self.k, derive_seed(self.master_seed, "gen", i, 0))

    def try_seed(self, i: int, t: int) -> int:
        return derive_seed(self.master_seed, "try", i, t)

    def to_dict(self) -> dict:
        # worker count is an execution detail and must not change stored bytes
        d = asdict(self)
        del d["workers"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


PRESETS = {
    "hard": dict(ratio=4.3),
    "easy": dict(ratio=3.0),
    "overconstrained": dict(ratio=6.0),
}


@lru_cache(maxsize=8)
def _formula(spec: GeneratorSpec) -> Formula:
    return generate_random_ksat(spec)


def problem(config: CampaignConfig, i: int) -> Formula:
    return _formula(config.problem_spec(i))


def run_unit(config: CampaignConfig, i: int, t: int) -> Trace:
    """One work unit: try ``t`` on problem ``i``."""
    return run_try(problem(config, i), config.flips, config.try_seed(i, t), problem_id=i, try_id=t)


def _problem_traces(config: CampaignConfig, i: int) -> list[Trace]:
    return [run_unit(config, i, t) for t in range(config.tries)]


def simulate(config: CampaignConfig, workers: int | None = None) -> list[Trace]:
    """Run a campaign in memory and return its traces ordered by (problem, try)."""
    workers = config.workers if workers is None else workers
    if workers <= 1 or config.problems <= 1:
        return [tr for i in range(config.problems) for tr in _problem_traces(config, i)]
    with ProcessPoolExecutor(workers) as pool:
        chunks = pool.map(_problem_traces, [config] * config.problems, range(config.problems))
        return [tr for chunk in chunks for tr in chunk]


# ---------------------------------------------------------------- store


def default_output_dir(config: CampaignConfig) -> Path:
    return Path(os.environ.get(OUT_ENV, "gsatlab-out")) / config.name


def _paths(out: Path, i: int):
    return (out / "problems" / f"problem_{i:05d}.cnf",
            out / "traces" / f"problem_{i:05d}.trace.csv",
            out / "parts" / f"problem_{i:05d}")


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError as e:
        raise StoreError(f"cannot write {path}: {e}") from e


def _manifest(config: CampaignConfig) -> dict:
    return {
        "format": "gsatlab-campaign/1",
        "software_version": __version__,
        "rng_algorithm": ALGORITHM,
        "config": config.to_dict(),
        "num_clauses": config.num_clauses,
        "max_flips": config.flips,
        "problems": [
            {"index": i, "gen_seed": config.problem_spec(i).seed,
             "try_seeds": [config.try_seed(i, t) for t in range(config.tries)]}
            for i in range(config.problems)
        ],
    }


def _unit_to_part(config: CampaignConfig, i: int, t: int, part_dir: str) -> tuple[int, int]:
    trace = run_unit(config, i, t)
    _atomic_write(Path(part_dir) / f"try_{t:05d}.csv", format_try(trace))
    return i, t


def run_campaign(config: CampaignConfig, output_dir=None) -> dict:
    """Run (or resume) a campaign into ``output_dir`` and return its manifest.

    Finished tries are kept, so an interrupted run picks up where it stopped
    and produces the same bytes as an uninterrupted one.
    """
    out = Path(output_dir) if output_dir is not None else default_output_dir(config)
    try:
        for sub in ("problems", "traces", "parts", "reports"):
            (out / sub).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise StoreError(f"cannot create store {out}: {e}") from e

    manifest = _manifest(config)
    mpath = out / MANIFEST
    if mpath.exists():
        old = json.loads(mpath.read_text())
        if old.get("config") != manifest["config"]:
            raise StoreError(f"{mpath} belongs to a different configuration; refusing to resume")
    _atomic_write(mpath, json.dumps(manifest, indent=1) + "\n")
    started = time.time()

    todo = []
    for i in range(config.problems):
        cnf_path, trace_path, part_dir = _paths(out, i)
        if not cnf_path.exists():
            _atomic_write(cnf_path, emit_dimacs(problem(config, i)))
        if trace_path.exists():
            continue
        part_dir.mkdir(parents=True, exist_ok=True)
        todo += [(i, t) for t in range(config.tries) if not (part_dir / f"try_{t:05d}.csv").exists()]
    log.info("%s: %d work units to run", out, len(todo))

    with open(out / "completed.log", "a") as journal:
        if config.workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                futures = [pool.submit(_unit_to_part, config, i, t, str(_paths(out, i)[2])) for i, t in todo]
                for fut in futures:
                    i, t = fut.result()
                    journal.write(f"{i},{t}\n")
        else:
            for i, t in todo:
                _unit_to_part(config, i, t, str(_paths(out, i)[2]))
                journal.write(f"{i},{t}\n")
                journal.flush()

    _seal(config, out)
    manifest["timing"] = {"started": started, "finished": time.time(), "elapsed_s": time.time() - started}
    manifest["sealed"] = True
    _atomic_write(mpath, json.dumps(manifest, indent=1) + "\n")
    return manifest


def _seal(config: CampaignConfig, out: Path):
    # assemble each problem's parts, in try order, into its trace file
    for i in range(config.problems):
        _, trace_path, part_dir = _paths(out, i)
        if trace_path.exists():
            continue
        parts = [part_dir / f"try_{t:05d}.csv" for t in range(config.tries)]
        missing = [p for p in parts if not p.exists()]
        if missing:
            raise StoreError(f"problem {i}: missing try files {[str(p) for p in missing]}")
        text = file_header(i, config.num_vars, config.num_clauses, config.k)
        text += "".join(p.read_text() for p in parts)
        _atomic_write(trace_path, text)
        for p in parts:
            p.unlink()
        part_dir.rmdir()
    parts_root = out / "parts"
    if parts_root.exists() and not any(parts_root.iterdir()):
        parts_root.rmdir()
    (out / "completed.log").unlink(missing_ok=True)


# ---------------------------------------------------------------- loading


class Store:
    """Read access to a sealed campaign directory."""

    def __init__(self, path):
        self.path = Path(path)
        mpath = self.path / MANIFEST
        if not mpath.exists():
            raise StoreError(f"no campaign manifest at {mpath}")
        self.manifest = json.loads(mpath.read_text())
        self.config = CampaignConfig.from_dict(self.manifest["config"])
        self._traces: list[Trace] | None = None

    @property
    def name(self) -> str:
        return self.path.name

    def formula(self, i: int) -> Formula:
        return parse_dimacs(_paths(self.path, i)[0].read_text())

    def problem_traces(self, i: int) -> list[Trace]:
        path = _paths(self.path, i)[1]
        if not path.exists():
            raise StoreError(f"trace file {path} missing; campaign not sealed?")
        traces = read_traces(path)
        c = self.config
        for t in traces:
            if (t.num_vars, t.num_clauses, t.k, t.problem_id) != (c.num_vars, c.num_clauses, c.k, i):
                raise StoreError(f"{path}: trace parameters do not match the manifest")
        return traces

    def traces(self) -> list[Trace]:
        if self._traces is None:
            self._traces = [t for i in range(self.config.problems) for t in self.problem_traces(i)]
        return self._traces

    def verify(self) -> None:
        """Check every stored trace against a fresh replay of its seed."""
        for i in range(self.config.problems):
            if self.formula(i) != problem(self.config, i):
                raise StoreError(f"problem {i} does not regenerate from its seed")
            for t in self.problem_traces(i):
                if t != run_unit(self.config, i, t.try_id):
                    raise StoreError(f"problem {i} try {t.try_id} does not replay")
