"""Driving the whole search: enumerate d, solve, scan, collect, checkpoint."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import multiprocessing as mp
import os
from dataclasses import asdict, dataclass, field
from typing import Iterator

import gmpy2

from . import infrastructure as infra
from . import oracle
from .errors import CheckpointError, GRHCheckFailed, RegulatorMethodExhausted
from .pellsolve import allowed_primes, get_case, prefilter, solvable, unit_data
from .sequences import family_bound
from .smoothness import member_size_log, reconstruct_x, scan_family, trial_factor_smooth

CHECKPOINT_VERSION = 1
STATUSES = ("processed", "unsolvable", "filtered", "over_ceiling")

# composite cases: (sub-case, scale) -- an x from the sub-case maps to scale * x
COMPOSITES = {
    "x2+4": (("x2+1", 2), ("x2+4odd", 1)),
    "x2-4": (("x2-1", 2), ("x2-4odd", 1)),
}
ALL_CASES = ("x2-1", "x2+1", "x2+2", "x2-2", "x2+4odd", "x2-4odd", "x2+4", "x2-4")


@dataclass
class SearchConfig:
    case: str
    bound: int
    ceiling: int = infra.DEFAULT_CEILING
    workers: int = 1
    checkpoint: str | None = None
    checkpoint_every: int = 1024
    precision_bits: int | None = None
    grh_z: int = 10**6
    stop_after: int | None = None  # stop once this many subsets are done (for resumability tests)

    def __post_init__(self):
        if self.bound < 3:
            raise ValueError("bound must be at least 3")
        if self.case not in ALL_CASES:
            raise ValueError(f"unknown case {self.case!r}; choose from {ALL_CASES}")
        if self.workers < 1 or self.checkpoint_every < 1:
            raise ValueError("workers and checkpoint_every must be positive")

    def primes(self) -> list[int]:
        return allowed_primes(get_case(self.case), self.bound)

    def key(self) -> dict:
        return {"case": self.case, "bound": self.bound, "ceiling": str(self.ceiling)}


@dataclass(frozen=True)
class SolutionRecord:
    case: str
    d: int
    N: int
    k: int
    x: int
    y: int
    factorization: tuple[tuple[int, int], ...]
    verified: bool

    def fact_str(self) -> str:
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factorization)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "d": str(self.d),
            "N": self.N,
            "k": self.k,
            "x": str(self.x),
            "y": str(self.y),
            "factorization": self.fact_str(),
            "verified": self.verified,
        }

    @classmethod
    def from_dict(cls, row: dict) -> "SolutionRecord":
        fac = []
        if row["factorization"]:
            for part in str(row["factorization"]).split("*"):
                p, _, e = part.partition("^")
                fac.append((int(p), int(e) if e else 1))
        verified = row["verified"]
        if isinstance(verified, str):
            verified = verified.lower() == "true"
        return cls(row["case"], int(row["d"]), int(row["N"]), int(row["k"]), int(row["x"]), int(row["y"]), tuple(fac), verified)


@dataclass
class DOutcome:
    d: int
    status: str
    records: list[SolutionRecord] = field(default_factory=list)
    max_power: int | None = None


@dataclass
class ResultSet:
    case: str
    bound: int
    records: list[SolutionRecord] = field(default_factory=list)
    per_d: dict[int, tuple[int, int]] = field(default_factory=dict)  # d -> (count, max power)
    ledger: dict[str, int] = field(default_factory=lambda: {s: 0 for s in STATUSES})
    cursor: int = 0
    total_subsets: int = 0

    @property
    def complete(self) -> bool:
        return self.cursor == self.total_subsets

    @property
    def count(self) -> int:
        return len(self.records)

    def xs(self) -> list[int]:
        return [r.x for r in self.records]

    def parity(self) -> tuple[int, int]:
        odd = sum(r.x % 2 for r in self.records)
        return odd, self.count - odd

    def sort(self) -> None:
        self.records.sort(key=lambda r: (r.x, r.d))

    def add(self, out: DOutcome) -> None:
        self.ledger[out.status] += 1
        if out.records:
            self.records.extend(out.records)
            self.per_d[out.d] = (len(out.records), out.max_power)


# --- enumeration ----------------------------------------------------------------


def enumerate_d(config: SearchConfig, start: int = 0) -> Iterator[tuple[int, int, int]]:
    """Yield (cursor, subset mask, d) for all nonempty subsets in Gray-code order.

    The cursor of the i-th subset is i (1-based); resuming from ``start``
    continues with cursor ``start + 1``.
    """
    primes = config.primes()
    n = len(primes)
    i = start
    g = i ^ (i >> 1)
    d = math.prod(p for j, p in enumerate(primes) if g >> j & 1)
    while i < (1 << n) - 1:
        i += 1
        bit = (i & -i).bit_length() - 1
        if g >> bit & 1:
            d //= primes[bit]
        else:
            d *= primes[bit]
        g ^= 1 << bit
        yield i, g, d


def subset_count(config: SearchConfig) -> int:
    return (1 << len(config.primes())) - 1


# --- per-d processing -----------------------------------------------------------


def _factor_f(d: int, y: int, bound: int) -> tuple[tuple[int, int], ...] | None:
    fd = trial_factor_smooth(d, bound)
    fy = trial_factor_smooth(y, bound)
    if fd is None or fy is None:
        return None
    fac = dict(fd)
    for p, e in fy.items():
        fac[p] = fac.get(p, 0) + 2 * e
    return tuple(sorted(fac.items()))


def process_d(config: SearchConfig, d: int) -> DOutcome:
    """All solutions x of the configured case whose f(x) has squarefree part d."""
    case = get_case(config.case)
    cheap = _cheap_outcome(case, config, d)
    if cheap is not None:
        return cheap
    try:
        ud = unit_data(d, config.ceiling, config.precision_bits)
    except RegulatorMethodExhausted:
        return DOutcome(d, "over_ceiling")
    family = solvable(case, d, ud)
    if family is None:
        return DOutcome(d, "unsolvable")

    primes = allowed_primes(case, config.bound)
    records = []
    for k, verdict in scan_family(family, primes, family_bound(family, config.bound)):
        y = verdict.value()
        x = reconstruct_x(d, y, family.N)
        if case.f(x) < 2 or x < 1:
            continue
        fac = _factor_f(d, y, config.bound)
        records.append(SolutionRecord(case.name, d, family.N, k, x, y, fac or (), fac is not None))

    conv = oracle.convergent_solutions(d, family.N, config.grh_z)
    if conv is not None:
        ys = sorted(q for _, q in conv)
        expected = []
        for k in family.indices(len(ys) + 1):
            if member_size_log(family, k) > math.log(config.grh_z) + 1:
                break
            y = family.member_exact(k)[1]
            if y < config.grh_z:
                expected.append(y)
        if expected != ys:
            raise GRHCheckFailed(f"d={d}: convergent solutions {ys} disagree with the family {expected}")
    max_power = max((r.k for r in records), default=None)
    return DOutcome(d, "processed", records, max_power)


def _cheap_outcome(case, config: SearchConfig, d: int) -> DOutcome | None:
    """Outcome for radicands rejected without any unit computation."""
    if not prefilter(case, d):
        return DOutcome(d, "filtered")
    if d > config.ceiling:
        return DOutcome(d, "over_ceiling")
    return None


def _worker(args) -> DOutcome:
    config, d = args
    return process_d(config, d)


# --- checkpoints ----------------------------------------------------------------


def _payload(config: SearchConfig, res: ResultSet) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "config": config.key(),
        "cursor": res.cursor,
        "ledger": res.ledger,
        "per_d": {str(d): list(v) for d, v in sorted(res.per_d.items())},
        "records": [r.to_dict() for r in res.records],
    }


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def write_checkpoint(path: str, config: SearchConfig, res: ResultSet) -> None:
    payload = _payload(config, res)
    payload["digest"] = _digest(payload)
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path: str, config: SearchConfig) -> ResultSet:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    digest = payload.pop("digest", None)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"checkpoint {path} has unsupported version {payload.get('version')}")
    if digest != _digest(payload):
        raise CheckpointError(f"checkpoint {path} is corrupt (digest mismatch); refusing to resume")
    if payload["config"] != config.key():
        raise CheckpointError(f"checkpoint {path} belongs to another run: {payload['config']}")
    res = ResultSet(config.case, config.bound, total_subsets=subset_count(config))
    res.cursor = payload["cursor"]
    res.ledger = {s: int(payload["ledger"][s]) for s in STATUSES}
    res.per_d = {int(d): tuple(v) for d, v in payload["per_d"].items()}
    res.records = [SolutionRecord.from_dict(r) for r in payload["records"]]
    if sum(res.ledger.values()) != res.cursor:
        raise CheckpointError(f"checkpoint {path}: ledger does not cover the cursor")
    return res


# --- running --------------------------------------------------------------------


def _chunks(config: SearchConfig, start: int) -> Iterator[list[tuple[int, int]]]:
    chunk: list[tuple[int, int]] = []
    for i, _, d in enumerate_d(config, start):
        chunk.append((i, d))
        if len(chunk) == config.checkpoint_every:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _run_simple(config: SearchConfig) -> ResultSet:
    if config.checkpoint and os.path.exists(config.checkpoint):
        res = read_checkpoint(config.checkpoint, config)
    else:
        res = ResultSet(config.case, config.bound, total_subsets=subset_count(config))
    case = get_case(config.case)
    pool = mp.get_context("fork").Pool(config.workers) if config.workers > 1 else None
    try:
        for chunk in _chunks(config, res.cursor):
            if config.stop_after is not None and res.cursor >= config.stop_after:
                break
            outs: list[DOutcome | None] = [_cheap_outcome(case, config, d) for _, d in chunk]
            args = [(config, d) for (_, d), o in zip(chunk, outs) if o is None]
            solved = pool.imap(_worker, args, chunksize=8) if pool else map(_worker, args)
            for out in outs:
                res.add(out if out is not None else next(solved))
            res.cursor = chunk[-1][0]
            if config.checkpoint:
                write_checkpoint(config.checkpoint, config, res)
    finally:
        if pool:
            pool.terminate()
            pool.join()
    res.sort()
    return res


def _lift(rec: SolutionRecord, case: str, scale: int) -> SolutionRecord:
    if scale == 1:
        return SolutionRecord(case, rec.d, rec.N, rec.k, rec.x, rec.y, rec.factorization, rec.verified)
    fac = dict(rec.factorization)
    fac[2] = fac.get(2, 0) + 2
    return SolutionRecord(case, rec.d, 4 * rec.N, rec.k, 2 * rec.x, 2 * rec.y, tuple(sorted(fac.items())), rec.verified)


def run(config: SearchConfig) -> ResultSet:
    """Run a full search; deterministic regardless of worker count."""
    if config.case not in COMPOSITES:
        return _run_simple(config)
    merged = ResultSet(config.case, config.bound)
    for sub, scale in COMPOSITES[config.case]:
        ck = f"{config.checkpoint}.{sub}" if config.checkpoint else None
        part = _run_simple(
            SearchConfig(sub, config.bound, config.ceiling, config.workers, ck, config.checkpoint_every,
                         config.precision_bits, config.grh_z, config.stop_after)
        )
        merged.records += [_lift(r, config.case, scale) for r in part.records]
        for d, (cnt, mp_) in part.per_d.items():
            c0, m0 = merged.per_d.get(d, (0, None))
            merged.per_d[d] = (c0 + cnt, mp_ if m0 is None else max(m0, mp_))
        for s in STATUSES:
            merged.ledger[s] += part.ledger[s]
        merged.cursor += part.cursor
        merged.total_subsets += part.total_subsets
    merged.sort()
    return merged


# --- output ---------------------------------------------------------------------

CSV_FIELDS = ("case", "d", "N", "k", "x", "y", "factorization", "verified")


def to_csv(res: ResultSet) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in sorted(res.records, key=lambda r: (r.x, r.d)):
        row = r.to_dict()
        row["verified"] = "true" if r.verified else "false"
        w.writerow(row)
    return buf.getvalue()


def to_json(res: ResultSet) -> str:
    data = {
        "case": res.case,
        "bound": res.bound,
        "cursor": res.cursor,
        "total_subsets": res.total_subsets,
        "ledger": res.ledger,
        "per_d": {str(d): list(v) for d, v in sorted(res.per_d.items())},
        "records": [r.to_dict() for r in sorted(res.records, key=lambda r: (r.x, r.d))],
    }
    return json.dumps(data, indent=1)


def load_results(path: str) -> ResultSet:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        res = ResultSet(data["case"], data["bound"], cursor=data["cursor"], total_subsets=data["total_subsets"])
        res.ledger = {s: int(data["ledger"][s]) for s in STATUSES}
        res.per_d = {int(d): tuple(v) for d, v in data["per_d"].items()}
        res.records = [SolutionRecord.from_dict(r) for r in data["records"]]
        return res
    rows = list(csv.DictReader(io.StringIO(text)))
    records = [SolutionRecord.from_dict(r) for r in rows]
    case = records[0].case if records else ""
    res = ResultSet(case, 0, records)
    for r in records:
        c, m = res.per_d.get(r.d, (0, r.k))
        res.per_d[r.d] = (c + 1, max(m, r.k))
    return res


# --- summary --------------------------------------------------------------------


def perfect_power_root(x: int, r: int) -> int | None:
    w, exact = gmpy2.iroot(x, r)
    return int(w) if exact else None


def summarize(res: ResultSet) -> dict:
    xs = sorted(res.xs())
    odd, even = res.parity()
    powers: dict[int, tuple[int, int]] = {}  # r -> (largest x that is an r-th power, its root)
    for x in xs:
        for r in range(2, max(2, x.bit_length()) + 1):
            w = perfect_power_root(x, r) if x > 1 else None
            if w is not None and w >= 2:
                if r not in powers or x > powers[r][0]:
                    powers[r] = (x, w)
    most = max(res.per_d.items(), key=lambda kv: (kv[1][0], -kv[0]), default=None)
    deepest = max(res.per_d.items(), key=lambda kv: (kv[1][1], -kv[0]), default=None)
    return {
        "case": res.case,
        "bound": res.bound,
        "count": len(xs),
        "odd": odd,
        "even": even,
        "largest": xs[::-1][:3],
        "perfect_powers": {r: {"x": x, "root": w} for r, (x, w) in sorted(powers.items())},
        "largest_r": max(powers) if powers else 0,
        "most_solutions": {"d": most[0], "count": most[1][0]} if most else None,
        "largest_power": {"d": deepest[0], "k": deepest[1][1]} if deepest else None,
        "ledger": dict(res.ledger),
        "complete": res.complete,
    }


def summary_text(s: dict) -> str:
    lines = [
        f"case {s['case']}, B={s['bound']}: {s['count']} solutions, {s['odd']} odd, {s['even']} even",
        f"largest: {', '.join(map(str, s['largest'])) or '-'}",
    ]
    for r, v in s["perfect_powers"].items():
        lines.append(f"largest perfect power, r={r}: x={v['x']} = {v['root']}^{r}")
    if s["most_solutions"]:
        lines.append(f"most solutions: d={s['most_solutions']['d']} ({s['most_solutions']['count']})")
        lines.append(f"largest power index: d={s['largest_power']['d']} (k={s['largest_power']['k']})")
    lines.append("ledger: " + ", ".join(f"{k}={v}" for k, v in s["ledger"].items()))
    if not s["complete"]:
        lines.append("WARNING: run incomplete")
    return "\n".join(lines)


def solution_dict(res: ResultSet) -> dict:
    return asdict(res)
