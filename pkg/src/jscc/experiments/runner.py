"""
Exact error-bound evaluation, Monte Carlo estimation of the block error
probability, and parameter sweeps.

Monte Carlo trials are split into fixed-size blocks.  Block ``b`` draws
everything (source blocks, codes, permutations, dilutions, channel
noise) from the substream ``(seed, 0, b)``, so results do not depend on
how many threads run the blocks.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..algebra import all_vectors, index_weights, make_rng
from ..codes import LinearCode, as_ensemble, goodness, sample_code
from ..errors import BudgetExceededError, ConfigError, JSCCError, check_budget
from ..scheme import (
    SchemeInstance,
    block_digits,
    encoder_space,
    encoder_table,
    map_decisions,
    sn_margin,
    threshold_decisions,
)
from .config import ExperimentConfig, build_instance, config_from_dict

BLOCK_SIZE = 1024
WILSON_Z = 1.959963984540054

_TRIAL_STREAM = 0
_GOODNESS_STREAM = 1

CSV_COLUMNS = (
    "n", "l", "m", "q", "rate", "gamma", "channel", "param", "trials", "seed",
    "eps_map", "eps_map_ci", "eps_thr", "eps_thr_ci",
    "bound_prob", "bound_exp", "bound_rhs", "max_alpha", "log_rate", "runtime_ms",
    "status",
)


@dataclass
class ExperimentResult:
    n: int
    l: int
    m: int
    q: int
    rate: float
    gamma: float
    channel: str
    param: float | None
    trials: int
    seed: int
    eps_map: float = math.nan
    eps_map_ci: float = math.nan
    eps_thr: float = math.nan
    eps_thr_ci: float = math.nan
    bound_prob: float = math.nan
    bound_exp: float = math.nan
    bound_rhs: float = math.nan
    max_alpha: float = math.nan
    log_rate: float = math.nan
    runtime_ms: float = math.nan
    status: str = "ok"

    def as_row(self, timing: bool = True) -> dict:
        row = asdict(self)
        if not timing:
            row["runtime_ms"] = None
        return row


def wilson_interval(k: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes out of ``n``."""
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def wilson_halfwidth(k: int, n: int) -> float:
    lo, hi = wilson_interval(k, n)
    return (hi - lo) / 2


# exact evaluation


def lemma2_bound(inst: SchemeInstance) -> tuple[float, float, float]:
    """
    ``(prob_term, exp_term, rhs)``: the probability that ``(V, X, Y)`` falls
    outside the decoding set, computed by enumerating every triple under
    ``P_V P_{X|V} W^m``, plus ``exp(-n gamma)``.
    """
    check_budget("error bound", inst.n_blocks * inst.n_inputs * inst.n_outputs, inst.budget)
    log_w = inst.channel.log_matrix_m(inst.budget)
    w = np.exp(log_w)
    log_py = inst.log_output_law[None, :]
    cond = inst.quant.conditional_matrix()
    pv = inst.source.pmf
    log_pv = inst.source.log_pmf
    log_beta = inst.log_beta_prime_table
    total = 0.0
    for vi in range(inst.n_blocks):
        if pv[vi] == 0:
            continue
        xs = np.flatnonzero(cond[vi] > 0)
        margin = sn_margin(log_w[xs], log_py, log_pv[vi], log_beta[vi, xs][:, None], inst.n, inst.gamma)
        outside = (w[xs] * (margin <= 0)).sum(axis=1)
        total += pv[vi] * float(cond[vi, xs] @ outside)
    exp_term = math.exp(-inst.n * inst.gamma)
    prob_term = min(1.0, total)
    return float(prob_term), exp_term, float(prob_term + exp_term)


def exact_error_probability(inst: SchemeInstance) -> tuple[float, float]:
    """
    Ensemble-average block error probability of the MAP and threshold
    decoders, by enumerating every encoder realization and every output.
    """
    e = as_ensemble(inst.code)
    size = e.support_size * math.factorial(inst.n) * math.factorial(inst.l) * inst.q**inst.l
    check_budget("exact error probability", size * inst.n_blocks * inst.n_outputs, inst.budget)
    w_m = inst.channel.matrix_m(inst.budget)
    pv = inst.source.pmf
    y_dig = all_vectors(inst.m, inst.channel.n_out)
    ny = len(y_dig)
    eps_map = eps_thr = 0.0
    v_idx = np.arange(inst.n_blocks)
    for rc, weight in encoder_space(inst):
        table = encoder_table(inst, rc)
        tables = np.broadcast_to(table, (ny, inst.n_blocks))
        received = w_m[table]  # (n_blocks, ny)
        for dec, acc in ((map_decisions, "map"), (threshold_decisions, "thr")):
            decided = dec(inst, tables, y_dig)
            wrong = decided[None, :] != v_idx[:, None]
            err = float(pv @ (received * wrong).sum(axis=1))
            if acc == "map":
                eps_map += float(weight) * err
            else:
                eps_thr += float(weight) * err
    return eps_map, eps_thr


# Monte Carlo


def batch_encoder_tables(inst: SchemeInstance, G, s_in, s_out, dil) -> np.ndarray:
    """Encoder tables ``(B, q**n)`` for per-trial codes, permutations and dilutions."""
    q = inst.q
    vs = all_vectors(inst.n, q)
    vp = np.transpose(vs[:, s_in], (1, 0, 2))  # (B, Nv, n)
    u = np.matmul(vp, G) % q
    u = np.take_along_axis(u, s_out[:, None, :], axis=2)
    u = (u + dil[:, None, :]) % q
    ui = u @ index_weights(inst.l, q)
    return inst.quant.table[np.arange(inst.n_blocks)[None, :], ui]


def _draw_codes(inst: SchemeInstance, size: int, rng) -> np.ndarray:
    code = inst.code
    if isinstance(code, LinearCode):
        return np.broadcast_to(code.as_array(), (size, inst.n, inst.l))
    if code.kind == "uniform":
        return rng.integers(0, inst.q, size=(size, inst.n, inst.l))
    weights = np.array([float(w) for _, w in code.members])
    picks = rng.choice(len(code.members), size=size, p=weights / weights.sum())
    stack = np.stack([c.as_array() for c, _ in code.members])
    return stack[picks]


def _draw_perms(length: int, size: int, enabled: bool, rng) -> np.ndarray:
    base = np.tile(np.arange(length), (size, 1))
    return rng.permuted(base, axis=1) if enabled else base


def run_block(inst: SchemeInstance, size: int, rng) -> tuple[int, int]:
    """Simulate ``size`` trials; return (MAP errors, threshold errors)."""
    v_true = inst.source.sample(size, rng)
    G = _draw_codes(inst, size, rng)
    s_in = _draw_perms(inst.n, size, inst.permute_in, rng)
    s_out = _draw_perms(inst.l, size, inst.permute_out, rng)
    if inst.dilute:
        dil = rng.integers(0, inst.q, size=(size, inst.l))
    else:
        dil = np.zeros((size, inst.l), dtype=np.int64)
    noise = rng.random((size, inst.m))

    per = max(1, 2**22 // (inst.n_blocks * max(inst.n, inst.l, inst.m)))
    map_err = thr_err = 0
    for start in range(0, size, per):
        sl = slice(start, start + per)
        tables = batch_encoder_tables(inst, G[sl], s_in[sl], s_out[sl], dil[sl])
        rows = np.arange(tables.shape[0])
        x_true = block_digits(tables[rows, v_true[sl]], inst.m, inst.channel.n_in)
        y = inst.channel.transmit(x_true, noise[sl])
        map_err += int((map_decisions(inst, tables, y) != v_true[sl]).sum())
        thr_err += int((threshold_decisions(inst, tables, y) != v_true[sl]).sum())
    return map_err, thr_err


def monte_carlo(inst: SchemeInstance, trials: int, seed: int, threads: int = 1, block_size: int = BLOCK_SIZE):
    """Error counts ``(map_errors, threshold_errors)`` over ``trials`` trials."""
    # warm shared caches before any worker touches them
    inst.log_output_law, inst.log_beta_prime_table, inst.source.log_pmf  # noqa: B018
    blocks = [
        (b, min(block_size, trials - b * block_size))
        for b in range(math.ceil(trials / block_size))
    ]

    def work(item):
        b, size = item
        return run_block(inst, size, make_rng(seed, _TRIAL_STREAM, b))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(item) for item in blocks]
    return sum(r[0] for r in results), sum(r[1] for r in results)


def code_goodness(cfg: ExperimentConfig, inst: SchemeInstance) -> tuple[float, float]:
    if cfg.goodness == "none":
        return math.nan, math.nan
    code = inst.code
    if cfg.goodness == "sampled" and not isinstance(code, LinearCode):
        code = sample_code(code, make_rng(cfg.seed, _GOODNESS_STREAM))
    top, log_rate = goodness(code, budget=inst.budget)
    return float(top), log_rate


def _result_stub(cfg: ExperimentConfig) -> ExperimentResult:
    return ExperimentResult(
        n=cfg.n, l=cfg.l, m=cfg.m, q=cfg.q, rate=cfg.n / cfg.m, gamma=cfg.gamma,
        channel=cfg.channel["kind"], param=cfg.channel.get("param"),
        trials=cfg.trials, seed=cfg.seed,
    )


def simulate(cfg: ExperimentConfig, inst: SchemeInstance | None = None, with_bound: bool = True) -> ExperimentResult:
    """
    Monte Carlo error rates for both decoders, the exact bound, and code
    goodness.  When the bound or goodness alone is over budget it is left
    as NaN and the reason goes to ``status``; the error rates are still
    estimated.
    """
    t0 = time.perf_counter()
    if inst is None:
        inst = build_instance(cfg)
    res = _result_stub(cfg)
    skipped = []
    if with_bound:
        try:
            res.bound_prob, res.bound_exp, res.bound_rhs = lemma2_bound(inst)
        except BudgetExceededError as exc:
            skipped.append(f"bound skipped: {exc}")
    try:
        res.max_alpha, res.log_rate = code_goodness(cfg, inst)
    except BudgetExceededError as exc:
        skipped.append(f"goodness skipped: {exc}")
    if skipped:
        res.status = "; ".join(skipped)
    k_map, k_thr = monte_carlo(inst, cfg.trials, cfg.seed, cfg.threads)
    res.eps_map = k_map / cfg.trials
    res.eps_thr = k_thr / cfg.trials
    res.eps_map_ci = wilson_halfwidth(k_map, cfg.trials)
    res.eps_thr_ci = wilson_halfwidth(k_thr, cfg.trials)
    res.runtime_ms = (time.perf_counter() - t0) * 1000
    return res


def bound_only(cfg: ExperimentConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    inst = build_instance(cfg)
    res = _result_stub(cfg)
    res.trials = 0
    res.bound_prob, res.bound_exp, res.bound_rhs = lemma2_bound(inst)
    res.max_alpha, res.log_rate = code_goodness(cfg, inst)
    res.runtime_ms = (time.perf_counter() - t0) * 1000
    return res


# sweeps


def grid_points(cfg: ExperimentConfig) -> list[dict]:
    """Cartesian product of the sweep grid, in a fixed key order."""
    keys = [k for k in ("n", "l", "m", "rate", "gamma", "param") if k in cfg.sweep]
    return [dict(zip(keys, combo)) for combo in itertools.product(*(cfg.sweep[k] for k in keys))]


def point_config(cfg: ExperimentConfig, point: dict) -> ExperimentConfig:
    """
    Apply one grid point.  ``rate`` sets ``m = round(n / rate)``; when the
    quantization preset ties ``l`` to ``m`` and ``l`` is not on the grid,
    ``l`` follows ``m``.
    """
    data = cfg.to_dict()
    data["sweep"] = {}
    for k in ("n", "l", "m", "gamma"):
        if k in point:
            data[k] = point[k]
    if "rate" in point:
        data["m"] = max(1, round(data["n"] / point["rate"]))
    if "param" in point:
        data["channel"] = dict(data["channel"], param=point["param"])
    preset = data["quant"].get("preset")
    if "l" not in point and preset in ("channel-coding", "source-coding", "jscc-default") and (
        "m" in point or "rate" in point
    ):
        data["l"] = data["m"]
    if "l" not in point and preset == "deterministic" and "n" in point:
        data["l"] = data["n"]
    if data["source"].get("kind") == "explicit" and "n" in point:
        raise ConfigError("explicit sources cannot be swept over n")
    return config_from_dict(data)


def sweep(cfg: ExperimentConfig) -> list[ExperimentResult]:
    """One result per grid point; failures are recorded in ``status`` and the sweep continues."""
    rows = []
    for point in grid_points(cfg) or [{}]:
        try:
            pc = point_config(cfg, point)
        except JSCCError as exc:
            stub = _result_stub(cfg)
            for k, v in point.items():
                if hasattr(stub, k):
                    setattr(stub, k, v)
            stub.status = f"error: {exc}"
            rows.append(stub)
            continue
        try:
            rows.append(simulate(pc))
        except JSCCError as exc:
            stub = _result_stub(pc)
            stub.status = f"error: {exc}"
            rows.append(stub)
    return rows


# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv(results, timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        row = r.as_row(timing)
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def results_to_json(results, timing: bool = True) -> str:
    rows = [{c: _json_safe(r.as_row(timing)[c]) for c in CSV_COLUMNS} for r in results]
    return json.dumps(rows, indent=2) + "\n"


__all__ = [
    "BLOCK_SIZE",
    "CSV_COLUMNS",
    "ExperimentResult",
    "bound_only",
    "exact_error_probability",
    "grid_points",
    "lemma2_bound",
    "monte_carlo",
    "point_config",
    "results_to_csv",
    "results_to_json",
    "run_block",
    "simulate",
    "sweep",
    "wilson_halfwidth",
    "wilson_interval",
]
