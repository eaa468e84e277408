"""Heat-bath Glauber dynamics for the edge-triangle Gibbs measure.

One step picks a uniform vertex pair, counts its common neighbours ``w`` and
sets the edge present with probability ``logistic(coef * w + h)``. With
``normalization="hamiltonian"`` (default) ``coef = alpha / n``, which is the
exact conditional law under ``H = (alpha/n) T + h E``. ``"literal"`` uses
``coef = alpha``, the update rule taken at face value without the 1/n.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from .graph import AdjacencyState, common_neighbors_kernel, hamiltonian_et, new_state, set_edge_kernel
from .landscape import ModelParams, _as_params

RNG_ALGORITHM = "numpy.PCG64 via SeedSequence.spawn (numpy %s)" % np.__version__
NORMALIZATIONS = ("hamiltonian", "literal")


def update_coefficient(alpha: float, n: int, normalization: str = "hamiltonian") -> float:
    if normalization == "hamiltonian":
        return alpha / n
    if normalization == "literal":
        return alpha
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


@njit(cache=True, nogil=True)
def _step(rows, n, counts, coef, h, rng):
    a = np.int64(rng.random() * n)
    b = np.int64(rng.random() * (n - 1))
    if b >= a:
        b += 1
    w = common_neighbors_kernel(rows, a, b)
    p_set = 1.0 / (1.0 + math.exp(-(coef * w + h)))
    de, dt = set_edge_kernel(rows, a, b, rng.random() < p_set)
    counts[0] += de
    counts[1] += dt
    return de != 0


@njit(cache=True, nogil=True)
def _advance(rows, n, counts, coef, h, steps, rng):
    flips = 0
    for _ in range(steps):
        if _step(rows, n, counts, coef, h, rng):
            flips += 1
    return flips


@njit(cache=True, nogil=True)
def _sample(rows, n, counts, coef, h, thin, num, rng, out_e, out_t):
    for j in range(num):
        for _ in range(thin):
            _step(rows, n, counts, coef, h, rng)
        out_e[j] = counts[0]
        out_t[j] = counts[1]


def glauber_step(state: AdjacencyState, p, rng, normalization: str = "hamiltonian") -> bool:
    """One heat-bath update in place; returns whether the edge changed."""
    p = _as_params(p)
    counts = np.array([state.edge_count, state.triangle_count], dtype=np.int64)
    coef = update_coefficient(p.alpha, state.n, normalization)
    flipped = bool(_step(state.rows, state.n, counts, coef, p.h, rng))
    state.edge_count, state.triangle_count = int(counts[0]), int(counts[1])
    return flipped


def advance(state: AdjacencyState, p, rng, steps: int, normalization: str = "hamiltonian") -> int:
    p = _as_params(p)
    counts = np.array([state.edge_count, state.triangle_count], dtype=np.int64)
    coef = update_coefficient(p.alpha, state.n, normalization)
    flips = _advance(state.rows, state.n, counts, coef, p.h, int(steps), rng)
    state.edge_count, state.triangle_count = int(counts[0]), int(counts[1])
    return int(flips)


def default_burn_in(n: int) -> int:
    return math.ceil(10 * n * n * math.log(n))


@dataclass
class ChainConfig:
    n: int
    alpha: float
    h: float
    seed: int = 0
    burn_in_steps: int | None = None
    thin_steps: int | None = None
    num_samples: int = 1000
    init: str = "empty"
    init_p: float = 0.5
    normalization: str = "hamiltonian"

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need n >= 3")
        if self.burn_in_steps is None:
            self.burn_in_steps = default_burn_in(self.n)
        if self.thin_steps is None:
            self.thin_steps = self.n * self.n
        if min(self.burn_in_steps, self.thin_steps, self.num_samples) < 1:
            raise ValueError("burn-in, thinning and sample counts must be >= 1")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.h)


@dataclass
class SampleBatch:
    config: ChainConfig
    step: np.ndarray
    edge_count: np.ndarray
    triangle_count: np.ndarray
    wall_time: float = 0.0
    rng_algorithm: str = RNG_ALGORITHM
    chain: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.step)

    def triangle_density(self) -> np.ndarray:
        """``6 T / n^3`` per sample."""
        return 6.0 * self.triangle_count / self.config.n**3

    def same_records(self, other: SampleBatch) -> bool:
        return (np.array_equal(self.step, other.step) and np.array_equal(self.edge_count, other.edge_count)
                and np.array_equal(self.triangle_count, other.triangle_count))

    def sidecar(self) -> dict:
        return {"config": asdict(self.config), "rng_algorithm": self.rng_algorithm,
                "chain": self.chain, "num_records": len(self), "wall_time": self.wall_time, **self.meta}

    def to_csv(self, path, sidecar: bool = True):
        data = np.column_stack([self.step, self.edge_count, self.triangle_count])
        np.savetxt(path, data, fmt="%d", delimiter=",", header="step,edge_count,triangle_count", comments="")
        if sidecar:
            with open(str(path) + ".json", "w") as fh:
                json.dump(self.sidecar(), fh, indent=2)

    @classmethod
    def from_csv(cls, path) -> SampleBatch:
        data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
        side_path = str(path) + ".json"
        with open(side_path) as fh:
            side = json.load(fh)
        cfg = ChainConfig(**side["config"])
        meta = {k: v for k, v in side.items() if k not in ("config", "rng_algorithm", "chain", "num_records", "wall_time")}
        return cls(cfg, data[:, 0], data[:, 1], data[:, 2], side.get("wall_time", 0.0),
                   side.get("rng_algorithm", RNG_ALGORITHM), side.get("chain", 0), meta)

    @classmethod
    def concatenate(cls, batches) -> SampleBatch:
        """Ordered merge of per-chain batches (chain order is preserved)."""
        batches = list(batches)
        first = batches[0]
        return cls(first.config,
                   np.concatenate([b.step for b in batches]),
                   np.concatenate([b.edge_count for b in batches]),
                   np.concatenate([b.triangle_count for b in batches]),
                   sum(b.wall_time for b in batches), first.rng_algorithm, -1,
                   {"chains": len(batches)})


def chain_rngs(seed: int, chains: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(chains)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _initial_state(cfg: ChainConfig, rng) -> AdjacencyState:
    if cfg.init == "bernoulli":
        return new_state(cfg.n, "bernoulli", cfg.init_p, seed=rng.integers(0, 2**63))
    return new_state(cfg.n, cfg.init)


def _run_with_rng(cfg: ChainConfig, rng, chain: int = 0) -> SampleBatch:
    t0 = time.perf_counter()
    state = _initial_state(cfg, rng)
    p = cfg.params
    coef = update_coefficient(p.alpha, cfg.n, cfg.normalization)
    counts = np.array([state.edge_count, state.triangle_count], dtype=np.int64)
    _advance(state.rows, cfg.n, counts, coef, p.h, cfg.burn_in_steps, rng)
    out_e = np.empty(cfg.num_samples, dtype=np.int64)
    out_t = np.empty(cfg.num_samples, dtype=np.int64)
    _sample(state.rows, cfg.n, counts, coef, p.h, cfg.thin_steps, cfg.num_samples, rng, out_e, out_t)
    steps = cfg.burn_in_steps + cfg.thin_steps * np.arange(1, cfg.num_samples + 1, dtype=np.int64)
    return SampleBatch(cfg, steps, out_e, out_t, time.perf_counter() - t0, chain=chain)


def run_chain(cfg: ChainConfig) -> SampleBatch:
    """Burn in, then record ``num_samples`` states every ``thin_steps`` steps.

    Fully determined by ``cfg.seed``: the chain draws from the first child of
    ``SeedSequence(seed)``, which is also chain 0 of :func:`run_chains`.
    """
    return _run_with_rng(cfg, chain_rngs(cfg.seed, 1)[0])


def max_threads() -> int:
    env = os.environ.get("ERGKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_chains(cfg: ChainConfig, chains: int, threads: int | None = None) -> list[SampleBatch]:
    """Independent chains on spawned PRNG streams; results in chain order."""
    rngs = chain_rngs(cfg.seed, chains)
    threads = min(threads or max_threads(), chains)
    if threads <= 1:
        return [_run_with_rng(cfg, r, i) for i, r in enumerate(rngs)]
    with ThreadPoolExecutor(threads) as pool:
        futures = [pool.submit(_run_with_rng, cfg, r, i) for i, r in enumerate(rngs)]
        return [f.result() for f in futures]


def update_probability(state: AdjacencyState, p, a: int, b: int, normalization: str = "hamiltonian") -> float:
    p = _as_params(p)
    w = state.common_neighbor_count(a, b)
    z = update_coefficient(p.alpha, state.n, normalization) * w + p.h
    return 1.0 / (1.0 + math.exp(-z))


def detailed_balance_check(state: AdjacencyState, p, pair, normalization: str = "hamiltonian") -> float:
    """``|p/(1-p) - exp(H(x+) - H(x-))|`` for the heat-bath probability ``p``.

    ``H`` is the edge-triangle Hamiltonian ``(alpha/n) T + h E``; the residual
    vanishes for the default normalization.
    """
    p = _as_params(p)
    a, b = pair
    pn = update_probability(state, p, a, b, normalization)
    plus, minus = state.copy(), state.copy()
    plus.set_edge(a, b, True)
    minus.set_edge(a, b, False)
    dh = hamiltonian_et(p, plus) - hamiltonian_et(p, minus)
    return abs(pn / (1.0 - pn) - math.exp(dh))
