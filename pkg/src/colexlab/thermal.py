"""Gibbs statistics of syndromes: exact sums and Metropolis sampling.

The Hamiltonian is ``H = -sum_i t_i s_i`` over the (overcomplete) generators.
The two generator types decouple, so everything is computed for the single
type that can flip the logical under study: Z-type logicals care about the
Z-generator syndrome, which is driven by X errors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
from numba import njit

from . import z2
from .code import CssCode, Pauli, Syndrome, _logical_support, _relevant_kind, critical_full, sign_full, toric_code
from .decode import DecodingError

EXACT_LIMIT = 20  # exact sums need fewer independent generators than this


@dataclass
class ThermalModel:
    """A code at inverse temperature ``beta`` with per-term couplings."""

    code: CssCode
    beta: float
    t_x: Optional[np.ndarray] = None
    t_z: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        self.t_x = self._fill(self.t_x, self.code.hx.rows)
        self.t_z = self._fill(self.t_z, self.code.hz.rows)

    @staticmethod
    def _fill(t, m):
        t = np.ones(m) if t is None else np.broadcast_to(np.asarray(t, dtype=float), (m,)).copy()
        if np.any(t <= 0):
            raise ValueError("couplings must be positive")
        return t

    def couplings(self, kind: str) -> np.ndarray:
        return self.t_z if kind == "Z" else self.t_x

    @property
    def t_min(self) -> float:
        return float(np.concatenate([self.t_x, self.t_z]).min())

    @property
    def t_max(self) -> float:
        return float(np.concatenate([self.t_x, self.t_z]).max())

    def with_beta(self, beta: float) -> "ThermalModel":
        return ThermalModel(self.code, beta, self.t_x, self.t_z)


def energy_full(m: ThermalModel, kind: str, nodes: np.ndarray) -> float:
    """Energy of the ``kind`` terms for an overcomplete excitation pattern."""
    t = m.couplings(kind)
    signs = 1.0 - 2.0 * np.asarray(nodes, dtype=float)
    return float(-(t * signs).sum())


def energy(m: ThermalModel, b) -> float:
    """``E_b`` for a basis syndrome, or a pair ``(z_syndrome, x_syndrome)``.

    Terms of a type that is not given are taken as unexcited.
    """
    parts = b if isinstance(b, (tuple, list)) else (b,)
    seen = {}
    for s in parts:
        seen[s.kind] = s
    total = 0.0
    for kind in ("Z", "X"):
        if kind in seen:
            total += energy_full(m, kind, m.code.expand(seen[kind]))
        else:
            total -= float(m.couplings(kind).sum())
    return total


# ---------------------------------------------------------------------------
# exact enumeration


def enumerate_syndromes(code: CssCode, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """All basis syndromes of one type (integer order) and their node patterns."""
    g = len(code.basis_of(kind))
    if g >= EXACT_LIMIT:
        raise ValueError(f"syndrome space 2^{g} is too large for exact enumeration")
    ints = np.arange(1 << g, dtype=np.int64)
    bits = ((ints[:, None] >> np.arange(g)) & 1).astype(np.uint8)
    nodes = z2.matmul(bits, code.deps(kind).T)
    return bits, nodes


def gibbs_weights(m: ThermalModel, kind: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(bits, nodes, probabilities)`` of the exact syndrome distribution."""
    bits, nodes = enumerate_syndromes(m.code, kind)
    t = m.couplings(kind)
    E = -((1.0 - 2.0 * nodes) * t).sum(axis=1)
    logw = -m.beta * (E - E.min())
    w = np.exp(logw)
    return bits, nodes, w / w.sum()


def criticality_table(code: CssCode, N: Pauli, nodes: np.ndarray) -> np.ndarray:
    kind = _relevant_kind(N)
    sup = _logical_support(N, kind)
    out = np.zeros(nodes.shape[0], dtype=bool)
    for i, row in enumerate(nodes):
        try:
            out[i] = critical_full(code, kind, sup, row)
        except DecodingError:
            out[i] = True
    return out


def gibbs_exact(m: ThermalModel, N: Pauli) -> float:
    """Exact ``P_crit`` by summing over every syndrome of the relevant type."""
    kind = _relevant_kind(N)
    _, nodes, p = gibbs_weights(m, kind)
    crit = criticality_table(m.code, N, nodes)
    return float(p[crit].sum())


def count_critical(code: CssCode, N: Pauli) -> int:
    _, nodes = enumerate_syndromes(code, _relevant_kind(N))
    return int(criticality_table(code, N, nodes).sum())


# ---------------------------------------------------------------------------
# Metropolis sampling


@njit(cache=True, nogil=True)
def _metropolis(e, nodes, ptr, idx, t, beta, g0, sites, u, n_sweeps, n_steps, out):
    """Single-qubit-flip Metropolis; one sweep is ``n_steps`` proposals.

    ``g0[s]`` is the Zeeman field during sweep ``s``.  When ``out`` has rows,
    the node pattern after each sweep is stored there.
    """
    k = 0
    record = out.shape[0] > 0
    for s in range(n_sweeps):
        h = g0[s]
        for _ in range(n_steps):
            j = sites[k]
            r = u[k]
            k += 1
            dE = 0.0
            for p in range(ptr[j], ptr[j + 1]):
                i = idx[p]
                if nodes[i]:
                    dE -= 2.0 * t[i]
                else:
                    dE += 2.0 * t[i]
            if h != 0.0:
                if e[j]:
                    dE -= 2.0 * h
                else:
                    dE += 2.0 * h
            if dE <= 0.0 or r < math.exp(-beta * dE):
                e[j] ^= 1
                for p in range(ptr[j], ptr[j + 1]):
                    nodes[idx[p]] ^= 1
        if record:
            for i in range(nodes.shape[0]):
                out[s, i] = nodes[i]


class MetropolisSampler:
    """One Markov chain over error chains of the type that drives ``kind``.

    Flipping a qubit toggles the terms it touches, so the cached syndrome
    stays equal to the syndrome of the current chain; :meth:`audit` checks it.
    """

    CHUNK_STEPS = 1 << 18

    def __init__(self, m: ThermalModel, kind: str = "Z", seed: int = 0):
        self.model = m
        self.kind = kind
        code = m.code
        H = code.checks(kind)
        self.H = H
        self.n = code.n
        self.e = np.zeros(self.n, dtype=np.uint8)
        self.nodes = np.zeros(H.shape[0], dtype=np.uint8)
        cols = [np.flatnonzero(H[:, j]) for j in range(self.n)]
        self.ptr = np.zeros(self.n + 1, dtype=np.int64)
        self.ptr[1:] = np.cumsum([len(c) for c in cols])
        self.idx = np.concatenate(cols).astype(np.int64) if cols else np.zeros(0, np.int64)
        self.t = m.couplings(kind).astype(np.float64)
        self.rng = np.random.default_rng(seed)
        self.seed = seed
        self.steps = 0
        self._since_audit = 0

    def audit(self) -> None:
        if not np.array_equal(self.nodes, z2.matmul(self.H, self.e)):
            raise RuntimeError("sampler syndrome cache diverged from its error chain")

    def run(self, sweeps: int, record: bool = False, g0=0.0) -> Optional[np.ndarray]:
        """Advance ``sweeps`` sweeps; ``g0`` is a scalar or one value per sweep."""
        g0 = np.broadcast_to(np.asarray(g0, dtype=np.float64), (sweeps,))
        out = np.zeros((sweeps if record else 0, self.nodes.shape[0]), dtype=np.uint8)
        per_chunk = max(1, self.CHUNK_STEPS // max(self.n, 1))
        done = 0
        while done < sweeps:
            s = min(per_chunk, sweeps - done)
            steps = s * self.n
            sites = self.rng.integers(0, self.n, size=steps)
            u = self.rng.random(steps)
            view = out[done : done + s] if record else out
            _metropolis(self.e, self.nodes, self.ptr, self.idx, self.t, float(self.model.beta),
                        np.ascontiguousarray(g0[done : done + s]), sites, u, s, self.n, view)
            done += s
            self.steps += steps
            self._since_audit += steps
            if self._since_audit >= 10_000:
                self.audit()
                self._since_audit = 0
        return out if record else None


def default_burn_in(code: CssCode) -> int:
    return 100 * code.n


def sample_nodes(m: ThermalModel, steps: int, burn_in: Optional[int] = None, seed: int = 0, kind: str = "Z") -> np.ndarray:
    """``steps`` overcomplete syndromes, one per sweep after the burn-in."""
    sampler = MetropolisSampler(m, kind, seed)
    sampler.run(default_burn_in(m.code) if burn_in is None else burn_in)
    return sampler.run(steps, record=True)


def sample_syndromes(m: ThermalModel, steps: int, burn_in: Optional[int] = None, seed: int = 0, kind: str = "Z") -> Iterator[Syndrome]:
    """Stream of basis syndromes drawn from the Gibbs distribution."""
    basis = m.code.basis_of(kind)
    for row in sample_nodes(m, steps, burn_in, seed, kind):
        yield Syndrome(kind, row[basis])


# ---------------------------------------------------------------------------
# estimators


@dataclass
class EstimateReport:
    estimate: float
    stderr: float
    samples: int
    burn_in: int
    seed: int
    chains: int = 1
    method: str = "metropolis"

    @property
    def effective_samples(self) -> float:
        return float(self.samples) if self.stderr == 0 else self.variance / self.stderr**2

    variance: float = field(default=0.0, repr=False)


def _batch_stats(series: Sequence[np.ndarray], batches: int = 20) -> tuple[float, float, float]:
    """Mean, batch-means standard error and plain variance of pooled chains."""
    allv = np.concatenate([np.asarray(s, dtype=float) for s in series])
    means = []
    for s in series:
        s = np.asarray(s, dtype=float)
        nb = min(batches, len(s))
        if nb == 0:
            continue
        for part in np.array_split(s, nb):
            means.append(part.mean())
    means = np.asarray(means)
    se = float(means.std(ddof=1) / math.sqrt(len(means))) if len(means) > 1 else 0.0
    return float(allv.mean()), se, float(allv.var())


def _chain_seeds(seed: int, chains: int) -> list[int]:
    return [seed + i for i in range(chains)]


def _run_chains(m, kind, per_chain, burn_in, seed, chains, threads):
    def one(s):
        return sample_nodes(m, per_chain, burn_in, s, kind)

    seeds = _chain_seeds(seed, chains)
    if threads > 1 and chains > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, seeds))
    return [one(s) for s in seeds]


class CriticalityOracle:
    """Cached criticality test for overcomplete syndromes.

    Undefined corrections count as critical.  A flip whose touched terms are
    all unexcited and unlinked to any excitation starts a new isolated
    cluster; with a clustering decoder that flip is corrected locally and
    cannot be critical, so only flips near the excitations are tried.
    """

    def __init__(self, code: CssCode, N: Pauli):
        self.code = code
        self.kind = _relevant_kind(N)
        self.support = _logical_support(N, self.kind)
        self.cache: dict[bytes, bool] = {}
        self.H = code.checks(self.kind)
        from .decode import ToricBoxDecoder

        dec = code.decoder(self.kind)
        self.local = isinstance(dec, ToricBoxDecoder)
        if self.local:
            g = dec.graph
            self.touch = [np.flatnonzero(self.H[:, j]) for j in range(code.n)]
            self.near = [np.array(sorted(set(t.tolist()) | {w for i in t for w in g.neighbors[i]}), dtype=np.int64) for t in self.touch]
            # a far flip is harmless only if its own cluster is decodable
            self.isolated_ok = np.array([self._isolated(dec, t) for t in self.touch], dtype=bool)

    @staticmethod
    def _isolated(dec, touched) -> bool:
        try:
            return len(touched) == 0 or dec.solve_component(sorted(touched.tolist())) is not None
        except DecodingError:
            return False

    def __call__(self, nodes: np.ndarray) -> bool:
        key = nodes.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        try:
            val = self._evaluate(nodes)
        except DecodingError:
            val = True
        self.cache[key] = val
        return val

    def _evaluate(self, nodes):
        dec = self.code.decoder(self.kind)
        if not self.local:
            return critical_full(self.code, self.kind, self.support, nodes)
        c0 = dec.correct(nodes)
        p0 = int(np.count_nonzero(c0 & self.support)) & 1
        for j in range(self.code.n):
            if self.isolated_ok[j] and not nodes[self.near[j]].any():
                continue
            c1 = dec.correct(nodes ^ self.H[:, j])
            p1 = int(np.count_nonzero(c1 & self.support)) & 1
            if p0 ^ p1 ^ int(self.support[j]):
                return True
        return False


def estimate_p_crit(
    m: ThermalModel,
    N: Pauli,
    steps: int,
    burn_in: Optional[int] = None,
    seed: int = 0,
    chains: int = 1,
    threads: int = 1,
) -> EstimateReport:
    """Monte Carlo ``P_crit``: mean criticality of sampled syndromes."""
    kind = _relevant_kind(N)
    per_chain = max(1, steps // chains)
    runs = _run_chains(m, kind, per_chain, burn_in, seed, chains, threads)
    oracle = CriticalityOracle(m.code, N)
    series = []
    for snaps in runs:
        uniq, inv = np.unique(snaps, axis=0, return_inverse=True)
        vals = np.array([oracle(row) for row in uniq], dtype=float)
        series.append(vals[inv.ravel()])
    mean, se, var = _batch_stats(series)
    bi = default_burn_in(m.code) if burn_in is None else burn_in
    return EstimateReport(mean, se, per_chain * chains, bi, seed, chains, variance=var)


@dataclass(frozen=True)
class DecayBound:
    """Decay-rate bounds for a dressed logical.

    ``middle`` is ``8 h <sum_sigma (1 - S)>`` over the ``3n`` single-qubit
    Paulis, ``outer`` is ``16 h n P_crit`` and ``provable`` is
    ``48 h n P_crit``, which follows because each of the ``3n`` terms is at
    most 2 and vanishes off critical syndromes.
    """

    middle: float
    outer: float
    provable: float
    p_crit: float


def _flip_count(code: CssCode, kind: str, sup: np.ndarray, nodes: np.ndarray) -> int:
    """Number of qubits whose single flip changes the dressed value."""
    dec = code.decoder(kind)
    H = code.checks(kind)
    c0 = dec.correct(nodes)
    p0 = int(np.count_nonzero(c0 & sup)) & 1
    count = 0
    for j in range(code.n):
        p1 = int(np.count_nonzero(dec.correct(nodes ^ H[:, j]) & sup)) & 1
        count += p0 ^ p1 ^ int(sup[j])
    return count


def decay_bound(m: ThermalModel, N: Pauli, h_max: float, exact: bool = True, steps: int = 10_000, seed: int = 0) -> DecayBound:
    """Evaluate the critical-syndrome bounds on the decay rate.

    Of the three Paulis on a qubit, the two that anticommute with ``N`` share
    their relevant part, so each flipping qubit contributes ``2 * 2`` to the
    sum over ``sigma``.
    """
    kind = _relevant_kind(N)
    sup = _logical_support(N, kind)
    n = m.code.n
    if exact:
        _, nodes, p = gibbs_weights(m, kind)
    else:
        nodes = sample_nodes(m, steps, None, seed, kind)
        p = np.full(nodes.shape[0], 1.0 / nodes.shape[0])
    flips = np.zeros(nodes.shape[0])
    for i, row in enumerate(nodes):
        try:
            flips[i] = _flip_count(m.code, kind, sup, row)
        except DecodingError:
            flips[i] = n  # worst case
    p_crit = float(p[flips > 0].sum())
    middle = 8.0 * h_max * float((p * 4.0 * flips).sum())
    return DecayBound(middle, 16.0 * h_max * n * p_crit, 48.0 * h_max * n * p_crit, p_crit)


def _x_flip_probability(p: float) -> float:
    """Per-qubit chance that a depolarizing draw carries the relevant part."""
    return 2.0 * p / (1.0 + 2.0 * p)


def depolarize_overlap(
    m: ThermalModel,
    N: Pauli,
    p: float,
    steps: int,
    burn_in: Optional[int] = None,
    seed: int = 0,
    chains: int = 1,
    threads: int = 1,
) -> EstimateReport:
    """``1 - 2 P'``: Gibbs syndromes followed by one depolarizing layer.

    Each qubit gets I, X, Y, Z with weights ``1-p, p, p, p`` (normalized);
    ``P'`` is the frequency of ``S(N, E, b) = -1``, undefined corrections
    counted as failures.
    """
    if not 0 <= p < 0.5:
        raise ValueError("depolarizing strength must satisfy 0 <= p < 1/2")
    kind = _relevant_kind(N)
    sup = _logical_support(N, kind)
    per_chain = max(1, steps // chains)
    runs = _run_chains(m, kind, per_chain, burn_in, seed, chains, threads)
    series = []
    for c, snaps in enumerate(runs):
        rng = np.random.default_rng([seed, c, 1])
        letters = rng.choice(4, size=(snaps.shape[0], m.code.n), p=np.array([1 - p, p, p, p]) / (1 + 2 * p))
        relevant = np.isin(letters, (1, 2) if kind == "Z" else (2, 3)).astype(np.uint8)  # I, X, Y, Z
        vals = np.zeros(snaps.shape[0])
        for i in range(snaps.shape[0]):
            err = relevant[i]
            if not err.any():
                continue
            try:
                vals[i] = sign_full(m.code, kind, sup, err, snaps[i]) == -1
            except DecodingError:
                vals[i] = 1.0
        series.append(2.0 * vals)
    mean, se, var = _batch_stats(series)
    bi = default_burn_in(m.code) if burn_in is None else burn_in
    return EstimateReport(1.0 - mean, se, per_chain * chains, bi, seed, chains, variance=var)


def depolarize_overlap_exact(m: ThermalModel, N: Pauli, p: float) -> float:
    """Exact ``1 - 2 P'`` by summing over every syndrome and every relevant error part."""
    if not 0 <= p < 0.5:
        raise ValueError("depolarizing strength must satisfy 0 <= p < 1/2")
    kind = _relevant_kind(N)
    sup = _logical_support(N, kind)
    code = m.code
    n = code.n
    if n > 20:
        raise ValueError("exact depolarizing sum needs n <= 20")
    _, nodes, pb = gibbs_weights(m, kind)
    ints = np.arange(1 << n, dtype=np.int64)
    errs = ((ints[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    w = errs.sum(axis=1)
    q = _x_flip_probability(p)
    pe = q**w * (1 - q) ** (n - w)
    dec = code.decoder(kind)
    H = code.checks(kind)
    synd = z2.matmul(errs, H.T)
    par_e = z2.matmul(errs, sup)
    fail = 0.0
    for row, prob in zip(nodes, pb):
        c0 = int(np.count_nonzero(dec.correct(row) & sup)) & 1
        after = synd ^ row
        # decode every distinct post-error syndrome once
        uniq, inv = np.unique(after, axis=0, return_inverse=True)
        par_c = np.array([int(np.count_nonzero(dec.correct(r) & sup)) & 1 for r in uniq], dtype=np.uint8)
        flipped = (c0 ^ par_e ^ par_c[inv.ravel()]).astype(bool)
        fail += prob * float(pe[flipped].sum())
    return 1.0 - 2.0 * fail


# ---------------------------------------------------------------------------
# initialization by annealing


@dataclass(frozen=True)
class AnnealReport:
    fraction: float
    stderr: float
    chains: int
    sweeps: int
    burn_in: int
    seed: int
    failures: int  # chains whose readout could not be decoded


def anneal_init(
    D: int,
    d: int,
    L: int,
    beta: float,
    sweeps: int = 10_000,
    seed: int = 0,
    chains: int = 200,
    burn_in: Optional[int] = None,
    threads: int = 1,
) -> AnnealReport:
    """Cool in a Zeeman field, switch it off linearly and read the sector.

    Each chain equilibrates at ``g0 = 1``, then ``g0`` falls linearly to 0
    over ``sweeps`` sweeps with ``g_Z = 1``.  The final X-error chain is
    decoded; a chain lands in the ``N_dr = +1`` sector if every Z-type
    logical sees an even overlap with error plus correction.
    """
    if d < 1:
        raise ValueError("annealing needs d >= 1")
    if sweeps < 1 or chains < 1:
        raise ValueError("sweeps and chains must be positive")
    code = toric_code(D, d, L)
    m = ThermalModel(code, beta)
    dec = code.decoder("Z")
    lz = code.logicals("Z")
    bi = 100 * code.n if burn_in is None else burn_in
    schedule = 1.0 - np.arange(1, sweeps + 1) / sweeps

    def one(s):
        smp = MetropolisSampler(m, "Z", s)
        smp.run(bi, g0=1.0)
        smp.run(sweeps, g0=schedule)
        smp.audit()
        try:
            c = dec.correct(smp.nodes)
        except DecodingError:
            return 0, 1
        ok = not z2.matmul(lz, smp.e ^ c).any()
        return int(ok), 0

    seeds = _chain_seeds(seed, chains)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            res = list(ex.map(one, seeds))
    else:
        res = [one(s) for s in seeds]
    good = np.array([r[0] for r in res], dtype=float)
    frac = float(good.mean())
    se = float(good.std(ddof=1) / math.sqrt(chains)) if chains > 1 else 0.0
    return AnnealReport(frac, se, chains, sweeps, bi, seed, sum(r[1] for r in res))
