"""UAV-assisted NOMA uplink energy-efficiency optimization.

UEs in a disaster region are clustered into NOMA groups (k-means with the
cluster count picked by the elbow rule and validated by an F-test), each
group receives a disjoint subcarrier block, and uplink powers are set by
Dinkelbach-style fractional programming maximizing delivered bits per
Joule under per-UE payload floors, a per-UE power cap and a fixed circuit
power.  A no-fairness greedy algorithm serves as the baseline.

Within a group every member transmits over the whole group block and the
per-user gain is flattened to its mean over the block's subcarriers, so
group rates follow the scalar SIC chain; decode order is descending gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import stats

from .constants import BOLTZMANN_J_K, SPEED_OF_LIGHT_M_S
from .errors import ContractError, DomainError, InfeasibleError

UAV_AI = "uav_ai"
GREEDY = "greedy"

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UavScenarioParams:
    """Configuration of the airborne scenario (channel draw + optimizer knobs)."""

    n_ues: int = 70
    n_subcarriers: int = 128
    bandwidth_hz: float = 10e6
    max_ue_power_w: float = 0.2
    circuit_power_w: float = 1.4002
    frame_duration_s: float = 1.0
    uav_altitude_m: float = 100.0
    region_radius_m: float = 500.0
    pathloss_exponent: float = 2.7
    carrier_hz: float = 2e9
    noise_figure_db: float = 7.0
    noise_temperature_k: float = 290.0
    k_min: int = 2
    k_max: int = 10
    elbow_threshold: float = 0.10
    f_test_alpha: float = 0.05

    def __post_init__(self):
        if self.n_ues < 1 or self.n_subcarriers < 1:
            raise DomainError("n_ues and n_subcarriers must be >= 1")
        if min(self.max_ue_power_w, self.circuit_power_w, self.bandwidth_hz) <= 0:
            raise DomainError("powers and bandwidth must be > 0")


@dataclass(frozen=True)
class UplinkScenario:
    """One channel realization of the uplink scenario."""

    ue_channel_gains: np.ndarray      # (n_ues, n_subcarriers) linear power gains
    ue_distance_m: np.ndarray         # 3-D distance to the UAV
    data_bits_per_ue: float
    n_subcarriers: int
    bandwidth_hz: float
    max_ue_power_w: float
    circuit_power_w: float
    frame_duration_s: float
    noise_power_per_subcarrier_w: float

    def __post_init__(self):
        if self.ue_channel_gains.shape != (self.n_ues, self.n_subcarriers):
            raise ContractError("gain matrix shape disagrees with scenario dimensions")
        if np.any(self.ue_channel_gains <= 0):
            raise ContractError("channel gains must be > 0")
        if self.data_bits_per_ue < 0:
            raise DomainError("data_bits_per_ue must be >= 0")

    @property
    def n_ues(self) -> int:
        return len(self.ue_distance_m)

    @property
    def subcarrier_bandwidth_hz(self) -> float:
        return self.bandwidth_hz / self.n_subcarriers

    @property
    def required_rate_bps(self) -> float:
        return self.data_bits_per_ue / self.frame_duration_s


def draw_uplink_scenario(
    params: UavScenarioParams, data_bits_per_ue: float, rng_seed
) -> UplinkScenario:
    """Drop UEs uniformly in the region and draw log-distance + Rayleigh gains."""
    rng = np.random.default_rng(rng_seed)
    radius = params.region_radius_m * np.sqrt(rng.uniform(0.0, 1.0, params.n_ues))
    dist = np.hypot(radius, params.uav_altitude_m)
    lam = SPEED_OF_LIGHT_M_S / params.carrier_hz
    path_gain = (lam / (4.0 * math.pi)) ** 2 * dist ** (-params.pathloss_exponent)
    fading = rng.standard_normal((params.n_ues, params.n_subcarriers)) ** 2
    fading += rng.standard_normal((params.n_ues, params.n_subcarriers)) ** 2
    gains = path_gain[:, None] * fading / 2.0
    noise = (
        BOLTZMANN_J_K
        * params.noise_temperature_k
        * (params.bandwidth_hz / params.n_subcarriers)
        * 10.0 ** (params.noise_figure_db / 10.0)
    )
    return UplinkScenario(
        ue_channel_gains=gains,
        ue_distance_m=dist,
        data_bits_per_ue=data_bits_per_ue,
        n_subcarriers=params.n_subcarriers,
        bandwidth_hz=params.bandwidth_hz,
        max_ue_power_w=params.max_ue_power_w,
        circuit_power_w=params.circuit_power_w,
        frame_duration_s=params.frame_duration_s,
        noise_power_per_subcarrier_w=noise,
    )


# ---------------------------------------------------------------------------
# Clustering: k-means, elbow, F-test
# ---------------------------------------------------------------------------

def kmeans_cluster(features: np.ndarray, k: int, rng_seed) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding; returns a label per point.

    Converges when the largest centroid shift drops below 1e-6 (or after
    300 iterations).  A cluster that empties is re-seeded at the point
    farthest from its assigned centroid.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = len(x)
    if not 1 <= k <= n:
        raise ContractError(f"k must be in [1, {n}], got {k}")
    if not np.all(np.isfinite(x)):
        raise ContractError("features must be finite")
    rng = np.random.default_rng(rng_seed)

    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    for j in range(1, k):
        d2 = np.min(((x[:, None, :] - centroids[None, :j, :]) ** 2).sum(axis=2), axis=1)
        total = d2.sum()
        if total <= 0.0:
            centroids[j] = x[rng.integers(n)]
        else:
            centroids[j] = x[rng.choice(n, p=d2 / total)]

    labels = np.zeros(n, dtype=int)
    for _ in range(300):
        d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centroids[j] = x[members].mean(axis=0)
            else:
                farthest = np.argmax(d2[np.arange(n), labels])
                new_centroids[j] = x[farthest]
                labels[farthest] = j
        shift = np.abs(new_centroids - centroids).max()
        centroids = new_centroids
        if shift < 1e-6:
            break
    return labels


def _sse(x: np.ndarray, labels: np.ndarray, k: int) -> float:
    total = 0.0
    for j in range(k):
        members = x[labels == j]
        if len(members):
            total += ((members - members.mean(axis=0)) ** 2).sum()
    return total


@dataclass(frozen=True)
class KSelection:
    k: int
    validated: bool
    sse_by_k: dict


def select_k(
    features: np.ndarray,
    k_range: Sequence[int],
    rng_seed,
    elbow_threshold: float = 0.10,
    f_test_alpha: float = 0.05,
) -> KSelection:
    """Pick the cluster count by the elbow rule and validate it with an F-test.

    The elbow is the smallest k whose relative SSE improvement toward k+1
    drops below the threshold; the candidate is accepted when the ratio of
    between- to within-cluster mean squares exceeds the F critical value,
    otherwise the next k in the range is tried.  If nothing validates the
    elbow k is returned flagged.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = len(x)
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 1 or ks[-1] > n:
        raise ContractError(f"k_range must lie within [1, {n}], got {k_range}")
    rng = np.random.default_rng(rng_seed)
    seeds = {k: rng.integers(2**63) for k in ks}

    labels_by_k = {k: kmeans_cluster(x, k, seeds[k]) for k in ks}
    sse = {k: _sse(x, labels_by_k[k], k) for k in ks}

    elbow = ks[-1]
    for i, k in enumerate(ks[:-1]):
        prev = sse[k]
        improvement = 0.0 if prev <= 0.0 else (prev - sse[ks[i + 1]]) / prev
        if improvement < elbow_threshold:
            elbow = k
            break

    def validates(k: int) -> bool:
        if k <= 1 or k >= n:
            return True  # no between/within decomposition to test
        labels = labels_by_k[k]
        grand = x.mean(axis=0)
        ssb = 0.0
        for j in range(k):
            members = x[labels == j]
            if len(members):
                ssb += len(members) * ((members.mean(axis=0) - grand) ** 2).sum()
        ssw = sse[k]
        if ssw <= 0.0:
            return True
        f_stat = (ssb / (k - 1)) / (ssw / (n - k))
        return f_stat > stats.f.ppf(1.0 - f_test_alpha, k - 1, n - k)

    for k in ks[ks.index(elbow):]:
        if validates(k):
            return KSelection(k=k, validated=True, sse_by_k=sse)
    return KSelection(k=elbow, validated=False, sse_by_k=sse)


# ---------------------------------------------------------------------------
# Grouping and subcarrier allocation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NomaGrouping:
    """Partition of UEs into NOMA groups with their subcarrier blocks."""

    groups: tuple                 # tuple of tuples of UE indices
    subcarriers_of_group: tuple   # tuple of tuples of subcarrier indices
    sic_order: tuple              # per group, UE indices in decode order

    def __post_init__(self):
        flat = [u for g in self.groups for u in g]
        if len(flat) != len(set(flat)):
            raise ContractError("groups must be disjoint")
        sc_flat = [s for block in self.subcarriers_of_group for s in block]
        if len(sc_flat) != len(set(sc_flat)):
            raise ContractError("subcarrier blocks must be disjoint")
        if len(self.groups) != len(self.subcarriers_of_group) or len(self.groups) != len(self.sic_order):
            raise ContractError("groups, subcarrier blocks and SIC orders must align")
        for g, order in zip(self.groups, self.sic_order):
            if sorted(g) != sorted(order):
                raise ContractError("sic_order must permute exactly the group members")

    @property
    def k(self) -> int:
        return len(self.groups)


def allocate_subcarriers(
    groups: Sequence[Sequence[int]],
    n_subcarriers: int,
    ue_channel_gains: np.ndarray,
) -> NomaGrouping:
    """Split subcarriers proportionally to group size (largest remainder).

    Blocks are contiguous in subcarrier index order.  Every group gets at
    least one subcarrier; when the remainder rounding would starve one, a
    subcarrier moves from the largest block.  SIC decode order within a
    group is descending mean gain over the group's block (ties by UE index).
    """
    groups = [tuple(int(u) for u in g) for g in groups if len(g)]
    if not groups:
        raise ContractError("need at least one non-empty group")
    k = len(groups)
    if n_subcarriers < k:
        raise ContractError(f"need n_subcarriers >= {k} groups, got {n_subcarriers}")
    sizes = np.array([len(g) for g in groups], dtype=float)
    quota = n_subcarriers * sizes / sizes.sum()
    counts = np.floor(quota).astype(int)
    remainder = quota - counts
    for idx in np.argsort(-remainder, kind="stable")[: n_subcarriers - counts.sum()]:
        counts[idx] += 1
    while np.any(counts == 0):
        counts[np.argmax(counts)] -= 1
        counts[np.argmin(counts)] += 1

    blocks = []
    start = 0
    for c in counts:
        blocks.append(tuple(range(start, start + int(c))))
        start += int(c)

    sic = []
    for g, block in zip(groups, blocks):
        mean_gain = ue_channel_gains[np.array(g)][:, np.array(block)].mean(axis=1)
        order = sorted(range(len(g)), key=lambda i: (-mean_gain[i], g[i]))
        sic.append(tuple(g[i] for i in order))
    return NomaGrouping(tuple(groups), tuple(blocks), tuple(sic))


def group_terminals(
    scenario: UplinkScenario, params: UavScenarioParams, rng_seed
) -> tuple[NomaGrouping, KSelection]:
    """Full grouping pipeline: features -> select_k -> k-means -> subcarriers."""
    mean_gain_db = 10.0 * np.log10(scenario.ue_channel_gains.mean(axis=1))
    features = np.column_stack([mean_gain_db, scenario.ue_distance_m])
    # z-score both features so gain (dB) and distance (m) weigh equally
    features = (features - features.mean(axis=0)) / np.maximum(features.std(axis=0), 1e-12)
    rng = np.random.default_rng(rng_seed)
    k_hi = min(params.k_max, scenario.n_ues)
    k_lo = min(params.k_min, k_hi)
    selection = select_k(
        features,
        range(k_lo, k_hi + 1),
        rng.integers(2**63),
        params.elbow_threshold,
        params.f_test_alpha,
    )
    labels = kmeans_cluster(features, selection.k, rng.integers(2**63))
    groups = [tuple(np.flatnonzero(labels == j)) for j in range(selection.k)]
    grouping = allocate_subcarriers(groups, scenario.n_subcarriers, scenario.ue_channel_gains)
    return grouping, selection


# ---------------------------------------------------------------------------
# Power allocation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EEResult:
    """Outcome of one power-allocation method on one scenario."""

    power_w: np.ndarray
    rate_bps: np.ndarray
    total_bits: float
    total_energy_j: float
    ee_bits_per_joule: float
    method: str
    feasible: bool = True
    dinkelbach_f_history: tuple = ()


@dataclass(frozen=True)
class _GroupProblem:
    """Scalar SIC chain of one group: members in decode order, flat gains."""

    members: np.ndarray       # UE indices, decode order (descending gain)
    gains: np.ndarray         # flat (mean over block) gain per member
    bandwidth_hz: float
    noise_w: float


def _group_problems(grouping: NomaGrouping, scenario: UplinkScenario) -> list[_GroupProblem]:
    problems = []
    for g, block, order in zip(grouping.groups, grouping.subcarriers_of_group, grouping.sic_order):
        del g
        members = np.array(order, dtype=int)
        block_arr = np.array(block, dtype=int)
        gains = scenario.ue_channel_gains[members][:, block_arr].mean(axis=1)
        problems.append(
            _GroupProblem(
                members=members,
                gains=gains,
                bandwidth_hz=scenario.bandwidth_hz * len(block) / scenario.n_subcarriers,
                noise_w=scenario.noise_power_per_subcarrier_w * len(block),
            )
        )
    return problems


def _sic_rates(prob: _GroupProblem, powers: np.ndarray) -> np.ndarray:
    """Per-member rates of the SIC chain (member i sees interference from later ones)."""
    pg = powers * prob.gains
    interference = np.concatenate([np.cumsum(pg[::-1])[::-1][1:], [0.0]])
    return prob.bandwidth_hz * np.log2(1.0 + pg / (prob.noise_w + interference))


def _chain_min_powers(prob: _GroupProblem, rate_floor_bps: float, p_max: float) -> np.ndarray:
    """Componentwise-minimal powers meeting the rate floor, last decoded first."""
    m = len(prob.members)
    powers = np.zeros(m)
    if rate_floor_bps <= 0.0:
        return powers
    snr_req = 2.0 ** (rate_floor_bps / prob.bandwidth_hz) - 1.0
    interference = 0.0
    for i in range(m - 1, -1, -1):
        powers[i] = snr_req * (prob.noise_w + interference) / prob.gains[i]
        if powers[i] > p_max * (1.0 + 1e-12):
            max_rate = prob.bandwidth_hz * math.log2(
                1.0 + p_max * prob.gains[i] / (prob.noise_w + interference)
            )
            raise InfeasibleError(
                f"UE {prob.members[i]} cannot deliver the payload: needs "
                f"{rate_floor_bps:.0f} bps but tops out at {max_rate:.0f} bps "
                f"at the {p_max} W power cap"
            )
        interference += powers[i] * prob.gains[i]
    return powers


def _cascade_allocate(
    prob: _GroupProblem,
    chain: np.ndarray,
    lam: float,
    rate_floor_bps: float,
    p_max: float,
) -> np.ndarray:
    """Maximize sum rate - lam * sum power over the group, starting from the chain.

    The telescoped group objective is B log2(noise + sum p g) - lam sum p,
    so surplus power is worth spending on the best-gain member first; a
    member only absorbs surplus up to its power cap and up to the point
    where an earlier-decoded member's payload floor would break (its own
    signal is cancelled before later members are decoded, so spending on
    the first member never hurts anyone).
    """
    if lam <= 0.0:
        raise ContractError("lambda must be > 0")
    powers = chain.copy()
    snr_req = 2.0 ** (rate_floor_bps / prob.bandwidth_hz) - 1.0 if rate_floor_bps > 0 else 0.0
    for k in range(len(powers)):
        received = prob.noise_w + float(powers @ prob.gains)
        target = prob.bandwidth_hz * prob.gains[k] / (lam * _LN2)
        if target <= received:
            break
        dp = (target - received) / prob.gains[k]
        cap = p_max - powers[k]
        if k > 0 and snr_req > 0.0:
            pg = powers * prob.gains
            tail = np.concatenate([np.cumsum(pg[::-1])[::-1][1:], [0.0]])
            slack = pg[:k] / snr_req - prob.noise_w - tail[:k]
            cap_floor = max(slack.min(), 0.0) / prob.gains[k]
        else:
            cap_floor = math.inf
        step = min(dp, cap, cap_floor)
        if step > 0.0:
            powers[k] += step
        if step >= cap_floor - 1e-18 and cap_floor < dp:
            break  # an earlier member's floor is now tight
        if step < dp:
            continue  # power cap hit; the next member may still absorb surplus
        break  # marginal optimum reached; later members have smaller gains
    return powers


def iterative_power_allocation(
    grouping: NomaGrouping, scenario: UplinkScenario
) -> EEResult:
    """Dinkelbach fractional programming over the grouped SIC uplink.

    Maximizes sum(rates) - lambda * (sum(powers) + circuit power), with
    lambda updated to the achieved bits-per-Joule ratio until |F(lambda)|
    falls below 1e-6 (or 50 outer iterations).  Per-UE payload floors are
    enforced through the componentwise-minimal chain powers.
    """
    problems = _group_problems(grouping, scenario)
    floor = scenario.required_rate_bps
    p_max = scenario.max_ue_power_w
    t_frame = scenario.frame_duration_s
    chains = [_chain_min_powers(p, floor, p_max) for p in problems]

    def totals(powers_by_group):
        rate = sum(float(_sic_rates(p, w).sum()) for p, w in zip(problems, powers_by_group))
        power = sum(float(w.sum()) for w in powers_by_group)
        return rate, power

    rate, power = totals(chains)
    lam = max(rate * t_frame, 1e-12) / ((power + scenario.circuit_power_w) * t_frame)
    powers_by_group = chains
    f_history = []
    for _ in range(50):
        powers_by_group = [
            _cascade_allocate(p, c, lam, floor, p_max) for p, c in zip(problems, chains)
        ]
        rate, power = totals(powers_by_group)
        bits = rate * t_frame
        energy = (power + scenario.circuit_power_w) * t_frame
        f_value = bits - lam * energy
        f_history.append(f_value)
        lam = bits / energy
        if abs(f_value) < 1e-6:
            break

    power_w = np.zeros(scenario.n_ues)
    rate_bps = np.zeros(scenario.n_ues)
    for prob, w in zip(problems, powers_by_group):
        power_w[prob.members] = w
        rate_bps[prob.members] = _sic_rates(prob, w)
    total_bits = float(rate_bps.sum()) * t_frame
    total_energy = (float(power_w.sum()) + scenario.circuit_power_w) * t_frame
    return EEResult(
        power_w=power_w,
        rate_bps=rate_bps,
        total_bits=total_bits,
        total_energy_j=total_energy,
        ee_bits_per_joule=total_bits / total_energy,
        method=UAV_AI,
        dinkelbach_f_history=tuple(f_history),
    )


# ---------------------------------------------------------------------------
# Greedy baseline
# ---------------------------------------------------------------------------

def _rate_flat(n_sc: int, mean_gain: float, power_w: float, b_sc: float, noise_sc: float) -> float:
    if n_sc == 0 or power_w <= 0.0:
        return 0.0
    return n_sc * b_sc * math.log2(1.0 + power_w * mean_gain / (n_sc * noise_sc))


def _best_own_ee(
    n_sc: int,
    mean_gain: float,
    b_sc: float,
    noise_sc: float,
    rate_floor: float,
    p_max: float,
    overhead_w: float,
    t_frame: float,
) -> tuple[float, float] | None:
    """(EE, power) maximizing rate/(power + overhead) with the floor met, or None."""
    del t_frame  # EE is rate/(power + overhead); the frame length cancels
    kappa = mean_gain / (n_sc * noise_sc)
    if rate_floor > 0.0:
        p_floor = (2.0 ** (rate_floor / (n_sc * b_sc)) - 1.0) / kappa
        if p_floor > p_max * (1.0 + 1e-12):
            return None
    else:
        p_floor = 1e-9 * p_max

    def ee(p: float) -> float:
        return _rate_flat(n_sc, mean_gain, p, b_sc, noise_sc) / (p + overhead_w)

    # EE is unimodal in p: bisect on the sign of d/dp [r(p)/(p + overhead)]
    def slope(p: float) -> float:
        r = _rate_flat(n_sc, mean_gain, p, b_sc, noise_sc)
        dr = n_sc * b_sc * kappa / (_LN2 * (1.0 + kappa * p))
        return dr * (p + overhead_w) - r

    lo, hi = p_floor, p_max
    if slope(hi) >= 0.0:
        best = hi
    elif slope(lo) <= 0.0:
        best = lo
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if slope(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        best = 0.5 * (lo + hi)
    return ee(best), best


def greedy_baseline(scenario: UplinkScenario) -> EEResult:
    """No-fairness baseline: strong UEs shop for subcarriers first.

    UEs are visited in descending best-gain order; each grabs its best
    remaining subcarriers one at a time (at least until its payload floor
    becomes attainable) for as long as its own energy efficiency keeps
    improving, choosing its own transmit power selfishly.  Later UEs take
    the leftovers; a UE that cannot meet the floor with everything left is
    reported, mirroring the optimizer's infeasibility contract.
    """
    n = scenario.n_ues
    b_sc = scenario.subcarrier_bandwidth_hz
    noise_sc = scenario.noise_power_per_subcarrier_w
    floor = scenario.required_rate_bps
    overhead = scenario.circuit_power_w / n
    order = np.argsort(-scenario.ue_channel_gains.max(axis=1), kind="stable")

    remaining = set(range(scenario.n_subcarriers))
    power_w = np.zeros(n)
    rate_bps = np.zeros(n)
    for ue in order:
        gains = scenario.ue_channel_gains[ue]
        candidates = sorted(remaining, key=lambda s: (-gains[s], s))
        taken: list[int] = []
        best: tuple[float, float, int] | None = None  # (ee, power, n_sc)
        for sc in candidates:
            trial = taken + [sc]
            mean_gain = float(np.mean(gains[np.array(trial)]))
            res = _best_own_ee(
                len(trial), mean_gain, b_sc, noise_sc, floor, scenario.max_ue_power_w,
                overhead, scenario.frame_duration_s,
            )
            if res is None:
                taken = trial  # floor not attainable yet: keep grabbing
                continue
            if best is None or res[0] > best[0] * (1.0 + 1e-12):
                best = (res[0], res[1], len(trial))
                taken = trial
                continue
            break
        if best is None:
            max_rate = _rate_flat(
                len(taken),
                float(np.mean(gains[np.array(taken)])) if taken else 0.0,
                scenario.max_ue_power_w, b_sc, noise_sc,
            )
            raise InfeasibleError(
                f"UE {ue} cannot deliver the payload from leftover subcarriers: needs "
                f"{floor:.0f} bps but tops out at {max_rate:.0f} bps at the "
                f"{scenario.max_ue_power_w} W power cap"
            )
        remaining.difference_update(taken)
        power_w[ue] = best[1]
        mean_gain = float(np.mean(gains[np.array(taken)]))
        rate_bps[ue] = _rate_flat(best[2], mean_gain, best[1], b_sc, noise_sc)

    t_frame = scenario.frame_duration_s
    total_bits = float(rate_bps.sum()) * t_frame
    total_energy = (float(power_w.sum()) + scenario.circuit_power_w) * t_frame
    return EEResult(
        power_w=power_w,
        rate_bps=rate_bps,
        total_bits=total_bits,
        total_energy_j=total_energy,
        ee_bits_per_joule=total_bits / total_energy,
        method=GREEDY,
    )


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def ee_sweep(
    params: UavScenarioParams,
    data_sizes_bits: Sequence[float],
    rng_seed,
    n_trials: int = 3,
) -> list[dict]:
    """EE of both methods across payload sizes, common channel draws per point.

    The same ``n_trials`` channel realizations (and the groupings derived
    from them, which do not depend on the payload) are reused for every
    data size and both methods, so per-draw comparisons are paired.  An
    infeasible (size, method, draw) marks the row infeasible instead of
    aborting the sweep; its EE averages the feasible draws only.
    """
    if not len(data_sizes_bits):
        raise ContractError("data_sizes_bits must be non-empty")
    rng = np.random.default_rng(rng_seed)
    draw_seeds = [rng.integers(2**63) for _ in range(n_trials)]
    base = [draw_uplink_scenario(params, 0.0, s) for s in draw_seeds]
    grouped = [group_terminals(sc, params, s) for sc, s in zip(base, draw_seeds)]

    rows = []
    for size in data_sizes_bits:
        for method in (UAV_AI, GREEDY):
            ee_values = []
            feasible = True
            for trial in range(n_trials):
                scenario = replace(base[trial], data_bits_per_ue=float(size))
                try:
                    if method == UAV_AI:
                        result = iterative_power_allocation(grouped[trial][0], scenario)
                    else:
                        result = greedy_baseline(scenario)
                    ee_values.append(result.ee_bits_per_joule)
                except InfeasibleError:
                    feasible = False
            rows.append(
                {
                    "data_size_bits": float(size),
                    "method": method,
                    "ee_bits_per_joule": float(np.mean(ee_values)) if ee_values else math.nan,
                    "k_selected": grouped[0][1].k,
                    "feasible_flag": feasible,
                }
            )
    return rows


def sweep_rows_to_csv(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("data_size_bits,method,ee_bits_per_joule,k_selected,feasible_flag\n")
        for row in rows:
            fh.write(
                f"{row['data_size_bits']!r},{row['method']},{row['ee_bits_per_joule']!r},"
                f"{row['k_selected']},{int(row['feasible_flag'])}\n"
            )
