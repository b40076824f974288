"""Seeded synthetic stand-in for the raw field tables.

The real per-area driver table and shell-length records are survey data that
the repository cannot ship, so this module fabricates a plausible cohort:
24 management areas across 13 fisher associations, surveillance arrangements
split 3/1/2/7 from low to very high, a couple of coves showing the reverse
pattern (managed shells smaller and more often undersized than open-access
ones), and a few flagship coves in visibly good state. Shell lengths are
normal draws whose means are placed so each sample hits a target undersized
proportion, which makes the response metrics follow the drivers: weak
enforcement, scarce open ground, distant surveillance, and a lack of
alternative livelihoods all push the pressure score up.

Every value is drawn from one seeded generator and formatted with fixed
precision, so regenerating with the same config is byte-identical.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist

from .pipeline import MA_HEADER, SIZES_HEADER

_NORMAL = NormalDist()

_RANK_TO_ARRANGEMENT = {
    2: ("fishers", "occasional"),
    3: ("fishers", "daily8"),
    4: ("fishers", "daily24"),
    5: ("hired", "daily24"),
}


@dataclass(frozen=True)
class StandInConfig:
    n_coves: int = 13
    n_areas: int = 24
    seed: int = 7
    ma_sample_size: int = 220
    oa_sample_size: int = 260
    sigma_mm: float = 8.0
    mls_mm: float = 65.0

    def __post_init__(self) -> None:
        if self.n_coves < 1 or self.n_areas < self.n_coves:
            raise ValueError("need at least one cove and one area per cove")
        if self.sigma_mm <= 0 or self.mls_mm <= 0:
            raise ValueError("sigma and landing size must be positive")


def _mean_for_target(p_undersized: float, mls: float, sigma: float) -> float:
    """Normal mean placing `p_undersized` of the mass strictly below mls."""
    p = min(max(p_undersized, 1e-4), 1.0 - 1e-4)
    return mls - sigma * _NORMAL.inv_cdf(p)


def _percentile_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    for pos, i in enumerate(order):
        ranks[i] = pos / max(1, len(values) - 1)
    return ranks


@dataclass(frozen=True)
class _CovePlan:
    name: str
    rank: int
    n_areas: int
    fishers: int
    oa_surface: float
    uneven: bool
    perceived_ineffective: bool
    other_activities: bool
    wave_south: bool
    flagship: bool


def _plan_coves(config: StandInConfig, rng: random.Random) -> list[_CovePlan]:
    ranks = ([2, 2, 2, 3, 4, 4] + [5] * max(0, config.n_coves - 6))[: config.n_coves]
    counts = [1] * config.n_coves
    for _ in range(config.n_areas - config.n_coves):
        counts[rng.randrange(config.n_coves)] += 1
    rng.shuffle(ranks)

    flagship_budget = 3
    plans = []
    for i in range(config.n_coves):
        rank = ranks[i]
        flagship = rank == 5 and flagship_budget > 0
        if flagship:
            flagship_budget -= 1
        uneven = False if flagship else rng.random() < 0.3
        perceived = False if flagship else rng.random() < 0.25
        if rank == 2 and not uneven and not perceived:
            uneven = True  # keep at least the weakest coves visibly degraded
        plans.append(_CovePlan(
            name=f"cove{i + 1:02d}",
            rank=rank,
            n_areas=counts[i],
            fishers=rng.randint(18, 120),
            oa_surface=round(rng.uniform(0.4, 9.0), 2),
            uneven=uneven,
            perceived_ineffective=perceived,
            other_activities=rng.random() < 0.5,
            wave_south=rng.random() < 0.5,
            flagship=flagship,
        ))
    return plans


def generate_tables(config: StandInConfig = StandInConfig()
                    ) -> tuple[list[dict[str, str]], list[dict[str, str]]]:
    """Build both CSV tables as ordered row dictionaries."""
    rng = random.Random(config.seed)
    coves = _plan_coves(config, rng)

    ma_rows: list[dict[str, str]] = []
    geometry: list[tuple[_CovePlan, str, float, float]] = []
    for cove in coves:
        cove_ma_total = 0.0
        areas = []
        for k in range(cove.n_areas):
            surface = round(rng.uniform(0.3, 3.5), 2)
            distance = round(rng.uniform(0.3, 16.0), 1)
            areas.append((f"{cove.name}_ma{k + 1}", surface, distance))
            cove_ma_total += surface
        for ma_id, surface, distance in areas:
            geometry.append((cove, ma_id, surface, distance))
            who, schedule = _RANK_TO_ARRANGEMENT[cove.rank]
            ma_rows.append({
                "cove": cove.name,
                "ma_id": ma_id,
                "ma_surface_km2": f"{surface:.2f}",
                "oa_surface_km2": f"{cove.oa_surface:.2f}",
                "registered_fishers": str(cove.fishers),
                "distance_km": f"{distance:.1f}",
                "wave_exposure": "S" if cove.wave_south else "N",
                "land_access": rng.choice(("easy", "difficult")),
                "other_activities": "Y" if cove.other_activities else "N",
                "who": who,
                "schedule": schedule,
                "uneven": "Y" if cove.uneven else "N",
                "perceived_ineffective": "Y" if cove.perceived_ineffective else "N",
                "perceived_poaching": "1",  # placeholder, filled from pressure below
            })

    cove_totals: dict[str, float] = {}
    for cove, _, surface, _ in geometry:
        cove_totals[cove.name] = cove_totals.get(cove.name, 0.0) + surface
    iaoa_values = [
        (cove.oa_surface / cove.fishers) / (cove.oa_surface + cove_totals[cove.name])
        for cove, _, _, _ in geometry
    ]
    iaoa_pct = _percentile_ranks(iaoa_values)
    dist_pct = _percentile_ranks([distance for _, _, _, distance in geometry])

    p_ma_targets: list[float] = []
    for i, (cove, _, _, _) in enumerate(geometry):
        effective = max(1, cove.rank - int(cove.uneven) - int(cove.perceived_ineffective))
        pressure = (
            0.34 * (5 - effective) / 4
            + 0.28 * (1.0 - iaoa_pct[i])
            + 0.22 * dist_pct[i]
            + 0.16 * (0.0 if cove.other_activities else 1.0)
            + rng.gauss(0.0, 0.04)
        )
        pressure = min(max(pressure, 0.0), 1.0)
        if cove.flagship:
            p_ma = rng.uniform(0.015, 0.05)
        else:
            p_ma = min(max(0.9 * pressure**1.6, 0.005), 0.88)
        p_ma_targets.append(p_ma)
        ma_rows[i]["perceived_poaching"] = str(1 + min(3, int(pressure * 4)))

    # Open-access targets per cove; flagship coves pair a pristine MA with a
    # hammered commons so the relative-size index clears its upper bin.
    p_oa_by_cove: dict[str, float] = {}
    for cove in coves:
        if cove.flagship:
            idx = [i for i, g in enumerate(geometry) if g[0].name == cove.name]
            mu_ma = min(_mean_for_target(p_ma_targets[i], config.mls_mm,
                                         config.sigma_mm) for i in idx)
            e_hat_target = rng.uniform(0.60, 0.64)
            mu_oa = mu_ma * (1.0 - e_hat_target) / e_hat_target
            p_oa = _NORMAL.cdf((config.mls_mm - mu_oa) / config.sigma_mm)
            p_oa_by_cove[cove.name] = min(max(p_oa, 0.05), 0.97)
        else:
            p_oa_by_cove[cove.name] = min(max(rng.gauss(0.41, 0.05), 0.25), 0.60)

    sizes_rows: list[dict[str, str]] = []

    def emit_sample(cove_name: str, site: str, regime: str, mu: float, n: int) -> None:
        for _ in range(n):
            length = max(5.0, rng.gauss(mu, config.sigma_mm))
            sizes_rows.append({
                "cove": cove_name,
                "site_id": site,
                "regime": regime,
                "length_mm": f"{length:.1f}",
            })

    done_oa: set[str] = set()
    for i, (cove, ma_id, _, _) in enumerate(geometry):
        mu_ma = _mean_for_target(p_ma_targets[i], config.mls_mm, config.sigma_mm)
        emit_sample(cove.name, ma_id, "MA", mu_ma, config.ma_sample_size)
        if cove.name not in done_oa:
            mu_oa = _mean_for_target(p_oa_by_cove[cove.name], config.mls_mm,
                                     config.sigma_mm)
            emit_sample(cove.name, "oa1", "OA", mu_oa, config.oa_sample_size)
            done_oa.add(cove.name)

    return ma_rows, sizes_rows


def write_standin_csvs(ma_path: str | Path, sizes_path: str | Path,
                       config: StandInConfig = StandInConfig()) -> None:
    """Write both synthetic tables; regeneration is byte-identical per seed."""
    ma_rows, sizes_rows = generate_tables(config)
    with open(ma_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=MA_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(ma_rows)
    with open(sizes_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SIZES_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(sizes_rows)
