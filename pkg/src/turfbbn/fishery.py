"""Field-data computations for a TURF fishery.

Covers the enforcement ranking tree and its effectiveness adjustment, the
open-access availability index, shell-length metrics for the managed versus
open-access regimes, and the paired rank test bundling them together.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateGeometry, EmptySample, InvalidArrangement
from .ranktests import RankTestResult, rank_sum, signed_rank

MIN_LANDING_SIZE_MM = 65.0
PROTOCOL_SAMPLE_SIZE = 200

WAVE_EXPOSURES = ("exposed_south", "protected_north")
LAND_ACCESS = ("easy", "difficult")
SCHEDULES = ("occasional", "daily_8h", "daily_24h")

# Surveillance ranking tree: who watches and how often, scored 1 (none)
# to 5 (a hired guard around the clock). Anything else is off the tree.
_RANKS: dict[tuple[str, str | None], int] = {
    ("none", None): 1,
    ("fishers", "occasional"): 2,
    ("fishers", "daily_8h"): 3,
    ("fishers", "daily_24h"): 4,
    ("hired", "daily_24h"): 5,
}


@dataclass(frozen=True)
class SurveillanceArrangement:
    who: str  # none | fishers | hired
    schedule: str | None = None  # occasional | daily_8h | daily_24h

    def __post_init__(self) -> None:
        if (self.who, self.schedule) not in _RANKS:
            raise InvalidArrangement(
                f"no rank for who={self.who!r}, schedule={self.schedule!r}"
            )


def rank_enforcement(arrangement: SurveillanceArrangement) -> int:
    """Enforcement rank 1-5 for a valid surveillance arrangement."""
    return _RANKS[(arrangement.who, arrangement.schedule)]


def effective_enforcement(rank: int, uneven: bool, perceived_ineffective: bool) -> int:
    """Rank reduced one score per credibility problem, floored at 1."""
    if not 1 <= rank <= 5:
        raise ValueError(f"rank must be 1-5, got {rank}")
    return max(1, rank - int(uneven) - int(perceived_ineffective))


@dataclass(frozen=True)
class EnforcementProfile:
    rank: int
    uneven_across_mas: bool
    perceived_ineffective: bool

    def __post_init__(self) -> None:
        if not 1 <= self.rank <= 5:
            raise ValueError(f"rank must be 1-5, got {self.rank}")

    @property
    def effective_rank(self) -> int:
        return effective_enforcement(self.rank, self.uneven_across_mas,
                                     self.perceived_ineffective)


@dataclass(frozen=True)
class MaRecord:
    """Drivers observed for one management area."""

    cove: str
    ma_id: str
    ma_surface: float  # km^2
    oa_surface_accessible: float  # km^2
    registered_fishers: int
    distance_to_surveillance: float  # km
    wave_exposure: str  # exposed_south | protected_north
    land_access: str  # easy | difficult
    other_activities: bool
    enforcement: EnforcementProfile
    perceived_poaching: int  # ordinal 1-4
    iaoa: float

    def __post_init__(self) -> None:
        if self.ma_surface < 0 or self.oa_surface_accessible < 0:
            raise ValueError("areas must be >= 0")
        if self.registered_fishers < 1:
            raise ValueError("a management area needs at least one fisher")
        if self.distance_to_surveillance < 0:
            raise ValueError("distance must be >= 0")
        if self.wave_exposure not in WAVE_EXPOSURES:
            raise ValueError(f"unknown wave exposure {self.wave_exposure!r}")
        if self.land_access not in LAND_ACCESS:
            raise ValueError(f"unknown land access {self.land_access!r}")
        if not 1 <= self.perceived_poaching <= 4:
            raise ValueError("perceived poaching is an ordinal 1-4")
        if not 0.0 <= self.iaoa:
            raise ValueError("iaoa must be >= 0")


@dataclass(frozen=True)
class SizeSample:
    """Shell lengths measured at one site under one harvest regime."""

    cove: str
    site_id: str
    regime: str  # MA | OA
    lengths_mm: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths_mm", tuple(self.lengths_mm))
        if self.regime not in ("MA", "OA"):
            raise ValueError(f"regime must be MA or OA, got {self.regime!r}")
        if any(length <= 0 for length in self.lengths_mm):
            raise ValueError("shell lengths must be positive")

    @property
    def n(self) -> int:
        return len(self.lengths_mm)

    @property
    def below_protocol(self) -> bool:
        return self.n < PROTOCOL_SAMPLE_SIZE


@dataclass(frozen=True)
class PairedStateMetrics:
    """Resource-state summary for one cove's MA/OA pair."""

    e_hat: float
    illegal_proportion_ma: float
    illegal_proportion_oa: float
    w: float
    p_value: float

    def __post_init__(self) -> None:
        if not 0.0 < self.e_hat < 1.0:
            raise ValueError("e_hat must lie strictly between 0 and 1")
        for p in (self.illegal_proportion_ma, self.illegal_proportion_oa):
            if not 0.0 <= p <= 1.0:
                raise ValueError("illegal proportions must lie in [0, 1]")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")


def iaoa(oa_area: float, ma_area_total: float, fishers: int) -> float:
    """Open-access area per registered fisher, relative to total local area.

    Low values signal effort crowding onto little open ground: more fishers,
    less open area, or more area locked into management all push it down.
    """
    if oa_area < 0 or ma_area_total < 0:
        raise ValueError("areas must be >= 0")
    if fishers < 1:
        raise ValueError("need at least one registered fisher")
    if oa_area == 0 and ma_area_total == 0:
        raise DegenerateGeometry("no area at all: index undefined")
    return (oa_area / fishers) / (oa_area + ma_area_total)


def illegal_proportion(lengths_mm: Sequence[float],
                       mls_mm: float = MIN_LANDING_SIZE_MM) -> float:
    """Fraction of shells strictly below the minimum landing size."""
    if not lengths_mm:
        raise EmptySample("cannot take a proportion of nothing")
    return sum(1 for length in lengths_mm if length < mls_mm) / len(lengths_mm)


def relative_median_size(ma_lengths: Sequence[float],
                         oa_lengths: Sequence[float]) -> float:
    """Normalized median ratio: median(MA) / (median(MA) + median(OA)).

    Above 0.5 means shells inside the management area run larger; values
    near 1 indicate a well-kept stock.
    """
    if not ma_lengths or not oa_lengths:
        raise EmptySample("both samples must be non-empty")
    m = statistics.median(ma_lengths)
    o = statistics.median(oa_lengths)
    return m / (m + o)


def wilcoxon_test(ma_lengths: Sequence[float], oa_lengths: Sequence[float],
                  mode: str = "rank_sum") -> RankTestResult:
    """Wilcoxon comparison of the two regimes' length distributions.

    rank_sum treats the samples as independent (they are measured on
    different individuals and usually differ in size); signed_rank treats
    them as paired and needs equal lengths.
    """
    if mode == "rank_sum":
        return rank_sum(ma_lengths, oa_lengths)
    if mode == "signed_rank":
        return signed_rank(ma_lengths, oa_lengths)
    raise ValueError(f"unknown mode {mode!r}")


def paired_state_metrics(ma_sample: SizeSample, oa_sample: SizeSample,
                         mls: float = MIN_LANDING_SIZE_MM,
                         mode: str = "rank_sum") -> PairedStateMetrics:
    """Bundle ê, both illegal proportions, and the rank test for one cove."""
    if ma_sample.cove != oa_sample.cove:
        raise ValueError(
            f"samples from different coves: {ma_sample.cove!r} vs {oa_sample.cove!r}"
        )
    if ma_sample.regime != "MA" or oa_sample.regime != "OA":
        raise ValueError("expected one MA sample and one OA sample, in that order")
    test = wilcoxon_test(ma_sample.lengths_mm, oa_sample.lengths_mm, mode=mode)
    return PairedStateMetrics(
        e_hat=relative_median_size(ma_sample.lengths_mm, oa_sample.lengths_mm),
        illegal_proportion_ma=illegal_proportion(ma_sample.lengths_mm, mls),
        illegal_proportion_oa=illegal_proportion(oa_sample.lengths_mm, mls),
        w=test.w,
        p_value=test.p,
    )
