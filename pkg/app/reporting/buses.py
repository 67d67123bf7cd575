"""Presentational split of sized capacity over grid buses.

Buses carry no electrical meaning here: the network is not modelled, the
table only shows where the capacity would be placed.
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import WeightError
from app.core.formulation import SizingResult
from app.core.scenario import WEIGHT_TOLERANCE, BusShare


class BusEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    plant: str
    bus: str
    capacity_mw: float


class BusTable(BaseModel):
    """Per-plant, per-bus capacity."""

    model_config = ConfigDict(frozen=True)

    entries: List[BusEntry] = Field(default_factory=list)

    def by_bus(self) -> Dict[str, float]:
        totals: Dict[str, float] = {}
        for entry in self.entries:
            totals[entry.bus] = totals.get(entry.bus, 0.0) + entry.capacity_mw
        return totals

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [entry.model_dump() for entry in self.entries],
            columns=["plant", "bus", "capacity_mw"],
        )


def _check_weights(plant: str, shares: Sequence[BusShare]) -> None:
    if not shares:
        raise WeightError(f"{plant}: empty bus allocation")
    if any(share.weight < 0 for share in shares):
        raise WeightError(f"{plant}: negative bus weight")
    total = math.fsum(share.weight for share in shares)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise WeightError(f"{plant}: bus weights sum to {total}, expected 1")


def allocate_to_buses(
    result: SizingResult,
    allocation: Optional[Mapping[str, Sequence[BusShare]]] = None,
) -> BusTable:
    """Split each allocated plant's capacity over its buses.

    Args:
        result: Sized result
        allocation: Weights per plant; plants without an entry are skipped

    Returns:
        BusTable with capacity x weight per (plant, bus)

    Raises:
        WeightError: If a plant's weights are negative or do not sum to 1
    """
    allocation = allocation or {}
    entries = []
    for plant, shares in allocation.items():
        _check_weights(plant, shares)
        capacity = result.capacities.get(plant, 0.0)
        for share in shares:
            entries.append(BusEntry(plant=plant, bus=share.bus, capacity_mw=capacity * share.weight))
    return BusTable(entries=entries)
