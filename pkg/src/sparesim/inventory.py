"""Single-echelon inventory cost simulation for one part at one dealer.

An order-up-to (R, S) policy is simulated day by day over an event
queue with three event kinds, processed in a fixed same-day order:
deliveries first (stock is available for same-day demand), then
demand, then the periodic inventory check (reviews see the end-of-day
position). Unmet demand is lost - it incurs badwill and triggers a
rush order for the shortfall with a short lead time and a fixed
premium. Holding cost accrues on end-of-day on-hand stock; transport
is charged per unit on every delivery, rush included.

The simulation itself is deterministic: identical inputs produce
identical KPI reports.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InvalidInputError

# same-day processing order
PRIORITY_DELIVERY = 0
PRIORITY_DEMAND = 1
PRIORITY_CHECK = 2


class EventKind(IntEnum):
    DELIVERY = PRIORITY_DELIVERY
    DEMAND = PRIORITY_DEMAND
    INVENTORY_CHECK = PRIORITY_CHECK


@dataclass(frozen=True)
class Event:
    time: int
    kind: EventKind
    quantity: int = 0
    rush: bool = False


@dataclass(frozen=True)
class PolicyParams:
    review_period_days: int = 7
    lead_time_days: int = 14
    rush_lead_days: int = 2
    service_z: float = 1.645
    initial_stock: int | None = None  # None -> ceil(mu * (L + R))

    def __post_init__(self) -> None:
        if self.review_period_days < 1:
            raise InvalidInputError(f"review_period_days must be >= 1, got {self.review_period_days}")
        if self.lead_time_days < 0 or self.rush_lead_days < 0:
            raise InvalidInputError("lead times must be >= 0")
        if self.initial_stock is not None and self.initial_stock < 0:
            raise InvalidInputError(f"initial_stock must be >= 0, got {self.initial_stock}")


@dataclass(frozen=True)
class CostParams:
    holding_per_unit_day: float = 0.1
    order_fixed: float = 50.0
    rush_order_fixed_premium: float = 200.0
    transport_per_unit: float = 5.0
    badwill_per_unit: float = 500.0

    def __post_init__(self) -> None:
        for name in (
            "holding_per_unit_day",
            "order_fixed",
            "rush_order_fixed_premium",
            "transport_per_unit",
            "badwill_per_unit",
        ):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")


@dataclass(frozen=True)
class PolicyLevels:
    safety_stock: int
    reorder_point: int
    order_up_to: int
    initial_stock: int


@dataclass
class InventoryState:
    """Mutable stock position and accumulators for one simulation run."""

    on_hand: int
    on_order: int = 0
    filled: int = 0
    unfilled: int = 0
    delivered: int = 0
    holding: float = 0.0
    order_cost: float = 0.0
    rush_cost: float = 0.0
    transport: float = 0.0
    badwill: float = 0.0
    order_count: int = 0
    rush_order_count: int = 0

    @property
    def position(self) -> int:
        return self.on_hand + self.on_order


@dataclass
class KpiReport:
    total_cost: float
    holding_cost: float
    order_cost: float
    rush_cost: float
    transport_cost: float
    badwill_cost: float
    service_level: float
    order_count: int
    rush_order_count: int
    # bookkeeping useful for invariants, not part of the CSV schema
    total_demand: int
    filled_units: int
    delivered_units: int
    on_hand_end: int


def compute_policy(
    forecast_values, residual_sigma: float, params: PolicyParams
) -> PolicyLevels:
    """Safety stock, reorder point and order-up-to level from a forecast.

    Uses the normal-demand formulas with mu = mean daily forecast over
    the simulation window and sigma the daily residual estimate:
    SS = z*sigma*sqrt(L+R), S = mu*(L+R) + SS, ROP = mu*L + SS, each
    rounded up to whole units.
    """
    f = np.asarray(forecast_values, dtype=np.float64)
    if f.ndim != 1 or f.size == 0:
        raise InvalidInputError("forecast_values must be a non-empty 1-d sequence")
    if not math.isfinite(residual_sigma) or residual_sigma < 0:
        raise InvalidInputError(f"residual_sigma must be finite and >= 0, got {residual_sigma!r}")
    mu = float(f.mean())
    window = params.lead_time_days + params.review_period_days
    safety = math.ceil(params.service_z * residual_sigma * math.sqrt(window))
    safety = max(0, safety)
    order_up_to = math.ceil(mu * window) + safety
    reorder_point = math.ceil(mu * params.lead_time_days) + safety
    initial = params.initial_stock
    if initial is None:
        initial = math.ceil(mu * window)
    return PolicyLevels(
        safety_stock=safety,
        reorder_point=reorder_point,
        order_up_to=order_up_to,
        initial_stock=initial,
    )


def residual_sigma_from(history, forecast_on_history) -> float:
    """Population std of the daily residuals (actual - forecast)."""
    a = np.asarray(history, dtype=np.float64)
    f = np.asarray(forecast_on_history, dtype=np.float64)
    if a.ndim != 1 or a.size == 0 or a.shape != f.shape:
        raise InvalidInputError("history and forecast_on_history must be non-empty and aligned")
    return float(np.std(a - f))


def run_des(
    demand_counts,
    forecast_values,
    levels: PolicyLevels,
    policy: PolicyParams,
    costs: CostParams,
) -> KpiReport:
    """Simulate the inventory process over the demand window.

    ``demand_counts`` and ``forecast_values`` must cover the same window
    (the forecast only matters through ``levels`` but the alignment is
    enforced to catch wiring mistakes).
    """
    demand = np.asarray(demand_counts)
    forecast = np.asarray(forecast_values)
    if demand.ndim != 1 or demand.shape != forecast.shape:
        raise InvalidInputError(
            f"demand and forecast windows are misaligned: {demand.shape} vs {forecast.shape}"
        )
    horizon = int(demand.size)

    seq = itertools.count()
    queue: list[tuple[int, int, int, Event]] = []

    def push(event: Event) -> None:
        heapq.heappush(queue, (event.time, int(event.kind), next(seq), event))

    for day in range(0, horizon, policy.review_period_days):
        push(Event(time=day, kind=EventKind.INVENTORY_CHECK))
    for day in range(horizon):
        quantity = int(demand[day])
        if quantity > 0:
            push(Event(time=day, kind=EventKind.DEMAND, quantity=quantity))

    state = InventoryState(on_hand=int(levels.initial_stock))

    for day in range(horizon):
        while queue and queue[0][0] == day:
            _, _, _, event = heapq.heappop(queue)
            if event.kind == EventKind.DELIVERY:
                state.on_hand += event.quantity
                state.on_order -= event.quantity
                state.delivered += event.quantity
                state.transport += costs.transport_per_unit * event.quantity
            elif event.kind == EventKind.DEMAND:
                take = min(state.on_hand, event.quantity)
                state.on_hand -= take
                state.filled += take
                shortfall = event.quantity - take
                if shortfall > 0:
                    state.unfilled += shortfall
                    state.badwill += costs.badwill_per_unit * shortfall
                    state.rush_cost += costs.rush_order_fixed_premium
                    state.rush_order_count += 1
                    state.on_order += shortfall
                    push(
                        Event(
                            time=day + policy.rush_lead_days,
                            kind=EventKind.DELIVERY,
                            quantity=shortfall,
                            rush=True,
                        )
                    )
            else:  # inventory check
                order_qty = levels.order_up_to - state.position
                if order_qty > 0:
                    state.order_count += 1
                    state.order_cost += costs.order_fixed
                    state.on_order += order_qty
                    push(
                        Event(
                            time=day + policy.lead_time_days,
                            kind=EventKind.DELIVERY,
                            quantity=order_qty,
                        )
                    )
        state.holding += costs.holding_per_unit_day * state.on_hand

    total_demand = state.filled + state.unfilled
    service_level = 1.0 if total_demand == 0 else state.filled / total_demand
    total = state.holding + state.order_cost + state.rush_cost + state.transport + state.badwill
    return KpiReport(
        total_cost=total,
        holding_cost=state.holding,
        order_cost=state.order_cost,
        rush_cost=state.rush_cost,
        transport_cost=state.transport,
        badwill_cost=state.badwill,
        service_level=service_level,
        order_count=state.order_count,
        rush_order_count=state.rush_order_count,
        total_demand=total_demand,
        filled_units=state.filled,
        delivered_units=state.delivered,
        on_hand_end=state.on_hand,
    )
