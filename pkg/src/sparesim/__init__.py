"""Spare-parts demand and inventory simulation toolkit.

A closed loop in four stages: a survival-model demand generator over a
dealer/truck/part hierarchy, classical intermittent-demand forecasters
(plus ingestion of external forecasts), a discrete-event inventory cost
simulation, and cross-scenario analysis relating forecast accuracy
metrics to operational KPIs.
"""

__version__ = "0.1.0"

from .demand import DemandEvent, DemandSeries, GeneratorConfig
from .forecasting import ForecastSeries, SmoothingParams
from .inventory import CostParams, KpiReport, PolicyParams
from .survival import Family, HazardModel, MedianSpec

__all__ = [
    "__version__",
    "CostParams",
    "DemandEvent",
    "DemandSeries",
    "Family",
    "ForecastSeries",
    "GeneratorConfig",
    "HazardModel",
    "KpiReport",
    "MedianSpec",
    "PolicyParams",
    "SmoothingParams",
]
