"""Spot models, Asian option and gas storage pricing."""
from .asian import AsianSpec, price_asian
from .models import (
    ForwardCurve,
    PriceResult,
    SpotModel1F,
    SpotModel2F,
    drift_1f,
    drift_2f,
    simulate_spot_paths,
)
from .storage import StorageSpec, intrinsic_value, price_storage

__all__ = [
    "AsianSpec",
    "ForwardCurve",
    "PriceResult",
    "SpotModel1F",
    "SpotModel2F",
    "StorageSpec",
    "drift_1f",
    "drift_2f",
    "intrinsic_value",
    "price_asian",
    "price_storage",
    "simulate_spot_paths",
]
