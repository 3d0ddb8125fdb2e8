"""Asymmetric inter-city relatedness indices from toponym awareness counts."""

from .channel import ChannelResult, channel_result, te_directed, ts_combined, ts_directed, ts_expected
from .errors import (
    AwarenessError,
    CatalogError,
    CityResolutionError,
    ConfigError,
    ParseError,
    PeriodError,
    ValidationError,
)
from .indices import IndexVector, awareness_index, gai_reference, spatial_awareness_index
from .model import (
    AwarenessMatrix,
    CityCatalog,
    CityEntry,
    IndexReport,
    InteractionRecord,
    Period,
    Tier,
    WeightMatrix,
    build_matrix,
    validate_matrix,
)
from .spatial import (
    SpatialConfig,
    great_circle_distance,
    normalized_global_distance,
    travel_time,
    weight_matrix,
)

__version__ = "0.1.0"
