"""Text-aware guidance features.

Low-resolution images are mapped to a latent feature grid, enriched first
by attending over an embedding of the literal token string "TEXTS"
(abstract stage) and then over text-detector feature maps (concrete
stage), and finally consumed by a one-step refine/decode pipeline built
from pluggable stubs.
"""

from .providers import (
    EdgeDensityFeatureProvider,
    HashedTextConceptProvider,
    TextConceptProvider,
    TextDetectorFeatureProvider,
)
from .core import (
    GuidanceConfig,
    GuidanceParams,
    OneStepStubs,
    abstract_perception,
    concrete_perception,
    default_one_step_stubs,
    extract_primary_features,
    one_step_pipeline,
    texts_guidance,
    two_stage_attention,
    two_stage_gradients,
    two_stage_scalar_loss,
)

__all__ = [
    "TextConceptProvider",
    "TextDetectorFeatureProvider",
    "HashedTextConceptProvider",
    "EdgeDensityFeatureProvider",
    "GuidanceConfig",
    "GuidanceParams",
    "OneStepStubs",
    "extract_primary_features",
    "abstract_perception",
    "concrete_perception",
    "texts_guidance",
    "one_step_pipeline",
    "default_one_step_stubs",
    "two_stage_attention",
    "two_stage_scalar_loss",
    "two_stage_gradients",
]
