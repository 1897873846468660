"""Recipe-driven HR -> LR degradation synthesis.

Second-order scheme: two rounds of blur / resize / noise / compression
followed by a final ring-filter pass and an exact resize to HR/scale.
Every random draw is captured in a serializable recipe so degradation is
a pure, replayable function of (image, recipe).
"""

from .kernels import BlurKernel, BlurSpec, build_blur_kernel
from .stages import JpegSpec, NoiseSpec, ResizeSpec, add_noise, apply_blur, jpeg_roundtrip, resize
from .recipe import (
    DEGRADATION_RANGES_V1,
    DegradationRecipe,
    degrade,
    degrade_corpus,
    sample_recipe,
)

__all__ = [
    "BlurKernel",
    "BlurSpec",
    "build_blur_kernel",
    "ResizeSpec",
    "NoiseSpec",
    "JpegSpec",
    "apply_blur",
    "resize",
    "add_noise",
    "jpeg_roundtrip",
    "DegradationRecipe",
    "DEGRADATION_RANGES_V1",
    "sample_recipe",
    "degrade",
    "degrade_corpus",
]
