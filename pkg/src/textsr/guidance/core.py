"""Guidance feature computation and one-step pipeline wiring.

The two perception stages run cross-attention over the flattened latent
grid: the abstract stage queries an embedding of the token string "TEXTS",
the concrete stage queries text-detector feature maps.  Spatial shape is
preserved throughout; only the channel dimension changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ProviderError, ShapeError
from ..tensorcore import (
    AttentionProjections,
    FeatureExtractorParams,
    LinearProjection,
    conv_residual_forward,
    cross_attention_backward,
    cross_attention_forward,
)
from ..tensorcore.ops import as_tensor, check_finite
from .providers import TextConceptProvider, TextDetectorFeatureProvider

TEXT_ANCHOR_TOKEN = "TEXTS"


@dataclass(frozen=True)
class GuidanceConfig:
    """Dimension and seeding knobs for the guidance path.

    The channel widths are configuration, not claims: ``latent_channels``
    is the feature-grid width c, ``attention_dim`` the projected query/key
    width d, and the two stage outputs keep ``latent_channels`` by default
    so stages can be bypassed in ablation probes.
    """

    latent_channels: int = 64
    attention_dim: int = 32
    text_width: int = 64
    detector_channels: int = 4
    abstract_channels: int = 64
    output_channels: int = 64
    param_seed: int = 0

    def __post_init__(self):
        for name in (
            "latent_channels",
            "attention_dim",
            "text_width",
            "detector_channels",
            "abstract_channels",
            "output_channels",
        ):
            if getattr(self, name) <= 0:
                raise ShapeError(f"GuidanceConfig.{name} must be positive")


@dataclass(frozen=True)
class GuidanceParams:
    """All learnable-shaped parameters, reproducibly seeded."""

    config: GuidanceConfig
    extractor: FeatureExtractorParams
    abstract_stage: AttentionProjections
    concrete_stage: AttentionProjections

    @classmethod
    def from_config(cls, config: GuidanceConfig) -> "GuidanceParams":
        rng = np.random.default_rng(config.param_seed)

        def proj(name: str, d_in: int, d_out: int) -> LinearProjection:
            return LinearProjection(name, rng.standard_normal((d_in, d_out)) / np.sqrt(d_in))

        abstract = AttentionProjections(
            query=proj("lr_query", config.latent_channels, config.attention_dim),
            key=proj("abstract_key", config.text_width, config.attention_dim),
            value=proj("abstract_value", config.text_width, config.abstract_channels),
        )
        concrete = AttentionProjections(
            query=proj("abstract_query", config.abstract_channels, config.attention_dim),
            key=proj("concrete_key", config.detector_channels, config.attention_dim),
            value=proj("concrete_value", config.detector_channels, config.output_channels),
        )
        extractor = FeatureExtractorParams.initialize(
            config.latent_channels, seed=config.param_seed + 1
        )
        return cls(config, extractor, abstract, concrete)


def extract_primary_features(lr_image: np.ndarray, params: GuidanceParams) -> np.ndarray:
    """(H, W, 3) image -> (H/8, W/8, c) latent features."""
    return conv_residual_forward(as_tensor(lr_image), params.extractor)


def _flatten_grid(x: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    h, w, c = x.shape
    return x.reshape(h * w, c), (h, w)


def abstract_perception(
    f_lr: np.ndarray,
    provider: TextConceptProvider,
    params: GuidanceParams,
) -> np.ndarray:
    """Attend every latent location over the "TEXTS" token embedding."""
    f_lr = as_tensor(f_lr)
    if f_lr.ndim != 3:
        raise ShapeError(f"abstract_perception expects (h, w, c), got {f_lr.shape}")
    try:
        f_text = as_tensor(provider.encode(TEXT_ANCHOR_TOKEN))
    except Exception as exc:
        raise ProviderError(
            f'text concept provider failed for token "{TEXT_ANCHOR_TOKEN}": {exc}'
        ) from exc
    if f_text.ndim != 2 or f_text.shape[0] < 1:
        raise ProviderError(
            f'text concept provider returned empty features for token "{TEXT_ANCHOR_TOKEN}"'
        )
    queries, (h, w) = _flatten_grid(f_lr)
    out, _ = cross_attention_forward(queries, f_text, params.abstract_stage)
    return out.reshape(h, w, -1)


def concrete_perception(
    f_abs: np.ndarray,
    provider: TextDetectorFeatureProvider,
    lr_image: np.ndarray,
    params: GuidanceParams,
) -> np.ndarray:
    """Attend abstract-enhanced features over detector feature maps."""
    f_abs = as_tensor(f_abs)
    if f_abs.ndim != 3:
        raise ShapeError(f"concrete_perception expects (h, w, c), got {f_abs.shape}")
    try:
        f_tdm = as_tensor(provider.features(lr_image))
    except ShapeError:
        raise
    except Exception as exc:
        raise ProviderError(f"detector feature provider failed: {exc}") from exc
    if f_tdm.ndim != 3 or f_tdm.shape[:2] != f_abs.shape[:2]:
        raise ShapeError(
            f"concrete_perception: detector grid {f_tdm.shape[:2]} does not match "
            f"latent grid {f_abs.shape[:2]}"
        )
    queries, (h, w) = _flatten_grid(f_abs)
    kv, _ = _flatten_grid(f_tdm)
    out, _ = cross_attention_forward(queries, kv, params.concrete_stage)
    return out.reshape(h, w, -1)


def texts_guidance(
    lr_image: np.ndarray,
    text_provider: TextConceptProvider,
    detector_provider: TextDetectorFeatureProvider,
    config: GuidanceConfig,
    params: GuidanceParams | None = None,
) -> np.ndarray:
    """Full guidance chain: features -> abstract stage -> concrete stage."""
    if params is None:
        params = GuidanceParams.from_config(config)
    f_lr = extract_primary_features(lr_image, params)
    f_abs = abstract_perception(f_lr, text_provider, params)
    return concrete_perception(f_abs, detector_provider, lr_image, params)


# --- flattened two-stage core, exposed for gradient verification ---------


def two_stage_attention(
    lr_rows: np.ndarray,
    text_rows: np.ndarray,
    detector_rows: np.ndarray,
    abstract_stage: AttentionProjections,
    concrete_stage: AttentionProjections,
) -> np.ndarray:
    """Both perception stages on already-flattened row matrices."""
    abs_rows, _ = cross_attention_forward(lr_rows, text_rows, abstract_stage)
    out, _ = cross_attention_forward(abs_rows, detector_rows, concrete_stage)
    return out


def two_stage_scalar_loss(
    lr_rows: np.ndarray,
    text_rows: np.ndarray,
    detector_rows: np.ndarray,
    abstract_stage: AttentionProjections,
    concrete_stage: AttentionProjections,
    loss_weights: np.ndarray,
) -> float:
    """Weighted-sum probe of the two-stage output, used by gradient checks."""
    out = two_stage_attention(lr_rows, text_rows, detector_rows, abstract_stage, concrete_stage)
    return float(np.sum(out * loss_weights))


def two_stage_gradients(
    lr_rows: np.ndarray,
    text_rows: np.ndarray,
    detector_rows: np.ndarray,
    abstract_stage: AttentionProjections,
    concrete_stage: AttentionProjections,
    loss_weights: np.ndarray,
) -> dict[str, np.ndarray]:
    """Analytic gradients of the scalar probe w.r.t. all six projections."""
    abs_rows, cache1 = cross_attention_forward(lr_rows, text_rows, abstract_stage)
    _, cache2 = cross_attention_forward(abs_rows, detector_rows, concrete_stage)
    g2 = cross_attention_backward(cache2, as_tensor(loss_weights))
    g1 = cross_attention_backward(cache1, g2.d_query_src)
    return {
        abstract_stage.query.name: g1.d_query_weight,
        abstract_stage.key.name: g1.d_key_weight,
        abstract_stage.value.name: g1.d_value_weight,
        concrete_stage.query.name: g2.d_query_weight,
        concrete_stage.key.name: g2.d_key_weight,
        concrete_stage.value.name: g2.d_value_weight,
    }


# --- one-step pipeline -----------------------------------------------------


@dataclass
class OneStepStubs:
    """Pluggable stand-ins for the encode / prompt / refine / decode stages."""

    encoder: Callable[[np.ndarray], np.ndarray]
    prompt_extractor: Callable[[np.ndarray], np.ndarray]
    denoiser: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    decoder: Callable[[np.ndarray], np.ndarray]
    denoiser_calls: int = field(default=0, compare=False)


def one_step_pipeline(
    lr_image: np.ndarray,
    stubs: OneStepStubs,
    text_provider: TextConceptProvider,
    detector_provider: TextDetectorFeatureProvider,
    config: GuidanceConfig,
    params: GuidanceParams | None = None,
) -> np.ndarray:
    """Refine the latent in exactly one denoiser call and decode.

    The denoiser receives all three conditioning tensors (guidance
    features, prompt features, encoded latent); its output must match the
    latent shape, and the decoded image must be 8x the latent grid.
    """
    lr_image = as_tensor(lr_image)
    h_img, w_img = lr_image.shape[:2]
    if h_img % 8 or w_img % 8:
        raise ShapeError(f"one_step_pipeline: image {h_img}x{w_img} not divisible by 8")
    grid = (h_img // 8, w_img // 8)

    f_v = as_tensor(stubs.encoder(lr_image))
    if f_v.ndim != 3 or f_v.shape[:2] != grid:
        raise ShapeError(
            f"one_step_pipeline: encoder stub produced grid "
            f"{f_v.shape[:2] if f_v.ndim == 3 else f_v.shape}, expected {grid}"
        )
    f_p = check_finite(as_tensor(stubs.prompt_extractor(lr_image)), "prompt extractor stub")
    f_texts = texts_guidance(lr_image, text_provider, detector_provider, config, params)

    latent = as_tensor(stubs.denoiser(f_texts, f_p, f_v))
    stubs.denoiser_calls += 1
    if latent.shape != f_v.shape:
        raise ShapeError(
            f"one_step_pipeline: denoiser stub output {latent.shape} "
            f"does not match latent shape {f_v.shape}"
        )
    sr = as_tensor(stubs.decoder(latent))
    if sr.ndim != 3 or sr.shape[0] != grid[0] * 8 or sr.shape[1] != grid[1] * 8:
        raise ShapeError(
            f"one_step_pipeline: decoder stub output {sr.shape} is not 8x the "
            f"latent grid {grid}"
        )
    return check_finite(sr, "one_step_pipeline output")


def default_one_step_stubs(
    config: GuidanceConfig,
    guidance_gain: float = 0.0,
    mix_seed: int = 7,
) -> OneStepStubs:
    """Deterministic plumbing stubs.

    Encoder block-averages the image onto the latent grid, the decoder
    nearest-upsamples back, and the denoiser passes the latent through,
    optionally adding ``guidance_gain`` times a fixed projection of the
    guidance features so conditioning reaches the output.
    """
    rng = np.random.default_rng(mix_seed)
    mix = rng.standard_normal((config.output_channels, 3)) / np.sqrt(config.output_channels)

    def encoder(img: np.ndarray) -> np.ndarray:
        h, w = img.shape[0] // 8, img.shape[1] // 8
        return img.reshape(h, 8, w, 8, img.shape[2]).mean(axis=(1, 3))

    def prompt_extractor(img: np.ndarray) -> np.ndarray:
        flat = img.reshape(-1, img.shape[2])
        return np.stack([flat.mean(axis=0), flat.std(axis=0)])

    def denoiser(f_texts: np.ndarray, f_p: np.ndarray, f_v: np.ndarray) -> np.ndarray:
        if guidance_gain == 0.0:
            return f_v
        return f_v + guidance_gain * (f_texts @ mix[:, : f_v.shape[2]])

    def decoder(latent: np.ndarray) -> np.ndarray:
        return np.clip(latent.repeat(8, axis=0).repeat(8, axis=1), 0.0, 1.0)

    return OneStepStubs(encoder, prompt_extractor, denoiser, decoder)
