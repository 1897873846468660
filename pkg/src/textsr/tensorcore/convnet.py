"""Strided conv / residual-block feature stack.

Three stride-2 3x3 convolutions (each halving the spatial grid, 8x total)
interleaved with two residual blocks, leaky-rectifier activation with
slope 0.2.  Forward-only: the stack supplies spatial features; its shape
contract (H, W) -> (H/8, W/8) is the load-bearing property.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from .ops import as_tensor, check_finite

LEAKY_SLOPE = 0.2


def leaky_relu(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, x, LEAKY_SLOPE * x)


def conv2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int = 1) -> np.ndarray:
    """3x3 convolution with zero padding 1.

    ``x`` is (H, W, C_in), ``weight`` is (3, 3, C_in, C_out).  With stride 2
    an even input side maps to exactly half.
    """
    kh, kw, c_in, c_out = weight.shape
    if x.ndim != 3 or x.shape[2] != c_in:
        raise ShapeError(f"conv2d: input {x.shape} incompatible with weight {weight.shape}")
    pad = kh // 2
    xp = np.pad(x, ((pad, pad), (pad, pad), (0, 0)))
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(0, 1))
    windows = windows[::stride, ::stride]  # (h, w, c_in, kh, kw)
    h, w = windows.shape[:2]
    patches = windows.transpose(0, 1, 3, 4, 2).reshape(h * w, kh * kw * c_in)
    out = patches @ weight.reshape(kh * kw * c_in, c_out)
    return (out + bias).reshape(h, w, c_out)


@dataclass(frozen=True)
class ConvLayer:
    weight: np.ndarray  # (3, 3, c_in, c_out)
    bias: np.ndarray


@dataclass(frozen=True)
class ResidualBlock:
    """x + conv(lrelu(conv(x))); zero inner weights make it the identity."""

    conv1: ConvLayer
    conv2: ConvLayer

    def forward(self, x: np.ndarray) -> np.ndarray:
        inner = conv2d(leaky_relu(conv2d(x, self.conv1.weight, self.conv1.bias)),
                       self.conv2.weight, self.conv2.bias)
        return x + inner


@dataclass(frozen=True)
class FeatureExtractorParams:
    """Parameters of the 8x-downsampling stack: down, res, down, res, down."""

    channels: int
    down: tuple[ConvLayer, ...] = field(default=())
    blocks: tuple[ResidualBlock, ...] = field(default=())

    @staticmethod
    def _layer(rng: np.random.Generator, c_in: int, c_out: int, scale: float) -> ConvLayer:
        w = rng.standard_normal((3, 3, c_in, c_out)) * scale / np.sqrt(9.0 * c_in)
        return ConvLayer(weight=w, bias=np.zeros(c_out))

    @classmethod
    def initialize(cls, channels: int, seed: int, in_channels: int = 3) -> "FeatureExtractorParams":
        rng = np.random.default_rng(seed)
        down = (
            cls._layer(rng, in_channels, channels, 1.0),
            cls._layer(rng, channels, channels, 1.0),
            cls._layer(rng, channels, channels, 1.0),
        )
        # residual branches start small so activations stay well scaled
        blocks = tuple(
            ResidualBlock(cls._layer(rng, channels, channels, 0.1),
                          cls._layer(rng, channels, channels, 0.1))
            for _ in range(2)
        )
        return cls(channels=channels, down=down, blocks=blocks)

    @classmethod
    def zero_blocks(cls, channels: int, seed: int, in_channels: int = 3) -> "FeatureExtractorParams":
        """Same downsampling convs, residual branches zeroed (identity blocks)."""
        params = cls.initialize(channels, seed, in_channels)
        zero = ConvLayer(weight=np.zeros((3, 3, channels, channels)), bias=np.zeros(channels))
        return cls(channels=channels, down=params.down, blocks=(ResidualBlock(zero, zero),) * 2)


def conv_residual_forward(x: np.ndarray, params: FeatureExtractorParams) -> np.ndarray:
    """Map an (H, W, 3) image to an (H/8, W/8, channels) feature grid.

    Raises :class:`ShapeError` when either spatial side is not divisible
    by 8.
    """
    x = as_tensor(x)
    if x.ndim != 3:
        raise ShapeError(f"conv_residual_forward expects (H, W, C), got {x.shape}")
    h, w = x.shape[:2]
    if h % 8 or w % 8 or h == 0 or w == 0:
        raise ShapeError(f"conv_residual_forward: spatial size {h}x{w} not divisible by 8")
    out = x
    for i, layer in enumerate(params.down):
        out = leaky_relu(conv2d(out, layer.weight, layer.bias, stride=2))
        if i < len(params.blocks):
            out = params.blocks[i].forward(out)
    return check_finite(out, "conv_residual_forward")
