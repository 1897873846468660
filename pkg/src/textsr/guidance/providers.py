"""Provider interfaces for external models, plus deterministic stand-ins.

The real systems behind these interfaces (a text encoder, a text-detection
backbone) are heavyweight pretrained networks.  The defaults here are
dependency-free stand-ins with the same contracts: the text-concept stub
hashes the token string to a seeded embedding, and the detector stub pools
edge-density maps onto the latent grid as a crude "where do glyph-like
gradients live" signal.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import ShapeError


@runtime_checkable
class TextConceptProvider(Protocol):
    def encode(self, token: str) -> np.ndarray:
        """Return (n_tok, d_text) embedding rows for ``token``; deterministic."""
        ...


@runtime_checkable
class TextDetectorFeatureProvider(Protocol):
    def features(self, image: np.ndarray) -> np.ndarray:
        """Return an (h, w, c_tdm) feature grid aligned with the latent grid."""
        ...


@dataclass(frozen=True)
class HashedTextConceptProvider:
    """Seeded hash-to-vector embedding: one row per character, n_tok >= 1."""

    width: int = 64
    seed: int = 0

    def encode(self, token: str) -> np.ndarray:
        n_rows = max(1, len(token))
        rows = np.empty((n_rows, self.width))
        for i in range(n_rows):
            digest = hashlib.sha256(f"{self.seed}:{token}:{i}".encode()).digest()
            rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
            rows[i] = rng.standard_normal(self.width)
        return rows


def _to_gray(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 3:
        return image @ np.array([0.299, 0.587, 0.114])
    return image


def _box_blur(x: np.ndarray) -> np.ndarray:
    xp = np.pad(x, 1, mode="edge")
    acc = np.zeros_like(x)
    for dy in (0, 1, 2):
        for dx in (0, 1, 2):
            acc += xp[dy:dy + x.shape[0], dx:dx + x.shape[1]]
    return acc / 9.0


def _sobel_magnitude(x: np.ndarray) -> np.ndarray:
    xp = np.pad(x, 1, mode="edge")
    gx = (
        (xp[:-2, 2:] + 2.0 * xp[1:-1, 2:] + xp[2:, 2:])
        - (xp[:-2, :-2] + 2.0 * xp[1:-1, :-2] + xp[2:, :-2])
    )
    gy = (
        (xp[2:, :-2] + 2.0 * xp[2:, 1:-1] + xp[2:, 2:])
        - (xp[:-2, :-2] + 2.0 * xp[:-2, 1:-1] + xp[:-2, 2:])
    )
    return np.hypot(gx, gy)


@dataclass(frozen=True)
class EdgeDensityFeatureProvider:
    """Gradient-magnitude pyramid pooled to the latent grid.

    Channel k applies k box-blur passes before the Sobel magnitude, so the
    channels span fine-to-coarse edge density.
    """

    channels: int = 4
    downsample: int = 8

    def features(self, image: np.ndarray) -> np.ndarray:
        gray = _to_gray(image)
        h_img, w_img = gray.shape
        d = self.downsample
        if h_img % d or w_img % d:
            raise ShapeError(
                f"detector features: image {h_img}x{w_img} not divisible by {d}"
            )
        maps = []
        current = gray
        for _ in range(self.channels):
            mag = _sobel_magnitude(current)
            pooled = mag.reshape(h_img // d, d, w_img // d, d).mean(axis=(1, 3))
            maps.append(pooled)
            current = _box_blur(current)
        return np.stack(maps, axis=-1)
