"""Frozen pretrained backbones and their feature tap points.

Seven networks come from torchvision; NASNet (which torchvision lacks)
comes from keras. Tap points: AlexNet takes the output of the first
fully-connected layer (fc6); ViT takes the class-token representation after
the final encoder norm; every other network taps its global-average-pool
output. Preprocessing is the same everywhere: bilinear-resize the 128x256
ROI to the network's square input size, scale to [0, 1], then normalize
with the ImageNet channel statistics.

Weights are the canonical ImageNet checkpoints and are never fine-tuned.
``weights="random"`` builds seeded randomly-initialized networks instead,
for offline tests: dimensions, determinism and file-format behavior do not
depend on the checkpoint values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import ExtractorError

IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)

BACKBONE_KEYS = (
    "alexnet",
    "googlenet",
    "resnet50",
    "densenet201",
    "mobilenet_v2",
    "efficientnet_b0",
    "nasnet",
    "vit",
)


@dataclass(frozen=True)
class TapSpec:
    key: str
    tap_point: str
    input_size: int
    dim: int


def tap_spec(key: str, nasnet_variant: str = "mobile") -> TapSpec:
    table = {
        "alexnet": TapSpec("alexnet", "first fully-connected layer (fc6) output", 224, 4096),
        "googlenet": TapSpec("googlenet", "global average pooling output", 224, 1024),
        "resnet50": TapSpec("resnet50", "global average pooling output", 224, 2048),
        "densenet201": TapSpec("densenet201", "global average pooling output", 224, 1920),
        "mobilenet_v2": TapSpec("mobilenet_v2", "global average pooling output", 224, 1280),
        "efficientnet_b0": TapSpec("efficientnet_b0", "global average pooling output", 224, 1280),
        "vit": TapSpec("vit", "class-token output of ViT-B/32", 224, 768),
    }
    if key in table:
        return table[key]
    if key == "nasnet":
        if nasnet_variant == "mobile":
            return TapSpec("nasnet", "global average pooling output (NASNet-Mobile)", 224, 1056)
        if nasnet_variant == "large":
            return TapSpec("nasnet", "global average pooling output (NASNet-Large)", 331, 4032)
        raise ExtractorError(f"unknown nasnet variant {nasnet_variant!r}")
    raise ExtractorError(f"unknown backbone {key!r} (expected one of: {', '.join(BACKBONE_KEYS)})")


def _normalize(batch: np.ndarray) -> np.ndarray:
    """uint8 NHWC -> float32 NHWC, ImageNet channel statistics."""
    return (batch.astype(np.float32) / 255.0 - IMAGENET_MEAN) / IMAGENET_STD


class TorchExtractor:
    def __init__(self, key: str, spec: TapSpec, weights: str, seed: int):
        import torch
        import torchvision.models as models

        self._torch = torch
        pretrained = weights == "pretrained"
        torch.manual_seed(seed)
        try:
            if key == "alexnet":
                net = models.alexnet(weights=models.AlexNet_Weights.IMAGENET1K_V1 if pretrained else None)
                net.classifier = torch.nn.Sequential(net.classifier[0], net.classifier[1])
            elif key == "googlenet":
                if pretrained:
                    net = models.googlenet(weights=models.GoogLeNet_Weights.IMAGENET1K_V1)
                else:
                    import warnings

                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        net = models.googlenet(weights=None, aux_logits=False, init_weights=True)
                net.fc = torch.nn.Identity()
            elif key == "resnet50":
                net = models.resnet50(weights=models.ResNet50_Weights.IMAGENET1K_V1 if pretrained else None)
                net.fc = torch.nn.Identity()
            elif key == "densenet201":
                net = models.densenet201(weights=models.DenseNet201_Weights.IMAGENET1K_V1 if pretrained else None)
                net.classifier = torch.nn.Identity()
            elif key == "mobilenet_v2":
                net = models.mobilenet_v2(weights=models.MobileNet_V2_Weights.IMAGENET1K_V1 if pretrained else None)
                net.classifier = torch.nn.Identity()
            elif key == "efficientnet_b0":
                net = models.efficientnet_b0(weights=models.EfficientNet_B0_Weights.IMAGENET1K_V1 if pretrained else None)
                net.classifier = torch.nn.Identity()
            elif key == "vit":
                net = models.vit_b_32(weights=models.ViT_B_32_Weights.IMAGENET1K_V1 if pretrained else None)
                net.heads = torch.nn.Identity()
            else:
                raise ExtractorError(f"no torchvision builder for {key!r}")
        except ExtractorError:
            raise
        except Exception as exc:  # weight download/deserialization failures
            raise ExtractorError(f"cannot build {key} ({weights} weights): {exc}") from None
        self._net = net.eval()
        self._spec = spec

    def __call__(self, batch: np.ndarray) -> np.ndarray:
        torch = self._torch
        tensor = torch.from_numpy(_normalize(batch)).permute(0, 3, 1, 2).contiguous()
        with torch.no_grad():
            features = self._net(tensor)
        return features.numpy().astype(np.float32, copy=False)


class KerasNasnetExtractor:
    def __init__(self, spec: TapSpec, weights: str, seed: int):
        os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")
        os.environ.setdefault("TF_ENABLE_ONEDNN_OPTS", "0")
        try:
            import tensorflow as tf
            from tensorflow import keras
        except Exception as exc:
            raise ExtractorError(f"tensorflow unavailable for nasnet: {exc}") from None
        try:
            tf.config.experimental.enable_op_determinism()
        except Exception:
            pass  # already enabled or unsupported; determinism test will tell
        keras.utils.set_random_seed(seed)
        builder = keras.applications.NASNetMobile if spec.dim == 1056 else keras.applications.NASNetLarge
        try:
            self._net = builder(
                include_top=False,
                weights="imagenet" if weights == "pretrained" else None,
                pooling="avg",
                input_shape=(spec.input_size, spec.input_size, 3),
            )
        except Exception as exc:  # weight download failures included
            raise ExtractorError(f"cannot build nasnet ({weights} weights): {exc}") from None
        self._spec = spec

    def __call__(self, batch: np.ndarray) -> np.ndarray:
        features = self._net.predict(_normalize(batch), verbose=0)
        return np.asarray(features, dtype=np.float32)


def build_extractor(key: str, nasnet_variant: str = "mobile", weights: str = "pretrained",
                    seed: int = 0):
    """Returns (spec, callable batch NHWC uint8 -> (n, dim) float32)."""
    if weights not in ("pretrained", "random"):
        raise ExtractorError(f"weights must be 'pretrained' or 'random', got {weights!r}")
    spec = tap_spec(key, nasnet_variant)
    if key == "nasnet":
        return spec, KerasNasnetExtractor(spec, weights, seed)
    return spec, TorchExtractor(key, spec, weights, seed)
