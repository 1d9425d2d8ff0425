"""Small convolutional binary classifier for the separability probe.

The forgery evidence in a blended sample is local (a boundary seam, a
patch of shifted color), so the head scores patches with a 1x1
convolution and pools patch logits with log-sum-exp: an image looks fake
if any region does. The network stays well under one million parameters
so the acceptance run finishes on a laptop CPU.
"""
from __future__ import annotations

import torch
from torch import nn

_WIDTHS = {
    "tiny": (8, 16, 32),
    "small": (16, 32, 64),
    "medium": (24, 48, 96),
}


class ProbeNet(nn.Module):
    """Three stride-2 conv stages, patch logits, log-sum-exp pooling."""

    def __init__(self, model_size: str = "small"):
        super().__init__()
        if model_size not in _WIDTHS:
            raise ValueError(f"unknown model_size {model_size!r}; "
                             f"choose from {sorted(_WIDTHS)}")
        widths = _WIDTHS[model_size]
        layers: list[nn.Module] = []
        in_ch = 3
        for out_ch in widths:
            # momentum=0.2 so eval-mode running stats catch up within the
            # few dozen optimizer steps one epoch provides
            layers += [
                nn.Conv2d(in_ch, out_ch, kernel_size=3, stride=2, padding=1),
                nn.BatchNorm2d(out_ch, momentum=0.2),
                nn.ReLU(inplace=True),
                nn.Conv2d(out_ch, out_ch, kernel_size=3, stride=1, padding=1),
                nn.BatchNorm2d(out_ch, momentum=0.2),
                nn.ReLU(inplace=True),
            ]
            in_ch = out_ch
        self.features = nn.Sequential(*layers)
        self.patch_head = nn.Conv2d(in_ch, 1, kernel_size=1)

    def patch_logits(self, x: torch.Tensor) -> torch.Tensor:
        return self.patch_head(self.features(x)).squeeze(1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """One logit per image in a (N, 3, H, W) batch; sigmoid = P(fake)."""
        patches = self.patch_logits(x).flatten(1)
        # mean keeps early gradients strong; the count-shifted logsumexp is
        # a smooth "any patch looks fake" maximum that carries the final
        # decision once patch evidence localizes
        smooth_max = torch.logsumexp(patches, dim=1) - torch.log(
            torch.tensor(float(patches.shape[1]), device=x.device)
        )
        return 0.5 * (patches.mean(dim=1) + smooth_max)

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
