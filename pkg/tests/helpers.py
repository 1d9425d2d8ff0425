from __future__ import annotations

from sbi_forge.core import Landmarks
from sbi_forge.synth import generate_face, synth_stream


def face_fixture(index: int = 0, size: int = 96):
    """One deterministic synthetic face: (image, Landmarks, bbox)."""
    img, lms, bbox = generate_face(synth_stream(11, index), size, size)
    return img, Landmarks(lms), bbox
