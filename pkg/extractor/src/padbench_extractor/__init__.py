"""Fingerphoto ROI cropping and pretrained-backbone feature extraction."""

__version__ = "0.1.0"


class ExtractorError(Exception):
    """Bad input, unreadable image, or a backbone that cannot be built."""
