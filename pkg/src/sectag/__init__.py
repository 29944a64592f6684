"""Speaker-tag correction for diarized speech transcripts."""

__version__ = "0.1.0"
