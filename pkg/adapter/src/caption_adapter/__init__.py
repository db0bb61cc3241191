"""Reference bridge adapter: serves a neural captioning LM's next-token
distributions over the stegolm wire protocol."""

from .model import AdapterConfig, TinyCaptionLM, floored_top_entries
from .server import serve

__version__ = "0.1.0"

__all__ = ["AdapterConfig", "TinyCaptionLM", "floored_top_entries", "serve"]
