"""Reference external scorer: a fine-tunable transformer encoder behind
the titlescope wire protocol."""

from .config import AdapterConfig
from .model import TitleClassifier, load_checkpoint
from .server import create_app

__version__ = "0.1.0"
