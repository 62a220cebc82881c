"""Twisting-echo interferometry simulator."""

import json

from ._core import *  # noqa: F401,F403
from ._core import run_config_json


def run_config(config, threads=0):
    """Run a configuration (dict or JSON string); returns a list of row dicts."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(run_config_json(text, threads))
