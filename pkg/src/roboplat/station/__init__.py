from .core import Station, StationEvent
from .gateway import UiSession, command_from_json
from .script import load_script

__all__ = ["Station", "StationEvent", "UiSession", "command_from_json", "load_script"]
