from .loop import EventLoop, LiveLoop, SimLoop, TimerHandle

__all__ = ["EventLoop", "LiveLoop", "SimLoop", "TimerHandle"]
