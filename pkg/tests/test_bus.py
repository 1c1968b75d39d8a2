from roboplat.bridge.bus import MessageBus
from roboplat.runtime.loop import SimLoop


def test_fifo_delivery():
    loop = SimLoop()
    bus = MessageBus(loop)
    sub = bus.subscribe("cmd")
    for i in (1, 2, 3):
        bus.publish("cmd", i)
    assert [m.payload for m in sub.drain()] == [1, 2, 3]


def test_subscribe_sees_only_later_messages():
    loop = SimLoop()
    bus = MessageBus(loop)
    bus.publish("cmd", "m1")
    sub = bus.subscribe("cmd")
    bus.publish("cmd", "m2")
    bus.publish("cmd", "m3")
    assert [m.payload for m in sub.drain()] == ["m2", "m3"]


def test_stalled_subscriber_drops_oldest():
    loop = SimLoop()
    bus = MessageBus(loop)
    sub = bus.subscribe("adc", maxlen=1024)
    for i in range(2000):
        bus.publish("adc", i)
    assert len(sub) == 1024
    assert sub.dropped == 976
    kept = [m.payload for m in sub.drain()]
    assert kept == list(range(976, 2000))


def test_topics_are_isolated():
    loop = SimLoop()
    bus = MessageBus(loop)
    a = bus.subscribe("a")
    b = bus.subscribe("b")
    bus.publish("a", 1)
    bus.publish("b", 2)
    assert [m.payload for m in a.drain()] == [1]
    assert [m.payload for m in b.drain()] == [2]


def test_callback_delivery_in_order():
    loop = SimLoop()
    bus = MessageBus(loop)
    sub = bus.subscribe("t")
    seen = []
    sub.attach(loop, lambda m: seen.append(m.payload))
    for i in range(5):
        bus.publish("t", i)
    loop.run()
    assert seen == [0, 1, 2, 3, 4]


def test_timestamps_are_publish_time():
    loop = SimLoop()
    bus = MessageBus(loop)
    sub = bus.subscribe("t")
    loop.call_later(1.5, bus.publish, "t", "x")
    loop.run()
    msg = sub.poll()
    assert msg.timestamp == 1.5


def test_cancel_stops_delivery():
    loop = SimLoop()
    bus = MessageBus(loop)
    sub = bus.subscribe("t")
    sub.cancel()
    bus.publish("t", 1)
    assert sub.poll() is None
