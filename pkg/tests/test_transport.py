import pytest

from roboplat.runtime.loop import LiveLoop, SimLoop
from roboplat.transport.base import ConnectRefused, Endpoint
from roboplat.transport.pipe import PipeNetwork, pipe_pair
from roboplat.transport.shaping import ShapingParams, shape
from roboplat.transport.tcp import connect_tcp, listen_tcp


class TestEndpoint:
    def test_parse_tcp(self):
        ep = Endpoint.parse("10.0.0.1:7070")
        assert (ep.kind, ep.host, ep.port) == ("tcp", "10.0.0.1", 7070)

    def test_parse_pipe(self):
        ep = Endpoint.parse("pipe:devlink")
        assert (ep.kind, ep.label) == ("pipe", "devlink")

    def test_port_range(self):
        with pytest.raises(ValueError):
            Endpoint(kind="tcp", host="x", port=0)


class TestPipe:
    def test_echo(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        got = []
        b.on_receive = lambda data: b.send(data.upper())
        a.on_receive = got.append
        a.send(b"hello")
        loop.run()
        assert got == [b"HELLO"]

    def test_order_preserved(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        got = []
        b.on_receive = got.append
        for i in range(10):
            a.send(bytes([i]))
        loop.run()
        assert b"".join(got) == bytes(range(10))

    def test_close_propagates(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        events = []
        b.on_close = lambda: events.append("closed")
        a.close()
        loop.run()
        assert events == ["closed"]

    def test_network_connect(self):
        loop = SimLoop()
        net = PipeNetwork(loop)
        accepted = []
        net.listen(Endpoint(kind="pipe", label="srv"), accepted.append)
        channel = net.connect(Endpoint(kind="pipe", label="srv"))
        got = []
        channel.on_receive = got.append
        channel.send(b"ping")
        loop.run()
        assert len(accepted) == 1
        accepted[0].send(b"pong")
        loop.run()
        assert got == [b"pong"]

    def test_network_single_client(self):
        loop = SimLoop()
        net = PipeNetwork(loop)
        ep = Endpoint(kind="pipe", label="srv")
        net.listen(ep, lambda ch: None, single_client=True)
        first = net.connect(ep)
        with pytest.raises(ConnectRefused):
            net.connect(ep)
        first.close()
        loop.run()
        net.connect(ep)  # accepted after the first disconnects

    def test_unbound_refused(self):
        loop = SimLoop()
        net = PipeNetwork(loop)
        with pytest.raises(ConnectRefused):
            net.connect(Endpoint(kind="pipe", label="nope"))


class TestShaping:
    def test_delay_only_echo_rtt(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        shaped = shape(a, ShapingParams(one_way_delay=0.005))
        b.on_receive = b.send  # echo
        times = []
        shaped.on_receive = lambda data: times.append(loop.now())
        shaped.send(bytes(64))
        loop.run()
        assert times and abs(times[0] - 0.010) < 1e-9

    def test_bandwidth_serialization(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        shaped = shape(a, ShapingParams(bandwidth_bps=1000.0))
        arrivals = []
        b.on_receive = lambda data: arrivals.append((loop.now(), len(data)))
        shaped.send(bytes(1000))
        loop.run()
        assert arrivals and abs(arrivals[0][0] - 1.0) < 1e-9

    def test_added_rtt_formula(self):
        # RTT = 2*delay + size/bandwidth (one serialization per echo).
        loop = SimLoop()
        a, b = pipe_pair(loop)
        params = ShapingParams(one_way_delay=0.003, bandwidth_bps=8192.0)
        shaped = shape(a, params)
        b.on_receive = b.send
        done = []
        shaped.on_receive = lambda data: done.append(loop.now())
        shaped.send(bytes(512))
        loop.run()
        expected = 2 * 0.003 + 512 / 8192.0
        assert done and abs(done[0] - expected) / expected < 0.05

    def test_back_to_back_sends_queue(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        shaped = shape(a, ShapingParams(bandwidth_bps=1000.0))
        arrivals = []
        b.on_receive = lambda data: arrivals.append(loop.now())
        shaped.send(bytes(500))
        shaped.send(bytes(500))
        loop.run()
        assert len(arrivals) == 2
        assert abs(arrivals[0] - 0.5) < 1e-9
        assert abs(arrivals[1] - 1.0) < 1e-9

    def test_content_and_order_preserved_with_jitter(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        shaped = shape(a, ShapingParams(one_way_delay=0.002, jitter_std=0.002, seed=42))
        got = []
        b.on_receive = got.append
        payloads = [bytes([i]) * 8 for i in range(32)]
        for p in payloads:
            shaped.send(p)
        loop.run()
        assert b"".join(got) == b"".join(payloads)

    def test_deterministic_with_zero_jitter(self):
        def run_once():
            loop = SimLoop()
            a, b = pipe_pair(loop)
            shaped = shape(a, ShapingParams(one_way_delay=0.004, bandwidth_bps=2048.0))
            b.on_receive = b.send
            times = []

            def pump(data):
                times.append(loop.now())
                if len(times) < 20:
                    shaped.send(bytes(100))

            shaped.on_receive = pump
            shaped.send(bytes(100))
            loop.run()
            return times

        assert run_once() == run_once()

    def test_overhead_exempt_bytes(self):
        loop = SimLoop()
        a, b = pipe_pair(loop)
        shaped = shape(a, ShapingParams(bandwidth_bps=1000.0, overhead_free_bytes=10))
        arrivals = []
        b.on_receive = lambda data: arrivals.append(loop.now())
        shaped.send(bytes(510))
        loop.run()
        assert arrivals and abs(arrivals[0] - 0.5) < 1e-9


class TestTcp:
    def test_echo_roundtrip(self):
        loop = LiveLoop()

        def on_channel(channel):
            channel.on_receive = lambda data: channel.send(data[::-1])

        listener = listen_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=_free_port()),
                              on_channel)
        client = connect_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=listener.port))
        got = []

        def finish(data):
            got.append(data)
            loop.stop()

        client.on_receive = finish
        client.send(b"abcdef")
        loop.run(deadline=loop.now() + 5.0)
        assert b"".join(got) == b"fedcba"
        listener.close()
        client.close()
        loop.close()

    def test_single_client_busy_refusal_and_reaccept(self):
        loop = LiveLoop()
        accepted = []

        def on_channel(channel):
            accepted.append(channel)

        listener = listen_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=_free_port()),
                              on_channel, single_client=True)
        ep = Endpoint(kind="tcp", host="127.0.0.1", port=listener.port)

        first = connect_tcp(loop, ep)
        second = connect_tcp(loop, ep)
        closed = []
        second.on_close = lambda: closed.append("second")
        loop.run(deadline=loop.now() + 0.5)
        assert len(accepted) == 1
        assert closed == ["second"]  # busy refusal closes the extra client
        assert listener.refused == 1

        first.close()
        loop.run(deadline=loop.now() + 0.2)
        third = connect_tcp(loop, ep)
        loop.run(deadline=loop.now() + 0.5)
        assert len(accepted) == 2  # accepted after the first disconnected
        third.close()
        listener.close()
        loop.close()

    def test_connect_refused(self):
        loop = LiveLoop()
        with pytest.raises(ConnectRefused):
            connect_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=_free_port()),
                        timeout=1.0)
        loop.close()

    def test_sequenced_soak(self):
        # Reliable in-order delivery of numbered chunks.
        loop = LiveLoop()
        received = bytearray()

        def on_channel(channel):
            channel.on_receive = received.extend

        listener = listen_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=_free_port()),
                              on_channel)
        client = connect_tcp(loop, Endpoint(kind="tcp", host="127.0.0.1", port=listener.port))
        blob = bytes(i % 256 for i in range(200_000))
        for i in range(0, len(blob), 8192):
            client.send(blob[i:i + 8192])
        deadline = loop.now() + 10.0
        while len(received) < len(blob) and loop.now() < deadline:
            loop.run(deadline=loop.now() + 0.05)
        assert bytes(received) == blob
        client.close()
        listener.close()
        loop.close()


def _free_port() -> int:
    import socket

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]
