import asyncio
import json

from aiohttp.test_utils import TestClient, TestServer

from microquad import GaitParams, RobotConfig, TeleopSession
from microquad.link import ChannelModel
from microquad.server import build_app

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from pathlib import Path

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def load_schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


def run(coro):
    return asyncio.run(coro)


async def with_client(handler):
    session = TeleopSession(RobotConfig(), GaitParams(stride_len=0.02),
                            ChannelModel(seed=3))
    app = build_app(session, fast=True)
    client = TestClient(TestServer(app))
    await client.start_server()
    try:
        return await handler(client)
    finally:
        await client.close()


def test_health():
    async def check(client):
        resp = await client.get("/health")
        assert resp.status == 200
        body = await resp.json()
        assert body == {"v": 1, "status": "ok"}

    run(with_client(check))


def test_config_reports_effective_parameters():
    async def check(client):
        resp = await client.get("/config")
        assert resp.status == 200
        body = await resp.json()
        assert body["v"] == 1
        assert body["rate_hz"] == 200
        assert body["params"]["robot.mass"] == 0.22
        assert body["params"]["gait.stride_len"] == 0.02
        assert body["channel"]["seed"] == 3

    run(with_client(check))


def test_ws_streams_schema_valid_state():
    async def check(client):
        ws = await client.ws_connect("/ws")
        await ws.send_str(json.dumps(
            {"v": 1, "forward": 1.0, "gait": "trot", "mode": "walk"}))
        updates = []
        for _ in range(5):
            msg = await asyncio.wait_for(ws.receive_str(), timeout=10)
            updates.append(json.loads(msg))
        await ws.close()
        schema = load_schema("state_update.schema.json")
        for update in updates:
            if jsonschema is not None:
                jsonschema.validate(update, schema)
            assert update["v"] == 1
        assert updates[-1]["t"] > updates[0]["t"]

    run(with_client(check))


def test_slow_clients_drop_frames_without_blocking():
    async def check(_client=None):
        session = TeleopSession(RobotConfig(), GaitParams())
        from microquad.server import broadcast

        full = asyncio.Queue(maxsize=1)
        full.put_nowait("old")
        empty = asyncio.Queue(maxsize=2)
        broadcast(session, {full, empty}, "fresh")
        assert session.state_dropped == 1
        assert empty.get_nowait() == "fresh"
        assert full.get_nowait() == "old"

    run(check())


def test_ws_rejects_malformed_and_survives():
    async def check(client):
        ws = await client.ws_connect("/ws")
        await ws.send_str('{"forward": 5}')
        error = None
        for _ in range(20):
            payload = json.loads(await asyncio.wait_for(ws.receive_str(),
                                                        timeout=10))
            if "error" in payload:
                error = payload
                break
        assert error is not None
        assert error["error"]["field"] == "forward"
        if jsonschema is not None:
            jsonschema.validate(error, load_schema("error.schema.json"))
        # session keeps serving valid traffic afterwards
        await ws.send_str('{"forward": 0.5, "mode": "walk"}')
        payload = json.loads(await asyncio.wait_for(ws.receive_str(), timeout=10))
        assert "error" not in payload
        await ws.close()

    run(with_client(check))
