"""aiohttp front end for a TeleopSession.

Endpoints:
    GET /health   liveness probe
    GET /config   effective robot/gait/link parameters as JSON
    GET /ws       duplex socket: TeleopCommand JSON in, StateUpdate JSON out

One background task owns the session and steps it at the 200 Hz virtual
rate (wall-clock paced, or flat out with fast=True). Clients never touch
the session directly: commands go through command_ingest, and state
snapshots are fanned out through per-client bounded queues, so a slow
client drops frames (counted in the session's link stats) instead of
stalling the world.
"""

from __future__ import annotations

import asyncio
import json

from aiohttp import WSMsgType, web

from .config import config_as_dict
from .errors import SchemaError
from .link import ChannelModel
from .simulator import COMMAND_RATE_HZ
from .teleop import SCHEMA_VERSION, TeleopSession, command_ingest

CLIENT_QUEUE_DEPTH = 4

SESSION_KEY = web.AppKey("session", TeleopSession)
FAST_KEY = web.AppKey("fast", bool)
CLIENTS_KEY = web.AppKey("clients", set)
LOOP_TASK_KEY = web.AppKey("loop_task", asyncio.Task)


def broadcast(session: TeleopSession, clients, payload: str) -> None:
    """Fan a snapshot out to every client queue; a full queue means the
    client is slow, so the frame is dropped and counted, never awaited."""
    for queue in clients:
        try:
            queue.put_nowait(payload)
        except asyncio.QueueFull:
            session.state_dropped += 1


async def _session_loop(app: web.Application) -> None:
    session = app[SESSION_KEY]
    fast = app[FAST_KEY]
    tick_interval = 1.0 / COMMAND_RATE_HZ
    loop = asyncio.get_running_loop()
    next_deadline = loop.time()
    try:
        while True:
            update = session.tick()
            if update is not None:
                broadcast(session, app[CLIENTS_KEY], update.to_json())
            if fast:
                if session.tick_index % 200 == 0:
                    await asyncio.sleep(0)  # let clients breathe
                continue
            next_deadline += tick_interval
            delay = next_deadline - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                next_deadline = loop.time()  # fell behind; don't burst
                await asyncio.sleep(0)
    except asyncio.CancelledError:
        pass


async def _on_startup(app: web.Application) -> None:
    app[LOOP_TASK_KEY] = asyncio.get_running_loop().create_task(_session_loop(app))


async def _on_cleanup(app: web.Application) -> None:
    app[LOOP_TASK_KEY].cancel()
    try:
        await app[LOOP_TASK_KEY]
    except asyncio.CancelledError:
        pass


async def handle_health(request: web.Request) -> web.Response:
    return web.json_response({"v": SCHEMA_VERSION, "status": "ok"})


async def handle_config(request: web.Request) -> web.Response:
    session = request.app[SESSION_KEY]
    model: ChannelModel = session.cmd_channel.model
    payload = {
        "v": SCHEMA_VERSION,
        "params": config_as_dict(session.cfg, session.base_gait),
        "channel": {
            "drop_prob": model.drop_prob,
            "latency_ticks": model.latency_ticks,
            "jitter_ticks": model.jitter_ticks,
            "seed": model.seed,
        },
        "rate_hz": COMMAND_RATE_HZ,
        "state_rate_hz": session.state_rate_hz,
    }
    return web.json_response(payload)


async def handle_ws(request: web.Request) -> web.WebSocketResponse:
    ws = web.WebSocketResponse(heartbeat=30)
    await ws.prepare(request)
    session = request.app[SESSION_KEY]
    queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_DEPTH)
    request.app[CLIENTS_KEY].add(queue)

    async def pump() -> None:
        while True:
            payload = await queue.get()
            await ws.send_str(payload)

    sender = asyncio.get_running_loop().create_task(pump())
    try:
        async for msg in ws:
            if msg.type is not WSMsgType.TEXT:
                continue
            try:
                session.submit_command(command_ingest(msg.data))
            except SchemaError as exc:
                await ws.send_str(json.dumps({
                    "v": SCHEMA_VERSION,
                    "error": {"field": exc.field, "message": exc.reason},
                }))
    finally:
        sender.cancel()
        request.app[CLIENTS_KEY].discard(queue)
    return ws


def build_app(
    session: TeleopSession, fast: bool = False, static_dir: str | None = None
) -> web.Application:
    app = web.Application()
    app[SESSION_KEY] = session
    app[FAST_KEY] = fast
    app[CLIENTS_KEY] = set()
    app.router.add_get("/health", handle_health)
    app.router.add_get("/config", handle_config)
    app.router.add_get("/ws", handle_ws)
    if static_dir:
        app.router.add_static("/", static_dir, show_index=True)
    app.on_startup.append(_on_startup)
    app.on_cleanup.append(_on_cleanup)
    return app


def serve(session: TeleopSession, host: str, port: int, fast: bool = False,
          static_dir: str | None = None) -> None:
    web.run_app(build_app(session, fast, static_dir), host=host, port=port)
