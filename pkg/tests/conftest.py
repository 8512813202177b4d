import asyncio
import json

import httpx
import pytest


@pytest.fixture(scope="session")
def post():
    """Post a JSON payload to the in-process service, returning the response."""
    from obschain.service.app import app

    def _post(path: str, payload: dict) -> httpx.Response:
        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://testserver", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())

    return _post


@pytest.fixture()
def run_cli(tmp_path, capsys):
    """Invoke the CLI main() and return (exit_code, parsed stdout JSON or None)."""
    from obschain.cli import main

    def _run(argv):
        code = main(argv)
        out = capsys.readouterr().out
        doc = json.loads(out) if out.strip().startswith("{") else None
        return code, doc

    return _run
