"""Best-effort push of a finished report to a generic webhook."""

from __future__ import annotations

import logging
import os
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

PAYLOAD_NAME = "sync-payload.json"


@dataclass(frozen=True)
class SyncResult:
    ok: bool
    status: int | None = None
    message: str = ""
    payload_path: Path | None = None


def sync(
    report_path: Path | str,
    endpoint: str | None,
    token_env: str | None = None,
    dry_run: bool = False,
    timeout: float = 10.0,
) -> SyncResult:
    """POST the report JSON to ``endpoint`` with a bearer token read from ``token_env``.

    With ``dry_run`` the payload is written next to the report instead and
    no request is made. Never raises for network or HTTP failures.
    """
    report_path = Path(report_path)
    payload = report_path.read_bytes()
    if dry_run:
        target = report_path.with_name(PAYLOAD_NAME)
        target.write_bytes(payload)
        log.info("dry run: payload written to %s", target)
        return SyncResult(True, None, "dry run", target)
    if not endpoint:
        return SyncResult(False, None, "no sync endpoint configured")

    headers = {"Content-Type": "application/json"}
    if token_env:
        token = os.environ.get(token_env)
        if not token:
            return SyncResult(False, None, f"environment variable {token_env} is not set")
        headers["Authorization"] = f"Bearer {token}"
    request = urllib.request.Request(endpoint, data=payload, headers=headers, method="POST")
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            status = response.status
    except urllib.error.HTTPError as exc:
        log.warning("sync to %s failed with HTTP %s", endpoint, exc.code)
        return SyncResult(False, exc.code, f"HTTP {exc.code} {exc.reason}")
    except (urllib.error.URLError, OSError) as exc:
        log.warning("sync to %s failed: %s", endpoint, exc)
        return SyncResult(False, None, str(exc))
    return SyncResult(200 <= status < 300, status, f"HTTP {status}")
