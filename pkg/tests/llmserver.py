"""A tiny scripted chat-completions server for exercising the live adapter."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class ScriptedLlmServer:
    """Serves canned replies over the chat-completions wire format.

    `script` maps a routing key (a substring searched for across the user
    messages of the conversation) to a list of replies handed out in order.
    A `default` list is used when no key matches. Repeated requests past the
    end of a list get its final entry.
    """

    def __init__(self, script: dict[str, list[str]] | None = None,
                 default: list[str] | None = None,
                 status_plan: list[int] | None = None):
        self.script = {k: list(v) for k, v in (script or {}).items()}
        self.default = list(default or [])
        self.status_plan = list(status_plan or [])
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length))
                with outer._lock:
                    outer.requests.append(body)
                    if outer.status_plan:
                        status = outer.status_plan.pop(0)
                        if status != 200:
                            self.send_response(status)
                            self.end_headers()
                            return
                    user_text = "\n".join(
                        m["content"] for m in body["messages"] if m["role"] == "user"
                    )
                    reply = None
                    for key, replies in outer.script.items():
                        if key in user_text:
                            reply = replies.pop(0) if len(replies) > 1 else replies[0]
                            break
                    if reply is None and outer.default:
                        reply = (outer.default.pop(0) if len(outer.default) > 1
                                 else outer.default[0])
                if reply is None:
                    self.send_response(500)
                    self.end_headers()
                    return
                payload = json.dumps(
                    {"choices": [{"message": {"role": "assistant", "content": reply}}]}
                ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/v1/chat/completions"

    def __enter__(self) -> "ScriptedLlmServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
