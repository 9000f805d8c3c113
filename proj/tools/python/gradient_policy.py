#!/usr/bin/env python3
"""Reference subprocess policy: follows the cost-to-goal gradient channels.

Run as `gridflow evaluate --policy "python3 tools/python/gradient_policy.py" ...`.
"""
import base64
import json
import struct
import sys

WAIT, UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3, 4


def send(message):
    sys.stdout.write(json.dumps(message) + "\n")
    sys.stdout.flush()


def main():
    height = width = k = 0
    channels = {}
    for line in sys.stdin:
        msg = json.loads(line)
        kind = msg["type"]
        if kind == "init":
            height, width, k = msg["height"], msg["width"], msg["k"]
            channels = {name: i for i, name in enumerate(msg["channel_order"])}
            send({"type": "ready", "features": True})
        elif kind == "obs":
            raw = base64.b64decode(msg["features"])
            values = struct.unpack("<%df" % (height * width * k), raw)

            def at(r, c, name):
                return values[(r * width + c) * k + channels[name]]

            actions = []
            for agent in msg["agents"]:
                r, c = agent["r"], agent["c"]
                dx, dy = at(r, c, "grad_x"), at(r, c, "grad_y")
                if dx > 0:
                    actions.append(RIGHT)
                elif dx < 0:
                    actions.append(LEFT)
                elif dy > 0:
                    actions.append(DOWN)
                elif dy < 0:
                    actions.append(UP)
                else:
                    actions.append(WAIT)
            send({"type": "act", "t": msg["t"], "actions": actions})
        elif kind == "end":
            return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
