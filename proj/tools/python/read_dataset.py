#!/usr/bin/env python3
"""Reads an exported dataset directory and prints a JSON summary.

Decodes every samples.bin record, checks it against meta.json and reports
counts; exits nonzero on any inconsistency.
"""
import json
import os
import struct
import sys


def read_samples(path):
    with open(path, "rb") as f:
        data = f.read()
    offset = 0
    while offset < len(data):
        (length,) = struct.unpack_from("<I", data, offset)
        n, m, k = struct.unpack_from("<HHH", data, offset + 4)
        if length != 6 + 4 * n * m * k + n * m:
            raise ValueError("record at byte %d has inconsistent length" % offset)
        body = offset + 10
        features = struct.unpack_from("<%df" % (n * m * k), data, body)
        labels = data[body + 4 * n * m * k: body + 4 * n * m * k + n * m]
        yield n, m, k, features, labels
        offset += 4 + length


def main(directory):
    with open(os.path.join(directory, "meta.json")) as f:
        meta = json.load(f)
    masked = meta["action_encoding"]["masked"]
    current = meta["channel_order"].index("current")
    count = agents_total = 0
    for n, m, k, features, labels in read_samples(os.path.join(directory, "samples.bin")):
        if k != meta["k"]:
            raise ValueError("channel count differs from meta.json")
        agents = sum(1 for i in range(n * m) if features[i * k + current] > 0)
        labelled = sum(1 for v in labels if v != masked)
        if agents != labelled:
            raise ValueError("sample %d labels %d cells for %d agents" % (count, labelled, agents))
        if any(v != masked and v > 4 for v in labels):
            raise ValueError("sample %d has an unknown action id" % count)
        agents_total += agents
        count += 1
    if count != meta["sample_count"]:
        raise ValueError("found %d samples, meta.json says %d" % (count, meta["sample_count"]))
    print(json.dumps({"samples": count, "labelled_cells": agents_total}))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
