"""Deterministic CSV/JSON artifact writing.

Every file this package writes embeds the run's seed, a short hash of the
resolved configuration, and the package version: JSON files in a "meta"
object, CSV files as a single leading '#' comment line (which read_csv
skips). Floats go out as their repr, the shortest decimal that round-trips
to the identical float64, so reruns produce byte-identical artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math

from . import __version__


def config_hash(config):
    """Short stable hash of a JSON-serializable configuration mapping."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def make_meta(seed, config):
    return {
        "seed": int(seed),
        "config_hash": config_hash(config),
        "version": __version__,
    }


def meta_comment(meta):
    return (
        f"# seed={meta['seed']} config_hash={meta['config_hash']} "
        f"version={meta['version']}"
    )


def format_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def write_csv(path, fieldnames, rows, meta=None):
    """Write dict rows to CSV with an optional leading metadata comment."""
    with open(path, "w", newline="\n") as fh:
        if meta is not None:
            fh.write(meta_comment(meta) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([format_cell(row.get(name)) for name in fieldnames])


def write_json(path, obj, meta=None):
    """Write a JSON artifact, deterministically ordered."""
    payload = dict(obj)
    if meta is not None:
        payload["meta"] = meta
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
