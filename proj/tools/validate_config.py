#!/usr/bin/env python3
# Apache License, Version 2.0, refer to LICENSE.txt
"""Validate run configs against the JSON schema."""

import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print("usage: validate_config.py SCHEMA CONFIG...", file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    status = 0
    for path in argv[2:]:
        with open(path) as f:
            errors = list(validator.iter_errors(json.load(f)))
        for e in errors:
            print(f"{path}: {e.json_path}: {e.message}", file=sys.stderr)
        print(f"{'ok' if not errors else 'invalid'} {path}")
        status = status or (1 if errors else 0)
    return status


if __name__ == "__main__":
    sys.exit(main(sys.argv))
