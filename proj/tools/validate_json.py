#!/usr/bin/env python3
"""Validate dynsem JSON documents against schemas/dynsem.schema.json."""

import argparse
import json
import sys
from pathlib import Path

import jsonschema

DEFAULT_SCHEMA = Path(__file__).resolve().parent.parent / "schemas" / "dynsem.schema.json"


def validator(schema_path=DEFAULT_SCHEMA, definition=None):
    schema = json.loads(Path(schema_path).read_text())
    if definition is not None:
        if definition not in schema["$defs"]:
            raise KeyError(f"no definition named {definition!r}")
        schema = {"$schema": schema["$schema"], "$defs": schema["$defs"], "$ref": f"#/$defs/{definition}"}
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("files", nargs="*", default=["-"], help="JSON files; '-' reads standard input")
    parser.add_argument("--schema", default=DEFAULT_SCHEMA)
    parser.add_argument("--def", dest="definition", help="validate against one definition, e.g. model")
    args = parser.parse_args()

    v = validator(args.schema, args.definition)
    failed = False
    for name in args.files:
        text = sys.stdin.read() if name == "-" else Path(name).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            print(f"{name}: not JSON: {e}", file=sys.stderr)
            failed = True
            continue
        errors = sorted(v.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            where = "/".join(str(p) for p in e.path) or "<root>"
            print(f"{name}: {where}: {e.message}", file=sys.stderr)
        failed = failed or bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
