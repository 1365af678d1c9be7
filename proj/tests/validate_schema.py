"""Validate JSON documents against the in-repo schemas.

usage: validate_schema.py SCHEMA_DIR SCHEMA_NAME FILE [FILE ...]
"""

import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    registry = Registry()
    schemas = {}
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        resource = Resource.from_contents(doc)
        registry = registry.with_resource(doc["$id"], resource)
        schemas[path.name] = doc
    target = schemas[argv[2]]
    jsonschema.Draft202012Validator.check_schema(target)
    validator = jsonschema.Draft202012Validator(target, registry=registry)
    failed = 0
    for name in argv[3:]:
        errors = sorted(validator.iter_errors(json.loads(pathlib.Path(name).read_text())), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: /{'/'.join(map(str, e.path))}: {e.message}")
        failed += bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
