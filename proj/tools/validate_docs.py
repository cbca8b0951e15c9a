#!/usr/bin/env python3
"""Validate JSON documents against the schemas in docs/.

usage: validate_docs.py SCHEMA DOC [DOC...]
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource

DOCS = pathlib.Path(__file__).resolve().parent.parent / "docs"


def registry():
    resources = []
    for p in DOCS.glob("*.schema.json"):
        resources.append((p.name, Resource.from_contents(json.loads(p.read_text()))))
    return Registry().with_resources(resources)


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    schema = json.loads((DOCS / argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema, registry=registry())
    bad = 0
    for doc in argv[2:]:
        errors = list(validator.iter_errors(json.loads(pathlib.Path(doc).read_text())))
        for e in errors[:5]:
            print(f"{doc}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        bad += bool(errors)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
