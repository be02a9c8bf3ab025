"""Validate JSON documents against the shipped schemas.

usage: validate.py SCHEMA FILE...
"""
import json
import sys
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

HERE = Path(__file__).resolve().parent


def registry():
    resources = []
    for path in HERE.glob("*.schema.json"):
        resources.append((path.name, Resource.from_contents(json.loads(path.read_text()))))
    return Registry().with_resources(resources)


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    schema = json.loads((HERE / argv[1]).read_text())
    validator = Draft202012Validator(schema, registry=registry())
    bad = 0
    for name in argv[2:]:
        for err in validator.iter_errors(json.loads(Path(name).read_text())):
            bad += 1
            print(f"{name}: {'/'.join(map(str, err.absolute_path))}: {err.message}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
