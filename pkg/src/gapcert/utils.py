import json
import typing as T
from importlib import resources
from pathlib import Path

import jsonschema

from .exceptions import ParamsError, SchemaValidationError


def load_schema(name: str) -> T.Dict:
    """Load one of the JSON schemas shipped in ``gapcert/schemas``.

    :param name: the schema name, e.g. ``"h_eval"`` for
        ``h_eval.schema.json``
    :type name: str

    :return: the parsed schema
    :rtype: Dict
    """
    schema_file = resources.files(__package__) / "schemas" / f"{name}.schema.json"
    return json.loads(schema_file.read_text(encoding="utf-8"))


def validate_document(document: T.Dict, schema_name: str):
    """Check that a document matches one of the shipped schemas.

    :param document: the JSON-compatible document
    :type document: Dict
    :param schema_name: the schema to validate against
    :type schema_name: str

    :raises SchemaValidationError:
        if the document does not validate.
    """
    try:
        jsonschema.validate(document, load_schema(schema_name))
    except jsonschema.ValidationError as err:
        location = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaValidationError(
            f"Invalid {schema_name} document at {location}: {err.message}"
        )


def dump_json(
    document: T.Dict,
    path: T.Optional[Path] = None,
    schema_name: T.Optional[str] = None,
) -> str:
    """Serialize a document deterministically and optionally write it.

    Keys are sorted and floats keep Python's shortest round-trip
    representation, so equal inputs give byte-identical files.
    """
    if schema_name is not None:
        validate_document(document, schema_name)
    text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(value, ".17g")


def parse_coefficients(text: str) -> T.List[float]:
    """Parse a comma-separated coefficient list such as ``"-3,97,-1730"``.

    :raises ParamsError:
        if an entry is not a finite number.
    """
    coefficients = []
    for entry in text.split(","):
        entry = entry.strip()
        try:
            value = float(entry)
        except ValueError:
            raise ParamsError(f"Invalid polynomial coefficient {entry!r} in {text!r}")
        if value != value or value in (float("inf"), float("-inf")):
            raise ParamsError(f"Coefficient {entry!r} is not finite")
        coefficients.append(value)
    return coefficients
