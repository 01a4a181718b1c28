"""Run one conversion module against one input document, in a disposable process.

Invocation:

    python -m convrunner MODULE.py < input.txt > output.txt

The module is executed with ``__name__`` set to ``"conversion_module"`` (so
``if __name__ == "__main__":`` blocks stay dormant) and must define a callable
``convert(text: str)``.  The input document arrives as one string; the return
value is written to stdout byte-for-byte when it is a string, serialized with
``json.dumps`` otherwise, and dropped entirely when it is ``None``.  Anything
the module prints is diverted to stderr so the result channel stays pure.

Exit codes form the contract with the caller:

    0  conversion produced a result
    2  usage error (wrong arguments; never produced by a conversion itself)
    3  the module could not be loaded: unreadable file, syntax error, or an
       exception (including SystemExit) raised at module top level
    4  convert() raised, returned an unserializable value, or the input/output
       could not be decoded/encoded as UTF-8
    5  the module loaded but defines no callable ``convert``
"""

from __future__ import annotations

import json
import sys
import traceback
from contextlib import redirect_stdout

__all__ = ["run", "main", "MODULE_NAME", "EXIT_OK", "EXIT_USAGE",
           "EXIT_LOAD_FAILURE", "EXIT_CONVERT_FAILURE", "EXIT_NO_CONVERT"]

MODULE_NAME = "conversion_module"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LOAD_FAILURE = 3
EXIT_CONVERT_FAILURE = 4
EXIT_NO_CONVERT = 5


def run(module_path: str, input_text: str) -> tuple[bytes, int]:
    """Load the module, call convert(input_text), and return (payload, exit code).

    Diagnostics go to stderr; module print output is redirected there as well.
    The payload is only meaningful when the exit code is 0.
    """
    try:
        with open(module_path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as err:
        print(f"cannot read module: {err}", file=sys.stderr)
        return b"", EXIT_LOAD_FAILURE

    try:
        code = compile(source, module_path, "exec")
    except (SyntaxError, ValueError):
        traceback.print_exc()
        return b"", EXIT_LOAD_FAILURE

    namespace = {"__name__": MODULE_NAME, "__file__": module_path}
    try:
        with redirect_stdout(sys.stderr):
            exec(code, namespace)
    except BaseException:
        traceback.print_exc()
        return b"", EXIT_LOAD_FAILURE

    convert = namespace.get("convert")
    if not callable(convert):
        print("module defines no callable convert(text)", file=sys.stderr)
        return b"", EXIT_NO_CONVERT

    try:
        with redirect_stdout(sys.stderr):
            result = convert(input_text)
        if result is None:
            payload = b""
        elif isinstance(result, str):
            payload = result.encode("utf-8")
        else:
            payload = json.dumps(result).encode("utf-8")
    except BaseException:
        traceback.print_exc()
        return b"", EXIT_CONVERT_FAILURE

    return payload, EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m convrunner MODULE.py < input > output", file=sys.stderr)
        return EXIT_USAGE

    try:
        input_text = sys.stdin.buffer.read().decode("utf-8")
    except UnicodeDecodeError:
        traceback.print_exc()
        return EXIT_CONVERT_FAILURE

    payload, exit_code = run(argv[0], input_text)
    if exit_code == EXIT_OK:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    return exit_code
