"""Child-process execution of generated conversion modules.

Each execution writes the module into a fresh temporary directory, spawns the
conversion runner on it with the input document on stdin, and maps the runner
exit code onto a status.  Timeouts kill the whole process tree; the directory
is destroyed afterwards either way.
"""

from __future__ import annotations

import enum
import importlib.util
import os
import signal
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass

ENV_RUNNER = "INTEROP_RUNNER"

DEFAULT_WALL_TIMEOUT_MS = 30_000
DEFAULT_MAX_OUTPUT_BYTES = 10 * 1024 * 1024


class ExecStatus(enum.Enum):
    OK = "ok"
    COMPILE_ERROR = "compile_error"
    RUNTIME_ERROR = "runtime_error"
    MISSING_CONVERT = "missing_convert"
    TIMEOUT = "timeout"
    OUTPUT_OVERFLOW = "output_overflow"


# Runner exit codes; anything undeclared is treated as a runtime error.
EXIT_STATUS = {
    0: ExecStatus.OK,
    3: ExecStatus.COMPILE_ERROR,
    4: ExecStatus.RUNTIME_ERROR,
    5: ExecStatus.MISSING_CONVERT,
}


@dataclass(slots=True, frozen=True)
class SandboxLimits:
    wall_timeout_ms: int = DEFAULT_WALL_TIMEOUT_MS
    max_output_bytes: int = DEFAULT_MAX_OUTPUT_BYTES


@dataclass(slots=True)
class ExecutionResult:
    status: ExecStatus
    stdout: str
    stderr: str
    exit_code: int | None
    duration_ms: int

    @property
    def ok(self) -> bool:
        return self.status is ExecStatus.OK


def default_runner_cmd() -> list[str] | None:
    """Locate a conversion runner: $INTEROP_RUNNER script, else an installed one."""
    script = os.environ.get(ENV_RUNNER)
    if script:
        return [sys.executable, script]
    if importlib.util.find_spec("convrunner") is not None:
        return [sys.executable, "-m", "convrunner"]
    return None


def _kill_tree(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError, OSError):
        proc.kill()


def execute_module(
    source_code: str,
    input_text: str,
    limits: SandboxLimits | None = None,
    runner_cmd: list[str] | None = None,
) -> ExecutionResult:
    """Run one conversion module against one input under the given limits."""
    limits = limits or SandboxLimits()
    cmd = list(runner_cmd) if runner_cmd else default_runner_cmd()
    if not cmd:
        raise RuntimeError(
            f"no conversion runner available; set ${ENV_RUNNER} or install one"
        )
    start = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="convbox-") as workdir:
        module_path = os.path.join(workdir, "module.py")
        with open(module_path, "w", encoding="utf-8") as fh:
            fh.write(source_code)
        proc = subprocess.Popen(
            cmd + [module_path],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=workdir,
            start_new_session=True,  # lets the timeout path kill the whole group
        )
        try:
            stdout, stderr = proc.communicate(
                input_text.encode("utf-8"), timeout=limits.wall_timeout_ms / 1000.0
            )
        except subprocess.TimeoutExpired:
            _kill_tree(proc)
            try:
                proc.communicate(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()
            duration = int((time.perf_counter() - start) * 1000)
            return ExecutionResult(
                status=ExecStatus.TIMEOUT,
                stdout="",
                stderr=f"killed after {limits.wall_timeout_ms} ms",
                exit_code=None,
                duration_ms=duration,
            )
    duration = int((time.perf_counter() - start) * 1000)
    stderr_text = stderr.decode("utf-8", "replace")
    if len(stdout) > limits.max_output_bytes:
        return ExecutionResult(
            status=ExecStatus.OUTPUT_OVERFLOW,
            stdout="",
            stderr=stderr_text,
            exit_code=proc.returncode,
            duration_ms=duration,
        )
    status = EXIT_STATUS.get(proc.returncode, ExecStatus.RUNTIME_ERROR)
    return ExecutionResult(
        status=status,
        stdout=stdout.decode("utf-8", "replace"),
        stderr=stderr_text,
        exit_code=proc.returncode,
        duration_ms=duration,
    )


class Sandbox:
    """Bounded-concurrency wrapper around execute_module with a fixed runner."""

    def __init__(
        self,
        runner_cmd: list[str] | None = None,
        limits: SandboxLimits | None = None,
        max_concurrency: int | None = None,
    ):
        self.runner_cmd = list(runner_cmd) if runner_cmd else default_runner_cmd()
        if not self.runner_cmd:
            raise RuntimeError(
                f"no conversion runner available; set ${ENV_RUNNER} or install one"
            )
        self.limits = limits or SandboxLimits()
        self._gate = threading.Semaphore(max_concurrency or os.cpu_count() or 1)

    def execute(self, source_code: str, input_text: str) -> ExecutionResult:
        with self._gate:
            return execute_module(source_code, input_text, self.limits, self.runner_cmd)
