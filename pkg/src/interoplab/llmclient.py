"""Completion backends: HTTP (Ollama-style), scripted, oracle, and noisy.

Every call is self-contained: one prompt in, one completion out, no session
or conversation state anywhere.  Backends count their calls so experiments
can assert call-economy laws.
"""

from __future__ import annotations

import enum
import hashlib
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .core import ClassifiedError, FailureCause, Strategy
from .datasetgen import DatasetManifest
from .geoconv import reference_convert

ENV_BACKEND_URL = "INTEROP_BACKEND_URL"
DEFAULT_TIMEOUT_MS = 120_000


class StopReason(enum.Enum):
    DONE = "done"
    LENGTH = "length"


@dataclass(slots=True)
class CompletionResult:
    text: str
    stop_reason: StopReason
    latency_ms: int = 0


class BackendError(ClassifiedError):
    """Transport-level or protocol-level completion failure."""

    cause = FailureCause.LLM_RUNTIME


class BackendTimeout(BackendError):
    cause = FailureCause.HTTP_TIMEOUT


class LlmLengthStopError(ClassifiedError):
    """Completion stopped abnormally because the token budget ran out."""

    cause = FailureCause.LLM_LENGTH_STOP


@dataclass(slots=True)
class BackendConfig:
    """Declarative backend description; build_backend turns it into an instance."""

    kind: str = "http"  # http | scripted | oracle | noisy
    model_tag: str = ""
    base_url: str | None = None  # http; falls back to $INTEROP_BACKEND_URL
    temperature: float = 0.9
    request_timeout_ms: int = DEFAULT_TIMEOUT_MS
    response_dir: str | Path | None = None  # scripted
    seed: int = 0  # noisy
    error_rate: float = 0.0  # noisy
    failure_mix: dict[str, float] | None = None  # noisy; None means uniform


class Backend:
    """Base class: counts calls and stamps latency; subclasses fill _complete."""

    def __init__(self, model_tag: str):
        self.model_tag = model_tag
        self.calls = 0
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> CompletionResult:
        with self._lock:
            self.calls += 1
        start = time.perf_counter()
        result = self._complete(prompt)
        result.latency_ms = int((time.perf_counter() - start) * 1000)
        return result

    def _complete(self, prompt: str) -> CompletionResult:
        raise NotImplementedError


class HttpBackend(Backend):
    """Client for an Ollama-style /api/generate endpoint.

    The request body carries only the model tag, the full prompt, stream=false,
    and the sampling temperature; no context is shared between calls.
    """

    def __init__(self, cfg: BackendConfig):
        super().__init__(cfg.model_tag)
        base_url = cfg.base_url or os.environ.get(ENV_BACKEND_URL)
        if not base_url:
            raise ValueError(
                f"http backend needs a base URL (flag/config or ${ENV_BACKEND_URL})"
            )
        self.url = base_url.rstrip("/") + "/api/generate"
        self.temperature = cfg.temperature
        self.timeout_s = cfg.request_timeout_ms / 1000.0

    def _complete(self, prompt: str) -> CompletionResult:
        payload = {
            "model": self.model_tag,
            "prompt": prompt,
            "stream": False,
            "options": {"temperature": self.temperature},
        }
        try:
            response = requests.post(self.url, json=payload, timeout=self.timeout_s)
        except requests.Timeout as err:
            raise BackendTimeout(f"request timed out after {self.timeout_s:g}s") from err
        except requests.RequestException as err:
            raise BackendError(f"transport failure: {err}") from err
        if response.status_code != 200:
            raise BackendError(f"backend returned HTTP {response.status_code}")
        try:
            body = response.json()
        except ValueError as err:
            raise BackendError(f"non-JSON backend response: {err}") from err
        stop = StopReason.LENGTH if body.get("done_reason") == "length" else StopReason.DONE
        return CompletionResult(text=str(body.get("response", "")), stop_reason=stop)


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedBackend(Backend):
    """Replays canned responses keyed by the SHA-256 of the prompt.

    Responses come from an in-memory mapping (keyed by hash or raw prompt)
    and/or a directory of <sha256>.txt files.
    """

    def __init__(
        self,
        responses: dict[str, str] | None = None,
        response_dir: str | Path | None = None,
        model_tag: str = "scripted",
    ):
        super().__init__(model_tag)
        self.responses = dict(responses or {})
        self.response_dir = Path(response_dir) if response_dir else None

    def _complete(self, prompt: str) -> CompletionResult:
        key = prompt_key(prompt)
        text = self.responses.get(key)
        if text is None:
            text = self.responses.get(prompt)
        if text is None and self.response_dir is not None:
            path = self.response_dir / f"{key}.txt"
            if path.is_file():
                text = path.read_text(encoding="utf-8")
        if text is None:
            raise BackendError(f"no scripted response for prompt {key[:12]}")
        return CompletionResult(text=text, stop_reason=StopReason.DONE)


# Known-correct conversion module handed out by the codegen oracle.  Pure
# standard library; decimals never pass through float.
_ORACLE_MODULE = '''\
import json
from decimal import Decimal, localcontext

TARGET_VERSION = "__VERSION__"
ACRES_PER_HECTARE = Decimal("2.471053814671653")


def _dumps(node):
    if isinstance(node, bool):
        return "true" if node else "false"
    if node is None:
        return "null"
    if isinstance(node, Decimal):
        return format(node, "f")
    if isinstance(node, dict):
        return "{" + ",".join(json.dumps(k) + ":" + _dumps(v) for k, v in node.items()) + "}"
    if isinstance(node, list):
        return "[" + ",".join(_dumps(v) for v in node) + "]"
    return json.dumps(node)


def convert(text):
    doc = json.loads(text, parse_float=Decimal, parse_int=Decimal)
    record = doc["values"][0]
    properties = {}
    if TARGET_VERSION in ("v2", "v3", "v4"):
        properties["id"] = record["id"]
    if TARGET_VERSION == "v3":
        properties["area_ha"] = record["area"]["valueAsDouble"]
    if TARGET_VERSION == "v4":
        area = record["area"]["valueAsDouble"]
        with localcontext() as ctx:
            ctx.prec = len(area.as_tuple().digits) + 20
            properties["area_acres"] = area * ACRES_PER_HECTARE
    coordinates = [
        [[point["lon"], point["lat"]] for point in ring["points"]]
        for ring in record["multipolygons"][0]["rings"]
    ]
    feature = {
        "type": "Feature",
        "properties": properties,
        "geometry": {"type": "Polygon", "coordinates": coordinates},
    }
    return _dumps({"type": "FeatureCollection", "features": [feature]})
'''


def oracle_module_source(version) -> str:
    """Reference conversion module (stdlib only) for one target version."""
    tag = version.value if hasattr(version, "value") else str(version)
    return _ORACLE_MODULE.replace("__VERSION__", tag)


class OracleBackend(Backend):
    """Answers every prompt correctly for whichever corpus entry it embeds.

    Direct prompts get the reference conversion of the embedded input; codegen
    prompts get a fenced, known-correct conversion module.
    """

    def __init__(self, manifest: DatasetManifest, strategy: Strategy, model_tag: str = "oracle"):
        super().__init__(model_tag)
        self.manifest = manifest
        self.strategy = strategy

    def _complete(self, prompt: str) -> CompletionResult:
        if self.strategy is Strategy.CODEGEN:
            source = oracle_module_source(self.manifest.version)
            return CompletionResult(
                text=f"```python\n{source}```", stop_reason=StopReason.DONE
            )
        entry = next(
            (e for e in self.manifest.entries if e.input_text in prompt), None
        )
        if entry is None:
            raise BackendError("prompt does not embed any known corpus entry")
        text = reference_convert(entry.input_text, self.manifest.version)
        return CompletionResult(text=text, stop_reason=StopReason.DONE)


NOISE_MODES = ("truncate", "wrong-value", "empty", "length-stop", "transport-error")

# What each injected corruption must classify as downstream.
NOISE_EXPECTED_CAUSE = {
    "truncate": FailureCause.JSON_SYNTAX,
    "wrong-value": FailureCause.DATA_MISMATCH,
    "empty": FailureCause.EMPTY_DATA,
    "length-stop": FailureCause.LLM_LENGTH_STOP,
    "transport-error": FailureCause.LLM_RUNTIME,
}


def _mutate_last_digit(text: str) -> str:
    """Bump the last digit so the document still parses but a value changes."""
    chars = list(text)
    for i in range(len(chars) - 1, -1, -1):
        if chars[i].isdigit():
            chars[i] = str((int(chars[i]) + 1) % 10)
            return "".join(chars)
    return '{"injected": "wrong-value"}'


class NoisyBackend(Backend):
    """Wraps another backend and corrupts a seeded fraction of its replies.

    Draws are indexed by a per-call counter, so a given call index always gets
    the same decision no matter how calls interleave.  Every injection is
    logged in .injections as (call index, mode).
    """

    def __init__(
        self,
        inner: Backend,
        error_rate: float,
        seed: int,
        failure_mix: dict[str, float] | None = None,
        model_tag: str | None = None,
    ):
        super().__init__(model_tag or inner.model_tag)
        if not 0.0 <= error_rate <= 1.0:
            raise ValueError("error_rate must lie in [0, 1]")
        mix = dict(failure_mix) if failure_mix else {mode: 1.0 for mode in NOISE_MODES}
        unknown = set(mix) - set(NOISE_MODES)
        if unknown:
            raise ValueError(f"unknown noise mode(s): {sorted(unknown)}")
        if not any(weight > 0 for weight in mix.values()):
            raise ValueError("failure_mix has no positive weight")
        self.inner = inner
        self.error_rate = float(error_rate)
        self.seed = seed
        self._modes = [m for m in NOISE_MODES if mix.get(m, 0.0) > 0.0]
        self._weights = [mix[m] for m in self._modes]
        self.injections: list[tuple[int, str]] = []

    def _complete(self, prompt: str) -> CompletionResult:
        index = self.calls - 1  # complete() already bumped the counter
        rng = random.Random(self.seed * 1_000_003 + index)
        if rng.random() >= self.error_rate:
            return self.inner.complete(prompt)
        mode = rng.choices(self._modes, weights=self._weights)[0]
        with self._lock:
            self.injections.append((index, mode))
        if mode == "transport-error":
            raise BackendError("injected transport failure")
        if mode == "empty":
            return CompletionResult(text="", stop_reason=StopReason.DONE)
        result = self.inner.complete(prompt)
        if mode == "truncate":
            return CompletionResult(
                text=result.text[: len(result.text) // 2], stop_reason=StopReason.DONE
            )
        if mode == "length-stop":
            return CompletionResult(
                text=result.text[: len(result.text) // 2], stop_reason=StopReason.LENGTH
            )
        return CompletionResult(
            text=_mutate_last_digit(result.text), stop_reason=StopReason.DONE
        )


def build_backend(
    cfg: BackendConfig,
    *,
    manifest: DatasetManifest | None = None,
    strategy: Strategy | None = None,
) -> Backend:
    """Instantiate a backend from its config.

    Oracle and noisy kinds answer relative to a corpus, so they need the
    manifest and strategy of the cell they serve.
    """
    if cfg.kind == "http":
        return HttpBackend(cfg)
    if cfg.kind == "scripted":
        return ScriptedBackend(
            response_dir=cfg.response_dir, model_tag=cfg.model_tag or "scripted"
        )
    if cfg.kind in ("oracle", "noisy"):
        if manifest is None or strategy is None:
            raise ValueError(f"{cfg.kind} backend needs a dataset manifest and strategy")
        oracle = OracleBackend(manifest, strategy, cfg.model_tag or "oracle")
        if cfg.kind == "oracle":
            return oracle
        return NoisyBackend(
            oracle,
            error_rate=cfg.error_rate,
            seed=cfg.seed,
            failure_mix=cfg.failure_mix,
            model_tag=cfg.model_tag or "noisy",
        )
    raise ValueError(f"unknown backend kind: {cfg.kind!r}")
