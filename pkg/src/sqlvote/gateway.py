"""Completion sampling across pluggable backends, with an on-disk cache.

Each arm draws `samples` i.i.d. completions for one rendered prompt. The
cache is content-addressed by (model, prompt hash, temperature, seed, index)
so recorded runs replay byte-identically and repeat runs cost nothing.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import requests

from .errors import BackendError, BackendUnavailable, DuplicateModelId
from .prompts import PromptDesignId, RenderedPrompt, content_hash_of

DEFAULT_SAMPLES = 32
DEFAULT_TEMPERATURE = 0.5
DEFAULT_STOP = (";", "\n\n")
_RETRY_ATTEMPTS = 3
_RETRY_BASE_DELAY = 1.0


@dataclass(frozen=True)
class ModelArm:
    """One (model, design, shots) configuration contributing candidates."""

    model_id: str
    design: PromptDesignId
    shots: int = 0
    samples: int = DEFAULT_SAMPLES
    temperature: float = DEFAULT_TEMPERATURE
    weight: float = 1.0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError("weight must be in (0, 1]")

    def describe(self) -> dict:
        return {
            "model": self.model_id,
            "design": self.design.value,
            "shots": self.shots,
            "samples": self.samples,
            "temperature": self.temperature,
        }


@dataclass(frozen=True)
class Completion:
    text: str
    arm: ModelArm
    sample_index: int
    from_cache: bool = False
    failed: bool = False


class GenerationBackend(Protocol):
    def generate(self, prompt: str, n: int, temperature: float, seed: int) -> list[str]:
        """Return exactly n completion strings for the prompt."""
        ...


class ScriptedBackend:
    """Deterministic replay backend: completions keyed by prompt content hash."""

    def __init__(self, completions_by_hash: dict[str, list[str]]):
        self._table = {k: list(v) for k, v in completions_by_hash.items()}

    @classmethod
    def from_dir(cls, path: Path | str) -> "ScriptedBackend":
        """Load fixture records {"prompt_hash": ..., "completions": [...]} from *.json files."""
        table: dict[str, list[str]] = {}
        for record_path in sorted(Path(path).glob("*.json")):
            record = json.loads(record_path.read_text(encoding="utf-8"))
            table[record["prompt_hash"]] = list(record["completions"])
        return cls(table)

    def generate(self, prompt: str, n: int, temperature: float, seed: int) -> list[str]:
        scripted = self._table.get(content_hash_of(prompt))
        if not scripted:
            raise BackendError(f"no scripted completions for prompt hash {content_hash_of(prompt)[:12]}")
        return [scripted[i % len(scripted)] for i in range(n)]


class RemoteBackend:
    """HTTP completion backend speaking the POST-JSON wire contract."""

    def __init__(
        self,
        endpoint: str,
        auth_token_env: str,
        request_timeout: float = 60.0,
        model: str | None = None,
        stop: tuple[str, ...] = DEFAULT_STOP,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.auth_token_env = auth_token_env
        self.request_timeout = request_timeout
        self.model = model
        self.stop = list(stop)
        self._sleep = sleep

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.auth_token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def generate(self, prompt: str, n: int, temperature: float, seed: int) -> list[str]:
        payload = {
            "model": self.model or "",
            "prompt": prompt,
            "n": n,
            "temperature": temperature,
            "stop": self.stop,
        }
        last_error = "no attempt made"
        last_status: int | None = None
        for attempt in range(_RETRY_ATTEMPTS):
            if attempt:
                self._sleep(_RETRY_BASE_DELAY * 2 ** (attempt - 1))
            try:
                response = requests.post(
                    self.endpoint, json=payload, headers=self._headers(), timeout=self.request_timeout
                )
            except requests.RequestException as exc:
                last_error, last_status = str(exc), None
                continue
            if response.status_code == 429 or response.status_code >= 500:
                last_error, last_status = response.text[:200], response.status_code
                continue
            if response.status_code != 200:
                raise BackendError(response.text[:200], response.status_code)
            try:
                completions = response.json()["completions"]
            except (ValueError, KeyError) as exc:
                raise BackendError(f"bad response body: {exc}", response.status_code) from exc
            if not isinstance(completions, list) or len(completions) < n:
                raise BackendError("short response", response.status_code)
            return [str(c) for c in completions[:n]]
        raise BackendError(last_error, last_status)


def remote_backend(
    endpoint: str,
    auth_token_env: str,
    request_timeout: float = 60.0,
    model: str | None = None,
) -> RemoteBackend:
    return RemoteBackend(endpoint, auth_token_env, request_timeout, model)


@dataclass
class Gateway:
    """Routes sampling to registered backends and persists completions."""

    cache_dir: Path | None = None
    _backends: dict[str, GenerationBackend] = field(default_factory=dict)
    _write_lock: threading.Lock = field(default_factory=threading.Lock)

    def register_backend(self, model_id: str, backend: GenerationBackend) -> None:
        if model_id in self._backends:
            raise DuplicateModelId(model_id)
        self._backends[model_id] = backend

    def _cache_path(self, arm: ModelArm, prompt: RenderedPrompt, seed: int, index: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return (
            Path(self.cache_dir)
            / arm.model_id
            / prompt.content_hash
            / format(arm.temperature, "g")
            / str(seed)
            / f"{index}.txt"
        )

    def sample(self, arm: ModelArm, prompt: RenderedPrompt, seed: int) -> list[Completion]:
        """Exactly arm.samples completions, cache first, placeholders on failure."""
        backend = self._backends.get(arm.model_id)
        if backend is None:
            raise BackendUnavailable(arm.model_id)

        results: list[Completion | None] = [None] * arm.samples
        missing: list[int] = []
        for i in range(arm.samples):
            path = self._cache_path(arm, prompt, seed, i)
            if path is not None and path.is_file():
                results[i] = Completion(path.read_text(encoding="utf-8"), arm, i, from_cache=True)
            else:
                missing.append(i)

        if missing:
            try:
                texts = backend.generate(prompt.text, len(missing), arm.temperature, seed)
            except BackendError as exc:
                for i in missing:
                    results[i] = Completion(str(exc), arm, i, failed=True)
            else:
                if len(texts) != len(missing):
                    texts = (texts + [""] * len(missing))[: len(missing)]
                for i, text in zip(missing, texts):
                    results[i] = Completion(text, arm, i)
                    path = self._cache_path(arm, prompt, seed, i)
                    if path is not None:
                        with self._write_lock:
                            path.parent.mkdir(parents=True, exist_ok=True)
                            tmp = path.with_suffix(".tmp")
                            tmp.write_text(text, encoding="utf-8")
                            tmp.replace(path)
        return [c for c in results if c is not None]


def cache_stats(cache_dir: Path | str) -> tuple[int, int]:
    """(entry count, total bytes) over all cached completion files."""
    entries = 0
    total = 0
    root = Path(cache_dir)
    if root.is_dir():
        for path in root.rglob("*.txt"):
            entries += 1
            total += path.stat().st_size
    return entries, total


def cache_clear(cache_dir: Path | str) -> int:
    """Remove all cache entries; returns how many were deleted."""
    removed = 0
    root = Path(cache_dir)
    if not root.is_dir():
        return 0
    for path in sorted(root.rglob("*.txt"), reverse=True):
        path.unlink()
        removed += 1
    for path in sorted((p for p in root.rglob("*") if p.is_dir()), reverse=True):
        try:
            path.rmdir()
        except OSError:
            pass
    return removed
