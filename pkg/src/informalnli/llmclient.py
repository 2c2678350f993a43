"""Zero-shot chat-completion baseline: fixed prompt, temperature 0, cached.

The API key comes from an environment variable only; it is never read from
config files, written to the cache, or interpolated into log messages. A
fully cached run constructs no HTTP client at all, so replaying an
evaluation needs no credentials and makes zero network calls.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .corpus import LABELS, NliExample
from .errors import AuthError, MalformedRecord, NetworkError, RateLimited
from .stats import INVALID, PredictionFile

SYSTEM_PROMPT = (
    "You are a natural language inference classifier. "
    "Given a premise and hypothesis, output exactly one word: "
    "entailment, neutral, or contradiction. No explanation."
)

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_API_KEY_ENV = "OPENAI_API_KEY"


def build_prompt(example: NliExample) -> str:
    """Two-line rendering, no sanitization: field text is passed verbatim."""
    return f"Premise: {example.premise}\nHypothesis: {example.hypothesis}"


def parse_label(raw_response: str) -> str:
    """Trim, drop trailing punctuation, lowercase; anything inexact is invalid."""
    text = raw_response.strip().rstrip(".!?,;:").strip().lower()
    return text if text in LABELS else INVALID


def cache_key(model_name: str, system_prompt: str, user_content: str) -> str:
    h = hashlib.sha256()
    for part in (model_name, system_prompt, user_content):
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()


@dataclass
class CacheEntry:
    key: str
    raw_response: str
    parsed_label: str
    timestamp: float


@dataclass
class ResponseCache:
    """Append-only JSONL key-value store; survives crashes, diffs cleanly."""

    path: Path
    entries: dict[str, CacheEntry] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def open(cls, path: str | Path) -> "ResponseCache":
        cache = cls(Path(path))
        if cache.path.exists():
            with open(cache.path, encoding="utf-8") as f:
                for line_no, line in enumerate(f, start=1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                        entry = CacheEntry(rec["key"], rec["raw_response"],
                                           rec["parsed_label"], rec["timestamp"])
                    except (json.JSONDecodeError, KeyError) as e:
                        raise MalformedRecord(line_no, f"bad cache record ({e})") from e
                    cache.entries[entry.key] = entry
        return cache

    def get(self, key: str) -> CacheEntry | None:
        return self.entries.get(key)

    def put(self, key: str, raw_response: str, parsed_label: str) -> CacheEntry:
        entry = CacheEntry(key, raw_response, parsed_label, time.time())
        with self._lock:
            self.entries[key] = entry
            with open(self.path, "a", encoding="utf-8", newline="\n") as f:
                f.write(json.dumps(vars(entry), ensure_ascii=False) + "\n")
        return entry

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class LlmClient:
    """Minimal chat-completions client with retries and a request-rate floor."""

    model_name: str
    base_url: str = DEFAULT_BASE_URL
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 30.0
    max_retries: int = 3
    rate_limit: float = 0.0          # max requests/second; 0 = unlimited
    _api_key: str = field(init=False, repr=False)
    _http: httpx.Client = field(init=False, repr=False)
    _last_request: float = field(default=0.0, init=False, repr=False)
    _throttle: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        key = os.environ.get(self.api_key_env, "")
        if not key:
            raise AuthError(f"no API key in ${self.api_key_env}")
        self._api_key = key
        self._http = httpx.Client(
            base_url=self.base_url,
            headers={"Authorization": f"Bearer {key}"},
            timeout=self.timeout,
        )

    def _pace(self) -> None:
        if self.rate_limit <= 0:
            return
        with self._throttle:
            wait = self._last_request + 1.0 / self.rate_limit - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()

    def complete(self, user_content: str) -> str:
        payload = {
            "model": self.model_name,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": user_content},
            ],
            "temperature": 0,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
            self._pace()
            try:
                resp = self._http.post("/chat/completions", json=payload)
            except httpx.HTTPError as e:
                last_error = NetworkError(f"request failed: {type(e).__name__}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"server rejected credentials ({resp.status_code})")
            if resp.status_code == 429:
                retry_after = resp.headers.get("Retry-After")
                last_error = RateLimited("rate limited by server")
                if retry_after:
                    try:
                        time.sleep(min(float(retry_after), 30.0))
                    except ValueError:
                        pass
                continue
            if resp.status_code >= 500:
                last_error = NetworkError(f"server error {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise NetworkError(f"unexpected status {resp.status_code}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, ValueError) as e:
                raise NetworkError(f"malformed completion response: {e}") from e
        raise last_error if last_error else NetworkError("retries exhausted")

    def close(self) -> None:
        self._http.close()


def classify_batch(
    examples: list[NliExample],
    model_name: str,
    cache: ResponseCache,
    client: LlmClient | None = None,
    base_url: str = DEFAULT_BASE_URL,
    rate_limit: float = 0.0,
    jobs: int = 1,
    variant_name: str = "",
) -> PredictionFile:
    """One prediction per example, cache consulted before any network call.

    The HTTP client (and with it the credential check) is created only when
    at least one example misses the cache, so warm-cache reruns are fully
    offline. Invalid parses are recorded, never retried.
    """
    keys = [cache_key(model_name, SYSTEM_PROMPT, build_prompt(ex)) for ex in examples]
    labels: list[str | None] = [None] * len(examples)
    misses: list[int] = []
    for i, key in enumerate(keys):
        entry = cache.get(key)
        if entry is not None:
            labels[i] = entry.parsed_label
        else:
            misses.append(i)

    network_calls = 0
    owns_client = False
    if misses:
        if client is None:
            client = LlmClient(model_name=model_name, base_url=base_url,
                               rate_limit=rate_limit)
            owns_client = True
        try:
            def fetch(i: int) -> None:
                raw = client.complete(build_prompt(examples[i]))
                entry = cache.put(keys[i], raw, parse_label(raw))
                labels[i] = entry.parsed_label

            if jobs > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    list(pool.map(fetch, misses))
            else:
                for i in misses:
                    fetch(i)
            network_calls = len(misses)
        finally:
            if owns_client:
                client.close()

    records = [(ex.id, label) for ex, label in zip(examples, labels)]
    pred = PredictionFile(model_name, variant_name, records)
    pred.metadata.update({
        "cache_hits": len(examples) - len(misses),
        "network_calls": network_calls,
        "invalid_count": sum(1 for _, label in records if label == INVALID),
    })
    return pred
