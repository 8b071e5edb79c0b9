"""Budgeted polite BFS crawler confined to one site's registrable domain.

The crawl halts as soon as any budget limit (wall clock, page count,
stored bytes) is reached.  HTML bodies are always stored; PDF/Word
bodies only when a binary-extractor plug-in is registered, otherwise
they are counted and skipped.  With a deterministic fetch capability
the resulting PageStore is bit-reproducible (FIFO frontier, document-
order link expansion).
"""

from __future__ import annotations

import json
import logging
import time
import urllib.robotparser
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable
from urllib.parse import urldefrag, urljoin, urlsplit

from .fetching import Fetch, load_manifest
from .htmltext import extract_links
from .urls import registrable_domain

logger = logging.getLogger(__name__)

BinaryExtractor = Callable[[bytes, str], str]
"""Plug-in for PDF/Word text extraction: (body, content_type) -> text."""

_HTML_TYPES = ("text/html", "application/xhtml+xml", "application/xhtml")
_BINARY_TYPES = (
    "application/pdf",
    "application/msword",
    "application/vnd.openxmlformats-officedocument.wordprocessingml.document",
)
_BINARY_EXTENSIONS = (".pdf", ".doc", ".docx")


@dataclass
class CrawlBudget:
    """Hard limits; the crawl halts when ANY of them is reached."""

    max_seconds: int = 172_800  # 48 h, the default wall clock per site
    max_pages: int = 10_000
    max_bytes: int = 256 * 1024 * 1024
    per_host_delay_ms: int = 100


@dataclass
class Page:
    url: str
    content_type: str
    body: bytes
    fetch_time: float


@dataclass
class PageStore:
    """Pages stored for one site; URLs are unique and stay within the
    site's registrable domain(s)."""

    host: str
    pages: list[Page] = field(default_factory=list)
    crawl_failed: bool = False
    failure_reason: str = ""
    fetched_pages: int = 0
    fetch_failures: int = 0
    skipped_binary: int = 0
    skipped_other: int = 0

    def __len__(self) -> int:
        return len(self.pages)

    def urls(self) -> list[str]:
        return [page.url for page in self.pages]

    def stored_bytes(self) -> int:
        return sum(len(page.body) for page in self.pages)


def _is_html(content_type: str, url: str) -> bool:
    if content_type:
        return content_type.lower().startswith(_HTML_TYPES)
    # No declared type: go by the URL shape.
    path = urlsplit(url).path.lower()
    return path.endswith((".html", ".htm", "/")) or "." not in path.rsplit("/", 1)[-1]


def _is_binary_document(content_type: str, url: str) -> bool:
    if content_type.lower() in _BINARY_TYPES:
        return True
    return urlsplit(url).path.lower().endswith(_BINARY_EXTENSIONS)


class _RobotsCache:
    """Per-netloc robots.txt decisions, fetched through the same capability."""

    def __init__(self, fetch: Fetch, timeout: float) -> None:
        self._fetch = fetch
        self._timeout = timeout
        self._parsers: dict[str, urllib.robotparser.RobotFileParser | None] = {}

    def allowed(self, url: str) -> bool:
        parts = urlsplit(url)
        key = f"{parts.scheme}://{parts.netloc}"
        if key not in self._parsers:
            self._parsers[key] = self._load(key)
        parser = self._parsers[key]
        return True if parser is None else parser.can_fetch("*", url)

    def _load(self, origin: str):
        try:
            resp = self._fetch(origin + "/robots.txt", timeout=self._timeout)
        except Exception as err:  # robots failures never block the crawl
            logger.debug("robots fetch failed for %s: %s", origin, err)
            return None
        if resp.status != 200 or not resp.body:
            return None
        parser = urllib.robotparser.RobotFileParser()
        try:
            parser.parse(resp.body.decode("utf-8", "replace").splitlines())
        except Exception:
            return None
        return parser


def crawl_site(
    site,
    budget: CrawlBudget,
    fetch: Fetch,
    binary_extractor: BinaryExtractor | None = None,
    timeout: float = 30.0,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> PageStore:
    """Breadth-first crawl of one candidate site under a strict budget.

    ``site`` needs ``host`` and ``seed_urls`` attributes.  Only links
    within the seeds' registrable domains are followed and robots
    exclusion is honored.  All seeds unreachable marks the site
    crawl-failed.
    """
    store = PageStore(host=site.host)
    seeds = [urldefrag(u)[0] for u in site.seed_urls]
    seed_set = set(seeds)
    allowed_domains = frozenset(registrable_domain(u) for u in seeds)
    robots = _RobotsCache(fetch, timeout)
    start = clock()
    last_request: dict[str, float] = {}
    frontier: deque[str] = deque(seeds)
    seen: set[str] = set(seeds)
    stored_bytes = 0
    any_seed_ok = False

    def over_time() -> bool:
        return clock() - start >= budget.max_seconds

    def polite_wait(netloc: str) -> None:
        if budget.per_host_delay_ms <= 0:
            return
        previous = last_request.get(netloc)
        now = clock()
        if previous is not None:
            remaining = budget.per_host_delay_ms / 1000.0 - (now - previous)
            if remaining > 0:
                sleep(remaining)
                now = clock()
        last_request[netloc] = now

    while frontier:
        if store.fetched_pages >= budget.max_pages or over_time():
            break
        url = frontier.popleft()
        if not robots.allowed(url):
            logger.debug("robots disallows %s", url)
            continue
        netloc = urlsplit(url).netloc
        polite_wait(netloc)
        store.fetched_pages += 1
        try:
            resp = fetch(url, timeout=timeout)
        except Exception as err:
            logger.debug("fetch failed for %s: %s", url, err)
            store.fetch_failures += 1
            continue
        if not resp.ok:
            store.fetch_failures += 1
            continue
        if url in seed_set:
            any_seed_ok = True
        if _is_binary_document(resp.content_type, url):
            if binary_extractor is None:
                store.skipped_binary += 1
                continue
            body = resp.body
        elif _is_html(resp.content_type, url):
            body = resp.body
        else:
            store.skipped_other += 1
            continue
        if stored_bytes + len(body) > budget.max_bytes:
            break
        stored_bytes += len(body)
        store.pages.append(Page(url, resp.content_type, body, clock() - start))
        if _is_html(resp.content_type, url):
            for href in extract_links_safe(body, extract_links):
                child = urldefrag(urljoin(url, href))[0]
                scheme = urlsplit(child).scheme
                if scheme not in ("http", "https"):
                    continue
                if registrable_domain(child) not in allowed_domains:
                    continue
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)

    if not store.pages:
        store.crawl_failed = True
        if store.fetch_failures and not any_seed_ok:
            store.failure_reason = "seeds unreachable"
        else:
            store.failure_reason = "no pages stored"
    return store


def extract_links_safe(body: bytes, extractor) -> list[str]:
    """Link extraction must never abort a crawl, whatever the markup."""
    try:
        return extractor(body)
    except Exception as err:
        logger.debug("link extraction failed: %s", err)
        return []


def load_snapshot(snapshot_dir: str | Path) -> PageStore:
    """PageStore equivalent to an unlimited-budget crawl over a snapshot
    directory (manifest order).  Missing manifest is fatal."""
    root = Path(snapshot_dir)
    entries = load_manifest(root)
    host = registrable_domain(entries[0]["url"]) if entries else root.name
    store = PageStore(host=host)
    for entry in entries:
        body = (root / entry["file"]).read_bytes()
        store.pages.append(Page(entry["url"], entry.get("content_type", "text/html"), body, 0.0))
        store.fetched_pages += 1
    return store


def dump_snapshot(store: PageStore, out_dir: str | Path) -> None:
    """Write a PageStore as a snapshot directory (round-trips through
    load_snapshot)."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    lines = []
    for idx, page in enumerate(store.pages):
        suffix = ".html" if _is_html(page.content_type, page.url) else ".bin"
        name = f"page{idx:04d}{suffix}"
        (root / name).write_bytes(page.body)
        lines.append(json.dumps(
            {"file": name, "url": page.url, "content_type": page.content_type},
            ensure_ascii=False,
        ))
    (root / "manifest.jsonl").write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
