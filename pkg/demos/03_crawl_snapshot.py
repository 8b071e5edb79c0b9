"""Budgeted BFS crawling against a filesystem snapshot: the snapshot
directory serves pages through the same fetch interface as the network,
so crawls are reproducible offline.

Run: python demos/03_crawl_snapshot.py
"""

import json
import tempfile
from pathlib import Path

from localmine import CandidateSite, CrawlBudget, crawl_site
from localmine.fetching import snapshot_fetch


def build_snapshot(root: Path, n_pages: int) -> None:
    manifest = []
    for i in range(n_pages):
        nxt = f'<a href="/p{i + 1}.html">next</a>' if i + 1 < n_pages else ""
        off_domain = '<a href="https://elsewhere.example.org/x">offsite</a>'
        html = f"<html><body><p>ページ{i}の本文。</p>{nxt}{off_domain}</body></html>"
        name = f"p{i}.html"
        (root / name).write_text(html, encoding="utf-8")
        url = "https://demo-site.jp/index.html" if i == 0 else f"https://demo-site.jp/p{i}.html"
        manifest.append({"file": name, "url": url, "content_type": "text/html"})
    with open(root / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for entry in manifest:
            fh.write(json.dumps(entry) + "\n")


with tempfile.TemporaryDirectory() as tmp:
    snapshot_dir = Path(tmp)
    build_snapshot(snapshot_dir, n_pages=20)
    fetch = snapshot_fetch(snapshot_dir)

    site = CandidateSite(
        host="demo-site.jp",
        seed_urls=["https://demo-site.jp/index.html"],
        source="archive",
    )
    # any exhausted limit halts the crawl; here the page cap bites first
    budget = CrawlBudget(max_pages=8, max_bytes=10**6, per_host_delay_ms=0)
    store = crawl_site(site, budget, fetch)

print(f"stored {len(store.pages)} pages / {store.stored_bytes()} bytes "
      f"(cap was {budget.max_pages} pages)")
for page in store.pages:
    print("  fetched", page.url)
print("off-domain links were never followed; failures:", store.fetch_failures)
