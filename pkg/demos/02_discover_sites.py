"""Site discovery from an archive scan: accumulate per-host JA/ZH text
volumes over a WARC-style record stream, then keep the hosts whose two
sides are roughly balanced.

Run: python demos/02_discover_sites.py
"""

import tempfile
from pathlib import Path

from localmine import scan_archive, select_balanced_hosts
from localmine.discovery import iter_warc_records, write_warc


def page(sentence, repeat=40):
    return f"<html><body><p>{sentence * repeat}</p></body></html>".encode("utf-8")


records = [
    # balanced bilingual host: similar JA and ZH text volume
    ("https://www.bilingual-news.jp/ja/1.html", page("今日は晴れです。")),
    ("https://www.bilingual-news.jp/ja/2.html", page("明日は雨が降る。")),
    ("https://www.bilingual-news.jp/zh/1.html", page("今天是晴天。")),
    ("https://www.bilingual-news.jp/zh/2.html", page("明天要下雨。")),
    # Japanese-only host: no Chinese side at all
    ("https://ja-only.example.jp/a.html", page("日本語だけのページです。")),
    ("https://ja-only.example.jp/b.html", page("ここにも日本語しかない。")),
    # lopsided host: a token Chinese page on a large Japanese site
    ("https://lopsided.example.com/ja1.html", page("大量の日本語テキスト。", 200)),
    ("https://lopsided.example.com/zh1.html", page("一点中文。", 2)),
]

with tempfile.TemporaryDirectory() as tmp:
    warc_path = Path(tmp) / "records.warc.gz"
    write_warc(records, warc_path)
    scan = scan_archive(iter_warc_records(warc_path))

print(f"{len(scan.hosts)} hosts scanned, {scan.skipped_records} records skipped")
for host, stats in sorted(scan.hosts.items()):
    print(f"  {host:28} ja={stats.bytes_ja:6d}B zh={stats.bytes_zh:6d}B "
          f"balance={stats.balance:.2f}")

sites = select_balanced_hosts(scan.hosts.values(), min_bytes=500, min_balance=0.3)
print("\ncandidate sites (balanced, largest first):")
for site in sites:
    print(f"  {site.host:28} balance={site.balance:.2f} seed={site.seed_urls[0]}")
