"""End-to-end run over a miniature bilingual site: crawl a snapshot,
align documents and sentences, filter, dedup, and print the report.

Run: python demos/07_full_pipeline.py
"""

import json
import tempfile
from pathlib import Path

from localmine.config import load_config
from localmine.pipeline import emit_report, run_pipeline

ARTICLES = [
    ("ニュース1", "新闻1",
     ["学生は新聞を読む。", "医者は病院で働く。", "明日は雨が降る。"],
     ["学生读报纸。", "医生在医院工作。", "明天要下雨。"]),
    ("ニュース2", "新闻2",
     ["記者は映画を見る。", "東京は晴れです。", "図書館は静かです。"],
     ["记者看电影。", "东京是晴天。", "图书馆很安静。"]),
]
TRAIN = [
    ("学生は本を読む。", "学生读书。"),
    ("医者は新聞を読む。", "医生读报纸。"),
    ("記者は病院で働く。", "记者在医院工作。"),
    ("今日は雨が降る。", "今天要下雨。"),
    ("東京は雨です。", "东京下雨。"),
    ("図書館で本を読む。", "在图书馆读书。"),
    ("学生は映画を見る。", "学生看电影。"),
    ("医者は映画が好き。", "医生喜欢电影。"),
    ("明日は晴れです。", "明天是晴天。"),
    ("記者は本が好き。", "记者喜欢书。"),
    ("学生は病院へ行く。", "学生去医院。"),
    ("医者は東京へ行く。", "医生去东京。"),
]


def page(title, sentences, links=()):
    body = "\n".join(f"<p>{s}</p>" for s in sentences)
    nav = "\n".join(f'<li><a href="{href}">{text}</a></li>' for href, text in links)
    return (f"<html><head><meta charset='utf-8'><title>{title}</title></head>"
            f"<body><h1>{title}</h1>{body}<ul>{nav}</ul></body></html>")


def build_site(root: Path) -> None:
    base = "https://mini-news.jp"
    manifest = []

    def add(name, path, html):
        (root / name).write_text(html, encoding="utf-8")
        manifest.append({"file": name, "url": base + path, "content_type": "text/html"})

    ja_links, zh_links = [], []
    for i, (title_ja, title_zh, body_ja, body_zh) in enumerate(ARTICLES, start=1):
        add(f"ja{i}.html", f"/ja/news/{i}.html", page(title_ja, body_ja))
        add(f"zh{i}.html", f"/zh/news/{i}.html", page(title_zh, body_zh))
        ja_links.append((f"/ja/news/{i}.html", title_ja))
        zh_links.append((f"/zh/news/{i}.html", title_zh))
    add("ja_index.html", "/ja/index.html", page("ニュース一覧", ["最新のニュースです。"], ja_links))
    add("zh_index.html", "/zh/index.html", page("新闻列表", ["这是最新的新闻。"], zh_links))
    with open(root / "manifest.jsonl", "w", encoding="utf-8") as fh:
        for entry in manifest:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


with tempfile.TemporaryDirectory() as tmp:
    tmp_path = Path(tmp)
    snapshot = tmp_path / "snapshot"
    snapshot.mkdir()
    build_site(snapshot)

    sites = tmp_path / "sites.jsonl"
    sites.write_text(json.dumps({
        "host": "mini-news.jp",
        "seed_urls": ["https://mini-news.jp/ja/index.html",
                      "https://mini-news.jp/zh/index.html"],
        "source": "crowd",
    }, ensure_ascii=False) + "\n", encoding="utf-8")

    train = tmp_path / "train.tsv"
    train.write_text("".join(f"{ja}\t{zh}\n" for ja, zh in TRAIN), encoding="utf-8")

    config_path = tmp_path / "run.ini"
    config_path.write_text(
        "[pipeline]\n"
        f"output_dir = {tmp_path / 'out'}\n"
        f"sites = {sites}\n"
        f"snapshot_dir = {snapshot}\n"
        "seed = 0\n"
        "[crawler]\n"
        "per_host_delay_ms = 0\n"
        "[filter]\n"
        f"train_corpus = {train}\n",
        encoding="utf-8",
    )

    result = run_pipeline(load_config(config_path))
    print(emit_report(result.reports, "tsv").decode("utf-8"))
    print("mined records:")
    for line in open(result.corpus_jsonl, encoding="utf-8"):
        row = json.loads(line)
        print(f"  ({row['filter_score']:.2f}) {row['ja']} ||| {row['zh']}")
