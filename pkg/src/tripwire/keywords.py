"""Keyword bias statistics, concordance word trees, and place-mention scans.

Tokens are whitespace splits of normalized text, which keeps "@user",
emoji, and Arabic tokens intact. Keyword and mention counting is binary
per tweet: a document contributes at most 1 to a word's class count no
matter how often it repeats the word.
"""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .corpus import Corpus, Label, normalize

# chi-squared critical values at 1 degree of freedom
CRITICAL_VALUES = {
    0.10: 2.706,
    0.05: 3.841,
    0.025: 5.024,
    0.01: 6.635,
    0.005: 7.879,
    0.001: 10.828,
}

_EDGE_PUNCT_RE = re.compile(r"^\W+|\W+$", re.UNICODE)


def tokenize(normalized_text: str) -> list[str]:
    return normalized_text.split()


@dataclass(frozen=True)
class KeywordConfig:
    alpha: float = 0.01
    min_count: int = 5

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.alpha not in CRITICAL_VALUES:
            known = ", ".join(str(a) for a in sorted(CRITICAL_VALUES))
            raise ValueError(f"alpha must be one of: {known}")
        if self.min_count < 1:
            raise ValueError("min_count must be a positive integer")


@dataclass(frozen=True)
class KeywordStat:
    word: str
    count_hate: int  # HATE tweets containing the word (binary per tweet)
    count_safe: int  # SAFE tweets containing the word
    occurrences: int  # raw occurrences across both corpora
    chi2: float
    p_hate: float
    significant: bool


def chi_squared(a: int, b: int, c: int, d: int) -> float:
    """2x2 contingency statistic N(ad-bc)^2 / row/column products.

    Cells: a = HATE docs with the word, b = SAFE docs with it,
    c = HATE docs without, d = SAFE docs without. A zero margin means
    the table carries no signal and scores 0.
    """
    n = a + b + c + d
    denom = (a + b) * (c + d) * (a + c) * (b + d)
    if denom == 0:
        return 0.0
    num = a * d - b * c
    return n * num * num / denom


def keyword_bias(
    corpus: Corpus, config: KeywordConfig = KeywordConfig()
) -> list[KeywordStat]:
    """Rank distinct tokens by class bias, descending chi-squared.

    Only tokens whose tweet count (HATE + SAFE documents containing
    them) reaches ``min_count`` are reported. Ties in chi-squared break
    lexicographically so output order is deterministic. Unlabeled
    records are ignored.
    """
    n_hate = n_safe = 0
    df_hate: Counter = Counter()
    df_safe: Counter = Counter()
    occurrences: Counter = Counter()
    for rec in corpus:
        if rec.label is Label.UNLABELED:
            continue
        tokens = tokenize(normalize(rec.text))
        occurrences.update(tokens)
        unique = set(tokens)
        if rec.label is Label.HATE:
            n_hate += 1
            df_hate.update(unique)
        else:
            n_safe += 1
            df_safe.update(unique)
    if n_hate == 0 or n_safe == 0:
        raise ValueError("keyword bias needs documents of both labels")
    critical = CRITICAL_VALUES[config.alpha]
    stats = []
    for word in set(df_hate) | set(df_safe):
        h = df_hate.get(word, 0)
        s = df_safe.get(word, 0)
        if h + s < config.min_count:
            continue
        chi2 = chi_squared(h, s, n_hate - h, n_safe - s)
        stats.append(
            KeywordStat(
                word=word,
                count_hate=h,
                count_safe=s,
                occurrences=occurrences[word],
                chi2=chi2,
                p_hate=h / (h + s),
                significant=chi2 >= critical,
            )
        )
    stats.sort(key=lambda st: (-st.chi2, st.word))
    return stats


def keyword_report_csv(stats: list[KeywordStat]) -> str:
    """Three-column report: KEYWORD, HATE %, # (raw occurrences)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["KEYWORD", "HATE %", "#"])
    for st in stats:
        writer.writerow([st.word, f"{round(st.p_hate * 100)}%", st.occurrences])
    return buf.getvalue()


class Direction(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass
class WordTreeNode:
    token: str
    count: int = 0
    children: dict[str, "WordTreeNode"] = field(default_factory=dict)


@dataclass
class WordTree:
    keyword: str
    direction: Direction
    depth: int
    count: int = 0  # total keyword occurrences
    branches: dict[str, WordTreeNode] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def node_dict(node: WordTreeNode) -> dict:
            return {
                "token": node.token,
                "count": node.count,
                "children": [
                    node_dict(child)
                    for _, child in sorted(
                        node.children.items(), key=lambda kv: (-kv[1].count, kv[0])
                    )
                ],
            }

        return {
            "keyword": self.keyword,
            "direction": self.direction.value,
            "depth": self.depth,
            "count": self.count,
            "branches": [
                node_dict(node)
                for _, node in sorted(
                    self.branches.items(), key=lambda kv: (-kv[1].count, kv[0])
                )
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.keyword} ({self.count})"]

        def walk(node: WordTreeNode, indent: int):
            lines.append(f"{'  ' * indent}{node.token} ({node.count})")
            for _, child in sorted(
                node.children.items(), key=lambda kv: (-kv[1].count, kv[0])
            ):
                walk(child, indent + 1)

        for _, node in sorted(
            self.branches.items(), key=lambda kv: (-kv[1].count, kv[0])
        ):
            walk(node, 1)
        return "\n".join(lines)


def word_tree(
    corpus: Corpus,
    keyword: str,
    direction: Direction | str = Direction.RIGHT,
    depth: int = 3,
) -> WordTree:
    """Aggregate the tokens adjacent to each keyword occurrence.

    Context tokens are recorded nearest-first: for direction left, the
    first tree level holds the token immediately before the keyword.
    Matching is token-exact on normalized text.
    """
    direction = Direction(direction)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    keyword = normalize(keyword)
    tree = WordTree(keyword=keyword, direction=direction, depth=depth)
    for rec in corpus:
        tokens = tokenize(normalize(rec.text))
        for pos, token in enumerate(tokens):
            if token != keyword:
                continue
            tree.count += 1
            if direction is Direction.RIGHT:
                context = tokens[pos + 1 : pos + 1 + depth]
            else:
                context = tokens[max(0, pos - depth) : pos][::-1]
            level = tree.branches
            for ctx in context:
                node = level.setdefault(ctx, WordTreeNode(token=ctx))
                node.count += 1
                level = node.children
    return tree


def _clean_token(token: str) -> str:
    return _EDGE_PUNCT_RE.sub("", token)


def mention_scan(corpus: Corpus, gazetteer: dict[str, str]) -> dict[str, int]:
    """Count tweets mentioning each place, via alias -> canonical name map.

    Aliases may be multiword phrases; matching is case-insensitive on
    normalized text with leading/trailing punctuation stripped from
    tokens. A tweet counts at most once per place.
    """
    alias_tokens: list[tuple[tuple[str, ...], str]] = []
    for alias, place in gazetteer.items():
        parts = tuple(_clean_token(t) for t in tokenize(normalize(alias)))
        parts = tuple(p for p in parts if p)
        if parts:
            alias_tokens.append((parts, place))
    counts: Counter = Counter()
    for rec in corpus:
        tokens = [_clean_token(t) for t in tokenize(normalize(rec.text))]
        found: set[str] = set()
        for parts, place in alias_tokens:
            if place in found:
                continue
            width = len(parts)
            for start in range(len(tokens) - width + 1):
                if tuple(tokens[start : start + width]) == parts:
                    found.add(place)
                    break
        counts.update(found)
    return dict(counts)
