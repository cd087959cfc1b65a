"""Streaming ingestion of Google-Books-Ngram-format files.

Input is UTF-8 text, one record per line, four tab-separated fields:
``ngram TAB year TAB match_count TAB volume_count``, tokens inside the
ngram field separated by single spaces.  1-gram records supply the total
yearly usage of a word form; 2-gram records of the shape ``word .``
supply its with-period usage.  Both are folded into per-word yearly
profiles.  Aggregation state merges pointwise, so shards can be parsed
in parallel and combined afterwards with identical results.
"""
from __future__ import annotations

import gzip
import hashlib
import io
import json
import logging
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "NgramRecord",
    "BigramObservation",
    "YearlyUsage",
    "WordProfile",
    "IngestConfig",
    "IngestCounters",
    "Aggregator",
    "ParseError",
    "ConfigMismatchError",
    "parse_line",
    "classify_bigram",
    "is_candidate_word",
    "aggregate",
    "merge",
    "ingest_paths",
    "open_text",
    "DEFAULT_WINDOW",
    "SCRIPT_RANGES",
    "FLAG_CLAMPED",
]

DEFAULT_WINDOW = (1990, 2008)

# Codepoint ranges of letters admitted per script name.
SCRIPT_RANGES: dict[str, tuple[tuple[int, int], ...]] = {
    "latin": ((0x41, 0x5A), (0x61, 0x7A), (0xC0, 0xD6), (0xD8, 0xF6), (0xF8, 0x17F)),
    "cyrillic": ((0x400, 0x4FF), (0x500, 0x52F)),
}

FLAG_CLAMPED = "clamped-counts"


class ParseError(ValueError):
    """A corpus line that does not satisfy the record format."""

    def __init__(self, reason: str, line_number: int = 0):
        super().__init__(f"line {line_number}: {reason}" if line_number else reason)
        self.reason = reason
        self.line_number = line_number


class ConfigMismatchError(ValueError):
    """Two aggregation states built under different configurations."""


class NgramRecord(NamedTuple):
    """One validated corpus line."""

    tokens: tuple[str, ...]
    year: int
    match_count: int
    volume_count: int


class BigramObservation(NamedTuple):
    """A ``word .`` bigram reduced to its with-period counts."""

    word: str
    year: int
    match_count: int
    volume_count: int


@dataclass(frozen=True)
class YearlyUsage:
    year: int
    with_period: int
    total: int
    volumes_with_period: int


@dataclass
class WordProfile:
    """Per-word yearly usage plus aggregates over the analysis window.

    `series` holds every retained year (normalized so with_period never
    exceeds total); the scalar aggregates cover `window` only.
    """

    word: str
    series: dict[int, YearlyUsage]
    window: tuple[int, int]
    n_total: int = 0
    N_total: int = 0
    median_share: Fraction | None = None
    active_years: int = 0
    volumes_total: int = 0
    clamped_years: int = 0
    filled_years: int = 0

    @property
    def flags(self) -> frozenset[str]:
        if self.clamped_years or self.filled_years:
            return frozenset({FLAG_CLAMPED})
        return frozenset()


@dataclass(frozen=True)
class IngestConfig:
    """Everything that shapes aggregation; merge requires exact equality."""

    year_min: int = DEFAULT_WINDOW[0]
    year_max: int = DEFAULT_WINDOW[1]
    scripts: tuple[str, ...] = ("cyrillic", "latin")
    case_fold: bool = False
    year_floor: int = 1500
    year_ceiling: int = 2100

    def __post_init__(self) -> None:
        if self.year_min > self.year_max:
            raise ValueError(f"empty year window {self.year_min}..{self.year_max}")
        unknown = [s for s in self.scripts if s not in SCRIPT_RANGES]
        if unknown:
            raise ValueError(f"unknown scripts: {unknown}; known: {sorted(SCRIPT_RANGES)}")
        object.__setattr__(self, "scripts", tuple(sorted(self.scripts)))

    def letter_ranges(self) -> tuple[tuple[int, int], ...]:
        ranges: list[tuple[int, int]] = []
        for script in self.scripts:
            ranges.extend(SCRIPT_RANGES[script])
        return tuple(ranges)


@dataclass
class IngestCounters:
    lines_parsed: int = 0
    lines_skipped: int = 0

    def update(self, other: "IngestCounters") -> None:
        self.lines_parsed += other.lines_parsed
        self.lines_skipped += other.lines_skipped


def parse_line(
    line: str,
    line_number: int = 0,
    year_floor: int = 1500,
    year_ceiling: int = 2100,
) -> NgramRecord:
    """Parse one corpus line into a validated NgramRecord.

    Raises ParseError (carrying the line number) on wrong field count,
    non-integer numerics, or invariant violations; skip-versus-abort is
    the caller's policy.
    """
    fields = line.rstrip("\n").rstrip("\r").split("\t")
    if len(fields) != 4:
        raise ParseError(f"expected 4 tab-separated fields, got {len(fields)}", line_number)
    ngram, year_s, match_s, volume_s = fields
    tokens = tuple(ngram.split(" "))
    if len(tokens) > 2:
        raise ParseError(f"ngram has {len(tokens)} tokens, expected 1 or 2", line_number)
    if any(not tok for tok in tokens):
        raise ParseError("empty token in ngram field", line_number)
    try:
        year = int(year_s)
        match_count = int(match_s)
        volume_count = int(volume_s)
    except ValueError:
        raise ParseError(f"non-integer count fields: {year_s!r}/{match_s!r}/{volume_s!r}", line_number) from None
    if not year_floor <= year <= year_ceiling:
        raise ParseError(f"year {year} outside plausible range {year_floor}..{year_ceiling}", line_number)
    if match_count < 0:
        raise ParseError(f"negative match_count {match_count}", line_number)
    if volume_count < 1:
        raise ParseError(f"volume_count must be >= 1, got {volume_count}", line_number)
    if volume_count > match_count:
        raise ParseError(f"volume_count {volume_count} exceeds match_count {match_count}", line_number)
    return NgramRecord(tokens, year, match_count, volume_count)


def is_candidate_word(word: str, letter_ranges: Sequence[tuple[int, int]]) -> bool:
    """True when every character is a letter from one of the admitted
    codepoint ranges (rejects digits, punctuation, POS-tag underscores)."""
    if not word:
        return False
    for ch in word:
        if not ch.isalpha():
            return False
        cp = ord(ch)
        if not any(lo <= cp <= hi for lo, hi in letter_ranges):
            return False
    return True


def classify_bigram(
    record: NgramRecord,
    letter_ranges: Sequence[tuple[int, int]] | None = None,
    case_fold: bool = False,
) -> BigramObservation | None:
    """Reduce a 2-token record to a with-period observation, or None.

    Matches exactly the shape ``word .`` where the word passes the
    letter-class filter; anything else (commas, numerals, tagged tokens)
    yields None rather than an error.
    """
    if len(record.tokens) != 2:
        raise ValueError(f"classify_bigram needs a 2-token record, got {len(record.tokens)}")
    if letter_ranges is None:
        letter_ranges = IngestConfig().letter_ranges()
    first, second = record.tokens
    if second != ".":
        return None
    if not is_candidate_word(first, letter_ranges):
        return None
    word = first.lower() if case_fold else first
    return BigramObservation(word, record.year, record.match_count, record.volume_count)


def open_text(path: str | Path) -> io.TextIOBase:
    """Open a corpus file for reading; gzip is detected by suffix."""
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, "r", encoding="utf-8")


class Aggregator:
    """Mergeable accumulator of per-word yearly counts.

    Raw counts live in ``word -> year -> [with_period, total, volumes]``;
    normalization and derived statistics happen only in finalize, so
    merging shards first and finalizing once is equivalent to a single
    sequential pass.
    """

    def __init__(self, config: IngestConfig | None = None):
        self.config = config or IngestConfig()
        self.counters = IngestCounters()
        self.fingerprints: dict[str, str] = {}
        self._counts: dict[str, dict[int, list[int]]] = {}
        self._ranges = self.config.letter_ranges()

    # -- building ---------------------------------------------------------

    def add_record(self, record: NgramRecord) -> None:
        if not self.config.year_min <= record.year <= self.config.year_max:
            return
        if len(record.tokens) == 1:
            word = record.tokens[0]
            if not is_candidate_word(word, self._ranges):
                return
            if self.config.case_fold:
                word = word.lower()
            cell = self._cell(word, record.year)
            cell[1] += record.match_count
        elif len(record.tokens) == 2:
            obs = classify_bigram(record, self._ranges, self.config.case_fold)
            if obs is None:
                return
            cell = self._cell(obs.word, obs.year)
            cell[0] += obs.match_count
            cell[2] += obs.volume_count

    def _cell(self, word: str, year: int) -> list[int]:
        years = self._counts.get(word)
        if years is None:
            years = self._counts[word] = {}
        cell = years.get(year)
        if cell is None:
            cell = years[year] = [0, 0, 0]
        return cell

    def consume_lines(self, lines: Iterable[str], on_error: str = "skip") -> None:
        if on_error not in ("skip", "abort"):
            raise ValueError(f"on_error must be 'skip' or 'abort', got {on_error!r}")
        floor, ceiling = self.config.year_floor, self.config.year_ceiling
        for line_number, line in enumerate(lines, 1):
            if not line or line == "\n":
                continue
            try:
                record = parse_line(line, line_number, floor, ceiling)
            except ParseError:
                if on_error == "abort":
                    raise
                self.counters.lines_skipped += 1
                continue
            self.counters.lines_parsed += 1
            self.add_record(record)

    def consume_path(self, path: str | Path, on_error: str = "skip") -> None:
        with open_text(path) as handle:
            self.consume_lines(handle, on_error)

    def fingerprint_path(self, path: str | Path) -> None:
        digest = hashlib.sha256()
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 20), b""):
                digest.update(chunk)
        self.fingerprints[str(path)] = digest.hexdigest()

    # -- merging ----------------------------------------------------------

    def update(self, other: "Aggregator") -> None:
        """Fold another shard into this one; configs must match exactly."""
        if self.config != other.config:
            raise ConfigMismatchError(
                f"cannot merge aggregates built with different configs: "
                f"{self.config} vs {other.config}"
            )
        for word, years in other._counts.items():
            mine = self._counts.get(word)
            if mine is None:
                self._counts[word] = {year: list(cell) for year, cell in years.items()}
                continue
            for year, cell in years.items():
                existing = mine.get(year)
                if existing is None:
                    mine[year] = list(cell)
                else:
                    existing[0] += cell[0]
                    existing[1] += cell[1]
                    existing[2] += cell[2]
        self.counters.update(other.counters)
        self.fingerprints.update(other.fingerprints)

    # -- finalizing -------------------------------------------------------

    def finalize(self, window: tuple[int, int] | None = None) -> dict[str, WordProfile]:
        """Normalize counts and compute per-word aggregates over `window`
        (default: the ingestion window).

        Normalization never drops data: with_period greater than total is
        clamped down (the external corpus thresholds 1-grams and 2-grams
        independently), and a with-period year lacking any unigram count
        gets total set to with_period.  Both fixups flag the word.
        """
        if window is None:
            window = (self.config.year_min, self.config.year_max)
        lo, hi = window
        profiles: dict[str, WordProfile] = {}
        for word, years in self._counts.items():
            series: dict[int, YearlyUsage] = {}
            clamped = 0
            filled = 0
            n_total = 0
            t_total = 0
            volumes = 0
            active = 0
            shares: list[Fraction] = []
            for year in sorted(years):
                with_period, total, vols = years[year]
                if total == 0 and with_period > 0:
                    total = with_period
                    filled += 1
                elif with_period > total:
                    with_period = total
                    clamped += 1
                series[year] = YearlyUsage(year, with_period, total, vols)
                if lo <= year <= hi:
                    n_total += with_period
                    t_total += total
                    volumes += vols
                    if total > 0:
                        active += 1
                        shares.append(Fraction(with_period, total))
            profiles[word] = WordProfile(
                word=word,
                series=series,
                window=window,
                n_total=n_total,
                N_total=t_total,
                median_share=_median(shares),
                active_years=active,
                volumes_total=volumes,
                clamped_years=clamped,
                filled_years=filled,
            )
        return profiles

    def quality_counts(self) -> dict[str, int]:
        """Clamp/fill totals over all retained years (diagnostics)."""
        clamped = 0
        filled = 0
        for years in self._counts.values():
            for with_period, total, _ in years.values():
                if total == 0 and with_period > 0:
                    filled += 1
                elif with_period > total:
                    clamped += 1
        return {"clamped_years": clamped, "filled_years": filled}

    # -- persistence ------------------------------------------------------

    STATE_FORMAT = "abbrevkit-aggregate"
    STATE_VERSION = 1

    def to_state(self) -> dict:
        return {
            "format": self.STATE_FORMAT,
            "version": self.STATE_VERSION,
            "config": {
                "year_min": self.config.year_min,
                "year_max": self.config.year_max,
                "scripts": list(self.config.scripts),
                "case_fold": self.config.case_fold,
                "year_floor": self.config.year_floor,
                "year_ceiling": self.config.year_ceiling,
            },
            "counters": {
                "lines_parsed": self.counters.lines_parsed,
                "lines_skipped": self.counters.lines_skipped,
            },
            "fingerprints": dict(self.fingerprints),
            "words": {
                word: {str(year): cell for year, cell in years.items()}
                for word, years in self._counts.items()
            },
        }

    @classmethod
    def from_state(cls, state: dict) -> "Aggregator":
        if state.get("format") != cls.STATE_FORMAT:
            raise ValueError(f"not an aggregate state file: format={state.get('format')!r}")
        if state.get("version") != cls.STATE_VERSION:
            raise ValueError(f"unsupported aggregate state version {state.get('version')!r}")
        agg = cls(IngestConfig(**state["config"]))
        agg.counters = IngestCounters(**state["counters"])
        agg.fingerprints = dict(state.get("fingerprints", {}))
        agg._counts = {
            word: {int(year): list(cell) for year, cell in years.items()}
            for word, years in state["words"].items()
        }
        return agg

    def save(self, path: str | Path) -> None:
        payload = json.dumps(
            self.to_state(), ensure_ascii=False, sort_keys=True, separators=(",", ":")
        ) + "\n"
        path = Path(path)
        if path.suffix == ".gz":
            # fixed mtime and no embedded name keep rebuilt archives byte-identical
            with open(path, "wb") as raw:
                with gzip.GzipFile(filename="", fileobj=raw, mode="wb", mtime=0) as handle:
                    handle.write(payload.encode("utf-8"))
        else:
            path.write_text(payload, encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Aggregator":
        path = Path(path)
        if path.suffix == ".gz":
            with gzip.open(path, "rt", encoding="utf-8") as handle:
                state = json.load(handle)
        else:
            state = json.loads(path.read_text(encoding="utf-8"))
        return cls.from_state(state)


def _median(values: list[Fraction]) -> Fraction | None:
    if not values:
        return None
    ordered = sorted(values)
    mid, odd = divmod(len(ordered), 2)
    if odd:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2


def merge(a: Aggregator, b: Aggregator) -> Aggregator:
    """Combine two aggregation states into a new one (commutative,
    associative, with the empty aggregator as identity)."""
    out = Aggregator(a.config)
    out.update(a)
    out.update(b)
    return out


def aggregate(records: Iterable[NgramRecord], config: IngestConfig | None = None) -> dict[str, WordProfile]:
    """One-shot aggregation of already-parsed records into profiles."""
    agg = Aggregator(config)
    for record in records:
        agg.add_record(record)
    return agg.finalize()


def _ingest_worker(payload: tuple[dict, list[str], str]) -> Aggregator:
    config_kwargs, paths, on_error = payload
    agg = Aggregator(IngestConfig(**config_kwargs))
    for path in paths:
        agg.fingerprint_path(path)
        agg.consume_path(path, on_error)
    return agg


def ingest_paths(
    unigram_paths: Sequence[str | Path],
    bigram_paths: Sequence[str | Path],
    config: IngestConfig | None = None,
    jobs: int = 1,
    on_error: str = "skip",
) -> Aggregator:
    """Ingest all shards, optionally in parallel, and return the merged
    aggregation state.  Results are independent of the job count.
    """
    config = config or IngestConfig()
    paths = [str(p) for p in unigram_paths] + [str(p) for p in bigram_paths]
    if not paths:
        raise ValueError("no input files to ingest")
    config_kwargs = {
        "year_min": config.year_min,
        "year_max": config.year_max,
        "scripts": config.scripts,
        "case_fold": config.case_fold,
        "year_floor": config.year_floor,
        "year_ceiling": config.year_ceiling,
    }
    if jobs <= 1 or len(paths) == 1:
        return _ingest_worker((config_kwargs, paths, on_error))
    chunks: list[list[str]] = [[] for _ in range(min(jobs, len(paths)))]
    for index, path in enumerate(paths):
        chunks[index % len(chunks)].append(path)
    with multiprocessing.Pool(len(chunks)) as pool:
        shards: Iterator[Aggregator] = pool.imap_unordered(
            _ingest_worker, [(config_kwargs, chunk, on_error) for chunk in chunks]
        )
        merged = Aggregator(config)
        for shard in shards:
            merged.update(shard)
    return merged
