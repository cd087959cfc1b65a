"""Shared fixture builders for the test suite."""
from __future__ import annotations

from abbrevkit.ingest import Aggregator, IngestConfig, NgramRecord, WordProfile


def build_profiles(
    counts: dict[str, dict[int, tuple]],
    config: IngestConfig | None = None,
    window: tuple[int, int] | None = None,
) -> dict[str, WordProfile]:
    """Aggregate synthetic counts through the real ingestion path.

    counts maps word -> year -> (with_period, total) or
    (with_period, total, volumes_with_period).
    """
    agg = Aggregator(config or IngestConfig())
    for word, years in counts.items():
        for year, cell in years.items():
            with_period, total = cell[0], cell[1]
            volumes = cell[2] if len(cell) > 2 else max(1, with_period)
            if total > 0:
                agg.add_record(NgramRecord((word,), year, total, max(1, min(total, total // 10 + 1))))
            if with_period > 0:
                agg.add_record(NgramRecord((word, "."), year, with_period, max(1, min(with_period, volumes))))
    return agg.finalize(window)


def profile_of(
    word: str,
    years: dict[int, tuple],
    config: IngestConfig | None = None,
    window: tuple[int, int] | None = None,
) -> WordProfile:
    return build_profiles({word: years}, config, window)[word]
