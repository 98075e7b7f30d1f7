"""Score metrics and the cross-variant score table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def final_score(episode_scores) -> float:
    """Mean of the last min(100, N) episode scores; 0.0 for an empty log."""
    scores = list(episode_scores)
    if not scores:
        return 0.0
    window = scores[-100:]
    return sum(window) / len(window)


def normalized_score(raw: float, total: float) -> float:
    """Raw score divided by the game's total achievable score (total > 0)."""
    if total <= 0:
        raise ValueError("total score must be positive")
    return raw / total


@dataclass
class ScoreCell:
    game: str
    variant: str
    seed: int
    final: float
    max_seen: float
    episodes: int


@dataclass
class ScoreTable:
    """Per-(game, variant, seed) results plus per-variant aggregates."""

    max_scores: dict[str, float]
    cells: list[ScoreCell] = field(default_factory=list)

    def add(self, cell: ScoreCell) -> None:
        self.cells.append(cell)

    def games(self) -> list[str]:
        seen: list[str] = []
        for c in self.cells:
            if c.game not in seen:
                seen.append(c.game)
        return seen

    def variants(self) -> list[str]:
        seen: list[str] = []
        for c in self.cells:
            if c.variant not in seen:
                seen.append(c.variant)
        return seen

    def cell_mean(self, game: str, variant: str) -> tuple[float, float, list[float]]:
        """Mean final, mean max-seen, and per-seed maxima for one table cell."""
        rows = [c for c in self.cells if c.game == game and c.variant == variant]
        if not rows:
            raise KeyError(f"no runs for {game}/{variant}")
        finals = [c.final for c in rows]
        maxima = [c.max_seen for c in rows]
        return sum(finals) / len(finals), sum(maxima) / len(maxima), maxima

    def variant_normalized_mean(self, variant: str) -> tuple[float, float]:
        """Average normalized final/max scores of a variant across games."""
        finals, maxima = [], []
        for game in self.games():
            f, m, _ = self.cell_mean(game, variant)
            finals.append(normalized_score(f, self.max_scores[game]))
            maxima.append(normalized_score(m, self.max_scores[game]))
        return sum(finals) / len(finals), sum(maxima) / len(maxima)

    def render_text(self) -> str:
        games = self.games()
        variants = self.variants()
        width = max([len(g) for g in games] + [9])
        header = ["game".ljust(width)] + [v.center(15) for v in variants] + ["  max"]
        lines = [" | ".join(header)]
        lines.append("-+-".join("-" * len(h) for h in header))
        for game in games:
            row = [game.ljust(width)]
            for v in variants:
                f, m, _ = self.cell_mean(game, v)
                row.append(f"{f:6.2f} / {m:6.2f}")
            row.append(f"{self.max_scores[game]:5.1f}")
            lines.append(" | ".join(row))
        norm = ["avg. norm".ljust(width)]
        for v in variants:
            nf, nm = self.variant_normalized_mean(v)
            norm.append(f"{nf:6.3f} / {nm:5.3f} ")
        norm.append("     ")
        lines.append(" | ".join(norm))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "max_scores": self.max_scores,
            "cells": [{"game": c.game, "variant": c.variant, "seed": c.seed,
                       "final": c.final, "max_seen": c.max_seen,
                       "episodes": c.episodes} for c in self.cells],
            "aggregates": {},
        }
        for game in self.games():
            for v in self.variants():
                f, m, maxima = self.cell_mean(game, v)
                payload["aggregates"][f"{game}/{v}"] = {
                    "mean_final": f, "mean_max_seen": m, "per_seed_max": maxima,
                    "normalized_final": normalized_score(f, self.max_scores[game]),
                }
        for v in self.variants():
            nf, nm = self.variant_normalized_mean(v)
            payload["aggregates"][f"norm/{v}"] = {"final": nf, "max_seen": nm}
        return json.dumps(payload, indent=2, sort_keys=True)
