from .base import BALL_BUDGET, GroupPreset, HalfSpace, TooLarge, UnknownGenerator
from .presets import PresetError, from_spec, is_euclidean_factor
from .product import Product, ProductWall
from .raag import RAAG, FreeAbelian, FreeGroup, RaagWall, pentagon
from .search import (
    DEFAULT_RADIUS,
    Essentiality,
    EssentialityReport,
    FreeReport,
    NotNested,
    PingPongTable,
    TableInvalid,
    Truncation,
    build_table,
    double_skewer_search,
    essentiality,
    facing_tuple_search,
    flip_search,
    orbit,
    ping_pong_verify,
    truncate,
)


def normal_form(preset: GroupPreset, word):
    """Canonical element for a word given as text or as a letter sequence."""
    if isinstance(word, str):
        return preset.parse(word)
    return preset.word(word)


def side(preset: GroupPreset, vertex, wall) -> int:
    return preset.side(vertex, wall)


def ball(preset: GroupPreset, k: int, budget: int = BALL_BUDGET) -> list:
    return preset.ball(k, budget)
