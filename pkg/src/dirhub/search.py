"""Multi-mode search over directories and article metadata.

Queries are split on the exact connective " and " (one space each side);
every resulting term must match for a hit (conjunction). Matching is
case-insensitive substring containment: directory modes match against the
full navigator-bar text, article modes against title and abstract.

Because terms are free substrings (they may span word boundaries and contain
spaces), a token-keyed inverted index cannot answer them soundly; the index
here is a memoized lowercased-text cache per entity, rebuilt from the store
whenever a fresh service is constructed (names and article text are
immutable, so entries never go stale, only away).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import EmptyQuery, EmptyTerm, InvalidMode
from .authz import Right
from .tree import DirState, NavigatorBar

if TYPE_CHECKING:
    from .authz import Authorizer
    from .store import Store
    from .tree import TreeStore

CONNECTIVE = " and "


class SearchMode(Enum):
    DIR = "DIR"
    KEY = "KEY"
    MY_DIR = "MY_DIR"
    MY_KEY = "MY_KEY"
    MY_ALL_DIR = "MY_ALL_DIR"

    @classmethod
    def from_wire(cls, value: str) -> SearchMode:
        try:
            return cls(value)
        except ValueError:
            raise InvalidMode(f"unknown search mode: {value!r}") from None


ARTICLE_MODES = frozenset({SearchMode.KEY, SearchMode.MY_KEY})
OWNED_ONLY_MODES = frozenset({SearchMode.MY_DIR, SearchMode.MY_ALL_DIR})


@dataclass
class Query:
    terms: list[str]
    mode: SearchMode
    requester: str


@dataclass
class SearchHit:
    bar: NavigatorBar
    directory_id: str
    article_id: str | None = None
    article_url: str | None = None
    title: str | None = None


def parse_query(raw: str) -> list[str]:
    """Split a raw query on the exact " and " connective.

    Each side is trimmed and must be non-empty. A query without the
    connective is a single (possibly multi-word) term; "android" stays whole.
    """
    if raw is None or not raw.strip():
        raise EmptyQuery("query must be non-empty")
    terms = []
    for part in raw.strip().split(CONNECTIVE):
        term = part.strip()
        if not term:
            raise EmptyTerm("empty term beside the 'and' connective")
        terms.append(term)
    return terms


class SearchService:
    def __init__(self, store: Store, tree: TreeStore, authz: Authorizer):
        self._store = store
        self._tree = tree
        self._authz = authz
        self._dir_text: dict[str, str] = {}
        self._article_text: dict[str, tuple[str, str]] = {}

    def reindex(self, scope: str = "full") -> None:
        """Drop the memoized text cache; it repopulates on demand."""
        if scope not in ("full", "directory", "article"):
            raise ValueError(f"unknown reindex scope: {scope!r}")
        if scope in ("full", "directory"):
            self._dir_text.clear()
        if scope in ("full", "article"):
            self._article_text.clear()

    def _bar_text(self, dir_id: str) -> str:
        text = self._dir_text.get(dir_id)
        if text is None:
            text = self._tree.navigator_path(dir_id).text.casefold()
            self._dir_text[dir_id] = text
        return text

    def _article_texts(self, article_id: str) -> tuple[str, str]:
        texts = self._article_text.get(article_id)
        if texts is None:
            article = self._store.articles[article_id]
            texts = (article.title.casefold(), article.abstract.casefold())
            self._article_text[article_id] = texts
        return texts

    def _chain_active(self, dir_id: str) -> bool:
        return all(d.state is DirState.ACTIVE for d in self._tree.chain(dir_id))

    def execute_search(self, query: Query) -> list[SearchHit]:
        """Run one query; results are deterministically ordered and already
        permission-filtered (ShowDir on every hit directory, plus Read for
        article modes). Trashed subtrees never match."""
        mode = query.mode
        if not isinstance(mode, SearchMode):
            raise InvalidMode(f"unknown search mode: {mode!r}")
        terms = [t.casefold() for t in query.terms]
        if not terms and mode is not SearchMode.MY_ALL_DIR:
            raise EmptyQuery("query must be non-empty")

        with self._store.lock:
            if mode in ARTICLE_MODES:
                return self._search_articles(terms, mode, query.requester)
            return self._search_directories(terms, mode, query.requester)

    def search(self, raw: str, mode: SearchMode, requester: str) -> list[SearchHit]:
        """Parse-and-run convenience used by the API layer. MY_ALL_DIR
        accepts a blank query ("everything I own")."""
        if mode is SearchMode.MY_ALL_DIR and (raw is None or not raw.strip()):
            terms: list[str] = []
        else:
            terms = parse_query(raw)
        return self.execute_search(Query(terms=terms, mode=mode, requester=requester))

    def _search_directories(self, terms: list[str], mode: SearchMode, requester: str) -> list[SearchHit]:
        hits = []
        for dir_id, d in self._store.dirs.items():
            if mode in OWNED_ONLY_MODES and d.owner != requester:
                continue
            if not self._chain_active(dir_id):
                continue
            text = self._bar_text(dir_id)
            if not all(term in text for term in terms):
                continue
            if not self._authz.check_right(requester, dir_id, Right.SHOW_DIR):
                continue
            hits.append(SearchHit(bar=self._tree.navigator_path(dir_id), directory_id=dir_id))
        hits.sort(key=lambda h: (h.bar.text.casefold(), h.directory_id))
        return hits

    def _search_articles(self, terms: list[str], mode: SearchMode, requester: str) -> list[SearchHit]:
        hits = []
        for article_id, article in self._store.articles.items():
            if mode is SearchMode.MY_KEY and article.author != requester:
                continue
            if not self._chain_active(article.directory):
                continue
            title, abstract = self._article_texts(article_id)
            if not all(term in title or term in abstract for term in terms):
                continue
            if not self._authz.check_right(requester, article.directory, Right.SHOW_DIR):
                continue
            if not self._authz.check_right(requester, article.directory, Right.READ):
                continue
            hits.append(
                SearchHit(
                    bar=self._tree.navigator_path(article.directory),
                    directory_id=article.directory,
                    article_id=article_id,
                    article_url=article.url,
                    title=article.title,
                )
            )
        hits.sort(key=lambda h: (-self._store.articles[h.article_id].published_at, h.article_id))
        return hits
