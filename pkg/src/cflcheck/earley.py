"""Earley recognition over arbitrary context-free grammars.

The grammar is compiled once into a per-variable trie of right-hand sides,
so rules sharing a prefix (``S -> T T c1 ...``, ``S -> T T c2 ...``) are a
single Earley item until they diverge.  Variables whose rules are all single
terminals or other such variables ("lexical" variables, e.g. ``DIGIT``) are
folded into character sets and scanned directly instead of being predicted.
Neither transformation changes the recognized language.

Nullable variables are handled with the Aycock-Horspool rule: predicting a
nullable variable also advances over it.  Worst-case time is cubic in the
word length, as for textbook Earley.
"""

from __future__ import annotations

from typing import Iterable

from cflcheck.grammar import Grammar, Var, format_symbol


class AlphabetError(ValueError):
    """Input symbol is not in the grammar's terminal alphabet."""

    def __init__(self, symbol: str, position: int):
        super().__init__(f"symbol {format_symbol(symbol)} at position {position} is not in the alphabet")
        self.symbol = symbol
        self.position = position


def _lexical_sets(g: Grammar) -> dict[str, frozenset[str]]:
    by_lhs: dict[str, list] = {}
    for r in g.rules:
        by_lhs.setdefault(r.lhs, []).append(r.rhs)
    cand = {v for v, rhss in by_lhs.items() if all(len(rhs) == 1 for rhs in rhss)}
    changed = True
    while changed:
        changed = False
        for v in list(cand):
            for (s,) in by_lhs[v]:
                if isinstance(s, Var) and s.name not in cand:
                    cand.discard(v)
                    changed = True
                    break
    sets = {v: set() for v in cand}
    changed = True
    while changed:
        changed = False
        for v in cand:
            acc = sets[v]
            before = len(acc)
            for (s,) in by_lhs[v]:
                if isinstance(s, Var):
                    acc |= sets[s.name]
                else:
                    acc.add(s)
            changed |= len(acc) != before
    return {v: frozenset(cs) for v, cs in sets.items()}


def _nullable(g: Grammar) -> set[str]:
    null: set[str] = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.lhs in null:
                continue
            if all(isinstance(s, Var) and s.name in null for s in r.rhs):
                null.add(r.lhs)
                changed = True
    return null


class _Set:
    __slots__ = ("items", "seen", "wait", "scan", "accept")

    def __init__(self):
        self.items: list[tuple[int, int]] = []
        self.seen: set[tuple[int, int]] = set()
        self.wait: dict[int, list[tuple[int, int]]] = {}
        self.scan: list[tuple[int, int]] = []
        self.accept = False


class Recognizer:
    """Compiled membership tester for one grammar.  Immutable after init."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.alphabet = grammar.terminals
        # variables referenced without rules simply derive nothing
        referenced = {s.name for r in grammar.rules for s in r.rhs if isinstance(s, Var)}
        names = sorted(grammar.variables | referenced | {grammar.start})
        self._var_index = {v: i for i, v in enumerate(names)}
        lexical = _lexical_sets(grammar)
        nullable = _nullable(grammar)
        self._nullable = [v in nullable for v in names]
        self._start = self._var_index[grammar.start]

        lhs: list[int] = []
        final: list[bool] = []
        term: list[dict[str, int]] = []
        cls: list[list[tuple[frozenset[str], int]]] = []
        vedges: list[list[tuple[int, int]]] = []
        keys: list[dict] = []

        def new_node(var: int) -> int:
            lhs.append(var)
            final.append(False)
            term.append({})
            cls.append([])
            vedges.append([])
            keys.append({})
            return len(lhs) - 1

        self._root = [new_node(i) for i in range(len(names))]
        for r in grammar.rules:
            node = self._root[self._var_index[r.lhs]]
            for s in r.rhs:
                if isinstance(s, Var):
                    key = ("c", s.name) if s.name in lexical else ("v", s.name)
                else:
                    key = ("t", s)
                child = keys[node].get(key)
                if child is None:
                    child = new_node(lhs[node])
                    keys[node][key] = child
                    if key[0] == "t":
                        term[node][s] = child
                    elif key[0] == "c":
                        cls[node].append((lexical[s.name], child))
                    else:
                        vedges[node].append((self._var_index[s.name], child))
                node = child
            final[node] = True
        self._lhs = lhs
        self._final = final
        self._term = term
        self._cls = cls
        self._vedges = vedges
        self._scans = [bool(t) or bool(c) for t, c in zip(term, cls)]
        self.node_count = len(lhs)

    # -- chart construction ------------------------------------------------

    def _close(self, sets: list[_Set], k: int) -> None:
        S = sets[k]
        items, seen, wait, scan = S.items, S.seen, S.wait, S.scan
        final, lhs, vedges, scans = self._final, self._lhs, self._vedges, self._scans
        root, nullable, start = self._root, self._nullable, self._start
        i = 0
        while i < len(items):
            node, origin = items[i]
            i += 1
            if scans[node]:
                scan.append((node, origin))
            if final[node]:
                var = lhs[node]
                if origin == 0 and var == start:
                    S.accept = True
                waiting = (wait if origin == k else sets[origin].wait).get(var)
                if waiting:
                    for item in list(waiting):
                        if item not in seen:
                            seen.add(item)
                            items.append(item)
            for var, child in vedges[node]:
                adv = (child, origin)
                lst = wait.get(var)
                if lst is None:
                    wait[var] = [adv]
                else:
                    lst.append(adv)
                item = (root[var], k)
                if item not in seen:
                    seen.add(item)
                    items.append(item)
                if nullable[var] and adv not in seen:
                    seen.add(adv)
                    items.append(adv)

    def _initial(self) -> list[_Set]:
        S = _Set()
        item = (self._root[self._start], 0)
        S.items.append(item)
        S.seen.add(item)
        sets = [S]
        self._close(sets, 0)
        return sets

    def _step(self, sets: list[_Set], ch: str) -> _Set:
        prev = sets[-1]
        nxt = _Set()
        sets.append(nxt)
        if not prev.scan:
            return nxt
        items, seen = nxt.items, nxt.seen
        term, cls = self._term, self._cls
        for node, origin in prev.scan:
            child = term[node].get(ch)
            if child is not None:
                item = (child, origin)
                if item not in seen:
                    seen.add(item)
                    items.append(item)
            for cs, child in cls[node]:
                if ch in cs:
                    item = (child, origin)
                    if item not in seen:
                        seen.add(item)
                        items.append(item)
        if items:
            self._close(sets, len(sets) - 1)
        return nxt

    def check_alphabet(self, word: str) -> None:
        alphabet = self.alphabet
        for pos, ch in enumerate(word):
            if ch not in alphabet:
                raise AlphabetError(ch, pos)

    def accepts(self, word: str) -> bool:
        self.check_alphabet(word)
        sets = self._initial()
        for ch in word:
            if not self._step(sets, ch).items:
                return False
        return sets[-1].accept

    def chart(self) -> Chart:
        return Chart(self)


class Chart:
    """Incremental recognition state for prefix-sharing enumeration.

    ``feed`` extends the current prefix by one symbol; ``rewind(n)`` drops
    back to the state after the first ``n`` symbols.
    """

    def __init__(self, recognizer: Recognizer):
        self._rec = recognizer
        self._sets = recognizer._initial()

    def __len__(self) -> int:
        return len(self._sets) - 1

    def feed(self, ch: str, strict: bool = True) -> bool:
        """With ``strict=False`` an out-of-alphabet symbol kills the chart
        instead of raising."""
        if ch not in self._rec.alphabet:
            if strict:
                raise AlphabetError(ch, len(self))
            self._sets.append(_Set())
            return False
        return bool(self._rec._step(self._sets, ch).items)

    def rewind(self, length: int) -> None:
        del self._sets[length + 1 :]

    @property
    def alive(self) -> bool:
        return bool(self._sets[-1].items)

    @property
    def accepting(self) -> bool:
        return self._sets[-1].accept


def cfg_membership(g: Grammar, w: str) -> bool:
    """True iff the start variable of ``g`` derives ``w``."""
    return g.recognizer.accepts(w)


def intersect_membership(gs: Iterable[Grammar], w: str) -> bool:
    """Membership in the intersection of the languages; stops at the first miss."""
    return all(cfg_membership(g, w) for g in gs)
