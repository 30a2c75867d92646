"""Query parsing and compilation to a minimal DFA over labels and inverses.

The surface grammar (caret prefix for inverse labels, whitespace for
concatenation) is parsed into a small regex AST, which is compiled through
Thompson construction, epsilon-closure subset construction, and Hopcroft
minimisation into an automaton whose transitions are stored as one Boolean
matrix per (label, inverted) symbol. Epsilon edges exist only inside the
Thompson intermediate; the compiled automaton never has them.
"""

import re
from collections import deque
from dataclasses import dataclass, field

from .sparse_bool import SparseBoolMatrix, transpose

# A query symbol: label name plus whether the edge is traversed backwards.
Symbol = tuple[str, bool]


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Label:
    name: str
    inverted: bool = False


@dataclass(frozen=True)
class Concat:
    children: tuple


@dataclass(frozen=True)
class Alt:
    children: tuple


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Plus:
    child: object


@dataclass(frozen=True)
class Opt:
    child: object


RegexAst = Label | Concat | Alt | Star | Plus | Opt


def ast_symbols(ast: RegexAst) -> list[Symbol]:
    """All (label, inverted) symbols in the tree, sorted."""
    out: set[Symbol] = set()

    def walk(node):
        if isinstance(node, Label):
            out.add((node.name, node.inverted))
        elif isinstance(node, (Concat, Alt)):
            for c in node.children:
                walk(c)
        else:
            walk(node.child)

    walk(ast)
    return sorted(out)


def reverse_ast(ast: RegexAst) -> RegexAst:
    """AST of the reversed language: words read right-to-left with every
    symbol inverted."""
    if isinstance(ast, Label):
        return Label(ast.name, not ast.inverted)
    if isinstance(ast, Concat):
        return Concat(tuple(reverse_ast(c) for c in reversed(ast.children)))
    if isinstance(ast, Alt):
        return Alt(tuple(reverse_ast(c) for c in ast.children))
    if isinstance(ast, Star):
        return Star(reverse_ast(ast.child))
    if isinstance(ast, Plus):
        return Plus(reverse_ast(ast.child))
    return Opt(reverse_ast(ast.child))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class QueryParseError(ValueError):
    """Syntax error; ``position`` is the 1-based column in the pattern."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (column {position})")
        self.position = position


_LABEL_RE = re.compile(r"[A-Za-z0-9_:.]+")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        pos = i + 1
        if ch in "|()*+?":
            tokens.append((ch, ch, pos))
            i += 1
        elif ch == "^":
            tokens.append(("^", ch, pos))
            i += 1
        elif ch == "'":
            end = text.find("'", i + 1)
            if end < 0:
                raise QueryParseError("unterminated quoted label", pos)
            name = text[i + 1 : end]
            if not name:
                raise QueryParseError("empty quoted label", pos)
            tokens.append(("LABEL", name, pos))
            i = end + 1
        else:
            m = _LABEL_RE.match(text, i)
            if not m:
                raise QueryParseError(f"unexpected character {ch!r}", pos)
            tokens.append(("LABEL", m.group(), pos))
            i = m.end()
    tokens.append(("EOF", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> RegexAst:
        if self.peek()[0] == "EOF":
            raise QueryParseError("empty pattern", 1)
        ast = self.alt()
        kind, value, pos = self.peek()
        if kind != "EOF":
            raise QueryParseError(f"unexpected {value!r}", pos)
        return ast

    def alt(self) -> RegexAst:
        branches = [self.concat()]
        while self.peek()[0] == "|":
            self.advance()
            branches.append(self.concat())
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def concat(self) -> RegexAst:
        parts = [self.closure()]
        while self.peek()[0] in ("LABEL", "^", "("):
            parts.append(self.closure())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def closure(self) -> RegexAst:
        node = self.atom()
        kind = self.peek()[0]
        if kind == "*":
            self.advance()
            return Star(node)
        if kind == "+":
            self.advance()
            return Plus(node)
        if kind == "?":
            self.advance()
            return Opt(node)
        return node

    def atom(self) -> RegexAst:
        kind, value, pos = self.advance()
        if kind == "LABEL":
            return Label(value)
        if kind == "^":
            nkind, nvalue, npos = self.advance()
            if nkind != "LABEL":
                raise QueryParseError("expected label after '^'", npos)
            return Label(nvalue, inverted=True)
        if kind == "(":
            ast = self.alt()
            ckind, cvalue, cpos = self.advance()
            if ckind != ")":
                raise QueryParseError("expected ')'", cpos)
            return ast
        raise QueryParseError(f"unexpected {value or kind!r}", pos)


def parse_query(text: str) -> RegexAst:
    """Parse a query pattern; closure binds tighter than concatenation,
    which binds tighter than alternation."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Automaton
# ---------------------------------------------------------------------------


@dataclass
class TwoNfa:
    """Automaton over (label, inverted) symbols as Boolean matrices.

    ``transitions`` is keyed by (label index, inverted); label indices come
    from the graph dictionary the pattern was compiled against, with labels
    unknown to that graph assigned fresh indices past its label count (their
    adjacency on the graph side is empty). ``starts`` and ``finals`` are
    1 x nstates indicator rows.
    """

    nstates: int
    transitions: dict[tuple[int, bool], SparseBoolMatrix]
    starts: SparseBoolMatrix
    finals: SparseBoolMatrix
    alphabet: frozenset[tuple[int, bool]] = field(default_factory=frozenset)
    label_names: dict[int, str] = field(default_factory=dict)

    @property
    def start_set(self) -> set[int]:
        return set(self.starts.indices.tolist())

    @property
    def final_set(self) -> set[int]:
        return set(self.finals.indices.tolist())

    def symbol_key(self, symbol: Symbol) -> tuple[int, bool] | None:
        """Map a (name, inverted) symbol to its transition key, if any."""
        name, inverted = symbol
        for idx, known in self.label_names.items():
            if known == name and (idx, inverted) in self.transitions:
                return (idx, inverted)
        return None


# --- Thompson construction (epsilon-NFA intermediate) ---


class _EpsNfa:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.trans: list[list[tuple[Symbol, int]]] = []

    def add_state(self) -> int:
        self.eps.append([])
        self.trans.append([])
        return len(self.eps) - 1

    def add_eps(self, src: int, dst: int):
        self.eps[src].append(dst)

    def add_sym(self, src: int, symbol: Symbol, dst: int):
        self.trans[src].append((symbol, dst))


def _thompson(node: RegexAst, nfa: _EpsNfa) -> tuple[int, int]:
    if isinstance(node, Label):
        s, t = nfa.add_state(), nfa.add_state()
        nfa.add_sym(s, (node.name, node.inverted), t)
        return s, t
    if isinstance(node, Concat):
        first_s, prev_t = _thompson(node.children[0], nfa)
        for child in node.children[1:]:
            s, t = _thompson(child, nfa)
            nfa.add_eps(prev_t, s)
            prev_t = t
        return first_s, prev_t
    if isinstance(node, Alt):
        s, t = nfa.add_state(), nfa.add_state()
        for child in node.children:
            cs, ct = _thompson(child, nfa)
            nfa.add_eps(s, cs)
            nfa.add_eps(ct, t)
        return s, t
    if isinstance(node, Star):
        s, t = nfa.add_state(), nfa.add_state()
        cs, ct = _thompson(node.child, nfa)
        nfa.add_eps(s, cs)
        nfa.add_eps(ct, t)
        nfa.add_eps(s, t)
        nfa.add_eps(ct, cs)
        return s, t
    if isinstance(node, Plus):
        # x+ desugars to x . x* (two independent copies of the fragment)
        first_s, first_t = _thompson(node.child, nfa)
        star_s, star_t = _thompson(Star(node.child), nfa)
        nfa.add_eps(first_t, star_s)
        return first_s, star_t
    if isinstance(node, Opt):
        # x? is x | epsilon
        s, t = nfa.add_state(), nfa.add_state()
        cs, ct = _thompson(node.child, nfa)
        nfa.add_eps(s, cs)
        nfa.add_eps(ct, t)
        nfa.add_eps(s, t)
        return s, t
    raise TypeError(f"not a regex node: {node!r}")


def _eps_closure(states, eps) -> frozenset:
    seen = set(states)
    stack = list(states)
    while stack:
        for nxt in eps[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def _subset_construction(ast: RegexAst):
    """Determinise; states are numbered in BFS discovery order."""
    nfa = _EpsNfa()
    start, accept = _thompson(ast, nfa)
    symbols = ast_symbols(ast)

    start_subset = _eps_closure([start], nfa.eps)
    ids: dict[frozenset, int] = {start_subset: 0}
    subsets = [start_subset]
    trans: list[dict[Symbol, int]] = [{}]
    queue = deque([start_subset])
    while queue:
        subset = queue.popleft()
        sid = ids[subset]
        for symbol in symbols:
            move = [
                dst
                for state in subset
                for sym, dst in nfa.trans[state]
                if sym == symbol
            ]
            if not move:
                continue
            target = _eps_closure(move, nfa.eps)
            if target not in ids:
                ids[target] = len(subsets)
                subsets.append(target)
                trans.append({})
                queue.append(target)
            trans[sid][symbol] = ids[target]
    finals = {ids[s] for s in subsets if accept in s}
    return len(subsets), symbols, trans, finals


def _hopcroft(nstates: int, symbols, trans, finals):
    """Partition states by behaviour; returns blocks of original states.

    Works on the totalised automaton (missing transitions go to an implicit
    sink numbered ``nstates``); the caller drops the sink's block.
    """
    sink = nstates
    total = nstates + 1

    def delta(state, symbol):
        if state == sink:
            return sink
        return trans[state].get(symbol, sink)

    preimage = {
        symbol: {t: [] for t in range(total)} for symbol in symbols
    }
    for state in range(total):
        for symbol in symbols:
            preimage[symbol][delta(state, symbol)].append(state)

    finals_fs = frozenset(finals)
    rest = frozenset(range(total)) - finals_fs
    partition = [b for b in (finals_fs, rest) if b]
    worklist = deque(partition)

    while worklist:
        splitter = worklist.popleft()
        for symbol in symbols:
            x = set()
            for target in splitter:
                x.update(preimage[symbol][target])
            if not x:
                continue
            next_partition = []
            for block in partition:
                inter = block & x
                diff = block - x
                if inter and diff:
                    inter, diff = frozenset(inter), frozenset(diff)
                    next_partition.extend((inter, diff))
                    if block in worklist:
                        worklist.remove(block)
                        worklist.append(inter)
                        worklist.append(diff)
                    else:
                        worklist.append(inter if len(inter) <= len(diff) else diff)
                else:
                    next_partition.append(block)
            partition = next_partition
    return partition, sink


def _minimize(nstates: int, symbols, trans, finals):
    partition, sink = _hopcroft(nstates, symbols, trans, finals)
    sink_block = next(b for b in partition if sink in b)
    live = [b for b in partition if b is not sink_block]
    # blocks numbered by their smallest contained subset-DFA state
    live.sort(key=min)
    block_of = {}
    for bid, block in enumerate(live):
        for state in block:
            block_of[state] = bid

    if 0 not in block_of:
        raise ValueError("pattern denotes the empty language")

    min_trans: list[dict[Symbol, int]] = [{} for _ in live]
    for bid, block in enumerate(live):
        rep = min(block)
        for symbol in symbols:
            target = trans[rep].get(symbol)
            if target is not None and target in block_of:
                min_trans[bid][symbol] = block_of[target]
    min_finals = {block_of[s] for s in finals}
    return len(live), min_trans, {block_of[0]}, min_finals


def _decompose(nstates, trans, starts, finals, labels) -> TwoNfa:
    """Boolean-matrix decomposition keyed by (label index, inverted)."""
    by_symbol: dict[Symbol, list[tuple[int, int]]] = {}
    for src, row in enumerate(trans):
        for symbol, dst in row.items():
            by_symbol.setdefault(symbol, []).append((src, dst))

    names = sorted({name for name, _ in by_symbol})
    label_names: dict[int, str] = {}
    next_extra = len(labels)
    index_of: dict[str, int] = {}
    for name in names:
        if name in labels:
            index_of[name] = labels[name]
        else:
            index_of[name] = next_extra
            next_extra += 1
        label_names[index_of[name]] = name

    transitions = {
        (index_of[name], inverted): SparseBoolMatrix.from_pairs(nstates, nstates, pairs)
        for (name, inverted), pairs in by_symbol.items()
    }
    return TwoNfa(
        nstates=nstates,
        transitions=transitions,
        starts=SparseBoolMatrix.from_pairs(1, nstates, [(0, s) for s in starts]),
        finals=SparseBoolMatrix.from_pairs(1, nstates, [(0, f) for f in finals]),
        alphabet=frozenset(transitions),
        label_names=label_names,
    )


def compile(ast: RegexAst, labels: dict[str, int], *, minimize: bool = True) -> TwoNfa:
    """Compile an AST to a deterministic automaton over the given label
    dictionary (typically ``graph.label_ids``); pass ``minimize=False`` to
    keep the raw subset-construction DFA."""
    nstates, symbols, trans, finals = _subset_construction(ast)
    starts = {0}
    if minimize:
        nstates, trans, starts, finals = _minimize(nstates, symbols, trans, finals)
    return _decompose(nstates, trans, starts, finals, labels)


def reverse(n: TwoNfa) -> TwoNfa:
    """Automaton of the reversed language: transposed transitions with every
    symbol's direction flipped, and start/final sets swapped."""
    transitions = {
        (idx, not inverted): transpose(m)
        for (idx, inverted), m in n.transitions.items()
    }
    return TwoNfa(
        nstates=n.nstates,
        transitions=transitions,
        starts=n.finals,
        finals=n.starts,
        alphabet=frozenset(transitions),
        label_names=dict(n.label_names),
    )


def accepts(n: TwoNfa, word) -> bool:
    """Direct state-set simulation of a word of (label, inverted) symbols."""
    current = n.start_set
    for symbol in word:
        if not current:
            return False
        key = n.symbol_key(tuple(symbol))
        if key is None:
            return False
        matrix = n.transitions[key]
        current = {
            int(dst) for state in current for dst in matrix.row(state).tolist()
        }
    return bool(current & n.final_set)
