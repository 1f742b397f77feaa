"""
Grammar data model, grammar file parsing and validation, derivation-tree primitives

Grammar file format:
    # comment
    %start Object
    Object -> "{" "}" | "{" Members "}" ;
    T -> ;                                  (empty alternative = epsilon)
"""
import enum
import hashlib
import json
import logging
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from django.conf import settings

from .exceptions import GrammarError, GrammarSyntaxError

logger = logging.getLogger(__name__)


class SymbolKind(str, enum.Enum):
    TERMINAL = 'terminal'
    NONTERMINAL = 'nonterminal'
    EPSILON = 'epsilon'


@dataclass(frozen=True, order=True)
class Symbol:
    """
    A grammar symbol.

    Terminals carry their literal text as name. Non-terminals of derived
    (covering) grammars keep the origin name and stack their tags, so
    ((S,1),0) is Symbol(NONTERMINAL, 'S', (1, 0)).
    """
    kind: SymbolKind
    name: str
    tags: Tuple[int, ...] = ()

    @property
    def is_terminal(self) -> bool:
        return self.kind is SymbolKind.TERMINAL

    @property
    def is_nonterminal(self) -> bool:
        return self.kind is SymbolKind.NONTERMINAL

    @property
    def is_epsilon(self) -> bool:
        return self.kind is SymbolKind.EPSILON

    @property
    def base(self) -> 'Symbol':
        """The symbol with every tag erased"""
        if not self.tags:
            return self
        return Symbol(self.kind, self.name)

    def tagged(self, tag: int) -> 'Symbol':
        return Symbol(self.kind, self.name, self.tags + (tag,))

    def __str__(self):
        if self.is_terminal:
            return json.dumps(self.name, ensure_ascii=False)
        if self.is_epsilon:
            return 'ε'
        text = self.name
        for tag in self.tags:
            text = f"({text},{tag})"
        return text


EPSILON = Symbol(SymbolKind.EPSILON, '')


def terminal(name: str) -> Symbol:
    return Symbol(SymbolKind.TERMINAL, name)


def nonterminal(name: str) -> Symbol:
    return Symbol(SymbolKind.NONTERMINAL, name)


@dataclass(frozen=True)
class Rule:
    """A production lhs -> rhs; an empty rhs is epsilon"""
    lhs: Symbol
    rhs: Tuple[Symbol, ...] = ()

    @property
    def rhs_nonterminals(self) -> Tuple[Symbol, ...]:
        return tuple(s for s in self.rhs if s.is_nonterminal)

    @property
    def terminal_count(self) -> int:
        return sum(1 for s in self.rhs if s.is_terminal)

    @property
    def is_unit(self) -> bool:
        return len(self.rhs) == 1 and self.rhs[0].is_nonterminal

    def __str__(self):
        rhs = " ".join(str(s) for s in self.rhs)
        return f"{self.lhs} -> {rhs}".rstrip()


@dataclass(frozen=True)
class Grammar:
    """
    Context-free grammar (terminals, non-terminals, start symbol, rules).

    Alphabets are tuples in first-appearance order so every report built
    from them is deterministic. Rule order is significant: it fixes rule
    indices, sampling order and tie-breaking downstream.
    """
    terminals: Tuple[Symbol, ...]
    nonterminals: Tuple[Symbol, ...]
    start: Symbol
    rules: Tuple[Rule, ...]

    def __post_init__(self):
        if any(not s.is_terminal for s in self.terminals):
            raise GrammarError("terminal alphabet holds a non-terminal symbol")
        if any(not s.is_nonterminal for s in self.nonterminals):
            raise GrammarError("non-terminal alphabet holds a terminal symbol")
        if self.start not in self.nonterminal_set:
            raise GrammarError(f"start symbol {self.start} is not a declared non-terminal")
        clash = {s.name for s in self.terminals} & {s.name for s in self.nonterminals if not s.tags}
        if clash:
            raise GrammarError(f"symbols used both as terminal and non-terminal: {', '.join(sorted(clash))}")
        for rule in self.rules:
            if rule.lhs not in self.nonterminal_set:
                raise GrammarError(f"undeclared non-terminal {rule.lhs} on the left of '{rule}'")
            for symbol in rule.rhs:
                if symbol.is_epsilon:
                    raise GrammarError(f"epsilon must be written as an empty right-hand side in '{rule}'")
                if symbol not in self.nonterminal_set and symbol not in self.terminal_set:
                    raise GrammarError(f"undeclared symbol {symbol} in '{rule}'")

    @classmethod
    def from_rules(cls, rules: Sequence[Rule], start: Optional[Symbol] = None,
                   extra_nonterminals: Sequence[Symbol] = ()) -> 'Grammar':
        """Collect both alphabets from the rules, in order of first appearance"""
        if start is None:
            if not rules:
                raise GrammarError("a grammar without rules needs an explicit start symbol")
            start = rules[0].lhs
        terminals: Dict[Symbol, None] = {}
        nonterminals: Dict[Symbol, None] = {start: None}
        for rule in rules:
            nonterminals.setdefault(rule.lhs)
            for symbol in rule.rhs:
                if symbol.is_terminal:
                    terminals.setdefault(symbol)
                elif symbol.is_nonterminal:
                    nonterminals.setdefault(symbol)
        for symbol in extra_nonterminals:
            nonterminals.setdefault(symbol)
        return cls(tuple(terminals), tuple(nonterminals), start, tuple(rules))

    @cached_property
    def terminal_set(self) -> frozenset:
        return frozenset(self.terminals)

    @cached_property
    def nonterminal_set(self) -> frozenset:
        return frozenset(self.nonterminals)

    @cached_property
    def rule_indices(self) -> Dict[Symbol, Tuple[int, ...]]:
        """lhs -> indices of its rules, in rule order"""
        index: Dict[Symbol, List[int]] = {s: [] for s in self.nonterminals}
        for i, rule in enumerate(self.rules):
            index[rule.lhs].append(i)
        return {s: tuple(v) for s, v in index.items()}

    @cached_property
    def rule_set(self) -> frozenset:
        return frozenset(self.rules)

    def rules_for(self, symbol: Symbol) -> Tuple[Rule, ...]:
        return tuple(self.rules[i] for i in self.rule_indices.get(symbol, ()))

    def symbol(self, name: Union[str, Symbol]) -> Symbol:
        """Resolve a non-terminal by name, raising GrammarError when unknown"""
        if isinstance(name, Symbol):
            if name not in self.nonterminal_set:
                raise GrammarError(f"unknown non-terminal {name}")
            return name
        candidate = nonterminal(name)
        if candidate not in self.nonterminal_set:
            raise GrammarError(f"unknown non-terminal '{name}'")
        return candidate

    @cached_property
    def max_rhs_nonterminals(self) -> int:
        """The largest number of non-terminal occurrences in one right-hand side"""
        return max((len(r.rhs_nonterminals) for r in self.rules), default=0)


# ---------------------------------------------------------------------------
# Parsing and formatting
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r'''
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<directive>%[A-Za-z_]+)
  | (?P<arrow>->)
  | (?P<bar>\|)
  | (?P<semi>;)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
''', re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            if text[pos] == '"':
                raise GrammarSyntaxError("unterminated terminal string", line, column)
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind not in ('ws', 'comment'):
            tokens.append(_Token(kind, match.group(), line, column))
        pos = match.end()
    tokens.append(_Token('eof', '', line, pos - line_start + 1))
    return tokens


def _unquote(token: _Token) -> str:
    try:
        value = json.loads(token.text)
    except ValueError:
        raise GrammarSyntaxError(f"bad escape in terminal {token.text}", token.line, token.column)
    if not value:
        raise GrammarSyntaxError("empty terminal string; write an empty alternative for epsilon",
                                 token.line, token.column)
    return value


def parse_grammar(text: str) -> Grammar:
    """
    Parse grammar source text.

    Alternatives separated by '|' become separate rules in left-to-right
    order; rule order follows the source. The start symbol is set by
    '%start' or, failing that, by the first rule's left-hand side.

    Raises:
        GrammarSyntaxError: malformed text (with line and column)
        GrammarError: duplicate %start, undeclared start symbol, or a name
            used both as terminal and non-terminal
    """
    tokens = _tokenize(text)
    pos = 0
    start_token: Optional[_Token] = None
    rules: List[Rule] = []

    def expect(kind, what):
        nonlocal pos
        token = tokens[pos]
        if token.kind != kind:
            found = token.text or 'end of input'
            raise GrammarSyntaxError(f"expected {what}, found {found!r}", token.line, token.column)
        pos += 1
        return token

    while tokens[pos].kind != 'eof':
        token = tokens[pos]
        if token.kind == 'directive':
            if token.text != '%start':
                raise GrammarSyntaxError(f"unknown directive {token.text}", token.line, token.column)
            pos += 1
            name = expect('ident', 'a non-terminal after %start')
            if start_token is not None:
                raise GrammarError(f"duplicate %start directive at line {token.line} "
                                   f"(first one at line {start_token.line})")
            start_token = name
            continue

        lhs = nonterminal(expect('ident', 'a rule left-hand side').text)
        expect('arrow', "'->'")
        alternative: List[Symbol] = []
        while True:
            token = tokens[pos]
            if token.kind == 'ident':
                alternative.append(nonterminal(token.text))
            elif token.kind == 'string':
                alternative.append(terminal(_unquote(token)))
            elif token.kind in ('bar', 'semi'):
                rules.append(Rule(lhs, tuple(alternative)))
                alternative = []
                if token.kind == 'semi':
                    pos += 1
                    break
            else:
                found = token.text or 'end of input'
                raise GrammarSyntaxError(f"expected a symbol, '|' or ';', found {found!r}",
                                         token.line, token.column)
            pos += 1

    if not rules:
        last = tokens[-1]
        raise GrammarSyntaxError("grammar has no rules", last.line, last.column)

    start = None
    if start_token is not None:
        start = nonterminal(start_token.text)
        mentioned = {r.lhs for r in rules} | {s for r in rules for s in r.rhs}
        if start not in mentioned:
            raise GrammarError(f"%start names undeclared symbol '{start_token.text}' "
                               f"(line {start_token.line})")
    grammar = Grammar.from_rules(rules, start)
    logger.debug("[GRAMMAR] parsed %d rules, %d non-terminals, start %s",
                 len(grammar.rules), len(grammar.nonterminals), grammar.start)
    return grammar


def format_grammar(grammar: Grammar) -> str:
    """
    Canonical text of a grammar; parse_grammar(format_grammar(g)) == g
    for grammars written in the file format.

    Consecutive rules sharing a left-hand side are joined with '|', so rule
    order is preserved exactly.
    """
    if any(s.tags for s in grammar.nonterminals):
        raise GrammarError("tagged covering grammars have no textual form")
    lines = [f"%start {grammar.start.name}"]
    run: List[Rule] = []

    def flush():
        if run:
            words = [run[0].lhs.name, '->']
            for i, rule in enumerate(run):
                if i:
                    words.append('|')
                words.extend(str(s) for s in rule.rhs)
            words.append(';')
            lines.append(" ".join(words))
            run.clear()

    for rule in grammar.rules:
        if run and run[0].lhs != rule.lhs:
            flush()
        run.append(rule)
    flush()
    return "\n".join(lines) + "\n"


def grammar_digest(grammar: Grammar) -> str:
    """sha256 of the canonical text"""
    return hashlib.sha256(format_grammar(grammar).encode('utf-8')).hexdigest()


def load_grammar(path: Union[str, Path]) -> Grammar:
    """
    Read and parse a grammar file.

    A bare file name that does not exist is looked up among the bundled
    grammars (covergen/fixtures/grammars).
    """
    candidate = Path(path)
    if not candidate.exists():
        bundled = Path(settings.COVERGEN_GRAMMAR_DIR) / candidate.name
        if bundled.exists():
            candidate = bundled
    logger.debug("[GRAMMAR] loading %s", candidate)
    return parse_grammar(candidate.read_text(encoding='utf-8'))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

ERROR = 'error'
WARNING = 'warning'


@dataclass(frozen=True)
class Diagnostic:
    level: str
    code: str
    message: str
    symbol: Optional[str] = None

    @property
    def is_error(self) -> bool:
        return self.level == ERROR

    def __str__(self):
        return f"{self.level}: {self.message}"


def productive_symbols(grammar: Grammar) -> Set[Symbol]:
    """Non-terminals deriving at least one finite tree (fixpoint)"""
    productive: Set[Symbol] = set()
    changed = True
    while changed:
        changed = False
        for rule in grammar.rules:
            if rule.lhs in productive:
                continue
            if all(s in productive for s in rule.rhs_nonterminals):
                productive.add(rule.lhs)
                changed = True
    return productive


def reachable_symbols(grammar: Grammar) -> Set[Symbol]:
    """Non-terminals reachable from the start symbol"""
    seen = {grammar.start}
    queue = deque([grammar.start])
    while queue:
        current = queue.popleft()
        for rule in grammar.rules_for(current):
            for symbol in rule.rhs_nonterminals:
                if symbol not in seen:
                    seen.add(symbol)
                    queue.append(symbol)
    return seen


def validate(grammar: Grammar, *, unit_rules: Optional[str] = None,
             max_rhs_nonterminals: Optional[int] = None) -> List[Diagnostic]:
    """
    Check a grammar and return its diagnostics (errors and warnings).

    Args:
        grammar: grammar to check
        unit_rules: severity of rules whose rhs is one non-terminal,
            'error' or 'warn' (default: settings.COVERGEN_UNIT_RULES)
        max_rhs_nonterminals: bound on non-terminal occurrences per rhs
            above which covering grammars blow up
            (default: settings.COVERGEN_MAX_RHS_NONTERMINALS)

    Returns:
        list of Diagnostic; callers treat any error as fatal
    """
    if unit_rules is None:
        unit_rules = settings.COVERGEN_UNIT_RULES
    if max_rhs_nonterminals is None:
        max_rhs_nonterminals = settings.COVERGEN_MAX_RHS_NONTERMINALS
    unit_level = ERROR if unit_rules == 'error' else WARNING

    diagnostics: List[Diagnostic] = []
    for rule in grammar.rules:
        if rule.is_unit:
            diagnostics.append(Diagnostic(
                unit_level, 'unit-rule',
                f"rule '{rule}' has a single non-terminal as right-hand side",
                rule.lhs.name))

    reachable = reachable_symbols(grammar)
    productive = productive_symbols(grammar)
    for symbol in grammar.nonterminals:
        if symbol not in reachable:
            diagnostics.append(Diagnostic(
                WARNING, 'unreachable', f"non-terminal {symbol} is unreachable from {grammar.start}",
                symbol.name))
        if symbol not in productive:
            diagnostics.append(Diagnostic(
                WARNING, 'unproductive', f"non-terminal {symbol} derives no finite tree",
                symbol.name))

    widest = grammar.max_rhs_nonterminals
    if widest > max_rhs_nonterminals:
        diagnostics.append(Diagnostic(
            WARNING, 'wide-rhs',
            f"a right-hand side holds {widest} non-terminals (bound {max_rhs_nonterminals}); "
            f"pair covering grammars grow about 4^{widest} times"))

    for d in diagnostics:
        logger.debug("[GRAMMAR] %s", d)
    return diagnostics


def has_errors(diagnostics: Sequence[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


# ---------------------------------------------------------------------------
# Derivation trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class DerivationTree:
    """
    Ordered labelled tree. Internal nodes carry a non-terminal and the rule
    applied there; leaves carry a terminal or EPSILON.

    Trees compare and hash by their canonical text, so sampled trees of any
    depth can be compared without recursion.
    """
    label: Symbol
    children: Tuple['DerivationTree', ...] = ()
    rule: Optional[Rule] = None

    @cached_property
    def key(self) -> str:
        return canonical_key(self)

    def __eq__(self, other):
        if not isinstance(other, DerivationTree):
            return NotImplemented
        return self is other or self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __str__(self):
        return self.key

    def __repr__(self):
        return f"DerivationTree({self.key})"


def leaf(symbol: Symbol) -> DerivationTree:
    return DerivationTree(symbol)


def iter_nodes(tree: DerivationTree) -> Iterator[DerivationTree]:
    """Pre-order traversal (leaves come out left to right)"""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def tree_size(tree: DerivationTree) -> int:
    """Number of nodes labelled by a terminal or non-terminal; epsilon leaves do not count"""
    return sum(1 for node in iter_nodes(tree) if not node.label.is_epsilon)


def yield_string(tree: DerivationTree, separator: str = '') -> str:
    """Terminal leaves concatenated left to right"""
    return separator.join(node.label.name for node in iter_nodes(tree) if node.label.is_terminal)


def covered_symbols(tree: DerivationTree) -> Set[Symbol]:
    return {node.label for node in iter_nodes(tree) if node.label.is_nonterminal}


def covers(tree: DerivationTree, symbol: Union[str, Symbol]) -> bool:
    """True iff some node is labelled by the non-terminal"""
    if isinstance(symbol, str):
        symbol = nonterminal(symbol)
    return any(node.label == symbol for node in iter_nodes(tree))


def tree_depth(tree: DerivationTree) -> int:
    depth = 0
    stack = [(tree, 1)]
    while stack:
        node, level = stack.pop()
        depth = max(depth, level)
        stack.extend((child, level + 1) for child in node.children)
    return depth


def map_tree(tree: DerivationTree, label_fn, rule_fn) -> DerivationTree:
    """Rebuild a tree bottom-up with relabelled nodes and rules (explicit stack)"""
    built: Dict[int, DerivationTree] = {}
    stack = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if not expanded and node.children:
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(node.children))
            continue
        children = tuple(built[id(child)] for child in node.children)
        rule = rule_fn(node.rule) if node.rule is not None else None
        built[id(node)] = DerivationTree(label_fn(node.label), children, rule)
    return built[id(tree)]


def _label_text(symbol: Symbol) -> str:
    return symbol.name if not symbol.tags else str(symbol)


def tree_to_data(tree: DerivationTree):
    """
    Nested-list form: [label, child, ...] for internal nodes, the terminal
    text for terminal leaves and "" for epsilon.
    """
    label_text = _label_text
    built: Dict[int, object] = {}
    stack = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if not expanded and node.children:
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(node.children))
            continue
        if node.label.is_nonterminal:
            value = [label_text(node.label)] + [built[id(c)] for c in node.children]
        elif node.label.is_terminal:
            value = node.label.name
        else:
            value = ""
        built[id(node)] = value
    return built[id(tree)]


def tree_text(tree: DerivationTree) -> str:
    """
    Compact JSON text of tree_to_data(tree), written in pre-order with an
    explicit stack (json.dumps recurses on nested lists).
    """
    parts: List[str] = []
    stack: List[Union[str, DerivationTree]] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif item.label.is_nonterminal:
            parts.append('[' + json.dumps(_label_text(item.label), ensure_ascii=False))
            stack.append(']')
            for child in reversed(item.children):
                stack.append(child)
                stack.append(',')
        elif item.label.is_terminal:
            parts.append(json.dumps(item.label.name, ensure_ascii=False))
        else:
            parts.append('""')
    return ''.join(parts)


def canonical_key(tree: DerivationTree) -> str:
    """Structural identity of a tree as a string"""
    return tree_text(tree)


def check_tree(grammar: Grammar, tree: DerivationTree, root: Optional[Symbol] = None) -> None:
    """
    Raise GrammarError unless tree is a derivation tree of grammar
    (rooted at root, default the start symbol).
    """
    root = grammar.start if root is None else root
    if tree.label != root:
        raise GrammarError(f"tree root is {tree.label}, expected {root}")
    for node in iter_nodes(tree):
        if node.label.is_nonterminal:
            if node.rule is None or node.rule not in grammar.rule_set:
                raise GrammarError(f"node {node.label} does not apply a rule of the grammar")
            if node.rule.lhs != node.label:
                raise GrammarError(f"node {node.label} applies '{node.rule}'")
            labels = tuple(child.label for child in node.children)
            expected = node.rule.rhs if node.rule.rhs else (EPSILON,)
            if labels != expected:
                raise GrammarError(f"children of {node.label} do not spell '{node.rule}'")
        elif node.children:
            raise GrammarError(f"leaf {node.label} has children")
