"""
Output documents of the management commands

Every command prints one JSON document:

    {"command": ..., "grammar_digest": ..., "parameters": {...},
     "results": {...}, "warnings": [...]}

Inside parameters and results, integers are decimal strings and exact
probabilities are "a/b" strings. Float values only appear under keys ending
in `_approx`. Derivation trees are written as one-line nested lists.
"""
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from .grammar import DerivationTree, Grammar, Symbol, grammar_digest, tree_text

APPROX_SUFFIX = '_approx'
INDENT = 2


class RawJSON(str):
    """Already-serialized JSON text, written verbatim by render_document"""


class _Text(str):
    """Literal output fragment on the writer stack"""


def fraction_text(value) -> str:
    """'a/b' for a proper fraction, 'a' for an integral one"""
    return str(Fraction(value))


def _encode(value: Any, approx: bool = False) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, float):
        if not approx:
            raise ValueError(f"float value {value} must sit under a key ending in {APPROX_SUFFIX}")
        return value
    if isinstance(value, Symbol):
        return str(value)
    if isinstance(value, DerivationTree):
        return RawJSON(tree_text(value))
    if isinstance(value, dict):
        return {str(k): _encode(v, approx or str(k).endswith(APPROX_SUFFIX)) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return [_encode(v, approx) for v in sorted(value)]
    if isinstance(value, (list, tuple)):
        return [_encode(v, approx) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__} in an output document")


def build_document(command: str, grammar: Optional[Grammar], parameters: Dict[str, Any],
                   results: Dict[str, Any], warnings: Iterable[str] = ()) -> Dict[str, Any]:
    """
    Args:
        command: subcommand name
        grammar: grammar the command ran on (its digest is recorded)
        parameters: echoed command parameters
        results: payload
        warnings: human-readable warnings

    Returns:
        dict ready for render_document
    """
    return {
        'command': command,
        'grammar_digest': grammar_digest(grammar) if grammar is not None else None,
        'parameters': _encode(parameters),
        'results': _encode(results),
        'warnings': list(warnings),
    }


def render_document(document: Dict[str, Any]) -> str:
    """
    JSON text laid out like json.dumps(indent=2), written with an explicit
    stack. RawJSON values (trees) are inserted as they are.
    """
    out: List[str] = []
    stack: List[Any] = [(document, 0)]
    while stack:
        item = stack.pop()
        if isinstance(item, _Text):
            out.append(item)
            continue
        value, level = item
        if isinstance(value, RawJSON):
            out.append(value)
        elif isinstance(value, (dict, list)) and value:
            inner = '\n' + ' ' * (INDENT * (level + 1))
            if isinstance(value, dict):
                opener, closer, entries = '{', '}', list(value.items())
            else:
                opener, closer, entries = '[', ']', [(None, v) for v in value]
            pending: List[Any] = [_Text(opener + inner)]
            for position, (key, child) in enumerate(entries):
                if position:
                    pending.append(_Text(',' + inner))
                if key is not None:
                    pending.append(_Text(json.dumps(key, ensure_ascii=False) + ': '))
                pending.append((child, level + 1))
            pending.append(_Text('\n' + ' ' * (INDENT * level) + closer))
            stack.extend(reversed(pending))
        else:
            out.append(json.dumps(value, ensure_ascii=False))
    return ''.join(out)
