"""
Grammar parsing, formatting, validation and derivation-tree utilities
"""
from django.test import SimpleTestCase, override_settings

from covergen.exceptions import GrammarError, GrammarSyntaxError
from covergen.grammar import (
    EPSILON, Rule, canonical_key, check_tree, covered_symbols, covers, format_grammar, grammar_digest,
    has_errors, nonterminal, parse_grammar, terminal, tree_depth, tree_size, tree_text, tree_to_data,
    validate, yield_string,
)

from .helpers import bundled, node


def abb_tree():
    return node('S', 'a', node('S', node('T'), 'b'), 'b')


def aaabbaabb_tree():
    return node(
        'S',
        node('S',
             node('S', 'a', node('T', 'a', 'a')),
             node('S', node('X', 'b'), 'b')),
        node('S', node('X', node('T', 'a', 'a'), node('X', 'b')), 'b'),
    )


class ParseGrammarTest(SimpleTestCase):

    def test_alternatives_become_rules_in_order(self):
        g = bundled('binary.g')
        x = nonterminal('X')
        self.assertEqual(g.start, x)
        self.assertEqual(g.rules, (
            Rule(x, (x, x)),
            Rule(x, (terminal('a'),)),
            Rule(x, (terminal('b'),)),
        ))
        self.assertEqual(g.terminals, (terminal('a'), terminal('b')))

    def test_empty_alternative_is_epsilon_rule(self):
        g = bundled('example1.g')
        self.assertIn(Rule(nonterminal('T'), ()), g.rules)

    def test_start_directive(self):
        g = bundled('json.g')
        self.assertEqual(g.start, nonterminal('Object'))
        self.assertEqual(len(g.rules), 13)
        self.assertEqual(len(g.terminals), 8)
        self.assertEqual([s.name for s in g.nonterminals],
                         ['Object', 'Members', 'Pair', 'Value', 'Array', 'Elements'])

    def test_missing_semicolon(self):
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('S -> "a"')

    def test_unterminated_terminal_reports_position(self):
        with self.assertRaises(GrammarSyntaxError) as ctx:
            parse_grammar('S -> "a" ;\nT -> "b')
        self.assertEqual((ctx.exception.line, ctx.exception.column), (2, 6))

    def test_empty_terminal_string(self):
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('S -> "" ;')

    def test_unknown_directive(self):
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('%begin S\nS -> "a" ;')

    def test_no_rules(self):
        with self.assertRaises(GrammarSyntaxError):
            parse_grammar('# nothing here\n')

    def test_duplicate_start(self):
        with self.assertRaises(GrammarError):
            parse_grammar('%start S\n%start S\nS -> "a" ;')

    def test_start_must_be_mentioned(self):
        with self.assertRaises(GrammarError):
            parse_grammar('%start Q\nS -> "a" ;')

    def test_terminal_and_nonterminal_clash(self):
        with self.assertRaises(GrammarError):
            parse_grammar('S -> "S" S | "a" ;')


class FormatGrammarTest(SimpleTestCase):

    def test_round_trip_on_bundled_grammars(self):
        for name in ('binary.g', 'example1.g', 'example2.g', 'json.g'):
            with self.subTest(grammar=name):
                g = bundled(name)
                self.assertEqual(parse_grammar(format_grammar(g)), g)

    def test_canonical_text(self):
        self.assertEqual(format_grammar(bundled('binary.g')),
                         '%start X\nX -> X X | "a" | "b" ;\n')

    def test_digest(self):
        binary, json_g = bundled('binary.g'), bundled('json.g')
        self.assertEqual(len(grammar_digest(binary)), 64)
        self.assertEqual(grammar_digest(binary), grammar_digest(parse_grammar(format_grammar(binary))))
        self.assertNotEqual(grammar_digest(binary), grammar_digest(json_g))


class ValidateTest(SimpleTestCase):

    def test_json_unit_rules_are_warnings_by_default(self):
        diagnostics = validate(bundled('json.g'))
        self.assertFalse(has_errors(diagnostics))
        self.assertEqual(sum(1 for d in diagnostics if d.code == 'unit-rule'), 4)

    @override_settings(COVERGEN_UNIT_RULES='error')
    def test_unit_rule_error_in_strict_mode(self):
        diagnostics = validate(parse_grammar('S -> T ;\nT -> "a" ;'))
        errors = [d for d in diagnostics if d.is_error]
        self.assertEqual(len(errors), 1)
        self.assertEqual(errors[0].code, 'unit-rule')

    def test_explicit_override_beats_settings(self):
        diagnostics = validate(parse_grammar('S -> T ;\nT -> "a" ;'), unit_rules='error')
        self.assertTrue(has_errors(diagnostics))

    def test_unproductive_symbol(self):
        diagnostics = validate(parse_grammar('S -> "a" | A "c" ;\nA -> A "b" ;'))
        self.assertIn(('unproductive', 'A'), [(d.code, d.symbol) for d in diagnostics])
        self.assertFalse(has_errors(diagnostics))

    def test_unreachable_symbol(self):
        diagnostics = validate(parse_grammar('S -> "a" ;\nB -> "b" ;'))
        self.assertEqual([(d.code, d.symbol) for d in diagnostics], [('unreachable', 'B')])

    def test_wide_rhs_warning(self):
        diagnostics = validate(bundled('binary.g'), max_rhs_nonterminals=1)
        self.assertIn('wide-rhs', [d.code for d in diagnostics])

    def test_clean_grammar(self):
        self.assertEqual(validate(bundled('example2.g')), [])


class DerivationTreeTest(SimpleTestCase):

    def test_abb_tree(self):
        tree = abb_tree()
        check_tree(bundled('example1.g'), tree)
        self.assertEqual(tree_size(tree), 6)
        self.assertEqual(yield_string(tree), 'abb')
        self.assertEqual(covered_symbols(tree), {nonterminal('S'), nonterminal('T')})
        self.assertEqual(tree_depth(tree), 4)

    def test_aaabbaabb_tree(self):
        tree = aaabbaabb_tree()
        check_tree(bundled('example2.g'), tree)
        self.assertEqual(tree_size(tree), 19)
        self.assertEqual(yield_string(tree), 'aaabbaabb')
        self.assertTrue(covers(tree, 'X'))
        self.assertTrue(covers(tree, nonterminal('T')))

    def test_nested_list_form(self):
        self.assertEqual(tree_to_data(abb_tree()), ['S', 'a', ['S', ['T', ''], 'b'], 'b'])

    def test_epsilon_leaf_not_counted(self):
        t = node('T')
        self.assertEqual(t.children[0].label, EPSILON)
        self.assertEqual(tree_size(t), 1)

    def test_check_tree_rejects_wrong_root(self):
        with self.assertRaises(GrammarError):
            check_tree(bundled('example1.g'), node('T'))

    def test_check_tree_rejects_foreign_rule(self):
        with self.assertRaises(GrammarError):
            check_tree(bundled('example1.g'), node('S', 'b'))

    def test_tree_text(self):
        self.assertEqual(tree_text(abb_tree()), '["S","a",["S",["T",""],"b"],"b"]')
        self.assertEqual(canonical_key(abb_tree()), tree_text(abb_tree()))

    def test_equality_is_structural(self):
        self.assertEqual(abb_tree(), abb_tree())
        self.assertEqual(len({abb_tree(), abb_tree(), node('T')}), 2)
        self.assertNotEqual(abb_tree(), node('T'))


def chain_tree(depth):
    """S -> "a" S | "a" applied depth times, built bottom-up"""
    tree = node('S', 'a')
    for _ in range(depth - 1):
        tree = node('S', 'a', tree)
    return tree


class DeepTreeTest(SimpleTestCase):
    """Trees far deeper than the interpreter recursion limit"""

    DEPTH = 5000

    def test_traversals(self):
        tree = chain_tree(self.DEPTH)
        self.assertEqual(tree_size(tree), 2 * self.DEPTH)
        self.assertEqual(tree_depth(tree), self.DEPTH + 1)
        self.assertEqual(yield_string(tree), 'a' * self.DEPTH)
        self.assertEqual(len(tree_to_data(tree)), 3)

    def test_text_and_comparison(self):
        first, second = chain_tree(self.DEPTH), chain_tree(self.DEPTH)
        text = canonical_key(first)
        self.assertTrue(text.startswith('["S","a",["S","a",'))
        self.assertEqual(text.count('['), self.DEPTH)
        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))
        self.assertNotEqual(first, chain_tree(self.DEPTH - 1))
        self.assertIn('DerivationTree(', repr(first))
