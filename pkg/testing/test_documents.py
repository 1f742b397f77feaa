"""
Output document encoding and layout
"""
import json
from fractions import Fraction

from django.test import SimpleTestCase

from covergen.documents import RawJSON, build_document, render_document
from covergen.grammar import nonterminal

from .helpers import bundled, node


class BuildDocumentTest(SimpleTestCase):

    def test_numbers_become_strings(self):
        doc = build_document('count', bundled('binary.g'), {'seed': 1 << 63, 'N': 4},
                             {'count': 10 ** 30, 'p': Fraction(3, 4), 'one': Fraction(1)})
        self.assertEqual(doc['parameters'], {'seed': str(1 << 63), 'N': '4'})
        self.assertEqual(doc['results'], {'count': '1' + '0' * 30, 'p': '3/4', 'one': '1'})

    def test_floats_only_under_approx_keys(self):
        doc = build_document('optimize', None, {}, {'p_approx': 0.5, 'pi_approx': {'X': 1.0}})
        self.assertEqual(doc['results'], {'p_approx': 0.5, 'pi_approx': {'X': 1.0}})
        with self.assertRaises(ValueError):
            build_document('optimize', None, {}, {'p': 0.5})

    def test_symbols_and_trees(self):
        doc = build_document('sample', None, {}, {'root': nonterminal('S'), 'samples': [node('T')]})
        self.assertEqual(doc['results']['root'], 'S')
        self.assertEqual(doc['results']['samples'], [RawJSON('["T",""]')])


class RenderDocumentTest(SimpleTestCase):

    def test_layout_matches_indented_json(self):
        doc = build_document('probs', bundled('json.g'), {'pairs': True},
                             {'single': {'Array': Fraction(11, 12)}, 'empty': [], 'none': {}, 'rows': [[1, 2]]},
                             ['a warning'])
        self.assertEqual(render_document(doc), json.dumps(doc, indent=2, ensure_ascii=False))

    def test_trees_on_one_line(self):
        doc = build_document('sample', None, {}, {'samples': [node('S', 'a', node('T'))]})
        text = render_document(doc)
        self.assertIn('    ["S","a",["T",""]]\n', text)
        self.assertEqual(json.loads(text)['results']['samples'], [['S', 'a', ['T', '']]])
