"""
Ratio matrix, max-min linear program and the isotropic bound
"""
from fractions import Fraction

from django.test import SimpleTestCase

from covergen.counting import TableCache
from covergen.exceptions import EmptyLanguageAtSize
from covergen.grammar import nonterminal, parse_grammar
from covergen.optimizer import (
    EMPTY_CRITERION, RatioMatrix, build_ratio_matrix, isotropic_coverage_bound, single_covering_counts,
    solve_maxmin, strategy_certificate,
)

from .helpers import bundled

GAPPED = 'S -> B | C ;\nB -> "b" | "b" B "b" ;\nC -> "c" | "c" C ;\n'


def two_by_two():
    a, b = nonterminal('A'), nonterminal('B')
    half = Fraction(1, 2)
    return RatioMatrix(n=1, total=1, criterion=(a, b),
                       ratios=[[Fraction(1), half], [half, Fraction(1)]])


class RatioMatrixTest(SimpleTestCase):

    def setUp(self):
        self.tables = TableCache()

    def test_json_matrix(self):
        g = bundled('json.g')
        matrix = build_ratio_matrix(g, 20, self.tables)
        array, elements = nonterminal('Array'), nonterminal('Elements')
        self.assertEqual(matrix.total, 12)
        self.assertEqual(matrix.excluded, ())
        self.assertEqual(len(matrix.pair_counts), 15)
        self.assertEqual(matrix.pair_count(array, elements), 8)
        # row f = Array, column e = Elements: every tree covering Elements covers Array
        self.assertEqual(matrix.ratio(array, elements), 1)
        self.assertEqual(matrix.ratio(elements, array), Fraction(8, 11))
        self.assertEqual(matrix.probability(elements), Fraction(2, 3))
        for symbol in matrix.criterion:
            self.assertEqual(matrix.ratio(symbol, symbol), 1)

    def test_parallel_pairs_match(self):
        g = bundled('json.g')
        serial = build_ratio_matrix(g, 20, self.tables, workers=1)
        parallel = build_ratio_matrix(g, 20, self.tables, workers=4)
        self.assertEqual(serial.ratios, parallel.ratios)

    def test_uncoverable_symbols_are_excluded(self):
        g = bundled('json.g')
        matrix = build_ratio_matrix(g, 3, self.tables)
        self.assertEqual(matrix.criterion, (nonterminal('Object'),))
        self.assertEqual(len(matrix.excluded), 5)
        self.assertEqual(len(matrix.warnings), 5)
        text = ' '.join(matrix.warnings)
        # Object -> { Members } with the smallest Pair
        self.assertIn('Members is covered by no tree of size 3 (coverable at size 9)', text)
        self.assertIn('Elements is covered by no tree of size 3 nor any size from 4 to 12', text)

    def test_exclusion_scan_starts_above_n(self):
        # trees through B have size 3, 6, 9, ...; trees through C size 3, 5, 7, ...
        g = parse_grammar(GAPPED)
        b = nonterminal('B')
        matrix = build_ratio_matrix(g, 5, self.tables)
        self.assertEqual(matrix.excluded, (b,))
        self.assertEqual(matrix.warnings, ['B is covered by no tree of size 5 (coverable at size 6); excluded'])

    def test_empty_language(self):
        with self.assertRaises(EmptyLanguageAtSize):
            build_ratio_matrix(bundled('binary.g'), 3, self.tables)
        with self.assertRaises(EmptyLanguageAtSize):
            single_covering_counts(bundled('binary.g'), 4, self.tables)


class SolveMaxMinTest(SimpleTestCase):

    def test_json_optimum_is_one(self):
        matrix = build_ratio_matrix(bundled('json.g'), 20, TableCache())
        solution = solve_maxmin(matrix, 'rational')
        self.assertTrue(solution.is_optimal)
        self.assertEqual(solution.p, 1)
        self.assertIsInstance(solution.p, Fraction)
        self.assertEqual(sum(solution.pi.values()), 1)
        self.assertTrue(all(v >= 0 for v in solution.pi.values()))
        self.assertEqual(strategy_certificate(matrix, solution.pi), 1)
        # Elements alone already covers everything
        self.assertEqual(strategy_certificate(matrix, {nonterminal('Elements'): Fraction(1)}), 1)

    def test_two_by_two(self):
        solution = solve_maxmin(two_by_two(), 'rational')
        self.assertEqual(solution.p, Fraction(3, 4))
        self.assertEqual(list(solution.pi.values()), [Fraction(1, 2), Fraction(1, 2)])

    def test_float_mode(self):
        solution = solve_maxmin(two_by_two(), 'float')
        self.assertEqual(solution.mode, 'float')
        self.assertAlmostEqual(solution.p, 0.75, places=9)
        self.assertAlmostEqual(sum(solution.pi.values()), 1.0, places=9)

    def test_single_symbol(self):
        matrix = build_ratio_matrix(bundled('binary.g'), 5, TableCache())
        solution = solve_maxmin(matrix, 'rational')
        self.assertEqual(solution.pi, {nonterminal('X'): 1})
        self.assertEqual(solution.p, 1)

    def test_empty_criterion(self):
        matrix = RatioMatrix(n=1, total=0, criterion=(), ratios=[])
        solution = solve_maxmin(matrix, 'rational')
        self.assertEqual(solution.status, EMPTY_CRITERION)
        self.assertFalse(solution.is_optimal)

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            solve_maxmin(two_by_two(), 'decimal')

    def test_example2_optimum_beats_isotropic(self):
        tables = TableCache()
        g = bundled('example2.g')
        matrix = build_ratio_matrix(g, 12, tables)
        solution = solve_maxmin(matrix, 'rational')
        p_min = min(matrix.probability(x) for x in matrix.criterion)
        self.assertGreaterEqual(solution.p, p_min)
        self.assertEqual(solution.p, strategy_certificate(matrix, solution.pi))


class IsotropicBoundTest(SimpleTestCase):

    def test_json_elements_two_draws(self):
        self.assertEqual(isotropic_coverage_bound(Fraction(8, 12), 2), Fraction(8, 9))

    def test_bounds(self):
        self.assertEqual(isotropic_coverage_bound(Fraction(1), 1), 1)
        self.assertEqual(isotropic_coverage_bound(Fraction(0), 5), 0)
        with self.assertRaises(ValueError):
            isotropic_coverage_bound(Fraction(3, 2), 1)
        with self.assertRaises(ValueError):
            isotropic_coverage_bound(Fraction(1, 2), 0)
