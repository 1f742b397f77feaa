# grammar_coverage/__init__.py
