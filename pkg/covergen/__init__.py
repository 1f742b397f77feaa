# covergen/__init__.py
