# volume/__init__.py