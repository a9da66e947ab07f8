# augment/__init__.py