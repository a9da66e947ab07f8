# metrics/__init__.py